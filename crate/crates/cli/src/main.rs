//! `glc`: command-line front end for the graphic lambda calculus engine.
//!
//! Exit status is 0 on success, 1 on domain errors (bad input files, moves
//! that do not apply, graphs outside a sector, non-isomorphic graphs, failed
//! self-checks) and 2 on usage errors. Running out of fuel is not an error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use glc_core::graph::{emit_glf, is_isomorphic, parse_glf, to_dot, Graph};
use glc_core::knot::{
    apply_knot_script, decode_to_pd, emit_pd, encode_diagram, parse_pd, CrossingBinding, KnotScript,
};
use glc_core::lambda::{
    encode_term, is_lambda_graph, parse_term, readback, reduce_graph, ReduceStatus, DEFAULT_FUEL,
};
use glc_core::moves::{apply_script, MoveScript, MoveTrace};
use glc_core::selfcheck::{self, Fixtures, CRITERIA};

#[derive(Debug, Parser)]
#[command(name = "glc", version, about = "Graphic lambda calculus: λ-terms and knot diagrams as port graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode, check and reduce λ-terms.
    #[command(subcommand)]
    Lambda(LambdaCmd),
    /// Encode oriented tangle diagrams and apply Reidemeister moves.
    #[command(subcommand)]
    Knot(KnotCmd),
    /// Compare, render and rewrite graphs in GLF.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Run the built-in acceptance checks.
    Selfcheck {
        /// Only run the criteria of this sector (lambda, moves, knot, codec),
        /// with this name, or with this number.
        #[arg(long, value_name = "NAME")]
        filter: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum LambdaCmd {
    /// Print the λ-graph of a term.
    Encode {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        output: Output,
    },
    /// Check that a term's encoding, or a GLF graph, is a λ-graph.
    Check {
        #[command(flatten)]
        input: TermInput,
    },
    /// Reduce on the graph to normal form.
    Reduce {
        #[command(flatten)]
        input: TermInput,
        /// Maximum number of β moves.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
enum KnotCmd {
    /// Encode a PD diagram as a tangle graph.
    Encode {
        /// Diagram in PD form.
        #[arg(long, value_name = "F")]
        pd: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a knot script (Reidemeister macros and β moves) on a diagram.
    Apply {
        #[command(flatten)]
        input: DiagramInput,
        /// Knot script.
        #[arg(long, value_name = "F")]
        script: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Decode a tangle graph (GLF with crossing comments) back to PD.
    Decode {
        #[command(flatten)]
        input: DiagramInput,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
enum GraphCmd {
    /// Decide boundary-labeled isomorphism and print the node mapping.
    Iso { a: PathBuf, b: PathBuf },
    /// Render a graph as Graphviz DOT.
    Render {
        file: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(long, value_name = "F")]
        out: Option<PathBuf>,
    },
    /// Replay a move script on a graph.
    Run {
        file: PathBuf,
        /// Move script.
        #[arg(long, value_name = "F")]
        script: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct TermInput {
    /// The term, e.g. "(\x. x) y".
    #[arg(long, value_name = "S")]
    term: Option<String>,
    /// A file holding a term, or a graph if the name ends in `.glf`.
    #[arg(long = "in", value_name = "F")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct DiagramInput {
    /// Diagram in PD form.
    #[arg(long, value_name = "F")]
    pd: Option<PathBuf>,
    /// Tangle graph in GLF, with `# crossing` sign comments.
    #[arg(long = "in", value_name = "F")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Write the result here instead of stdout (only on success).
    #[arg(long, value_name = "F")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Term,
    Glf,
    Dot,
    Pd,
    Trace,
}

impl Emit {
    fn name(self) -> &'static str {
        match self {
            Emit::Term => "term",
            Emit::Glf => "glf",
            Emit::Dot => "dot",
            Emit::Pd => "pd",
            Emit::Trace => "trace",
        }
    }

    /// A line of commentary in this format.
    fn comment(self, text: &str) -> String {
        match self {
            Emit::Dot => format!("// {text}\n"),
            Emit::Term => format!("{text}\n"),
            _ => format!("# {text}\n"),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

type Outcome<T> = Result<T, Failure>;

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

/// The text a command produces: the payload (which `--out` redirects) and
/// status lines that always go to stdout.
#[derive(Debug, Default)]
struct Report {
    payload: String,
    status: String,
    success: bool,
}

impl Report {
    fn ok(payload: String) -> Self {
        Report { payload, status: String::new(), success: true }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (result, out) = run(cli.command);
    match result.and_then(|r| deliver(r, out.as_deref())) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("glc: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("glc: {m}");
            ExitCode::from(1)
        }
    }
}

/// Writes the report: the payload to `out` (atomically) or stdout, then the
/// status lines to stdout.
fn deliver(r: Report, out: Option<&Path>) -> Outcome<bool> {
    let mut stdout = io::stdout().lock();
    match out {
        Some(path) if r.success => write_atomically(path, &r.payload).map_err(domain)?,
        _ => stdout.write_all(r.payload.as_bytes()).map_err(domain)?,
    }
    stdout.write_all(r.status.as_bytes()).map_err(domain)?;
    Ok(r.success)
}

fn write_atomically(path: &Path, text: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".glc-partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

fn run(command: Command) -> (Outcome<Report>, Option<PathBuf>) {
    match command {
        Command::Lambda(cmd) => match cmd {
            LambdaCmd::Encode { input, output } => {
                let out = output.out.clone();
                (lambda_encode(&input, &output), out)
            }
            LambdaCmd::Check { input } => (lambda_check(&input), None),
            LambdaCmd::Reduce { input, fuel, output } => {
                let out = output.out.clone();
                (lambda_reduce(&input, fuel, &output), out)
            }
        },
        Command::Knot(cmd) => match cmd {
            KnotCmd::Encode { pd, output } => {
                let out = output.out.clone();
                (knot_encode(&pd, &output), out)
            }
            KnotCmd::Apply { input, script, output } => {
                let out = output.out.clone();
                (knot_apply(&input, &script, &output), out)
            }
            KnotCmd::Decode { input, output } => {
                let out = output.out.clone();
                (knot_decode(&input, &output), out)
            }
        },
        Command::Graph(cmd) => match cmd {
            GraphCmd::Iso { a, b } => (graph_iso(&a, &b), None),
            GraphCmd::Render { file, out } => (read_graph(&file).map(|g| Report::ok(to_dot(&g))), out),
            GraphCmd::Run { file, script, output } => {
                let out = output.out.clone();
                (graph_run(&file, &script, &output), out)
            }
        },
        Command::Selfcheck { filter } => (run_selfcheck(filter.as_deref()), None),
    }
}

/// The chosen format, checked against those the command supports before any
/// file is read.
fn format(output: &Output, allowed: &[Emit], command: &str) -> Outcome<Emit> {
    let emit = output.emit.unwrap_or(allowed[0]);
    if allowed.contains(&emit) {
        Ok(emit)
    } else {
        let names: Vec<&str> = allowed.iter().map(|e| e.name()).collect();
        Err(Failure::Usage(format!(
            "`{command}` cannot emit {}; choose one of: {}",
            emit.name(),
            names.join(", ")
        )))
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Outcome<Graph> {
    parse_glf(&read(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn is_glf(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "glf")
}

/// The λ-graph given by `--term`, a term file, or a GLF file.
fn lambda_graph(input: &TermInput) -> Outcome<Graph> {
    let text = match (&input.term, &input.input) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) if is_glf(path) => return read_graph(path),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err(Failure::Usage("give --term or --in".into())),
    };
    parse_term(text.trim()).map(|t| encode_term(&t)).map_err(domain)
}

fn render(g: &Graph, emit: Emit) -> String {
    match emit {
        Emit::Dot => to_dot(g),
        _ => emit_glf(g),
    }
}

fn with_trace(payload: String, trace: &MoveTrace, emit: Emit) -> String {
    let body = if emit == Emit::Trace { trace.to_string() } else { payload };
    body + &emit.comment(&format!("trace: {}", trace.summary()))
}

fn lambda_encode(input: &TermInput, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Glf, Emit::Dot], "lambda encode")?;
    Ok(Report::ok(render(&lambda_graph(input)?, emit)))
}

fn lambda_check(input: &TermInput) -> Outcome<Report> {
    let g = lambda_graph(input)?;
    let report = is_lambda_graph(&g);
    if report.is_lambda_graph() {
        return Ok(Report::ok("LAMBDA-GRAPH\n".into()));
    }
    let mut payload = String::from("NOT A LAMBDA-GRAPH\n");
    for v in &report.violations {
        payload.push_str(&format!("  {v}\n"));
    }
    Ok(Report { payload, status: String::new(), success: false })
}

fn lambda_reduce(input: &TermInput, fuel: u64, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Term, Emit::Glf, Emit::Dot, Emit::Trace], "lambda reduce")?;
    let g = lambda_graph(input)?;
    let r = reduce_graph(&g, fuel).map_err(domain)?;
    let payload = match emit {
        Emit::Term => format!("{}\n", readback(&r.graph).map_err(domain)?),
        Emit::Trace => with_trace(String::new(), &r.trace, emit),
        _ => render(&r.graph, emit),
    };
    let status = if r.status == ReduceStatus::FuelExhausted {
        emit.comment(&r.status.to_string())
    } else {
        String::new()
    };
    Ok(Report { payload, status, success: true })
}

/// A tangle graph and its crossing signs, from PD or from GLF comments.
fn tangle(input: &DiagramInput) -> Outcome<(Graph, CrossingBinding)> {
    match (&input.pd, &input.input) {
        (Some(pd), _) => {
            let d = parse_pd(&read(pd)?).map_err(|e| Failure::Domain(format!("{}: {e}", pd.display())))?;
            encode_diagram(&d).map_err(domain)
        }
        (None, Some(path)) => {
            let text = read(path)?;
            let g = parse_glf(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
            let b = CrossingBinding::from_comments(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
            Ok((g, b))
        }
        (None, None) => Err(Failure::Usage("give --pd or --in".into())),
    }
}

fn render_tangle(g: &Graph, b: &CrossingBinding, emit: Emit) -> Outcome<String> {
    Ok(match emit {
        Emit::Glf => b.to_comments() + &emit_glf(g),
        Emit::Dot => to_dot(g),
        _ => emit_pd(&decode_to_pd(g, b).map_err(domain)?),
    })
}

fn knot_encode(pd: &Path, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Glf, Emit::Dot, Emit::Pd], "knot encode")?;
    let (g, b) = tangle(&DiagramInput { pd: Some(pd.to_path_buf()), input: None })?;
    Ok(Report::ok(render_tangle(&g, &b, emit)?))
}

fn knot_apply(input: &DiagramInput, script: &Path, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Pd, Emit::Glf, Emit::Dot, Emit::Trace], "knot apply")?;
    let (g, b) = tangle(input)?;
    let s = KnotScript::parse(&read(script)?).map_err(|e| Failure::Domain(format!("{}: {e}", script.display())))?;
    let (g, b, trace) = apply_knot_script(&g, &b, &s).map_err(domain)?;
    let body = if emit == Emit::Trace { String::new() } else { render_tangle(&g, &b, emit)? };
    Ok(Report::ok(with_trace(body, &trace, emit)))
}

fn knot_decode(input: &DiagramInput, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Pd], "knot decode")?;
    let (g, b) = tangle(input)?;
    Ok(Report::ok(render_tangle(&g, &b, emit)?))
}

fn graph_iso(a: &Path, b: &Path) -> Outcome<Report> {
    let (g, h) = (read_graph(a)?, read_graph(b)?);
    Ok(match is_isomorphic(&g, &h) {
        Some(m) => Report::ok(m.iter().map(|(x, y)| format!("{x} -> {y}\n")).collect::<String>() + "ISOMORPHIC\n"),
        None => Report { payload: "NOT ISOMORPHIC\n".into(), status: String::new(), success: false },
    })
}

fn graph_run(file: &Path, script: &Path, output: &Output) -> Outcome<Report> {
    let emit = format(output, &[Emit::Glf, Emit::Dot, Emit::Trace], "graph run")?;
    let g = read_graph(file)?;
    let s = MoveScript::parse(&read(script)?).map_err(|e| Failure::Domain(format!("{}: {e}", script.display())))?;
    let (g, trace) = apply_script(&g, &s).map_err(domain)?;
    let body = if emit == Emit::Trace { String::new() } else { render(&g, emit) };
    Ok(Report::ok(with_trace(body, &trace, emit)))
}

fn run_selfcheck(filter: Option<&str>) -> Outcome<Report> {
    if let Some(f) = filter {
        if !CRITERIA.iter().any(|c| c.matches(f)) {
            let names: Vec<&str> = CRITERIA.iter().map(|c| c.name).collect();
            return Err(Failure::Usage(format!(
                "no criterion matches `{f}`; use a sector (lambda, moves, knot, codec), a number, or one of: {}",
                names.join(", ")
            )));
        }
    }
    let outcomes = selfcheck::run_selfcheck(&Fixtures::default(), filter);
    let mut payload = String::new();
    for o in &outcomes {
        payload.push_str(&o.verdict());
        payload.push('\n');
        eprintln!("criterion {}: {}", o.criterion.number, o.timing());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    payload.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    Ok(Report { payload, status: String::new(), success: passed == outcomes.len() })
}
