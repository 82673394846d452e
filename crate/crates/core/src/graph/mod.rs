//! Typed, oriented port graphs.
//!
//! A [`Graph`] is built from decorated gates ([`NodeKind`]) whose ports carry a
//! fixed [`Role`]. Every port is incident to exactly one edge end; free edge
//! ends are named IN or OUT leaves, and closed loops without any node are kept
//! as a counter rather than as edges.

mod dot;
pub(crate) mod glf;
mod iso;
mod matching;

pub use dot::to_dot;
pub use glf::{emit_glf, parse_glf, GlfError};
pub use iso::{is_isomorphic, NodeMapping};
pub use matching::{extract_match, find_matches, SubgraphMatch};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Identifier of a gate inside a graph. Printed as `n<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('n')
            .and_then(|digits| {
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    None
                } else {
                    digits.parse().ok()
                }
            })
            .map(NodeId)
            .ok_or_else(|| format!("node ids have the form n<number>, got `{s}`"))
    }
}

/// Identifier of an edge. Edge ids are internal; textual formats name edges
/// by their endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// The gates of the graphical alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    /// λ gate: one input (the body), two outputs (variable, abstraction).
    Lambda,
    /// Υ gate: one input, two outputs.
    FanOut,
    /// ∧ gate: function and argument inputs, one output.
    Application,
    /// ⊤ gate: a single input.
    Termination,
    /// ε̄ gate, decorated by an opaque group label.
    Dilation(String),
}

const LAMBDA_ROLES: [Role; 3] = [Role::In, Role::VOut, Role::AOut];
const FANOUT_ROLES: [Role; 3] = [Role::In, Role::LOut, Role::ROut];
const APPLICATION_ROLES: [Role; 3] = [Role::Fin, Role::Ain, Role::Out];
const TERMINATION_ROLES: [Role; 1] = [Role::In];
const DILATION_ROLES: [Role; 3] = [Role::In1, Role::In2, Role::Out];

impl NodeKind {
    /// Port roles in the fixed clockwise order for this kind.
    pub fn roles(&self) -> &'static [Role] {
        match self {
            NodeKind::Lambda => &LAMBDA_ROLES,
            NodeKind::FanOut => &FANOUT_ROLES,
            NodeKind::Application => &APPLICATION_ROLES,
            NodeKind::Termination => &TERMINATION_ROLES,
            NodeKind::Dilation(_) => &DILATION_ROLES,
        }
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.roles().contains(&role)
    }

    /// 1-based clockwise index of `role` on this gate.
    pub fn role_index(&self, role: Role) -> Option<usize> {
        self.roles().iter().position(|r| *r == role).map(|i| i + 1)
    }

    /// Tag used by the GLF format.
    pub fn tag(&self) -> &'static str {
        match self {
            NodeKind::Lambda => "LAM",
            NodeKind::FanOut => "FO",
            NodeKind::Application => "APP",
            NodeKind::Termination => "TOP",
            NodeKind::Dilation(_) => "DIL",
        }
    }

    pub fn decoration(&self) -> Option<&str> {
        match self {
            NodeKind::Dilation(label) => Some(label),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Dilation(label) => write!(f, "DIL {label}"),
            other => f.write_str(other.tag()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

/// Named port roles. `In` is shared by λ, Υ and ⊤; `Out` by ∧ and ε̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    In,
    VOut,
    AOut,
    Fin,
    Ain,
    Out,
    LOut,
    ROut,
    In1,
    In2,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::In => "in",
            Role::VOut => "vout",
            Role::AOut => "aout",
            Role::Fin => "fin",
            Role::Ain => "ain",
            Role::Out => "out",
            Role::LOut => "lout",
            Role::ROut => "rout",
            Role::In1 => "in1",
            Role::In2 => "in2",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Role::In | Role::Fin | Role::Ain | Role::In1 | Role::In2 => Direction::Input,
            Role::VOut | Role::AOut | Role::Out | Role::LOut | Role::ROut => Direction::Output,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "in" => Role::In,
            "vout" => Role::VOut,
            "aout" => Role::AOut,
            "fin" => Role::Fin,
            "ain" => Role::Ain,
            "out" => Role::Out,
            "lout" => Role::LOut,
            "rout" => Role::ROut,
            "in1" => Role::In1,
            "in2" => Role::In2,
            _ => return Err(format!("unknown port role `{s}`")),
        })
    }
}

/// One end of an edge: a gate port or a boundary leaf.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Port(NodeId, Role),
    InLeaf(String),
    OutLeaf(String),
}

impl Endpoint {
    pub fn node(&self) -> Option<NodeId> {
        match self {
            Endpoint::Port(n, _) => Some(*n),
            _ => None,
        }
    }

    pub fn port(&self) -> Option<(NodeId, Role)> {
        match self {
            Endpoint::Port(n, r) => Some((*n, *r)),
            _ => None,
        }
    }

    /// Whether an edge may start here (output port or IN leaf).
    fn can_source(&self) -> bool {
        match self {
            Endpoint::Port(_, r) => r.direction() == Direction::Output,
            Endpoint::InLeaf(_) => true,
            Endpoint::OutLeaf(_) => false,
        }
    }

    fn can_target(&self) -> bool {
        match self {
            Endpoint::Port(_, r) => r.direction() == Direction::Input,
            Endpoint::OutLeaf(_) => true,
            Endpoint::InLeaf(_) => false,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Port(n, r) => write!(f, "{n}.{r}"),
            Endpoint::InLeaf(name) => write!(f, "in:{name}"),
            Endpoint::OutLeaf(name) => write!(f, "out:{name}"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(name) = s.strip_prefix("in:") {
            return leaf_name(name).map(Endpoint::InLeaf);
        }
        if let Some(name) = s.strip_prefix("out:") {
            return leaf_name(name).map(Endpoint::OutLeaf);
        }
        let (node, role) = s
            .split_once('.')
            .ok_or_else(|| format!("expected <node>.<role>, in:<name> or out:<name>, got `{s}`"))?;
        Ok(Endpoint::Port(node.parse()?, role.parse()?))
    }
}

fn leaf_name(name: &str) -> Result<String, String> {
    if name.is_empty() {
        Err("empty leaf name".to_string())
    } else {
        Ok(name.to_string())
    }
}

/// An oriented edge from an output port (or IN leaf) to an input port (or OUT leaf).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: Endpoint,
    pub target: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("role `{role}` does not exist on {kind} node {node}")]
    UnknownRole { node: NodeId, role: Role, kind: String },
    #[error("port {0} is already used by another edge")]
    DuplicatePortUse(Endpoint),
    #[error("leaf {0} is already used by another edge")]
    DuplicateLeaf(Endpoint),
    #[error("direction mismatch: an edge cannot run from {from} to {to}")]
    DirectionMismatch { from: Endpoint, to: Endpoint },
    #[error("dangling port {node}.{role}")]
    DanglingPort { node: NodeId, role: Role },
    #[error("edge {0} is not present")]
    MissingEdge(EdgeId),
    #[error("node {0} still has connected ports")]
    NodeConnected(NodeId),
    #[error("no node-free loop to remove")]
    NoLoop,
}

/// A single structural defect reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingPort { node: NodeId, role: Role },
    DuplicatePortUse { endpoint: Endpoint },
    DirectionMismatch { edge: EdgeId },
    UnknownRole { edge: EdgeId, endpoint: Endpoint },
    UnknownNode { edge: EdgeId, node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingPort { node, role } => write!(f, "dangling port {node}.{role}"),
            Violation::DuplicatePortUse { endpoint } => {
                write!(f, "port {endpoint} used by more than one edge")
            }
            Violation::DirectionMismatch { edge } => write!(f, "edge {edge} violates orientation"),
            Violation::UnknownRole { edge, endpoint } => {
                write!(f, "edge {edge} uses role not present on its node: {endpoint}")
            }
            Violation::UnknownNode { edge, node } => {
                write!(f, "edge {edge} references unknown node {node}")
            }
        }
    }
}

/// Result of splicing two edges together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spliced {
    /// The new edge joining the upstream source to the downstream target.
    Edge(EdgeId),
    /// The two edges were the same edge; a node-free loop was born.
    Loop,
}

/// An element of GRAPH: gates, oriented edges, boundary leaves and node-free loops.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: BTreeMap<NodeId, NodeKind>,
    edges: BTreeMap<EdgeId, Edge>,
    ports: HashMap<(NodeId, Role), EdgeId>,
    in_leaves: BTreeMap<String, EdgeId>,
    out_leaves: BTreeMap<String, EdgeId>,
    loops: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeKind)> + '_ {
        self.nodes.iter().map(|(id, k)| (*id, k))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn kind(&self, node: NodeId) -> Option<&NodeKind> {
        self.nodes.get(&node)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.nodes.contains_key(&node)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    /// The edge attached to a port, if any.
    pub fn edge_at(&self, node: NodeId, role: Role) -> Option<EdgeId> {
        self.ports.get(&(node, role)).copied()
    }

    /// The edge attached to an endpoint (port or leaf), if any.
    pub fn edge_at_endpoint(&self, endpoint: &Endpoint) -> Option<EdgeId> {
        match endpoint {
            Endpoint::Port(n, r) => self.edge_at(*n, *r),
            Endpoint::InLeaf(name) => self.in_leaves.get(name).copied(),
            Endpoint::OutLeaf(name) => self.out_leaves.get(name).copied(),
        }
    }

    /// The endpoint at the far end of the edge attached to `(node, role)`.
    pub fn neighbor(&self, node: NodeId, role: Role) -> Option<&Endpoint> {
        let edge = self.edges.get(&self.edge_at(node, role)?)?;
        if role.direction() == Direction::Output {
            Some(&edge.target)
        } else {
            Some(&edge.source)
        }
    }

    pub fn in_leaf(&self, name: &str) -> Option<EdgeId> {
        self.in_leaves.get(name).copied()
    }

    pub fn out_leaf(&self, name: &str) -> Option<EdgeId> {
        self.out_leaves.get(name).copied()
    }

    pub fn in_leaf_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.in_leaves.keys().map(String::as_str)
    }

    pub fn out_leaf_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.out_leaves.keys().map(String::as_str)
    }

    /// Smallest node id strictly greater than every id in use.
    pub fn fresh_node_id(&self) -> NodeId {
        NodeId(self.nodes.keys().next_back().map_or(0, |n| n.0 + 1))
    }

    fn fresh_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = self.fresh_node_id();
        self.nodes.insert(id, kind);
        id
    }

    pub fn insert_node(&mut self, id: NodeId, kind: NodeKind) -> Result<(), GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        self.nodes.insert(id, kind);
        Ok(())
    }

    /// Removes a node whose ports are all free.
    pub fn remove_node(&mut self, id: NodeId) -> Result<NodeKind, GraphError> {
        let kind = self.nodes.get(&id).ok_or(GraphError::UnknownNode(id))?;
        if kind.roles().iter().any(|r| self.ports.contains_key(&(id, *r))) {
            return Err(GraphError::NodeConnected(id));
        }
        Ok(self.nodes.remove(&id).expect("checked above"))
    }

    /// Detaches every edge at `id`, removes the node, and returns the detached edges.
    pub fn remove_node_and_edges(&mut self, id: NodeId) -> Result<Vec<Edge>, GraphError> {
        let kind = self.nodes.get(&id).ok_or(GraphError::UnknownNode(id))?;
        let mut incident: Vec<EdgeId> = kind
            .roles()
            .iter()
            .filter_map(|r| self.ports.get(&(id, *r)).copied())
            .collect();
        incident.sort();
        incident.dedup();
        let removed = incident
            .into_iter()
            .map(|e| self.disconnect(e))
            .collect::<Result<Vec<_>, _>>()?;
        self.nodes.remove(&id);
        Ok(removed)
    }

    fn check_endpoint(&self, endpoint: &Endpoint) -> Result<(), GraphError> {
        match endpoint {
            Endpoint::Port(n, r) => {
                let kind = self.nodes.get(n).ok_or(GraphError::UnknownNode(*n))?;
                if !kind.has_role(*r) {
                    return Err(GraphError::UnknownRole {
                        node: *n,
                        role: *r,
                        kind: kind.tag().to_string(),
                    });
                }
                if self.ports.contains_key(&(*n, *r)) {
                    return Err(GraphError::DuplicatePortUse(endpoint.clone()));
                }
            }
            Endpoint::InLeaf(name) => {
                if self.in_leaves.contains_key(name) {
                    return Err(GraphError::DuplicateLeaf(endpoint.clone()));
                }
            }
            Endpoint::OutLeaf(name) => {
                if self.out_leaves.contains_key(name) {
                    return Err(GraphError::DuplicateLeaf(endpoint.clone()));
                }
            }
        }
        Ok(())
    }

    /// Adds an edge `source → target`, enforcing orientation and port exclusivity.
    pub fn connect(&mut self, source: Endpoint, target: Endpoint) -> Result<EdgeId, GraphError> {
        self.check_endpoint(&source)?;
        self.check_endpoint(&target)?;
        if !source.can_source() || !target.can_target() {
            return Err(GraphError::DirectionMismatch {
                from: source,
                to: target,
            });
        }
        let id = self.fresh_edge_id();
        self.attach(id, &source);
        self.attach(id, &target);
        self.edges.insert(id, Edge { source, target });
        Ok(id)
    }

    fn attach(&mut self, id: EdgeId, endpoint: &Endpoint) {
        match endpoint {
            Endpoint::Port(n, r) => {
                self.ports.insert((*n, *r), id);
            }
            Endpoint::InLeaf(name) => {
                self.in_leaves.insert(name.clone(), id);
            }
            Endpoint::OutLeaf(name) => {
                self.out_leaves.insert(name.clone(), id);
            }
        }
    }

    fn detach(&mut self, endpoint: &Endpoint) {
        match endpoint {
            Endpoint::Port(n, r) => {
                self.ports.remove(&(*n, *r));
            }
            Endpoint::InLeaf(name) => {
                self.in_leaves.remove(name);
            }
            Endpoint::OutLeaf(name) => {
                self.out_leaves.remove(name);
            }
        }
    }

    /// Removes an edge and frees both of its ends.
    pub fn disconnect(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let edge = self.edges.remove(&id).ok_or(GraphError::MissingEdge(id))?;
        self.detach(&edge.source);
        self.detach(&edge.target);
        Ok(edge)
    }

    /// Joins `upstream`'s source to `downstream`'s target, removing both edges.
    ///
    /// The ends being dropped (upstream's target and downstream's source) are
    /// expected to belong to nodes the caller is about to delete. When the two
    /// edges are the same edge, it is removed and a node-free loop is counted.
    pub fn splice(&mut self, upstream: EdgeId, downstream: EdgeId) -> Result<Spliced, GraphError> {
        if upstream == downstream {
            self.disconnect(upstream)?;
            self.loops += 1;
            return Ok(Spliced::Loop);
        }
        if !self.edges.contains_key(&downstream) {
            return Err(GraphError::MissingEdge(downstream));
        }
        let up = self.disconnect(upstream)?;
        let down = self.disconnect(downstream)?;
        self.connect(up.source, down.target).map(Spliced::Edge)
    }

    pub fn add_loops(&mut self, count: usize) {
        self.loops += count;
    }

    pub fn remove_loop(&mut self) -> Result<(), GraphError> {
        if self.loops == 0 {
            return Err(GraphError::NoLoop);
        }
        self.loops -= 1;
        Ok(())
    }

    /// Nodes reachable from the given endpoint's node when moving along edge orientation.
    pub(crate) fn successors(&self, node: NodeId) -> impl Iterator<Item = &Endpoint> + '_ {
        let roles = self.nodes.get(&node).map_or(&[][..], |k| k.roles());
        roles
            .iter()
            .filter(|r| r.direction() == Direction::Output)
            .filter_map(move |r| self.neighbor(node, *r))
    }

    pub(crate) fn predecessors(&self, node: NodeId) -> impl Iterator<Item = &Endpoint> + '_ {
        let roles = self.nodes.get(&node).map_or(&[][..], |k| k.roles());
        roles
            .iter()
            .filter(|r| r.direction() == Direction::Input)
            .filter_map(move |r| self.neighbor(node, *r))
    }
}

/// Builds a graph from declared nodes, edges and a loop count.
///
/// Unlike incremental construction, every port must end up connected.
pub fn build_graph(
    nodes: impl IntoIterator<Item = (NodeId, NodeKind)>,
    edges: impl IntoIterator<Item = (Endpoint, Endpoint)>,
    loops: usize,
) -> Result<Graph, GraphError> {
    let mut g = Graph::new();
    for (id, kind) in nodes {
        g.insert_node(id, kind)?;
    }
    for (source, target) in edges {
        g.connect(source, target)?;
    }
    g.add_loops(loops);
    if let Some((node, kind)) = g
        .nodes()
        .find(|(n, k)| k.roles().iter().any(|r| g.edge_at(*n, *r).is_none()))
    {
        let role = kind
            .roles()
            .iter()
            .copied()
            .find(|r| g.edge_at(node, *r).is_none())
            .expect("found above");
        return Err(GraphError::DanglingPort { node, role });
    }
    Ok(g)
}

/// Lists every structural defect; empty exactly when the graph is a member of GRAPH.
pub fn validate(g: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&Endpoint, EdgeId> = HashMap::new();
    for (id, edge) in g.edges() {
        if !edge.source.can_source() || !edge.target.can_target() {
            out.push(Violation::DirectionMismatch { edge: id });
        }
        for end in [&edge.source, &edge.target] {
            if let Endpoint::Port(n, r) = end {
                match g.kind(*n) {
                    None => out.push(Violation::UnknownNode { edge: id, node: *n }),
                    Some(k) if !k.has_role(*r) => out.push(Violation::UnknownRole {
                        edge: id,
                        endpoint: end.clone(),
                    }),
                    Some(_) => {}
                }
            }
            if seen.insert(end, id).is_some() {
                out.push(Violation::DuplicatePortUse {
                    endpoint: end.clone(),
                });
            }
        }
    }
    for (node, kind) in g.nodes() {
        for role in kind.roles() {
            let attached = g
                .edge_at(node, *role)
                .and_then(|e| g.edge(e))
                .is_some_and(|e| {
                    let port = Endpoint::Port(node, *role);
                    e.source == port || e.target == port
                });
            if !attached {
                out.push(Violation::DanglingPort { node, role: *role });
            }
        }
    }
    out
}

/// IN and OUT leaf names of a graph.
pub fn leaves_partition(g: &Graph) -> (BTreeSet<String>, BTreeSet<String>) {
    (
        g.in_leaf_names().map(str::to_string).collect(),
        g.out_leaf_names().map(str::to_string).collect(),
    )
}

/// Pure form of [`Graph::splice`].
pub fn splice(g: &Graph, upstream: EdgeId, downstream: EdgeId) -> Result<Graph, GraphError> {
    let mut out = g.clone();
    out.splice(upstream, downstream)?;
    Ok(out)
}
