pub mod graph;
pub mod moves;
pub mod lambda;
pub mod knot;
pub mod gen;
pub mod selfcheck;
