use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at {0}")]
    SelfLoop(usize),
    #[error("no path between {0} and {1}")]
    NoPath(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("permutation has length {got}, expected {expected}")]
    WrongDomain { got: usize, expected: usize },
    #[error("map is not a bijection: {0} is hit twice")]
    NotBijective(usize),
    #[error("generator {index} of action `{action}` is not an automorphism: {witness}")]
    NotAutomorphism {
        action: String,
        index: usize,
        witness: String,
    },
    #[error("depth {depth} exceeds inner radius {inner_radius}")]
    DepthTooLarge { depth: usize, inner_radius: usize },
    #[error("walk is broken between positions {0} and {1}")]
    NotAWalk(usize, usize),
    #[error("{0}")]
    Schema(String),
}
