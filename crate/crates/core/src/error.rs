use thiserror::Error;

use crate::grid::LatticePoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("mask contains no vertices")]
    EmptyGraph,

    #[error("line {line}, column {column}: unexpected character {found:?} (expected '#', '.' or ' ')")]
    Parse {
        line: usize,
        column: usize,
        found: char,
    },

    #[error("graph is not connected")]
    NotConnected,

    #[error("graph has no cycle cover")]
    NoCover,

    #[error("edge set is not a cycle cover: vertex {0:?} has degree {1}")]
    NotACover(LatticePoint, usize),

    #[error("negative cycle in difference system")]
    Infeasible,

    #[error("face {to} is unreachable from face {from}")]
    Unreachable { from: usize, to: usize },

    #[error("height fields differ on a pinned face cluster (face {0})")]
    DifferentComponent(usize),

    #[error("the space of degree-constrained subgraphs is empty")]
    EmptySpace,

    #[error("square {0} is not a local extremum")]
    NotExtremal(usize),

    #[error("row starting at square {0} is no longer movable")]
    RowInvalidated(usize),

    #[error("component has no cover with at most two cycles")]
    EmptyTarget,

    #[error("component is not Hamiltonian")]
    NotHamiltonian,

    #[error("no Hamiltonian cycle found after {0} restarts")]
    RestartsExhausted(usize),

    #[error("graph has {edges} edges, above the enumeration cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("signature has {found} entries, graph has {expected} holes")]
    SignatureMismatch { expected: usize, found: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
