use std::fmt;

use crate::quantization::Irrep;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    #[error("orbit refinement did not converge after {iterations} iterations (closure {closure:e})")]
    Refinement { iterations: usize, closure: f64 },
    #[error("degenerate guess: Newton system is singular")]
    DegenerateGuess,
    #[error("near-marginal orbit: transversal trace {trace}")]
    MarginalOrbit { trace: f64 },
    #[error("winding resolution too coarse: angle jump {jump} rad at sample {sample}")]
    WindingResolution { sample: usize, jump: f64 },
    #[error("orbit {orbit} has no {irrep} component in the desymmetrization table")]
    Inapplicable { orbit: u32, irrep: Irrep },
    #[error("grid coverage: {0}")]
    Coverage(String),
    #[error("symmetry projection annihilated the state (retained fraction {fraction:e})")]
    NullProjection { fraction: f64 },
    #[error("probability {probability:e} reached the grid boundary")]
    Leakage { probability: f64 },
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error("candidate pool has {pool} functions but the window needs {needed}")]
    InsufficientCandidates { pool: usize, needed: usize },
    #[error("rank deficiency after {selected} of {needed} selections")]
    RankDeficient { selected: usize, needed: usize },
    #[error("basis of {elements} elements exceeds the limit of {limit}")]
    Size { elements: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("formula singular: {0}")]
    Singularity(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("{0}")]
    Parse(ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse(ParseError { line, message: message.into() })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
