use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("potential fails the growth probe: {0}")]
    NotConfining(String),
    #[error("precision exhausted at degree {0}")]
    PrecisionExhausted(usize),
    #[error("support touches the bounding interval [{0}, {1}]; enlarge and retry")]
    SupportTouchesBoundary(f64, f64),
    #[error("equilibrium solver did not converge after {iterations} iterations (kkt residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("unresolved structure: {0}")]
    UnresolvedStructure(String),
    #[error("measure is not regular: {0}")]
    Irregular(String),
    #[error("edge refinement failed: {0}")]
    EdgeRefinement(String),
    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),
    #[error("theta tail bound {eps:e} unreachable within truncation radius {max_radius}")]
    ThetaTruncation { eps: f64, max_radius: usize },
    #[error("theta denominator degenerate at {0}")]
    ThetaDegenerate(String),
    #[error("point outside the domain: {0}")]
    Domain(String),
}
