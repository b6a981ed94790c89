//! The genus-`g` layer: surface data, theta function, Abel map and model functions.

mod riemann;
mod surface;

pub use riemann::ThetaEvaluator;
pub use surface::{build_surface, model_functions_m, SurfaceData};
