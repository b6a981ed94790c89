//! Exact discrete orthogonal polynomials on the truncated lattice `{k/N}`.

mod lattice;
mod stieltjes;
mod zeros;

pub use lattice::{build_lattice, build_lattice_with_guard, LatticeSpec, DEFAULT_GUARD};
pub use stieltjes::{stieltjes_orthogonalize, RecurrenceTable};
pub use zeros::{count_zeros, count_zeros_open, locate_zeros, zeros_above, zeros_at, NODE_RESOLUTION};
