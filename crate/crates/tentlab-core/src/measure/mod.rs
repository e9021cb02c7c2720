//! The invariant density φ, fiber measures α_x and the measure identities.

mod alpha;
mod density;

pub use alpha::{alpha_cylinder, alpha_of_box, disintegration_check, unstable_measure, AlphaValue, Disintegration};
pub use density::{birkhoff_histogram, density_grid, density_markov, density_series, Density, DensityKind};
