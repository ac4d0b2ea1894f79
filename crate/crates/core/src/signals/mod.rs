//! Grids, signal containers, Euler-angle geometry and sphere-field association.

mod associate;
mod grid;
mod metrics;
mod rotation;
mod spatial;
mod spectral;
mod sphere;

pub use associate::{
    associate_scalar, associate_vector, extract_scalar, extract_vector, interpolate_spatial,
    left_translate_spatial,
};
pub use grid::EulerGrid;
pub use metrics::{distance, loss_weighted_mse};
pub use rotation::{euler_to_matrix, matrix_to_euler, RotationMatrix};
pub use spatial::SpatialSignal;
pub use spectral::{column_of_order, SpectralSignal};
pub use sphere::{FieldKind, SphereField};
