//! Equivariant layers, UNet models and training on band-limited signals over SO(3).

pub mod activation;
pub mod data;
pub mod error;
pub mod features;
pub mod kernels;
pub mod layer;
pub mod loss;
pub mod optim;
pub mod tape;
pub mod train;
pub mod unet;

pub use activation::Activation;
pub use error::{NnError, Result};
pub use features::Features;
pub use layer::{ConvLayer, LayerCache, LayerGrad, LayerSpec};
pub use tape::Tape;
pub use unet::{UNet, UNetConfig};
pub use loss::SphereLoss;
pub use optim::Adam;
pub use train::{train, MetricsRow, Sample, TrainConfig, METRICS_HEADER};
