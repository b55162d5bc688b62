//! Domain types shared by all modules: datasets, label kernels, losses,
//! surrogate models, selection rules, and estimation metrics.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; randomness flows through an explicit value-passed [`rng::Rng`].

pub mod dataset;
pub mod kernel;
pub mod loss;
pub mod metric;
pub mod rng;
pub mod selection;
pub mod surrogate;

pub use dataset::Dataset;
pub use kernel::{sample_label, KernelKind, LabelKernel};
pub use loss::{LossFunction, LossKind, TestKind};
pub use metric::{EstimationMetric, MetricKind};
pub use rng::Rng;
pub use selection::{SchemeKind, SelectionRule};
pub use surrogate::{surrogate_decompose, SurrogateModel};
