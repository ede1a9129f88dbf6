//! Weight calculus for radially weighted Besov-type spaces on the unit ball.

pub mod classify;
pub mod config;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod lab;
pub mod moments;
pub mod pick;
pub mod quadrature;
pub mod series;
pub mod shift;
pub mod special;
pub mod weight;

pub use error::{Error, Result};
pub use grid::Grid;
pub use moments::{moment, moment_ratio_limit_check, moment_sequence, Moment, MomentSequence, Source, TrendReport};
pub use shift::{ball_shift, shift, ShiftBase, ShiftedDensity};
pub use weight::{DiscreteMeasure, Pt, RadialWeight, WeightDensity};
pub use kernel::{besov_norm, kernel_coeffs, BesovSpace, KernelCoefficients};
pub use series::GradedSeries;
pub use classify::{classify, doubling_check, weakly_normal_check, ClassificationReport, ClassifyOptions, DoublingVerdict, EnvelopeOptions, PairingOptions};
pub use lab::{column_row_norms, growth_norm, kacnelson_block, kacnelson_conjugation, mult_matrix, mult_norm_section, op_norm, random_lower_triangular, random_nonincreasing_diagonal, CMatrix};
pub use pick::{kaluza_coeffs, pick_test, KaluzaVerdict, PickOptions, PickVerdict, PowerSeriesKernel, Precision};
pub use config::{builtin_weights, CatalogEntry, WeightConfig, WeightKind};
