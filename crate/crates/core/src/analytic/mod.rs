//! Numerical singularity analysis of class systems.

pub mod numeric;
pub mod singular;

pub use numeric::{Jet, NumericSystem};
pub use singular::{find_singularity, AnalyticError, Branch, BranchPoint, SingularExpansion};
pub mod laws;

pub use laws::{covariance_matrix, growth_constants, limit_law_constants, tail_ratio, Covariance, GrowthConstants, LimitLaw};
pub mod outerplanar;

pub use outerplanar::{outerplanar_law, outerplanar_point, truncated_outerplanar, GVariants, OuterplanarLaw, OuterplanarPoint};
pub mod report;

pub use report::{dissection_report, limit_law_report, outerplanar_report, AsymptoticReport, Context, ReportError};
