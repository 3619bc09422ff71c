//! Collision probability between two agents whose poses along a trajectory
//! are Gaussian, estimated with adaptive sigma points.
//!
//! ```
//! use sigmacheck::{generate, Checker, CheckerConfig, GeneratorSpec};
//!
//! let scenario = generate(&GeneratorSpec::default()).unwrap();
//! let checker = Checker::new(CheckerConfig::default()).unwrap();
//! let result = checker
//!     .check_agents(&scenario.agents[0], &scenario.agents[1])
//!     .unwrap();
//! assert!((0.0..=1.0).contains(&result.p_collision_final));
//! ```

pub mod bench;
pub mod checker;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod scenario;
pub mod sigma;
pub mod uncertainty;

pub use checker::{
    check_all_pairs, check_trajectory, ellipse_prefilter, radius_prefilter, Checker, CheckerConfig,
    CollisionResult, Scheme,
};
pub use error::{Error, FieldError, Result};
pub use exec::Execution;
pub use geometry::{collision_indicator, place, point_in_polygon, polygons_intersect, Polygon2D, Pose2D, Vec2};
pub use linalg::{sqrt_sym3, std_normal_cdf, SymMat3};
pub use scenario::{generate, generate_suite, load_scenario, save_scenario, Agent, GeneratorSpec, Scenario, Template};
pub use sigma::{AdaptiveSigmaPoints, SchemeTag, WeightedSample, WeightedSampleSet};
pub use uncertainty::{relative_distribution, GaussianPose, GaussianTrajectory, RelativeGaussian};
