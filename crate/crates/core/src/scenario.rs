//! Scenario files and the synthetic scenario generator.
//!
//! A scenario is a set of agents, each with a polygonal footprint and a
//! Gaussian pose trajectory on a shared time grid. Files are JSON; see
//! `docs/SCENARIO_FORMAT.md` for the schema.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::geometry::{Polygon2D, Pose2D, Vec2};
use crate::linalg::{sqrt_sym3, SymMat3};
use crate::uncertainty::{GaussianPose, GaussianTrajectory, TIME_ALIGN_TOL};

pub const SCHEMA_VERSION: u32 = 1;

/// Yaw standard deviations above this (radians) are accepted but logged.
const YAW_STD_WARN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub name: String,
    pub polygon: Polygon2D,
    pub trajectory: GaussianTrajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub agents: Vec<Agent>,
}

impl Scenario {
    pub fn steps(&self) -> usize {
        self.agents.first().map_or(0, |a| a.trajectory.len())
    }

    /// Index pairs `(0, j)` for every other agent: agent 0 is the ego.
    pub fn ego_pairs(&self) -> Vec<(usize, usize)> {
        (1..self.agents.len()).map(|j| (0, j)).collect()
    }
}

/// On-disk representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub agents: Vec<AgentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub name: String,
    /// Body-frame vertices in metres.
    pub polygon: Vec<[f64; 2]>,
    pub trajectory: Vec<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    /// Seconds.
    pub t: f64,
    /// `[x (m), y (m), theta (rad)]`.
    pub mean: [f64; 3],
    /// Upper triangle, row-major: `xx, xy, xθ, yy, yθ, θθ`.
    pub cov: [f64; 6],
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            id: Some(s.id.clone()),
            agents: s
                .agents
                .iter()
                .map(|a| AgentRecord {
                    name: a.name.clone(),
                    polygon: a.polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
                    trajectory: a
                        .trajectory
                        .poses()
                        .iter()
                        .map(|p| StateRecord {
                            t: p.time,
                            mean: p.mean.to_array(),
                            cov: p.cov.upper(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

struct Diagnostics(Vec<FieldError>);

impl Diagnostics {
    fn push(&mut self, path: impl fmt::Display, message: impl Into<String>) {
        self.0.push(FieldError {
            path: path.to_string(),
            message: message.into(),
        });
    }
}

impl ScenarioFile {
    /// Validates every field and builds a [`Scenario`]. All problems are
    /// reported together.
    pub fn into_scenario(self, fallback_id: &str) -> Result<Scenario> {
        let mut diag = Diagnostics(Vec::new());
        if self.schema_version != SCHEMA_VERSION {
            diag.push(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            );
        }
        if self.agents.len() < 2 {
            diag.push("agents", format!("need at least 2 agents, got {}", self.agents.len()));
        }

        let reference_times: Vec<f64> = self
            .agents
            .first()
            .map(|a| a.trajectory.iter().map(|s| s.t).collect())
            .unwrap_or_default();

        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, rec) in self.agents.into_iter().enumerate() {
            let at = format!("agents[{i}]");
            if rec.name.trim().is_empty() {
                diag.push(format!("{at}.name"), "must not be empty");
            }
            let polygon = match Polygon2D::new(rec.polygon.iter().map(|&p| Vec2::from(p)).collect()) {
                Ok(p) => Some(p),
                Err(e) => {
                    diag.push(format!("{at}.polygon"), e.to_string());
                    None
                }
            };
            if rec.trajectory.is_empty() {
                diag.push(format!("{at}.trajectory"), "must contain at least one state");
            } else if rec.trajectory.len() != reference_times.len() {
                diag.push(
                    format!("{at}.trajectory"),
                    format!(
                        "has {} states but agents[0] has {}",
                        rec.trajectory.len(),
                        reference_times.len()
                    ),
                );
            }

            let mut poses = Vec::with_capacity(rec.trajectory.len());
            let mut prev_t = f64::NEG_INFINITY;
            for (k, s) in rec.trajectory.iter().enumerate() {
                let sat = format!("{at}.trajectory[{k}]");
                let mut ok = true;
                if !s.t.is_finite() {
                    diag.push(format!("{sat}.t"), "must be finite");
                    ok = false;
                } else if s.t <= prev_t {
                    diag.push(format!("{sat}.t"), format!("{} s does not follow {} s", s.t, prev_t));
                    ok = false;
                } else if let Some(&t0) = reference_times.get(k) {
                    if (s.t - t0).abs() > TIME_ALIGN_TOL {
                        diag.push(
                            format!("{sat}.t"),
                            format!("{} s is not aligned with agents[0] ({} s)", s.t, t0),
                        );
                        ok = false;
                    }
                }
                prev_t = s.t;
                if s.mean.iter().any(|v| !v.is_finite()) {
                    diag.push(format!("{sat}.mean"), "must be finite");
                    ok = false;
                }
                let cov = SymMat3::from_upper(s.cov);
                if !cov.is_finite() {
                    diag.push(format!("{sat}.cov"), "must be finite");
                    ok = false;
                } else if let Err(e) = sqrt_sym3(&cov) {
                    diag.push(format!("{sat}.cov"), e.to_string());
                    ok = false;
                } else if s.cov[5] > YAW_STD_WARN * YAW_STD_WARN {
                    log::warn!(
                        "{sat}: yaw standard deviation {:.3} rad is large; sampling along yaw is coarse",
                        s.cov[5].sqrt()
                    );
                }
                if ok {
                    poses.push(GaussianPose::new(s.t, Pose2D::from_array(s.mean), cov));
                }
            }

            if let (Some(polygon), true) = (polygon, poses.len() == rec.trajectory.len()) {
                match GaussianTrajectory::new(poses) {
                    Ok(trajectory) => agents.push(Agent {
                        name: rec.name,
                        polygon,
                        trajectory,
                    }),
                    Err(e) => diag.push(format!("{at}.trajectory"), e.to_string()),
                }
            }
        }

        if !diag.0.is_empty() {
            return Err(Error::Validation(diag.0));
        }
        Ok(Scenario {
            id: self.id.unwrap_or_else(|| fallback_id.to_string()),
            agents,
        })
    }
}

/// Parses and validates scenario JSON. `fallback_id` names the scenario if
/// the file carries no `id`.
pub fn parse_scenario(text: &str, fallback_id: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_scenario(fallback_id)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from(s)).expect("scenario serializes")
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let mut text = scenario_to_json(s);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Loads every `*.json` file in `dir`, sorted by file name.
pub fn load_scenario_dir(dir: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(load_scenario).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    /// Perpendicular paths through a shared crossing point.
    Crossing,
    /// Opposite directions with a small lateral offset.
    HeadOn,
    /// The other agent joins the ego lane at a shallow angle.
    Merging,
    /// The ego inches towards a lane while the other agent passes.
    Creeping,
    /// The other agent passes the ego in the adjacent lane.
    Overtake,
}

impl Template {
    pub const ALL: [Template; 5] = [
        Template::Crossing,
        Template::HeadOn,
        Template::Merging,
        Template::Creeping,
        Template::Overtake,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Template::Crossing => "crossing",
            Template::HeadOn => "head_on",
            Template::Merging => "merging",
            Template::Creeping => "creeping",
            Template::Overtake => "overtake",
        }
    }
}

impl std::str::FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Template::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown template '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub template: Template,
    pub k: usize,
    /// Seconds.
    pub dt: f64,
    /// Metres per second.
    pub base_speed: f64,
    /// Variance added per step along the direction of travel (m²). Lateral
    /// and yaw variances grow proportionally.
    pub noise_growth: f64,
    /// Correlation between lateral position and yaw in the body frame.
    pub pos_yaw_corr: f64,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            template: Template::Crossing,
            k: 60,
            dt: 0.1,
            base_speed: 8.0,
            noise_growth: 0.03,
            pos_yaw_corr: 0.6,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.base_speed >= 0.0 && self.base_speed.is_finite()) {
            return bad(format!("base_speed must be non-negative, got {}", self.base_speed));
        }
        if !(self.noise_growth >= 0.0 && self.noise_growth.is_finite()) {
            return bad(format!("noise_growth must be non-negative, got {}", self.noise_growth));
        }
        if !(-1.0..=1.0).contains(&self.pos_yaw_corr) {
            return bad(format!("pos_yaw_corr must lie in [-1, 1], got {}", self.pos_yaw_corr));
        }
        Ok(())
    }
}

// Body-frame standard deviations at step 0: longitudinal, lateral, yaw.
const BASE_STD: [f64; 3] = [0.3, 0.2, 0.03];
// Per-step variance growth relative to `noise_growth` along the same axes.
const GROWTH_SHAPE: [f64; 3] = [1.0, 0.4, 0.002];

fn body_cov(spec: &GeneratorSpec, k: usize, scale: f64) -> [f64; 3] {
    std::array::from_fn(|i| {
        (BASE_STD[i] * scale).powi(2) + k as f64 * spec.noise_growth * GROWTH_SHAPE[i] * scale
    })
}

/// World-frame covariance of an agent heading `heading` with body-frame
/// variances `v = [long, lat, yaw]`.
fn world_cov(v: [f64; 3], heading: f64, corr: f64) -> SymMat3 {
    let (s, c) = sin_cos_exact(heading);
    let lat_yaw = corr * (v[1] * v[2]).sqrt();
    let xx = c * c * v[0] + s * s * v[1];
    let yy = s * s * v[0] + c * c * v[1];
    let xy = c * s * (v[0] - v[1]);
    // The lateral axis in world coordinates is (-sin, cos).
    let x_yaw = -s * lat_yaw;
    let y_yaw = c * lat_yaw;
    SymMat3::from_upper([xx, xy, x_yaw, yy, y_yaw, v[2]])
}

/// `sin_cos` with rounding residue at multiples of `π/2` flushed to zero, so
/// axis-aligned paths stay exactly on their axis.
fn sin_cos_exact(a: f64) -> (f64, f64) {
    let (s, c) = a.sin_cos();
    let flush = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    (flush(s), flush(c))
}

/// A straight constant-velocity path passing `through` at step `at_step`.
struct Path1 {
    through: Vec2,
    heading: f64,
    speed: f64,
    at_step: f64,
}

impl Path1 {
    fn pose(&self, k: usize, dt: f64) -> Pose2D {
        let d = self.speed * (k as f64 - self.at_step) * dt;
        let (s, c) = sin_cos_exact(self.heading);
        Pose2D::new(self.through.x + d * c, self.through.y + d * s, self.heading)
    }
}

fn car() -> Polygon2D {
    Polygon2D::rectangle(4.6, 1.9).expect("valid rectangle")
}

/// Rigid truck with a wider cab: a non-convex footprint.
fn truck() -> Polygon2D {
    Polygon2D::new(
        [
            [-4.5, -1.1],
            [2.0, -1.1],
            [2.0, -1.25],
            [4.5, -1.25],
            [4.5, 1.25],
            [2.0, 1.25],
            [2.0, 1.1],
            [-4.5, 1.1],
        ]
        .into_iter()
        .map(Vec2::from)
        .collect(),
    )
    .expect("valid truck outline")
}

/// L-shaped articulated footprint (e.g. a van with a side ramp deployed).
fn l_shape() -> Polygon2D {
    Polygon2D::new(
        [
            [-2.5, -1.0],
            [2.5, -1.0],
            [2.5, 1.0],
            [0.5, 1.0],
            [0.5, 2.2],
            [-0.5, 2.2],
            [-0.5, 1.0],
            [-2.5, 1.0],
        ]
        .into_iter()
        .map(Vec2::from)
        .collect(),
    )
    .expect("valid L outline")
}

/// Deterministic scenario from a template. Agent 0 is the ego.
pub fn generate(spec: &GeneratorSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_0f5c_e4a2_1000);
    let v = spec.base_speed;
    let mid = (spec.k / 2) as f64;
    let other_speed = v * rng.random_range(0.8..1.2);

    let (ego, other) = match spec.template {
        Template::Crossing => (
            Path1 { through: Vec2::new(0.0, 0.0), heading: 0.0, speed: v, at_step: mid },
            Path1 {
                through: Vec2::new(0.0, rng.random_range(-3.0..3.0)),
                heading: std::f64::consts::FRAC_PI_2,
                speed: other_speed,
                at_step: mid,
            },
        ),
        Template::HeadOn => (
            Path1 { through: Vec2::new(0.0, 0.0), heading: 0.0, speed: v, at_step: mid },
            Path1 {
                through: Vec2::new(0.0, rng.random_range(-2.6..2.6)),
                heading: std::f64::consts::PI,
                speed: other_speed,
                at_step: mid,
            },
        ),
        Template::Merging => (
            Path1 { through: Vec2::new(0.0, 0.0), heading: 0.0, speed: v, at_step: mid },
            Path1 {
                through: Vec2::new(rng.random_range(-4.0..4.0), 0.0),
                heading: rng.random_range(0.15..0.35),
                speed: other_speed,
                at_step: mid,
            },
        ),
        Template::Creeping => (
            Path1 {
                through: Vec2::new(rng.random_range(-1.0..1.0), -2.2),
                heading: std::f64::consts::FRAC_PI_2,
                speed: 0.6,
                at_step: mid,
            },
            Path1 {
                through: Vec2::new(0.0, rng.random_range(-0.6..1.6)),
                heading: 0.0,
                speed: other_speed,
                at_step: mid,
            },
        ),
        Template::Overtake => (
            Path1 { through: Vec2::new(0.0, 0.0), heading: 0.0, speed: v, at_step: mid },
            Path1 {
                through: Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(1.9..3.4)),
                heading: 0.0,
                speed: v * rng.random_range(1.2..1.6),
                at_step: mid,
            },
        ),
    };

    let footprint = match rng.random_range(0..5u8) {
        0 => truck(),
        1 => l_shape(),
        _ => car(),
    };
    let other_scale = rng.random_range(0.8..1.3);

    let agent = |name: &str, path: &Path1, polygon: Polygon2D, scale: f64| -> Result<Agent> {
        let poses = (0..spec.k)
            .map(|k| {
                let mean = path.pose(k, spec.dt);
                let cov = world_cov(body_cov(spec, k, scale), path.heading, spec.pos_yaw_corr);
                GaussianPose::new(k as f64 * spec.dt, mean, cov)
            })
            .collect();
        Ok(Agent {
            name: name.to_string(),
            polygon,
            trajectory: GaussianTrajectory::new(poses)?,
        })
    };

    Ok(Scenario {
        id: format!("{}_{}", spec.template.as_str(), spec.seed),
        agents: vec![
            agent("ego", &ego, car(), 1.0)?,
            agent("other", &other, footprint, other_scale)?,
        ],
    })
}

/// `n` scenarios cycling through every template, with seeds
/// `base_seed, base_seed + 1, ...`.
pub fn generate_suite(n: usize, base: &GeneratorSpec) -> Result<Vec<Scenario>> {
    (0..n)
        .map(|i| {
            generate(&GeneratorSpec {
                template: Template::ALL[i % Template::ALL.len()],
                seed: base.seed.wrapping_add(i as u64),
                ..*base
            })
        })
        .collect()
}
