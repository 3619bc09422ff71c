//! Trajectory collision probability.
//!
//! A weighted set of standardized samples is swept forward in time. At each
//! step every live sample is mapped to a relative pose with
//! `sqrt(Σ_k) z + μ_k`; samples whose footprints collide are removed for good.
//! The surviving mass after step `k` is the probability that the trajectory
//! is collision-free up to and including `k`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{collision_indicator, place_into, polygons_intersect, Polygon2D, Pose2D, Vec2};
use crate::linalg::eig_sym2;
use crate::scenario::Agent;
use crate::sigma::{
    gauss_hermite_set, monte_carlo_set, needs_upsample, unscented_set, AdaptiveSigmaPoints, Axis,
    SchemeTag, SpacingRule, WeightedSample, WeightedSampleSet,
};
use crate::uncertainty::{relative_distribution, RelativeGaussian};

/// Live sets at least this large are checked on the rayon pool when the
/// checker runs with [`Execution::Parallel`].
const PARALLEL_MIN_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Adaptive,
    Unscented { kappa: f64 },
    GaussHermite { degree: usize },
    MonteCarlo { n: usize, seed: u64 },
}

impl Scheme {
    pub fn tag(&self) -> SchemeTag {
        match self {
            Scheme::Adaptive => SchemeTag::Adaptive,
            Scheme::Unscented { .. } => SchemeTag::Unscented,
            Scheme::GaussHermite { .. } => SchemeTag::GaussHermite,
            Scheme::MonteCarlo { .. } => SchemeTag::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckerConfig {
    /// Half-width of the sigma-point coverage interval, in standard deviations.
    pub sigma_max: f64,
    /// Smallest weight a 1D sigma point may carry.
    pub w_min: f64,
    /// Largest allowed mean spacing between sigma points, in metres.
    pub d_max: f64,
    pub p_max: u32,
    pub scheme: Scheme,
    pub prefilters_enabled: bool,
    /// Compare the raw axis variance against `d_max` instead of the spacing.
    pub literal_spacing_rule: bool,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        Self {
            sigma_max: 3.8,
            w_min: 0.01,
            d_max: 1.625,
            p_max: 4,
            scheme: Scheme::Adaptive,
            prefilters_enabled: true,
            literal_spacing_rule: false,
        }
    }
}

impl CheckerConfig {
    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn spacing_rule(&self) -> SpacingRule {
        if self.literal_spacing_rule {
            SpacingRule::Literal
        } else {
            SpacingRule::Physical
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.sigma_max > 0.0 && self.sigma_max.is_finite()) {
            return bad(format!("sigma_max must be positive, got {}", self.sigma_max));
        }
        if !(0.0..1.0).contains(&self.w_min) {
            return bad(format!("w_min must lie in [0, 1), got {}", self.w_min));
        }
        if self.d_max.is_nan() || self.d_max <= 0.0 {
            return bad(format!("d_max must be positive, got {}", self.d_max));
        }
        if self.p_max > crate::sigma::tree::MAX_ORDER {
            return bad(format!("p_max must be at most 16, got {}", self.p_max));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionResult {
    pub p_collision_final: f64,
    /// Cumulative collision probability after each step.
    pub p_collision_curve: Vec<f64>,
    /// Sample-step pairs that reached the per-sample checks.
    pub samples_evaluated: u64,
    /// Steps skipped whole by the ellipse test.
    pub prefilter_skips: u64,
    /// Sample-step pairs cleared by the bounding-radius test.
    pub radius_skips: u64,
    /// Polygon intersection tests performed.
    pub polygon_checks: u64,
    /// Adaptive orders `(p_x, p_y)` reached by the end of the sweep.
    pub final_orders: Option<(u32, u32)>,
    #[serde(with = "secs")]
    pub elapsed: Duration,
}

mod secs {
    use std::time::Duration;

    pub fn serialize<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }
}

/// True when the whole step can be skipped: no sample with `|z| <= z_bound`
/// can bring the two bounding discs (radii `r1`, `r2`) into contact.
///
/// The `z_bound` ellipse of the position block is inflated by `r1 + r2`.
/// The inflated ellipse `V (z_bound sqrt(Λ) + (r1 + r2) I) V^T` is tested first;
/// a mean inside it is never skipped. Outside it, the exact distance from
/// the mean to the `z_bound` ellipse is compared against `r1 + r2`, because
/// for anisotropic covariances the inflated ellipse is smaller than the true
/// set of reachable positions.
pub fn ellipse_prefilter(rel: &RelativeGaussian, r1: f64, r2: f64, z_bound: f64) -> bool {
    let reach = r1 + r2;
    let eig = eig_sym2(&rel.cov.position_block());
    let p = rel.mean.position();
    let axes = eig.values.map(|l| z_bound * l.max(0.0).sqrt());
    let q = [0, 1].map(|i| {
        let v = eig.vector(i);
        (v[0] * p.x + v[1] * p.y).abs()
    });

    let scaled = |qi: f64, d: f64| {
        if qi == 0.0 {
            0.0
        } else if d > 0.0 {
            (qi / d).powi(2)
        } else {
            f64::INFINITY
        }
    };
    let inflated = scaled(q[0], axes[0] + reach) + scaled(q[1], axes[1] + reach);
    if inflated <= 1.0 {
        return false;
    }
    let dist = distance_outside_ellipse(axes[0], axes[1], q[0], q[1]);
    dist > reach * (1.0 + 1e-12) + 1e-12
}

/// Distance from `(y0, y1)` (both non-negative) to the axis-aligned ellipse
/// with semi-axes `e0 >= e1 >= 0`; zero if the point is inside.
fn distance_outside_ellipse(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if e0 == 0.0 {
        return y0.hypot(y1);
    }
    if e1 == 0.0 {
        return (y0 - e0).max(0.0).hypot(y1);
    }
    let (z0, z1) = (y0 / e0, y1 / e1);
    let g = z0 * z0 + z1 * z1 - 1.0;
    if g <= 0.0 {
        return 0.0;
    }
    if y1 > 0.0 {
        if y0 > 0.0 {
            // Closest point via bisection on the Lagrange parameter.
            let r0 = (e0 / e1).powi(2);
            let n0 = r0 * z0;
            let (mut s0, mut s1) = (z1 - 1.0, n0.hypot(z1) - 1.0);
            let mut s = 0.0;
            for _ in 0..2200 {
                s = 0.5 * (s0 + s1);
                if s == s0 || s == s1 {
                    break;
                }
                let g = (n0 / (s + r0)).powi(2) + (z1 / (s + 1.0)).powi(2) - 1.0;
                if g > 0.0 {
                    s0 = s;
                } else if g < 0.0 {
                    s1 = s;
                } else {
                    break;
                }
            }
            let x0 = r0 * y0 / (s + r0);
            let x1 = y1 / (s + 1.0);
            (x0 - y0).hypot(x1 - y1)
        } else {
            y1 - e1
        }
    } else {
        let numer = e0 * y0;
        let denom = e0 * e0 - e1 * e1;
        if numer < denom {
            let xde0 = numer / denom;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            y0 - e0
        }
    }
}

/// True when the sample's bounding discs cannot touch.
#[inline]
pub fn radius_prefilter(sample_pose: Pose2D, r1: f64, r2: f64) -> bool {
    sample_pose.x.hypot(sample_pose.y) > r1 + r2
}

#[derive(Debug, Clone)]
enum SampleSource {
    Adaptive(AdaptiveSigmaPoints),
    Fixed { set: WeightedSampleSet, z_bound: f64 },
}

/// A checker with its sample sets precomputed, reusable across calls.
#[derive(Debug, Clone)]
pub struct Checker {
    cfg: CheckerConfig,
    source: SampleSource,
    execution: Execution,
    initial_orders: (u32, u32),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    RadiusClear,
    PolygonClear,
    Hit,
}

impl Checker {
    pub fn new(cfg: CheckerConfig) -> Result<Self> {
        cfg.validate()?;
        let source = match cfg.scheme {
            Scheme::Adaptive => {
                SampleSource::Adaptive(AdaptiveSigmaPoints::build(cfg.sigma_max, cfg.w_min, cfg.p_max)?)
            }
            other => {
                let set = match other {
                    Scheme::Unscented { kappa } => unscented_set(kappa)?,
                    Scheme::GaussHermite { degree } => gauss_hermite_set(degree)?,
                    Scheme::MonteCarlo { n, seed } => monte_carlo_set(n, seed)?,
                    Scheme::Adaptive => unreachable!(),
                };
                if set.entries().iter().any(|e| e.weight < 0.0) {
                    return Err(Error::InvalidParams(
                        "sample sets with negative weights are not supported by the checker".into(),
                    ));
                }
                let z_bound = set.max_radius();
                SampleSource::Fixed { set, z_bound }
            }
        };
        Ok(Self {
            cfg,
            source,
            execution: Execution::Sequential,
            initial_orders: (0, 0),
        })
    }

    /// Large live sets are checked with `execution`; small ones always run
    /// inline.
    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Starts the adaptive set at the given orders instead of `(0, 0)`.
    /// `(p_max, p_max)` gives the dense, non-adaptive variant.
    pub fn with_initial_orders(mut self, p_x: u32, p_y: u32) -> Self {
        self.initial_orders = (p_x.min(self.cfg.p_max), p_y.min(self.cfg.p_max));
        self
    }

    pub fn config(&self) -> &CheckerConfig {
        &self.cfg
    }

    pub fn check_agents(&self, a: &Agent, b: &Agent) -> Result<CollisionResult> {
        let rels = relative_distribution(&a.trajectory, &b.trajectory)?;
        self.check(&a.polygon, &b.polygon, &rels)
    }

    pub fn check(
        &self,
        poly1: &Polygon2D,
        poly2: &Polygon2D,
        rels: &[RelativeGaussian],
    ) -> Result<CollisionResult> {
        if rels.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        let start = Instant::now();
        let cfg = &self.cfg;
        let (r1, r2) = (poly1.bounding_radius(), poly2.bounding_radius());
        let rule = cfg.spacing_rule();

        let (mut live, tail_mass, z_bound, adaptive) = match &self.source {
            SampleSource::Adaptive(pts) => (pts.cut(0, 0), pts.tail_mass(), pts.z_bound(), Some(pts)),
            SampleSource::Fixed { set, z_bound } => (set.clone(), 0.0, *z_bound, None),
        };
        let mut tail_alive = tail_mass > 0.0;
        let mut removed = 0.0;
        let mut target = self.initial_orders;

        let mut curve = Vec::with_capacity(rels.len());
        let mut stats = Stats::default();
        let mut placed2 = Vec::new();
        let mut placed1 = Vec::new();
        let mut verdicts = Vec::new();

        for rel in rels {
            if let Some(pts) = adaptive {
                let p_max = pts.p_max();
                while needs_upsample(&rel.cov, Axis::X, target.0, cfg.d_max, cfg.sigma_max, p_max, rule) {
                    target.0 += 1;
                }
                while needs_upsample(&rel.cov, Axis::Y, target.1, cfg.d_max, cfg.sigma_max, p_max, rule) {
                    target.1 += 1;
                }
            }

            if cfg.prefilters_enabled && ellipse_prefilter(rel, r1, r2, z_bound) {
                stats.prefilter_skips += 1;
                curve.push(curve.last().copied().unwrap_or(0.0));
                continue;
            }

            if let Some(pts) = adaptive {
                live = refine(pts, live, target)?;
            }

            place_into(poly2, rel.anchor2, &mut placed2);
            let entries = live.entries();
            verdicts.clear();
            verdicts.resize(entries.len(), Verdict::Hit);
            let prefilter = cfg.prefilters_enabled;
            if self.execution.is_parallel() && entries.len() >= PARALLEL_MIN_SAMPLES {
                let n = poly1.vertices().len();
                self.execution.map_into_with(
                    entries,
                    &mut verdicts,
                    || Vec::with_capacity(n),
                    |buf, e| judge(e, rel, poly1, &placed2, r1, r2, prefilter, buf),
                );
            } else {
                for (v, e) in verdicts.iter_mut().zip(entries) {
                    *v = judge(e, rel, poly1, &placed2, r1, r2, prefilter, &mut placed1);
                }
            }

            stats.samples_evaluated += entries.len() as u64;
            let mut keep = verdicts.iter();
            let mut dropped = 0.0;
            for v in &verdicts {
                match v {
                    Verdict::RadiusClear => stats.radius_skips += 1,
                    Verdict::PolygonClear => stats.polygon_checks += 1,
                    Verdict::Hit => stats.polygon_checks += 1,
                }
            }
            live.entries_mut().retain(|e| {
                let hit = *keep.next().expect("one verdict per entry") == Verdict::Hit;
                if hit {
                    dropped += e.weight;
                }
                !hit
            });
            removed += dropped;

            // With a zero covariance every realization, including the tail,
            // sits at the mean.
            if tail_alive
                && rel.sqrt_cov.is_zero()
                && !collision_indicator(poly1, poly2, rel.mean, rel.anchor2)
            {
                tail_alive = false;
                removed += tail_mass;
            }

            let free = if live.is_empty() && !tail_alive {
                0.0
            } else {
                (1.0 - removed).clamp(0.0, 1.0)
            };
            curve.push(1.0 - free);
        }

        let p_final = *curve.last().expect("at least one step");
        Ok(CollisionResult {
            p_collision_final: p_final,
            p_collision_curve: curve,
            samples_evaluated: stats.samples_evaluated,
            prefilter_skips: stats.prefilter_skips,
            radius_skips: stats.radius_skips,
            polygon_checks: stats.polygon_checks,
            final_orders: live.orders(),
            elapsed: start.elapsed(),
        })
    }
}

#[derive(Default)]
struct Stats {
    samples_evaluated: u64,
    prefilter_skips: u64,
    radius_skips: u64,
    polygon_checks: u64,
}

fn refine(
    pts: &AdaptiveSigmaPoints,
    mut live: WeightedSampleSet,
    target: (u32, u32),
) -> Result<WeightedSampleSet> {
    let (mut px, mut py) = live.orders().expect("adaptive set");
    while px < target.0 || py < target.1 {
        let axis = if px < target.0 { Axis::X } else { Axis::Y };
        let all: Vec<usize> = (0..live.len()).collect();
        live = pts.split(&live, axis, &all)?;
        (px, py) = live.orders().expect("adaptive set");
    }
    Ok(live)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn judge(
    e: &WeightedSample,
    rel: &RelativeGaussian,
    poly1: &Polygon2D,
    placed2: &[Vec2],
    r1: f64,
    r2: f64,
    prefilter: bool,
    buf: &mut Vec<Vec2>,
) -> Verdict {
    let pose = rel.realize(&e.z);
    if prefilter && radius_prefilter(pose, r1, r2) {
        return Verdict::RadiusClear;
    }
    place_into(poly1, rel.anchor2.compose_offset(pose), buf);
    if polygons_intersect(buf, placed2) {
        Verdict::Hit
    } else {
        Verdict::PolygonClear
    }
}

/// One-shot convenience wrapper around [`Checker`].
pub fn check_trajectory(
    poly1: &Polygon2D,
    poly2: &Polygon2D,
    rels: &[RelativeGaussian],
    cfg: &CheckerConfig,
) -> Result<CollisionResult> {
    Checker::new(*cfg)?.check(poly1, poly2, rels)
}

/// Independent checks of `ego` against each of `others`, in order.
pub fn check_all_pairs(
    ego: &Agent,
    others: &[Agent],
    cfg: &CheckerConfig,
) -> Result<Vec<Result<CollisionResult>>> {
    let checker = Checker::new(*cfg)?;
    Ok(others.iter().map(|o| checker.check_agents(ego, o)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMat3;

    fn rel(mean: Pose2D, cov: SymMat3) -> RelativeGaussian {
        RelativeGaussian::new(mean, cov, Pose2D::default(), 0.0).unwrap()
    }

    fn iso(var: f64) -> SymMat3 {
        SymMat3::diag(var, var, 0.0)
    }

    #[test]
    fn ellipse_examples() {
        let r = rel(Pose2D::default(), iso(1.0));
        assert!(!ellipse_prefilter(&r, 1.0, 1.0, 3.8));
        let r = rel(Pose2D::new(10.0, 0.0, 0.0), iso(1.0));
        assert!(ellipse_prefilter(&r, 1.0, 1.0, 3.8));
        let r = rel(Pose2D::new(3.0, 4.0, 0.0), iso(1.0));
        assert!(!ellipse_prefilter(&r, 1.0, 1.0, 3.8));
        // Zero covariance reduces to the radius test on the mean.
        let r = rel(Pose2D::new(2.5, 0.0, 0.0), SymMat3::zeros());
        assert!(ellipse_prefilter(&r, 1.0, 1.0, 3.8));
        let r = rel(Pose2D::new(2.0, 0.0, 0.0), SymMat3::zeros());
        assert!(!ellipse_prefilter(&r, 1.0, 1.0, 3.8));
    }

    #[test]
    fn ellipse_is_not_fooled_by_anisotropy() {
        // Long thin ellipse (semi-axes 10 and ~0) and reach 1: the point
        // (10, 0.9) is 0.9 from the ellipse tip region, so it must not be
        // skipped even though it lies outside the inflated ellipse with
        // axes 11 and 1.
        let r = rel(Pose2D::new(10.0, 0.9, 0.0), SymMat3::diag(100.0 / 3.8f64.powi(2), 1e-12, 0.0));
        assert!(!ellipse_prefilter(&r, 0.5, 0.5, 3.8));
        let r = rel(Pose2D::new(10.0, 1.2, 0.0), SymMat3::diag(100.0 / 3.8f64.powi(2), 1e-12, 0.0));
        assert!(ellipse_prefilter(&r, 0.5, 0.5, 3.8));
    }

    #[test]
    fn ellipse_distance_matches_brute_force() {
        let (e0, e1) = (3.0, 1.2);
        for &(y0, y1) in &[(4.0, 0.5), (0.2, 3.0), (3.5, 0.0), (0.0, 2.0), (5.0, 5.0), (2.9, 0.8)] {
            let brute = (0..200_000)
                .map(|i| {
                    let t = i as f64 / 200_000.0 * std::f64::consts::TAU;
                    (e0 * t.cos() - y0).hypot(e1 * t.sin() - y1)
                })
                .fold(f64::INFINITY, f64::min);
            let inside = (y0 / e0).powi(2) + (y1 / e1).powi(2) <= 1.0;
            let want = if inside { 0.0 } else { brute };
            let got = distance_outside_ellipse(e0, e1, y0, y1);
            assert!((got - want).abs() < 1e-6, "({y0},{y1}): {got} vs {want}");
        }
    }

    #[test]
    fn radius_examples() {
        assert!(!radius_prefilter(Pose2D::default(), 1.0, 1.0));
        assert!(radius_prefilter(Pose2D::new(10.0, 0.0, 0.3), 1.5, 1.5));
        assert!(!radius_prefilter(Pose2D::new(3.0, 4.0, 0.0), 2.5, 2.5));
    }

    #[test]
    fn config_validation() {
        assert!(CheckerConfig::default().validate().is_ok());
        let bad = [
            CheckerConfig { sigma_max: 0.0, ..Default::default() },
            CheckerConfig { w_min: 1.0, ..Default::default() },
            CheckerConfig { d_max: 0.0, ..Default::default() },
            CheckerConfig { p_max: 17, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(Checker::new(c), Err(Error::InvalidParams(_))));
        }
        let neg = CheckerConfig::default().with_scheme(Scheme::Unscented { kappa: -1.0 });
        assert!(Checker::new(neg).is_err());
    }

    #[test]
    fn empty_trajectory() {
        let sq = Polygon2D::rectangle(1.0, 1.0).unwrap();
        let err = check_trajectory(&sq, &sq, &[], &CheckerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyTrajectory));
    }

    #[test]
    fn far_apart_is_zero_and_fully_skipped() {
        let sq = Polygon2D::rectangle(1.0, 1.0).unwrap();
        let rels: Vec<_> = (0..20)
            .map(|k| rel(Pose2D::new(100.0, 0.0, 0.0), SymMat3::diag(0.1 + 0.01 * k as f64, 0.1, 0.01)))
            .collect();
        for scheme in [
            Scheme::Adaptive,
            Scheme::Unscented { kappa: 1.0 },
            Scheme::GaussHermite { degree: 8 },
            Scheme::MonteCarlo { n: 1000, seed: 1 },
        ] {
            let cfg = CheckerConfig::default().with_scheme(scheme);
            let r = check_trajectory(&sq, &sq, &rels, &cfg).unwrap();
            assert_eq!(r.p_collision_final, 0.0);
            assert_eq!(r.prefilter_skips, 20);
            assert_eq!(r.samples_evaluated, 0);
        }
    }

    #[test]
    fn coincident_tiny_covariance_is_near_certain() {
        let sq = Polygon2D::rectangle(1.0, 1.0).unwrap();
        let rels = vec![rel(Pose2D::default(), SymMat3::identity().scale(1e-8)); 5];
        let r = check_trajectory(&sq, &sq, &rels, &CheckerConfig::default()).unwrap();
        // Only the joint tail beyond ±3.8σ survives.
        let tail = AdaptiveSigmaPoints::build(3.8, 0.01, 4).unwrap().tail_mass();
        assert!((1.0 - r.p_collision_final - tail).abs() < 1e-15);
        assert!(tail < 3e-4);
    }

    #[test]
    fn zero_covariance_overlap_is_exactly_one() {
        let sq = Polygon2D::rectangle(1.0, 1.0).unwrap();
        let rels = vec![
            rel(Pose2D::new(5.0, 0.0, 0.0), SymMat3::zeros()),
            rel(Pose2D::new(0.5, 0.0, 0.0), SymMat3::zeros()),
        ];
        let r = check_trajectory(&sq, &sq, &rels, &CheckerConfig::default()).unwrap();
        assert_eq!(r.p_collision_curve, vec![0.0, 1.0]);
    }

    #[test]
    fn upsampling_reaches_expected_orders() {
        let sq = Polygon2D::rectangle(1.0, 1.0).unwrap();
        // σx = 1 m needs order 3 on x; σy = 0.1 m stays at order 0.
        let rels = vec![rel(Pose2D::new(0.5, 0.0, 0.0), SymMat3::diag(1.0, 0.01, 0.0))];
        let r = check_trajectory(&sq, &sq, &rels, &CheckerConfig::default()).unwrap();
        assert_eq!(r.final_orders, Some((3, 0)));
    }

    #[test]
    fn parallel_inner_loop_is_identical() {
        let sq = Polygon2D::rectangle(2.0, 1.0).unwrap();
        let rels: Vec<_> = (0..10)
            .map(|k| rel(Pose2D::new(3.0 - 0.3 * k as f64, 0.2, 0.1), SymMat3::diag(0.5, 0.3, 0.02)))
            .collect();
        let cfg = CheckerConfig::default().with_scheme(Scheme::MonteCarlo { n: 20_000, seed: 3 });
        let seq = Checker::new(cfg).unwrap().check(&sq, &sq, &rels).unwrap();
        let par = Checker::new(cfg)
            .unwrap()
            .with_execution(Execution::Parallel)
            .check(&sq, &sq, &rels)
            .unwrap();
        assert_eq!(seq.p_collision_curve, par.p_collision_curve);
        assert_eq!(seq.polygon_checks, par.polygon_checks);
    }
}
