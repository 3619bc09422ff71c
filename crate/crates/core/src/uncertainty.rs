//! Gaussian pose trajectories and the relative-pose distribution.
//!
//! Relative poses at different times are tied together through their
//! standardized vector `z = sqrt(Σ)^-1 (x - μ)`: a single `z` picks one
//! realization of the whole relative trajectory, `x_k = sqrt(Σ_k) z + μ_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose2D;
use crate::linalg::{inv_sym3, sqrt_sym3, SymMat3};

/// Time stamps of two trajectories must agree to within this many seconds.
pub const TIME_ALIGN_TOL: f64 = 1e-6;

const STANDARDIZE_MIN_EIG: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPose {
    pub mean: Pose2D,
    pub cov: SymMat3,
    /// Seconds.
    pub time: f64,
}

impl GaussianPose {
    pub fn new(time: f64, mean: Pose2D, cov: SymMat3) -> Self {
        Self { mean, cov, time }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTrajectory {
    poses: Vec<GaussianPose>,
}

impl GaussianTrajectory {
    /// Requires at least one pose, strictly increasing times and PSD
    /// covariances.
    pub fn new(poses: Vec<GaussianPose>) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        for (k, w) in poses.windows(2).enumerate() {
            if w[1].time.partial_cmp(&w[0].time) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidParams(format!(
                    "times must be strictly increasing (step {} at {} s after {} s)",
                    k + 1,
                    w[1].time,
                    w[0].time
                )));
            }
        }
        for p in &poses {
            sqrt_sym3(&p.cov)?;
        }
        Ok(Self { poses })
    }

    pub fn poses(&self) -> &[GaussianPose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }
}

/// Distribution of the relative pose `x1 - x2` at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGaussian {
    pub mean: Pose2D,
    pub cov: SymMat3,
    pub sqrt_cov: SymMat3,
    /// Mean pose of agent 2, used to anchor the footprints in the world.
    pub anchor2: Pose2D,
    pub time: f64,
}

impl RelativeGaussian {
    pub fn new(mean: Pose2D, cov: SymMat3, anchor2: Pose2D, time: f64) -> Result<Self> {
        let sqrt_cov = sqrt_sym3(&cov)?;
        Ok(Self {
            mean,
            cov,
            sqrt_cov,
            anchor2,
            time,
        })
    }

    /// `sqrt(Σ) z + μ`.
    #[inline]
    pub fn realize(&self, z: &[f64; 3]) -> Pose2D {
        let d = self.sqrt_cov.mul_vec(z);
        Pose2D::new(d[0] + self.mean.x, d[1] + self.mean.y, d[2] + self.mean.theta)
    }

    /// Inverse of [`realize`](Self::realize).
    pub fn standardize(&self, x: Pose2D) -> Result<[f64; 3]> {
        if self.cov.min_eigenvalue() <= STANDARDIZE_MIN_EIG {
            return Err(Error::SingularCovariance);
        }
        let inv = inv_sym3(&self.sqrt_cov).map_err(|_| Error::SingularCovariance)?;
        Ok(inv.mul_vec(&x.minus(self.mean).to_array()))
    }
}

pub fn realize(rel: &RelativeGaussian, z: &[f64; 3]) -> Pose2D {
    rel.realize(z)
}

pub fn standardize(rel: &RelativeGaussian, x: Pose2D) -> Result<[f64; 3]> {
    rel.standardize(x)
}

/// Per-step relative distribution of agent `a` with respect to agent `b`.
pub fn relative_distribution(
    a: &GaussianTrajectory,
    b: &GaussianTrajectory,
) -> Result<Vec<RelativeGaussian>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    a.poses()
        .iter()
        .zip(b.poses())
        .enumerate()
        .map(|(step, (pa, pb))| {
            if (pa.time - pb.time).abs() > TIME_ALIGN_TOL {
                return Err(Error::TimeMismatch {
                    step,
                    left: pa.time,
                    right: pb.time,
                });
            }
            RelativeGaussian::new(pa.mean.minus(pb.mean), pa.cov + pb.cov, pb.mean, pa.time)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_spd(rng: &mut impl Rng) -> SymMat3 {
        let g: [f64; 9] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = (0..3).map(|k| g[i * 3 + k] * g[j * 3 + k]).sum::<f64>()
                    + if i == j { 0.1 } else { 0.0 };
            }
        }
        SymMat3::from_rows(r)
    }

    fn traj(rng: &mut impl Rng, steps: usize) -> GaussianTrajectory {
        let poses = (0..steps)
            .map(|k| {
                let mean = Pose2D::new(
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-3.0..3.0),
                );
                GaussianPose::new(0.1 * k as f64, mean, random_spd(rng))
            })
            .collect();
        GaussianTrajectory::new(poses).unwrap()
    }

    fn rel_with(cov: SymMat3, mean: Pose2D) -> RelativeGaussian {
        RelativeGaussian::new(mean, cov, Pose2D::default(), 0.0).unwrap()
    }

    #[test]
    fn identical_trajectories() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = traj(&mut rng, 4);
        let rels = relative_distribution(&t, &t).unwrap();
        for (r, p) in rels.iter().zip(t.poses()) {
            assert_eq!(r.mean, Pose2D::default());
            assert_eq!(r.cov, p.cov.scale(2.0));
        }
    }

    #[test]
    fn deterministic_second_agent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = traj(&mut rng, 3);
        let b = GaussianTrajectory::new(
            a.poses()
                .iter()
                .map(|p| GaussianPose::new(p.time, Pose2D::new(1.0, 2.0, 0.0), SymMat3::zeros()))
                .collect(),
        )
        .unwrap();
        let rels = relative_distribution(&a, &b).unwrap();
        for (r, p) in rels.iter().zip(a.poses()) {
            assert_eq!(r.cov, p.cov);
            assert_eq!(r.anchor2, Pose2D::new(1.0, 2.0, 0.0));
        }
    }

    #[test]
    fn covariances_add_entrywise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = (traj(&mut rng, 3), traj(&mut rng, 3));
        let rels = relative_distribution(&a, &b).unwrap();
        for ((r, pa), pb) in rels.iter().zip(a.poses()).zip(b.poses()) {
            let (ua, ub, ur) = (pa.cov.upper(), pb.cov.upper(), r.cov.upper());
            for i in 0..6 {
                assert_eq!(ur[i], ua[i] + ub[i]);
            }
            let m = pa.mean.minus(pb.mean);
            assert_eq!(r.mean, m);
        }
    }

    #[test]
    fn mismatched_trajectories() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, b) = (traj(&mut rng, 3), traj(&mut rng, 2));
        assert!(matches!(
            relative_distribution(&a, &b),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        ));
        let shifted = GaussianTrajectory::new(
            a.poses()
                .iter()
                .map(|p| GaussianPose { time: p.time + 1e-3, ..*p })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            relative_distribution(&a, &shifted),
            Err(Error::TimeMismatch { step: 0, .. })
        ));
    }

    #[test]
    fn trajectory_validation() {
        assert!(matches!(GaussianTrajectory::new(vec![]), Err(Error::EmptyTrajectory)));
        let p = GaussianPose::new(0.0, Pose2D::default(), SymMat3::identity());
        assert!(GaussianTrajectory::new(vec![p, p]).is_err());
        let bad = GaussianPose::new(0.0, Pose2D::default(), SymMat3::diag(1.0, -1.0, 1.0));
        assert!(matches!(GaussianTrajectory::new(vec![bad]), Err(Error::NonPsd { .. })));
    }

    #[test]
    fn realize_examples() {
        let mu = Pose2D::new(3.0, -1.0, 0.2);
        let r = rel_with(SymMat3::identity(), mu);
        assert_eq!(r.realize(&[0.0; 3]), mu);

        let r = rel_with(SymMat3::identity(), Pose2D::default());
        assert_eq!(r.realize(&[1.0, 2.0, 0.5]), Pose2D::new(1.0, 2.0, 0.5));

        let r = rel_with(SymMat3::diag(4.0, 1.0, 0.01), Pose2D::new(10.0, 0.0, 0.0));
        assert_eq!(r.realize(&[1.0, 0.0, 0.0]), Pose2D::new(12.0, 0.0, 0.0));

        // Singular covariance is fine for realize.
        let r = rel_with(SymMat3::zeros(), mu);
        assert_eq!(r.realize(&[5.0, -5.0, 1.0]), mu);
    }

    #[test]
    fn standardize_examples() {
        let mu = Pose2D::new(1.0, 2.0, 3.0);
        let r = rel_with(SymMat3::identity(), mu);
        assert_eq!(r.standardize(mu).unwrap(), [0.0; 3]);
        assert_eq!(r.standardize(Pose2D::new(2.0, 0.0, 3.5)).unwrap(), [1.0, -2.0, 0.5]);
        let r = rel_with(SymMat3::diag(1.0, 1.0, 0.0), mu);
        assert!(matches!(r.standardize(mu), Err(Error::SingularCovariance)));
    }

    #[test]
    fn association_is_consistent_across_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, b) = (traj(&mut rng, 6), traj(&mut rng, 6));
        let rels = relative_distribution(&a, &b).unwrap();
        for _ in 0..200 {
            let z: [f64; 3] = std::array::from_fn(|_| rng.random_range(-4.0..4.0));
            for r in &rels {
                let back = r.standardize(r.realize(&z)).unwrap();
                for i in 0..3 {
                    assert!((back[i] - z[i]).abs() < 1e-8, "{back:?} vs {z:?}");
                }
            }
        }
    }

    #[test]
    fn realized_samples_have_target_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cov = random_spd(&mut rng);
        let mu = Pose2D::new(2.0, -3.0, 0.5);
        let r = rel_with(cov, mu);
        let n = 100_000;
        let mut sum = [0.0; 3];
        let mut outer = [[0.0; 3]; 3];
        let samples: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                let z: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                r.realize(&z).to_array()
            })
            .collect();
        for s in &samples {
            for i in 0..3 {
                sum[i] += s[i];
            }
        }
        let mean = sum.map(|v| v / n as f64);
        for s in &samples {
            for i in 0..3 {
                for j in 0..3 {
                    outer[i][j] += (s[i] - mean[i]) * (s[j] - mean[j]);
                }
            }
        }
        let mu = mu.to_array();
        for i in 0..3 {
            let sd = cov.get(i, i).sqrt();
            assert!((mean[i] - mu[i]).abs() <= 4.0 * sd / (n as f64).sqrt());
        }
        let mut diff = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                diff[i][j] = outer[i][j] / (n as f64 - 1.0) - cov.get(i, j);
            }
        }
        let rel_err = SymMat3::from_rows(diff).frobenius_norm() / cov.frobenius_norm();
        assert!(rel_err < 0.05, "relative covariance error {rel_err}");
    }
}
