//! Non-adaptive sample sets: Monte Carlo, Unscented and tensor-product
//! Gauss-Hermite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigen;

use super::{SchemeTag, WeightedSample, WeightedSampleSet};

const DIM: usize = 3;

/// `n` draws of `z ~ N(0, I3)` with uniform weights. Deterministic in `seed`.
pub fn monte_carlo_set(n: usize, seed: u64) -> Result<WeightedSampleSet> {
    if n == 0 {
        return Err(Error::InvalidParams("Monte Carlo needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 1.0 / n as f64;
    let entries = (0..n)
        .map(|_| {
            let z: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            WeightedSample::new(w, z)
        })
        .collect();
    Ok(WeightedSampleSet::new(entries, SchemeTag::MonteCarlo))
}

/// The `2·3 + 1` point symmetric Unscented set with spread parameter `kappa`.
pub fn unscented_set(kappa: f64) -> Result<WeightedSampleSet> {
    if !kappa.is_finite() || kappa <= -(DIM as f64) {
        return Err(Error::InvalidParams(format!("kappa must exceed -3, got {kappa}")));
    }
    let lambda = DIM as f64 + kappa;
    let spread = lambda.sqrt();
    let side = 1.0 / (2.0 * lambda);
    let mut entries = Vec::with_capacity(2 * DIM + 1);
    entries.push(WeightedSample::new(kappa / lambda, [0.0; 3]));
    for axis in 0..DIM {
        for sign in [1.0, -1.0] {
            let mut z = [0.0; 3];
            z[axis] = sign * spread;
            entries.push(WeightedSample::new(side, z));
        }
    }
    Ok(WeightedSampleSet::new(entries, SchemeTag::Unscented))
}

/// Nodes and weights of the `degree`-point Gauss-Hermite rule for the
/// standard normal density (probabilists' Hermite polynomials), computed
/// with Golub-Welsch. Nodes are ascending and weights sum to one.
pub fn gauss_hermite_1d(degree: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=10).contains(&degree) {
        return Err(Error::InvalidParams(format!(
            "Gauss-Hermite degree must be in 1..=10, got {degree}"
        )));
    }
    let n = degree;
    // Jacobi matrix of the recurrence He_{k+1} = x He_k - k He_{k-1}.
    let mut a = vec![0.0; n * n];
    for k in 1..n {
        let b = (k as f64).sqrt();
        a[(k - 1) * n + k] = b;
        a[k * n + k - 1] = b;
    }
    let mut v = vec![0.0; n * n];
    jacobi_eigen(&mut a, n, &mut v);
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (a[i * n + i], v[i] * v[i])).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // The rule is symmetric about zero; remove the solver's rounding asymmetry.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let j = n - 1 - i;
        nodes[i] = 0.5 * (pairs[i].0 - pairs[j].0);
        weights[i] = 0.5 * (pairs[i].1 + pairs[j].1);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((nodes, weights))
}

/// Tensor product of the 1D rule over all three pose components
/// (`degree^3` samples).
pub fn gauss_hermite_set(degree: usize) -> Result<WeightedSampleSet> {
    let (nodes, weights) = gauss_hermite_1d(degree)?;
    let mut entries = Vec::with_capacity(degree.pow(3));
    for i in 0..degree {
        for j in 0..degree {
            for k in 0..degree {
                entries.push(WeightedSample::new(
                    weights[i] * weights[j] * weights[k],
                    [nodes[i], nodes[j], nodes[k]],
                ));
            }
        }
    }
    Ok(WeightedSampleSet::new(entries, SchemeTag::GaussHermite))
}
