//! Small symmetric matrices and the scalar special functions used by the
//! rest of the crate.
//!
//! Everything here is fixed-size and allocation free except the dense
//! Jacobi solver, which is also used to build Gauss-Hermite rules.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues in `[-NEG_EIG_CLAMP, 0)` are treated as rounding noise and
/// clamped to zero before taking square roots.
pub const NEG_EIG_CLAMP: f64 = 1e-9;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 50;
const SINGULAR_DET: f64 = 1e-15;

/// 2x2 real symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }
}

/// Closed-form eigendecomposition of a [`SymMat2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomp2 {
    /// Sorted descending.
    pub values: [f64; 2],
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: [[f64; 2]; 2],
}

impl EigenDecomp2 {
    pub fn vector(&self, i: usize) -> [f64; 2] {
        [self.vectors[0][i], self.vectors[1][i]]
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> SymMat2 {
        let [l0, l1] = self.values;
        let v = &self.vectors;
        SymMat2::new(
            l0 * v[0][0] * v[0][0] + l1 * v[0][1] * v[0][1],
            l0 * v[0][0] * v[1][0] + l1 * v[0][1] * v[1][1],
            l0 * v[1][0] * v[1][0] + l1 * v[1][1] * v[1][1],
        )
    }
}

pub fn eig_sym2(m: &SymMat2) -> EigenDecomp2 {
    let SymMat2 { xx: a, xy: b, yy: c } = *m;
    if b == 0.0 {
        return if a >= c {
            EigenDecomp2 {
                values: [a, c],
                vectors: [[1.0, 0.0], [0.0, 1.0]],
            }
        } else {
            EigenDecomp2 {
                values: [c, a],
                vectors: [[0.0, -1.0], [1.0, 0.0]],
            }
        };
    }
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let l0 = mean + radius;
    let l1 = mean - radius;
    // Two algebraically equivalent eigenvector forms; take the better
    // conditioned one.
    let (u0, u1) = if a >= c { (l0 - c, b) } else { (b, l0 - a) };
    let norm = u0.hypot(u1);
    let (e0, e1) = (u0 / norm, u1 / norm);
    EigenDecomp2 {
        values: [l0, l1],
        vectors: [[e0, -e1], [e1, e0]],
    }
}

/// 3x3 real symmetric matrix over the pose components `(x, y, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat3 {
    m: [[f64; 3]; 3],
}

impl Default for SymMat3 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl SymMat3 {
    pub const fn zeros() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Self {
            m: [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]],
        }
    }

    /// Build from the upper triangle in row-major order
    /// `(xx, xy, xθ, yy, yθ, θθ)`.
    pub const fn from_upper(u: [f64; 6]) -> Self {
        Self {
            m: [[u[0], u[1], u[2]], [u[1], u[3], u[4]], [u[2], u[4], u[5]]],
        }
    }

    /// Build from a full matrix, averaging the off-diagonal pairs.
    pub fn from_rows(r: [[f64; 3]; 3]) -> Self {
        let mut m = r;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let s = 0.5 * (r[i][j] + r[j][i]);
                m[i][j] = s;
                m[j][i] = s;
            }
        }
        Self { m }
    }

    pub fn upper(&self) -> [f64; 6] {
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// The 2x2 position sub-block.
    pub fn position_block(&self) -> SymMat2 {
        SymMat2::new(self.m[0][0], self.m[0][1], self.m[1][1])
    }

    #[inline]
    pub fn mul_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Plain matrix product; the result is not symmetric in general.
    pub fn matmul(&self, other: &SymMat3) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= s);
        Self { m }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Eigenvalues (descending) and the matching unit eigenvectors as columns.
    pub fn eigen(&self) -> ([f64; 3], [[f64; 3]; 3]) {
        let mut a: Vec<f64> = self.m.iter().flatten().copied().collect();
        let mut v = vec![0.0; 9];
        jacobi_eigen(&mut a, 3, &mut v);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| a[j * 3 + j].total_cmp(&a[i * 3 + i]));
        let mut values = [0.0; 3];
        let mut vectors = [[0.0; 3]; 3];
        for (col, &src) in order.iter().enumerate() {
            values[col] = a[src * 3 + src];
            for row in 0..3 {
                vectors[row][col] = v[row * 3 + src];
            }
        }
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[2]
    }

    pub fn sqrt(&self) -> Result<SymMat3> {
        sqrt_sym3(self)
    }
}

impl Add for SymMat3 {
    type Output = SymMat3;

    fn add(self, rhs: SymMat3) -> SymMat3 {
        let mut m = self.m;
        for (row, rrow) in m.iter_mut().zip(rhs.m.iter()) {
            for (a, b) in row.iter_mut().zip(rrow) {
                *a += b;
            }
        }
        SymMat3 { m }
    }
}

/// Symmetric principal square root.
pub fn sqrt_sym3(m: &SymMat3) -> Result<SymMat3> {
    if m.is_zero() {
        return Ok(SymMat3::zeros());
    }
    let (values, vectors) = m.eigen();
    if values[2] < -NEG_EIG_CLAMP {
        return Err(Error::NonPsd {
            min_eigenvalue: values[2],
        });
    }
    let roots = values.map(|l| l.max(0.0).sqrt());
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3)
                .map(|k| vectors[i][k] * roots[k] * vectors[j][k])
                .sum();
        }
    }
    Ok(SymMat3::from_rows(out))
}

pub fn inv_sym3(m: &SymMat3) -> Result<SymMat3> {
    let det = m.determinant();
    if det.is_nan() || det.abs() <= SINGULAR_DET {
        return Err(Error::Singular { determinant: det });
    }
    let a = m.rows();
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
    };
    let inv = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Ok(SymMat3::from_rows(inv).scale(1.0 / det))
}

/// Standard normal CDF.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Two-sided tail mass `P(|Z| > s)` for a standard normal `Z`.
#[inline]
pub fn std_normal_two_sided_tail(s: f64) -> f64 {
    libm::erfc(s * FRAC_1_SQRT_2)
}

/// Cyclic Jacobi eigen-solver for a dense symmetric `n x n` matrix stored
/// row-major in `a`. On return the diagonal of `a` holds the eigenvalues and
/// the columns of `v` (row-major) the eigenvectors.
pub(crate) fn jacobi_eigen(a: &mut [f64], n: usize, v: &mut [f64]) {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(v.len(), n * n);
    v.iter_mut().for_each(|x| *x = 0.0);
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= JACOBI_TOL * total {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        let np = c * arp - s * arq;
                        let nq = s * arp + c * arq;
                        a[r * n + p] = np;
                        a[p * n + r] = np;
                        a[r * n + q] = nq;
                        a[q * n + r] = nq;
                    }
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn random_psd(g: [f64; 9], shrink: [f64; 3]) -> SymMat3 {
        // A = G diag(shrink) G^T is PSD; zeros in `shrink` give rank deficiency.
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = (0..3).map(|k| g[i * 3 + k] * shrink[k] * g[j * 3 + k]).sum();
            }
        }
        SymMat3::from_rows(r)
    }

    #[test]
    fn eig2_identity_and_diagonal() {
        let e = eig_sym2(&SymMat2::identity());
        assert_eq!(e.values, [1.0, 1.0]);
        assert_eq!(e.vectors, [[1.0, 0.0], [0.0, 1.0]]);

        let e = eig_sym2(&SymMat2::new(4.0, 0.0, 1.0));
        assert_eq!(e.values, [4.0, 1.0]);
        assert_eq!(e.vectors, [[1.0, 0.0], [0.0, 1.0]]);

        let e = eig_sym2(&SymMat2::new(1.0, 0.0, 4.0));
        assert_eq!(e.values, [4.0, 1.0]);
        assert_eq!(e.vector(0).map(f64::abs), [0.0, 1.0]);
    }

    #[test]
    fn eig2_coupled_hand_solution() {
        // Characteristic polynomial (2-l)^2 - 1 = 0 gives l = 3, 1.
        let e = eig_sym2(&SymMat2::new(2.0, 1.0, 2.0));
        assert!(close(e.values[0], 3.0, 1e-15) && close(e.values[1], 1.0, 1e-15));
        let s = FRAC_1_SQRT_2;
        let v0 = e.vector(0);
        let v1 = e.vector(1);
        // Eigenvectors are defined up to sign.
        assert!(close((v0[0] * s + v0[1] * s).abs(), 1.0, 1e-15));
        assert!(close((v1[0] * s - v1[1] * s).abs(), 1.0, 1e-15));
    }

    #[test]
    fn sqrt_exact_cases() {
        assert_eq!(sqrt_sym3(&SymMat3::identity()).unwrap(), SymMat3::identity());
        assert_eq!(
            sqrt_sym3(&SymMat3::diag(4.0, 9.0, 1.0)).unwrap(),
            SymMat3::diag(2.0, 3.0, 1.0)
        );
        assert_eq!(sqrt_sym3(&SymMat3::zeros()).unwrap(), SymMat3::zeros());
    }

    #[test]
    fn sqrt_rejects_negative_definite() {
        let err = sqrt_sym3(&SymMat3::diag(1.0, -0.5, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NonPsd { .. }));
        // Tiny negatives from rounding are clamped instead.
        assert!(sqrt_sym3(&SymMat3::diag(1.0, -1e-12, 1.0)).is_ok());
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(inv_sym3(&SymMat3::identity()).unwrap(), SymMat3::identity());
        assert_eq!(
            inv_sym3(&SymMat3::diag(2.0, 4.0, 8.0)).unwrap(),
            SymMat3::diag(0.5, 0.25, 0.125)
        );
        assert!(matches!(
            inv_sym3(&SymMat3::diag(1.0, 0.0, 1.0)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn cdf_reference_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!(1.0 - std_normal_cdf(8.0) < 1e-14);
        // mpmath: ncdf(1) = 0.841344746068542948585232545632...
        assert!(close(std_normal_cdf(1.0), 0.841_344_746_068_542_9, 1e-15));
        assert!(close(std_normal_two_sided_tail(3.8), 1.446_960_878_502_400_5e-4, 1e-17));
    }

    #[test]
    fn cdf_monotone_on_dense_grid() {
        let mut prev = 0.0;
        for i in 0..=160_000 {
            let z = -8.0 + i as f64 * 1e-4;
            let p = std_normal_cdf(z);
            assert!(p >= prev, "not monotone at z = {z}");
            prev = p;
        }
    }

    #[test]
    fn jacobi_dense_tridiagonal() {
        // Eigenvalues of tridiag(1, 0, 1) of size n are 2 cos(k pi / (n + 1)).
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
        let mut v = vec![0.0; n * n];
        jacobi_eigen(&mut a, n, &mut v);
        let mut got: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!(close(*g, *w, 1e-12));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn eig2_reconstructs(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0) {
            let m = SymMat2::new(a, b, c);
            let e = eig_sym2(&m);
            prop_assert!(e.values[0] >= e.values[1]);
            let r = e.reconstruct();
            let scale = 1.0 + a.abs().max(b.abs()).max(c.abs());
            prop_assert!(close(r.xx, a, 1e-9 * scale));
            prop_assert!(close(r.xy, b, 1e-9 * scale));
            prop_assert!(close(r.yy, c, 1e-9 * scale));
            let v = e.vectors;
            let vtv = [
                v[0][0] * v[0][0] + v[1][0] * v[1][0],
                v[0][0] * v[0][1] + v[1][0] * v[1][1],
                v[0][1] * v[0][1] + v[1][1] * v[1][1],
            ];
            prop_assert!(close(vtv[0], 1.0, 1e-12) && close(vtv[1], 0.0, 1e-12) && close(vtv[2], 1.0, 1e-12));
        }

        #[test]
        fn sqrt_squares_back(g in proptest::array::uniform9(-3.0f64..3.0),
                             s in proptest::array::uniform3(prop_oneof![Just(0.0), 0.0f64..5.0])) {
            let m = random_psd(g, s);
            let root = sqrt_sym3(&m).unwrap();
            let sq = SymMat3::from_rows(root.matmul(&root));
            let diff = std::array::from_fn(|i| std::array::from_fn(|j| sq.get(i, j) - m.get(i, j)));
            let err = SymMat3::from_rows(diff).frobenius_norm();
            prop_assert!(err <= 1e-9 * (1.0 + m.frobenius_norm()), "err {err}");
            prop_assert!(root.min_eigenvalue() >= -1e-9);
        }

        #[test]
        fn inverse_is_inverse(g in proptest::array::uniform9(-3.0f64..3.0),
                              s in proptest::array::uniform3(0.5f64..5.0)) {
            let m = random_psd(g, s);
            prop_assume!(m.determinant().abs() > 1e-6);
            let inv = inv_sym3(&m).unwrap();
            let p = m.matmul(&inv);
            let cond = m.frobenius_norm() * inv.frobenius_norm();
            for (i, row) in p.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!(close(v, want, 1e-12 * cond.max(1.0)));
                }
            }
        }
    }
}
