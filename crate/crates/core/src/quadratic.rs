//! Real quadratic forms and their polar bilinear forms.
//!
//! Polarization uses the normalised convention
//! `b(x, y) = (q(x + y) - q(x) - q(y)) / 2 = x^T A y`, so that `b(x, x) = q(x)`
//! and the Clifford relation reads `x y + y x = 2 b(x, y)`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg;

/// Absolute tolerance for symmetry of the coefficient array.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigen-decomposition of a form: descending eigenvalues and an orthonormal
/// frame, `vectors[k]` belonging to `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Counts of positive, negative and (numerically) zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.n_zero == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_plus, self.n_minus, self.n_zero)
    }
}

/// A quadratic form `q(x) = x^T A x` on `R^dim` with symmetric `A`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    dim: usize,
    coeffs: Vec<f64>,
    eigen: OnceLock<Eigen>,
}

impl PartialEq for QuadraticForm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coeffs == other.coeffs
    }
}

impl QuadraticForm {
    /// Builds a form from a row-major `dim x dim` array.
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        check_len(dim * dim, coeffs.len())?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let gap = (coeffs[i * dim + j] - coeffs[j * dim + i]).abs();
                if !(gap <= SYMMETRY_TOL) {
                    return Err(Error::NotSymmetric { row: i, col: j, gap });
                }
            }
        }
        Ok(QuadraticForm {
            dim,
            coeffs,
            eigen: OnceLock::new(),
        })
    }

    /// Builds a form from an arbitrary square array by averaging it with its
    /// transpose.
    pub fn symmetrized(dim: usize, coeffs: &[f64]) -> Result<Self> {
        check_len(dim * dim, coeffs.len())?;
        let mut sym = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                sym[i * dim + j] = 0.5 * (coeffs[i * dim + j] + coeffs[j * dim + i]);
            }
        }
        Self::new(dim, sym)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut coeffs = Vec::with_capacity(dim * dim);
        for r in rows {
            check_len(dim, r.len())?;
            coeffs.extend_from_slice(r);
        }
        Self::new(dim, coeffs)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut coeffs = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            coeffs[i * n + i] = *d;
        }
        Self::new(n, coeffs)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; dim])
    }

    /// `x_1^2 + ... + x_p^2 - (x_{p+1}^2 + ... + x_n^2)`.
    pub fn minkowski(p: usize, n: usize) -> Result<Self> {
        if p > n {
            return Err(Error::InvalidArgument(format!("p = {p} exceeds n = {n}")));
        }
        let diag: Vec<f64> = (0..n).map(|i| if i < p { 1.0 } else { -1.0 }).collect();
        Self::diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coeffs.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn eval_q(&self, x: &[f64]) -> Result<f64> {
        self.polarize(x, x)
    }

    /// `b(x, y) = x^T A y`.
    pub fn polarize(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(self.dim, x.len())?;
        check_len(self.dim, y.len())?;
        // Upper-triangle traversal with the symmetric pair x_i y_j + x_j y_i
        // makes b(x, y) and b(y, x) bitwise identical.
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            s += self.coeffs[i * n + i] * (x[i] * y[i]);
            for j in (i + 1)..n {
                s += self.coeffs[i * n + j] * (x[i] * y[j] + x[j] * y[i]);
            }
        }
        Ok(s)
    }

    /// Eigenvalues (descending) and orthonormal eigenvectors, cached after the
    /// first call.
    pub fn diagonalize(&self) -> Result<&Eigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let (values, vectors) = linalg::symmetric_eigen(&self.coeffs, self.dim)?;
        Ok(self.eigen.get_or_init(|| Eigen { values, vectors }))
    }

    /// `max(1e-9 * max |lambda|, 1e-14)`.
    pub fn default_zero_tol(&self) -> Result<f64> {
        let e = self.diagonalize()?;
        let big = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((1e-9 * big).max(1e-14))
    }

    pub fn signature(&self, zero_tol: f64) -> Result<Signature> {
        if !(zero_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "zero_tol must be nonnegative, got {zero_tol}"
            )));
        }
        let e = self.diagonalize()?;
        let mut sig = Signature {
            n_plus: 0,
            n_minus: 0,
            n_zero: 0,
        };
        for &l in &e.values {
            if l.abs() <= zero_tol {
                sig.n_zero += 1;
            } else if l > 0.0 {
                sig.n_plus += 1;
            } else {
                sig.n_minus += 1;
            }
        }
        Ok(sig)
    }

    pub fn default_signature(&self) -> Result<Signature> {
        self.signature(self.default_zero_tol()?)
    }

    /// The form `P^T A P`, i.e. `x -> q(P x)`.
    pub fn congruent(&self, p: &[f64]) -> Result<Self> {
        let n = self.dim;
        check_len(n * n, p.len())?;
        let ap = linalg::matmul(&self.coeffs, p, n, n, n);
        let pt = linalg::transpose(p, n, n);
        Self::symmetrized(n, &linalg::matmul(&pt, &ap, n, n, n))
    }

    /// Matrix inverse of the coefficient array.
    pub fn inverse(&self) -> Result<Self> {
        let inv = linalg::inverse(&self.coeffs, self.dim)?;
        Self::symmetrized(self.dim, &inv)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        QuadraticForm {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            eigen: OnceLock::new(),
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_len(self.dim, other.dim)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, a| f64::max(m, a.abs()))
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    dim: usize,
    coeffs: Vec<Vec<f64>>,
}

impl Serialize for QuadraticForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            dim: self.dim,
            coeffs: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FormJson::deserialize(d)?;
        if raw.coeffs.len() != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} rows, got {}",
                raw.dim,
                raw.coeffs.len()
            )));
        }
        QuadraticForm::from_rows(&raw.coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> QuadraticForm {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-2.0..2.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        QuadraticForm::new(n, a).unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = QuadraticForm::identity(2).unwrap();
        assert_eq!(id.eval_q(&[3.0, 4.0]).unwrap(), 25.0);
        let mink = QuadraticForm::minkowski(1, 2).unwrap();
        assert_eq!(mink.eval_q(&[1.0, 1.0]).unwrap(), 0.0);
        let d = QuadraticForm::diagonal(&[2.0, 3.0]).unwrap();
        assert_eq!(d.eval_q(&[1.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let id = QuadraticForm::identity(2).unwrap();
        assert_eq!(
            id.eval_q(&[1.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn polarize_examples() {
        let id = QuadraticForm::identity(2).unwrap();
        assert_eq!(id.polarize(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let mink = QuadraticForm::minkowski(1, 2).unwrap();
        assert_eq!(mink.polarize(&[1.0, 1.0], &[1.0, -1.0]).unwrap(), 2.0);
        // same value from the polarization identity
        let q = |v: [f64; 2]| mink.eval_q(&v).unwrap();
        assert_eq!(0.5 * (q([2.0, 0.0]) - q([1.0, 1.0]) - q([1.0, -1.0])), 2.0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = QuadraticForm::new(2, vec![1.0, 2.0, 2.5, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1, .. }));
    }

    #[test]
    fn diagonalize_examples() {
        let m = QuadraticForm::minkowski(1, 2).unwrap();
        let e = m.diagonalize().unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert_eq!(e.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let swap = QuadraticForm::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = swap.diagonalize().unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[0][0], r, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[0][1], r, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[1][0].abs(), r, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[1][0], -e.vectors[1][1], epsilon = 1e-14);

        let well = QuadraticForm::diagonal(&[8.0]).unwrap();
        assert_eq!(well.diagonalize().unwrap().values, vec![8.0]);
    }

    #[test]
    fn signature_examples() {
        let m = QuadraticForm::minkowski(2, 3).unwrap();
        let s = m.signature(1e-10).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (2, 1, 0));
        let z = QuadraticForm::new(3, vec![0.0; 9]).unwrap();
        let s = z.default_signature().unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (0, 0, 3));
        let swap = QuadraticForm::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = swap.default_signature().unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 1, 0));
        assert!(swap.signature(-1.0).is_err());
    }

    #[test]
    fn eigenpairs_satisfy_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let f = random_symmetric(&mut rng, n);
            let e = f.diagonalize().unwrap();
            for (l, v) in e.values.iter().zip(&e.vectors) {
                let av = linalg::matmul(f.coeffs(), v, n, n, 1);
                let res: f64 = av.iter().zip(v).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
                assert!(res <= 1e-9 * (1.0 + l.abs()), "n={n} residual {res}");
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn sylvester_law_of_inertia() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            for _ in 0..10 {
                let f = random_symmetric(&mut rng, n);
                let mut p: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for i in 0..n {
                    p[i * n + i] += 3.0; // diagonally dominant, hence invertible
                }
                let g = f.congruent(&p).unwrap();
                assert_eq!(f.default_signature().unwrap(), g.default_signature().unwrap());
            }
        }
    }

    #[test]
    fn json_shape() {
        let f = QuadraticForm::diagonal(&[2.0, -1.0]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"dim":2,"coeffs":[[2.0,0.0],[0.0,-1.0]]}"#);
        let back: QuadraticForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<QuadraticForm>(r#"{"dim":2,"coeffs":[[1,2],[3,4]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn polarize_matches_eval_and_is_symmetric(
            seed in any::<u64>(),
            n in 1usize..7,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_symmetric(&mut rng, n);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let q = f.eval_q(&x).unwrap();
            let b = f.polarize(&x, &x).unwrap();
            prop_assert!((q - b).abs() <= 1e-10 * q.abs().max(1.0));
            let bxy = f.polarize(&x, &y).unwrap();
            let byx = f.polarize(&y, &x).unwrap();
            prop_assert_eq!(bxy, byx);
            let e = f.diagonalize().unwrap();
            let recon: f64 = e.values.iter().zip(&e.vectors).map(|(l, v)| {
                let vx: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                let vy: f64 = v.iter().zip(&y).map(|(a, b)| a * b).sum();
                l * vx * vy
            }).sum();
            let scale = f.max_abs() * x.iter().map(|v| v.abs()).sum::<f64>() * y.iter().map(|v| v.abs()).sum::<f64>();
            prop_assert!((recon - bxy).abs() <= 1e-8 * scale.max(1.0));
        }
    }
}
