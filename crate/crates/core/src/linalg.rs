//! Small dense linear algebra: cyclic Jacobi eigen-decomposition, one-sided
//! Jacobi singular values, and pivoted elimination. Matrices are row-major
//! `&[f64]` slices of an `n x n` (or `rows x cols`) array.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Off-diagonal Frobenius mass below which the Jacobi iteration stops,
/// relative to the Frobenius norm of the input (absolute for norms below 1).
pub const JACOBI_TOL: f64 = 1e-12;

pub fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn off_diagonal(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back sorted in descending order; eigenvector `k` is
/// `vectors[k]`, normalised, with its largest-magnitude entry positive.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    // v is stored row-major with eigenvectors as columns.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = frobenius(a).max(1.0);
    let mut sweeps = 0;
    loop {
        let off = off_diagonal(&m, n);
        if off <= JACOBI_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| {
            let mut col: Vec<f64> = (0..n).map(|i| v[i * n + j]).collect();
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if pivot < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    Ok((values, vectors))
}

/// Singular values (nonincreasing) by one-sided Jacobi rotations.
pub fn singular_values(a: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), rows * cols);
    // Work on the orientation with at most as many columns as rows.
    let (r, c, mut u) = if cols <= rows {
        (rows, cols, a.to_vec())
    } else {
        let mut t = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = a[i * cols + j];
            }
        }
        (cols, rows, t)
    };
    if c == 0 {
        return Ok(Vec::new());
    }
    let eps = f64::EPSILON;
    // Columns below this size only carry rounding noise; rotating them
    // against each other never settles.
    let floor = (eps * frobenius(a)).powi(2).max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut worst: f64 = 0.0;
        for p in 0..c {
            for q in (p + 1)..c {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..r {
                    let up = u[i * c + p];
                    let uq = u[i * c + q];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                let scale = alpha.sqrt() * beta.sqrt();
                if gamma == 0.0 || alpha.min(beta) <= floor {
                    continue;
                }
                let rel = gamma.abs() / scale;
                worst = worst.max(rel);
                if rel <= 4.0 * eps {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..r {
                    let up = u[i * c + p];
                    let uq = u[i * c + q];
                    u[i * c + p] = cs * up - sn * uq;
                    u[i * c + q] = sn * up + cs * uq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: worst,
            });
        }
    }
    let mut sv: Vec<f64> = (0..c)
        .map(|j| (0..r).map(|i| u[i * c + j] * u[i * c + j]).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i * m + j] += ail * b[l * m + j];
            }
        }
    }
    out
}

pub fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

/// LU factorisation with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu<S: Scalar> {
    n: usize,
    lu: Vec<S>,
    perm: Vec<usize>,
    sign: f64,
}

impl<S: Scalar> Lu<S> {
    /// Returns `Err(Error::Singular)` when a pivot is exactly zero or below
    /// `rel_tol` times the largest entry of the input.
    pub fn factor(a: &[S], n: usize, rel_tol: f64) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for k in 0..n {
            let (piv, best) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 || best <= rel_tol * scale {
                return Err(Error::Singular);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let d = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f == S::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= f * ukj;
                }
            }
        }
        Ok(Lu { n, lu, perm, sign })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }

    pub fn determinant(&self) -> S {
        let n = self.n;
        let mut d = S::from_f64(self.sign);
        for i in 0..n {
            d *= self.lu[i * n + i];
        }
        d
    }

    pub fn inverse(&self) -> Vec<S> {
        let n = self.n;
        let mut inv = vec![S::zero(); n * n];
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = S::zero());
            e[j] = S::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        inv
    }
}

/// Determinant. Orders up to 3 use cofactor expansion, larger orders pivoted
/// elimination; a vanishing pivot yields exactly zero.
pub fn determinant<S: Scalar>(a: &[S], n: usize) -> S {
    assert_eq!(a.len(), n * n);
    match n {
        0 => S::one(),
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => match Lu::factor(a, n, 0.0) {
            Ok(lu) => lu.determinant(),
            Err(_) => S::zero(),
        },
    }
}

pub fn inverse(a: &[f64], n: usize) -> Result<Vec<f64>> {
    Ok(Lu::factor(a, n, 1e-14)?.inverse())
}

pub fn solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::factor(a, n, 1e-14)?.solve(b))
}

/// Eigenvalues (descending) of the hermitian part `(A + A^H)/2` of a square
/// matrix over either field. Complex input is embedded as the real
/// symmetric block matrix `[[Re, -Im], [Im, Re]]`, whose spectrum is that of
/// the hermitian matrix with every eigenvalue doubled in multiplicity.
pub fn hermitian_eigenvalues<S: Scalar>(a: &[S], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let herm = |i: usize, j: usize| -> (f64, f64) {
        let h = (a[i * n + j] + a[j * n + i].conj()) * S::from_f64(0.5);
        (h.re(), h.im())
    };
    if !S::IS_COMPLEX {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = herm(i, j).0;
            }
        }
        return Ok(symmetric_eigen(&m, n)?.0);
    }
    let big = 2 * n;
    let mut m = vec![0.0; big * big];
    for i in 0..n {
        for j in 0..n {
            let (re, im) = herm(i, j);
            m[i * big + j] = re;
            m[(i + n) * big + j + n] = re;
            m[i * big + j + n] = -im;
            m[(i + n) * big + j] = im;
        }
    }
    let vals = symmetric_eigen(&m, big)?.0;
    Ok(vals.into_iter().step_by(2).collect())
}

/// Smallest eigenvalue of the hermitian part.
pub fn min_hermitian_eigenvalue<S: Scalar>(a: &[S], n: usize) -> Result<f64> {
    Ok(hermitian_eigenvalues(a, n)?.into_iter().fold(f64::INFINITY, f64::min))
}

#[allow(dead_code)]
pub(crate) fn complex_from_parts(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
}
