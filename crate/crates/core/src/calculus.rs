//! Functionals on open subsets of `R^n`: derivatives, tangent hyperplanes,
//! Legendre points and the Clifford algebra of the Hessian at a point.
//!
//! Legendre quantities follow the definition `x* = f'(y)`,
//! `z* = f(y) - <y, f'(y)>`. Under this convention `dz*/dx* = -y` and
//! `(f*)'' = -(f'')^{-1}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordSpace;
use crate::error::{check_len, Error, Result};
use crate::linalg;
use crate::quadratic::{QuadraticForm, Signature};

pub type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Relative tolerance used when checking analytic derivatives against
/// central differences.
pub const DERIVATIVE_CHECK_TOL: f64 = 1e-5;
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;

/// A `C^2` map `f: Omega -> R` with optional analytic derivatives.
///
/// The gradient callback returns `n` entries and the Hessian callback a
/// row-major `n x n` array.
#[derive(Clone)]
pub struct Functional {
    name: String,
    dim: usize,
    eval: EvalFn,
    grad: Option<VectorFn>,
    hess: Option<VectorFn>,
    domain: DomainFn,
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functional")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_hess", &self.hess.is_some())
            .finish()
    }
}

impl Functional {
    /// A functional on all of `R^dim` with no analytic derivatives.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("functional dimension must be positive".into()));
        }
        Ok(Functional {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
            grad: None,
            hess: None,
            domain: Arc::new(|_| true),
        })
    }

    pub fn with_gradient(mut self, grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_hessian(mut self, hess: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.hess = Some(Arc::new(hess));
        self
    }

    /// Membership test for the open set `Omega`.
    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(domain);
        self
    }

    /// Compares the analytic derivatives with central differences at each
    /// probe point and rejects the functional on disagreement.
    pub fn checked(self, probes: &[Vec<f64>]) -> Result<Self> {
        for a in probes {
            self.check_point(a)?;
            if let Some(g) = &self.grad {
                let exact = g(a);
                check_len(self.dim, exact.len())?;
                let fd = self.fd_gradient(a, None)?;
                check_agreement("gradient", &exact, &fd)?;
            }
            if let Some(h) = &self.hess {
                let exact = h(a);
                check_len(self.dim * self.dim, exact.len())?;
                let fd = self.fd_hessian(a, None)?;
                check_agreement("hessian", &exact, fd.coeffs())?;
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hess.is_some()
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        a.len() == self.dim && a.iter().all(|v| v.is_finite()) && (self.domain)(a)
    }

    fn check_point(&self, a: &[f64]) -> Result<()> {
        check_len(self.dim, a.len())?;
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { point: a.to_vec() })
        }
    }

    pub fn eval(&self, a: &[f64]) -> Result<f64> {
        self.check_point(a)?;
        Ok((self.eval)(a))
    }

    /// `f'(a)`: analytic when available, central differences otherwise.
    /// `h` overrides the default step `cbrt(eps) (1 + |a_j|)`.
    pub fn gradient(&self, a: &[f64], h: Option<f64>) -> Result<Vec<f64>> {
        self.check_point(a)?;
        match &self.grad {
            Some(g) => Ok(g(a)),
            None => self.fd_gradient(a, h),
        }
    }

    /// Central-difference gradient regardless of analytic availability.
    pub fn fd_gradient(&self, a: &[f64], h: Option<f64>) -> Result<Vec<f64>> {
        self.check_point(a)?;
        check_step(h)?;
        let mut x = a.to_vec();
        let mut out = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let hj = h.unwrap_or(f64::EPSILON.cbrt() * (1.0 + a[j].abs()));
            x[j] = a[j] + hj;
            let fp = (self.eval)(&x);
            x[j] = a[j] - hj;
            let fm = (self.eval)(&x);
            x[j] = a[j];
            out.push((fp - fm) / (2.0 * hj));
        }
        Ok(out)
    }

    /// `f''(a)` as a quadratic form: analytic when available, symmetrized
    /// central differences otherwise. `h` overrides the default step
    /// `eps^(1/4) (1 + |a_j|)`.
    pub fn hessian(&self, a: &[f64], h: Option<f64>) -> Result<QuadraticForm> {
        self.check_point(a)?;
        match &self.hess {
            Some(hf) => QuadraticForm::symmetrized(self.dim, &hf(a)),
            None => self.fd_hessian(a, h),
        }
    }

    pub fn fd_hessian(&self, a: &[f64], h: Option<f64>) -> Result<QuadraticForm> {
        self.check_point(a)?;
        check_step(h)?;
        let n = self.dim;
        let steps: Vec<f64> = a
            .iter()
            .map(|v| h.unwrap_or(f64::EPSILON.powf(0.25) * (1.0 + v.abs())))
            .collect();
        let f0 = (self.eval)(a);
        let mut x = a.to_vec();
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            let hj = steps[j];
            x[j] = a[j] + hj;
            let fp = (self.eval)(&x);
            x[j] = a[j] - hj;
            let fm = (self.eval)(&x);
            x[j] = a[j];
            out[j * n + j] = (fp - 2.0 * f0 + fm) / (hj * hj);
            for l in (j + 1)..n {
                let hl = steps[l];
                let mut corner = |sj: f64, sl: f64| {
                    x[j] = a[j] + sj * hj;
                    x[l] = a[l] + sl * hl;
                    let v = (self.eval)(&x);
                    x[j] = a[j];
                    x[l] = a[l];
                    v
                };
                let v =
                    (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * hj * hl);
                out[j * n + l] = v;
                out[l * n + j] = v;
            }
        }
        QuadraticForm::symmetrized(n, &out)
    }

    /// The hyperplane tangent to `graph f` at `(y, f(y))`.
    pub fn tangent_hyperplane(&self, y: &[f64]) -> Result<Hyperplane> {
        let g = self.gradient(y, None)?;
        let fy = self.eval(y)?;
        let mut normal = g.clone();
        normal.push(-1.0);
        let offset = dot(&g, y) - fy;
        Ok(Hyperplane { normal, offset })
    }

    pub fn legendre_point(&self, y: &[f64]) -> Result<LegendrePoint> {
        let x_star = self.gradient(y, None)?;
        let z_star = self.eval(y)? - dot(y, &x_star);
        Ok(LegendrePoint {
            y: y.to_vec(),
            x_star,
            z_star,
        })
    }

    /// Solves `f'(y) = x*` by damped Newton from `seed`; the branch reached
    /// is whichever the seed leads to.
    pub fn legendre_invert(&self, x_star: &[f64], seed: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        check_len(self.dim, x_star.len())?;
        self.check_point(seed)?;
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
        }
        let (y, res) = self.newton(x_star, seed, tol, max_iter)?;
        if res <= tol {
            Ok(y)
        } else {
            Err(Error::IterationLimit {
                iterations: max_iter,
                residual: res,
            })
        }
    }

    fn residual(&self, y: &[f64], x_star: &[f64]) -> Result<Vec<f64>> {
        let g = self.gradient(y, None)?;
        Ok(g.iter().zip(x_star).map(|(a, b)| a - b).collect())
    }

    // Runs until the residual is below `tol`, the budget is spent, or no
    // damped step decreases the residual. Returns the last iterate and its
    // residual norm.
    fn newton(&self, x_star: &[f64], seed: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64)> {
        let n = self.dim;
        let mut y = seed.to_vec();
        let mut r = self.residual(&y, x_star)?;
        let mut res = linalg::frobenius(&r);
        for _ in 0..max_iter {
            if res <= tol {
                break;
            }
            let h = self.hessian(&y, None)?;
            if !h.default_signature()?.is_nondegenerate() {
                return Err(Error::Singular);
            }
            let step = linalg::solve(h.coeffs(), n, &r)?;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = y.iter().zip(&step).map(|(a, d)| a - lambda * d).collect();
                if self.contains(&trial) {
                    let rt = self.residual(&trial, x_star)?;
                    let nt = linalg::frobenius(&rt);
                    if nt < res {
                        y = trial;
                        r = rt;
                        res = nt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok((y, res))
    }

    /// Inversion driven to the rounding floor, for use inside finite
    /// differences where the residual error would otherwise be amplified.
    fn invert_tight(&self, x_star: &[f64], seed: &[f64]) -> Result<Vec<f64>> {
        let (y, res) = self.newton(x_star, seed, 0.0, NEWTON_MAX_ITER)?;
        let scale = 1.0 + linalg::frobenius(x_star);
        if res <= 1e-9 * scale {
            Ok(y)
        } else {
            Err(Error::NoConvergence {
                sweeps: NEWTON_MAX_ITER,
                residual: res,
            })
        }
    }

    /// `z*` as a function of `x*` on the branch through `seed`.
    pub fn z_star_of(&self, x_star: &[f64], seed: &[f64]) -> Result<f64> {
        let y = self.invert_tight(x_star, seed)?;
        Ok(self.eval(&y)? - dot(&y, x_star))
    }

    /// Second derivative of `x* -> z*(x*)` at `x* = f'(y)` by central
    /// differences (each probe inverts `f'` from `y`), together with
    /// `(f''(y))^{-1}`.
    pub fn legendre_hessian_pair(&self, y: &[f64]) -> Result<HessianPair> {
        let hess = self.hessian(y, None)?;
        let inverse_hess = hess.inverse()?;
        let x0 = self.gradient(y, None)?;
        let n = self.dim;
        let steps: Vec<f64> = x0.iter().map(|v| f64::EPSILON.powf(0.25) * (1.0 + v.abs())).collect();
        let z = |x: &[f64]| self.z_star_of(x, y);
        let z0 = z(&x0)?;
        let mut out = vec![0.0; n * n];
        let mut x = x0.clone();
        for j in 0..n {
            let hj = steps[j];
            x[j] = x0[j] + hj;
            let zp = z(&x)?;
            x[j] = x0[j] - hj;
            let zm = z(&x)?;
            x[j] = x0[j];
            out[j * n + j] = (zp - 2.0 * z0 + zm) / (hj * hj);
            for l in (j + 1)..n {
                let hl = steps[l];
                let mut acc = 0.0;
                for (sj, sl, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    x[j] = x0[j] + sj * hj;
                    x[l] = x0[l] + sl * hl;
                    acc += w * z(&x)?;
                }
                x[j] = x0[j];
                x[l] = x0[l];
                let v = acc / (4.0 * hj * hl);
                out[j * n + l] = v;
                out[l * n + j] = v;
            }
        }
        Ok(HessianPair {
            fstar_hess: QuadraticForm::symmetrized(n, &out)?,
            inverse_hess,
        })
    }

    /// Diagonalizes `f''(a)` and returns the Clifford space whose metric is
    /// the eigenvalues, with the eigenframe.
    pub fn clifford_at(&self, a: &[f64]) -> Result<HessianClifford> {
        let hessian = self.hessian(a, None)?;
        let signature = hessian.default_signature()?;
        if !signature.is_nondegenerate() {
            return Err(Error::Degenerate(signature));
        }
        let eigen = hessian.diagonalize()?;
        let space = CliffordSpace::new(eigen.values.clone())?;
        Ok(HessianClifford {
            frame: eigen.vectors.clone(),
            space,
            signature,
            hessian,
        })
    }
}

fn check_step(h: Option<f64>) -> Result<()> {
    match h {
        Some(h) if !(h > 0.0 && h.is_finite()) => {
            Err(Error::InvalidArgument(format!("step must be positive, got {h}")))
        }
        _ => Ok(()),
    }
}

fn check_agreement(what: &str, exact: &[f64], approx: &[f64]) -> Result<()> {
    let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (e, a) in exact.iter().zip(approx) {
        if (e - a).abs() > DERIVATIVE_CHECK_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "analytic {what} {e} disagrees with finite differences {a}"
            )));
        }
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `{(x, z) : <normal, (x, z)> = offset}` in `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    /// Signed residual `<normal, (x, z)> - offset`.
    pub fn residual(&self, x: &[f64], z: f64) -> Result<f64> {
        check_len(self.normal.len() - 1, x.len())?;
        let n = x.len();
        Ok(dot(&self.normal[..n], x) + self.normal[n] * z - self.offset)
    }

    /// Height `z` of the plane above `x`.
    pub fn height(&self, x: &[f64]) -> Result<f64> {
        check_len(self.normal.len() - 1, x.len())?;
        let n = x.len();
        Ok((self.offset - dot(&self.normal[..n], x)) / self.normal[n])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendrePoint {
    pub y: Vec<f64>,
    pub x_star: Vec<f64>,
    pub z_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianPair {
    pub fstar_hess: QuadraticForm,
    pub inverse_hess: QuadraticForm,
}

impl HessianPair {
    /// `max |fstar_hess + inverse_hess| / max(1, max |inverse_hess|)`.
    pub fn reciprocity_residual(&self) -> f64 {
        let sum = self
            .fstar_hess
            .coeffs()
            .iter()
            .zip(self.inverse_hess.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a + b).abs()));
        sum / self.inverse_hess.max_abs().max(1.0)
    }

    /// Same comparison against the unsigned relation `(f*)'' = (f'')^{-1}`.
    pub fn unsigned_residual(&self) -> f64 {
        self.fstar_hess
            .max_abs_diff(&self.inverse_hess)
            .unwrap_or(f64::INFINITY)
            / self.inverse_hess.max_abs().max(1.0)
    }
}

/// Clifford algebra attached to `f''(a)` in its eigenframe.
#[derive(Debug, Clone)]
pub struct HessianClifford {
    pub space: Arc<CliffordSpace>,
    /// `frame[j]` is the unit eigenvector for generator `e_{j+1}`.
    pub frame: Vec<Vec<f64>>,
    pub signature: Signature,
    pub hessian: QuadraticForm,
}

impl HessianClifford {
    /// Coordinates of `x` along the eigenframe, i.e. the generator
    /// coefficients of `x` in the attached algebra.
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.frame.len(), x.len())?;
        Ok(self.frame.iter().map(|v| dot(v, x)).collect())
    }
}

/// The built-in functionals, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    /// `|x|^p / p` on `R`.
    Power { p: f64 },
    /// `(x^2 - 1)^2` on `R`.
    DoubleWell,
    /// `x_1^2 + ... + x_p^2 - (x_{p+1}^2 + ... + x_n^2)` on `R^n`.
    Minkowski { p: usize, n: usize },
}

impl Builtin {
    pub fn from_name(name: &str, p: Option<f64>, n: Option<usize>) -> Result<Self> {
        match name {
            "power" => Ok(Builtin::Power {
                p: p.ok_or_else(|| Error::InvalidArgument("power needs p".into()))?,
            }),
            "double_well" | "double-well" => Ok(Builtin::DoubleWell),
            "minkowski" => {
                let p = p.ok_or_else(|| Error::InvalidArgument("minkowski needs p".into()))?;
                if p.fract() != 0.0 || p < 0.0 {
                    return Err(Error::InvalidArgument(format!("minkowski p must be a count, got {p}")));
                }
                Ok(Builtin::Minkowski {
                    p: p as usize,
                    n: n.ok_or_else(|| Error::InvalidArgument("minkowski needs n".into()))?,
                })
            }
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }

    pub fn build(self) -> Result<Functional> {
        match self {
            Builtin::Power { p } => power(p),
            Builtin::DoubleWell => double_well(),
            Builtin::Minkowski { p, n } => minkowski(p, n),
        }
    }
}

/// `f(x) = |x|^p / p` on `R`, `p > 1`. For `p < 2` the origin is removed
/// from the domain since `f''` blows up there.
pub fn power(p: f64) -> Result<Functional> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("power needs p > 1, got {p}")));
    }
    let f = Functional::new(format!("power(p={p})"), 1, move |x| x[0].abs().powf(p) / p)?
        .with_gradient(move |x| vec![x[0].signum() * x[0].abs().powf(p - 1.0)])
        .with_hessian(move |x| vec![(p - 1.0) * x[0].abs().powf(p - 2.0)]);
    let f = if p < 2.0 { f.with_domain(|x| x[0] != 0.0) } else { f };
    f.checked(&[vec![0.7], vec![-1.3], vec![2.5]])
}

/// `f(x) = (x^2 - 1)^2` on `R`.
pub fn double_well() -> Result<Functional> {
    Functional::new("double_well", 1, |x| (x[0] * x[0] - 1.0).powi(2))?
        .with_gradient(|x| vec![4.0 * x[0] * (x[0] * x[0] - 1.0)])
        .with_hessian(|x| vec![12.0 * x[0] * x[0] - 4.0])
        .checked(&[vec![0.0], vec![0.4], vec![-1.7]])
}

/// The Minkowski form with `p` plus signs on `R^n` (`1 <= p <= n`).
pub fn minkowski(p: usize, n: usize) -> Result<Functional> {
    if p == 0 || p > n {
        return Err(Error::InvalidArgument(format!(
            "minkowski needs 1 <= p <= n, got p={p}, n={n}"
        )));
    }
    let sign = move |j: usize| if j < p { 1.0 } else { -1.0 };
    let probe: Vec<f64> = (0..n).map(|j| 0.3 * j as f64 - 0.5).collect();
    Functional::new(format!("minkowski(p={p},n={n})"), n, move |x| {
        x.iter().enumerate().map(|(j, v)| sign(j) * v * v).sum()
    })?
    .with_gradient(move |x| x.iter().enumerate().map(|(j, v)| 2.0 * sign(j) * v).collect())
    .with_hessian(move |_| {
        let mut h = vec![0.0; n * n];
        for j in 0..n {
            h[j * n + j] = 2.0 * sign(j);
        }
        h
    })
    .checked(&[probe])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Multivector;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Bisection on a sign change of g, used as an independent root oracle.
    fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(g(lo) * g(hi) <= 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn gradient_examples() {
        assert_abs_diff_eq!(power(2.0).unwrap().gradient(&[3.0], None).unwrap()[0], 3.0);
        let dw = double_well().unwrap();
        assert_eq!(dw.gradient(&[0.0], None).unwrap(), vec![0.0]);
        assert_abs_diff_eq!(dw.gradient(&[2.0], None).unwrap()[0], 24.0);
        assert_abs_diff_eq!(dw.fd_gradient(&[2.0], None).unwrap()[0], 24.0, epsilon = 1e-7);
        assert!(dw.fd_gradient(&[2.0], Some(0.0)).is_err());
    }

    #[test]
    fn hessian_examples() {
        let m = minkowski(1, 2).unwrap();
        let h = m.hessian(&[0.4, -2.0], None).unwrap();
        assert_eq!(h.coeffs(), &[2.0, 0.0, 0.0, -2.0]);
        assert_eq!(power(2.0).unwrap().hessian(&[-7.0], None).unwrap().coeffs(), &[1.0]);
        let dw = double_well().unwrap();
        assert_abs_diff_eq!(dw.hessian(&[1.0], None).unwrap().coeffs()[0], 8.0);
        assert_abs_diff_eq!(dw.fd_hessian(&[1.0], None).unwrap().coeffs()[0], 8.0, epsilon = 1e-6);
    }

    #[test]
    fn numeric_only_functional_uses_differences() {
        let f = Functional::new("xy", 2, |x| x[0] * x[0] * x[1] + x[1].sin()).unwrap();
        assert!(!f.has_analytic_gradient());
        let a = [0.7, -0.2];
        let g = f.gradient(&a, None).unwrap();
        assert_abs_diff_eq!(g[0], 2.0 * 0.7 * -0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], 0.49 + (-0.2f64).cos(), epsilon = 1e-9);
        let h = f.hessian(&a, None).unwrap();
        assert_abs_diff_eq!(h.entry(0, 0), -0.4, epsilon = 1e-6);
        assert_abs_diff_eq!(h.entry(0, 1), 1.4, epsilon = 1e-6);
        assert_abs_diff_eq!(h.entry(1, 1), -(-0.2f64).sin(), epsilon = 1e-6);
        assert_eq!(h.entry(0, 1), h.entry(1, 0));
    }

    #[test]
    fn wrong_analytic_derivative_is_rejected() {
        let f = Functional::new("bad", 1, |x| x[0] * x[0])
            .unwrap()
            .with_gradient(|x| vec![3.0 * x[0]]);
        assert!(f.checked(&[vec![1.0]]).is_err());
    }

    #[test]
    fn domain_is_enforced() {
        let f = power(1.5).unwrap();
        assert!(matches!(f.eval(&[0.0]), Err(Error::OutsideDomain { .. })));
        assert!(f.gradient(&[0.5], None).is_ok());
        assert!(matches!(f.eval(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        assert!(power(1.0).is_err());
        assert!(minkowski(0, 2).is_err());
        assert!(minkowski(3, 2).is_err());
    }

    #[test]
    fn tangent_hyperplane_examples() {
        let f = power(2.0).unwrap();
        let p0 = f.tangent_hyperplane(&[0.0]).unwrap();
        assert_eq!(p0.normal, vec![0.0, -1.0]);
        assert_eq!(p0.height(&[5.0]).unwrap(), 0.0);
        let p1 = f.tangent_hyperplane(&[1.0]).unwrap();
        for x in [-2.0, 0.0, 0.5, 3.0] {
            assert_abs_diff_eq!(p1.height(&[x]).unwrap(), x - 0.5, epsilon = 1e-15);
        }
        let m = minkowski(2, 3).unwrap();
        let y = [0.3, -1.1, 2.0];
        let plane = m.tangent_hyperplane(&y).unwrap();
        assert_abs_diff_eq!(plane.residual(&y, m.eval(&y).unwrap()).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn legendre_point_examples() {
        let lp = power(3.0).unwrap().legendre_point(&[2.0]).unwrap();
        assert_eq!(lp.x_star, vec![4.0]);
        assert_abs_diff_eq!(lp.z_star, -16.0 / 3.0, epsilon = 1e-14);
        let pstar = 1.5;
        assert_abs_diff_eq!(lp.z_star, -(4f64.powf(pstar)) / pstar, epsilon = 1e-13);

        let dw = double_well().unwrap().legendre_point(&[0.0]).unwrap();
        assert_eq!(dw.x_star, vec![0.0]);
        assert_eq!(dw.z_star, 1.0);
        // the printed closed form (y^2 - 1)(3y^2 + 1) has the opposite sign
        let printed = |y: f64| (y * y - 1.0) * (3.0 * y * y + 1.0);
        for y in [-1.4, -0.3, 0.0, 0.8, 2.0] {
            let z = double_well().unwrap().legendre_point(&[y]).unwrap().z_star;
            assert_abs_diff_eq!(z, -printed(y), epsilon = 1e-12);
        }

        let crit = double_well().unwrap().legendre_point(&[1.0]).unwrap();
        assert_eq!((crit.x_star[0], crit.z_star), (0.0, 0.0));
    }

    #[test]
    fn legendre_invert_examples() {
        let p2 = power(2.0).unwrap();
        assert_abs_diff_eq!(
            p2.legendre_invert(&[5.0], &[0.0], NEWTON_TOL, NEWTON_MAX_ITER).unwrap()[0],
            5.0,
            epsilon = 1e-10
        );
        let p3 = power(3.0).unwrap();
        assert_abs_diff_eq!(
            p3.legendre_invert(&[4.0], &[1.0], NEWTON_TOL, NEWTON_MAX_ITER).unwrap()[0],
            2.0,
            epsilon = 1e-10
        );

        let dw = double_well().unwrap();
        let g = |y: f64| 4.0 * y * (y * y - 1.0);
        let near0 = dw.legendre_invert(&[0.0], &[0.1], NEWTON_TOL, NEWTON_MAX_ITER).unwrap()[0];
        let near1 = dw.legendre_invert(&[0.0], &[0.9], NEWTON_TOL, NEWTON_MAX_ITER).unwrap()[0];
        assert_abs_diff_eq!(near0, bisect(g, -0.5, 0.5), epsilon = 1e-10);
        assert_abs_diff_eq!(near1, bisect(g, 0.5, 1.5), epsilon = 1e-10);

        // zero Hessian at the seed
        assert!(matches!(
            dw.legendre_invert(&[1.0], &[1.0 / 3f64.sqrt()], NEWTON_TOL, NEWTON_MAX_ITER),
            Err(Error::Singular)
        ));
        assert!(matches!(
            dw.legendre_invert(&[1.0], &[0.0], NEWTON_TOL, 0),
            Err(Error::IterationLimit { .. })
        ));
    }

    #[test]
    fn hessian_pair_examples() {
        let pair = power(2.0).unwrap().legendre_hessian_pair(&[0.8]).unwrap();
        assert_abs_diff_eq!(pair.fstar_hess.coeffs()[0], -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(pair.inverse_hess.coeffs()[0], 1.0, epsilon = 1e-15);

        let pair = minkowski(1, 2).unwrap().legendre_hessian_pair(&[0.3, 0.9]).unwrap();
        let expected = [-0.5, 0.0, 0.0, 0.5];
        for (a, b) in pair.fstar_hess.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
        }
        assert!(pair.reciprocity_residual() < 1e-6);
        // the unsigned claim misses by the full size of the inverse
        assert_abs_diff_eq!(pair.unsigned_residual(), 1.0, epsilon = 1e-6);

        let pair = power(3.0).unwrap().legendre_hessian_pair(&[2.0]).unwrap();
        assert_abs_diff_eq!(pair.fstar_hess.coeffs()[0], -0.25, epsilon = 1e-6);
    }

    #[test]
    fn z_star_slope_is_minus_y() {
        let dw = double_well().unwrap();
        for y in [-1.8, -0.2, 0.35, 1.2, 2.1] {
            let x0 = dw.gradient(&[y], None).unwrap()[0];
            let h = 1e-5 * (1.0 + x0.abs());
            let zp = dw.z_star_of(&[x0 + h], &[y]).unwrap();
            let zm = dw.z_star_of(&[x0 - h], &[y]).unwrap();
            assert_abs_diff_eq!((zp - zm) / (2.0 * h), -y, epsilon = 1e-5 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn clifford_at_examples() {
        let hc = minkowski(1, 2).unwrap().clifford_at(&[1.0, 1.0]).unwrap();
        assert_eq!(hc.space.diag(), &[2.0, -2.0]);
        assert_eq!(
            hc.signature,
            Signature {
                n_plus: 1,
                n_minus: 1,
                n_zero: 0
            }
        );

        let hc = double_well().unwrap().clifford_at(&[0.0]).unwrap();
        assert_eq!(hc.space.diag(), &[-4.0]);

        let err = double_well().unwrap().clifford_at(&[1.0 / 3f64.sqrt()]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(s) if s.n_zero == 1));
    }

    #[test]
    fn hessian_algebra_squares_to_hessian_form() {
        let f = Functional::new("mixed", 3, |x| {
            x[0] * x[1] + 0.5 * x[2] * x[2] - x[0] * x[2] + x[0].powi(2)
        })
        .unwrap();
        let a = [0.1, 0.2, 0.3];
        let hc = f.clifford_at(&a).unwrap();
        let x = [0.4, -1.0, 2.0];
        let v = Multivector::from_vector(&hc.space, &hc.embed(&x).unwrap()).unwrap();
        let sq = v.geometric_product(&v).unwrap();
        let q = hc.hessian.eval_q(&x).unwrap();
        assert_abs_diff_eq!(sq.scalar_part(), q, epsilon = 1e-6);
        assert!(sq.grade_project(2).is_empty());
    }

    #[test]
    fn builtins_by_name() {
        assert_eq!(
            Builtin::from_name("power", Some(3.0), None).unwrap(),
            Builtin::Power { p: 3.0 }
        );
        assert_eq!(
            Builtin::from_name("minkowski", Some(1.0), Some(2)).unwrap(),
            Builtin::Minkowski { p: 1, n: 2 }
        );
        assert!(Builtin::from_name("power", None, None).is_err());
        assert!(matches!(
            Builtin::from_name("cosh", None, None),
            Err(Error::UnsupportedTag(_))
        ));
        assert_eq!(Builtin::DoubleWell.build().unwrap().dim(), 1);
    }

    proptest! {
        #[test]
        fn fd_derivatives_match_analytic(y in -3.0f64..3.0, p in 2usize..5, v in proptest::collection::vec(-2.0f64..2.0, 3)) {
            let cases: Vec<(Functional, Vec<f64>)> = vec![
                (power(p as f64).unwrap(), vec![y]),
                (double_well().unwrap(), vec![y]),
                (minkowski(2, 3).unwrap(), v.clone()),
            ];
            for (f, a) in cases {
                if !f.contains(&a) {
                    continue;
                }
                let g = f.gradient(&a, None).unwrap();
                let gf = f.fd_gradient(&a, None).unwrap();
                let scale = g.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                for (e, n) in g.iter().zip(&gf) {
                    prop_assert!((e - n).abs() <= 1e-5 * scale);
                }
                let h = f.hessian(&a, None).unwrap();
                let hf = f.fd_hessian(&a, None).unwrap();
                prop_assert!(h.max_abs_diff(&hf).unwrap() <= 1e-5 * h.max_abs().max(1.0));
            }
        }

        #[test]
        fn invert_round_trip(y in prop_oneof![-2.5f64..-0.7, 0.7f64..2.5]) {
            for f in [power(3.0).unwrap(), power(4.0).unwrap(), double_well().unwrap()] {
                let lp = f.legendre_point(&[y]).unwrap();
                let back = f.legendre_invert(&lp.x_star, &[y], NEWTON_TOL, NEWTON_MAX_ITER).unwrap();
                prop_assert!((back[0] - y).abs() <= 1e-8);
            }
        }
    }
}
