//! Reproducing kernels of the example Hilbert function spaces and a
//! quadrature check of the reproducing identity `x(t) = <x, H(., t)>`.
//!
//! Printed closed forms are kept as literal functions next to the forms
//! derived from an orthonormal basis or checked by quadrature, so the two
//! can be compared directly (see [`crate::ledger`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Default number of Simpson panels for [`verify_reproducing`].
pub const DEFAULT_QUAD_N: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    /// Open interval `(a, b)`.
    Interval { a: f64, b: f64 },
    /// Open disc `|z| < radius` centred at the origin.
    Disc { radius: f64 },
}

impl Domain {
    pub fn contains<S: Scalar>(&self, p: S) -> bool {
        if !p.is_finite() {
            return false;
        }
        match *self {
            Domain::Interval { a, b } => p.im() == 0.0 && a < p.re() && p.re() < b,
            Domain::Disc { radius } => p.abs() < radius,
        }
    }

    fn check<S: Scalar>(&self, p: S) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                point: if S::IS_COMPLEX {
                    vec![p.re(), p.im()]
                } else {
                    vec![p.re()]
                },
            })
        }
    }
}

fn interval(a: f64, b: f64) -> Result<Domain> {
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need a finite interval a < b, got ({a}, {b})"
        )));
    }
    Ok(Domain::Interval { a, b })
}

/// Side from which a one-sided derivative is taken at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// A kernel `H(s, t)` over the real or complex field. Points and values
/// share the scalar type.
pub trait Kernel: Send + Sync {
    type Scalar: Scalar;

    fn name(&self) -> &'static str;

    fn domain(&self) -> Domain;

    fn params(&self) -> Vec<(&'static str, f64)>;

    /// Evaluation without the domain check; used on closed intervals by the
    /// quadrature.
    fn eval_unchecked(&self, s: Self::Scalar, t: Self::Scalar) -> Self::Scalar;

    fn eval(&self, s: Self::Scalar, t: Self::Scalar) -> Result<Self::Scalar> {
        let d = self.domain();
        d.check(s)?;
        d.check(t)?;
        Ok(self.eval_unchecked(s, t))
    }
}

/// Real kernels with derivatives in the first argument, as needed by the
/// reproducing-property check.
pub trait DifferentiableKernel: Kernel<Scalar = f64> {
    /// `d^k/ds^k H(s, t)`; at a kink the limit from `side` is returned.
    fn partial_s(&self, order: usize, s: f64, t: f64, side: Side) -> Result<f64>;

    /// Points in the first argument where derivatives jump, for fixed `t`.
    fn kinks(&self, t: f64) -> Vec<f64> {
        vec![t]
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `H(s, t) = sum_{j=0}^n (s - c)^j / j! * (t - c)^j / j!`, the kernel of
/// polynomials of degree `<= n` under `<x, y> = sum_j x^(j)(c) y^(j)(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyKernel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n: usize,
}

impl PolyKernel {
    pub fn new(a: f64, b: f64, c: f64, n: usize) -> Result<Self> {
        let d = interval(a, b)?;
        d.check(c)?;
        Ok(PolyKernel { a, b, c, n })
    }
}

impl Kernel for PolyKernel {
    type Scalar = f64;

    fn name(&self) -> &'static str {
        "poly"
    }

    fn domain(&self) -> Domain {
        Domain::Interval { a: self.a, b: self.b }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b), ("c", self.c), ("n", self.n as f64)]
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        self.partial_s(0, s, t, Side::Below).unwrap_or(f64::NAN)
    }
}

impl DifferentiableKernel for PolyKernel {
    fn partial_s(&self, order: usize, s: f64, t: f64, _side: Side) -> Result<f64> {
        let (ds, dt) = (s - self.c, t - self.c);
        Ok((order..=self.n)
            .map(|j| ds.powi((j - order) as i32) / factorial(j - order) * dt.powi(j as i32) / factorial(j))
            .sum())
    }

    fn kinks(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// `H(s, t) = min(s - a, t - a)` on `(a, b)`: the kernel of
/// `{x in H^1(a, b) : x(a) = 0}` under `<x, y> = int x' y'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevKernel {
    pub a: f64,
    pub b: f64,
}

impl SobolevKernel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        interval(a, b)?;
        Ok(SobolevKernel { a, b })
    }
}

impl Kernel for SobolevKernel {
    type Scalar = f64;

    fn name(&self) -> &'static str {
        "sobolev"
    }

    fn domain(&self) -> Domain {
        Domain::Interval { a: self.a, b: self.b }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b)]
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        (s - self.a).min(t - self.a)
    }
}

impl DifferentiableKernel for SobolevKernel {
    fn partial_s(&self, order: usize, s: f64, t: f64, side: Side) -> Result<f64> {
        Ok(match order {
            0 => self.eval_unchecked(s, t),
            1 if (s < t || (s == t && side == Side::Below)) => 1.0,
            _ => 0.0,
        })
    }
}

/// How the Fourier kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierForm {
    /// Partial sum with this many terms.
    Series(usize),
    /// Closed form of the infinite sum.
    Closed,
}

/// `H(s, t) = kappa * sum_{p>=1} cos(p (t - s)) / p^2` on `(0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierKernel {
    pub kappa: f64,
    pub form: FourierForm,
}

impl FourierKernel {
    /// The constant as printed, `1 / pi^2`.
    pub const PRINTED_KAPPA: f64 = 1.0 / (PI * PI);
    /// The constant of the orthonormal expansion in `cos(p u)/(p sqrt(pi))`,
    /// `sin(p u)/(p sqrt(pi))`: `1 / pi`.
    pub const BASIS_KAPPA: f64 = 1.0 / PI;

    pub fn new(kappa: f64, form: FourierForm) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        if form == FourierForm::Series(0) {
            return Err(Error::InvalidArgument("the series needs at least one term".into()));
        }
        Ok(FourierKernel { kappa, form })
    }

    /// `kappa * (pi^2/6 - pi theta/2 + theta^2/4)` with `theta = |t - s|`.
    pub fn closed_form(&self, s: f64, t: f64) -> f64 {
        let th = (t - s).abs();
        self.kappa * (PI * PI / 6.0 - PI * th / 2.0 + th * th / 4.0)
    }

    /// `kappa * sum_{p=1}^terms cos(p theta) / p^2`, summed from the small
    /// end.
    pub fn series(&self, s: f64, t: f64, terms: usize) -> f64 {
        let th = t - s;
        let sum: f64 = (1..=terms)
            .rev()
            .map(|p| {
                let p = p as f64;
                (p * th).cos() / (p * p)
            })
            .sum();
        self.kappa * sum
    }
}

impl Kernel for FourierKernel {
    type Scalar = f64;

    fn name(&self) -> &'static str {
        "fourier"
    }

    fn domain(&self) -> Domain {
        Domain::Interval { a: 0.0, b: 2.0 * PI }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        let terms = match self.form {
            FourierForm::Series(p) => p as f64,
            FourierForm::Closed => f64::INFINITY,
        };
        vec![("kappa", self.kappa), ("terms", terms)]
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        match self.form {
            FourierForm::Series(p) => self.series(s, t, p),
            FourierForm::Closed => self.closed_form(s, t),
        }
    }
}

impl DifferentiableKernel for FourierKernel {
    fn partial_s(&self, order: usize, s: f64, t: f64, side: Side) -> Result<f64> {
        match (order, self.form) {
            (0, _) => Ok(self.eval_unchecked(s, t)),
            (1, FourierForm::Series(terms)) => {
                let th = t - s;
                Ok(self.kappa * (1..=terms).rev().map(|p| (p as f64 * th).sin() / p as f64).sum::<f64>())
            }
            (1, FourierForm::Closed) => {
                let below = s < t || (s == t && side == Side::Below);
                let th = (t - s).abs();
                let slope = PI / 2.0 - th / 2.0;
                Ok(self.kappa * if below { slope } else { -slope })
            }
            _ => Err(Error::InvalidArgument(format!(
                "fourier kernel derivatives above order 1 are not provided (asked {order})"
            ))),
        }
    }
}

/// `(pi rho^2)^-1 sum_{n=0}^N (n+1) (t conj z / rho^2)^n`, from the
/// orthonormal basis `sqrt((n+1)/(pi rho^2)) (z/rho)^n` of square-integrable
/// analytic functions on the disc of radius `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergmanSeries {
    pub rho: f64,
    pub terms: usize,
}

impl BergmanSeries {
    pub fn new(rho: f64, terms: usize) -> Result<Self> {
        check_radius(rho)?;
        Ok(BergmanSeries { rho, terms })
    }

    /// Closed form of the infinite series: `(pi rho^2)^-1 (1 - t conj z / rho^2)^-2`.
    pub fn closed_form(&self, t: Complex64, z: Complex64) -> Complex64 {
        let w = Complex64::new(1.0, 0.0) - t * z.conj() / (self.rho * self.rho);
        (w * w).inv() / (PI * self.rho * self.rho)
    }
}

fn check_radius(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {rho}")))
    }
}

impl Kernel for BergmanSeries {
    type Scalar = Complex64;

    fn name(&self) -> &'static str {
        "bergman"
    }

    fn domain(&self) -> Domain {
        Domain::Disc { radius: self.rho }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("rho", self.rho), ("terms", self.terms as f64)]
    }

    fn eval_unchecked(&self, t: Complex64, z: Complex64) -> Complex64 {
        let w = t * z.conj() / (self.rho * self.rho);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (0..=self.terms).rev() {
            acc = acc * w + (n as f64 + 1.0);
        }
        // Horner above builds sum (n+1) w^n from the top coefficient down.
        acc / (PI * self.rho * self.rho)
    }
}

/// `(pi rho^2)^-1 (1 - t conj z / rho^2)^-1` as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergmanPrinted {
    pub rho: f64,
}

impl BergmanPrinted {
    pub fn new(rho: f64) -> Result<Self> {
        check_radius(rho)?;
        Ok(BergmanPrinted { rho })
    }
}

impl Kernel for BergmanPrinted {
    type Scalar = Complex64;

    fn name(&self) -> &'static str {
        "bergman_printed"
    }

    fn domain(&self) -> Domain {
        Domain::Disc { radius: self.rho }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("rho", self.rho)]
    }

    fn eval_unchecked(&self, t: Complex64, z: Complex64) -> Complex64 {
        let w = Complex64::new(1.0, 0.0) - t * z.conj() / (self.rho * self.rho);
        w.inv() / (PI * self.rho * self.rho)
    }
}

/// Sign pattern of the four logarithms in the pinned kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogPattern {
    /// `(+, -, -, -)` inside the bracket, as printed.
    Printed,
    /// `(+, -, -, +)`: `K(t,z) - K(t,zeta) - K(zeta,z) + K(zeta,zeta)`.
    Pinned,
}

/// `-(1/pi) [Log(1 - t conj z/rho^2) - Log(1 - t conj zeta/rho^2)`
/// `- Log(1 - zeta conj z/rho^2) -/+ Log(1 - |zeta|^2/rho^2)]`
/// with the principal logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogKernel {
    pub rho: f64,
    pub zeta: Complex64,
    pub pattern: LogPattern,
}

impl LogKernel {
    pub fn new(rho: f64, zeta: Complex64, pattern: LogPattern) -> Result<Self> {
        check_radius(rho)?;
        Domain::Disc { radius: rho }.check(zeta)?;
        Ok(LogKernel { rho, zeta, pattern })
    }

    fn log_term(&self, t: Complex64, z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - t * z.conj() / (self.rho * self.rho)).ln()
    }

    /// `(1/pi) sum_{n>=1} (t conj z/rho^2)^n / n`, the series of
    /// `-(1/pi) Log(1 - t conj z/rho^2)`, truncated at `terms`.
    pub fn base_series(&self, t: Complex64, z: Complex64, terms: usize) -> Complex64 {
        let w = t * z.conj() / (self.rho * self.rho);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for n in 1..=terms {
            pw *= w;
            acc += pw / n as f64;
        }
        acc / PI
    }
}

impl Kernel for LogKernel {
    type Scalar = Complex64;

    fn name(&self) -> &'static str {
        match self.pattern {
            LogPattern::Printed => "log",
            LogPattern::Pinned => "log_pinned",
        }
    }

    fn domain(&self) -> Domain {
        Domain::Disc { radius: self.rho }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("rho", self.rho), ("zeta_re", self.zeta.re), ("zeta_im", self.zeta.im)]
    }

    fn eval_unchecked(&self, t: Complex64, z: Complex64) -> Complex64 {
        let zeta = self.zeta;
        let last = self.log_term(zeta, zeta);
        let last = match self.pattern {
            LogPattern::Printed => -last,
            LogPattern::Pinned => last,
        };
        let bracket = self.log_term(t, z) - self.log_term(t, zeta) - self.log_term(zeta, z) + last;
        -bracket / PI
    }
}

/// `G[j][k] = H(p_j, p_k)`, row-major.
pub fn gram<K: Kernel + ?Sized>(kernel: &K, points: &[K::Scalar]) -> Result<Vec<K::Scalar>> {
    let m = points.len();
    let mut g = Vec::with_capacity(m * m);
    for &s in points {
        for &t in points {
            g.push(kernel.eval(s, t)?);
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of the hermitian part of the Gram matrix.
pub fn min_gram_eigenvalue<K: Kernel + ?Sized>(kernel: &K, points: &[K::Scalar]) -> Result<f64> {
    linalg::min_hermitian_eigenvalue(&gram(kernel, points)?, points.len())
}

/// Largest `|H(s,t) - conj H(t,s)|` over pairs of the given points.
pub fn hermitian_defect<K: Kernel + ?Sized>(kernel: &K, points: &[K::Scalar]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in points {
        for &t in points {
            worst = worst.max((kernel.eval(s, t)? - kernel.eval(t, s)?.conj()).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "neumann" => Ok(Boundary::Neumann),
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

/// Discrete Green kernel of `D = sum_p (-1)^p a_p d^{2p}/dx^{2p}` on a
/// uniform grid.
///
/// Dirichlet grids are vertex-centred (`h = (b-a)/(m+1)`, nodes
/// `a + i h`); for `alpha = 2` the ends are clamped (`u = u' = 0`).
/// Neumann grids are cell-centred (`h = (b-a)/m`, nodes `a + (i - 1/2) h`)
/// with mirrored ghost values, and support `alpha = 1` only.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    pub m: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    /// The assembled finite-difference operator `D_h`.
    pub operator: Vec<f64>,
    /// `D_h^{-1} / h`, so that `sum_j G[i][j] f(x_j) h` approximates the
    /// solution of `D u = f` at `x_i`.
    pub values: Vec<f64>,
}

pub fn green_matrix_1d(weights: &[f64], a: f64, b: f64, m: usize, bc: Boundary) -> Result<GreenMatrix> {
    interval(a, b)?;
    if weights.len() < 2 || weights.len() > 3 {
        return Err(Error::InvalidArgument(format!(
            "need weights a_0..a_alpha with alpha in {{1, 2}}, got {} weights",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || *weights.last().unwrap() == 0.0 {
        return Err(Error::InvalidArgument(
            "weights must be nonnegative with a positive leading weight".into(),
        ));
    }
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 interior nodes, got {m}"
        )));
    }
    let alpha = weights.len() - 1;
    if bc == Boundary::Neumann && alpha == 2 {
        return Err(Error::InvalidArgument(
            "the Neumann problem is provided for alpha = 1 only".into(),
        ));
    }
    if bc == Boundary::Neumann && weights[0] == 0.0 {
        return Err(Error::Singular);
    }
    let (h, nodes): (f64, Vec<f64>) = match bc {
        Boundary::Dirichlet => {
            let h = (b - a) / (m + 1) as f64;
            (h, (1..=m).map(|i| a + i as f64 * h).collect())
        }
        Boundary::Neumann => {
            let h = (b - a) / m as f64;
            (h, (0..m).map(|i| a + (i as f64 + 0.5) * h).collect())
        }
    };
    let mut d = vec![0.0; m * m];
    let h2 = h * h;
    for i in 0..m {
        d[i * m + i] += weights[0];
        // -a_1 u''
        d[i * m + i] += 2.0 * weights[1] / h2;
        if i > 0 {
            d[i * m + i - 1] -= weights[1] / h2;
        }
        if i + 1 < m {
            d[i * m + i + 1] -= weights[1] / h2;
        }
    }
    if bc == Boundary::Neumann {
        d[0] -= weights[1] / h2;
        d[m * m - 1] -= weights[1] / h2;
    }
    if alpha == 2 {
        // +a_2 u'''' with the (1, -4, 6, -4, 1) stencil and clamped ends.
        let w = weights[2] / (h2 * h2);
        for i in 0..m {
            for (off, c) in [(-2i64, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)] {
                let j = i as i64 + off;
                if (0..m as i64).contains(&j) {
                    d[i * m + j as usize] += w * c;
                }
            }
        }
        d[0] += w;
        d[m * m - 1] += w;
    }
    let inv = linalg::Lu::factor(&d, m, 1e-14)?.inverse();
    // D_h is symmetric; average away the rounding asymmetry of the inverse.
    let mut values = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            values[i * m + j] = 0.5 * (inv[i * m + j] + inv[j * m + i]) / h;
        }
    }
    Ok(GreenMatrix {
        m,
        h,
        nodes,
        operator: d,
        values,
    })
}

impl GreenMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    /// `u_i = sum_j G[i][j] f(x_j) h`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let fv: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j) * fv[j]).sum::<f64>() * self.h)
            .collect()
    }

    /// `max |D_h (h G) - I|`.
    pub fn identity_residual(&self) -> f64 {
        let hg: Vec<f64> = self.values.iter().map(|v| v * self.h).collect();
        let prod = linalg::matmul(&self.operator, &hg, self.m, self.m, self.m);
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[i * self.m + j] - target).abs());
            }
        }
        worst
    }
}

/// A real test function with derivatives `x^(k)(u)` up to `max_order`.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    max_order: usize,
    derivs: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.name)
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        max_order: usize,
        derivs: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            max_order,
            derivs: Arc::new(derivs),
        }
    }

    /// `sum_k coeffs[k] u^k`.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let name = format!("poly{coeffs:?}");
        TestFunction::new(name, usize::MAX, move |k, u| {
            coeffs
                .iter()
                .enumerate()
                .skip(k)
                .map(|(j, c)| c * factorial(j) / factorial(j - k) * u.powi((j - k) as i32))
                .sum()
        })
    }

    /// `sin(omega u + phase)`.
    pub fn sinusoid(omega: f64, phase: f64) -> Self {
        TestFunction::new(format!("sin({omega}u+{phase})"), usize::MAX, move |k, u| {
            omega.powi(k as i32) * (omega * u + phase + k as f64 * PI / 2.0).sin()
        })
    }

    /// `exp(r u) - shift`.
    pub fn exponential(r: f64, shift: f64) -> Self {
        TestFunction::new(format!("exp({r}u)-{shift}"), usize::MAX, move |k, u| {
            let v = r.powi(k as i32) * (r * u).exp();
            if k == 0 {
                v - shift
            } else {
                v
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.derivs)(0, u)
    }

    pub fn deriv(&self, k: usize, u: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::InvalidArgument(format!(
                "{} has no derivative of order {k}",
                self.name
            )));
        }
        Ok((self.derivs)(k, u))
    }
}

/// The Hilbert inner product a kernel is checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerProductSpec {
    /// `<x, y> = sum_{j=0}^n x^(j)(c) y^(j)(c)` on `(a, b)`.
    Taylor { a: f64, b: f64, c: f64, n: usize },
    /// `<x, y> = sum_p a_p int_a^b x^(p) y^(p)`, with a descriptive
    /// boundary condition.
    Sobolev {
        a: f64,
        b: f64,
        weights: Vec<f64>,
        boundary: String,
    },
}

impl InnerProductSpec {
    pub fn taylor(a: f64, b: f64, c: f64, n: usize) -> Result<Self> {
        interval(a, b)?.check(c)?;
        Ok(InnerProductSpec::Taylor { a, b, c, n })
    }

    pub fn sobolev(a: f64, b: f64, weights: Vec<f64>, boundary: impl Into<String>) -> Result<Self> {
        interval(a, b)?;
        if weights.is_empty()
            || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
            || weights.iter().all(|w| *w == 0.0)
        {
            return Err(Error::InvalidArgument(
                "weights must be nonnegative with at least one positive".into(),
            ));
        }
        Ok(InnerProductSpec::Sobolev {
            a,
            b,
            weights,
            boundary: boundary.into(),
        })
    }

    /// `int_a^b x' y'` on `{x(a) = 0}`.
    pub fn left_dirichlet(a: f64, b: f64) -> Result<Self> {
        Self::sobolev(a, b, vec![0.0, 1.0], "x(a) = 0")
    }

    /// `int_0^{2 pi} x' y'` on periodic functions with zero mean.
    pub fn periodic_mean_zero() -> Self {
        InnerProductSpec::Sobolev {
            a: 0.0,
            b: 2.0 * PI,
            weights: vec![0.0, 1.0],
            boundary: "x(0) = x(2 pi), mean zero".into(),
        }
    }

    fn interval(&self) -> (f64, f64) {
        match *self {
            InnerProductSpec::Taylor { a, b, .. } | InnerProductSpec::Sobolev { a, b, .. } => (a, b),
        }
    }
}

/// Composite Simpson rule with `panels` three-point panels on `[lo, hi]`.
/// The end values are taken as one-sided limits from inside the interval.
fn simpson(f: &dyn Fn(f64, Side) -> Result<f64>, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    let n = 2 * panels;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo, Side::Above)? + f(hi, Side::Below)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h, Side::Below)?;
    }
    Ok(acc * h / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReproducingCheck {
    /// `<x, H(., t)>` in the space's inner product.
    pub inner: f64,
    /// `x(t)`.
    pub target: f64,
    pub residual: f64,
}

/// Evaluates `<x, H(., t)>` and compares it with `x(t)`. Integrals are
/// composite Simpson with `quad_n` panels distributed over the pieces
/// between kernel kinks.
pub fn verify_reproducing<K: DifferentiableKernel + ?Sized>(
    kernel: &K,
    space: &InnerProductSpec,
    x: &TestFunction,
    t: f64,
    quad_n: usize,
) -> Result<ReproducingCheck> {
    let Domain::Interval { a: ka, b: kb } = kernel.domain() else {
        return Err(Error::InvalidArgument("reproducing check needs a real interval".into()));
    };
    let (sa, sb) = space.interval();
    if (ka - sa).abs() > 1e-12 || (kb - sb).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "kernel lives on ({ka}, {kb}) but the inner product on ({sa}, {sb})"
        )));
    }
    kernel.domain().check(t)?;
    let inner = match space {
        InnerProductSpec::Taylor { c, n, .. } => {
            let mut acc = 0.0;
            for j in 0..=*n {
                acc += x.deriv(j, *c)? * kernel.partial_s(j, *c, t, Side::Below)?;
            }
            acc
        }
        InnerProductSpec::Sobolev { a, b, weights, .. } => {
            if quad_n < 16 {
                return Err(Error::InvalidArgument(format!(
                    "quad_n must be at least 16, got {quad_n}"
                )));
            }
            let mut cuts = vec![*a];
            cuts.extend(kernel.kinks(t).into_iter().filter(|k| a < k && k < b));
            cuts.push(*b);
            let mut acc = 0.0;
            for (p, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let integrand =
                    |u: f64, side: Side| -> Result<f64> { Ok(x.deriv(p, u)? * kernel.partial_s(p, u, t, side)?) };
                for piece in cuts.windows(2) {
                    let share = ((piece[1] - piece[0]) / (b - a) * quad_n as f64).round() as usize;
                    acc += w * simpson(&integrand, piece[0], piece[1], share.max(1))?;
                }
            }
            acc
        }
    };
    let target = x.value(t);
    Ok(ReproducingCheck {
        inner,
        target,
        residual: (inner - target).abs(),
    })
}
