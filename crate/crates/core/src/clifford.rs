//! Clifford algebra `C(E, q)` over an orthogonal frame.
//!
//! A blade is a product of distinct generators in increasing order and is
//! encoded as a bit mask: bit `i` set means generator `e_{i+1}` is present.
//! The metric is diagonal, `e_j e_j = diag[j]`, and distinct generators
//! anticommute.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::tensor::{self, Tensor2, TensorNormTag, TensorP};

/// Coefficients with magnitude below this are dropped after every
/// arithmetic operation.
pub const PRUNE_TOL: f64 = 1e-14;

pub const MAX_GENERATORS: usize = 24;

pub type BladeMask = u32;

pub fn grade(mask: BladeMask) -> usize {
    mask.count_ones() as usize
}

/// Generator indices (1-based, increasing) of a blade.
pub fn blade_generators(mask: BladeMask) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

pub fn mask_from_generators(gens: &[usize]) -> Result<BladeMask> {
    let mut mask = 0;
    for &g in gens {
        if g == 0 || g > MAX_GENERATORS {
            return Err(Error::InvalidArgument(format!("generator index {g} out of range")));
        }
        let bit = 1 << (g - 1);
        if mask & bit != 0 {
            return Err(Error::InvalidArgument(format!("generator e{g} repeated")));
        }
        mask |= bit;
    }
    Ok(mask)
}

/// Product of two basis blades: returns the scalar factor (reordering sign
/// times the contracted metric entries) and the resulting blade.
pub fn blade_product(a: BladeMask, b: BladeMask, diag: &[f64]) -> (f64, BladeMask) {
    // Each generator of b moves left past every generator of a with a
    // larger index.
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    let mut factor = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut common = a & b;
    while common != 0 {
        let j = common.trailing_zeros() as usize;
        factor *= diag[j];
        common &= common - 1;
    }
    (factor, a ^ b)
}

/// An orthogonal quadratic space: `n` generators with `e_j^2 = diag[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordSpace {
    n: usize,
    diag: Vec<f64>,
}

impl CliffordSpace {
    pub fn new(diag: Vec<f64>) -> Result<Arc<Self>> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a Clifford space needs at least one generator".into(),
            ));
        }
        if n > MAX_GENERATORS {
            return Err(Error::TooLarge {
                what: "generator count",
                size: n,
                limit: MAX_GENERATORS,
            });
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("metric entries must be finite".into()));
        }
        Ok(Arc::new(CliffordSpace { n, diag }))
    }

    pub fn euclidean(n: usize) -> Result<Arc<Self>> {
        Self::new(vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn blade_count(&self) -> usize {
        1 << self.n
    }

    /// Rescales every generator `e_j -> e_j / sqrt(|diag[j]|)` so the metric
    /// becomes `+-1`. Fails if any metric entry is zero.
    pub fn normalized(&self) -> Result<Arc<Self>> {
        if self.diag.contains(&0.0) {
            return Err(Error::InvalidArgument("cannot normalise a zero metric entry".into()));
        }
        Self::new(self.diag.iter().map(|d| d.signum()).collect())
    }
}

/// Sparse element of `C(E, q)`: blade mask to coefficient, zeros omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    space: Arc<CliffordSpace>,
    terms: BTreeMap<BladeMask, f64>,
}

impl Multivector {
    pub fn zero(space: &Arc<CliffordSpace>) -> Self {
        Multivector {
            space: Arc::clone(space),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(space: &Arc<CliffordSpace>, c: f64) -> Self {
        Self::blade(space, 0, c).expect("scalar blade is always valid")
    }

    pub fn blade(space: &Arc<CliffordSpace>, mask: BladeMask, c: f64) -> Result<Self> {
        if (mask as usize) >= space.blade_count() {
            return Err(Error::InvalidArgument(format!(
                "blade mask {mask:#b} needs more than {} generators",
                space.n
            )));
        }
        let mut m = Self::zero(space);
        m.insert(mask, c);
        Ok(m)
    }

    /// The generator `e_j` (1-based).
    pub fn generator(space: &Arc<CliffordSpace>, j: usize) -> Result<Self> {
        if j == 0 || j > space.n {
            return Err(Error::InvalidArgument(format!(
                "generator e{j} not in a space of dimension {}",
                space.n
            )));
        }
        Self::blade(space, 1 << (j - 1), 1.0)
    }

    /// Grade-1 element `sum_j x_j e_j`.
    pub fn from_vector(space: &Arc<CliffordSpace>, x: &[f64]) -> Result<Self> {
        check_len(space.n, x.len())?;
        let mut m = Self::zero(space);
        for (j, &c) in x.iter().enumerate() {
            m.insert(1 << j, c);
        }
        Ok(m)
    }

    pub fn from_terms(space: &Arc<CliffordSpace>, terms: impl IntoIterator<Item = (BladeMask, f64)>) -> Result<Self> {
        let mut m = Self::zero(space);
        for (mask, c) in terms {
            if (mask as usize) >= space.blade_count() {
                return Err(Error::InvalidArgument(format!("blade mask {mask:#b} out of range")));
            }
            m.accumulate(mask, c);
        }
        m.prune();
        Ok(m)
    }

    fn insert(&mut self, mask: BladeMask, c: f64) {
        if c.abs() >= PRUNE_TOL {
            self.terms.insert(mask, c);
        }
    }

    fn accumulate(&mut self, mask: BladeMask, c: f64) {
        *self.terms.entry(mask).or_insert(0.0) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= PRUNE_TOL);
    }

    pub fn space(&self) -> &Arc<CliffordSpace> {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (BladeMask, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: BladeMask) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.coefficient(0)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m, c);
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in self.terms() {
            out.insert(m, c * factor);
        }
        out
    }

    /// The Clifford product.
    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let diag = &self.space.diag;
        let mut out = Self::zero(&self.space);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let (f, m) = blade_product(a, b, diag);
                if f != 0.0 {
                    out.accumulate(m, f * ca * cb);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Exterior product: for each pair of blades, the grade `r + s` part of
    /// their product. It is nonzero only for disjoint blades, where the
    /// metric plays no role.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut out = Self::zero(&self.space);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b != 0 {
                    continue;
                }
                let (f, m) = blade_product(a, b, &self.space.diag);
                out.accumulate(m, f * ca * cb);
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn grade_project(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in self.terms() {
            if grade(m) == k {
                out.insert(m, c);
            }
        }
        out
    }

    /// Grades present, ascending.
    pub fn grades(&self) -> Vec<usize> {
        self.terms().map(|(m, _)| grade(m)).sorted().dedup().collect()
    }

    /// Reversion: reverses the order of generators in every blade.
    pub fn reverse(&self) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in self.terms() {
            let k = grade(m);
            let sign = if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out.insert(m, sign * c);
        }
        out
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.terms().fold(0.0, |m, (_, c)| f64::max(m, c.abs())))
    }

    /// Re-expresses the element in the normalised generators
    /// `f_j = e_j / sqrt(|diag[j]|)`, whose squares are `+-1`.
    pub fn to_normalized(&self) -> Result<Self> {
        let space = self.space.normalized()?;
        let mut out = Self::zero(&space);
        for (m, c) in self.terms() {
            let scale: f64 = blade_generators(m)
                .into_iter()
                .map(|g| self.space.diag[g - 1].abs().sqrt())
                .product();
            out.insert(m, c * scale);
        }
        Ok(out)
    }

    /// The grade-`k` part as an order-`k` antisymmetric tensor over `R^n`:
    /// the blade `e_{i1} ... e_{ik}` maps to
    /// `(1/k!) sum_sigma sgn(sigma) e_{i_sigma(1)} (x) ... (x) e_{i_sigma(k)}`.
    pub fn grade_tensor(&self, k: usize) -> Result<TensorP> {
        let n = self.space.n;
        let mut t = TensorP::zeros(vec![n; k])?;
        if k == 0 {
            t.set(&[], self.scalar_part());
            return Ok(t.with_symmetry(tensor::Symmetry::Antisymmetric));
        }
        let norm = 1.0 / tensor::factorial(k);
        for (m, c) in self.terms() {
            if grade(m) != k {
                continue;
            }
            let gens: Vec<usize> = blade_generators(m).into_iter().map(|g| g - 1).collect();
            for perm in (0..k).permutations(k) {
                let idx: Vec<usize> = perm.iter().map(|&p| gens[p]).collect();
                let sign = tensor::permutation_sign(&perm);
                t.set(&idx, sign * c * norm);
            }
        }
        Ok(t.with_symmetry(tensor::Symmetry::Antisymmetric))
    }

    /// Gradewise tensor norm: every homogeneous part is embedded as an
    /// antisymmetric tensor and measured with `gamma` over Euclidean factors,
    /// and the grade norms are summed.
    ///
    /// Grades 0 to 2 are exact. For grade 3 and above the Hilbert-Schmidt
    /// value is exact, the injective value is a rank-1 lower bound found by
    /// alternating maximisation, and the projective value is the rank-1
    /// upper bound `sum |c_I|` (each unit blade has projective norm one).
    pub fn norm_gamma(&self, nu: VectorNorm, gamma: TensorNormTag) -> Result<f64> {
        let VectorNorm::Euclidean = nu;
        let mut total = 0.0;
        for k in self.grades() {
            let part = self.grade_project(k);
            total += match k {
                0 => part.scalar_part().abs(),
                1 => part.terms().map(|(_, c)| c * c).sum::<f64>().sqrt(),
                2 => {
                    let n = self.space.n;
                    let mut a = vec![0.0; n * n];
                    for (m, c) in part.terms() {
                        let g = blade_generators(m);
                        let (i, j) = (g[0] - 1, g[1] - 1);
                        a[i * n + j] = 0.5 * c;
                        a[j * n + i] = -0.5 * c;
                    }
                    Tensor2::new(n, n, a)?.norm(gamma)
                }
                _ => match gamma {
                    TensorNormTag::HilbertSchmidt => {
                        (part.terms().map(|(_, c)| c * c).sum::<f64>() / tensor::factorial(k)).sqrt()
                    }
                    TensorNormTag::Projective => part.terms().map(|(_, c)| c.abs()).sum(),
                    TensorNormTag::Injective => {
                        let t = part.grade_tensor(k)?;
                        t.injective_bounds(200)?.lower
                    }
                },
            };
        }
        Ok(total)
    }

    pub fn to_json(&self) -> MultivectorJson {
        MultivectorJson {
            n: self.space.n,
            diag: self.space.diag.clone(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    blades: blade_generators(m),
                    c,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MultivectorJson) -> Result<Self> {
        check_len(json.n, json.diag.len())?;
        let space = CliffordSpace::new(json.diag.clone())?;
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            if !t.blades.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "blade {:?} is not in increasing generator order",
                    t.blades
                )));
            }
            terms.push((mask_from_generators(&t.blades)?, t.c));
        }
        Self::from_terms(&space, terms)
    }

    /// Parses expressions such as `1 + 2*e1 - 0.5*e1e3 + e2*e1`. A product
    /// of generators is evaluated with the Clifford product, so `e2e1`
    /// equals `-e1e2` in any metric. Numeric factors must be separated from
    /// generators by `*`.
    pub fn parse(space: &Arc<CliffordSpace>, expr: &str) -> Result<Self> {
        let cleaned: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut out = Self::zero(space);
        for (sign, term) in split_terms(&cleaned)? {
            let mut value = Self::scalar(space, sign);
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in `{term}`")));
                }
                let f = if let Ok(c) = f64::from_str(factor) {
                    Self::scalar(space, c)
                } else {
                    parse_generator_word(space, factor)?
                };
                value = value.geometric_product(&f)?;
            }
            out = out.try_add(&value)?;
        }
        Ok(out)
    }
}

fn split_terms(s: &str) -> Result<Vec<(f64, &str)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut sign = 1.0;
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+') | Some(b'-')) {
        sign = if bytes[0] == b'-' { -1.0 } else { 1.0 };
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        let c = bytes[i];
        let exponent = i >= 2
            && matches!(bytes[i - 1], b'e' | b'E')
            && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.')
            && !is_generator_digit(bytes, i - 2);
        if (c == b'+' || c == b'-') && !exponent {
            if i == start {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            out.push((sign, &s[start..i]));
            sign = if c == b'-' { -1.0 } else { 1.0 };
            start = i + 1;
        }
        i += 1;
    }
    if start >= s.len() {
        return Err(Error::Parse(format!("dangling sign in `{s}`")));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

// True when the digit at `pos` belongs to a generator index such as `e12`.
fn is_generator_digit(bytes: &[u8], pos: usize) -> bool {
    let mut j = pos;
    while j > 0 && bytes[j].is_ascii_digit() {
        j -= 1;
    }
    bytes[j] == b'e' || bytes[j] == b'E'
}

fn parse_generator_word(space: &Arc<CliffordSpace>, word: &str) -> Result<Multivector> {
    let mut value = Multivector::scalar(space, 1.0);
    let mut rest = word;
    if rest == "1" {
        return Ok(value);
    }
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('e')
            .ok_or_else(|| Error::Parse(format!("unexpected token `{rest}`")))?;
        let digits = body.chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return Err(Error::Parse(format!("generator without index in `{word}`")));
        }
        let j: usize = body[..digits]
            .parse()
            .map_err(|_| Error::Parse(format!("bad generator index in `{word}`")))?;
        value = value.geometric_product(&Multivector::generator(space, j)?)?;
        rest = &body[digits..];
    }
    Ok(value)
}

/// Norm on the underlying vector space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorNorm {
    Euclidean,
}

impl FromStr for VectorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(VectorNorm::Euclidean),
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub blades: Vec<usize>,
    pub c: f64,
}

/// Wire format: `{"n": n, "diag": [...], "terms": [{"blades": [1, 3], "c": 0.5}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivectorJson {
    pub n: usize,
    pub diag: Vec<f64>,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            for g in blade_generators(m) {
                write!(f, "*e{g}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    /// Panics if the operands live in different spaces; use
    /// [`Multivector::try_add`] to get an error instead.
    fn add(self, rhs: Self) -> Multivector {
        self.try_add(rhs).expect("multivector space mismatch")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: Self) -> Multivector {
        self.try_sub(rhs).expect("multivector space mismatch")
    }
}

impl Mul for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Self) -> Multivector {
        self.geometric_product(rhs).expect("multivector space mismatch")
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}
