//! Schwartz kernels of tensor products and of the symmetric and
//! antisymmetric Fock spaces built over a base kernel.
//!
//! For elementary elements of order `m` the pairings reduce to functions of
//! the `m x m` Gram matrix `G[j][k] = <E a*_j, b*_k>`: the plain product of
//! its diagonal for the full tensor power, `perm(G)/m!` for the symmetric
//! power and `det(G)/m!` for the antisymmetric power.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::kernels::Kernel;
use crate::linalg;
use crate::scalar::Scalar;
use crate::tensor::factorial;

/// Largest order accepted by [`permanent`].
pub const MAX_RYSER_ORDER: usize = 20;
/// Largest order accepted by [`permanent_naive`].
pub const MAX_NAIVE_ORDER: usize = 8;

/// `(a*, b*) -> <E a*, b*>`.
pub type Pairing<F, S> = Arc<dyn Fn(&F, &F) -> Result<S> + Send + Sync>;

/// Pairing of point evaluations through a kernel:
/// `<E delta_s, delta_t> = H(t, s)`.
pub fn point_evaluation_pairing<K>(kernel: Arc<K>) -> Pairing<K::Scalar, K::Scalar>
where
    K: Kernel + ?Sized + 'static,
{
    Arc::new(move |s: &K::Scalar, t: &K::Scalar| kernel.eval(*t, *s))
}

/// Square Gram matrix of pairings, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelGram<S> {
    pub m: usize,
    pub entries: Vec<S>,
}

impl<S: Scalar> KernelGram<S> {
    pub fn new(m: usize, entries: Vec<S>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("a Gram matrix needs order at least 1".into()));
        }
        check_len(m * m, entries.len())?;
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("Gram entries must be finite".into()));
        }
        Ok(KernelGram { m, entries })
    }

    pub fn get(&self, j: usize, k: usize) -> S {
        self.entries[j * self.m + k]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.entries.chunks(self.m).map(|r| r.to_vec()).collect()
    }
}

/// `G[j][k] = pairing(as[j], bs[k])`.
pub fn kernel_gram<F, S: Scalar>(pairing: &Pairing<F, S>, a_s: &[F], b_s: &[F]) -> Result<KernelGram<S>> {
    check_len(a_s.len(), b_s.len())?;
    let m = a_s.len();
    let mut entries = Vec::with_capacity(m * m);
    for a in a_s {
        for b in b_s {
            entries.push(pairing(a, b)?);
        }
    }
    KernelGram::new(m, entries)
}

fn check_square<S>(m: &[S], n: usize) -> Result<()> {
    check_len(n * n, m.len())
}

/// Permanent by Ryser's inclusion-exclusion formula with Gray-code subset
/// order, `O(2^n n)`.
pub fn permanent<S: Scalar>(a: &[S], n: usize) -> Result<S> {
    check_square(a, n)?;
    if n > MAX_RYSER_ORDER {
        return Err(Error::TooLarge {
            what: "permanent order",
            size: n,
            limit: MAX_RYSER_ORDER,
        });
    }
    match n {
        0 => return Ok(S::one()),
        1 => return Ok(a[0]),
        _ => {}
    }
    // row_sums[i] = sum_{j in subset} a[i][j]
    let mut row_sums = vec![S::zero(); n];
    let mut total = S::zero();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let flipped = (next ^ gray).trailing_zeros() as usize;
        let added = next & (1 << flipped) != 0;
        for (i, rs) in row_sums.iter_mut().enumerate() {
            if added {
                *rs += a[i * n + flipped];
            } else {
                *rs -= a[i * n + flipped];
            }
        }
        gray = next;
        let mut prod = S::one();
        for &rs in &row_sums {
            prod *= rs;
        }
        if (n - next.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// Literal sum over all permutations; the oracle for [`permanent`].
pub fn permanent_naive<S: Scalar>(a: &[S], n: usize) -> Result<S> {
    check_square(a, n)?;
    if n > MAX_NAIVE_ORDER {
        return Err(Error::TooLarge {
            what: "naive permanent order",
            size: n,
            limit: MAX_NAIVE_ORDER,
        });
    }
    let mut total = S::zero();
    for perm in itertools::Itertools::permutations(0..n, n) {
        let mut prod = S::one();
        for (i, &j) in perm.iter().enumerate() {
            prod *= a[i * n + j];
        }
        total += prod;
    }
    Ok(total)
}

fn has_repeated_line<S: Scalar>(a: &[S], n: usize) -> bool {
    let row = |i: usize| &a[i * n..(i + 1) * n];
    let col_eq = |j: usize, k: usize| (0..n).all(|i| a[i * n + j] == a[i * n + k]);
    (0..n).any(|j| (j + 1..n).any(|k| row(j) == row(k) || col_eq(j, k)))
}

/// Determinant of the Gram matrix. Two identical rows or columns give an
/// exact zero; orders up to 3 use cofactors and larger ones pivoted
/// elimination.
pub fn gram_determinant<S: Scalar>(g: &KernelGram<S>) -> S {
    if has_repeated_line(&g.entries, g.m) {
        return S::zero();
    }
    linalg::determinant(&g.entries, g.m)
}

/// `perm(G) / m!`.
pub fn sym_fock_kernel<S: Scalar>(g: &KernelGram<S>) -> Result<S> {
    Ok(permanent(&g.entries, g.m)? * S::from_f64(1.0 / factorial(g.m)))
}

/// `det(G) / m!`.
pub fn antisym_fock_kernel<S: Scalar>(g: &KernelGram<S>) -> S {
    gram_determinant(g) * S::from_f64(1.0 / factorial(g.m))
}

/// `<(E1 (x) E2)(a1 (x) a2), b1 (x) b2> = <E1 a1, b1> <E2 a2, b2>`.
pub fn tensor_kernel_product<F1, F2, S>(p1: Pairing<F1, S>, p2: Pairing<F2, S>) -> Pairing<(F1, F2), S>
where
    F1: 'static,
    F2: 'static,
    S: Scalar,
{
    Arc::new(move |a: &(F1, F2), b: &(F1, F2)| Ok(p1(&a.0, &b.0)? * p2(&a.1, &b.1)?))
}

/// The `m`-fold product of pairings on elementary tensors `a_1 (x) ... (x) a_m`
/// given as slices of factors.
pub fn tensor_kernel_power<F, S>(factors: Vec<Pairing<F, S>>) -> Pairing<Vec<F>, S>
where
    F: 'static,
    S: Scalar,
{
    Arc::new(move |a: &Vec<F>, b: &Vec<F>| {
        check_len(factors.len(), a.len())?;
        check_len(factors.len(), b.len())?;
        let mut acc = S::one();
        for ((p, x), y) in factors.iter().zip(a).zip(b) {
            acc *= p(x, y)?;
        }
        Ok(acc)
    })
}

/// Which Fock space a block kernel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FockSymmetry {
    /// Full tensor powers.
    Tensor,
    /// Symmetric powers.
    Sym,
    /// Antisymmetric powers.
    Antisym,
}

impl FromStr for FockSymmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tensor" | "otimes" => Ok(FockSymmetry::Tensor),
            "sym" | "vee" => Ok(FockSymmetry::Sym),
            "antisym" | "wedge" => Ok(FockSymmetry::Antisym),
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

impl fmt::Display for FockSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FockSymmetry::Tensor => "tensor",
            FockSymmetry::Sym => "sym",
            FockSymmetry::Antisym => "antisym",
        })
    }
}

/// Block-diagonal kernel on the Fock space truncated at order `m_max`:
/// the scalar `1` on order 0, the order-`k` power kernel on order `k`, and
/// exactly zero between different orders.
#[derive(Clone)]
pub struct FockKernelBlock<F, S> {
    pub m_max: usize,
    pub symmetry: FockSymmetry,
    pairing: Pairing<F, S>,
}

impl<F, S> fmt::Debug for FockKernelBlock<F, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockKernelBlock")
            .field("m_max", &self.m_max)
            .field("symmetry", &self.symmetry)
            .finish()
    }
}

pub fn gamma_block<F, S: Scalar>(
    pairing: Pairing<F, S>,
    m_max: usize,
    symmetry: FockSymmetry,
) -> FockKernelBlock<F, S> {
    FockKernelBlock {
        m_max,
        symmetry,
        pairing,
    }
}

impl<F, S: Scalar> FockKernelBlock<F, S> {
    /// Pairing of the elementary elements `a_1 * ... * a_p` and
    /// `b_1 * ... * b_q`, where `*` is the product of the block's symmetry.
    pub fn eval(&self, a_s: &[F], b_s: &[F]) -> Result<S> {
        let order = a_s.len().max(b_s.len());
        if order > self.m_max {
            return Err(Error::InvalidArgument(format!(
                "order {order} exceeds the truncation order {}",
                self.m_max
            )));
        }
        if a_s.len() != b_s.len() {
            return Ok(S::zero());
        }
        if a_s.is_empty() {
            return Ok(S::one());
        }
        match self.symmetry {
            FockSymmetry::Tensor => {
                let mut acc = S::one();
                for (a, b) in a_s.iter().zip(b_s) {
                    acc *= (self.pairing)(a, b)?;
                }
                Ok(acc)
            }
            FockSymmetry::Sym => sym_fock_kernel(&kernel_gram(&self.pairing, a_s, b_s)?),
            FockSymmetry::Antisym => Ok(antisym_fock_kernel(&kernel_gram(&self.pairing, a_s, b_s)?)),
        }
    }

    /// Diagonal block values `block_k(points[..k], points[..k])` for
    /// `k = 0..=m_max`.
    pub fn diagonal(&self, points: &[F]) -> Result<Vec<S>> {
        if points.len() < self.m_max {
            return Err(Error::InvalidArgument(format!(
                "need {} points for the diagonal, got {}",
                self.m_max,
                points.len()
            )));
        }
        (0..=self.m_max)
            .map(|k| self.eval(&points[..k], &points[..k]))
            .collect()
    }

    /// Full matrix of pairings between a list of elementary elements of
    /// mixed orders.
    pub fn matrix(&self, elements: &[Vec<F>]) -> Result<Vec<S>> {
        let mut out = Vec::with_capacity(elements.len() * elements.len());
        for a in elements {
            for b in elements {
                out.push(self.eval(a, b)?);
            }
        }
        Ok(out)
    }
}
