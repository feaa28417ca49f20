//! Finite tensor products over Euclidean factors.
//!
//! Order-2 tensors carry their singular values, which give the injective
//! (largest singular value), projective (sum) and Hilbert-Schmidt (root sum
//! of squares) norms exactly. For order `p > 2` only the Hilbert-Schmidt
//! norm is computed exactly; injective and projective norms come as
//! lower/upper bound pairs.

use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg;

/// Largest order accepted by the symmetrisers (`p!` terms are enumerated).
pub const MAX_SYMMETRIZE_ORDER: usize = 8;

/// Dense storage cap: `p * log2(max dim) <= 24`.
pub const MAX_STORAGE_BITS: f64 = 24.0;

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Sign of a permutation of `0..n` given as an image list.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = perm
        .iter()
        .enumerate()
        .map(|(i, a)| perm[i + 1..].iter().filter(|b| *b < a).count())
        .sum::<usize>();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorNormTag {
    Injective,
    Projective,
    #[serde(rename = "hs")]
    HilbertSchmidt,
}

impl FromStr for TensorNormTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "injective" | "epsilon" => Ok(TensorNormTag::Injective),
            "projective" | "pi" => Ok(TensorNormTag::Projective),
            "hs" | "hilbert-schmidt" => Ok(TensorNormTag::HilbertSchmidt),
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

/// Arithmetic-geometric mean, iterated until the relative gap is below `tol`.
pub fn agm(a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    if a == b || a == 0.0 || b == 0.0 {
        return if a == b { a } else { 0.0 };
    }
    for _ in 0..64 {
        if (a - b).abs() <= tol * a.abs().max(b.abs()) {
            break;
        }
        let next = (0.5 * (a + b), (a * b).sqrt());
        a = next.0;
        b = next.1;
    }
    0.5 * (a + b)
}

/// Order-2 tensor `sum_k x_k (x) y_k` stored as a row-major `rows x cols`
/// array, with cached singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    singular_values: Vec<f64>,
}

impl Tensor2 {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, entries.len())?;
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor entries must be finite".into()));
        }
        let singular_values = linalg::singular_values(&entries, rows, cols)?;
        Ok(Tensor2 {
            rows,
            cols,
            entries,
            singular_values,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2 {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
            singular_values: vec![0.0; rows.min(cols)],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Largest singular value.
    pub fn injective_norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Sum of singular values.
    pub fn projective_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::frobenius(&self.entries)
    }

    pub fn norm(&self, tag: TensorNormTag) -> f64 {
        match tag {
            TensorNormTag::Injective => self.injective_norm(),
            TensorNormTag::Projective => self.projective_norm(),
            TensorNormTag::HilbertSchmidt => self.hs_norm(),
        }
    }

    /// Arithmetic-geometric mean of the injective and projective norms.
    pub fn sigma_norm(&self, agm_tol: f64) -> Result<f64> {
        if !(agm_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "agm_tol must be positive, got {agm_tol}"
            )));
        }
        Ok(agm(self.injective_norm(), self.projective_norm(), agm_tol))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_len(self.rows, other.rows)?;
        check_len(self.cols, other.cols)?;
        Self::new(
            self.rows,
            self.cols,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Tensor2 {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
            singular_values: self.singular_values.iter().map(|s| s * factor.abs()).collect(),
        }
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            shape: vec![self.rows, self.cols],
            entries: self.entries.clone(),
        }
    }

    pub fn from_json(json: &TensorJson) -> Result<Self> {
        if json.shape.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "expected an order-2 shape, got {:?}",
                json.shape
            )));
        }
        Self::new(json.shape[0], json.shape[1], json.entries.clone())
    }
}

/// Wire format for tensors: shape plus row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub shape: Vec<usize>,
    pub entries: Vec<f64>,
}

/// Rank-one tensor `x (x) y`.
pub fn tensor2(x: &[f64], y: &[f64]) -> Tensor2 {
    let entries = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
    let nx = linalg::frobenius(x);
    let ny = linalg::frobenius(y);
    let mut singular_values = vec![0.0; x.len().min(y.len())];
    if let Some(s) = singular_values.first_mut() {
        *s = nx * ny;
    }
    Tensor2 {
        rows: x.len(),
        cols: y.len(),
        entries,
        singular_values,
    }
}

/// `x ^ y = (x (x) y - y (x) x) / 2`.
pub fn wedge2(x: &[f64], y: &[f64]) -> Result<Tensor2> {
    check_len(x.len(), y.len())?;
    let n = x.len();
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = 0.5 * (x[i] * y[j] - y[i] * x[j]);
        }
    }
    Tensor2::new(n, n, e)
}

/// `x v y = (x (x) y + y (x) x) / 2`.
pub fn vee2(x: &[f64], y: &[f64]) -> Result<Tensor2> {
    check_len(x.len(), y.len())?;
    let n = x.len();
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = 0.5 * (x[i] * y[j] + y[i] * x[j]);
        }
    }
    Tensor2::new(n, n, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    None,
    Symmetric,
    Antisymmetric,
}

/// Lower and upper bound on a norm value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// Dense order-`p` tensor with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorP {
    dims: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<f64>,
    symmetry: Symmetry,
}

impl TensorP {
    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        if let Some(&maxd) = dims.iter().max() {
            let bits = dims.len() as f64 * (maxd.max(1) as f64).log2();
            if bits > MAX_STORAGE_BITS + 1e-9 {
                return Err(Error::TooLarge {
                    what: "dense tensor storage bits",
                    size: bits.ceil() as usize,
                    limit: MAX_STORAGE_BITS as usize,
                });
            }
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let size = dims.iter().product();
        Ok(TensorP {
            dims,
            strides,
            data: vec![0.0; size],
            symmetry: Symmetry::None,
        })
    }

    /// Elementary tensor `x_1 (x) ... (x) x_p`.
    pub fn from_vectors(vectors: &[&[f64]]) -> Result<Self> {
        let mut t = Self::zeros(vectors.iter().map(|v| v.len()).collect())?;
        for (flat, slot) in t.data.iter_mut().enumerate() {
            let mut rem = flat;
            let mut prod = 1.0;
            for (k, v) in vectors.iter().enumerate() {
                let i = rem / t.strides[k];
                rem %= t.strides[k];
                prod *= v[i];
            }
            *slot = prod;
        }
        Ok(t)
    }

    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for (k, s) in self.strides.iter().enumerate() {
            idx[k] = flat / s;
            flat %= s;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// `out[i_1, ..., i_p] = self[i_perm(1), ..., i_perm(p)]`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        let p = self.order();
        check_len(p, perm.len())?;
        if !perm.iter().copied().sorted().eq(0..p) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        if perm.iter().enumerate().any(|(k, &j)| self.dims[k] != self.dims[j]) {
            return Err(Error::InvalidArgument(
                "slot permutation must preserve dimensions".into(),
            ));
        }
        let mut out = Self::zeros(self.dims.clone())?;
        let mut idx = vec![0; p];
        let mut src = vec![0; p];
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            for k in 0..p {
                src[k] = idx[perm[k]];
            }
            out.data[flat] = self.get(&src);
        }
        Ok(out)
    }

    fn project(&self, signed: bool) -> Result<Self> {
        let p = self.order();
        if p > MAX_SYMMETRIZE_ORDER {
            return Err(Error::TooLarge {
                what: "symmetrisation order",
                size: p,
                limit: MAX_SYMMETRIZE_ORDER,
            });
        }
        if !self.dims.iter().all_equal() {
            return Err(Error::InvalidArgument(
                "symmetrisation needs equal slot dimensions".into(),
            ));
        }
        let mut out = Self::zeros(self.dims.clone())?;
        let norm = 1.0 / factorial(p);
        for perm in (0..p).permutations(p) {
            let sign = if signed { permutation_sign(&perm) } else { 1.0 };
            let moved = self.permute_slots(&perm)?;
            for (o, v) in out.data.iter_mut().zip(&moved.data) {
                *o += sign * norm * v;
            }
        }
        Ok(out.with_symmetry(if signed {
            Symmetry::Antisymmetric
        } else {
            Symmetry::Symmetric
        }))
    }

    /// `(1/p!) sum_sigma T o sigma`.
    pub fn symmetrize(&self) -> Result<Self> {
        self.project(false)
    }

    /// `(1/p!) sum_sigma sgn(sigma) T o sigma`.
    pub fn antisymmetrize(&self) -> Result<Self> {
        self.project(true)
    }

    /// Euclidean pairing of two tensors of the same shape.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::InvalidArgument("tensor shapes differ".into()));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::frobenius(&self.data)
    }

    /// Flattening that keeps `slot` as rows and groups the other slots as
    /// columns.
    pub fn matricize(&self, slot: usize) -> Result<Tensor2> {
        let p = self.order();
        if slot >= p {
            return Err(Error::InvalidArgument(format!(
                "slot {slot} out of range for order {p}"
            )));
        }
        let rows = self.dims[slot];
        let cols = self.data.len() / rows.max(1);
        let mut perm: Vec<usize> = vec![slot];
        perm.extend((0..p).filter(|&k| k != slot));
        let mut e = vec![0.0; rows * cols];
        let mut idx = vec![0; p];
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            let r = idx[slot];
            let mut c = 0;
            for &k in &perm[1..] {
                c = c * self.dims[k] + idx[k];
            }
            e[r * cols + c] = self.data[flat];
        }
        Tensor2::new(rows, cols, e)
    }

    /// Contraction of every slot except `skip` against `vectors`.
    fn contract_except(&self, skip: usize, vectors: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[skip]];
        let mut idx = vec![0; self.order()];
        for (flat, &v) in self.data.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.unflatten(flat, &mut idx);
            let mut prod = v;
            for (k, u) in vectors.iter().enumerate() {
                if k != skip {
                    prod *= u[idx[k]];
                }
            }
            out[idx[skip]] += prod;
        }
        out
    }

    /// Bounds on the injective norm `sup |T(u_1, ..., u_p)|` over unit
    /// vectors. The lower bound is attained by alternating maximisation
    /// started from the largest entries; the upper bound is the smallest
    /// spectral norm over single-slot flattenings.
    pub fn injective_bounds(&self, max_iter: usize) -> Result<Bounds> {
        let p = self.order();
        if p == 0 {
            let v = self.data[0].abs();
            return Ok(Bounds { lower: v, upper: v });
        }
        let mut upper = f64::INFINITY;
        for slot in 0..p {
            upper = upper.min(self.matricize(slot)?.injective_norm());
        }
        let starts: Vec<usize> = (0..self.data.len())
            .sorted_by(|&a, &b| self.data[b].abs().total_cmp(&self.data[a].abs()))
            .take(4)
            .collect();
        let mut lower: f64 = 0.0;
        let mut idx = vec![0; p];
        for start in starts {
            self.unflatten(start, &mut idx);
            let mut us: Vec<Vec<f64>> = (0..p)
                .map(|k| {
                    let mut u = vec![0.0; self.dims[k]];
                    u[idx[k]] = 1.0;
                    u
                })
                .collect();
            let mut value = self.data[start].abs();
            for _ in 0..max_iter {
                for k in 0..p {
                    let g = self.contract_except(k, &us);
                    let n = linalg::frobenius(&g);
                    if n > 0.0 {
                        us[k] = g.into_iter().map(|x| x / n).collect();
                    }
                }
                let g = self.contract_except(p - 1, &us);
                let next: f64 = g.iter().zip(&us[p - 1]).map(|(a, b)| a * b).sum::<f64>().abs();
                let done = (next - value).abs() <= 1e-15 * next.max(1e-300);
                value = next;
                if done {
                    break;
                }
            }
            lower = lower.max(value);
        }
        Ok(Bounds {
            lower: lower.min(upper),
            upper,
        })
    }

    /// Bounds on the projective norm. The lower bound is the largest nuclear
    /// norm over single-slot flattenings; the upper bound is the sum of
    /// absolute entries (the decomposition into basis elementary tensors).
    pub fn projective_bounds(&self) -> Result<Bounds> {
        let upper: f64 = self.data.iter().map(|v| v.abs()).sum();
        if self.order() == 0 {
            return Ok(Bounds { lower: upper, upper });
        }
        let mut lower: f64 = 0.0;
        for slot in 0..self.order() {
            lower = lower.max(self.matricize(slot)?.projective_norm());
        }
        Ok(Bounds {
            lower: lower.min(upper),
            upper,
        })
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            shape: self.dims.clone(),
            entries: self.data.clone(),
        }
    }
}

/// Shell enumeration of `N* x N*`:
/// `J_l = (1,l) (2,l) ... (l,l) (l,l-1) ... (l,1)`, concatenated for
/// `l = 1..=l_max`.
pub fn enumerate_shells(l_max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(l_max * l_max);
    for l in 1..=l_max {
        out.extend((1..=l).map(|j| (j, l)));
        out.extend((1..l).rev().map(|k| (l, k)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqNorm {
    L1,
    L2,
}

impl FromStr for SeqNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(SeqNorm::L1),
            "l2" => Ok(SeqNorm::L2),
            other => Err(Error::UnsupportedTag(other.to_string())),
        }
    }
}

/// Finite coefficient model of a Schauder expansion `x = sum_j alpha_j e_j`
/// in `l^1` or `l^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSequence {
    pub coeffs: Vec<f64>,
    pub norm: SeqNorm,
}

impl CoeffSequence {
    pub fn new(coeffs: Vec<f64>, norm: SeqNorm) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(CoeffSequence { coeffs, norm })
    }

    /// `alpha_j = scale * ratio^j` for `j = 1..=len`.
    pub fn geometric(scale: f64, ratio: f64, len: usize, norm: SeqNorm) -> Self {
        CoeffSequence {
            coeffs: (1..=len).map(|j| scale * ratio.powi(j as i32)).collect(),
            norm,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_value(&self) -> f64 {
        seq_norm(&self.coeffs, self.norm)
    }

    /// `beta_n` (head of length `n`) and the ambient norm of the tail
    /// `rho_n`.
    pub fn schauder_truncate(&self, n: usize) -> (CoeffSequence, f64) {
        let cut = n.min(self.coeffs.len());
        let head = CoeffSequence {
            coeffs: self.coeffs[..cut].to_vec(),
            norm: self.norm,
        };
        (head, seq_norm(&self.coeffs[cut..], self.norm))
    }

    fn head_tail_l2(&self, n: usize) -> (f64, f64) {
        let cut = n.min(self.coeffs.len());
        (
            seq_norm(&self.coeffs[..cut], SeqNorm::L2),
            seq_norm(&self.coeffs[cut..], SeqNorm::L2),
        )
    }
}

fn seq_norm(c: &[f64], norm: SeqNorm) -> f64 {
    match norm {
        SeqNorm::L1 => c.iter().map(|v| v.abs()).sum(),
        SeqNorm::L2 => linalg::frobenius(c),
    }
}

/// Right-hand side of the remainder bound for `x (x) y - A_n(x, y)`:
/// `|head_n x| |tail_n y| + |tail_n x| |head_n y| + |tail_n x| |tail_n y|`.
pub fn tensor_basis_truncation_error(x: &CoeffSequence, y: &CoeffSequence, n: usize) -> Result<f64> {
    if x.norm != SeqNorm::L2 || y.norm != SeqNorm::L2 {
        return Err(Error::InvalidArgument("the remainder bound needs l2 sequences".into()));
    }
    let (hx, tx) = x.head_tail_l2(n);
    let (hy, ty) = y.head_tail_l2(n);
    Ok(hx * ty + tx * hy + tx * ty)
}

/// The remainder `R_n(x, y) = x (x) y - A_n(x, y)` as an explicit array.
pub fn truncation_remainder(x: &CoeffSequence, y: &CoeffSequence, n: usize) -> Result<Tensor2> {
    let (r, c) = (x.len(), y.len());
    let mut e = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            if i >= n || j >= n {
                e[i * c + j] = x.coeffs[i] * y.coeffs[j];
            }
        }
    }
    Tensor2::new(r, c, e)
}
