//! C interface to `cliffkern`.
//!
//! Objects are handed out as opaque pointers and released with the matching
//! `*_free` function. Every call returns a [`CkStatus`]; on failure the
//! message is available from [`ck_last_error`] on the same thread. Strings
//! returned by the library are released with [`ck_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use cliffkern::calculus::{Builtin, Functional};
use cliffkern::clifford::{self, CliffordSpace, Multivector};
use cliffkern::fock_kernels::{self, FockSymmetry};
use cliffkern::kernels::{self, Boundary, DifferentiableKernel, FourierForm, FourierKernel, PolyKernel, SobolevKernel};
use cliffkern::quadratic::QuadraticForm;
use cliffkern::tensor::Tensor2;
use cliffkern::{ledger, Error};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    DimensionMismatch = 3,
    NotSymmetric = 4,
    NoConvergence = 5,
    IterationLimit = 6,
    Singular = 7,
    Degenerate = 8,
    OutsideDomain = 9,
    SpaceMismatch = 10,
    TooLarge = 11,
    InvalidArgument = 12,
    UnsupportedTag = 13,
    Parse = 14,
    Panic = 15,
}

/// Symmetry class of a Fock kernel.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkSymmetry {
    Tensor = 0,
    Sym = 1,
    Antisym = 2,
}

/// Boundary condition of the discrete Green operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkBoundary {
    Dirichlet = 0,
    Neumann = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkSignature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkTensorNorms {
    pub injective: f64,
    pub projective: f64,
    pub hs: f64,
    pub sigma: f64,
}

pub struct CkQuadraticForm(QuadraticForm);

pub struct CkCliffordSpace(Arc<CliffordSpace>);

pub struct CkMultivector(Multivector);

pub struct CkFunctional(Functional);

pub struct CkKernel(Arc<dyn DifferentiableKernel>);

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CkStatus {
    match e {
        Error::DimensionMismatch { .. } => CkStatus::DimensionMismatch,
        Error::NotSymmetric { .. } => CkStatus::NotSymmetric,
        Error::NoConvergence { .. } => CkStatus::NoConvergence,
        Error::IterationLimit { .. } => CkStatus::IterationLimit,
        Error::Singular => CkStatus::Singular,
        Error::Degenerate(_) => CkStatus::Degenerate,
        Error::OutsideDomain { .. } => CkStatus::OutsideDomain,
        Error::SpaceMismatch => CkStatus::SpaceMismatch,
        Error::TooLarge { .. } => CkStatus::TooLarge,
        Error::InvalidArgument(_) => CkStatus::InvalidArgument,
        Error::UnsupportedTag(_) => CkStatus::UnsupportedTag,
        Error::Parse(_) => CkStatus::Parse,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CkStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed as `{what}`"));
            CkStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            CkStatus::InvalidUtf8
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            CkStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Lib(Error::InvalidArgument("string contains a NUL byte".into())))
}

fn check_len(expected: usize, got: usize) -> Result<(), Failure> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got }.into())
    }
}

// ---- general ---------------------------------------------------------------

/// Message of the last failed call on this thread, or NULL. The pointer is
/// owned by the library and stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ck_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- quadratic forms -------------------------------------------------------

/// Symmetric form from a row-major `dim x dim` matrix.
#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_new(dim: usize, coeffs: *const f64, out: *mut *mut CkQuadraticForm) -> CkStatus {
    guard(|| {
        let c = input(coeffs, dim * dim, "coeffs")?;
        let q = QuadraticForm::new(dim, c.to_vec())?;
        write(out, boxed(CkQuadraticForm(q)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_free(q: *mut CkQuadraticForm) {
    free(q)
}

#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_dim(q: *const CkQuadraticForm) -> usize {
    q.as_ref().map_or(0, |q| q.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_eval(
    q: *const CkQuadraticForm,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> CkStatus {
    guard(|| {
        let q = obj(q, "q")?;
        let v = q.0.eval_q(input(x, len, "x")?)?;
        write(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_polarize(
    q: *const CkQuadraticForm,
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> CkStatus {
    guard(|| {
        let q = obj(q, "q")?;
        let v = q.0.polarize(input(x, len, "x")?, input(y, len, "y")?)?;
        write(out, v, "out")
    })
}

/// Signature with the default relative zero tolerance.
#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_signature(q: *const CkQuadraticForm, out: *mut CkSignature) -> CkStatus {
    guard(|| {
        let s = obj(q, "q")?.0.default_signature()?;
        write(
            out,
            CkSignature {
                n_plus: s.n_plus,
                n_minus: s.n_minus,
                n_zero: s.n_zero,
            },
            "out",
        )
    })
}

/// Eigenvalues (length `dim`) and optionally the eigenvectors, vector `k`
/// in row `k` of a row-major `dim x dim` array.
#[no_mangle]
pub unsafe extern "C" fn ck_quadratic_diagonalize(
    q: *const CkQuadraticForm,
    values: *mut f64,
    vectors: *mut f64,
) -> CkStatus {
    guard(|| {
        let q = obj(q, "q")?;
        let n = q.0.dim();
        let eig = q.0.diagonalize()?;
        output(values, n, "values")?.copy_from_slice(&eig.values);
        if !vectors.is_null() {
            let flat: Vec<f64> = eig.vectors.concat();
            output(vectors, n * n, "vectors")?.copy_from_slice(&flat);
        }
        Ok(())
    })
}

// ---- clifford --------------------------------------------------------------

/// Clifford space with generator squares `diag[0..n]`.
#[no_mangle]
pub unsafe extern "C" fn ck_clifford_space_new(diag: *const f64, n: usize, out: *mut *mut CkCliffordSpace) -> CkStatus {
    guard(|| {
        let space = CliffordSpace::new(input(diag, n, "diag")?.to_vec())?;
        write(out, boxed(CkCliffordSpace(space)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_clifford_space_free(space: *mut CkCliffordSpace) {
    free(space)
}

#[no_mangle]
pub unsafe extern "C" fn ck_clifford_space_dim(space: *const CkCliffordSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.n())
}

#[no_mangle]
pub unsafe extern "C" fn ck_clifford_space_blade_count(space: *const CkCliffordSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.blade_count())
}

/// Parses expressions such as `1 + 2*e1e2 - e3`.
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_parse(
    space: *const CkCliffordSpace,
    expr: *const c_char,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    guard(|| {
        let space = obj(space, "space")?;
        let mv = Multivector::parse(&space.0, text(expr, "expr")?)?;
        write(out, boxed(CkMultivector(mv)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_from_vector(
    space: *const CkCliffordSpace,
    x: *const f64,
    len: usize,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    guard(|| {
        let space = obj(space, "space")?;
        let mv = Multivector::from_vector(&space.0, input(x, len, "x")?)?;
        write(out, boxed(CkMultivector(mv)), "out")
    })
}

/// `c e_B` for the blade whose generators are the set bits of `mask`
/// (bit 0 is `e1`).
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_blade(
    space: *const CkCliffordSpace,
    mask: u32,
    c: f64,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    guard(|| {
        let space = obj(space, "space")?;
        let mv = Multivector::blade(&space.0, mask, c)?;
        write(out, boxed(CkMultivector(mv)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_free(mv: *mut CkMultivector) {
    free(mv)
}

unsafe fn binary(
    a: *const CkMultivector,
    b: *const CkMultivector,
    out: *mut *mut CkMultivector,
    op: fn(&Multivector, &Multivector) -> cliffkern::Result<Multivector>,
) -> CkStatus {
    guard(|| {
        let r = op(&obj(a, "a")?.0, &obj(b, "b")?.0)?;
        write(out, boxed(CkMultivector(r)), "out")
    })
}

/// Geometric product `a b`.
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_mul(
    a: *const CkMultivector,
    b: *const CkMultivector,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    binary(a, b, out, Multivector::geometric_product)
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_wedge(
    a: *const CkMultivector,
    b: *const CkMultivector,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    binary(a, b, out, Multivector::wedge)
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_add(
    a: *const CkMultivector,
    b: *const CkMultivector,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    binary(a, b, out, Multivector::try_add)
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_sub(
    a: *const CkMultivector,
    b: *const CkMultivector,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    binary(a, b, out, Multivector::try_sub)
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_reverse(a: *const CkMultivector, out: *mut *mut CkMultivector) -> CkStatus {
    guard(|| {
        let r = obj(a, "a")?.0.reverse();
        write(out, boxed(CkMultivector(r)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_multivector_grade(
    a: *const CkMultivector,
    k: usize,
    out: *mut *mut CkMultivector,
) -> CkStatus {
    guard(|| {
        let r = obj(a, "a")?.0.grade_project(k);
        write(out, boxed(CkMultivector(r)), "out")
    })
}

/// Coefficient of the blade `mask`; 0 for blades not present.
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_coefficient(a: *const CkMultivector, mask: u32, out: *mut f64) -> CkStatus {
    guard(|| {
        let c = obj(a, "a")?.0.coefficient(mask);
        write(out, c, "out")
    })
}

/// Number of stored (nonzero) terms.
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_len(a: *const CkMultivector) -> usize {
    a.as_ref().map_or(0, |a| a.0.len())
}

/// Grade of a blade mask.
#[no_mangle]
pub extern "C" fn ck_blade_grade(mask: u32) -> usize {
    clifford::grade(mask)
}

/// JSON form `{"n":..,"diag":[..],"terms":[{"blades":[..],"c":..}]}`,
/// released with `ck_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ck_multivector_to_json(a: *const CkMultivector, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let a = obj(a, "a")?;
        let s = serde_json::to_string(&a.0.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
        write(out, owned_string(s)?, "out")
    })
}

// ---- calculus --------------------------------------------------------------

/// Built-in functional by name (`power`, `double_well`, `minkowski`).
/// `p` is ignored when NaN and `n` when 0.
#[no_mangle]
pub unsafe extern "C" fn ck_functional_builtin(
    name: *const c_char,
    p: f64,
    n: usize,
    out: *mut *mut CkFunctional,
) -> CkStatus {
    guard(|| {
        let name = text(name, "name")?;
        let p = (!p.is_nan()).then_some(p);
        let n = (n != 0).then_some(n);
        let f = Builtin::from_name(name, p, n)?.build()?;
        write(out, boxed(CkFunctional(f)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_functional_free(f: *mut CkFunctional) {
    free(f)
}

#[no_mangle]
pub unsafe extern "C" fn ck_functional_dim(f: *const CkFunctional) -> usize {
    f.as_ref().map_or(0, |f| f.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn ck_functional_eval(
    f: *const CkFunctional,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> CkStatus {
    guard(|| {
        let v = obj(f, "f")?.0.eval(input(y, len, "y")?)?;
        write(out, v, "out")
    })
}

/// `x* = f'(y)` (written to `x_star[0..len]`) and `z* = f(y) - <y, x*>`.
#[no_mangle]
pub unsafe extern "C" fn ck_functional_legendre_point(
    f: *const CkFunctional,
    y: *const f64,
    len: usize,
    x_star: *mut f64,
    z_star: *mut f64,
) -> CkStatus {
    guard(|| {
        let lp = obj(f, "f")?.0.legendre_point(input(y, len, "y")?)?;
        output(x_star, len, "x_star")?.copy_from_slice(&lp.x_star);
        write(z_star, lp.z_star, "z_star")
    })
}

/// Solves `f'(y) = x*` by damped Newton from `start` (or `x*` when NULL).
#[no_mangle]
pub unsafe extern "C" fn ck_functional_legendre_invert(
    f: *const CkFunctional,
    x_star: *const f64,
    start: *const f64,
    len: usize,
    tol: f64,
    max_iter: usize,
    y: *mut f64,
) -> CkStatus {
    guard(|| {
        let x = input(x_star, len, "x_star")?;
        let seed = if start.is_null() {
            x
        } else {
            input(start, len, "start")?
        };
        let sol = obj(f, "f")?.0.legendre_invert(x, seed, tol, max_iter)?;
        output(y, len, "y")?.copy_from_slice(&sol);
        Ok(())
    })
}

/// Row-major `(f*)''(x*)` by differences of `z*` and `(f''(y))^-1`, each
/// `len x len`. Either output may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ck_functional_legendre_hessians(
    f: *const CkFunctional,
    y: *const f64,
    len: usize,
    fstar_hess: *mut f64,
    inverse_hess: *mut f64,
) -> CkStatus {
    guard(|| {
        let pair = obj(f, "f")?.0.legendre_hessian_pair(input(y, len, "y")?)?;
        if !fstar_hess.is_null() {
            output(fstar_hess, len * len, "fstar_hess")?.copy_from_slice(pair.fstar_hess.coeffs());
        }
        if !inverse_hess.is_null() {
            output(inverse_hess, len * len, "inverse_hess")?.copy_from_slice(pair.inverse_hess.coeffs());
        }
        Ok(())
    })
}

// ---- tensors ---------------------------------------------------------------

/// Injective, projective, Hilbert-Schmidt and AGM norms of a row-major
/// `rows x cols` tensor.
#[no_mangle]
pub unsafe extern "C" fn ck_tensor2_norms(
    rows: usize,
    cols: usize,
    entries: *const f64,
    out: *mut CkTensorNorms,
) -> CkStatus {
    guard(|| {
        let t = Tensor2::new(rows, cols, input(entries, rows * cols, "entries")?.to_vec())?;
        let norms = CkTensorNorms {
            injective: t.injective_norm(),
            projective: t.projective_norm(),
            hs: t.hs_norm(),
            sigma: t.sigma_norm(1e-15)?,
        };
        write(out, norms, "out")
    })
}

// ---- kernels ---------------------------------------------------------------

fn kernel_out(k: impl DifferentiableKernel + 'static, out: *mut *mut CkKernel) -> Result<(), Failure> {
    unsafe { write(out, boxed(CkKernel(Arc::new(k))), "out") }
}

/// Polynomial kernel of degree `n` expanded at `c` on `[a, b]`.
#[no_mangle]
pub unsafe extern "C" fn ck_kernel_poly(a: f64, b: f64, c: f64, n: usize, out: *mut *mut CkKernel) -> CkStatus {
    guard(|| kernel_out(PolyKernel::new(a, b, c, n)?, out))
}

/// `min(s - a, t - a)` on `[a, b]`.
#[no_mangle]
pub unsafe extern "C" fn ck_kernel_sobolev(a: f64, b: f64, out: *mut *mut CkKernel) -> CkStatus {
    guard(|| kernel_out(SobolevKernel::new(a, b)?, out))
}

/// Periodic kernel `kappa * sum_p cos(p (t - s)) / p^2` on `[0, 2 pi]`;
/// `terms = 0` selects the closed form.
#[no_mangle]
pub unsafe extern "C" fn ck_kernel_fourier(kappa: f64, terms: usize, out: *mut *mut CkKernel) -> CkStatus {
    guard(|| {
        let form = if terms == 0 {
            FourierForm::Closed
        } else {
            FourierForm::Series(terms)
        };
        kernel_out(FourierKernel::new(kappa, form)?, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_kernel_free(k: *mut CkKernel) {
    free(k)
}

#[no_mangle]
pub unsafe extern "C" fn ck_kernel_eval(k: *const CkKernel, s: f64, t: f64, out: *mut f64) -> CkStatus {
    guard(|| {
        let v = obj(k, "k")?.0.eval(s, t)?;
        write(out, v, "out")
    })
}

/// Row-major `m x m` Gram matrix `H(p_i, p_j)`.
#[no_mangle]
pub unsafe extern "C" fn ck_kernel_gram(k: *const CkKernel, points: *const f64, m: usize, out: *mut f64) -> CkStatus {
    guard(|| {
        let g = kernels::gram(obj(k, "k")?.0.as_ref(), input(points, m, "points")?)?;
        output(out, m * m, "out")?.copy_from_slice(&g);
        Ok(())
    })
}

/// Fock kernel of the point evaluations `a[0..m]` and `b[0..m]` with
/// pairing `H(t, s)`.
#[no_mangle]
pub unsafe extern "C" fn ck_kernel_fock(
    k: *const CkKernel,
    a: *const f64,
    b: *const f64,
    m: usize,
    symmetry: CkSymmetry,
    out: *mut f64,
) -> CkStatus {
    guard(|| {
        let k = obj(k, "k")?;
        let pairing = fock_kernels::point_evaluation_pairing(k.0.clone());
        let sym = match symmetry {
            CkSymmetry::Tensor => FockSymmetry::Tensor,
            CkSymmetry::Sym => FockSymmetry::Sym,
            CkSymmetry::Antisym => FockSymmetry::Antisym,
        };
        let block = fock_kernels::gamma_block(pairing, m, sym);
        let v = block.eval(input(a, m, "a")?, input(b, m, "b")?)?;
        write(out, v, "out")
    })
}

/// Discrete Green kernel of `sum_p (-1)^p w_p d^{2p}/dx^{2p}` on `m`
/// interior nodes of `[a, b]`. Writes `m` nodes and the row-major `m x m`
/// kernel values.
#[no_mangle]
pub unsafe extern "C" fn ck_green_matrix_1d(
    weights: *const f64,
    n_weights: usize,
    a: f64,
    b: f64,
    m: usize,
    bc: CkBoundary,
    nodes: *mut f64,
    values: *mut f64,
) -> CkStatus {
    guard(|| {
        let bc = match bc {
            CkBoundary::Dirichlet => Boundary::Dirichlet,
            CkBoundary::Neumann => Boundary::Neumann,
        };
        let g = kernels::green_matrix_1d(input(weights, n_weights, "weights")?, a, b, m, bc)?;
        check_len(m, g.m)?;
        output(nodes, m, "nodes")?.copy_from_slice(&g.nodes);
        output(values, m * m, "values")?.copy_from_slice(&g.values);
        Ok(())
    })
}

// ---- permanents ------------------------------------------------------------

/// Permanent of a row-major `n x n` matrix (Ryser).
#[no_mangle]
pub unsafe extern "C" fn ck_permanent(a: *const f64, n: usize, out: *mut f64) -> CkStatus {
    guard(|| {
        let v = fock_kernels::permanent(input(a, n * n, "a")?, n)?;
        write(out, v, "out")
    })
}

// ---- ledger ----------------------------------------------------------------

/// Oracle verdicts on the printed formulas as JSON, released with
/// `ck_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ck_ledger_json(seed: u64, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let report = ledger::run(seed);
        let s = serde_json::to_string(&report).map_err(|e| Error::Parse(e.to_string()))?;
        write(out, owned_string(s)?, "out")
    })
}
