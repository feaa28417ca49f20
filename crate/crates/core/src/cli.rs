//! Command-line front end.
//!
//! [`run`] parses arguments, executes the command and renders the output
//! without touching the process, so the binary is a thin wrapper and tests
//! can drive it in-process. Successful JSON output always carries a
//! `"schema"` field. Failures print `{"schema", "error": {"kind",
//! "message"}}` on stdout and exit with 1, or with 2 when the failure is a
//! malformed argument.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::calculus::{Builtin, Functional, NEWTON_MAX_ITER, NEWTON_TOL};
use crate::clifford::{CliffordSpace, Multivector, VectorNorm};
use crate::error::{check_len, Error, Result};
use crate::fock_kernels::{self, FockSymmetry, Pairing, MAX_RYSER_ORDER};
use crate::kernels::{
    self, BergmanPrinted, BergmanSeries, Boundary, DifferentiableKernel, Domain, FourierForm, FourierKernel,
    GreenMatrix, InnerProductSpec, Kernel, LogKernel, LogPattern, PolyKernel, SobolevKernel, TestFunction,
};
use crate::ledger;
use crate::quadratic::QuadraticForm;
use crate::scalar::Scalar;
use crate::tensor::{self, CoeffSequence, SeqNorm, Tensor2, TensorNormTag, TensorP};

#[derive(Debug, Parser)]
#[command(
    name = "cliffkern",
    version,
    about = "Clifford algebras of quadratic forms, tensor norms and reproducing kernels"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub output: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadratic forms: evaluation, polarization, signature.
    Quadratic {
        #[command(subcommand)]
        op: QuadraticOp,
    },
    /// Multivector arithmetic in a diagonal-metric Clifford algebra.
    Clifford {
        #[command(subcommand)]
        op: CliffordOp,
    },
    /// Legendre transform of the built-in functionals.
    Legendre {
        #[command(subcommand)]
        op: LegendreOp,
    },
    /// Tensor norms, shell enumeration and Schauder truncation.
    Tensor {
        #[command(subcommand)]
        op: TensorOp,
    },
    /// Reproducing kernels: evaluation, Gram matrices, reproducing check.
    Kernel {
        #[command(subcommand)]
        op: KernelOp,
    },
    /// Fock-space kernels of point evaluations.
    Fock(FockCmd),
    /// Oracle verdicts on the printed formulas.
    Ledger,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    /// Symmetric matrix, rows separated by `;`, e.g. `1,0;0,-1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "diag")]
    pub matrix: Option<String>,
    /// Diagonal matrix entries.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub diag: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum QuadraticOp {
    /// `q(x)`.
    Eval {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
    },
    /// `b(x, y)` with `b(x, x) = q(x)`.
    Polarize {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Counts of positive, negative and zero eigenvalues.
    Signature {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        zero_tol: Option<f64>,
    },
    /// Eigenvalues and orthonormal eigenvectors.
    Diagonalize {
        #[command(flatten)]
        form: FormArgs,
    },
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Number of generators.
    #[arg(long)]
    pub n: usize,
    /// Squares of the generators (default all 1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub diag: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum CliffordOp {
    /// Geometric product `a b`.
    Mul {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Exterior product `a ^ b`.
    Wedge {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Add {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Sub {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Reversion.
    Reverse {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Grade-`k` part.
    Grade {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        k: usize,
    },
    /// Gradewise tensor norm.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// injective | projective | hs
        #[arg(long, default_value = "hs")]
        tag: String,
        #[arg(long, default_value = "euclidean")]
        nu: String,
    },
    /// All blades with their squares.
    Basis {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Randomized anticommutation and associativity residuals.
    Check {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
pub struct FunctionalArgs {
    /// power | double_well | minkowski
    #[arg(long = "f")]
    pub f: String,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

impl FunctionalArgs {
    fn build(&self) -> Result<Functional> {
        Builtin::from_name(&self.f, self.p, self.n)?.build()
    }
}

#[derive(Debug, Subcommand)]
pub enum LegendreOp {
    /// `(y, f'(y), f(y) - <y, f'(y)>)`.
    Point {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Legendre points on a product grid over `[lo, hi]^n`.
    Grid {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        hi: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 9)]
        m: usize,
    },
    /// Solves `f'(y) = x*` by damped Newton.
    Invert {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long = "x-star", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x_star: Vec<f64>,
        /// Newton start (default `x*`).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        start: Option<Vec<f64>>,
        #[arg(long, default_value_t = NEWTON_TOL)]
        tol: f64,
        #[arg(long, default_value_t = NEWTON_MAX_ITER)]
        max_iter: usize,
    },
    /// `(f*)''` by differences of `z*` next to `(f'')^-1`.
    Hessian {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Tangent hyperplane of the graph at `y`.
    Tangent {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Clifford algebra of `f''(y)` in its eigenframe.
    Clifford {
        #[command(flatten)]
        f: FunctionalArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TensorOp {
    /// Norms of an order-2 tensor, given by entries or as `x (x) y`.
    Norms {
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        entries: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-15)]
        agm_tol: f64,
    },
    /// Injective and projective bounds for an order-p tensor.
    Bounds {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        entries: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Shell enumeration of index pairs up to `lmax`.
    Shells {
        #[arg(long)]
        lmax: usize,
    },
    /// Remainder of the basis truncation for geometric sequences.
    Truncation {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        scale: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        ratio: f64,
        #[arg(long, default_value_t = 40)]
        len: usize,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Randomized check of the norm inequalities.
    Check {
        #[arg(long, default_value_t = 500)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Poly,
    Sobolev,
    Fourier,
    Green1d,
    Bergman,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Printed,
    Pinned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BergmanForm {
    Series,
    Printed,
}

/// Kernel parameters; each kernel reads the ones it needs.
#[derive(Debug, Clone, Args)]
pub struct KernelParams {
    /// Left end of the interval.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Right end of the interval.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Expansion point (poly).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Degree (poly).
    #[arg(long)]
    pub n: Option<usize>,
    /// printed | basis | <number> (fourier).
    #[arg(long)]
    pub kappa: Option<String>,
    /// Series terms (fourier, bergman).
    #[arg(long)]
    pub terms: Option<usize>,
    /// Disc radius (bergman, log).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Pinned point, e.g. `0.3-0.2i` (log).
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    /// Sign pattern (log).
    #[arg(long, value_enum)]
    pub pattern: Option<PatternArg>,
    /// Series or printed closed form (bergman).
    #[arg(long, value_enum)]
    pub form: Option<BergmanForm>,
    /// Operator weights a_0..a_alpha (green1d).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// dirichlet | neumann (green1d).
    #[arg(long)]
    pub bc: Option<String>,
    /// Interior nodes used when green1d is evaluated off the grid.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum KernelOp {
    /// `H(s, t)` at a point pair, or an m x m table with `--grid m`.
    Eval {
        #[arg(long, value_enum)]
        name: KernelName,
        #[command(flatten)]
        params: KernelParams,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Quadrature check of `<x, H(., t)> = x(t)`.
    Verify {
        #[arg(long, value_enum)]
        name: KernelName,
        #[command(flatten)]
        params: KernelParams,
        /// `poly:c0,c1,..`, `sin:omega,phase` or `exp:r,shift`; repeatable.
        #[arg(long = "test", allow_hyphen_values = true)]
        tests: Vec<String>,
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
        ts: Vec<f64>,
        #[arg(long, default_value_t = kernels::DEFAULT_QUAD_N)]
        quad_n: usize,
    },
    /// Gram matrix on a point set with its smallest eigenvalue.
    Gram {
        #[arg(long, value_enum)]
        name: KernelName,
        #[command(flatten)]
        params: KernelParams,
        #[arg(long, allow_hyphen_values = true)]
        points: String,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct FockCmd {
    #[command(subcommand)]
    pub sub: Option<FockSub>,
    #[command(flatten)]
    pub eval: FockEvalArgs,
}

#[derive(Debug, Args)]
pub struct FockEvalArgs {
    #[arg(long, value_enum)]
    pub pairing: Option<KernelName>,
    #[command(flatten)]
    pub params: KernelParams,
    /// Points of the evaluation functionals `a*`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Points of `b*` (default: same as `--points`).
    #[arg(long = "points-b", allow_hyphen_values = true)]
    pub points_b: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    /// tensor | sym | antisym (also otimes, vee, wedge).
    #[arg(long, default_value = "tensor")]
    pub symmetry: String,
}

#[derive(Debug, Subcommand)]
pub enum FockSub {
    /// Diagonal blocks of the truncated Fock kernel for orders 0..=mmax.
    Gamma {
        #[arg(long, value_enum)]
        pairing: KernelName,
        #[command(flatten)]
        params: KernelParams,
        #[arg(long)]
        mmax: usize,
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Restrict to one symmetry (default: all three).
        #[arg(long)]
        symmetry: Option<String>,
    },
}

/// Exit status and rendered streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.exit_code() == 0 {
                RunResult {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                RunResult {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli).and_then(|out| out.render(cli.output)) {
        Ok(stdout) => RunResult {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => RunResult {
            code: exit_code(&e),
            stdout: error_json(&e),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::UnsupportedTag(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

fn error_json(e: &Error) -> String {
    let v = json!({
        "schema": "cliffkern.error/1",
        "error": {"kind": e.kind(), "message": e.to_string()},
    });
    format!("{v}\n")
}

pub fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Quadratic { op } => quadratic(op),
        Command::Clifford { op } => clifford(op, cli.seed),
        Command::Legendre { op } => legendre(op),
        Command::Tensor { op } => tensor_cmd(op, cli.seed),
        Command::Kernel { op } => kernel(op),
        Command::Fock(cmd) => fock(cmd),
        Command::Ledger => {
            let report = ledger::run(cli.seed);
            let rows = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.id.clone(),
                        to_value(&e.verdict).as_str().unwrap_or_default().to_string(),
                        e.printed_value.to_string(),
                        e.oracle_value.to_string(),
                    ]
                })
                .collect();
            Ok(Output {
                json: to_value(&report),
                table: Some(Table::new(&["id", "verdict", "printed_value", "oracle_value"], rows)),
            })
        }
    }
}

/// A JSON document plus an optional tabular CSV rendering. Without a
/// table, CSV output lists the JSON leaves as `path,value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Empty for a bare numeric table.
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        }
    }
}

impl Output {
    fn new(kind: &str, body: Value) -> Self {
        let mut map = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        map.insert("schema".into(), json!(format!("cliffkern.{kind}/1")));
        Output {
            json: Value::Object(map),
            table: None,
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(format!("{}\n", self.json)),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
                let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
                match &self.table {
                    Some(t) => {
                        if !t.header.is_empty() {
                            w.write_record(&t.header).map_err(csv_err)?;
                        }
                        for row in &t.rows {
                            w.write_record(row).map_err(csv_err)?;
                        }
                    }
                    None => {
                        let mut leaves = Vec::new();
                        flatten("", &self.json, &mut leaves);
                        for (k, v) in leaves {
                            w.write_record([k, v]).map_err(csv_err)?;
                        }
                    }
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
                String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn num(v: f64) -> String {
    Value::from(v).to_string()
}

/// CSV cell for a real or complex scalar; complex values print as `a+bi`.
fn cell<S: Scalar>(v: S) -> String {
    if S::IS_COMPLEX {
        let (re, im) = (v.re(), v.im());
        let sign = if im.is_sign_negative() { "-" } else { "+" };
        format!("{}{sign}{}i", num(re), num(im.abs()))
    } else {
        num(v.re())
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    f64::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a number: `{s}`")))
}

fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

fn parse_complex(s: &str) -> Result<Complex64> {
    Complex64::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a complex number: `{s}`")))
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_real_list).collect()
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl FormArgs {
    fn build(&self) -> Result<QuadraticForm> {
        match (&self.matrix, &self.diag) {
            (Some(m), None) => QuadraticForm::from_rows(&parse_matrix(m)?),
            (None, Some(d)) => QuadraticForm::diagonal(d),
            _ => Err(usage("give the form with --matrix or --diag")),
        }
    }
}

fn quadratic(op: &QuadraticOp) -> Result<Output> {
    match op {
        QuadraticOp::Eval { form, x } => {
            let q = form.build()?;
            Ok(Output::new("quadratic.eval", json!({"q": q.eval_q(x)?})))
        }
        QuadraticOp::Polarize { form, x, y } => {
            let q = form.build()?;
            Ok(Output::new("quadratic.polarize", json!({"b": q.polarize(x, y)?})))
        }
        QuadraticOp::Signature { form, zero_tol } => {
            let q = form.build()?;
            let tol = match zero_tol {
                Some(t) => *t,
                None => q.default_zero_tol()?,
            };
            let sig = q.signature(tol)?;
            let values = q.diagonalize()?.values.clone();
            Ok(Output::new(
                "quadratic.signature",
                json!({
                    "n_plus": sig.n_plus,
                    "n_minus": sig.n_minus,
                    "n_zero": sig.n_zero,
                    "zero_tol": tol,
                    "eigenvalues": values,
                }),
            ))
        }
        QuadraticOp::Diagonalize { form } => {
            let q = form.build()?;
            let e = q.diagonalize()?;
            let rows = e
                .values
                .iter()
                .zip(&e.vectors)
                .map(|(v, vec)| std::iter::once(num(*v)).chain(vec.iter().map(|x| num(*x))).collect())
                .collect();
            let mut header = vec!["eigenvalue".to_string()];
            header.extend((1..=q.dim()).map(|i| format!("v{i}")));
            Ok(Output::new(
                "quadratic.diagonalize",
                json!({"values": e.values, "vectors": e.vectors}),
            )
            .with_table(Table { header, rows }))
        }
    }
}

impl SpaceArgs {
    fn build(&self) -> Result<Arc<CliffordSpace>> {
        let diag = self.diag.clone().unwrap_or_else(|| vec![1.0; self.n]);
        check_len(self.n, diag.len())?;
        CliffordSpace::new(diag)
    }
}

fn mv_output(kind: &str, m: &Multivector) -> Output {
    let rows = m
        .terms()
        .map(|(mask, c)| {
            let blades = crate::clifford::blade_generators(mask)
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>();
            vec![blades.join(" "), num(c)]
        })
        .collect();
    let mut body = to_value(&m.to_json());
    if let Value::Object(map) = &mut body {
        map.insert("text".into(), json!(m.to_string()));
    }
    Output::new(kind, body).with_table(Table::new(&["blades", "c"], rows))
}

fn random_multivector(space: &Arc<CliffordSpace>, rng: &mut ChaCha8Rng) -> Result<Multivector> {
    let mut terms = Vec::with_capacity(space.blade_count());
    for mask in 0..space.blade_count() {
        terms.push((mask as u32, rng.gen_range(-1.0..1.0)));
    }
    Multivector::from_terms(space, terms)
}

fn clifford(op: &CliffordOp, seed: u64) -> Result<Output> {
    match op {
        CliffordOp::Mul { space, a, b }
        | CliffordOp::Wedge { space, a, b }
        | CliffordOp::Add { space, a, b }
        | CliffordOp::Sub { space, a, b } => {
            let sp = space.build()?;
            let x = Multivector::parse(&sp, a)?;
            let y = Multivector::parse(&sp, b)?;
            let (kind, r) = match op {
                CliffordOp::Mul { .. } => ("clifford.mul", x.geometric_product(&y)?),
                CliffordOp::Wedge { .. } => ("clifford.wedge", x.wedge(&y)?),
                CliffordOp::Add { .. } => ("clifford.add", x.try_add(&y)?),
                _ => ("clifford.sub", x.try_sub(&y)?),
            };
            Ok(mv_output(kind, &r))
        }
        CliffordOp::Reverse { space, a } => {
            let sp = space.build()?;
            Ok(mv_output("clifford.reverse", &Multivector::parse(&sp, a)?.reverse()))
        }
        CliffordOp::Grade { space, a, k } => {
            let sp = space.build()?;
            Ok(mv_output(
                "clifford.grade",
                &Multivector::parse(&sp, a)?.grade_project(*k),
            ))
        }
        CliffordOp::Norm { space, a, tag, nu } => {
            let sp = space.build()?;
            let x = Multivector::parse(&sp, a)?;
            let tag = TensorNormTag::from_str(tag)?;
            let value = x.norm_gamma(VectorNorm::from_str(nu)?, tag)?;
            Ok(Output::new(
                "clifford.norm",
                json!({"tag": to_value(&tag), "norm": value}),
            ))
        }
        CliffordOp::Basis { space } => {
            let sp = space.build()?;
            let mut blades = Vec::new();
            let mut rows = Vec::new();
            for mask in 0..sp.blade_count() as u32 {
                let e = Multivector::blade(&sp, mask, 1.0)?;
                let square = e.geometric_product(&e)?.scalar_part();
                let gens = crate::clifford::blade_generators(mask);
                rows.push(vec![
                    gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "),
                    crate::clifford::grade(mask).to_string(),
                    num(square),
                ]);
                blades.push(json!({"blades": gens, "grade": crate::clifford::grade(mask), "square": square}));
            }
            Ok(Output::new(
                "clifford.basis",
                json!({"n": sp.n(), "diag": sp.diag(), "blade_count": sp.blade_count(), "blades": blades}),
            )
            .with_table(Table::new(&["blades", "grade", "square"], rows)))
        }
        CliffordOp::Check { space, trials } => {
            if space.n > 10 {
                return Err(usage(format!("check supports n <= 10, got {}", space.n)));
            }
            let sp = space.build()?;
            let form = QuadraticForm::diagonal(sp.diag())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut anti, mut assoc): (f64, f64) = (0.0, 0.0);
            for _ in 0..*trials {
                let x: Vec<f64> = (0..sp.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..sp.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let vx = Multivector::from_vector(&sp, &x)?;
                let vy = Multivector::from_vector(&sp, &y)?;
                let lhs = vx.geometric_product(&vy)?.try_add(&vy.geometric_product(&vx)?)?;
                let rhs = Multivector::scalar(&sp, 2.0 * form.polarize(&x, &y)?);
                anti = anti.max(lhs.max_abs_diff(&rhs)?);
                let a = random_multivector(&sp, &mut rng)?;
                let b = random_multivector(&sp, &mut rng)?;
                let c = random_multivector(&sp, &mut rng)?;
                let left = a.geometric_product(&b)?.geometric_product(&c)?;
                let right = a.geometric_product(&b.geometric_product(&c)?)?;
                assoc = assoc.max(left.max_abs_diff(&right)?);
            }
            Ok(Output::new(
                "clifford.check",
                json!({
                    "n": sp.n(),
                    "diag": sp.diag(),
                    "trials": trials,
                    "seed": seed,
                    "blade_count": sp.blade_count(),
                    "anticommutation_residual": anti,
                    "associativity_residual": assoc,
                }),
            ))
        }
    }
}

fn legendre_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    h.extend((1..=n).map(|i| format!("x_star{i}")));
    h.push("z_star".into());
    h
}

fn legendre_row(p: &crate::calculus::LegendrePoint) -> Vec<String> {
    p.y.iter()
        .chain(&p.x_star)
        .chain(std::iter::once(&p.z_star))
        .map(|v| num(*v))
        .collect()
}

fn legendre(op: &LegendreOp) -> Result<Output> {
    match op {
        LegendreOp::Point { f, y } => {
            let func = f.build()?;
            let p = func.legendre_point(y)?;
            let table = Table {
                header: legendre_header(func.dim()),
                rows: vec![legendre_row(&p)],
            };
            Ok(Output::new("legendre.point", to_value(&p)).with_table(table))
        }
        LegendreOp::Grid { f, lo, hi, m } => {
            let func = f.build()?;
            let n = func.dim();
            if *m < 1 || !(lo < hi) {
                return Err(usage("need m >= 1 and lo < hi"));
            }
            let count = (*m as f64).powi(n as i32);
            if count > 1e5 {
                return Err(Error::TooLarge {
                    what: "grid points",
                    size: count as usize,
                    limit: 100_000,
                });
            }
            let axis: Vec<f64> = if *m == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..*m).map(|i| lo + (hi - lo) * i as f64 / (*m - 1) as f64).collect()
            };
            let mut points = Vec::new();
            let mut skipped = 0usize;
            let mut idx = vec![0usize; n];
            'grid: loop {
                let y: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
                if func.contains(&y) {
                    points.push(func.legendre_point(&y)?);
                } else {
                    skipped += 1;
                }
                for k in (0..n).rev() {
                    idx[k] += 1;
                    if idx[k] < *m {
                        continue 'grid;
                    }
                    idx[k] = 0;
                }
                break;
            }
            let table = Table {
                header: legendre_header(n),
                rows: points.iter().map(legendre_row).collect(),
            };
            Ok(Output::new(
                "legendre.grid",
                json!({"function": func.name(), "points": to_value(&points), "skipped": skipped}),
            )
            .with_table(table))
        }
        LegendreOp::Invert {
            f,
            x_star,
            start,
            tol,
            max_iter,
        } => {
            let func = f.build()?;
            let start = start.clone().unwrap_or_else(|| x_star.clone());
            let y = func.legendre_invert(x_star, &start, *tol, *max_iter)?;
            let p = func.legendre_point(&y)?;
            let residual = p
                .x_star
                .iter()
                .zip(x_star)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let z_star = func.eval(&y)? - y.iter().zip(x_star).map(|(a, b)| a * b).sum::<f64>();
            Ok(Output::new(
                "legendre.invert",
                json!({"x_star": x_star, "y": y, "z_star": z_star, "gradient_residual": residual}),
            ))
        }
        LegendreOp::Hessian { f, y } => {
            let func = f.build()?;
            let pair = func.legendre_hessian_pair(y)?;
            Ok(Output::new(
                "legendre.hessian",
                json!({
                    "y": y,
                    "hessian": func.hessian(y, None)?.rows(),
                    "fstar_hess": pair.fstar_hess.rows(),
                    "inverse_hess": pair.inverse_hess.rows(),
                    "reciprocity_residual": pair.reciprocity_residual(),
                    "unsigned_residual": pair.unsigned_residual(),
                }),
            ))
        }
        LegendreOp::Tangent { f, y } => {
            let func = f.build()?;
            Ok(Output::new("legendre.tangent", to_value(&func.tangent_hyperplane(y)?)))
        }
        LegendreOp::Clifford { f, y } => {
            let func = f.build()?;
            let hc = func.clifford_at(y)?;
            Ok(Output::new(
                "legendre.clifford",
                json!({
                    "y": y,
                    "signature": to_value(&hc.signature),
                    "diag": hc.space.diag(),
                    "frame": hc.frame,
                }),
            ))
        }
    }
}

fn tensor_from_entries(dims: &[usize], entries: &[f64]) -> Result<TensorP> {
    let mut t = TensorP::zeros(dims.to_vec())?;
    check_len(t.data().len(), entries.len())?;
    let mut idx = vec![0usize; dims.len()];
    for &v in entries {
        t.set(&idx, v);
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(t)
}

fn norms_json(t: &Tensor2, agm_tol: f64) -> Result<Value> {
    Ok(json!({
        "shape": [t.rows(), t.cols()],
        "singular_values": t.singular_values(),
        "injective": t.injective_norm(),
        "projective": t.projective_norm(),
        "hs": t.hs_norm(),
        "sigma": t.sigma_norm(agm_tol)?,
    }))
}

fn tensor_cmd(op: &TensorOp, seed: u64) -> Result<Output> {
    match op {
        TensorOp::Norms {
            rows,
            cols,
            entries,
            x,
            y,
            agm_tol,
        } => {
            let t = match (rows, cols, entries, x, y) {
                (Some(r), Some(c), Some(e), None, None) => Tensor2::new(*r, *c, e.clone())?,
                (None, None, None, Some(x), Some(y)) => tensor::tensor2(x, y),
                _ => return Err(usage("give --rows --cols --entries, or --x --y")),
            };
            Ok(Output::new("tensor.norms", norms_json(&t, *agm_tol)?))
        }
        TensorOp::Bounds {
            dims,
            entries,
            max_iter,
        } => {
            let t = tensor_from_entries(dims, entries)?;
            Ok(Output::new(
                "tensor.bounds",
                json!({
                    "dims": dims,
                    "hs": t.hs_norm(),
                    "injective": to_value(&t.injective_bounds(*max_iter)?),
                    "projective": to_value(&t.projective_bounds()?),
                }),
            ))
        }
        TensorOp::Shells { lmax } => {
            let shells = tensor::enumerate_shells(*lmax);
            let rows = shells.iter().map(|(i, j)| vec![i.to_string(), j.to_string()]).collect();
            Ok(Output::new("tensor.shells", json!({"lmax": lmax, "shells": shells}))
                .with_table(Table::new(&["i", "j"], rows)))
        }
        TensorOp::Truncation {
            scale,
            ratio,
            len,
            nmax,
        } => {
            let x = CoeffSequence::geometric(*scale, *ratio, *len, SeqNorm::L2);
            let mut rows = Vec::new();
            let mut out = Vec::new();
            for n in 0..=*nmax {
                let actual = tensor::truncation_remainder(&x, &x, n)?.hs_norm();
                let bound = tensor::tensor_basis_truncation_error(&x, &x, n)?;
                rows.push(vec![n.to_string(), num(actual), num(bound)]);
                out.push(json!({"n": n, "remainder_hs": actual, "bound": bound}));
            }
            Ok(Output::new(
                "tensor.truncation",
                json!({"scale": scale, "ratio": ratio, "len": len, "rows": out}),
            )
            .with_table(Table::new(&["n", "remainder_hs", "bound"], rows)))
        }
        TensorOp::Check { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut violation: f64 = f64::NEG_INFINITY;
            let mut elementary: f64 = 0.0;
            for _ in 0..*count {
                let r = rng.gen_range(2..=6);
                let c = rng.gen_range(2..=6);
                let e: Vec<f64> = (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let t = Tensor2::new(r, c, e)?;
                let (eps, pi, hs) = (t.injective_norm(), t.projective_norm(), t.hs_norm());
                let sigma = t.sigma_norm(1e-15)?;
                for gap in [eps - hs, hs - pi, eps - sigma, sigma - pi] {
                    violation = violation.max(gap);
                }
                let x: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..c).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let target = crate::linalg::frobenius(&x) * crate::linalg::frobenius(&y);
                let el = tensor::tensor2(&x, &y);
                for v in [
                    el.injective_norm(),
                    el.projective_norm(),
                    el.hs_norm(),
                    el.sigma_norm(1e-15)?,
                ] {
                    elementary = elementary.max((v - target).abs());
                }
            }
            Ok(Output::new(
                "tensor.check",
                json!({
                    "count": count,
                    "seed": seed,
                    "max_order_violation": violation,
                    "max_elementary_error": elementary,
                }),
            ))
        }
    }
}

/// Piecewise-bilinear interpolation of a discrete Green matrix, so that
/// it can be evaluated and paired like the other kernels. Dirichlet tables
/// are extended by zeros at the ends; Neumann tables are held constant
/// beyond the outer cell centres.
struct GreenKernel {
    a: f64,
    b: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl GreenKernel {
    fn new(g: &GreenMatrix, a: f64, b: f64, bc: Boundary) -> Self {
        let m = g.m;
        match bc {
            Boundary::Dirichlet => {
                let k = m + 2;
                let mut knots = vec![a];
                knots.extend(&g.nodes);
                knots.push(b);
                let mut values = vec![0.0; k * k];
                for i in 0..m {
                    for j in 0..m {
                        values[(i + 1) * k + j + 1] = g.get(i, j);
                    }
                }
                GreenKernel { a, b, knots, values }
            }
            Boundary::Neumann => GreenKernel {
                a,
                b,
                knots: g.nodes.clone(),
                values: g.values.clone(),
            },
        }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let k = &self.knots;
        let x = x.clamp(k[0], k[k.len() - 1]);
        let i = k.partition_point(|&v| v <= x).clamp(1, k.len() - 1) - 1;
        (i, (x - k[i]) / (k[i + 1] - k[i]))
    }
}

impl Kernel for GreenKernel {
    type Scalar = f64;

    fn name(&self) -> &'static str {
        "green1d"
    }

    fn domain(&self) -> Domain {
        Domain::Interval { a: self.a, b: self.b }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b), ("knots", self.knots.len() as f64)]
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        let n = self.knots.len();
        let (i, u) = self.locate(s);
        let (j, v) = self.locate(t);
        let g = |p: usize, q: usize| self.values[p * n + q];
        (1.0 - u) * (1.0 - v) * g(i, j)
            + u * (1.0 - v) * g(i + 1, j)
            + (1.0 - u) * v * g(i, j + 1)
            + u * v * g(i + 1, j + 1)
    }
}

enum BuiltKernel {
    Real {
        kernel: Arc<dyn Kernel<Scalar = f64>>,
        diff: Option<Arc<dyn DifferentiableKernel>>,
    },
    Complex(Arc<dyn Kernel<Scalar = Complex64>>),
}

fn real_diff<K: DifferentiableKernel + 'static>(k: K) -> BuiltKernel {
    let k = Arc::new(k);
    BuiltKernel::Real {
        kernel: k.clone(),
        diff: Some(k),
    }
}

impl KernelParams {
    fn interval(&self, a: f64, b: f64) -> (f64, f64) {
        (self.a.unwrap_or(a), self.b.unwrap_or(b))
    }

    fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![0.0, 1.0])
    }

    fn boundary(&self) -> Result<Boundary> {
        Boundary::from_str(self.bc.as_deref().unwrap_or("dirichlet"))
    }

    fn green_matrix(&self, m: usize) -> Result<GreenMatrix> {
        let (a, b) = self.interval(0.0, 1.0);
        kernels::green_matrix_1d(&self.weights(), a, b, m, self.boundary()?)
    }

    fn kappa(&self) -> Result<f64> {
        match self.kappa.as_deref() {
            None | Some("printed") => Ok(FourierKernel::PRINTED_KAPPA),
            Some("basis") => Ok(FourierKernel::BASIS_KAPPA),
            Some(v) => parse_f64(v),
        }
    }

    fn build(&self, name: KernelName) -> Result<BuiltKernel> {
        Ok(match name {
            KernelName::Poly => {
                let (a, b) = self.interval(-1.0, 1.0);
                real_diff(PolyKernel::new(
                    a,
                    b,
                    self.c.unwrap_or(0.5 * (a + b)),
                    self.n.unwrap_or(3),
                )?)
            }
            KernelName::Sobolev => {
                let (a, b) = self.interval(0.0, 1.0);
                real_diff(SobolevKernel::new(a, b)?)
            }
            KernelName::Fourier => {
                let form = match self.terms {
                    Some(p) => FourierForm::Series(p),
                    None => FourierForm::Closed,
                };
                real_diff(FourierKernel::new(self.kappa()?, form)?)
            }
            KernelName::Green1d => {
                let (a, b) = self.interval(0.0, 1.0);
                let g = self.green_matrix(self.resolution.unwrap_or(128))?;
                BuiltKernel::Real {
                    kernel: Arc::new(GreenKernel::new(&g, a, b, self.boundary()?)),
                    diff: None,
                }
            }
            KernelName::Bergman => {
                let rho = self.rho.unwrap_or(1.0);
                match self.form.unwrap_or(BergmanForm::Series) {
                    BergmanForm::Series => {
                        BuiltKernel::Complex(Arc::new(BergmanSeries::new(rho, self.terms.unwrap_or(4000))?))
                    }
                    BergmanForm::Printed => BuiltKernel::Complex(Arc::new(BergmanPrinted::new(rho)?)),
                }
            }
            KernelName::Log => {
                let zeta = match &self.zeta {
                    Some(z) => parse_complex(z)?,
                    None => Complex64::new(0.0, 0.0),
                };
                let pattern = match self.pattern.unwrap_or(PatternArg::Pinned) {
                    PatternArg::Printed => LogPattern::Printed,
                    PatternArg::Pinned => LogPattern::Pinned,
                };
                BuiltKernel::Complex(Arc::new(LogKernel::new(self.rho.unwrap_or(1.0), zeta, pattern)?))
            }
        })
    }
}

fn params_json(params: Vec<(&'static str, f64)>) -> Value {
    Value::Object(params.into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

/// `k` well-spread points of a domain, used when none are given.
fn default_points_real(domain: Domain, k: usize) -> Vec<f64> {
    match domain {
        Domain::Interval { a, b } => (0..k).map(|j| a + (b - a) * (j + 1) as f64 / (k + 1) as f64).collect(),
        Domain::Disc { radius } => (0..k).map(|j| radius * (j + 1) as f64 / (k + 1) as f64).collect(),
    }
}

fn default_points_complex(radius: f64, k: usize) -> Vec<Complex64> {
    (0..k)
        .map(|j| Complex64::from_polar(0.7 * radius * (j + 1) as f64 / k.max(1) as f64, 2.4 * j as f64))
        .collect()
}

fn grid_nodes(domain: Domain, m: usize) -> Vec<f64> {
    match domain {
        Domain::Interval { a, b } => (0..m).map(|i| a + (b - a) * (i as f64 + 0.5) / m as f64).collect(),
        Domain::Disc { radius } => (0..m)
            .map(|i| 0.9 * radius * ((2 * i + 1) as f64 / m as f64 - 1.0))
            .collect(),
    }
}

fn kernel_table<S: Scalar + Serialize>(
    kernel: &dyn Kernel<Scalar = S>,
    nodes: &[S],
    node_json: Value,
) -> Result<Output> {
    let g = kernels::gram(kernel, nodes)?;
    let m = nodes.len();
    let rows: Vec<Vec<String>> = (0..m).map(|i| (0..m).map(|j| cell(g[i * m + j])).collect()).collect();
    let values: Vec<Vec<S>> = (0..m).map(|i| g[i * m..(i + 1) * m].to_vec()).collect();
    Ok(Output::new(
        "kernel.grid",
        json!({
            "kernel": kernel.name(),
            "params": params_json(kernel.params()),
            "nodes": node_json,
            "values": to_value(&values),
        }),
    )
    .with_table(Table {
        header: Vec::new(),
        rows,
    }))
}

fn kernel_value<S: Scalar + Serialize>(kernel: &dyn Kernel<Scalar = S>, s: S, t: S) -> Result<Output> {
    let v = kernel.eval(s, t)?;
    Ok(Output::new(
        "kernel.eval",
        json!({
            "kernel": kernel.name(),
            "params": params_json(kernel.params()),
            "s": to_value(&s),
            "t": to_value(&t),
            "value": to_value(&v),
        }),
    )
    .with_table(Table::new(&["value"], vec![vec![cell(v)]])))
}

fn default_tests(name: KernelName, params: &KernelParams) -> Vec<TestFunction> {
    match name {
        KernelName::Poly => {
            let n = params.n.unwrap_or(3);
            vec![
                TestFunction::polynomial(vec![0.0, 1.0]),
                TestFunction::polynomial((0..=n).map(|j| 1.0 / (j + 1) as f64).collect()),
            ]
        }
        KernelName::Sobolev => {
            let a = params.a.unwrap_or(0.0);
            // keeps `-a` from printing as -0 in test names
            let neg = 0.0 - a;
            vec![
                TestFunction::polynomial(vec![neg, 1.0]),
                TestFunction::sinusoid(1.0, neg),
                TestFunction::sinusoid(2.5, 2.5 * neg),
                TestFunction::exponential(1.0, a.exp()),
            ]
        }
        _ => vec![
            TestFunction::sinusoid(1.0, 0.0),
            TestFunction::sinusoid(2.0, PI / 2.0),
            TestFunction::sinusoid(3.0, 0.4),
        ],
    }
}

fn parse_test_function(spec: &str) -> Result<TestFunction> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("test function `{spec}` is not kind:args")))?;
    let v = parse_real_list(args)?;
    let pair = |v: &[f64]| -> Result<(f64, f64)> {
        match v {
            [x, y] => Ok((*x, *y)),
            _ => Err(Error::Parse(format!("`{spec}` needs two parameters"))),
        }
    };
    match kind {
        "poly" => Ok(TestFunction::polynomial(v)),
        "sin" => {
            let (w, p) = pair(&v)?;
            Ok(TestFunction::sinusoid(w, p))
        }
        "exp" => {
            let (r, s) = pair(&v)?;
            Ok(TestFunction::exponential(r, s))
        }
        other => Err(Error::UnsupportedTag(other.to_string())),
    }
}

fn kernel(op: &KernelOp) -> Result<Output> {
    match op {
        KernelOp::Eval {
            name,
            params,
            s,
            t,
            grid,
        } => {
            match (grid, s, t) {
                (Some(m), None, None) => {
                    if *name == KernelName::Green1d {
                        let g = params.green_matrix(*m)?;
                        let rows = (0..g.m).map(|i| (0..g.m).map(|j| num(g.get(i, j))).collect()).collect();
                        let values: Vec<&[f64]> = g.values.chunks(g.m).collect();
                        return Ok(Output::new(
                        "kernel.grid",
                        json!({
                            "kernel": "green1d",
                            "params": {"weights": params.weights(), "bc": params.bc.as_deref().unwrap_or("dirichlet")},
                            "nodes": g.nodes,
                            "values": values,
                            "identity_residual": g.identity_residual(),
                        }),
                    )
                    .with_table(Table { header: Vec::new(), rows }));
                    }
                    if *m == 0 {
                        return Err(usage("--grid needs m >= 1"));
                    }
                    match params.build(*name)? {
                        BuiltKernel::Real { kernel, .. } => {
                            let nodes = grid_nodes(kernel.domain(), *m);
                            kernel_table(kernel.as_ref(), &nodes, to_value(&nodes))
                        }
                        BuiltKernel::Complex(kernel) => {
                            let reals = grid_nodes(kernel.domain(), *m);
                            let nodes: Vec<Complex64> = reals.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                            kernel_table(kernel.as_ref(), &nodes, to_value(&nodes))
                        }
                    }
                }
                (None, Some(s), Some(t)) => match params.build(*name)? {
                    BuiltKernel::Real { kernel, .. } => kernel_value(kernel.as_ref(), parse_f64(s)?, parse_f64(t)?),
                    BuiltKernel::Complex(kernel) => kernel_value(kernel.as_ref(), parse_complex(s)?, parse_complex(t)?),
                },
                _ => Err(usage("give either --s and --t, or --grid")),
            }
        }
        KernelOp::Verify {
            name,
            params,
            tests,
            ts,
            quad_n,
        } => {
            let BuiltKernel::Real {
                kernel,
                diff: Some(diff),
            } = params.build(*name)?
            else {
                return Err(usage("verify supports poly, sobolev and fourier"));
            };
            let space = match *name {
                KernelName::Poly => {
                    let (a, b) = params.interval(-1.0, 1.0);
                    InnerProductSpec::taylor(a, b, params.c.unwrap_or(0.5 * (a + b)), params.n.unwrap_or(3))?
                }
                KernelName::Sobolev => {
                    let (a, b) = params.interval(0.0, 1.0);
                    InnerProductSpec::left_dirichlet(a, b)?
                }
                _ => InnerProductSpec::periodic_mean_zero(),
            };
            let functions = if tests.is_empty() {
                default_tests(*name, params)
            } else {
                tests.iter().map(|s| parse_test_function(s)).collect::<Result<_>>()?
            };
            let ts = if ts.is_empty() {
                let Domain::Interval { a, b } = kernel.domain() else {
                    return Err(usage("verify needs an interval kernel"));
                };
                [0.23, 0.5, 0.81].iter().map(|u| a + u * (b - a)).collect()
            } else {
                ts.clone()
            };
            let mut checks = Vec::new();
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for x in &functions {
                for &t in &ts {
                    let c = kernels::verify_reproducing(diff.as_ref(), &space, x, t, *quad_n)?;
                    worst = worst.max(c.residual);
                    rows.push(vec![
                        x.name().to_string(),
                        num(t),
                        num(c.inner),
                        num(c.target),
                        num(c.residual),
                    ]);
                    checks.push(json!({
                        "test": x.name(),
                        "t": t,
                        "inner": c.inner,
                        "target": c.target,
                        "residual": c.residual,
                    }));
                }
            }
            Ok(Output::new(
                "kernel.verify",
                json!({
                    "kernel": kernel.name(),
                    "params": params_json(kernel.params()),
                    "space": to_value(&space),
                    "quad_n": quad_n,
                    "checks": checks,
                    "max_residual": worst,
                }),
            )
            .with_table(Table::new(&["test", "t", "inner", "target", "residual"], rows)))
        }
        KernelOp::Gram { name, params, points } => match params.build(*name)? {
            BuiltKernel::Real { kernel, .. } => gram_output(kernel.as_ref(), &parse_real_list(points)?),
            BuiltKernel::Complex(kernel) => gram_output(kernel.as_ref(), &parse_complex_list(points)?),
        },
    }
}

fn gram_output<S: Scalar + Serialize>(kernel: &dyn Kernel<Scalar = S>, points: &[S]) -> Result<Output> {
    let g = kernels::gram(kernel, points)?;
    let m = points.len();
    let rows: Vec<Vec<String>> = (0..m).map(|i| (0..m).map(|j| cell(g[i * m + j])).collect()).collect();
    let values: Vec<Vec<S>> = (0..m).map(|i| g[i * m..(i + 1) * m].to_vec()).collect();
    Ok(Output::new(
        "kernel.gram",
        json!({
            "kernel": kernel.name(),
            "points": to_value(&points),
            "gram": to_value(&values),
            "min_eigenvalue": kernels::min_gram_eigenvalue(kernel, points)?,
            "hermitian_defect": kernels::hermitian_defect(kernel, points)?,
        }),
    )
    .with_table(Table {
        header: Vec::new(),
        rows,
    }))
}

fn pairing_of<S: Scalar + 'static>(kernel: Arc<dyn Kernel<Scalar = S>>) -> Pairing<S, S> {
    fock_kernels::point_evaluation_pairing(kernel)
}

fn fock_eval<S: Scalar + Serialize + 'static>(
    kernel: Arc<dyn Kernel<Scalar = S>>,
    a_s: &[S],
    b_s: &[S],
    symmetry: FockSymmetry,
) -> Result<Output> {
    let name = kernel.name();
    let pairing = pairing_of(kernel);
    let gram = fock_kernels::kernel_gram(&pairing, a_s, b_s)?;
    let value = fock_kernels::gamma_block(pairing, a_s.len(), symmetry).eval(a_s, b_s)?;
    let rows = gram
        .rows()
        .iter()
        .map(|r| r.iter().map(|v| cell(*v)).collect())
        .collect();
    Ok(Output::new(
        "fock",
        json!({
            "pairing": name,
            "symmetry": symmetry.to_string(),
            "order": a_s.len(),
            "a_points": to_value(&a_s),
            "b_points": to_value(&b_s),
            "gram": to_value(&gram.rows()),
            "value": to_value(&value),
        }),
    )
    .with_table(Table {
        header: Vec::new(),
        rows,
    }))
}

fn fock_gamma<S: Scalar + Serialize + 'static>(
    kernel: Arc<dyn Kernel<Scalar = S>>,
    m_max: usize,
    points: &[S],
    symmetries: &[FockSymmetry],
) -> Result<Output> {
    let name = kernel.name();
    let pairing = pairing_of(kernel);
    let elements: Vec<Vec<S>> = (0..=m_max).map(|k| points[..k].to_vec()).collect();
    let mut blocks = Map::new();
    let mut columns = Vec::new();
    let mut cross: f64 = 0.0;
    for &sym in symmetries {
        let block = fock_kernels::gamma_block(pairing.clone(), m_max, sym);
        let diag = block.diagonal(points)?;
        let full = block.matrix(&elements)?;
        let k = elements.len();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    cross = cross.max(full[i * k + j].abs());
                }
            }
        }
        blocks.insert(sym.to_string(), to_value(&diag));
        columns.push(diag);
    }
    let mut header = vec!["order".to_string()];
    header.extend(symmetries.iter().map(|s| s.to_string()));
    let rows = (0..=m_max)
        .map(|k| {
            std::iter::once(k.to_string())
                .chain(columns.iter().map(|c| cell(c[k])))
                .collect()
        })
        .collect();
    Ok(Output::new(
        "fock.gamma",
        json!({
            "pairing": name,
            "mmax": m_max,
            "points": to_value(&points),
            "blocks": Value::Object(blocks),
            "cross_order_max_abs": cross,
        }),
    )
    .with_table(Table { header, rows }))
}

fn fock(cmd: &FockCmd) -> Result<Output> {
    if let Some(FockSub::Gamma {
        pairing,
        params,
        mmax,
        points,
        symmetry,
    }) = &cmd.sub
    {
        if *mmax > MAX_RYSER_ORDER {
            return Err(Error::TooLarge {
                what: "truncation order",
                size: *mmax,
                limit: MAX_RYSER_ORDER,
            });
        }
        let symmetries = match symmetry {
            Some(s) => vec![FockSymmetry::from_str(s)?],
            None => vec![FockSymmetry::Tensor, FockSymmetry::Sym, FockSymmetry::Antisym],
        };
        let need = |len: usize| -> Result<()> {
            if len < *mmax {
                return Err(usage(format!("need at least {mmax} points, got {len}")));
            }
            Ok(())
        };
        return match params.build(*pairing)? {
            BuiltKernel::Real { kernel, .. } => {
                let pts = match points {
                    Some(p) => parse_real_list(p)?,
                    None => default_points_real(kernel.domain(), *mmax),
                };
                need(pts.len())?;
                fock_gamma(kernel, *mmax, &pts, &symmetries)
            }
            BuiltKernel::Complex(kernel) => {
                let Domain::Disc { radius } = kernel.domain() else {
                    return Err(usage("complex kernels live on a disc"));
                };
                let pts = match points {
                    Some(p) => parse_complex_list(p)?,
                    None => default_points_complex(radius, *mmax),
                };
                need(pts.len())?;
                fock_gamma(kernel, *mmax, &pts, &symmetries)
            }
        };
    }
    let args = &cmd.eval;
    let pairing = args.pairing.ok_or_else(|| usage("fock needs --pairing"))?;
    let points = args.points.as_deref().ok_or_else(|| usage("fock needs --points"))?;
    let symmetry = FockSymmetry::from_str(&args.symmetry)?;
    fn take<T: Clone>(v: Vec<T>, order: Option<usize>) -> Result<Vec<T>> {
        let k = order.unwrap_or(v.len());
        if k == 0 || k > v.len() {
            return Err(usage(format!("order must be between 1 and {}, got {k}", v.len())));
        }
        Ok(v[..k].to_vec())
    }
    match args.params.build(pairing)? {
        BuiltKernel::Real { kernel, .. } => {
            let a_s = take(parse_real_list(points)?, args.order)?;
            let b_s = match &args.points_b {
                Some(p) => take(parse_real_list(p)?, args.order)?,
                None => a_s.clone(),
            };
            check_len(a_s.len(), b_s.len())?;
            fock_eval(kernel, &a_s, &b_s, symmetry)
        }
        BuiltKernel::Complex(kernel) => {
            let a_s = take(parse_complex_list(points)?, args.order)?;
            let b_s = match &args.points_b {
                Some(p) => take(parse_complex_list(p)?, args.order)?,
                None => a_s.clone(),
            };
            check_len(a_s.len(), b_s.len())?;
            fock_eval(kernel, &a_s, &b_s, symmetry)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn call(args: &[&str]) -> RunResult {
        run(std::iter::once("cliffkern").chain(args.iter().copied()))
    }

    fn json_of(r: &RunResult) -> Value {
        assert_eq!(r.code, 0, "{r:?}");
        serde_json::from_str(&r.stdout).unwrap()
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn clifford_mul_squares_a_generator() {
        let v = json_of(&call(&[
            "clifford", "mul", "--n", "2", "--diag", "1,1", "--a", "e1", "--b", "e1",
        ]));
        assert_eq!(v["terms"], json!([{"blades": [], "c": 1.0}]));
        assert_eq!(v["schema"], "cliffkern.clifford.mul/1");
    }

    #[test]
    fn legendre_point_of_the_cubic() {
        let v = json_of(&call(&["legendre", "point", "--f", "power", "--p", "3", "--y", "2"]));
        assert_eq!(v["x_star"], json!([4.0]));
        assert!((v["z_star"].as_f64().unwrap() + 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_eval_is_the_minimum() {
        let v = json_of(&call(&[
            "kernel", "eval", "--name", "sobolev", "--a", "0", "--b", "1", "--s", "0.3", "--t", "0.7",
        ]));
        assert!((v["value"].as_f64().unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn usage_and_numerical_failures_have_distinct_codes() {
        assert_eq!(call(&["clifford", "frobnicate"]).code, 2);
        assert_eq!(
            call(&["quadratic", "eval", "--diag", "1,1", "--x", "1,2", "--bogus"]).code,
            2
        );
        let r = call(&[
            "legendre",
            "clifford",
            "--f",
            "double_well",
            "--y",
            "0.5773502691896258",
        ]);
        assert_eq!(r.code, 1, "{r:?}");
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["error"]["kind"], "degenerate");
    }

    #[test]
    fn flattening_lists_every_leaf() {
        let mut leaves = Vec::new();
        flatten("", &json!({"a": [1, {"b": "x"}], "c": 2.5}), &mut leaves);
        assert_eq!(
            leaves,
            vec![
                ("a.0".to_string(), "1".to_string()),
                ("a.1.b".to_string(), "x".to_string()),
                ("c".to_string(), "2.5".to_string())
            ]
        );
    }

    #[test]
    fn complex_cells() {
        assert_eq!(cell(Complex64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(cell(2.0), "2.0");
    }

    #[test]
    fn green_interpolation_hits_the_nodes() {
        let g = kernels::green_matrix_1d(&[0.0, 1.0], 0.0, 1.0, 15, Boundary::Dirichlet).unwrap();
        let k = GreenKernel::new(&g, 0.0, 1.0, Boundary::Dirichlet);
        for i in [0, 4, 14] {
            for j in [1, 7, 13] {
                assert!((k.eval_unchecked(g.nodes[i], g.nodes[j]) - g.get(i, j)).abs() < 1e-13);
            }
        }
        assert_eq!(k.eval_unchecked(0.0, 0.5), 0.0);
    }
}
