//! The `finobs` command line.
//!
//! Every subcommand reads JSON documents, writes one canonical JSON result to
//! `-o` or standard output and reports failures on standard error. Exit codes:
//! 0 success, 1 validation error, 2 numerical-tolerance failure (including a
//! failing `verify` suite).

use clap::{Args, Parser, Subcommand, ValueEnum};
use finobs_core::dynamics::{
    compress_state, complementary_pair, concatenate_detailed, evolve, expectation, oscillator_hamiltonian,
    DensityMatrix, SpectralFunction, StateVector,
};
use finobs_core::fhlogic::{
    alpha_value, decompose_equivariant, modularity_check, orthogonal, refute_density, subspace_join,
    subspace_meet, window, zero_sum_compatible, FHOperator, SymbolicSubspace, SymbolicTrace,
};
use finobs_core::finitary::{diagonalize, is_intrinsically_effective, EigenSystem, HermitianMatrix};
use finobs_core::io::{self, JsonForm, LabelingDoc};
use finobs_core::measurement::{Frame, PartialLabeling, PartitionPlus, Scale};
use finobs_core::socks::{flip, inner_t, least_support, tau, FlipAction, PairVector, TruncatedFockVector};
use finobs_core::verify::{run_suite, Suite, DEFAULT_SEED};
use finobs_core::{Error, Result};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "FINOBS_SEED";

#[derive(Parser, Debug)]
#[command(name = "finobs", version, about = "Finitary observables: operators from eigen-data, dynamics and symbolic models")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Seed for randomized constructions; FINOBS_SEED takes precedence.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partial labelings, order ideals and their partitions.
    #[command(subcommand)]
    Measure(MeasureOp),
    /// Eigen-data of an operator, or the discretized oscillator spectrum.
    Spec(SpecArgs),
    /// Evolve a state for a time under a Hamiltonian.
    Evolve {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
    },
    /// Hermitian C with spectrum in [0, 2π) and exp(-iC) = exp(-iA) exp(-iB).
    Concat {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Expected value tr(f(T) D).
    Expect {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        density: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// The compressed state B with tr(f(T) B) = tr(f(T) D) for every f.
    Compress {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        density: PathBuf,
    },
    /// Two operators with one-dimensional common domain and equal variance at e_0.
    Uncertainty {
        #[arg(long)]
        dim: usize,
        /// Eigenvalues, comma separated; at least two.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alphas: Vec<f64>,
    },
    /// Antisymmetric tensors over pairs and the truncated Fock space.
    #[command(subcommand)]
    Socks(SocksOp),
    /// Finite-matrix plus scalar operators.
    #[command(subcommand)]
    Fh(FhOp),
    /// The finite/cofinite subspace lattice.
    #[command(subcommand)]
    Lattice(LatticeOp),
    /// Run the property suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
        suite: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum MeasureOp {
    /// Partition of the ideal generated by a family of labelings.
    Pi {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Compare two labelings in the information order (and the preference order if labels are ranked).
    Le {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Members of the ideal of a partition.
    Ideal {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Partition of the pushforward of a scalable ideal along a relabeling.
    Hat {
        #[arg(long)]
        frame: PathBuf,
        /// Images of the labels in label order, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        relabel: Vec<String>,
        /// A total labeling.
        #[arg(long)]
        scale: PathBuf,
    },
    /// Total preorder carried by a family of ranked labelings.
    Preference {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Matrix or eigen-system document.
    #[arg(long, required_unless_present = "oscillator", conflicts_with = "oscillator")]
    operator: Option<PathBuf>,
    /// Use the harmonic oscillator on a Dirichlet grid.
    #[arg(long)]
    oscillator: bool,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    #[arg(long, default_value_t = 10.0)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    stiffness: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Number of lowest levels to report.
    #[arg(long, default_value_t = 10)]
    levels: usize,
}

#[derive(Subcommand, Debug)]
enum SocksOp {
    /// The table of τ(x_0, ..., x_{N-1}) from values at a_n.
    Tensor {
        #[arg(long)]
        x: PathBuf,
    },
    /// inner_T(τx, τy) and the product of pairwise inner products.
    Inner {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Least support of a Fock vector.
    Support {
        #[arg(long)]
        fock: PathBuf,
        #[arg(long, default_value_t = finobs_core::socks::DEFAULT_SUPPORT_TOL)]
        tol: f64,
    },
    /// Apply a flip action to a Fock vector.
    Flip {
        #[arg(long)]
        fock: PathBuf,
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum FhOp {
    /// Recover (support, F, tail) from a matrix on atoms a1..am.
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Drop atoms whose rows and columns agree with the scalar part.
    Canonicalize {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Whether the operator preserves the zero-sum vectors.
    Compatible {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Witness that a density candidate does not represent the two-valued state.
    Refute {
        #[arg(long)]
        operator: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeOp {
    /// Intersection of two subspaces
    Meet {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Closed span of two subspaces
    Join {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Whether two subspaces are orthogonal
    Orthogonal {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Shearing identity for a triple.
    Modular {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        z: PathBuf,
    },
    /// The two-valued state: 0 on finite parts, 1 on cofinite ones.
    Alpha {
        #[arg(long)]
        x: PathBuf,
    },
}

/// Runs with process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::ChecksFailed) => {
            let _ = writeln!(err, "error: verification failed");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

enum Outcome {
    Done,
    ChecksFailed,
}

fn seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(format!("cannot read '{}': {e}", path.display())))
}

fn load<T: JsonForm>(path: &Path) -> Result<T> {
    io::load(&read(path)?).map_err(|e| in_file(path, e))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    io::parse(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// An operator given either as eigen-data or as a Hermitian matrix.
fn load_observable(path: &Path) -> Result<EigenSystem> {
    let text = read(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: invalid JSON: {e}", path.display())))?;
    if value.is_array() {
        diagonalize(&io::load::<HermitianMatrix>(&text).map_err(|e| in_file(path, e))?)
    } else {
        io::load::<EigenSystem>(&text).map_err(|e| in_file(path, e))
    }
}

fn load_labelings(frame: &Frame, path: &Path) -> Result<Vec<PartialLabeling>> {
    let docs: Vec<LabelingDoc> = parse(path)?;
    docs.iter().map(|d| io::labeling_from_doc(frame, d)).collect()
}

fn load_labeling(frame: &Frame, path: &Path) -> Result<PartialLabeling> {
    io::labeling_from_doc(frame, &parse::<LabelingDoc>(path)?)
}

fn label_index(frame: &Frame, name: &str) -> Result<usize> {
    frame
        .labels()
        .index_of(name)
        .ok_or_else(|| Error::validation(format!("unknown label '{name}'")))
}

fn pair_vectors(path: &Path) -> Result<Vec<PairVector>> {
    let values: io::VectorDoc = parse(path)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, &z)| PairVector::new(k, io::complex_from_doc(z)))
        .collect())
}

fn doc<T: JsonForm>(value: &T) -> Value {
    serde_json::to_value(value.to_doc()).expect("documents serialize")
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    let seed = seed(cli.seed)?;
    let mut outcome = Outcome::Done;
    let text = match cli.command {
        Command::Measure(op) => json_text(&measure(op)?)?,
        Command::Spec(args) => json_text(&spectral(&args)?)?,
        Command::Evolve { hamiltonian, state, time } => {
            let h = load_observable(&hamiltonian)?;
            let psi: StateVector = load(&state)?;
            io::save(&evolve(&h, &psi, time)?)?
        }
        Command::Concat { a, b } => {
            let a: HermitianMatrix = load(&a)?;
            let b: HermitianMatrix = load(&b)?;
            if a.dim() != b.dim() {
                return Err(Error::validation(format!(
                    "operator dimensions differ: a is {0}x{0}, b is {1}x{1}",
                    a.dim(),
                    b.dim()
                )));
            }
            let cat = concatenate_detailed(&a, &b)?;
            json_text(&json!({ "c": doc(&cat.c), "angles": cat.angles }))?
        }
        Command::Expect { observable, density, function } => {
            let t = load_observable(&observable)?;
            let d: DensityMatrix = load(&density)?;
            let f: SpectralFunction = load(&function)?;
            json_text(&json!({ "value": expectation(&f, &t, &d)? }))?
        }
        Command::Compress { observable, density } => {
            let t = load_observable(&observable)?;
            let d: DensityMatrix = load(&density)?;
            io::save(&compress_state(&t, &d)?)?
        }
        Command::Uncertainty { dim, alphas } => {
            let pair = complementary_pair(dim, &alphas, seed)?;
            let e0 = StateVector::new(finobs_core::linalg::basis_vector(dim, 0))?;
            let vs = finobs_core::dynamics::variance(&pair.s, &e0)?;
            let vt = finobs_core::dynamics::variance(&pair.t, &e0)?;
            let intersection: Vec<io::VectorDoc> = pair.intersection.iter().map(io::vector_to_doc).collect();
            json_text(&json!({
                "s": doc(&pair.s),
                "t": doc(&pair.t),
                "intersection": intersection,
                "variance_s": vs,
                "variance_t": vt,
                "product": vs * vt,
            }))?
        }
        Command::Socks(op) => json_text(&socks(op)?)?,
        Command::Fh(op) => json_text(&fh(op)?)?,
        Command::Lattice(op) => json_text(&lattice(op)?)?,
        Command::Verify { suite, format } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite, seed);
            if !report.passed {
                outcome = Outcome::ChecksFailed;
            }
            match format {
                ReportFormat::Text => format!("{report}\n"),
                ReportFormat::Json => report.to_json(),
            }
        }
    };
    emit(cli.output.as_deref(), &text, out)?;
    Ok(outcome)
}

fn json_text(v: &Value) -> Result<String> {
    io::to_canonical_string(v)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::validation(format!("cannot write '{}': {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::validation(format!("cannot write output: {e}"))),
    }
}

fn measure(op: MeasureOp) -> Result<Value> {
    match op {
        MeasureOp::Pi { frame, family } => {
            let frame: Frame = load(&frame)?;
            let fs = load_labelings(&frame, &family)?;
            Ok(doc(&frame.pi_of_family(&fs)?))
        }
        MeasureOp::Le { frame, f, g } => {
            let frame: Frame = load(&frame)?;
            let (f, g) = (load_labeling(&frame, &f)?, load_labeling(&frame, &g)?);
            let pref = if frame.labels().is_ordered() {
                Value::Bool(frame.pref_le(&f, &g)?)
            } else {
                Value::Null
            };
            Ok(json!({ "le": frame.le(&f, &g)?, "pref_le": pref }))
        }
        MeasureOp::Ideal { frame, partition } => {
            let frame: Frame = load(&frame)?;
            let p: PartitionPlus = load(&partition)?;
            let members: Vec<LabelingDoc> = frame
                .ideal_members(&p)?
                .iter()
                .map(|f| io::labeling_to_doc(&frame, f))
                .collect();
            let observable = frame.is_observable(&p).ok();
            Ok(json!({
                "members": serde_json::to_value(members).expect("documents serialize"),
                "observable": observable,
            }))
        }
        MeasureOp::Hat { frame, relabel, scale } => {
            let frame: Frame = load(&frame)?;
            let h = relabel
                .iter()
                .map(|name| label_index(&frame, name.trim()))
                .collect::<Result<Vec<_>>>()?;
            let s = load_labeling(&frame, &scale)?;
            let map = (0..frame.objects().len())
                .map(|x| {
                    s.get(x).ok_or_else(|| {
                        Error::validation(format!("scale leaves '{}' unlabeled", frame.objects().elements()[x]))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(doc(&frame.hat_scalable(&h, &Scale::new(map))?))
        }
        MeasureOp::Preference { frame, family } => {
            let frame: Frame = load(&frame)?;
            let fs = load_labelings(&frame, &family)?;
            let order = frame.preference_order(&fs)?;
            let names = |xs: &[usize]| -> Vec<String> {
                xs.iter().map(|&x| frame.objects().elements()[x].clone()).collect()
            };
            let levels: Vec<Vec<String>> = order.levels.iter().map(|l| names(l)).collect();
            Ok(json!({ "levels": levels, "unmeasured": names(&order.unmeasured) }))
        }
    }
}

fn spectral(args: &SpecArgs) -> Result<Value> {
    if let Some(path) = &args.operator {
        return Ok(doc(&load_observable(path)?));
    }
    let h = oscillator_hamiltonian(args.grid, args.length, args.mass, args.stiffness, args.hbar)?;
    let es = diagonalize(&h)?;
    let values = es.values();
    let levels: Vec<f64> = values.iter().take(args.levels).copied().collect();
    let gaps: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(json!({
        "grid": args.grid,
        "levels": levels,
        "gaps": gaps,
        "full_diagonalization": es.is_full() && is_intrinsically_effective(&es),
    }))
}

fn socks(op: SocksOp) -> Result<Value> {
    match op {
        SocksOp::Tensor { x } => Ok(doc(&tau(&pair_vectors(&x)?)?)),
        SocksOp::Inner { x, y } => {
            let (xs, ys) = (pair_vectors(&x)?, pair_vectors(&y)?);
            if xs.len() != ys.len() {
                return Err(Error::DimensionMismatch {
                    expected: xs.len(),
                    found: ys.len(),
                });
            }
            let inner = inner_t(&tau(&xs)?, &tau(&ys)?)?;
            let product = xs
                .iter()
                .zip(&ys)
                .fold(finobs_core::linalg::real(1.0), |acc, (a, b)| acc * a.inner(b));
            Ok(json!({
                "inner": io::complex_to_doc(inner),
                "product": io::complex_to_doc(product),
            }))
        }
        SocksOp::Support { fock, tol } => {
            let v: TruncatedFockVector = load(&fock)?;
            Ok(json!({ "support": least_support(&v, tol) }))
        }
        SocksOp::Flip { fock, pairs } => {
            let v: TruncatedFockVector = load(&fock)?;
            Ok(doc(&flip(&FlipAction::new(pairs), &v)))
        }
    }
}

fn fh(op: FhOp) -> Result<Value> {
    match op {
        FhOp::Decompose { matrix, tol } => {
            let rows: io::MatrixDoc = parse(&matrix)?;
            let m = io::matrix_from_doc(&rows)?;
            if m.nrows() != m.ncols() {
                return Err(Error::validation(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
            }
            let win = window(m.nrows() as u32);
            Ok(doc(&decompose_equivariant(&m, &win, tol)?))
        }
        FhOp::Canonicalize { operator, tol } => {
            let t: FHOperator = load(&operator)?;
            Ok(doc(&t.canonicalize(tol)))
        }
        FhOp::Compatible { operator, tol } => {
            let t: FHOperator = load(&operator)?;
            Ok(json!({ "compatible": zero_sum_compatible(&t, tol) }))
        }
        FhOp::Refute { operator } => {
            let d: FHOperator = load(&operator)?;
            let r = refute_density(&d)?;
            let trace = match r.trace {
                SymbolicTrace::Finite(z) => serde_json::to_value(io::complex_to_doc(z)).expect("serializable"),
                SymbolicTrace::Infinite => Value::String("infinite".into()),
            };
            Ok(json!({
                "witness": doc(&r.witness),
                "trace": trace,
                "alpha": r.alpha,
                "refutes": r.refutes(),
            }))
        }
    }
}

fn lattice(op: LatticeOp) -> Result<Value> {
    let sub = |p: &Path| -> Result<SymbolicSubspace> { load(p) };
    match op {
        LatticeOp::Meet { x, y } => Ok(doc(&subspace_meet(&sub(&x)?, &sub(&y)?))),
        LatticeOp::Join { x, y } => Ok(doc(&subspace_join(&sub(&x)?, &sub(&y)?))),
        LatticeOp::Orthogonal { x, y } => Ok(json!({ "orthogonal": orthogonal(&sub(&x)?, &sub(&y)?) })),
        LatticeOp::Modular { x, y, z } => {
            Ok(json!({ "holds": modularity_check(&sub(&x)?, &sub(&y)?, &sub(&z)?) }))
        }
        LatticeOp::Alpha { x } => Ok(json!({ "alpha": alpha_value(&sub(&x)?) })),
    }
}
