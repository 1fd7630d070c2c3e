//! Command-line interface over the map toolkit.
//!
//! Subcommands: `gen` writes fixture maps and states, `distance`, `lift`,
//! `decompose` and `witness` analyze stored maps, and `check` runs randomized
//! property verification. Output is deterministic `key = value` lines with
//! floats printed to 17 significant digits. Exit codes: 0 on success, 1 when a
//! `check` run fails its tolerance, 2 on input or usage errors.

pub mod files;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::decompose::{
    block_diagonal_decompose, is_block_diagonal, jordan_decompose, norm_comparison, CpPair,
};
use crate::distance::{
    cp_distance, cp_lift, diamond_bound, lift_minimality_witness, verify_property, MapProperty,
};
use crate::map::{verify_order_invariant, HermitianMap, OrderInvariant};
use crate::witness::{detection_bound_check, extremal_detection_state, DensityState};
use files::{FileMetadata, MapFile, StateFile};

/// Formats a float with 17 significant digits, enough to reproduce the bits.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser)]
#[command(
    name = "choikit",
    about = "Choi-matrix toolkit: distance from complete positivity, lifts, witnesses, decompositions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fixture map or state to a JSON file
    Gen(GenArgs),
    /// Distance from complete positivity of a stored map
    Distance(DistanceArgs),
    /// Minimal completely positive lift of a stored map
    Lift(LiftArgs),
    /// Split a stored map into a difference of completely positive maps
    Decompose(DecomposeArgs),
    /// Witness analysis: test a state against the Choi witness of a map
    Witness(WitnessArgs),
    /// Randomized verification of structural properties
    Check(CheckArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of: transpose, identity, trace, depolarizing, random-hermitian,
    /// random-cp, singlet, paper-separable
    fixture: String,
    /// Input dimension
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Output dimension (defaults to m)
    #[arg(long)]
    n: Option<usize>,
    /// Mixing weight for the depolarizing family
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed (falls back to CHOIKIT_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Destination file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DistanceArgs {
    /// Map file to analyze
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Probe minimality: report lambda_min when the shift is lowered by epsilon
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write the lifted map here
    #[arg(long)]
    out_lifted: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Write the positive part here
    #[arg(long)]
    out_plus: Option<PathBuf>,
    /// Write the subtracted part here
    #[arg(long)]
    out_minus: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Jordan,
    Block,
}

#[derive(Args)]
struct WitnessArgs {
    /// Map whose Choi matrix acts as the witness
    #[arg(long)]
    map: PathBuf,
    /// State file to test (mutually exclusive with --extremal)
    #[arg(long, conflicts_with = "extremal")]
    state: Option<PathBuf>,
    /// Use the extremal detecting state of the map itself
    #[arg(long)]
    extremal: bool,
    /// Positivity sampling trials for the witness hypothesis
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the tested state here (useful with --extremal)
    #[arg(long)]
    out_state: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Output dimension (defaults to m)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Pass threshold on the max violation (defaults to the library tolerance)
    #[arg(long, default_value_t = crate::tol::PROPERTY_PASS_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Subadditivity,
    Homogeneity,
    Convexity,
    UnitaryInvariance,
    #[value(alias = "order-conjugate")]
    ConjugateOrder,
    #[value(alias = "order-restriction")]
    RestrictionMonotonicity,
    #[value(alias = "order-norm")]
    NormMonotonicity,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Distance(args) => cmd_distance(args),
        Command::Lift(args) => cmd_lift(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("CHOIKIT_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn load_map(path: &Path) -> anyhow::Result<HermitianMap> {
    let file: MapFile = files::load(path)?;
    file.to_map()
        .with_context(|| format!("invalid map in {}", path.display()))
}

fn print_map_header(map: &HermitianMap) {
    println!("m = {}", map.input_dim());
    println!("n = {}", map.output_dim());
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<i32> {
    let m = args.m;
    let n = args.n.unwrap_or(m);
    let seed = resolve_seed(args.seed);
    let metadata = |name: &str, detail: String| {
        Some(FileMetadata {
            name: Some(name.to_string()),
            provenance: Some(format!("gen {name} {detail}").trim_end().to_string()),
        })
    };

    enum Generated {
        Map(HermitianMap),
        State(DensityState),
    }

    let generated = match args.fixture.as_str() {
        "transpose" => Generated::Map(HermitianMap::transpose(m)?),
        "identity" => Generated::Map(HermitianMap::identity(m)?),
        "trace" => Generated::Map(HermitianMap::trace_map(m, n)?),
        "depolarizing" => {
            let p = args
                .p
                .ok_or_else(|| anyhow::anyhow!("depolarizing requires --p"))?;
            Generated::Map(HermitianMap::depolarizing(m, p)?)
        }
        "random-hermitian" => Generated::Map(HermitianMap::random_hermitian(m, n, seed)?),
        "random-cp" => Generated::Map(HermitianMap::random_cp(m, n, seed)?),
        "singlet" => Generated::State(DensityState::singlet()),
        "paper-separable" => Generated::State(
            crate::witness::SeparableEnsemble::classically_correlated_pair().assemble()?,
        ),
        other => bail!("unknown fixture '{other}'"),
    };

    println!("command = gen");
    println!("fixture = {}", args.fixture);
    match generated {
        Generated::Map(map) => {
            let detail = match args.fixture.as_str() {
                "depolarizing" => format!("--m {m} --p {}", args.p.unwrap_or_default()),
                "random-hermitian" | "random-cp" => format!("--m {m} --n {n} --seed {seed}"),
                "trace" => format!("--m {m} --n {n}"),
                _ => format!("--m {m}"),
            };
            files::save(&args.out, &MapFile::from_map(&map, metadata(&args.fixture, detail)))?;
            print_map_header(&map);
        }
        Generated::State(state) => {
            files::save(
                &args.out,
                &StateFile::from_density(&state, metadata(&args.fixture, String::new())),
            )?;
            println!("dim = {}", state.dim());
        }
    }
    println!("written = {}", args.out.display());
    Ok(0)
}

fn cmd_distance(args: DistanceArgs) -> anyhow::Result<i32> {
    let map = load_map(&args.input)?;
    let spectrum = map.choi_spectrum()?;
    println!("command = distance");
    print_map_header(&map);
    println!("lambda_min = {}", fmt(spectrum.lambda_min()));
    println!("d_cp = {}", fmt(cp_distance(&map)?));
    println!("is_cp = {}", map.is_cp()?);
    Ok(0)
}

fn cmd_lift(args: LiftArgs) -> anyhow::Result<i32> {
    let map = load_map(&args.input)?;
    let lift = cp_lift(&map)?;
    println!("command = lift");
    print_map_header(&map);
    println!("lambda_min = {}", fmt(lift.lambda_min));
    println!("shift = {}", fmt(lift.shift));
    println!(
        "lifted_lambda_min = {}",
        fmt(lift.lifted.choi().lambda_min()?)
    );
    println!("lifted_is_cp = {}", lift.lifted.is_cp()?);
    let diamond = diamond_bound(&map)?;
    println!("diamond_bound = {}", fmt(diamond.bound));
    if let Some(epsilon) = args.epsilon {
        let witnessed = lift_minimality_witness(&map, epsilon)?;
        println!("epsilon = {}", fmt(epsilon));
        println!("witnessed_lambda_min = {}", fmt(witnessed));
    }
    if let Some(out) = &args.out_lifted {
        files::save(out, &MapFile::from_map(&lift.lifted, None))?;
        println!("written = {}", out.display());
    }
    Ok(0)
}

fn method_pair(map: &HermitianMap, method: MethodArg) -> crate::Result<CpPair> {
    match method {
        MethodArg::Jordan => jordan_decompose(map),
        MethodArg::Block => block_diagonal_decompose(map),
    }
}

fn cmd_decompose(args: DecomposeArgs) -> anyhow::Result<i32> {
    let map = load_map(&args.input)?;
    let pair = method_pair(&map, args.method)?;
    println!("command = decompose");
    print_map_header(&map);
    println!("method = {}", pair.method.label());
    println!("residual = {}", fmt(pair.residual));
    println!("plus_is_cp = {}", pair.plus.is_cp()?);
    println!("minus_is_cp = {}", pair.minus.is_cp()?);
    println!("minus_norm = {}", fmt(pair.minus.choi().operator_norm()?));
    println!("d_cp = {}", fmt(cp_distance(&map)?));
    if let Some(d) = pair.d_used {
        println!("d_used = {}", fmt(d));
        let sum = pair.plus.choi() + pair.minus.choi();
        println!(
            "sum_block_diagonal = {}",
            is_block_diagonal(&sum, map.input_dim(), map.output_dim())?
        );
    }
    let comparison = norm_comparison(&map, &pair)?;
    println!("sum_on_identity = {}", fmt(comparison.sum_on_identity));
    println!(
        "scaled_map_on_identity = {}",
        fmt(comparison.scaled_map_on_identity)
    );
    println!("scaled_choi_norm = {}", fmt(comparison.scaled_choi_norm));
    if let Some(out) = &args.out_plus {
        files::save(out, &MapFile::from_map(&pair.plus, None))?;
        println!("written_plus = {}", out.display());
    }
    if let Some(out) = &args.out_minus {
        files::save(out, &MapFile::from_map(&pair.minus, None))?;
        println!("written_minus = {}", out.display());
    }
    Ok(0)
}

fn cmd_witness(args: WitnessArgs) -> anyhow::Result<i32> {
    let map = load_map(&args.map)?;
    let seed = resolve_seed(args.seed);
    let evidence = map.sample_positivity(args.trials, seed)?;

    let state = if args.extremal {
        extremal_detection_state(&map)?
    } else {
        let path = args
            .state
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("provide --state FILE or --extremal"))?;
        let file: StateFile = files::load(path)?;
        file.to_density()
            .with_context(|| format!("invalid state in {}", path.display()))?
    };

    let report = detection_bound_check(&map, &evidence, &state)?;
    println!("command = witness");
    print_map_header(&map);
    println!("positivity = {}", evidence.label());
    println!("state_dim = {}", state.dim());
    println!("value = {}", fmt(report.value));
    println!("bound = {}", fmt(report.bound));
    println!("detected = {}", report.detected);
    println!("saturated = {}", report.saturated);
    if let Some(out) = &args.out_state {
        files::save(out, &StateFile::from_density(&state, None))?;
        println!("written_state = {}", out.display());
    }
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> anyhow::Result<i32> {
    let m = args.m;
    let n = args.n.unwrap_or(m);
    let seed = resolve_seed(args.seed);
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        bail!("--tol must be a finite non-negative number");
    }
    println!("command = check");
    println!("m = {m}");
    println!("n = {n}");
    println!("trials = {}", args.trials);
    println!("seed = {seed}");

    let (label, max_violation) = match args.property {
        PropertyArg::Subadditivity
        | PropertyArg::Homogeneity
        | PropertyArg::Convexity
        | PropertyArg::UnitaryInvariance => {
            let property = match args.property {
                PropertyArg::Subadditivity => MapProperty::Subadditivity,
                PropertyArg::Homogeneity => MapProperty::Homogeneity,
                PropertyArg::Convexity => MapProperty::Convexity,
                PropertyArg::UnitaryInvariance => MapProperty::UnitaryInvariance,
                _ => unreachable!(),
            };
            let report = verify_property(property, m, n, args.trials, seed)?;
            (property.label(), report.max_violation)
        }
        PropertyArg::ConjugateOrder
        | PropertyArg::RestrictionMonotonicity
        | PropertyArg::NormMonotonicity => {
            let invariant = match args.property {
                PropertyArg::ConjugateOrder => OrderInvariant::ConjugateOrder,
                PropertyArg::RestrictionMonotonicity => OrderInvariant::RestrictionMonotonicity,
                PropertyArg::NormMonotonicity => OrderInvariant::NormMonotonicity,
                _ => unreachable!(),
            };
            let report = verify_order_invariant(invariant, m, n, args.trials, seed)?;
            (invariant.label(), report.max_violation)
        }
    };

    let pass = max_violation <= args.tol;
    println!("property = {label}");
    println!("max_violation = {}", fmt(max_violation));
    println!("tol = {}", fmt(args.tol));
    println!("pass = {pass}");
    Ok(if pass { 0 } else { 1 })
}
