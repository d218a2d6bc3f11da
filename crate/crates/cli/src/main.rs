//! `gptcap`: command-line front end. Each subcommand runs one library
//! operation, prints a short summary and, with `--out DIR`, writes the
//! report rows as `<command>.csv` and `<command>.json`.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on bad
//! usage or input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gptcap::asymptotic::{min_max_gap_probe, rate_sweep, SweepOptions};
use gptcap::capacity::{
    capacity_report, lemma3_construct, lemma3_verify, random_coding_bound_check, simplex_grid, theorem1_upper_bound,
    theorem2_lower_bound, CapacityOptions, EncoderSampling, LemmaThreeInput, SandwichOptions, Theorem2Grid,
    Theorem2Params, EXHAUSTIVE_LIMIT,
};
use gptcap::gpt::{validate_model, ClassicalToGPTChannel, ConeModel, Effect, Measurement, State, ValidationOptions};
use gptcap::hypothesis::{dht, dpi_check, left_continuity_probe, monotonicity_scan};
use gptcap::io::{format_vector, load_channel_with, parse_vector_arg, resolve_model, LoadedModel};
use gptcap::rational::{format_rational, int, parse_rational, ratio};
use gptcap::report::{self, write_csv, write_json};
use gptcap::sampling::{random_effect, random_measurement, random_state, rational_between, rng};
use gptcap::{Error, Rational};

#[derive(Parser)]
#[command(name = "gptcap", version, about = "Exact one-shot capacity bounds for classical-to-GPT channels")]
struct Cli {
    /// Directory for CSV and JSON reports (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of a cone model.
    Validate(ValidateArgs),
    /// Hypothesis-testing relative entropy of two states.
    Dht(DhtArgs),
    /// Data processing under measurements.
    DpiCheck(DpiArgs),
    /// Monotonicity scan and left-continuity probe of beta*.
    Continuity(ContinuityArgs),
    /// Exact one-shot capacity with both bounds.
    Capacity(CapacityArgs),
    /// Converse and achievability bounds without the exact value.
    Bounds(BoundsArgs),
    /// Decoder construction from an effect family.
    Lemma3(Lemma3Args),
    /// Random-coding chain for a fixed message count.
    RandomCoding(RandomCodingArgs),
    /// Per-use rates over repeated channel uses.
    Sweep(SweepArgs),
    /// Minimal versus maximal tensor product of two copies of a model.
    GapProbe(GapArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Model file, or `builtin:NAME`.
    #[arg(long)]
    model: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Args)]
struct DhtArgs {
    #[arg(long)]
    model: String,
    /// State name from the model file, or coordinates `a,b,...`.
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[arg(long, allow_hyphen_values = true)]
    eps: String,
}

#[derive(Args)]
struct DpiArgs {
    #[arg(long)]
    model: String,
    /// Random instances to check instead of one explicit instance.
    #[arg(long, requires = "seed", conflicts_with_all = ["rho", "sigma", "eps", "effect"])]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, requires_all = ["sigma", "eps", "effect"])]
    rho: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// One effect of the measurement; repeat for each outcome.
    #[arg(long, allow_hyphen_values = true)]
    effect: Vec<String>,
}

#[derive(Args)]
struct ContinuityArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value = "1/100")]
    eta: String,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    /// Monotonicity grid `0, 1/K, ..., 1`.
    #[arg(long, default_value_t = 20)]
    grid: i64,
}

#[derive(Args)]
struct CapacityArgs {
    /// Channel file.
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    /// Stop enumerating once a message count needs more encoders.
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long, default_value_t = 2)]
    k1: usize,
    #[arg(long, default_value_t = 2)]
    k2: usize,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 2)]
    k1: usize,
    #[arg(long, default_value_t = 2)]
    k2: usize,
}

#[derive(Args)]
struct Lemma3Args {
    #[arg(long)]
    model: String,
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: String,
    /// One effect of the family; repeat for each member.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "families")]
    effect: Vec<String>,
    /// Random families to check instead of an explicit one.
    #[arg(long, requires = "seed", conflicts_with = "effect")]
    families: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    size: usize,
}

#[derive(Args)]
struct RandomCodingArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps_prime: String,
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: String,
    /// Codeword distribution `p1,p2,...`; uniform when omitted.
    #[arg(long)]
    p: Option<String>,
    /// Sample this many encoders instead of enumerating all of them.
    #[arg(long, requires = "seed")]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    eps: String,
    /// Largest number of channel uses.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 5000)]
    budget: u128,
    #[arg(long, default_value_t = 64)]
    nmax: usize,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

/// A command's outcome: whether its checked property held.
type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Validate(a) => validate(a, out),
        Command::Dht(a) => run_dht(a, out),
        Command::DpiCheck(a) => run_dpi(a, out),
        Command::Continuity(a) => run_continuity(a, out),
        Command::Capacity(a) => run_capacity(a, out),
        Command::Bounds(a) => run_bounds(a, out),
        Command::Lemma3(a) => run_lemma3(a, out),
        Command::RandomCoding(a) => run_random_coding(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::GapProbe(a) => run_gap(a, out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(Error::ContradictionDetected(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GPTCAP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GPTCAP_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit<T: Serialize>(out: Option<&Path>, name: &str, rows: &[T]) -> Result<(), Error> {
    let Some(dir) = out else {
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    write_csv(&dir.join(format!("{name}.csv")), rows)?;
    write_json(&dir.join(format!("{name}.json")), &rows)
}

fn rational(text: &str, what: &str) -> Result<Rational, Error> {
    parse_rational(text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            location: what.into(),
            message,
        },
        other => other,
    })
}

fn load(spec: &str) -> Result<LoadedModel, Error> {
    resolve_model(spec, Path::new("."), &ValidationOptions::default())
}

/// A named state of the model file, or explicit coordinates.
fn state(loaded: &LoadedModel, arg: &str) -> Result<State, Error> {
    if loaded.states.contains_key(arg) {
        return loaded.state(arg).cloned();
    }
    State::new(&loaded.model, parse_vector_arg(arg)?)
}

fn effects(model: &Arc<ConeModel>, args: &[String]) -> Result<Vec<Effect>, Error> {
    args.iter().map(|a| Effect::new(model, parse_vector_arg(a)?)).collect()
}

fn channel(path: &Path) -> Result<ClassicalToGPTChannel, Error> {
    load_channel_with(path, &ValidationOptions::default())
}

fn validate(a: &ValidateArgs, out: Option<&Path>) -> Outcome {
    let opts = ValidationOptions {
        trials: a.trials,
        seed: a.seed,
        check_polar: true,
    };
    let loaded = resolve_model(&a.model, Path::new("."), &opts)?;
    let rep = validate_model(&loaded.model, &opts)?;
    println!(
        "{}: dim {}, {} primal rays, {} dual rays; passed {}",
        rep.model,
        rep.dim,
        rep.primal_rays,
        rep.dual_rays,
        rep.checks.join(", ")
    );
    emit(out, "validate", &[report::ValidationRow::new(&rep)])?;
    Ok(true)
}

fn run_dht(a: &DhtArgs, out: Option<&Path>) -> Outcome {
    let loaded = load(&a.model)?;
    let rho = state(&loaded, &a.rho)?;
    let sigma = state(&loaded, &a.sigma)?;
    let eps = rational(&a.eps, "--eps")?;
    let r = dht(&rho, &sigma, &eps)?;
    println!(
        "beta_star={} D={} optimal_q=({})",
        format_rational(&r.beta_star),
        r.d_value,
        format_vector(&r.optimal_q.coords().0)
    );
    emit(out, "dht", &[report::DhtRow::new(loaded.model.name(), &a.rho, &a.sigma, &r)])?;
    Ok(true)
}

fn run_dpi(a: &DpiArgs, out: Option<&Path>) -> Outcome {
    let loaded = load(&a.model)?;
    let model = &loaded.model;
    let mut rows = Vec::new();
    if let Some(count) = a.instances {
        let mut r = rng(a.seed.expect("clap requires --seed"));
        for i in 0..count {
            let rho = random_state(&mut r, model);
            let sigma = random_state(&mut r, model);
            let outcomes = 2 + i % 3;
            let meas = random_measurement(&mut r, model, outcomes);
            let eps = rational_between(&mut r, &int(0), &int(1), 10);
            rows.push(report::DpiRow::new(&format!("{}#{i}", model.name()), &dpi_check(&rho, &sigma, &eps, &meas)?));
        }
    } else {
        let (Some(rho), Some(sigma), Some(eps)) = (&a.rho, &a.sigma, &a.eps) else {
            return Err(Error::InvalidArgument(
                "give --rho, --sigma, --eps and --effect, or --instances with --seed".into(),
            ));
        };
        let rho = state(&loaded, rho)?;
        let sigma = state(&loaded, sigma)?;
        let eps = rational(eps, "--eps")?;
        let effs: Vec<_> = effects(model, &a.effect)?.iter().map(|e| e.coords().clone()).collect();
        let meas = Measurement::new(model, effs)?;
        rows.push(report::DpiRow::new(model.name(), &dpi_check(&rho, &sigma, &eps, &meas)?));
    }
    let violations = rows.iter().filter(|r| !r.holds).count();
    println!("{} instances, {} violations", rows.len(), violations);
    emit(out, "dpi", &rows)?;
    Ok(violations == 0)
}

fn run_continuity(a: &ContinuityArgs, out: Option<&Path>) -> Outcome {
    if a.grid < 1 {
        return Err(Error::InvalidArgument("--grid must be at least 1".into()));
    }
    let loaded = load(&a.model)?;
    let rho = state(&loaded, &a.rho)?;
    let sigma = state(&loaded, &a.sigma)?;
    let eps = rational(&a.eps, "--eps")?;
    let eta = rational(&a.eta, "--eta")?;
    let grid: Vec<Rational> = (0..=a.grid).map(|i| ratio(i, a.grid)).collect();
    let mono = monotonicity_scan(&rho, &sigma, &grid)?;
    let cont = left_continuity_probe(&rho, &sigma, &eps, &eta, a.steps)?;
    let name = loaded.model.name();
    println!(
        "non-increasing on {} grid points: {}; alpha={} delta={}; left-continuity bound holds on {} probes: {}",
        grid.len(),
        mono.non_increasing,
        format_rational(&cont.alpha),
        format_rational(&cont.delta),
        cont.probes.len(),
        cont.holds
    );
    emit(out, "monotonicity", &report::monotonicity_rows(name, &mono))?;
    emit(out, "continuity", &report::continuity_rows(name, &cont))?;
    Ok(mono.non_increasing && cont.holds)
}

fn run_capacity(a: &CapacityArgs, out: Option<&Path>) -> Outcome {
    let ch = channel(&a.channel)?;
    let eps = rational(&a.eps, "--eps")?;
    let opts = SandwichOptions {
        capacity: CapacityOptions {
            n_max: a.nmax,
            encoder_budget: a.budget.unwrap_or(u128::MAX),
        },
        theorem1_k: a.k1,
        theorem2_k: a.k2,
        theorem2_params: None,
    };
    let rep = capacity_report(&ch, &eps, &opts)?;
    println!(
        "N*={} exact_bits={} lower_bits={} upper_bits={} truncated={} sandwich_holds={}",
        rep.exact.n_star,
        rep.exact_bits(),
        rep.lower_bound_bits(),
        rep.upper_bound_bits(),
        rep.exact.truncated,
        rep.sandwich_holds()
    );
    emit(out, "capacity", &[report::CapacityRow::new(ch.name(), &rep)])?;
    emit(out, "best_errors", &report::best_error_rows(ch.name(), &rep))?;
    Ok(rep.sandwich_holds() && rep.converse.holds)
}

fn run_bounds(a: &BoundsArgs, out: Option<&Path>) -> Outcome {
    let ch = channel(&a.channel)?;
    let eps = rational(&a.eps, "--eps")?;
    let t1 = theorem1_upper_bound(&ch, &eps, a.k1, &[])?;
    let grid = Theorem2Grid {
        distributions: simplex_grid(ch.letters(), a.k2),
        params: Theorem2Grid::default_params(&eps),
    };
    let t2 = match theorem2_lower_bound(&ch, &eps, &grid) {
        Ok(b) => Some(b),
        Err(Error::EmptyGrid(_)) => None,
        Err(e) => return Err(e),
    };
    println!(
        "upper_bits={} lower_bits={}",
        t1.bits(),
        t2.as_ref().map_or(0.0, |b| b.best.bits)
    );
    emit(out, "bounds", &report::bound_rows(ch.name(), &eps, &t1, t2.as_ref()))?;
    Ok(true)
}

fn run_lemma3(a: &Lemma3Args, out: Option<&Path>) -> Outcome {
    let loaded = load(&a.model)?;
    let model = &loaded.model;
    let s = rational(&a.s, "--s")?;
    let t = rational(&a.t, "--t")?;
    let families: Vec<(String, Vec<Effect>)> = match a.families {
        Some(count) => {
            let mut r = rng(a.seed.expect("clap requires --seed"));
            (0..count)
                .map(|i| {
                    let fam = (0..a.size).map(|_| random_effect(&mut r, model)).collect();
                    (format!("{}#{i}", model.name()), fam)
                })
                .collect()
        }
        None => vec![(model.name().to_string(), effects(model, &a.effect)?)],
    };
    let mut rows = Vec::new();
    for (name, fam) in families {
        let input = LemmaThreeInput::new(fam, s.clone(), t.clone())?;
        let built = lemma3_construct(&input)?;
        let verified = lemma3_verify(&input, &built.measurement)?;
        rows.push(report::Lemma3Row::new(&name, &s, &t, &built, &verified));
    }
    let failed = rows.iter().filter(|r| !r.verified).count();
    let indicator = rows.iter().filter(|r| r.indicator_verified).count();
    println!(
        "{} families, {} verified, {} by the indicator rule alone",
        rows.len(),
        rows.len() - failed,
        indicator
    );
    emit(out, "lemma3", &rows)?;
    Ok(failed == 0)
}

fn run_random_coding(a: &RandomCodingArgs, out: Option<&Path>) -> Outcome {
    let ch = channel(&a.channel)?;
    let p = match &a.p {
        Some(text) => parse_vector_arg(text)?.0,
        None => vec![ratio(1, ch.letters() as i64); ch.letters()],
    };
    let params = Theorem2Params::new(
        rational(&a.eps_prime, "--eps-prime")?,
        rational(&a.s, "--s")?,
        rational(&a.t, "--t")?,
    );
    let sampling = match a.trials {
        Some(trials) => EncoderSampling::Sampled {
            trials,
            seed: a.seed.expect("clap requires --seed"),
        },
        None => {
            let size = (ch.letters() as u64).checked_pow(a.n as u32);
            if size.map_or(true, |s| s > EXHAUSTIVE_LIMIT) {
                return Err(Error::ScaleExceeded(format!(
                    "{}^{} encoders; pass --trials and --seed to sample",
                    ch.letters(),
                    a.n
                )));
            }
            EncoderSampling::Exhaustive
        }
    };
    let rep = random_coding_bound_check(&ch, &p, a.n, &params, sampling)?;
    println!(
        "encoders={} expected_error={} final_bound={} holds={}",
        rep.encoders,
        format_rational(&rep.expected_error),
        format_rational(&rep.final_bound),
        rep.holds
    );
    emit(out, "random_coding", &[report::RandomCodingRow::new(ch.name(), &rep)])?;
    Ok(rep.holds)
}

fn run_sweep(a: &SweepArgs, out: Option<&Path>) -> Outcome {
    let ch = channel(&a.channel)?;
    let eps = rational(&a.eps, "--eps")?;
    let opts = SweepOptions {
        encoder_budget: a.budget,
        n_max: a.nmax,
        ..SweepOptions::default()
    };
    let rep = rate_sweep(&ch, &eps, a.m, &opts)?;
    for row in &rep.rows {
        println!(
            "m={} N*={} bits_per_use={} sandwich_holds={}",
            row.m,
            row.n_star,
            row.per_use(row.exact_bits),
            row.sandwich_holds()
        );
    }
    emit(out, "sweep", &report::sweep_rows(&rep))?;
    Ok(rep.sandwich_holds())
}

fn run_gap(a: &GapArgs, out: Option<&Path>) -> Outcome {
    let loaded = load(&a.model)?;
    let rep = min_max_gap_probe(&loaded.model, 2, a.trials, a.seed)?;
    println!(
        "{} samples: {} in min, {} in max, {} in the gap",
        rep.trials, rep.in_min, rep.in_max, rep.gap
    );
    emit(out, "gap_probe", &[report::GapRow::new(&rep)])?;
    Ok(rep.consistent())
}
