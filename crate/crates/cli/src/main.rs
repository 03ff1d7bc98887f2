//! `morrap`: defuzzify fuzzy reliabilities, build payoff tables and solve
//! reliability-redundancy allocation problems from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morrap_core::output::{self, DefuzzOutput, Format, GeneratedRow};
use morrap_core::pipeline::{
    compare_t1_it2, defuzz_deviations, defuzzify_all, emit_pareto, payoff_section, prepare,
    run_pipeline, AtStage, MethodChoice, MethodParams, RunOptions, StageError, StageResult,
    METHODS_GROUP,
};
use morrap_core::{
    moo::{AnchorSource, Classification, ConvergenceNormalization, GlobalVariant, Norm},
    Error, ErrorKind, GenerationSpec, ProblemConfig, Stage, DEFAULT_GRID,
};

#[derive(Parser)]
#[command(name = "morrap", version, about = "Fuzzy reliability-redundancy allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (TOML or JSON); the bundled plant instance if omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// `strict` (caps of 3) or `reproduce` (caps of 5).
    #[arg(long, global = true, default_value = "strict")]
    profile: String,

    /// Grid points for the discretized reductions.
    #[arg(long, global = true, env = "MORRAP_GRID", default_value_t = DEFAULT_GRID)]
    grid: usize,

    /// Upper limit on the number of enumerated designs.
    #[arg(long, global = true, default_value_t = morrap_core::solver::DEFAULT_BUDGET)]
    budget: u64,

    /// `csv` or `json`.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for generated fuzzy reliabilities; the configured seed if omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce every fuzzy reliability by all four methods.
    Defuzzify,
    /// Individual optima of reliability and cost.
    Payoff(RunArgs),
    /// Solve with one or all scalarizations.
    Solve(SolveArgs),
    /// Exact Pareto front and a weighted-sum sweep over it.
    Pareto(ParetoArgs),
    /// Type-1 versus interval type-2 reliabilities, side by side.
    Compare(SolveArgs),
    /// Generate type-1 and interval type-2 fuzzy reliabilities.
    Gen(GenArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// km, ub, nt, gc or t1-centroid.
    #[arg(long, default_value = "km")]
    reduction: String,

    /// Use the published crisp values instead of recomputing them.
    #[arg(long)]
    reference_values: bool,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,

    /// global, weighted, desirability, fuzzy, nimbus or all.
    #[arg(long, default_value = "all")]
    method: String,

    /// Norm of the global criterion: a number ≥ 1 or `inf`.
    #[arg(long, default_value = "2")]
    p: String,

    /// Global criterion normalization: `range` or `ideal`.
    #[arg(long, default_value = "range")]
    variant: String,

    /// Anchors of the global criterion and weighted sum: `region` or `payoff`.
    #[arg(long, default_value = "region")]
    anchors: String,

    /// Weighted-sum weights as `w_reliability,w_cost`.
    #[arg(long, default_value = "0.5,0.5")]
    weights: String,

    /// Reliability exponent of the desirability function; 1 and 0.5 if omitted.
    #[arg(long)]
    t1: Option<f64>,

    /// Cost exponent of the desirability function.
    #[arg(long, default_value_t = 0.1)]
    t2: f64,

    /// Reliability class: improve, aspiration:X, satisfactory, bound:X or free.
    #[arg(long, default_value = "free")]
    nimbus_reliability: String,

    /// Cost class: improve, aspiration:X, satisfactory, bound:X or free.
    #[arg(long, default_value = "improve")]
    nimbus_cost: String,

    /// Augmentation coefficient of the classification method.
    #[arg(long, default_value_t = morrap_core::moo::Nimbus::DEFAULT_RHO)]
    rho: f64,

    /// Distance normalization: `ideal` or `range`.
    #[arg(long, default_value = "ideal")]
    convergence: String,
}

#[derive(Args, Clone)]
struct ParetoArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Read the written front back and check it against the instance.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Clone)]
struct GenArgs {
    /// Lower end of the support.
    #[arg(long)]
    a: Option<f64>,

    /// Upper end of the support.
    #[arg(long)]
    b: Option<f64>,

    /// Comma-separated crisp reliabilities to fuzzify.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> StageResult<T> {
    s.parse().at(Stage::Load)
}

fn load(cli: &Cli) -> StageResult<ProblemConfig> {
    let config = match &cli.config {
        Some(p) => ProblemConfig::load(p).at(Stage::Load)?,
        None => ProblemConfig::bundled(),
    };
    match (cli.seed, &cli.command) {
        (Some(seed), command) if !matches!(command, Command::Gen(_)) => {
            config.with_seed(seed).at(Stage::Load)
        }
        _ => Ok(config),
    }
}

fn base_options(cli: &Cli, run: &RunArgs) -> StageResult<RunOptions> {
    Ok(RunOptions {
        reduction: parse(&run.reduction)?,
        profile: parse(&cli.profile)?,
        grid: cli.grid,
        budget: cli.budget,
        reference_values: run.reference_values,
        ..RunOptions::default()
    })
}

fn solve_options(cli: &Cli, a: &SolveArgs) -> StageResult<RunOptions> {
    let (w1, w2) = a
        .weights
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("weights `{}` must be `w1,w2`", a.weights)))
        .and_then(|(x, y)| {
            let f = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("weight `{s}`: {e}")))
            };
            Ok((f(x)?, f(y)?))
        })
        .at(Stage::Load)?;
    let anchors: AnchorSource = parse(&a.anchors)?;
    let defaults = MethodParams::default();
    let params = MethodParams {
        p: parse::<Norm>(&a.p)?,
        global_variant: parse::<GlobalVariant>(&a.variant)?,
        global_anchors: anchors,
        weights: (w1, w2),
        weighted_anchors: anchors,
        t1: a.t1.map_or(defaults.t1.clone(), |k| vec![k]),
        t2: a.t2,
        nimbus_reliability: parse::<Classification>(&a.nimbus_reliability)?,
        nimbus_cost: parse::<Classification>(&a.nimbus_cost)?,
        rho: a.rho,
        ..defaults
    };
    Ok(RunOptions {
        methods: parse::<MethodChoice>(&a.method)?,
        params,
        convergence: parse::<ConvergenceNormalization>(&a.convergence)?,
        ..base_options(cli, &a.run)?
    })
}

fn generated(config: &ProblemConfig, seed: Option<u64>, a: &GenArgs) -> morrap_core::Result<Vec<GeneratedRow>> {
    let base = config.generation().cloned().unwrap_or(GenerationSpec {
        a: GenerationSpec::DEFAULT_A,
        b: GenerationSpec::DEFAULT_B,
        seed: 0,
        r_values: Vec::new(),
    });
    let spec = GenerationSpec::new(
        a.a.unwrap_or(base.a),
        a.b.unwrap_or(base.b),
        seed.unwrap_or(base.seed),
        a.r.clone().unwrap_or(base.r_values),
    )?;
    let t1 = spec.generate_t1_set()?;
    let it2 = spec.generate_it2_set()?;
    Ok(spec
        .r_values
        .iter()
        .zip(t1)
        .zip(it2)
        .enumerate()
        .map(|(i, ((&r, t1), it2))| GeneratedRow { index: i + 1, r, t1, it2 })
        .collect())
}

fn run(cli: &Cli) -> StageResult<()> {
    let format: Format = parse(&cli.format)?;
    let config = load(cli)?;
    let mut buf = Vec::new();
    match &cli.command {
        Command::Defuzzify => {
            let rows = defuzzify_all(&config, cli.grid).at(Stage::Defuzzify)?;
            let deviations = defuzz_deviations(&rows);
            let o = DefuzzOutput { rows: &rows, deviations: &deviations };
            output::write_defuzz(&o, format, &mut buf).at(Stage::Report)?;
        }
        Command::Payoff(a) => {
            let opts = base_options(cli, a)?;
            let (_, _, solved) = prepare(&config, &opts)?;
            let p = payoff_section(&config, opts.reduction, &solved.payoff, METHODS_GROUP);
            output::write_payoff(&p, format, &mut buf).at(Stage::Report)?;
        }
        Command::Solve(a) => {
            let report = run_pipeline(&config, &solve_options(cli, a)?)?;
            output::write_report(&report, format, &mut buf).at(Stage::Report)?;
        }
        Command::Compare(a) => {
            let c = compare_t1_it2(&config, &solve_options(cli, a)?)?;
            output::write_comparison(&c, format, &mut buf).at(Stage::Report)?;
        }
        Command::Pareto(a) => {
            let opts = base_options(cli, &a.run)?;
            let export = emit_pareto(&config, &opts)?;
            output::write_front(&export, format, &mut buf).at(Stage::Report)?;
            if a.verify {
                if format != Format::Csv {
                    return Err(Error::InvalidParameter("--verify needs --format csv".into()))
                        .at(Stage::Load);
                }
                let (_, _, solved) = prepare(&config, &opts)?;
                let records = output::read_front(buf.as_slice()).at(Stage::Report)?;
                output::verify_front(&solved.instance, &records).at(Stage::Report)?;
                eprintln!(
                    "verified {} front points and {} sweep points",
                    export.front.len(),
                    export.sweep.len()
                );
            }
        }
        Command::Gen(a) => {
            let rows = generated(&config, cli.seed, a).at(Stage::Load)?;
            output::write_generated(&rows, format, &mut buf).at(Stage::Report)?;
        }
    }
    emit(cli, &buf).at(Stage::Report)
}

fn emit(cli: &Cli, bytes: &[u8]) -> morrap_core::Result<()> {
    match &cli.out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn exit_code(e: &StageError) -> u8 {
    match e.kind() {
        ErrorKind::Input => 2,
        ErrorKind::Infeasible => 3,
        ErrorKind::Degenerate => 4,
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(v) = std::env::var("MORRAP_WORKERS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("MORRAP_WORKERS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("MORRAP_WORKERS must be a positive integer, got `0`".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("morrap: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("morrap: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
