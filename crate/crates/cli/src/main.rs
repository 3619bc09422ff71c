use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sigmacheck::bench::{self, GridSpec, DEFAULT_GT_SAMPLES};
use sigmacheck::scenario::{generate_suite, load_scenario, load_scenario_dir, save_scenario, scenario_to_json};
use sigmacheck::{generate, Checker, CheckerConfig, CollisionResult, Error, GeneratorSpec, Scenario, Scheme, Template};

#[derive(Parser)]
#[command(name = "sigmacheck", version, about = "Collision probability for Gaussian pose trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Final collision probability for every ego pair in a scenario.
    Check(CheckArgs),
    /// Generate synthetic scenario files.
    Gen(GenArgs),
    /// Per-step collision probability from every scheme, side by side.
    Curve(CurveArgs),
    /// Accuracy and latency against a Monte Carlo reference.
    Bench(BenchArgs),
    /// Grid search over sigma_max, w_min and d_max.
    Grid(GridArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SchemeArg {
    Adaptive,
    Unscented,
    GaussHermite,
    MonteCarlo,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, value_enum, default_value = "adaptive")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 3.8)]
    sigma_max: f64,
    #[arg(long, default_value_t = 0.01)]
    w_min: f64,
    /// Metres.
    #[arg(long, default_value_t = 1.625)]
    d_max: f64,
    #[arg(long, default_value_t = 4)]
    p_max: u32,
    /// Unscented spread parameter.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Gauss-Hermite points per axis.
    #[arg(long, default_value_t = 8)]
    gh_degree: usize,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 2000)]
    mc_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable the ellipse and bounding-radius prefilters.
    #[arg(long)]
    no_prefilter: bool,
    /// Compare the axis variance itself against d_max.
    #[arg(long)]
    literal_spacing: bool,
}

impl ConfigArgs {
    fn scheme(&self) -> Scheme {
        match self.scheme {
            SchemeArg::Adaptive => Scheme::Adaptive,
            SchemeArg::Unscented => Scheme::Unscented { kappa: self.kappa },
            SchemeArg::GaussHermite => Scheme::GaussHermite { degree: self.gh_degree },
            SchemeArg::MonteCarlo => Scheme::MonteCarlo { n: self.mc_n, seed: self.seed },
        }
    }

    fn config(&self) -> CheckerConfig {
        CheckerConfig {
            sigma_max: self.sigma_max,
            w_min: self.w_min,
            d_max: self.d_max,
            p_max: self.p_max,
            scheme: self.scheme(),
            prefilters_enabled: !self.no_prefilter,
            literal_spacing_rule: self.literal_spacing,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// Also write the per-step curve as CSV (`-` for stdout).
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "crossing")]
    template: TemplateArg,
    #[arg(long, default_value_t = 60)]
    k: usize,
    /// Seconds.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Metres per second.
    #[arg(long, default_value_t = 8.0)]
    base_speed: f64,
    #[arg(long, default_value_t = 0.03)]
    noise_growth: f64,
    #[arg(long, default_value_t = 0.6)]
    pos_yaw_corr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generate this many scenarios cycling through all templates into
    /// `--out`, which is then a directory.
    #[arg(long)]
    suite: Option<usize>,
    /// Output file (or directory with `--suite`); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TemplateArg {
    Crossing,
    HeadOn,
    Merging,
    Creeping,
    Overtake,
}

impl From<TemplateArg> for Template {
    fn from(t: TemplateArg) -> Self {
        match t {
            TemplateArg::Crossing => Template::Crossing,
            TemplateArg::HeadOn => Template::HeadOn,
            TemplateArg::Merging => Template::Merging,
            TemplateArg::Creeping => Template::Creeping,
            TemplateArg::Overtake => Template::Overtake,
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 8)]
    gh_degree: usize,
    #[arg(long, default_value_t = DEFAULT_GT_SAMPLES)]
    mc_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    /// Directory of scenario JSON files.
    #[arg(long, conflicts_with = "generate")]
    scenarios: Option<PathBuf>,
    /// Generate a suite of this many scenarios instead.
    #[arg(long)]
    generate: Option<usize>,
    /// Seed of the first generated scenario.
    #[arg(long, default_value_t = 0)]
    suite_seed: u64,
    /// Monte Carlo reference sample count.
    #[arg(long, default_value_t = DEFAULT_GT_SAMPLES)]
    gt_n: usize,
}

impl SourceArgs {
    fn load(&self) -> anyhow::Result<Vec<Scenario>> {
        let scenarios = match (&self.scenarios, self.generate) {
            (Some(dir), _) => load_scenario_dir(dir).with_context(|| format!("loading {}", dir.display()))?,
            (None, Some(n)) => generate_suite(n, &GeneratorSpec { seed: self.suite_seed, ..Default::default() })?,
            (None, None) => bail!(Error::InvalidParams("pass --scenarios DIR or --generate N".into())),
        };
        if scenarios.is_empty() {
            bail!(Error::InvalidParams("no scenarios found".into()));
        }
        Ok(scenarios)
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Writes records.csv, summary.csv and dense.csv here.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_values_t = GridSpec::default().sigma_max)]
    sigma_max: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = GridSpec::default().w_min)]
    w_min: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = GridSpec::default().d_max)]
    d_max: Vec<f64>,
    /// Timed runs per check; the median is kept.
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => {
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Guards the result invariants before anything is reported.
fn checked(r: CollisionResult) -> anyhow::Result<CollisionResult> {
    let c = &r.p_collision_curve;
    let ok = c.windows(2).all(|w| w[1] >= w[0])
        && c.iter().all(|p| (0.0..=1.0).contains(p))
        && c.last() == Some(&r.p_collision_final);
    if !ok {
        bail!(Error::Invariant(format!("collision curve is not a valid cumulative probability: {c:?}")));
    }
    Ok(r)
}

fn load(path: &Path) -> anyhow::Result<Scenario> {
    load_scenario(path).with_context(|| format!("loading {}", path.display()))
}

fn run_check(args: CheckArgs) -> anyhow::Result<()> {
    let scenario = load(&args.scenario)?;
    let checker = Checker::new(args.config.config())?;
    let ego = &scenario.agents[0];
    let mut results = Vec::new();
    for other in &scenario.agents[1..] {
        results.push((other, checked(checker.check_agents(ego, other)?)?));
    }

    let mut out = io::stdout().lock();
    writeln!(out, "agent_a,agent_b,p_collision")?;
    for (other, r) in &results {
        writeln!(out, "{},{},{:.6}", ego.name, other.name, r.p_collision_final)?;
    }
    out.flush()?;

    if let Some(path) = &args.curve {
        let mut w = output(Some(path))?;
        writeln!(w, "pair,step,time_s,p_collision")?;
        for (other, r) in &results {
            let times = other.trajectory.poses().iter().map(|p| p.time);
            for (k, (t, p)) in times.zip(&r.p_collision_curve).enumerate() {
                writeln!(w, "{}-{},{k},{t},{p}", ego.name, other.name)?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> anyhow::Result<()> {
    let spec = GeneratorSpec {
        template: args.template.into(),
        k: args.k,
        dt: args.dt,
        base_speed: args.base_speed,
        noise_growth: args.noise_growth,
        pos_yaw_corr: args.pos_yaw_corr,
        seed: args.seed,
    };
    match args.suite {
        Some(n) => {
            let Some(dir) = args.out else {
                bail!(Error::InvalidParams("--suite needs --out DIR".into()));
            };
            fs::create_dir_all(&dir)?;
            for s in generate_suite(n, &spec)? {
                save_scenario(&s, dir.join(format!("{}.json", s.id)))?;
            }
            log::info!("wrote {n} scenarios to {}", dir.display());
        }
        None => {
            let s = generate(&spec)?;
            let mut w = output(args.out.as_deref())?;
            writeln!(w, "{}", scenario_to_json(&s))?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run_curve(args: CurveArgs) -> anyhow::Result<()> {
    let scenario = load(&args.scenario)?;
    let schemes = [
        Scheme::Adaptive,
        Scheme::Unscented { kappa: args.kappa },
        Scheme::GaussHermite { degree: args.gh_degree },
        Scheme::MonteCarlo { n: args.mc_n, seed: args.seed },
    ];
    let checkers = schemes
        .iter()
        .map(|&s| Checker::new(CheckerConfig::default().with_scheme(s)))
        .collect::<Result<Vec<_>, _>>()?;

    let ego = &scenario.agents[0];
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "pair,step,time_s,adaptive,unscented,gauss_hermite,monte_carlo")?;
    for other in &scenario.agents[1..] {
        let curves = checkers
            .iter()
            .map(|c| Ok(checked(c.check_agents(ego, other)?)?.p_collision_curve))
            .collect::<anyhow::Result<Vec<_>>>()?;
        for (k, pose) in other.trajectory.poses().iter().enumerate() {
            write!(w, "{}-{},{k},{}", ego.name, other.name, pose.time)?;
            for c in &curves {
                write!(w, ",{}", c[k])?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let scenarios = args.source.load()?;
    let cfg = args.config.config();
    log::info!("evaluating {} scenarios (reference n = {})", scenarios.len(), args.source.gt_n);
    let eval = bench::evaluate(&scenarios, &cfg, args.source.gt_n, args.config.seed)?;
    for (id, why) in &eval.failures {
        log::warn!("{id}: {why}");
    }
    fs::create_dir_all(&args.out_dir)?;
    bench::write_records_csv(File::create(args.out_dir.join("records.csv"))?, &eval.records)?;
    bench::write_summary_csv(File::create(args.out_dir.join("summary.csv"))?, &eval.summary)?;
    let dense = bench::compare_dense(&scenarios, &cfg)?;
    bench::write_dense_csv(File::create(args.out_dir.join("dense.csv"))?, &dense)?;
    bench::write_summary_csv(io::stdout().lock(), &eval.summary)?;
    Ok(())
}

fn run_grid(args: GridArgs) -> anyhow::Result<()> {
    let scenarios = args.source.load()?;
    let grid = GridSpec {
        sigma_max: args.sigma_max,
        w_min: args.w_min,
        d_max: args.d_max,
        repetitions: args.repetitions,
    };
    let rows = bench::grid_search(&scenarios, &grid, &CheckerConfig::default(), args.source.gt_n, args.seed)?;
    bench::write_grid_csv(output(args.out.as_deref())?, &rows)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if !e.is_input_error() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Check(a) => run_check(a),
        Command::Gen(a) => run_gen(a),
        Command::Curve(a) => run_curve(a),
        Command::Bench(a) => run_bench(a),
        Command::Grid(a) => run_grid(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
