use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use cfex::bench::{self, BenchConfig};
use cfex::format::{self, InstanceFile};
use cfex::report::{self, ResultDoc};
use cfex::spec::{FavoredSpec, MutableSpec};
use cfex::verify::{self, VerifyReport};
use cfex::{exit, Error, Result};
use cfex_core::instances::{generate, serialize_kplib, BoxBasis, Correlation, FavoredKind, KplibFormat};
use cfex_core::mip::{Deadline, Limits};
use cfex_core::oracle::{Ceilings, DEFAULT_GRID_CEILING, DEFAULT_MAX_ITEMS};
use cfex_core::{solve, Kind, Mode, SolveOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Optimal weak and strong counterfactual explanations for binary integer
/// programs with one mutable constraint.
#[derive(Parser)]
#[command(name = "cfex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an explanation and print it as JSON.
    Solve(SolveArgs),
    /// Compare the algorithms with brute-force enumeration.
    Verify(VerifyArgs),
    /// Run a benchmark sweep over generated instances.
    Bench(BenchArgs),
    /// Generate kplib-style instance files.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weak,
    Strong,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Weak => Kind::Weak,
            KindArg::Strong => Kind::Strong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Objective,
    Constraint,
    Rhs,
    All,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Objective => Mode::Objective,
            ModeArg::Constraint => Mode::Constraint,
            ModeArg::Rhs => Mode::Rhs,
            ModeArg::All => Mode::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KplibArg {
    /// Item lines are `profit weight`.
    Pw,
    /// Item lines are `weight profit`.
    Wp,
}

impl From<KplibArg> for KplibFormat {
    fn from(f: KplibArg) -> KplibFormat {
        match f {
            KplibArg::Pw => KplibFormat::ProfitWeight,
            KplibArg::Wp => KplibFormat::WeightProfit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrelationArg {
    Uncorrelated,
    Strong,
}

impl From<CorrelationArg> for Correlation {
    fn from(c: CorrelationArg) -> Correlation {
        match c {
            CorrelationArg::Uncorrelated => Correlation::Uncorrelated,
            CorrelationArg::Strong => Correlation::Strong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FavoredArg {
    #[value(name = "D+")]
    Positive,
    #[value(name = "D-")]
    Negative,
    #[value(name = "D>=")]
    AtLeast,
}

impl From<FavoredArg> for FavoredKind {
    fn from(f: FavoredArg) -> FavoredKind {
        match f {
            FavoredArg::Positive => FavoredKind::Positive,
            FavoredArg::Negative => FavoredKind::Negative,
            FavoredArg::AtLeast => FavoredKind::AtLeast,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Range,
    Coef,
}

#[derive(Args)]
struct InstanceArgs {
    /// Native `cfex-instance` file or kplib knapsack file.
    #[arg(long)]
    instance: PathBuf,
    /// Column order of kplib item lines.
    #[arg(long, value_enum, default_value = "pw")]
    kplib_format: KplibArg,
    /// Favored space, e.g. `fix+:3,7`, `fix-:2`, `atleast:1,4>=1`, `auto:D+:seed=5`.
    #[arg(long)]
    favored: Option<String>,
    /// Mutable space, e.g. `mode=constraint;pct=5;basis=range`.
    #[arg(long)]
    mutable: Option<String>,
    /// Overrides the mode of the mutable space.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

impl InstanceArgs {
    fn load(&self) -> Result<(InstanceFile, cfex_core::CeInstance)> {
        let file = format::load(&self.instance, self.kplib_format.into())?;
        let favored = self.favored.as_deref().map(FavoredSpec::parse).transpose()?;
        let mutable = self.mutable.as_deref().map(MutableSpec::parse).transpose()?;
        let inst = file.assemble(favored.as_ref(), mutable.as_ref(), self.mode.map(Mode::from))?;
        Ok((file, inst))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "weak")]
    kind: KindArg,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    /// Disable the lower bound that ends the value sweep early.
    #[arg(long)]
    no_lower_bound: bool,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance to verify; omit when using `--random`.
    #[arg(long, required_unless_present = "random")]
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pw")]
    kplib_format: KplibArg,
    #[arg(long)]
    favored: Option<String>,
    #[arg(long)]
    mutable: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Verify this many seeded random instances instead.
    #[arg(long, conflicts_with = "instance")]
    random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refuse grids with more points than this.
    #[arg(long, default_value_t = DEFAULT_GRID_CEILING)]
    max_grid: u128,
    /// Refuse instances with more items than this.
    #[arg(long, default_value_t = DEFAULT_MAX_ITEMS)]
    max_items: usize,
    /// Write the labelled grid as CSV (and an SVG next to it for 2-D grids).
    #[arg(long)]
    map_out: Option<PathBuf>,
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "uncorrelated,strong")]
    correlations: Vec<CorrelationArg>,
    /// Instances per (size, correlation) cell.
    #[arg(long, default_value_t = 5)]
    per_cell: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "weak,strong")]
    kinds: Vec<KindArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "constraint")]
    mode: ModeArg,
    /// Data range `R` of the generated instances.
    #[arg(long, default_value_t = 1000)]
    range: i64,
    /// Box half-width in percent.
    #[arg(long, default_value_t = 5)]
    pct: u32,
    #[arg(long, value_enum, default_value = "range")]
    basis: BasisArg,
    #[arg(long, value_enum, default_value = "D+")]
    favored: FavoredArg,
    /// Per-row wall-clock limit in seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    /// Run every row with and without the lower bound.
    #[arg(long)]
    ablate_lb: bool,
    /// Rows solved in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Run records; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Primal/dual trajectories as CSV.
    #[arg(long)]
    progress_out: Option<PathBuf>,
    /// Directory for the SVG plots.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    range: i64,
    #[arg(long, value_enum, default_value = "uncorrelated")]
    correlation: CorrelationArg,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn time_limit(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| Error::Usage(format!("invalid time limit {secs}")))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => cfex::write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let (_, inst) = args.instance.load()?;
    let deadline = Deadline::new(Some(time_limit(args.time_limit)?));
    let options = SolveOptions {
        limits: Limits::with_stopwatch(&deadline),
        lower_bound: !args.no_lower_bound,
        ..SolveOptions::default()
    };
    let result = solve(&inst, args.kind.into(), &options)?;
    let code = report::exit_code(result.status);
    let doc = ResultDoc::new(Some(args.instance.instance.display().to_string()), &inst, result);
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_out(args.out.as_deref(), &text)?;
    Ok(code)
}

fn write_map(path: &Path, report: &VerifyReport, inst: &cfex_core::CeInstance) -> Result<()> {
    cfex::write_file(path, verify::map_csv(&report.map)?)?;
    if let Some(svg) = verify::map_svg(&report.map, inst) {
        cfex::write_file(&path.with_extension("svg"), svg)?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let deadline = Deadline::new(Some(time_limit(args.time_limit)?));
    let options = SolveOptions { limits: Limits::with_stopwatch(&deadline), ..SolveOptions::default() };
    let ceilings = Ceilings { grid: args.max_grid, items: args.max_items };
    if let Some(count) = args.random {
        let mut agree = 0;
        for i in 0..count {
            let inst = verify::random_batch_instance(args.seed, i, args.max_grid.min(100_000))?;
            let report = verify::verify(&inst, &options, ceilings)?;
            if report.agrees() {
                agree += 1;
            } else {
                println!("seed {}: {}", args.seed.wrapping_add(i), report.summary());
            }
        }
        let verdict = if agree == count { "AGREE" } else { "DISAGREE" };
        println!("{verdict} {agree}/{count}");
        return Ok(if agree == count { exit::OPTIMAL } else { exit::DISAGREE });
    }
    let instance = InstanceArgs {
        instance: args.instance.clone().expect("clap requires an instance"),
        kplib_format: args.kplib_format,
        favored: args.favored.clone(),
        mutable: args.mutable.clone(),
        mode: args.mode,
    };
    let (_, inst) = instance.load()?;
    let report = verify::verify(&inst, &options, ceilings)?;
    println!("{}", report.summary());
    if let Some(path) = &args.map_out {
        write_map(path, &report, &inst)?;
    }
    Ok(if report.agrees() { exit::OPTIMAL } else { exit::DISAGREE })
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        correlations: args.correlations.iter().map(|&c| c.into()).collect(),
        per_cell: args.per_cell,
        kinds: args.kinds.iter().map(|&k| k.into()).collect(),
        seed: args.seed,
        mode: args.mode.into(),
        range: args.range,
        pct: args.pct,
        basis: match args.basis {
            BasisArg::Range => BoxBasis::DataRange(args.range),
            BasisArg::Coef => BoxBasis::PerCoefficient,
        },
        favored: args.favored.into(),
        time_limit: Some(time_limit(args.time_limit)?),
        ablate_lb: args.ablate_lb,
        jobs: args.jobs,
    };
    let runs = bench::run(&config);
    write_out(args.out.as_deref(), &bench::records_csv(&runs)?)?;
    if let Some(path) = &args.progress_out {
        cfex::write_file(path, bench::progress_csv(&runs)?)?;
    }
    if let Some(dir) = &args.svg_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
        for (name, svg) in bench::plots(&runs) {
            cfex::write_file(&dir.join(name), svg)?;
        }
    }
    if let Some(r) = bench::lower_bound_reduction(&runs) {
        eprintln!("lower bound reduces examined values by {:.1}% on average", 100.0 * r);
    }
    Ok(exit::OPTIMAL)
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let correlation: Correlation = args.correlation.into();
    let mut manifest = csv::Writer::from_writer(Vec::new());
    manifest.write_record(["file", "n", "range", "correlation", "seed"])?;
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i);
        let raw = generate(args.n, args.range, correlation, seed)?;
        let name = format!("{}-n{}-{seed}.kp", correlation.name(), args.n);
        cfex::write_file(&dir.join(&name), serialize_kplib(&raw, KplibFormat::ProfitWeight))?;
        manifest.write_record([
            name,
            args.n.to_string(),
            args.range.to_string(),
            correlation.name().into(),
            seed.to_string(),
        ])?;
    }
    let bytes = manifest.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    cfex::write_file(&dir.join("manifest.csv"), bytes)?;
    Ok(exit::OPTIMAL)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CE_LOG")).format_timestamp(None).init();
    // clap exits with 2 on bad usage, which is reserved for infeasibility here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OPTIMAL });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
