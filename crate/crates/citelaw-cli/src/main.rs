use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use citelaw::corpus::InputFormat;
use citelaw_cli::commands::{self, ScenarioKind, SimulateArgs};
use citelaw_cli::config::{
    apply_filter_kv, parse_emit, parse_percentiles, parse_window, GroupBy, KsMethodChoice,
    RunConfig, ShiftPolicy,
};
use citelaw_cli::CliError;

#[derive(Parser)]
#[command(
    name = "citelaw",
    version,
    about = "Citation-distribution rank analysis: percentile indicators, double-rank power laws, lognormality diagnostics and synthetic corpora"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Corpus file (JSONL or CSV)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted
    #[arg(long, global = true, value_enum)]
    format: Option<FormatOpt>,
    /// Journal metadata sidecar CSV (name,jif)
    #[arg(long, global = true)]
    journal_meta: Option<PathBuf>,
    /// Grouping key for per-group analyses
    #[arg(long, global = true, value_enum, default_value_t = GroupByOpt::Groups)]
    group_by: GroupByOpt,
    /// Filter expression key=value (group, journal, topic, years); repeatable
    #[arg(long = "filter", global = true)]
    filters: Vec<String>,
    /// Keep only records with exactly one group label
    #[arg(long, global = true)]
    single_group: bool,
    /// Declared publication window YYYY:YYYY; inferred when omitted
    #[arg(long, global = true)]
    pub_window: Option<String>,
    /// Reference year for citations-per-year tie-breaks; defaults to the
    /// year after the publication window
    #[arg(long, global = true)]
    reference_year: Option<i32>,
    /// Percentile marker list
    #[arg(long, global = true, default_value = "1,3,5,10,30,50,100")]
    percentiles: String,
    /// Relative spread below which serial ratios count as equal
    #[arg(long, global = true, default_value_t = 0.15)]
    tolerance: f64,
    /// Minimum numerator count for reporting a percentile ratio
    #[arg(long, global = true, default_value_t = 10)]
    min_support: usize,
    /// Seed for simulation and Monte Carlo p-values
    #[arg(long, global = true, env = "CITELAW_SEED", default_value_t = 42)]
    seed: u64,
    /// Monte Carlo replicates for the Lilliefors p-value
    #[arg(long, global = true, default_value_t = 5000)]
    mc_runs: usize,
    /// Log-transform offset policy
    #[arg(long, global = true, value_enum, default_value_t = ShiftOpt::Auto)]
    shift: ShiftOpt,
    /// Goodness-of-fit p-value method
    #[arg(long, global = true, value_enum, default_value_t = KsOpt::Lilliefors)]
    ks_method: KsOpt,
    /// Threshold on the log-log quadratic coefficient
    #[arg(long, global = true, default_value_t = citelaw::rankfit::DEFAULT_CURVATURE_THRESHOLD)]
    curvature_threshold: f64,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Output kinds: csv,md,svg
    #[arg(long, global = true, default_value = "csv")]
    emit: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatOpt {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupByOpt {
    Groups,
    Journal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShiftOpt {
    Auto,
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Clone, Copy, ValueEnum)]
enum KsOpt {
    Lilliefors,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioOpt {
    JournalLike,
    ZeroInflated,
    SegmentCrossing,
}

#[derive(Subcommand)]
enum Command {
    /// Per-group indicator table: size, uncited share, MNC, serial
    /// percentile ratios and conformity class
    Indicators,
    /// Double-rank series, power-law fits and log-log plot for one group
    Doublerank { group: String },
    /// Log-binned histogram, normal probability plot and lognormal
    /// goodness-of-fit for one group
    Distfit { group: String },
    /// Side-by-side comparison of two groups with an overlay histogram
    /// and a segment-slope verdict
    Compare { a: String, b: String },
    /// Generate a seeded synthetic corpus (JSONL)
    Simulate {
        /// Number of records
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Lognormal location of the citation counts
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        /// Lognormal scale of the citation counts
        #[arg(long, default_value_t = 1.2)]
        sigma: f64,
        /// Fraction of records forced to zero citations
        #[arg(long, default_value_t = 0.0)]
        extra_zero_fraction: f64,
        /// Group plan label:count[:mu:sigma:zf]; repeatable
        #[arg(long = "group")]
        groups: Vec<String>,
        /// Preset corpus shape (overrides n/mu/sigma/groups)
        #[arg(long, value_enum)]
        scenario: Option<ScenarioOpt>,
        /// Output file name (relative to --out)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Combined indicators + fits + goodness-of-fit report
    Report,
}

fn build_config(opts: &GlobalOpts) -> Result<RunConfig, CliError> {
    let mut filter = citelaw::corpus::Filter::default();
    for expr in &opts.filters {
        apply_filter_kv(&mut filter, expr)?;
    }
    filter.single_group = opts.single_group;
    Ok(RunConfig {
        input: opts.input.clone(),
        format: opts.format.map(|f| match f {
            FormatOpt::Jsonl => InputFormat::Jsonl,
            FormatOpt::Csv => InputFormat::Csv,
        }),
        journal_meta: opts.journal_meta.clone(),
        group_by: match opts.group_by {
            GroupByOpt::Groups => GroupBy::Groups,
            GroupByOpt::Journal => GroupBy::Journal,
        },
        filter,
        pub_window: opts.pub_window.as_deref().map(parse_window).transpose()?,
        reference_year: opts.reference_year,
        percentiles: parse_percentiles(&opts.percentiles)?,
        tolerance: opts.tolerance,
        min_support: opts.min_support,
        seed: opts.seed,
        mc_runs: opts.mc_runs,
        shift: match opts.shift {
            ShiftOpt::Auto => ShiftPolicy::Auto,
            ShiftOpt::Zero => ShiftPolicy::Zero,
            ShiftOpt::One => ShiftPolicy::One,
        },
        ks_method: match opts.ks_method {
            KsOpt::Lilliefors => KsMethodChoice::Lilliefors,
            KsOpt::Fixed => KsMethodChoice::Fixed,
        },
        curvature_threshold: opts.curvature_threshold,
        out: opts.out.clone(),
        emit: parse_emit(&opts.emit)?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = build_config(&cli.global)?;
    let written = match &cli.command {
        Command::Indicators => commands::cmd_indicators(&config)?,
        Command::Doublerank { group } => commands::cmd_doublerank(&config, group)?,
        Command::Distfit { group } => commands::cmd_distfit(&config, group)?,
        Command::Compare { a, b } => commands::cmd_compare(&config, a, b)?,
        Command::Simulate {
            n,
            mu,
            sigma,
            extra_zero_fraction,
            groups,
            scenario,
            output,
        } => commands::cmd_simulate(
            &config,
            &SimulateArgs {
                n: *n,
                mu: *mu,
                sigma: *sigma,
                extra_zero_fraction: *extra_zero_fraction,
                groups: groups.clone(),
                scenario: scenario.map(|s| match s {
                    ScenarioOpt::JournalLike => ScenarioKind::JournalLike,
                    ScenarioOpt::ZeroInflated => ScenarioKind::ZeroInflated,
                    ScenarioOpt::SegmentCrossing => ScenarioKind::SegmentCrossing,
                }),
                output: output.clone(),
            },
        )?,
        Command::Report => commands::cmd_report(&config)?,
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // usage problems are validation errors (exit 1); clap's own
            // default of 2 is reserved for i/o failures here
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
