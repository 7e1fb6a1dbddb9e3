use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use semrank_core::compare::{
    compare, rank_environment, render_csv, render_json, render_listing, render_report_csv,
    render_report_json, render_table, RankOptions,
};
use semrank_core::generator::{generate, GeneratorParams};
use semrank_core::{
    golden, BacklinkMode, Environment, Error, Method, Query, ValidationError, VirtualConfig,
    VirtualDeltaMode,
};

#[derive(Parser)]
#[command(
    name = "semrank",
    version,
    about = "Rank annotated pages against a concept ontology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random environment file.
    Gen(GenArgs),
    /// Rank the pages of an environment with one method.
    Rank(RankArgs),
    /// Run every method and report how their orderings agree.
    Compare(CompareArgs),
    /// Recompute the reference values from the built-in fixtures.
    VerifyGolden(GoldenArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    concepts: usize,
    /// Fraction of concept pairs that get relations.
    #[arg(long, default_value_t = 14.0 / 15.0)]
    density: f64,
    /// Relations per related pair are drawn from 1..=N.
    #[arg(long, default_value_t = 5)]
    max_multiplicity: u32,
    #[arg(long, default_value_t = 10)]
    pages: usize,
    /// Probability that a page carries any given relation.
    #[arg(long, default_value_t = 0.3)]
    rate: f64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long, value_enum, default_value_t = VirtualModeArg::ConstantHalf)]
    virtual_mode: VirtualModeArg,
    #[arg(long, value_enum, default_value_t = BacklinkModeArg::Reciprocal)]
    backlink_mode: BacklinkModeArg,
    /// Power-iteration stopping tolerance.
    #[arg(long, default_value_t = semrank_core::backlink::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Query association `term=conceptIndex`; replaces the file's query.
    #[arg(long = "assoc", value_name = "TERM=INDEX")]
    assoc: Vec<String>,
}

#[derive(Args)]
struct RankArgs {
    environment: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Combined)]
    method: MethodArg,
    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct CompareArgs {
    environment: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct GoldenArgs {
    /// Alter the named fixture before checking (harness self-test).
    #[arg(long, hide = true)]
    perturb: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Old,
    Nodes,
    Edges,
    Combined,
    Eigen,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Old => Method::Old,
            MethodArg::Nodes => Method::Nodes,
            MethodArg::Edges => Method::Edges,
            MethodArg::Combined => Method::Combined,
            MethodArg::Eigen => Method::Eigen,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VirtualModeArg {
    ConstantHalf,
    HalfOverPage,
}

#[derive(Clone, Copy, ValueEnum)]
enum BacklinkModeArg {
    Reciprocal,
    Normalized,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Table,
    Csv,
    JsonLike,
}

impl ScoringArgs {
    fn options(&self) -> RankOptions {
        RankOptions {
            virtual_config: VirtualConfig {
                mode: match self.virtual_mode {
                    VirtualModeArg::ConstantHalf => VirtualDeltaMode::ConstantHalf,
                    VirtualModeArg::HalfOverPage => VirtualDeltaMode::HalfOverPageRelations,
                },
            },
            backlink_mode: match self.backlink_mode {
                BacklinkModeArg::Reciprocal => BacklinkMode::ReciprocalShared,
                BacklinkModeArg::Normalized => BacklinkMode::ColumnNormalized,
            },
            tolerance: self.tolerance,
        }
    }

    /// Loads the environment and applies any `--assoc` override.
    fn load(&self, path: &PathBuf) -> anyhow::Result<Environment> {
        let mut env =
            Environment::load(path).with_context(|| format!("loading {}", path.display()))?;
        if !self.assoc.is_empty() {
            let mut pairs = Vec::new();
            for a in &self.assoc {
                let (term, idx) = a.split_once('=').ok_or_else(|| {
                    Error::InvalidParams(format!("--assoc expects TERM=INDEX, got {a:?}"))
                })?;
                let idx: usize = idx.trim().parse().map_err(|_| {
                    Error::InvalidParams(format!("bad concept index in --assoc {a:?}"))
                })?;
                pairs.push((term.trim().to_owned(), idx));
            }
            env.query = Some(Query::new(&env.ontology, pairs).map_err(Error::from)?);
        }
        Ok(env)
    }
}

fn write_out(text: &str) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .context("writing output")?;
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let params = GeneratorParams {
        seed: args.seed,
        concept_count: args.concepts,
        ontology_pair_density: args.density,
        max_multiplicity: args.max_multiplicity,
        page_count: args.pages,
        page_relation_rate: args.rate,
    };
    let env = generate(&params)?;
    match &args.output {
        Some(path) => env
            .save(path)
            .with_context(|| format!("writing {}", path.display()))?,
        None => write_out(&env.to_json())?,
    }
    Ok(())
}

fn cmd_rank(args: &RankArgs) -> anyhow::Result<()> {
    let env = args.scoring.load(&args.environment)?;
    let report = rank_environment(&env, args.method.into(), &args.scoring.options())?;
    let text = match args.scoring.format {
        Format::Table => render_listing(&report),
        Format::Csv => render_report_csv(&report),
        Format::JsonLike => render_report_json(&report),
    };
    if let (Format::Table, Some(eig)) = (args.scoring.format, &report.eigen) {
        eprintln!(
            "eigenvalue {:.6}, {} iterations, residual {:.2e}{}",
            eig.eigenvalue,
            eig.iterations,
            eig.residual,
            if eig.last_entry_normalized {
                ""
            } else {
                ", scaled by the largest entry"
            }
        );
    }
    write_out(&text)
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<()> {
    let env = args.scoring.load(&args.environment)?;
    let report = compare(&env, &args.scoring.options());
    let text = match args.scoring.format {
        Format::Table => render_table(&report),
        Format::Csv => render_csv(&report),
        Format::JsonLike => render_json(&report),
    };
    write_out(&text)
}

fn cmd_verify_golden(args: &GoldenArgs) -> anyhow::Result<bool> {
    if let Some(name) = &args.perturb {
        if semrank_core::fixtures::by_name(name).is_none() {
            bail!(Error::InvalidParams(format!("unknown fixture {name:?}")));
        }
    }
    let checks = golden::run_checks(args.perturb.as_deref());
    write_out(&golden::render(&checks))?;
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!("failed: {}", c.name);
    }
    Ok(failed.is_empty())
}

/// 2 for bad input, 3 for the enumeration cap, 4 when power iteration does
/// not settle, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::EnumerationCap { .. } => 3,
            Error::NonConvergence { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        };
    }
    if err.downcast_ref::<ValidationError>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Rank(a) => cmd_rank(a).map(|_| true),
        Command::Compare(a) => cmd_compare(a).map(|_| true),
        Command::VerifyGolden(a) => cmd_verify_golden(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
