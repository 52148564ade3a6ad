//! Batch front door for the miner: ingest a dataset, run SFC2A or Apriori,
//! compare them, inspect the concept lattice, or sweep a benchmark manifest.
//!
//! Exit codes: 0 success, 2 input error (bad file, bad flag values, bad
//! manifest), 3 guard violation (enumeration guard, rule-expansion cap),
//! 4 rule-diff findings in `compare`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use conceptminer::concepts::{enumerate_concepts_guarded, DEFAULT_ENUMERATION_GUARD};
use conceptminer::context::{parse_csv, parse_cxt, parse_fimi, FormalContext};
use conceptminer::coverage::sfc2a;
use conceptminer::relevance::{PcfFormula, RelevanceConfig};
use conceptminer::rules::{
    apriori_frequent, rules_from_itemsets, AssociationRule, MiningParams, RuleError,
};
use conceptminer::PropertySet;

const METRICS_HEADER: &str = "dataset,algorithm,min_sup,min_conf,runtime_ms,n_itemsets,n_rules";
const GUARD_ENV: &str = "CONCEPTMINER_GUARD_PROPS";

#[derive(Parser)]
#[command(name = "conceptminer", version, about = "Concept-coverage association rule miner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine one dataset with one algorithm and write a rule TSV.
    Mine(MineArgs),
    /// Run both algorithms on the same dataset and diff their rules.
    Compare(CompareArgs),
    /// Enumerate the formal concepts of a context (optionally as DOT).
    Concepts(ConceptsArgs),
    /// Run every (dataset, params) entry of a manifest, appending metrics rows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Fimi,
    Csv,
    Cxt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Sfc2a,
    Apriori,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Sfc2a => "sfc2a",
            Algo::Apriori => "apriori",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Relevance {
    #[value(name = "def10")]
    Def10,
    #[value(name = "def10conf")]
    Def10Conf,
}

impl Relevance {
    fn config(self) -> RelevanceConfig {
        let pcf_formula = match self {
            Relevance::Def10 => PcfFormula::Def10,
            Relevance::Def10Conf => PcfFormula::Def10Conf,
        };
        RelevanceConfig { pcf_formula, ..Default::default() }
    }
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    min_sup: f64,
    #[arg(long)]
    min_conf: f64,
    #[arg(long, value_enum, default_value = "def10")]
    relevance: Relevance,
    /// Rule TSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the sfc2a coverage, one member per line.
    #[arg(long)]
    dump_coverage: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    min_sup: f64,
    #[arg(long)]
    min_conf: f64,
    #[arg(long, value_enum, default_value = "def10")]
    relevance: Relevance,
}

#[derive(Args)]
struct ConceptsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Emit the Hasse diagram as DOT instead of one concept per line.
    #[arg(long)]
    dot: bool,
    /// Bypass the enumeration guard.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// CSV manifest: name,path,format,min_sup,min_conf (paths relative to
    /// the manifest).
    #[arg(long)]
    manifest: PathBuf,
    /// Repetitions per run; the reported runtime is the (lower) median.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long, value_enum, default_value = "def10")]
    relevance: Relevance,
    /// Append metrics rows here instead of stdout; the header is written
    /// only when the file is new or empty.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Input(String),
    Guard(String),
    Findings(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Findings(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Guard(m) | CliError::Findings(m) => m,
        }
    }
}

impl From<RuleError> for CliError {
    fn from(err: RuleError) -> Self {
        match err {
            RuleError::InvalidFraction { .. } => CliError::Input(err.to_string()),
            RuleError::IntentTooLarge { .. } => CliError::Guard(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Concepts(args) => cmd_concepts(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn load_context(path: &Path, format: Format) -> Result<FormalContext, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let parsed = match format {
        Format::Fimi => parse_fimi(&text),
        Format::Csv => parse_csv(&text),
        Format::Cxt => parse_cxt(&text),
    };
    parsed.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// One algorithm run. The wall clock covers the mining computation only
/// (coverage construction, frequent-itemset counting, rule expansion);
/// parsing and serialization stay outside.
struct MiningOutcome {
    rules: Vec<AssociationRule>,
    n_itemsets: usize,
    coverage_text: Option<String>,
    elapsed: Duration,
}

fn run_algo(
    ctx: &FormalContext,
    algo: Algo,
    params: &MiningParams,
    cfg: &RelevanceConfig,
    keep_coverage: bool,
) -> Result<MiningOutcome, CliError> {
    match algo {
        Algo::Sfc2a => {
            let start = Instant::now();
            let coverage = sfc2a(ctx, cfg);
            let itemsets = coverage.itemsets();
            let rules = rules_from_itemsets(ctx, &itemsets, params)?;
            let elapsed = start.elapsed();
            let n_itemsets = itemsets.iter().filter(|(_, s)| *s >= params.min_sup).count();
            let coverage_text = keep_coverage.then(|| coverage.to_text());
            Ok(MiningOutcome { rules, n_itemsets, coverage_text, elapsed })
        }
        Algo::Apriori => {
            let start = Instant::now();
            let frequent: Vec<(PropertySet, f64)> =
                apriori_frequent(ctx, params.min_sup).into_iter().collect();
            let rules = rules_from_itemsets(ctx, &frequent, params)?;
            let elapsed = start.elapsed();
            Ok(MiningOutcome { rules, n_itemsets: frequent.len(), coverage_text: None, elapsed })
        }
    }
}

fn join_labels(ctx: &FormalContext, set: &PropertySet) -> String {
    set.iter().map(|p| ctx.property_label(p)).collect::<Vec<_>>().join(",")
}

fn rules_tsv(ctx: &FormalContext, rules: &[AssociationRule], algo: Algo) -> String {
    let mut out = String::from("antecedent\tconsequent\tsupport\tconfidence\talgorithm\n");
    for r in rules {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{}",
            join_labels(ctx, &r.antecedent),
            join_labels(ctx, &r.consequent),
            r.support,
            r.confidence,
            algo.name()
        )
        .unwrap();
    }
    out
}

fn metrics_row(dataset: &str, algo: Algo, params: &MiningParams, outcome: &MiningOutcome) -> String {
    format!(
        "{},{},{:.6},{:.6},{},{},{}",
        dataset,
        algo.name(),
        params.min_sup,
        params.min_conf,
        outcome.elapsed.as_millis(),
        outcome.n_itemsets,
        outcome.rules.len()
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_mine(args: MineArgs) -> Result<(), CliError> {
    let ctx = load_context(&args.input, args.format)?;
    let params = MiningParams::new(args.min_sup, args.min_conf)?;
    let cfg = args.relevance.config();
    if args.dump_coverage.is_some() && args.algo != Algo::Sfc2a {
        return Err(CliError::Input("--dump-coverage requires --algo sfc2a".into()));
    }

    let outcome = run_algo(&ctx, args.algo, &params, &cfg, args.dump_coverage.is_some())?;

    if let Some(path) = &args.dump_coverage {
        write_file(path, outcome.coverage_text.as_deref().unwrap_or(""))?;
    }
    let tsv = rules_tsv(&ctx, &outcome.rules, args.algo);
    match &args.out {
        Some(path) => write_file(path, &tsv)?,
        None => print!("{tsv}"),
    }
    println!("{}", metrics_row(&dataset_name(&args.input), args.algo, &params, &outcome));
    Ok(())
}

fn rule_key(rule: &AssociationRule) -> (PropertySet, PropertySet) {
    (rule.antecedent.clone(), rule.consequent.clone())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let ctx = load_context(&args.input, args.format)?;
    let params = MiningParams::new(args.min_sup, args.min_conf)?;
    let cfg = args.relevance.config();
    let dataset = dataset_name(&args.input);

    let sf = run_algo(&ctx, Algo::Sfc2a, &params, &cfg, false)?;
    let ap = run_algo(&ctx, Algo::Apriori, &params, &cfg, false)?;

    println!("{METRICS_HEADER}");
    println!("{}", metrics_row(&dataset, Algo::Sfc2a, &params, &sf));
    println!("{}", metrics_row(&dataset, Algo::Apriori, &params, &ap));

    let sf_keys: std::collections::BTreeSet<_> = sf.rules.iter().map(rule_key).collect();
    let ap_keys: std::collections::BTreeSet<_> = ap.rules.iter().map(rule_key).collect();
    let common = sf_keys.intersection(&ap_keys).count();
    let only_sf: Vec<_> = sf_keys.difference(&ap_keys).collect();
    let only_ap = ap_keys.difference(&sf_keys).count();
    println!(
        "# rule-diff: common={} only_in_sfc2a={} only_in_apriori={}",
        common,
        only_sf.len(),
        only_ap
    );

    if !only_sf.is_empty() {
        for (ant, cons) in &only_sf {
            println!(
                "# violation: {} -> {} emitted by sfc2a but not by apriori",
                join_labels(&ctx, ant),
                join_labels(&ctx, cons)
            );
        }
        return Err(CliError::Findings(format!(
            "{} sfc2a rule(s) missing from the apriori output",
            only_sf.len()
        )));
    }
    Ok(())
}

fn enumeration_guard(force: bool) -> Result<usize, CliError> {
    if force {
        return Ok(usize::MAX);
    }
    match std::env::var(GUARD_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{GUARD_ENV}={raw:?} is not a valid limit"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_GUARD),
    }
}

fn cmd_concepts(args: ConceptsArgs) -> Result<(), CliError> {
    let ctx = load_context(&args.input, args.format)?;
    let guard = enumeration_guard(args.force)?;
    let lattice =
        enumerate_concepts_guarded(&ctx, guard).map_err(|e| CliError::Guard(e.to_string()))?;

    let text = if args.dot {
        lattice.to_dot()
    } else {
        let mut out = String::new();
        for c in lattice.concepts() {
            writeln!(
                out,
                "{} | {}",
                ctx.format_objects(&c.extent),
                ctx.format_properties(&c.intent)
            )
            .unwrap();
        }
        out
    };
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

struct ManifestEntry {
    name: String,
    path: PathBuf,
    format: Format,
    min_sup: f64,
    min_conf: f64,
}

fn parse_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let bad = |line: usize, msg: String| {
        CliError::Input(format!("{}:{line}: {msg}", path.display()))
    };

    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (header_line, header) =
        lines.next().ok_or_else(|| bad(1, "empty manifest".to_string()))?;
    if header.trim() != "name,path,format,min_sup,min_conf" {
        return Err(bad(header_line + 1, format!("bad header {header:?}")));
    }

    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 5 {
            return Err(bad(lineno + 1, format!("expected 5 cells, found {}", cells.len())));
        }
        let format = match cells[2] {
            "fimi" => Format::Fimi,
            "csv" => Format::Csv,
            "cxt" => Format::Cxt,
            other => return Err(bad(lineno + 1, format!("unknown format {other:?}"))),
        };
        let parse_frac = |cell: &str, what: &str| -> Result<f64, CliError> {
            cell.parse().map_err(|_| bad(lineno + 1, format!("bad {what} {cell:?}")))
        };
        let raw_path = PathBuf::from(cells[1]);
        let resolved = if raw_path.is_absolute() { raw_path } else { base.join(raw_path) };
        entries.push(ManifestEntry {
            name: cells[0].to_string(),
            path: resolved,
            format,
            min_sup: parse_frac(cells[3], "min_sup")?,
            min_conf: parse_frac(cells[4], "min_conf")?,
        });
    }
    Ok(entries)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.repeat == 0 {
        return Err(CliError::Input("--repeat must be at least 1".into()));
    }
    let entries = parse_manifest(&args.manifest)?;
    let cfg = args.relevance.config();

    let mut rows = Vec::new();
    for entry in &entries {
        let ctx = load_context(&entry.path, entry.format)?;
        let params = MiningParams::new(entry.min_sup, entry.min_conf)?;
        for algo in [Algo::Sfc2a, Algo::Apriori] {
            let mut runs = Vec::with_capacity(args.repeat);
            for _ in 0..args.repeat {
                runs.push(run_algo(&ctx, algo, &params, &cfg, false)?);
            }
            let mut times: Vec<Duration> = runs.iter().map(|r| r.elapsed).collect();
            times.sort_unstable();
            let median = times[(times.len() - 1) / 2];
            let mut outcome = runs.pop().unwrap();
            outcome.elapsed = median;
            rows.push(metrics_row(&entry.name, algo, &params, &outcome));
        }
    }

    match &args.out {
        Some(path) => {
            let needs_header = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let mut text = String::new();
            if needs_header {
                text.push_str(METRICS_HEADER);
                text.push('\n');
            }
            for row in &rows {
                text.push_str(row);
                text.push('\n');
            }
            use std::io::Write;
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
            file.write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            println!("{METRICS_HEADER}");
            for row in &rows {
                println!("{row}");
            }
        }
    }
    Ok(())
}
