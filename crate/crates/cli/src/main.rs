//! `seqrecon`: generate random source sets, extract k-mer sets, inspect de
//! Bruijn graphs, detect repeat events, reconstruct, and map the feasibility
//! region from the shell.
//!
//! Machine-readable output goes to stdout and diagnostics to stderr, so the
//! subcommands compose through pipes:
//!
//! ```text
//! seqrecon generate --n 64 --m 4 --seed 7 | seqrecon kmers --k 12 | seqrecon solve --m 4 --n 64
//! ```

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use seqrecon::experiment::derive_seed;
use seqrecon::{
    brute_force_oracle, classify_region, construct_swap_d, construct_swap_h, derive_params,
    emit_csv, emit_svg_heatmap, enumerate_reconstructions, event_bounds, extract_kmer_set,
    find_certificate, generate_sources, label_multiplicities, moments_u, moments_v,
    repeat_free_bound, run_grid_with_threads, Budget, DeBruijnGraph, Error, EventKind,
    EventWitness, ExperimentConfig, KmerSet, Params, SourceSet,
};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;
const EX_CANTCREAT: u8 = 73;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    fn usage(message: impl fmt::Display) -> Self {
        Failure::new(EX_USAGE, message)
    }

    fn data(message: impl fmt::Display) -> Self {
        Failure::new(EX_DATAERR, message)
    }
}

/// Library errors about the arguments themselves are usage errors; the rest
/// are problems with the input data.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::TooLarge(_) | Error::Config(_) => EX_USAGE,
            _ => EX_DATAERR,
        };
        Failure::new(code, e)
    }
}

type CliResult = Result<u8, Failure>;

#[derive(Parser)]
#[command(
    name = "seqrecon",
    version,
    about = "Reconstruct random binary sequences from their k-mer sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw m uniform random sources of length n
    Generate(GenerateArgs),
    /// Print the sorted (k+1)-mer set of a source file
    Kmers(KmersArgs),
    /// Print the de Bruijn graph of a k-mer set, one edge per line
    DumpGraph(DumpGraphArgs),
    /// Report repeat events in a source set as JSON lines
    Detect(DetectArgs),
    /// Enumerate source sets consistent with a k-mer set
    ///
    /// Exit status is 0 when the solution is unique, 1 when at least two
    /// were found and 2 when the budget ran out before deciding.
    Solve(SolveArgs),
    /// Build an alternative source set with the same k-mer set
    ///
    /// Exit status is 0 when the alternative differs from the input and 1
    /// when it does not (or no rearrangement was found).
    Swap(SwapArgs),
    /// Print closed-form bounds for one parameter point
    Bounds(BoundsArgs),
    /// Run a Monte Carlo experiment over an (alpha, beta) grid
    Region(RegionArgs),
    /// Cross-check the solver against brute force on small random instances
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Length of every source
    #[arg(long)]
    n: usize,
    /// Number of sources
    #[arg(long, required_unless_present = "alpha", conflicts_with = "alpha")]
    m: Option<usize>,
    /// Derive m as round(n^alpha) instead of giving it directly
    #[arg(long)]
    alpha: Option<f64>,
    /// Only used with --alpha; sets k = round(beta * log2 n)
    #[arg(long, requires = "alpha", default_value_t = 3.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct KmersArgs {
    /// k-mer length minus one; windows have length k+1
    #[arg(long)]
    k: usize,
    /// Source file, one sequence per line (stdin when absent or "-")
    input: Option<PathBuf>,
}

#[derive(Args)]
struct DumpGraphArgs {
    /// Label node multiplicities for this many sources and print edge traversal counts
    #[arg(long)]
    m: Option<usize>,
    /// K-mer file (stdin when absent or "-")
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EventArg {
    A,
    B,
    C,
    D,
    H,
}

impl From<EventArg> for EventKind {
    fn from(e: EventArg) -> Self {
        match e {
            EventArg::A => EventKind::A,
            EventArg::B => EventKind::B,
            EventArg::C => EventKind::C,
            EventArg::D => EventKind::D,
            EventArg::H => EventKind::H,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    k: usize,
    /// Restrict to these events (repeatable); all five by default
    #[arg(long = "event", value_enum)]
    events: Vec<EventArg>,
    /// Print every witness instead of the first per event
    #[arg(long)]
    all: bool,
    /// Source file (stdin when absent or "-")
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    max_solutions: usize,
    /// Search steps before giving up; 0 removes the limit
    #[arg(long, default_value_t = 1_000_000)]
    max_expansions: u64,
    /// K-mer file (stdin when absent or "-")
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SwapKind {
    D,
    H,
    /// Any rearrangement the certificate search knows about
    Any,
}

#[derive(Args)]
struct SwapArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = SwapKind::Any)]
    kind: SwapKind,
    /// Witness as printed by `detect`; the first detected one otherwise
    #[arg(long, conflicts_with = "kind")]
    witness: Option<String>,
    /// Source file (stdin when absent or "-")
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, required_unless_present = "alpha", conflicts_with_all = ["alpha", "beta"], requires = "k")]
    m: Option<usize>,
    #[arg(long, requires = "m")]
    k: Option<usize>,
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
}

#[derive(Args)]
struct RegionArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_csv: PathBuf,
    /// Also draw a heatmap of one measure
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Measure shown in the heatmap
    #[arg(long, default_value = "uniqueness")]
    measure: String,
    /// Worker threads; defaults to the number of cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    instances: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut text = String::new();
    io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| Failure::new(EX_NOINPUT, format!("stdin: {e}")))?;
    Ok(text)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::new(EX_CANTCREAT, format!("{}: {e}", path.display())))
}

fn print(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        // a closed pipe downstream is not our problem
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::new(EX_CANTCREAT, format!("stdout: {e}"))),
    }
}

fn generate(a: GenerateArgs) -> CliResult {
    let params = match (a.m, a.alpha) {
        (_, Some(alpha)) => derive_params(a.n, alpha, a.beta)?,
        // k plays no part in generation; 2 is valid for every n >= 4
        (Some(m), None) => Params::new(a.n, m, 2)?,
        (None, None) => unreachable!("clap enforces --m or --alpha"),
    };
    if a.alpha.is_some() {
        eprintln!("m = {}, k = {}", params.m, params.k);
    }
    print(&generate_sources(&params, a.seed).to_text())?;
    Ok(0)
}

fn kmers(a: KmersArgs) -> CliResult {
    let x = SourceSet::from_text(&read_input(a.input.as_deref())?)?;
    print(&extract_kmer_set(&x, a.k)?.to_text())?;
    Ok(0)
}

fn dump_graph(a: DumpGraphArgs) -> CliResult {
    let y = KmerSet::from_text(&read_input(a.input.as_deref())?)?;
    let g = DeBruijnGraph::build(&y);
    let usage = match a.m {
        Some(m) => Some(seqrecon::debruijn::edge_usage(
            &g,
            &label_multiplicities(&g, m)?,
        )),
        None => None,
    };
    print(&g.dump(usage.as_ref()))?;
    Ok(0)
}

fn detect(a: DetectArgs) -> CliResult {
    let x = SourceSet::from_text(&read_input(a.input.as_deref())?)?;
    let scanner = seqrecon::events::Scanner::new(&x, a.k)?;
    let kinds: Vec<EventKind> = if a.events.is_empty() {
        vec![
            EventKind::A,
            EventKind::B,
            EventKind::C,
            EventKind::D,
            EventKind::H,
        ]
    } else {
        a.events.into_iter().map(EventKind::from).collect()
    };
    let mut out = String::new();
    for kind in kinds {
        let witnesses = if a.all {
            scanner.all(kind)
        } else {
            scanner.detect(kind).into_iter().collect()
        };
        for w in witnesses {
            out.push_str(&w.to_json());
            out.push('\n');
        }
    }
    print(&out)?;
    Ok(0)
}

fn solve(a: SolveArgs) -> CliResult {
    let y = KmerSet::from_text(&read_input(a.input.as_deref())?)?;
    let budget = Budget::new(
        a.max_solutions,
        if a.max_expansions == 0 {
            u64::MAX
        } else {
            a.max_expansions
        },
    );
    let r = enumerate_reconstructions(&y, a.m, a.n, budget)?;
    let blocks: Vec<String> = r.solutions.iter().map(SourceSet::to_text).collect();
    print(&blocks.join("\n"))?;
    eprintln!(
        "{} solution(s), {} expansions, stopped by {:?}",
        r.solutions.len(),
        r.expansions,
        r.stop
    );
    match (r.solutions.len(), r.exhausted) {
        (0, true) => Err(Failure::data(format!(
            "no {} sources of length {} produce this k-mer set",
            a.m, a.n
        ))),
        (1, true) => Ok(0),
        (s, _) if s >= 2 => Ok(1),
        _ => Ok(2),
    }
}

fn swap(a: SwapArgs) -> CliResult {
    let x = SourceSet::from_text(&read_input(a.input.as_deref())?)?;
    let (alternative, label) = if let Some(text) = &a.witness {
        let w: EventWitness =
            serde_json::from_str(text).map_err(|e| Failure::usage(format!("--witness: {e}")))?;
        (build_swap(&x, &w, a.k)?, w.kind.to_string())
    } else {
        match a.kind {
            SwapKind::Any => match find_certificate(&x, a.k)? {
                Some(c) => (c.alternative, format!("{:?}", c.rearrangement)),
                None => {
                    eprintln!("no rearrangement found");
                    return Ok(1);
                }
            },
            kind => {
                let event = if matches!(kind, SwapKind::D) {
                    EventKind::D
                } else {
                    EventKind::H
                };
                let w = seqrecon::events::Scanner::new(&x, a.k)?
                    .detect(event)
                    .ok_or_else(|| Failure::data(format!("no event {event} in input")))?;
                (build_swap(&x, &w, a.k)?, event.to_string())
            }
        }
    };
    print(&alternative.to_text())?;
    if alternative == x {
        eprintln!("{label}: alternative equals the input");
        Ok(1)
    } else {
        eprintln!("{label}: distinct alternative");
        Ok(0)
    }
}

fn build_swap(x: &SourceSet, w: &EventWitness, k: usize) -> Result<SourceSet, Failure> {
    let out = match w.kind {
        EventKind::D => construct_swap_d(x, w, k)?,
        EventKind::H => construct_swap_h(x, w, k)?,
        other => {
            return Err(Failure::usage(format!(
                "event {other} has no swap; use a D or H witness"
            )))
        }
    };
    Ok(out.alternative)
}

fn bounds(a: BoundsArgs) -> CliResult {
    let params = match (a.m, a.k, a.alpha, a.beta) {
        (Some(m), Some(k), None, None) => Params::new(a.n, m, k)?,
        (None, None, Some(alpha), Some(beta)) => derive_params(a.n, alpha, beta)?,
        _ => {
            return Err(Failure::usage(
                "give either --m and --k or --alpha and --beta",
            ))
        }
    };
    let (alpha, beta) = (params.effective_alpha(), params.effective_beta());
    let region = classify_region(alpha, beta);
    let mut rows: Vec<(String, String)> = vec![
        ("n".into(), params.n.to_string()),
        ("m".into(), params.m.to_string()),
        ("k".into(), params.k.to_string()),
        ("alpha".into(), format!("{alpha:.6}")),
        ("beta".into(), format!("{beta:.6}")),
        ("verdict".into(), region.verdict.to_string()),
        (
            "binding_constraint".into(),
            region.binding_constraint.to_string(),
        ),
        (
            "repeat_free_bound".into(),
            fmt_float(repeat_free_bound(&params)),
        ),
    ];
    for (kind, value) in event_bounds(&params) {
        rows.push((format!("pr_{kind}_bound"), fmt_float(value)));
    }
    for (name, report) in [("V", moments_v(&params)), ("U", moments_u(&params))] {
        match report {
            Ok(r) => {
                rows.push((format!("{name}_e_first"), fmt_float(r.e_first)));
                rows.push((
                    format!("{name}_e_second_bound"),
                    fmt_float(r.e_second_bound),
                ));
                rows.push((format!("{name}_pz_lower"), fmt_float(r.pz_lower)));
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let text: String = rows
        .iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect();
    print(&text)?;
    Ok(0)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.6e}")
}

fn region(a: RegionArgs) -> CliResult {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", a.config.display())))?;
    let config = ExperimentConfig::from_json(&text)?;
    if a.threads == Some(0) {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    let reports = run_grid_with_threads(&config, a.threads)?;
    write_file(&a.out_csv, &emit_csv(&reports))?;
    if let Some(svg) = &a.out_svg {
        write_file(svg, &emit_svg_heatmap(&reports, &a.measure))?;
    }
    eprintln!("{} cells written to {}", reports.len(), a.out_csv.display());
    Ok(0)
}

fn oracle(a: OracleArgs) -> CliResult {
    let params = Params::new(a.n, a.m, a.k)?;
    if a.m * a.n > 24 {
        return Err(Error::TooLarge(a.m * a.n).into());
    }
    let mut agree = 0;
    for t in 0..a.instances {
        let x = generate_sources(&params, derive_seed(a.seed, t));
        let y = extract_kmer_set(&x, a.k)?;
        let mut fast = enumerate_reconstructions(&y, a.m, a.n, Budget::unbounded())?.solutions;
        let mut slow = brute_force_oracle(&y, a.m, a.n)?;
        fast.sort_by_key(SourceSet::canonical);
        slow.sort_by_key(SourceSet::canonical);
        if fast == slow {
            agree += 1;
        } else {
            eprintln!(
                "instance {t}: solver found {}, brute force {}\n{}",
                fast.len(),
                slow.len(),
                x.to_text()
            );
        }
    }
    print(&format!("agreement {agree}/{}\n", a.instances))?;
    Ok(if agree == a.instances { 0 } else { EX_SOFTWARE })
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Kmers(a) => kmers(a),
        Command::DumpGraph(a) => dump_graph(a),
        Command::Detect(a) => detect(a),
        Command::Solve(a) => solve(a),
        Command::Swap(a) => swap(a),
        Command::Bounds(a) => bounds(a),
        Command::Region(a) => region(a),
        Command::Oracle(a) => oracle(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EX_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("seqrecon: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
