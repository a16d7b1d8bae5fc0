//! `unlink`: unlinking numbers and gaps of rational and pretzel links from
//! the command line.
//!
//! Exit codes: 0 success, 1 verification difference (or inequivalent links
//! for `equiv`), 2 usage or input error, 3 indeterminate result or budget
//! exceeded.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use unlink_core::bj::BjEngine;
use unlink_core::bounds::pretzel_bounds;
use unlink_core::conway::{parse_pretzel, parse_rational, PretzelWord, RationalWord};
use unlink_core::enumerate::{enumerate_rational, write_csv, write_json, write_table, GapRatio};
use unlink_core::families::{Grid, Outcome, Status, Verifier};
use unlink_core::pretzel::{
    pretzel_components, pretzel_det, pretzel_diagram_unlink_with, pretzel_reduce,
    theorem47_prediction, PretzelEngine, PretzelState, TrivialityRule,
};
use unlink_core::rational::{canonical_word, cf_eval, crossing_number, equivalent, key_of};
use unlink_core::search::{apply_changes, diagram_unlink_number};
use unlink_core::section3::verify_section3;
use unlink_core::Error;

#[derive(Parser)]
#[command(
    name = "unlink",
    version,
    about = "Unlinking numbers and BJ-unlinking gaps of rational and pretzel links"
)]
struct Cli {
    /// Memo cache file: loaded before the command if present, saved after it.
    #[arg(long, global = true, value_name = "PATH")]
    cache_file: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Fraction, canonical key, components and crossing number of a word.
    Fraction {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Whether two words give the same unoriented link.
    Equiv {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
        /// Do not identify a link with its mirror image.
        #[arg(long)]
        strict: bool,
    },
    /// Unlinking number of the diagram drawn from the word, with a witness.
    Udiag {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// BJ-unlinking number with a chain of canonical words down to an unlink.
    Ubj {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// u_M, u_BJ and the gap, with both witnesses.
    Gap {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Reductions, determinant, closed forms and diagram search for P(a,b,c).
    Pretzel {
        /// Columns as `a,b,c`.
        #[arg(allow_hyphen_values = true)]
        columns: String,
        /// Classify only by determinant and report undecidable cases.
        #[arg(long)]
        strict: bool,
    },
    /// Every rational class of one crossing number.
    Enumerate {
        #[arg(long)]
        crossings: u64,
        /// Keep only classes with a positive gap.
        #[arg(long)]
        gap_only: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Compare the engines with the bundled tables and family registry.
    #[command(group(ArgGroup::new("what").required(true).args(["section3", "families", "all"])))]
    Verify {
        #[arg(long)]
        section3: bool,
        #[arg(long)]
        families: bool,
        #[arg(long)]
        all: bool,
        /// Parameter ranges overriding the registry grids, as `k=1..5,m=0..3`.
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        /// Print every mismatching point.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Load, fill or save the u_BJ memo cache.
    Cache {
        #[arg(long, value_name = "PATH")]
        load: Option<PathBuf>,
        /// Fill the cache with every class up to this many crossings.
        #[arg(long, value_name = "N")]
        warm: Option<u64>,
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
    },
}

/// Outcome of a command that ran to completion.
enum Done {
    Ok,
    Differs,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Indeterminate(_)
        | Error::BudgetExceeded { .. }
        | Error::WeightCeilingExceeded(_) => 3,
        Error::EmptyInput
        | Error::MalformedToken { .. }
        | Error::WrongArity { .. }
        | Error::UnsupportedNotation(_)
        | Error::Registry(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn word(text: &str) -> Result<RationalWord, Error> {
    parse_rational(text)
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn load_cache(engine: &BjEngine, path: &Path) -> Result<usize, Error> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    engine.load_cache(BufReader::new(f))
}

fn save_cache(engine: &BjEngine, path: &Path) -> Result<(), Error> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    engine.save_cache(&mut w)?;
    w.flush().map_err(|e| io_err(path, e))
}

fn fraction(text: &str) -> Result<Done, Error> {
    let w = word(text)?;
    let key = key_of(&w);
    println!("fraction    {}", cf_eval(&w));
    println!("key         {key}");
    println!("components  {}", key.component_count());
    if key.is_trivial() {
        println!("crossings   0 (unlink)");
    } else {
        println!("canonical   {}", canonical_word(&key)?);
        println!("crossings   {}", crossing_number(&key)?);
    }
    Ok(Done::Ok)
}

fn equiv(a: &str, b: &str, strict: bool) -> Result<Done, Error> {
    let (fa, fb) = (cf_eval(&word(a)?), cf_eval(&word(b)?));
    if equivalent(&fa, &fb, !strict) {
        println!("equivalent: {fa} ~ {fb}");
        Ok(Done::Ok)
    } else {
        println!("not equivalent: {fa} vs {fb}");
        Ok(Done::Differs)
    }
}

fn udiag(text: &str) -> Result<Done, Error> {
    let w = word(text)?;
    let d = diagram_unlink_number(&w)?;
    println!("u(D)={} witness={}", d.u_d, d.witness);
    println!("after changes: {}", apply_changes(&w, &d.witness)?);
    Ok(Done::Ok)
}

fn ubj(engine: &BjEngine, text: &str) -> Result<Done, Error> {
    let key = key_of(&word(text)?);
    if key.is_trivial() {
        println!("u_BJ=0");
        return Ok(Done::Ok);
    }
    let r = engine.u_bj(&key)?;
    println!("u_BJ={}", r.value);
    for w in &r.witness {
        println!("  {w}");
    }
    Ok(Done::Ok)
}

fn gap(engine: &BjEngine, text: &str, json: bool) -> Result<Done, Error> {
    let key = key_of(&word(text)?);
    if key.is_trivial() {
        println!("u_M=0 u_BJ=0 delta=0");
        return Ok(Done::Ok);
    }
    let g = engine.gap(&key)?;
    let replayed = g.replay();
    if json {
        let s = serde_json::to_string_pretty(&g).map_err(|e| Error::Io(e.to_string()))?;
        println!("{s}");
    } else {
        println!("u_M={} u_BJ={} delta={}", g.u_m, g.u_bj, g.delta_bj);
        println!("canonical word: {}", g.word);
        println!("diagram witness: {}", g.diagram_witness);
        println!("BJ chain:");
        for w in &g.bj_witness {
            println!("  {w}");
        }
        println!("witness replay: {}", if replayed { "ok" } else { "FAILED" });
    }
    Ok(if replayed { Done::Ok } else { Done::Differs })
}

fn pretzel(engine: &PretzelEngine, text: &str, strict: bool) -> Result<Done, Error> {
    let w: PretzelWord = parse_pretzel(text)?;
    println!("pretzel     P({w})");
    println!("components  {}", pretzel_components(&w));
    println!("det         {}", pretzel_det(&w));
    match pretzel_reduce(&w) {
        Ok(PretzelState::Rational(r)) => println!("reduces to  rational [{r}]"),
        Ok(PretzelState::Composite([a, b])) => println!("reduces to  T(2,{a}) # T(2,{b})"),
        Ok(PretzelState::Pretzel(p)) => println!("reduces to  P({p})"),
        Err(_) => println!("reduces to  (no unit or zero column)"),
    }
    match theorem47_prediction(&w) {
        Ok(p) => println!(
            "closed form case {}: u_BJ={} u_M={} delta={}",
            p.case, p.u_bj, p.u_m, p.delta
        ),
        Err(_) => println!("closed form (none for this parity pattern)"),
    }
    println!("lower bound {}", pretzel_bounds(&w).lower_bound);
    if let Ok(v) = engine.u_bj_odd_pretzel(&w) {
        println!("u_BJ        {v} (odd recursion)");
    }
    let rule = if strict {
        TrivialityRule::Determinant
    } else {
        TrivialityRule::Montesinos
    };
    let d = pretzel_diagram_unlink_with(&w, rule)?;
    println!("u(D)        {} witness={}", d.u_d, d.witness);
    Ok(Done::Ok)
}

fn enumerate(
    engine: &BjEngine,
    n: u64,
    gap_only: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<Done, Error> {
    let all = enumerate_rational(n, engine)?;
    let ratio = GapRatio::of(&all);
    let records: Vec<_> = all
        .into_iter()
        .filter(|r| !gap_only || r.delta_bj > 0)
        .collect();
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => write_csv(&records, sink)?,
        Format::Json => write_json(&records, sink)?,
        Format::Table => write_table(&records, sink)?,
    }
    eprintln!("n = {n}: {} classes, gap ratio {ratio}", ratio.total);
    Ok(Done::Ok)
}

fn verify_tables(engine: &BjEngine) -> Result<bool, Error> {
    let mut ok = true;
    for d in verify_section3(9..=16, engine)? {
        println!("{d}");
        ok &= d.is_match();
    }
    Ok(ok)
}

fn verify_families(verifier: &Verifier, grid: &Grid, verbose: bool) -> bool {
    let mut ok = true;
    for r in verifier.verify_all(grid) {
        println!("{}", r.summary());
        let fails = r.status == Status::Verified && !r.is_clean();
        ok &= !fails;
        if verbose || fails {
            for p in r.points.iter().filter(|p| p.outcome == Outcome::Mismatch) {
                let params: Vec<String> =
                    p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "  {} {}: {}",
                    params.join(","),
                    p.instance.as_deref().unwrap_or("?"),
                    p.notes.join("; ")
                );
            }
        }
    }
    ok
}

fn run(cli: Cli) -> Result<Done, Error> {
    let verifier = Verifier::new();
    let engine = verifier.rational();
    if let Some(p) = cli.cache_file.as_deref().filter(|p| p.exists()) {
        let n = load_cache(engine, p)?;
        log::info!("loaded {n} cache entries from {}", p.display());
    }
    let done = match cli.command {
        Command::Fraction { word } => fraction(&word)?,
        Command::Equiv {
            first,
            second,
            strict,
        } => equiv(&first, &second, strict)?,
        Command::Udiag { word } => udiag(&word)?,
        Command::Ubj { word } => ubj(engine, &word)?,
        Command::Gap { word, json } => gap(engine, &word, json)?,
        Command::Pretzel { columns, strict } => pretzel(verifier.pretzels(), &columns, strict)?,
        Command::Enumerate {
            crossings,
            gap_only,
            format,
            out,
        } => enumerate(engine, crossings, gap_only, format, out.as_deref())?,
        Command::Verify {
            section3,
            families,
            all,
            grid,
            verbose,
        } => {
            let grid: Grid = grid.as_deref().unwrap_or("").parse()?;
            let mut ok = true;
            if section3 || all {
                ok &= verify_tables(engine)?;
            }
            if families || all {
                ok &= verify_families(&verifier, &grid, verbose);
            }
            if ok {
                Done::Ok
            } else {
                Done::Differs
            }
        }
        Command::Cache { load, warm, save } => {
            if let Some(p) = &load {
                println!(
                    "loaded {} entries from {}",
                    load_cache(engine, p)?,
                    p.display()
                );
            }
            if let Some(n) = warm {
                for c in unlink_core::enumerate::MIN_CROSSINGS..=n {
                    enumerate_rational(c, engine)?;
                }
            }
            if let Some(p) = &save {
                save_cache(engine, p)?;
                println!("saved {} entries to {}", engine.cache_len(), p.display());
            }
            Done::Ok
        }
    };
    if let Some(p) = &cli.cache_file {
        save_cache(engine, p)?;
    }
    Ok(done)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(Done::Ok) => ExitCode::SUCCESS,
        Ok(Done::Differs) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
