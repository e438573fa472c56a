//! The `qpac` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::detectors::{detect_all, PatternId};
use crate::pairio::{load_pair, scan_corpus, CaseEntry};
use crate::report::{
    emit_feature_records, emit_report, feature_records, CaseError, CaseOutcome, CorpusScore, Format,
};
use crate::semantics::{build_context, StandardGateTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qpac", version, about = "Classify quantum bug-fix patterns in buggy/fixed Qiskit pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze one buggy/fixed pair.
    Detect {
        #[arg(long)]
        buggy: PathBuf,
        #[arg(long)]
        fixed: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Comma-separated pattern ids to include in the report.
        #[arg(long, value_delimiter = ',')]
        patterns: Option<Vec<String>>,
    },
    /// Score every case of a labeled corpus.
    Corpus {
        root: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write one feature record per pattern and case as NDJSON.
    Features {
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Run the CLI and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let gates = match StandardGateTable::from_env() {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(stderr, "qpac: {e}");
            return EXIT_IO;
        }
    };
    match cli.command {
        Command::Detect {
            buggy,
            fixed,
            format,
            patterns,
        } => cmd_detect(&buggy, &fixed, format, patterns.as_deref(), &gates, stdout, stderr),
        Command::Corpus { root, format } => cmd_corpus(&root, format, &gates, stdout, stderr),
        Command::Features { root, out } => cmd_features(&root, &out, &gates, stderr),
    }
}

fn parse_patterns(raw: &[String]) -> Result<BTreeSet<PatternId>, String> {
    raw.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<PatternId>().map_err(|e| e.to_string()))
        .collect()
}

pub fn cmd_detect(
    buggy: &Path,
    fixed: &Path,
    format: Format,
    patterns: Option<&[String]>,
    gates: &StandardGateTable,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let keep = match patterns.map(parse_patterns).transpose() {
        Ok(keep) => keep,
        Err(e) => {
            let _ = writeln!(stderr, "qpac: {e}");
            return EXIT_USAGE;
        }
    };
    let pair = match load_pair(buggy, fixed) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "qpac: {e}");
            return EXIT_IO;
        }
    };
    let ctx = build_context(&pair, gates);
    let mut report = detect_all(&ctx);
    if let Some(keep) = &keep {
        report.restrict_to(keep);
    }
    let _ = stdout.write_all(emit_report(&report, format).as_bytes());
    match &ctx.failure {
        Some(failure) => {
            let _ = writeln!(stderr, "qpac: {failure}");
            EXIT_IO
        }
        None => EXIT_OK,
    }
}

fn load_entries(root: &Path, stderr: &mut dyn Write) -> Option<Vec<CaseEntry>> {
    match scan_corpus(root) {
        Ok(entries) => Some(entries),
        Err(e) => {
            let _ = writeln!(stderr, "qpac: {e}");
            None
        }
    }
}

/// Run detection over all cases concurrently. Output keeps the scan order.
pub fn run_corpus(entries: Vec<CaseEntry>, gates: &StandardGateTable) -> Vec<CaseOutcome> {
    entries
        .into_par_iter()
        .map(|entry| match entry.outcome {
            Ok(case) => CaseOutcome::Scored {
                case: entry.name,
                expected: case.expected_patterns,
                report: detect_all(&build_context(&case.pair, gates)),
            },
            Err(e) => CaseOutcome::Failed(CaseError {
                case: entry.name,
                message: e.to_string(),
            }),
        })
        .collect()
}

pub fn cmd_corpus(
    root: &Path,
    format: Format,
    gates: &StandardGateTable,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let Some(entries) = load_entries(root, stderr) else {
        return EXIT_IO;
    };
    let score = CorpusScore::tally(&run_corpus(entries, gates));
    let _ = stdout.write_all(score.emit(format).as_bytes());
    if score.is_clean() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

pub fn cmd_features(root: &Path, out: &Path, gates: &StandardGateTable, stderr: &mut dyn Write) -> i32 {
    let Some(entries) = load_entries(root, stderr) else {
        return EXIT_IO;
    };
    let per_case: Vec<Result<String, String>> = entries
        .into_par_iter()
        .map(|entry| {
            let case = entry.outcome.map_err(|e| format!("{}: {e}", entry.name))?;
            let ctx = build_context(&case.pair, gates);
            Ok(emit_feature_records(&feature_records(&ctx, &detect_all(&ctx))))
        })
        .collect();
    let mut body = String::new();
    for item in per_case {
        match item {
            Ok(lines) => body.push_str(&lines),
            Err(e) => {
                let _ = writeln!(stderr, "qpac: skipped case {e}");
            }
        }
    }
    if let Err(e) = fs::write(out, body) {
        let _ = writeln!(stderr, "qpac: cannot write {}: {e}", out.display());
        return EXIT_IO;
    }
    EXIT_OK
}
