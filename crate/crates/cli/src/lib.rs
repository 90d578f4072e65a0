//! The `normex` command line: `extract`, `eval` and `export`.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
//! 3 a table that violates its structural invariants.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use normex_core::clause_table::{self, ClauseTable, Format, ReadError};
use normex_core::codiagram::{build_model, export_model};
use normex_core::depgraph::{parse_conllu, DependencyGraph, LabelProfile};
use normex_core::evaluate::{score_documents, EvalReport};
use normex_core::heuristics::LexiconConfig;
use normex_core::normalize::RenderStyle;
use normex_core::rules::extract_document;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "normex", version, about = "Extract normative clauses from dependency parses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract a clause table from CoNLL-U files (stdin when none are given)
    Extract(ExtractArgs),
    /// Score predicted tables against gold tables
    Eval(EvalArgs),
    /// Convert a clause table into a contract model (JSON)
    Export(ExportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ExtractArgs {
    pub inputs: Vec<PathBuf>,
    /// Keyword lexicon (JSON); defaults to the built-in lists
    #[arg(long, conflicts_with = "rules_only")]
    pub lexicon: Option<PathBuf>,
    /// Dependency label scheme: stanford-classic or ud
    #[arg(long, default_value = "stanford-classic")]
    pub profile: String,
    /// Structural rules only, no lexicon heuristics
    #[arg(long)]
    pub rules_only: bool,
    /// Output format; inferred from --out when omitted
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pronoun tags as `<user>` (canonical) or `User` (display)
    #[arg(long, default_value = "canonical")]
    pub style: RenderStyle,
    /// Document id; defaults to `# newdoc id` or the first file name
    #[arg(long)]
    pub doc_id: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Predicted table, or a directory of tables
    pub pred: PathBuf,
    /// Gold table, or a directory of tables
    pub gold: PathBuf,
    /// Also write the report as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    pub table: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Located { path: String, line: usize, message: String },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {message}")]
    Invariant { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant { .. } => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        }
    }

    fn input(path: &Path, message: impl ToString) -> Self {
        CliError::Input { path: display(path), message: message.to_string() }
    }
}

fn display(path: &Path) -> String {
    if path.as_os_str().is_empty() {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    if path.as_os_str().is_empty() {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|source| CliError::Io { path: display(path), source })?;
        return Ok(buf);
    }
    fs::read(path).map_err(|source| CliError::Io { path: display(path), source })
}

fn write_out(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io { path: display(p), source }),
        None => stdout
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn newdoc_id(text: &[u8]) -> Option<String> {
    let text = std::str::from_utf8(text).ok()?;
    text.lines().find_map(|l| {
        let rest = l.strip_prefix('#')?.trim_start();
        let (key, value) = rest.split_once('=')?;
        (key.trim() == "newdoc id").then(|| value.trim().to_string())
    })
}

fn read_table(path: &Path) -> Result<ClauseTable, CliError> {
    let bytes = read(path)?;
    clause_table::deserialize(&bytes, Format::from_path(path)).map_err(|e| match e {
        ReadError::Invalid(inner) => CliError::Invariant { path: display(path), message: inner.to_string() },
        other => CliError::input(path, other),
    })
}

/// Parses, extracts and writes one table. Returns the table as written.
pub fn cmd_extract(args: &ExtractArgs, stdout: &mut dyn Write) -> Result<ClauseTable, CliError> {
    let profile = LabelProfile::by_name(&args.profile).map_err(|e| CliError::input(Path::new("--profile"), e))?;
    let cfg = if args.rules_only {
        LexiconConfig::rules_only()
    } else if let Some(path) = &args.lexicon {
        LexiconConfig::from_json(&read(path)?).map_err(|e| CliError::input(path, e))?
    } else {
        LexiconConfig::default()
    };
    let inputs: Vec<PathBuf> = if args.inputs.is_empty() { vec![PathBuf::new()] } else { args.inputs.clone() };

    let mut doc_id = args.doc_id.clone();
    let mut per_file: Vec<(String, Vec<DependencyGraph>)> = Vec::new();
    for path in &inputs {
        let bytes = read(path)?;
        if doc_id.is_none() {
            doc_id = newdoc_id(&bytes);
        }
        let graphs = parse_conllu(&bytes).map_err(|e| CliError::Located {
            path: display(path),
            line: e.line,
            message: format!("sentence {}: {}", e.sent_id, e.kind),
        })?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        per_file.push((stem, graphs));
    }
    let doc_id = doc_id.unwrap_or_else(|| per_file.first().map(|(s, _)| s.clone()).unwrap_or_default());

    let mut seen = std::collections::BTreeSet::new();
    let collide = per_file.len() > 1
        && per_file
            .iter()
            .flat_map(|(_, gs)| gs.iter().map(|g| g.sent_id().to_string()))
            .any(|id| !seen.insert(id));
    let graphs: Vec<DependencyGraph> = per_file
        .into_iter()
        .flat_map(|(stem, gs)| {
            gs.into_iter().map(move |g| {
                if collide {
                    let id = format!("{stem}:{}", g.sent_id());
                    g.with_sent_id(id)
                } else {
                    g
                }
            })
        })
        .collect();

    let table = extract_document(&doc_id, &graphs, &cfg, &profile, args.style);
    table.validate().map_err(|e| CliError::Invariant { path: "<extracted table>".into(), message: e.to_string() })?;
    let format = args
        .format
        .unwrap_or_else(|| args.out.as_deref().map(Format::from_path).unwrap_or(Format::Csv));
    write_out(args.out.as_deref(), &clause_table::serialize(&table, format), stdout)?;
    Ok(table)
}

fn table_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io { path: display(dir), source })?;
    let mut files = Vec::new();
    for e in entries {
        let p = e.map_err(|source| CliError::Io { path: display(dir), source })?.path();
        let ext = p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if p.is_file() && matches!(ext.as_deref(), Some("csv") | Some("json")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn keyed_tables(path: &Path) -> Result<BTreeMap<String, (PathBuf, ClauseTable)>, CliError> {
    let mut out: BTreeMap<String, (PathBuf, ClauseTable)> = BTreeMap::new();
    for f in table_files(path)? {
        let t = read_table(&f)?;
        let key = if t.doc_id.is_empty() {
            f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        } else {
            t.doc_id.clone()
        };
        if let Some((prev, _)) = out.get(&key) {
            return Err(CliError::input(&f, format!("document `{key}` also defined in {}", display(prev))));
        }
        out.insert(key, (f, t));
    }
    Ok(out)
}

/// Scores predictions against gold. Both paths are files, or both are directories.
pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<EvalReport, CliError> {
    let mut pairs: Vec<(ClauseTable, ClauseTable)> = Vec::new();
    match (args.pred.is_dir(), args.gold.is_dir()) {
        (false, false) => {
            let pred = read_table(&args.pred)?;
            let mut gold = read_table(&args.gold)?;
            if !pred.doc_id.is_empty() && !gold.doc_id.is_empty() && pred.doc_id != gold.doc_id {
                return Err(CliError::input(
                    &args.pred,
                    format!("document `{}` does not match gold document `{}`", pred.doc_id, gold.doc_id),
                ));
            }
            if gold.doc_id.is_empty() {
                gold.doc_id = pred.doc_id.clone();
            }
            pairs.push((pred, gold));
        }
        (true, true) => {
            let mut preds = keyed_tables(&args.pred)?;
            let golds = keyed_tables(&args.gold)?;
            if let Some((key, (path, _))) = preds.iter().find(|(k, _)| !golds.contains_key(*k)) {
                return Err(CliError::input(path, format!("document `{key}` has no gold table")));
            }
            for (key, (_, mut gold)) in golds {
                let pred = preds
                    .remove(&key)
                    .map(|(_, t)| t)
                    .unwrap_or_else(|| ClauseTable::new(key.clone(), Vec::new()));
                gold.doc_id = key;
                pairs.push((pred, gold));
            }
        }
        _ => {
            return Err(CliError::input(&args.pred, "prediction and gold must both be files or both directories"));
        }
    }
    let refs: Vec<(&ClauseTable, &ClauseTable)> = pairs.iter().map(|(p, g)| (p, g)).collect();
    let report = score_documents(&refs).map_err(|e| CliError::Invariant { path: display(&args.pred), message: e.to_string() })?;
    stdout
        .write_all(report.to_text().as_bytes())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if let Some(out) = &args.out {
        fs::write(out, report.to_json()).map_err(|source| CliError::Io { path: display(out), source })?;
    }
    Ok(report)
}

pub fn cmd_export(args: &ExportArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = read_table(&args.table)?;
    let model = build_model(&table).map_err(|e| CliError::Invariant { path: display(&args.table), message: e.to_string() })?;
    write_out(args.out.as_deref(), &export_model(&model), stdout)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Extract(a) => cmd_extract(a, stdout).map(drop),
        Command::Eval(a) => cmd_eval(a, stdout).map(drop),
        Command::Export(a) => cmd_export(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "normex: {e}");
            e.exit_code()
        }
    }
}
