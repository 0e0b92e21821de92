use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use uilog::stats::{coverage, profile};
use uilog::tabular::{infer_mapping, ingest, write_table, ColumnMapping};
use uilog::transform::{abstract_events, segment, CaseNotion, RuleSet};
use uilog::xes::{emit_extension_definition, read_xes_with, write_xes_unchecked, ReadOptions};
use uilog::{validate, UILog, ValidationReport};

use crate::{Format, InputArgs, OutputArgs};

pub type Result<T> = std::result::Result<T, String>;

#[derive(Debug, Clone, Copy)]
pub enum Level {
    Error,
    Warning,
}

/// Writes one diagnostic line to standard error, colored on a terminal unless
/// `UILOG_NO_COLOR` is set.
pub fn diag(level: Level, message: &str) {
    let color = std::env::var_os("UILOG_NO_COLOR").is_none() && io::stderr().is_terminal();
    let (label, ansi) = match level {
        Level::Error => ("error", "\x1b[31m"),
        Level::Warning => ("warning", "\x1b[33m"),
    };
    if color {
        eprintln!("{ansi}{label}\x1b[0m: {message}");
    } else {
        eprintln!("{label}: {message}");
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("reading standard input: {e}"))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        return io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("writing standard output: {e}"));
    }
    fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn guess(path: &Path) -> Option<Format> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "xes" | "xml" => Some(Format::Xes),
        "csv" | "tsv" | "txt" => Some(Format::Csv),
        _ => None,
    }
}

/// A loaded log plus the warnings produced while reading it.
struct Loaded {
    log: UILog,
    warnings: Vec<String>,
}

fn load(args: &InputArgs) -> Result<Loaded> {
    let format = args.format.or_else(|| guess(&args.input)).ok_or_else(|| {
        format!("cannot tell the format of {}; pass --format", args.input.display())
    })?;
    let text = read_text(&args.input)?;
    match format {
        Format::Xes => {
            let options = ReadOptions {
                allow_missing_names: true,
                ..ReadOptions::default()
            };
            let read = read_xes_with(&text, &options).map_err(|e| e.to_string())?;
            Ok(Loaded {
                log: read.log,
                warnings: read.warnings,
            })
        }
        Format::Csv => {
            if text.trim().is_empty() && args.mapping.is_none() {
                return Ok(Loaded {
                    log: UILog::new(),
                    warnings: Vec::new(),
                });
            }
            let mapping = match &args.mapping {
                Some(p) => ColumnMapping::from_toml(&read_text(p)?).map_err(|e| e.to_string())?,
                None => {
                    let first = text.lines().next().unwrap_or_default();
                    let delimiter = if first.contains('\t') && !first.contains(',') {
                        '\t'
                    } else if first.contains(';') && !first.contains(',') {
                        ';'
                    } else {
                        ','
                    };
                    let header: Vec<&str> =
                        first.split(delimiter).map(|h| h.trim().trim_matches('"')).collect();
                    let mut m = infer_mapping(&header).map_err(|e| e.to_string())?;
                    m.delimiter = delimiter.to_string();
                    m
                }
            };
            let (log, report) = ingest(&text, &mapping).map_err(|e| e.to_string())?;
            let mut warnings = report.warnings;
            warnings.extend(
                report
                    .rows_skipped
                    .iter()
                    .map(|s| format!("row {} skipped: {}", s.row, s.reason)),
            );
            Ok(Loaded { log, warnings })
        }
    }
}

fn render_report(report: &ValidationReport, path: Option<&Path>) -> String {
    let json = path
        .and_then(|p| p.extension())
        .and_then(|e| e.to_str())
        .is_some_and(|e| e == "json" || e == "jsonl");
    if json {
        report.render_json_lines()
    } else {
        report.render_text()
    }
}

pub fn convert(
    input: &InputArgs,
    output: &OutputArgs,
    notion: Option<&Path>,
    rules: Option<&Path>,
) -> Result<ExitCode> {
    let Loaded { mut log, warnings } = load(input)?;
    for w in &warnings {
        diag(Level::Warning, w);
    }
    if let Some(path) = notion {
        let notion = CaseNotion::from_toml(&read_text(path)?).map_err(|e| e.to_string())?;
        log = segment(&log, &notion).map_err(|e| e.to_string())?;
    }
    if let Some(path) = rules {
        let set = RuleSet::from_toml(&read_text(path)?).map_err(|e| e.to_string())?;
        let out = abstract_events(&log, &set.rules).map_err(|e| e.to_string())?;
        for w in &out.warnings {
            diag(Level::Warning, &w.to_string());
        }
        log = out.log;
    }

    let report = validate(&log);
    if let Some(path) = &output.report {
        write_text(path, &render_report(&report, Some(path)))?;
    }
    if !report.is_valid() {
        for v in &report.violations {
            diag(Level::Warning, &v.to_string());
        }
        if output.strict {
            diag(
                Level::Error,
                &format!("{} violation(s); nothing written", report.violations.len()),
            );
            return Ok(ExitCode::from(2));
        }
    }

    let format = output
        .out_format
        .or_else(|| guess(&output.output))
        .unwrap_or(Format::Xes);
    let text = match format {
        Format::Xes => write_xes_unchecked(&log).map_err(|e| e.to_string())?,
        Format::Csv => write_table(&log, &ColumnMapping::canonical()).map_err(|e| e.to_string())?,
    };
    write_text(&output.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn validate_cmd(input: &InputArgs, report_path: Option<&Path>, strict: bool) -> Result<ExitCode> {
    let Loaded { log, warnings } = load(input)?;
    for w in &warnings {
        diag(Level::Warning, w);
    }
    let report = validate(&log);
    let text = render_report(&report, report_path);
    match report_path {
        Some(p) => write_text(p, &text)?,
        None => write_text(Path::new("-"), &text)?,
    }
    let failed = !report.is_valid() || (strict && !warnings.is_empty());
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

pub fn stats(input: &InputArgs, output: &Path) -> Result<ExitCode> {
    let Loaded { log, warnings } = load(input)?;
    for w in &warnings {
        diag(Level::Warning, w);
    }
    let mut text = coverage(&log).render_text();
    text.push('\n');
    text.push_str(&profile(&log).render_text());
    write_text(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn extension(output: &Path) -> Result<ExitCode> {
    write_text(output, &emit_extension_definition())?;
    Ok(ExitCode::SUCCESS)
}
