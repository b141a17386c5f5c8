//! Command implementations behind the `upo` binary. Each command returns an
//! [`Outcome`] holding the machine-readable report and the text destined for
//! stdout and stderr, so the binary only parses arguments and prints.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aboutness::{classify_ice, IceCategory};
use crate::grounding::{ground, realize, GroundingError, GroundingSummary, NodeStatus, RealizeError, TraceNode};
use crate::lint::{has_errors, lint_and_ground, Finding, Severity};
use crate::model::{EntityKind, Ontology};
use crate::parser::{parse_with, serialize, ParseError, ParseOptions};
use crate::temporal::{emit_designation_expression, resolve_indexical, ResolvedInterval, TemporalContext};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool_version: String,
    pub input: String,
    pub findings: Vec<Finding>,
    pub grounding: Vec<GroundingSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<ResolvedInterval>,
    pub exit_code: u8,
}

impl Report {
    pub fn new(input: &Path) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_owned(),
            input: input.display().to_string(),
            findings: Vec::new(),
            grounding: Vec::new(),
            resolved: None,
            exit_code: EXIT_OK,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check {
        path: PathBuf,
    },
    Trace {
        path: PathBuf,
        ice: String,
    },
    Realize {
        path: PathBuf,
        blueprint: String,
        individual: String,
        out: PathBuf,
    },
    Resolve {
        path: PathBuf,
        ice: String,
        at: String,
    },
}

impl Command {
    pub fn path(&self) -> &Path {
        match self {
            Command::Check { path }
            | Command::Trace { path, .. }
            | Command::Realize { path, .. }
            | Command::Resolve { path, .. } => path,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub prelude: bool,
    pub json: bool,
    pub color: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            prelude: true,
            json: false,
            color: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: Report,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.report.exit_code
    }
}

/// Output under construction. With `--json` the human text is dropped and
/// the report is printed instead.
struct Run {
    report: Report,
    text: String,
    stderr: String,
    options: Options,
}

impl Run {
    fn fail(mut self, message: impl std::fmt::Display) -> Outcome {
        writeln!(self.stderr, "error: {message}").unwrap();
        self.finish(EXIT_FAILURE)
    }

    fn finish(mut self, exit_code: u8) -> Outcome {
        self.report.exit_code = exit_code;
        let stdout = if self.options.json {
            self.report.to_json()
        } else {
            self.text
        };
        Outcome {
            report: self.report,
            stdout,
            stderr: self.stderr,
        }
    }

    fn paint(&self, text: &str, code: &str) -> String {
        if self.options.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_owned()
        }
    }
}

pub fn run(command: &Command, options: Options) -> Outcome {
    let mut run = Run {
        report: Report::new(command.path()),
        text: String::new(),
        stderr: String::new(),
        options,
    };
    let ontology = match load(command.path(), options.prelude, &mut run.stderr) {
        Ok(o) => o,
        Err(()) => return run.finish(EXIT_FAILURE),
    };
    match command {
        Command::Check { .. } => check(run, &ontology),
        Command::Trace { ice, .. } => trace(run, &ontology, ice),
        Command::Realize {
            blueprint,
            individual,
            out,
            ..
        } => realize_to(run, &ontology, blueprint, individual, out),
        Command::Resolve { ice, at, .. } => resolve(run, &ontology, ice, at),
    }
}

/// Reads and parses `path`, rendering any errors with the offending line.
fn load(path: &Path, prelude: bool, stderr: &mut String) -> Result<Ontology, ()> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            writeln!(stderr, "error: cannot read {}: {e}", path.display()).unwrap();
            return Err(());
        }
    };
    parse_with(&text, ParseOptions { prelude }).map_err(|errors| {
        for e in &errors {
            render_parse_error(stderr, path, &text, e);
        }
        writeln!(stderr, "{} error(s) in {}", errors.len(), path.display()).unwrap();
    })
}

fn render_parse_error(out: &mut String, path: &Path, text: &str, e: &ParseError) {
    writeln!(out, "{}:{e}", path.display()).unwrap();
    if let Some(line) = text.lines().nth(e.span.line - 1) {
        let line = line.trim_end_matches('\r');
        let number = e.span.line.to_string();
        let pad = " ".repeat(number.len());
        let caret_at = " ".repeat(e.span.column - 1);
        let carets = "^".repeat(e.span.length.max(1));
        writeln!(out, " {number} | {line}\n {pad} | {caret_at}{carets}").unwrap();
    }
}

fn check(mut run: Run, ontology: &Ontology) -> Outcome {
    let (findings, reports) = lint_and_ground(ontology);
    let path = run.report.input.clone();
    for f in &findings {
        let severity = match f.severity {
            Severity::Error => run.paint("error", "1;31"),
            Severity::Warning => run.paint("warning", "1;33"),
            Severity::Info => run.paint("info", "1;36"),
        };
        let at = f.span.map(|s| format!("{s}:")).unwrap_or_default();
        writeln!(
            run.text,
            "{path}:{at} {severity} {} [{}]: {}",
            f.rule,
            f.rule.title(),
            f.message
        )
        .unwrap();
    }
    if !reports.is_empty() {
        writeln!(run.text, "grounding:").unwrap();
        let width = reports.iter().map(|r| r.ice.len()).max().unwrap_or(0);
        for r in &reports {
            let empty = if r.necessarily_empty { ", necessarily empty" } else { "" };
            writeln!(
                run.text,
                "  {:width$}  {:?} (depth {}{empty})",
                r.ice, r.overall, r.max_depth
            )
            .unwrap();
        }
    }
    let count = |s: Severity| findings.iter().filter(|f| f.severity == s).count();
    writeln!(
        run.text,
        "{} error(s), {} warning(s), {} info",
        count(Severity::Error),
        count(Severity::Warning),
        count(Severity::Info)
    )
    .unwrap();

    let exit = if has_errors(&findings) { EXIT_FINDINGS } else { EXIT_OK };
    run.report.grounding = reports.iter().map(|r| r.summary()).collect();
    run.report.findings = findings;
    run.finish(exit)
}

fn trace(mut run: Run, ontology: &Ontology, ice: &str) -> Outcome {
    let report = match ground(ontology, ice) {
        Ok(r) => r,
        Err(GroundingError::Model(_)) => return run.fail(format!("'{ice}' is not a declared ICE")),
        Err(e) => return run.fail(e),
    };
    let empty = if report.necessarily_empty {
        ", necessarily empty"
    } else {
        ""
    };
    writeln!(
        run.text,
        "{ice}: {:?} (max depth {}{empty})",
        report.overall, report.max_depth
    )
    .unwrap();
    let tree = report.trace();
    let mut rendered = String::new();
    render_tree(&run, &tree, "", None, &mut rendered);
    run.text.push_str(&rendered);
    run.report.grounding.push(report.summary());
    run.finish(EXIT_OK)
}

/// Draws `node` and its children with box-drawing guides. `last` is `None`
/// for the root.
fn render_tree(run: &Run, node: &TraceNode, prefix: &str, last: Option<bool>, out: &mut String) {
    let (branch, extension) = match last {
        None => ("", ""),
        Some(false) => ("├── ", "│   "),
        Some(true) => ("└── ", "    "),
    };
    let status = format!("{:?}", node.status);
    let status = match node.status {
        NodeStatus::Actual => run.paint(&status, "32"),
        NodeStatus::Ungrounded => run.paint(&status, "1;31"),
        NodeStatus::Cyclic => run.paint(&status, "1;33"),
        NodeStatus::Empty => run.paint(&status, "36"),
        NodeStatus::Defined => status,
    };
    write!(out, "{prefix}{branch}{} [{status}]", node.subject).unwrap();
    if node.see_above {
        out.push_str(" (see above)");
    } else if let Some(note) = &node.note {
        write!(out, " {}", run.paint(&format!("-- {note}"), "2")).unwrap();
    }
    out.push('\n');
    let child_prefix = format!("{prefix}{extension}");
    for (i, child) in node.children.iter().enumerate() {
        render_tree(run, child, &child_prefix, Some(i + 1 == node.children.len()), out);
    }
}

fn realize_to(mut run: Run, ontology: &Ontology, blueprint: &str, individual: &str, out: &Path) -> Outcome {
    match realize(ontology, blueprint, individual) {
        Ok(updated) => {
            if let Err(e) = std::fs::write(out, serialize(&updated)) {
                return run.fail(format!("cannot write {}: {e}", out.display()));
            }
            writeln!(
                run.text,
                "'{individual}' conforms to '{blueprint}'; wrote {}",
                out.display()
            )
            .unwrap();
            run.finish(EXIT_OK)
        }
        Err(e @ RealizeError::NotConformant { .. }) => {
            let RealizeError::NotConformant { path, .. } = &e else {
                unreachable!()
            };
            writeln!(run.text, "{e}").unwrap();
            for (depth, step) in path.iter().enumerate() {
                writeln!(run.text, "{}{step}", "  ".repeat(depth + 1)).unwrap();
            }
            if run.options.json {
                run.stderr = std::mem::take(&mut run.text);
            }
            run.finish(EXIT_FINDINGS)
        }
        Err(e) => run.fail(e),
    }
}

fn resolve(mut run: Run, ontology: &Ontology, ice: &str, at: &str) -> Outcome {
    if let Err(e) = ontology.expect(ice, EntityKind::Ice) {
        return run.fail(e);
    }
    match classify_ice(ontology, ice) {
        Ok(k) if k.category == IceCategory::TemporalExpression => {}
        _ => return run.fail(format!("'{ice}' is not a TemporalExpression")),
    }
    let Some((mode, day)) = ontology.temporal_frame(ice).and_then(|f| Some((f.mode?, f.cycle?))) else {
        return run.fail(format!("'{ice}' needs both 'Mode:' and 'Cycle:' in its frame"));
    };
    let ctx = match TemporalContext::parse(at, day) {
        Ok(c) => c,
        Err(e) => return run.fail(e),
    };
    let interval = match resolve_indexical(mode, &ctx) {
        Ok(i) => i,
        Err(e) => return run.fail(e),
    };
    let designation = match emit_designation_expression(mode, &ctx, ontology) {
        Ok(e) => e,
        Err(e) => return run.fail(e),
    };
    writeln!(
        run.text,
        "{ice} ({mode} {}) uttered {}:\n  first instant: {}\n  last instant:  {}\n  designation:   {designation}",
        interval.designated_class,
        crate::temporal::format_timestamp(&ctx.utterance),
        crate::temporal::format_timestamp(&interval.first_instant),
        crate::temporal::format_timestamp(&interval.last_instant),
    )
    .unwrap();
    run.report.resolved = Some(interval);
    run.finish(EXIT_OK)
}

/// Report for a run that died unexpectedly.
pub fn crash_outcome(command: &Command, options: Options, message: &str) -> Outcome {
    let run = Run {
        report: Report::new(command.path()),
        text: String::new(),
        stderr: String::new(),
        options,
    };
    run.fail(format!("internal error: {message}"))
}
