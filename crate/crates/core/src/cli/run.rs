//! Command-line commands. [`run`] is the whole binary minus process exit.

use std::path::PathBuf;

use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::condition::{Condition, Partition};
use crate::conversion::{conv, Classifier, ConvProblem};
use crate::reduction::{self, Whnf, DEFAULT_FUEL, DEFAULT_SPLIT_DEPTH};
use crate::semantics::{
    build_generic_instance, conservativity_translate, GenericInstance, refute_sigma, RefutationTarget, DEFAULT_SCAN_BOUND,
};
use crate::syntax::{Context, Mode, Term};
use crate::typecheck::{check_judgment, Certificate, Diagnostic, Judgment, JudgmentKind, Limits, Span};

use super::lexer::ParseError;
use super::parser::{parse_condition, parse_file, parse_term, Item, ItemKind};
use super::printer::print_judgment;

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, ClapParser)]
#[command(name = "mltt-forcing", version, about = "Type checker and normalizer for MLTT with a forcing layer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every item of a checking file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Reduce a term to weak head normal form at a condition.
    Whnf {
        term: String,
        #[arg(long, default_value = "{}")]
        cond: String,
        #[arg(long, default_value = "many-reals")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Evaluate a term on every leaf of the partition its stuck redexes induce.
    PartitionEval {
        term: String,
        #[arg(long, default_value = "{}")]
        cond: String,
        #[arg(long, default_value = "many-reals")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
        split_depth: usize,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Decide definitional equality of two closed types, or of two terms with `--type`.
    Conv {
        lhs: String,
        rhs: String,
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long, default_value = "{}")]
        cond: String,
        #[arg(long, default_value = "many-reals")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
        split_depth: usize,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Show that a closed term is no witness of `Sig (x : N) IsZero (f x)` at {}.
    RefuteSigma {
        term: String,
        /// Use `f[Q]` instead of `f`.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
        split_depth: usize,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Replace `f` by a plain sequence in each forcing-mode item and re-check.
    Conservativity {
        file: PathBuf,
        /// A closed plain term of type N -> N2.
        #[arg(long)]
        generic: String,
        /// Condition the sequence must be compatible with.
        #[arg(long, default_value = "{}")]
        cond: String,
        #[arg(long, default_value_t = DEFAULT_SCAN_BOUND)]
        scan_bound: u64,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn ok(code: i32, stdout: String) -> Self {
        RunOutput {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        RunOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_ACCEPT };
            let text = e.render().to_string();
            if e.use_stderr() {
                RunOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                RunOutput::ok(code, text)
            }
        }
    }
}

pub fn execute(cmd: Command) -> RunOutput {
    let result = match cmd {
        Command::Check { file, emit } => read(&file).map(|src| check_source(&src, &file.display().to_string(), emit)),
        Command::Whnf {
            term,
            cond,
            mode,
            fuel,
            emit,
        } => whnf_cmd(&term, &cond, &mode, fuel, emit),
        Command::PartitionEval {
            term,
            cond,
            mode,
            fuel,
            split_depth,
            emit,
        } => partition_eval_cmd(&term, &cond, &mode, fuel, split_depth, emit),
        Command::Conv {
            lhs,
            rhs,
            ty,
            cond,
            mode,
            fuel,
            split_depth,
            emit,
        } => conv_cmd(&lhs, &rhs, ty.as_deref(), &cond, &mode, Limits { fuel, max_depth: split_depth }, emit),
        Command::RefuteSigma {
            term,
            q,
            fuel,
            split_depth,
            emit,
        } => refute_cmd(&term, q.as_deref(), Limits { fuel, max_depth: split_depth }, emit),
        Command::Conservativity {
            file,
            generic,
            cond,
            scan_bound,
            emit,
        } => read(&file).and_then(|src| conservativity_cmd(&src, &generic, &cond, scan_bound, emit)),
    };
    result.unwrap_or_else(|e| e)
}

fn read(path: &PathBuf) -> Result<String, RunOutput> {
    std::fs::read_to_string(path).map_err(|e| RunOutput::usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_err(what: &str, e: ParseError) -> RunOutput {
    RunOutput::usage(format!("{what}:{e}"))
}

fn term_arg(src: &str) -> Result<Term, RunOutput> {
    parse_term(src).map_err(|e| parse_err("term", e))
}

fn cond_arg(src: &str) -> Result<Condition, RunOutput> {
    parse_condition(src).map_err(|e| parse_err("condition", e))
}

fn mode_arg(src: &str) -> Result<Mode, RunOutput> {
    src.parse().map_err(RunOutput::usage)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct WhnfView<'a> {
    term: &'a Term,
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    stuck_on: Option<u64>,
    steps: u64,
}

impl<'a> From<&'a Whnf> for WhnfView<'a> {
    fn from(w: &'a Whnf) -> Self {
        WhnfView {
            term: &w.term,
            class: w.class.name(),
            stuck_on: w.class.stuck_index(),
            steps: w.steps,
        }
    }
}

fn whnf_cmd(term: &str, cond: &str, mode: &str, fuel: u64, emit: Emit) -> Result<RunOutput, RunOutput> {
    let t = term_arg(term)?;
    let p = cond_arg(cond)?;
    let mode = mode_arg(mode)?;
    let w = reduction::whnf(&t, &p, mode, fuel).map_err(|e| RunOutput {
        code: EXIT_REJECT,
        stdout: String::new(),
        stderr: format!("{e}\n"),
    })?;
    let out = match emit {
        Emit::Text => match w.class.stuck_index() {
            Some(k) => format!("{}\n-- stuck on index {k}\n", w.term),
            None => format!("{}\n", w.term),
        },
        Emit::Json => json(&WhnfView::from(&w)),
    };
    Ok(RunOutput::ok(EXIT_ACCEPT, out))
}

#[derive(Serialize)]
struct PartitionView<'a> {
    partition: &'a Partition,
    leaves: Vec<LeafView<'a>>,
}

#[derive(Serialize)]
struct LeafView<'a> {
    condition: &'a Condition,
    whnf: WhnfView<'a>,
}

fn partition_eval_cmd(
    term: &str,
    cond: &str,
    mode: &str,
    fuel: u64,
    depth: usize,
    emit: Emit,
) -> Result<RunOutput, RunOutput> {
    let t = term_arg(term)?;
    let p = cond_arg(cond)?;
    let mode = mode_arg(mode)?;
    let eval = reduction::partition_eval(&t, &p, mode, fuel, depth).map_err(|e| RunOutput {
        code: EXIT_REJECT,
        stdout: String::new(),
        stderr: format!("{e}\n"),
    })?;
    let out = match emit {
        Emit::Text => eval
            .leaves
            .iter()
            .map(|(q, w)| format!("{q} -> {}\n", w.term))
            .collect(),
        Emit::Json => json(&PartitionView {
            partition: &eval.partition,
            leaves: eval
                .leaves
                .iter()
                .map(|(condition, w)| LeafView {
                    condition,
                    whnf: w.into(),
                })
                .collect(),
        }),
    };
    Ok(RunOutput::ok(EXIT_ACCEPT, out))
}

#[derive(Serialize)]
struct ConvView<'a> {
    problem: &'a ConvProblem,
    convertible: bool,
    trace: &'a [String],
    splits: &'a [Partition],
}

fn conv_cmd(
    lhs: &str,
    rhs: &str,
    ty: Option<&str>,
    cond: &str,
    mode: &str,
    limits: Limits,
    emit: Emit,
) -> Result<RunOutput, RunOutput> {
    let problem = ConvProblem {
        context: Context::new(),
        condition: cond_arg(cond)?,
        lhs: term_arg(lhs)?,
        rhs: term_arg(rhs)?,
        classifier: match ty {
            Some(ty) => Classifier::Term(term_arg(ty)?),
            None => Classifier::Type,
        },
    };
    let mode = mode_arg(mode)?;
    let outcome = conv(&problem, mode, limits.fuel, limits.max_depth).map_err(|e| RunOutput {
        code: EXIT_REJECT,
        stdout: String::new(),
        stderr: format!("{e}\n"),
    })?;
    let code = if outcome.convertible { EXIT_ACCEPT } else { EXIT_REJECT };
    let out = match emit {
        Emit::Text => format!(
            "{}\n",
            if outcome.convertible {
                "convertible"
            } else {
                "not convertible"
            }
        ),
        Emit::Json => json(&ConvView {
            problem: &problem,
            convertible: outcome.convertible,
            trace: &outcome.trace,
            splits: &outcome.splits,
        }),
    };
    Ok(RunOutput::ok(code, out))
}

fn refute_cmd(term: &str, q: Option<&str>, limits: Limits, emit: Emit) -> Result<RunOutput, RunOutput> {
    let t = term_arg(term)?;
    let target = match q {
        Some(q) => RefutationTarget::GenericAt(cond_arg(q)?),
        None => RefutationTarget::Generic,
    };
    match refute_sigma(&t, &target, limits) {
        Ok(cert) => {
            let out = match emit {
                Emit::Text => format!(
                    "refuted: at {} the first component is {} and IsZero ({} {}) is N0\n",
                    cert.condition,
                    Term::numeral(cert.numeral),
                    target.sequence(),
                    Term::numeral(cert.numeral)
                ),
                Emit::Json => json(&cert),
            };
            Ok(RunOutput::ok(EXIT_ACCEPT, out))
        }
        Err(e) => Ok(RunOutput {
            code: EXIT_REJECT,
            stdout: String::new(),
            stderr: format!("cannot refute: {e}\n"),
        }),
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ItemReport {
    Def {
        name: String,
        span: Span,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<Certificate>,
    },
    Check {
        span: Span,
        certificate: Certificate,
    },
}

impl ItemReport {
    fn certificate(&self) -> Option<&Certificate> {
        match self {
            ItemReport::Def { certificate, .. } => certificate.as_ref(),
            ItemReport::Check { certificate, .. } => Some(certificate),
        }
    }

    fn span(&self) -> Span {
        match self {
            ItemReport::Def { span, .. } | ItemReport::Check { span, .. } => *span,
        }
    }
}

#[derive(Serialize)]
struct FileReport<'a> {
    file: &'a str,
    accepted: bool,
    items: Vec<ItemReport>,
}

/// Typed definitions are checked as closed many-reals terms at {}.
fn item_judgment(item: &Item) -> Option<Judgment> {
    match &item.kind {
        ItemKind::Def { ty: Some(ty), body, .. } => Some(Judgment::closed(
            Condition::new(),
            Mode::ManyReals,
            JudgmentKind::Term {
                term: body.clone(),
                ty: ty.clone(),
            },
        )),
        ItemKind::Def { ty: None, .. } => None,
        ItemKind::Check(j) => Some(j.clone()),
    }
}

fn check_item(item: &Item) -> ItemReport {
    let cert = item_judgment(item)
        .map(|j| check_judgment(&j, item.settings.fuel, item.settings.max_depth).with_span(item.span));
    match &item.kind {
        ItemKind::Def { name, .. } => ItemReport::Def {
            name: name.clone(),
            span: item.span,
            certificate: cert,
        },
        ItemKind::Check(_) => ItemReport::Check {
            span: item.span,
            certificate: cert.expect("check items have a judgment"),
        },
    }
}

fn diagnostic_lines(out: &mut String, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        out.push_str(&format!("  error: {}\n", d.message));
        if let Some(q) = &d.condition {
            out.push_str(&format!("  at condition {q}\n"));
        }
    }
}

/// Check a whole source text. `name` is used in messages only.
pub fn check_source(src: &str, name: &str, emit: Emit) -> RunOutput {
    let file = match parse_file(src) {
        Ok(f) => f,
        Err(e) => return parse_err(name, e),
    };
    let reports: Vec<ItemReport> = file.items.par_iter().map(check_item).collect();
    let accepted = reports.iter().all(|r| r.certificate().is_none_or(Certificate::accepted));
    let code = if accepted { EXIT_ACCEPT } else { EXIT_REJECT };
    let stdout = match emit {
        Emit::Json => json(&FileReport {
            file: name,
            accepted,
            items: reports,
        }),
        Emit::Text => {
            let mut out = String::new();
            for r in &reports {
                let span = r.span();
                match r {
                    ItemReport::Def {
                        name: def,
                        certificate: None,
                        ..
                    } => out.push_str(&format!("{name}:{}:{}: defined {def}\n", span.line, span.column)),
                    ItemReport::Def {
                        name: def,
                        certificate: Some(c),
                        ..
                    } => {
                        let verdict = if c.accepted() { "accept" } else { "reject" };
                        out.push_str(&format!("{name}:{}:{}: {verdict} def {def}\n", span.line, span.column));
                        diagnostic_lines(&mut out, &c.diagnostics);
                    }
                    ItemReport::Check { certificate: c, .. } => {
                        let verdict = if c.accepted() { "accept" } else { "reject" };
                        out.push_str(&format!(
                            "{name}:{}:{}: {verdict} {}\n",
                            span.line,
                            span.column,
                            print_judgment(&c.judgment)
                        ));
                        diagnostic_lines(&mut out, &c.diagnostics);
                    }
                }
            }
            out
        }
    };
    RunOutput::ok(code, stdout)
}

#[derive(Serialize)]
struct TranslationReport {
    span: Span,
    original: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    translated: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

#[derive(Serialize)]
struct ConservativityReport<'a> {
    generic: &'a GenericInstance,
    preserved: bool,
    items: &'a [TranslationReport],
}

/// Accepted forcing judgments must stay accepted after translation.
fn conservativity_cmd(
    src: &str,
    generic: &str,
    cond: &str,
    scan_bound: u64,
    emit: Emit,
) -> Result<RunOutput, RunOutput> {
    let g = term_arg(generic)?;
    let p = cond_arg(cond)?;
    let file = parse_file(src).map_err(|e| parse_err("file", e))?;
    let inst = build_generic_instance(&g, &p, scan_bound, Limits::default())
        .map_err(|e| RunOutput::usage(format!("generic instance: {e}")))?;
    let reports: Vec<TranslationReport> = file
        .items
        .par_iter()
        .filter_map(|item| match &item.kind {
            ItemKind::Check(j) if j.mode == Mode::Forcing => Some((item, j)),
            _ => None,
        })
        .map(|(item, j)| {
            let (fuel, depth) = (item.settings.fuel, item.settings.max_depth);
            let original = check_judgment(j, fuel, depth).with_span(item.span);
            let (translated, skipped) = match conservativity_translate(j, &inst, fuel) {
                Ok(tj) => (Some(check_judgment(&tj, fuel, depth).with_span(item.span)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            TranslationReport {
                span: item.span,
                original,
                translated,
                skipped,
            }
        })
        .collect();
    let preserved = reports.iter().all(|r| {
        !r.original.accepted() || r.translated.as_ref().is_none_or(Certificate::accepted)
    });
    let code = if preserved { EXIT_ACCEPT } else { EXIT_REJECT };
    let stdout = match emit {
        Emit::Json => json(&ConservativityReport {
            generic: &inst,
            preserved,
            items: &reports,
        }),
        Emit::Text => {
            let mut out = format!("n_g = {}, v_g = {}\n", inst.n_g, inst.v_g);
            for r in &reports {
                let verdict = |c: &Certificate| if c.accepted() { "accept" } else { "reject" };
                out.push_str(&format!("{}:{}: {}", r.span.line, r.span.column, verdict(&r.original)));
                match (&r.translated, &r.skipped) {
                    (Some(t), _) => {
                        out.push_str(&format!(" -> {} {}\n", verdict(t), print_judgment(&t.judgment)));
                        diagnostic_lines(&mut out, &t.diagnostics);
                    }
                    (None, Some(why)) => out.push_str(&format!(" -> skipped: {why}\n")),
                    (None, None) => out.push('\n'),
                }
            }
            out
        }
    };
    Ok(RunOutput::ok(code, stdout))
}
