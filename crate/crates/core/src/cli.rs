//! The `qml` command-line front end.
//!
//! Exit codes: 0 theorem (or success), 1 non-theorem (or a negative
//! answer), 2 unknown, 3 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::decision::{self, Budgets, Countermodel, Refutation, Verdict};
use crate::filtration::{collapse, verify_collapse};
use crate::formula::{admissible_closure, parse, parse_sequent, Formula, Sequent};
use crate::semantics::{eval, holds_at, EvalMode};
use crate::structure::{enumerate_structures, QuantumModalStructure, MAX_ENUMERATED_WORLDS};

pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qml",
    version,
    about = "Decision procedures for quantum modal logic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a sequent: derivation, countermodel or unknown.
    Decide {
        sequent: String,
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        #[arg(long, default_value_t = 2)]
        max_stage: usize,
        /// Saturation steps per universe stage.
        #[arg(long, default_value_t = 20_000)]
        step_limit: usize,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Require one countermodel per succedent member.
        #[arg(long)]
        literal_delta: bool,
        #[arg(long)]
        dedup: bool,
        /// Interleave both searches on one thread.
        #[arg(long)]
        single_thread: bool,
        /// Write the witness (model JSON or derivation text) here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Write a Graphviz rendering of the countermodel here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Evaluate a sequent at every world of a model file.
    CheckModel {
        file: PathBuf,
        #[arg(long)]
        sequent: String,
        /// Load the model even if it violates the structure conditions.
        #[arg(long)]
        no_validate: bool,
    },
    /// Collapse a model by the admissible closure of a formula.
    Filtrate {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Check the collapse lemmas and fail if one does not hold.
        #[arg(long)]
        verify: bool,
        /// Write the collapsed model here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a derivation up to a universe stage.
    Prove {
        sequent: String,
        #[arg(long, default_value_t = 0)]
        stage: usize,
        #[arg(long, default_value_t = 20_000)]
        step_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a countermodel up to a world count.
    Refute {
        sequent: String,
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Stream every valid structure with K worlds, one JSON line each.
    Enumerate {
        worlds: usize,
        /// Comma-separated atom names.
        #[arg(long, value_delimiter = ',', default_value = "")]
        atoms: Vec<String>,
        #[arg(long)]
        dedup: bool,
    },
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<i32, InputError>;

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_INPUT;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {}", msg.lines().next().unwrap_or(""));
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Decide {
            sequent,
            max_worlds,
            max_stage,
            step_limit,
            time_limit,
            literal_delta,
            dedup,
            single_thread,
            witness_out,
            dot,
        } => {
            check_worlds(max_worlds, 0)?;
            let time_limit = match time_limit {
                Some(t) if !(t.is_finite() && t >= 0.0) => {
                    return Err(InputError(format!("invalid time limit {t}")))
                }
                t => t.map(Duration::from_secs_f64),
            };
            let seq = parse_sequent(&sequent)?;
            let budgets = Budgets {
                max_stage,
                max_worlds,
                step_limit,
                time_limit,
                dedup,
                mode: if literal_delta {
                    EvalMode::Literal
                } else {
                    EvalMode::Pointwise
                },
            };
            let verdict = if single_thread {
                decision::decide_round_robin(&seq, &budgets)
            } else {
                decision::decide(&seq, &budgets)
            };
            report_verdict(&seq, &verdict, witness_out.as_deref(), dot.as_deref(), out)?;
            Ok(verdict.exit_code())
        }
        Command::CheckModel {
            file,
            sequent,
            no_validate,
        } => {
            let seq = parse_sequent(&sequent)?;
            let s = load_model(&file, !no_validate)?;
            check_model(&s, &seq, out)
        }
        Command::Filtrate {
            file,
            formula,
            verify,
            out: target,
        } => {
            let f = parse(&formula)?;
            let s = load_model(&file, true)?;
            let sigma = admissible_closure(&[f].into_iter().collect());
            let c = collapse(&s, &sigma)?;
            let model = c.result.to_model_file().to_json();
            match &target {
                Some(path) => write_file(path, &format!("{model}\n"))?,
                None => writeln!(out, "{model}")?,
            }
            let classes: Vec<String> = c.class_of.iter().map(ToString::to_string).collect();
            writeln!(out, "sigma: {}", join(c.sigma.iter()))?;
            writeln!(out, "classes: {}", classes.join(" "))?;
            writeln!(out, "worlds: {} -> {}", s.worlds, c.result.worlds)?;
            if !verify {
                return Ok(0);
            }
            let r = verify_collapse(&c);
            writeln!(out, "structure conditions: {}", yes_no(r.valid))?;
            writeln!(out, "size bound: {}", yes_no(r.size_bound))?;
            writeln!(out, "truth preserved: {}", yes_no(r.truth_preserved))?;
            Ok(if r.all_hold() { 0 } else { 1 })
        }
        Command::Prove {
            sequent,
            stage,
            step_limit,
            out: target,
        } => {
            let seq = parse_sequent(&sequent)?;
            match decision::prove(&seq, stage, step_limit) {
                Some(d) => {
                    let text = d.to_string();
                    write!(out, "{text}")?;
                    if let Some(path) = &target {
                        write_file(path, &text)?;
                    }
                    Ok(0)
                }
                None => {
                    writeln!(out, "not found at stage {stage}")?;
                    Ok(1)
                }
            }
        }
        Command::Refute {
            sequent,
            max_worlds,
            dedup,
            out: target,
            dot,
        } => {
            check_worlds(max_worlds, 1)?;
            let seq = parse_sequent(&sequent)?;
            match decision::refute(&seq, max_worlds, dedup) {
                Some(cm) => {
                    write_countermodel(&cm, target.as_deref(), dot.as_deref(), out)?;
                    Ok(0)
                }
                None => {
                    writeln!(out, "no countermodel up to {max_worlds}")?;
                    Ok(1)
                }
            }
        }
        Command::Enumerate {
            worlds,
            atoms,
            dedup,
        } => {
            check_worlds(worlds, 1)?;
            let atoms: Vec<String> = atoms.into_iter().filter(|a| !a.is_empty()).collect();
            for a in &atoms {
                if !parse(a).is_ok_and(|f| f.is_atom()) {
                    return Err(InputError(format!("invalid atom name {a:?}")));
                }
            }
            for s in enumerate_structures(worlds, &atoms, dedup) {
                writeln!(out, "{}", s.to_model_file().to_json())?;
            }
            Ok(0)
        }
    }
}

fn check_worlds(k: usize, min: usize) -> Result<(), InputError> {
    if (min..=MAX_ENUMERATED_WORLDS).contains(&k) {
        Ok(())
    } else {
        Err(InputError(format!(
            "world count {k} outside {min}..={MAX_ENUMERATED_WORLDS}"
        )))
    }
}

fn load_model(path: &Path, validate: bool) -> Result<QuantumModalStructure, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok(QuantumModalStructure::from_model_json(&text, validate)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<'a>(fs: impl Iterator<Item = &'a Formula>) -> String {
    fs.map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn mark(b: bool) -> &'static str {
    if b {
        "⊨"
    } else {
        "⊭"
    }
}

/// One row per world: a mark per formula of the sequent, then the sequent.
fn check_model(s: &QuantumModalStructure, seq: &Sequent, out: &mut dyn Write) -> Outcome {
    let formulas: Vec<&Formula> = seq.formulas().collect();
    let mut header = vec!["world".to_string()];
    header.extend(formulas.iter().map(|f| f.to_string()));
    header.push(seq.to_string());
    writeln!(out, "{}", header.join(" | "))?;
    let mut all = true;
    for w in 0..s.worlds {
        let mut row = vec![w.to_string()];
        for f in &formulas {
            row.push(mark(eval(s, w, f)?).to_string());
        }
        let holds = holds_at(s, w, seq)?;
        all &= holds;
        row.push(mark(holds).to_string());
        writeln!(out, "{}", row.join(" | "))?;
    }
    writeln!(out, "holds in structure: {}", yes_no(all))?;
    Ok(if all { 0 } else { 1 })
}

fn write_countermodel(
    cm: &Countermodel,
    target: Option<&Path>,
    dot: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), InputError> {
    let model = cm.structure.to_model_file().to_json();
    writeln!(out, "{model}")?;
    writeln!(out, "failing world: {}", cm.world)?;
    if let Some(path) = target {
        write_file(path, &format!("{model}\n"))?;
    }
    if let Some(path) = dot {
        write_file(path, &cm.structure.to_dot())?;
    }
    Ok(())
}

fn report_verdict(
    seq: &Sequent,
    verdict: &Verdict,
    witness: Option<&Path>,
    dot: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), InputError> {
    writeln!(out, "verdict: {}", verdict.kind())?;
    match verdict {
        Verdict::Theorem(d) => {
            let text = d.to_string();
            write!(out, "{text}")?;
            if let Some(path) = witness {
                write_file(path, &text)?;
            }
        }
        Verdict::NonTheorem(Refutation::Pointwise(cm)) => {
            writeln!(out, "countermodel with {} world(s)", cm.structure.worlds)?;
            write_countermodel(cm, witness, dot, out)?;
        }
        Verdict::NonTheorem(Refutation::Literal(parts)) => {
            for (n, (d, cm)) in parts.iter().enumerate() {
                writeln!(
                    out,
                    "countermodel for {} with {} world(s)",
                    d, cm.structure.worlds
                )?;
                let path = witness.map(|p| numbered(p, n));
                let dot = dot.map(|p| numbered(p, n));
                write_countermodel(cm, path.as_deref(), dot.as_deref(), out)?;
            }
        }
        Verdict::Unknown(report) => writeln!(out, "{report}")?,
    }
    if let Some(bound) = decision_bound(seq, verdict) {
        writeln!(out, "fmp bound: {bound}")?;
    }
    Ok(())
}

fn decision_bound(seq: &Sequent, verdict: &Verdict) -> Option<u128> {
    match verdict {
        Verdict::Unknown(report) => report.fmp_bound,
        _ if seq.antecedent.is_empty() && seq.succedent.len() == 1 => {
            Some(decision::fmp_bound(seq))
        }
        _ => None,
    }
}

/// `witness.json` becomes `witness.0.json`, `witness.1.json`, ...
fn numbered(path: &Path, n: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{n}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("qml").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn decide_theorem() {
        let (code, out, _) = call(&["decide", "|- ~(p & ~p)"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("verdict: theorem\n"));
        assert!(out.contains("fmp bound: 16"));
    }

    #[test]
    fn decide_non_theorem() {
        let (code, out, _) = call(&["decide", "p |- q", "--single-thread"]);
        assert_eq!(code, 1);
        assert!(out.contains("failing world: 0"));
    }

    #[test]
    fn input_errors_exit_three() {
        for args in [
            &["decide", "p |- &"][..],
            &["decide", "p |- q", "--max-worlds", "12"],
            &["decide", "p |- q", "--time-limit", "-1"],
            &["frobnicate"],
            &["enumerate", "0"],
            &["enumerate", "2", "--atoms", "P"],
            &[
                "check-model",
                "/nonexistent/model.json",
                "--sequent",
                "p |-",
            ],
        ] {
            let (code, out, err) = call(args);
            assert_eq!(code, EXIT_INPUT, "{args:?}");
            assert!(out.is_empty());
            assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        }
    }

    #[test]
    fn enumerate_counts() {
        let (code, out, _) = call(&["enumerate", "1", "--atoms", "p"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        let (_, out, _) = call(&["enumerate", "2"]);
        assert!(out
            .lines()
            .all(|l| QuantumModalStructure::from_model_json(l, true).is_ok()));
    }

    #[test]
    fn numbered_paths() {
        assert_eq!(
            numbered(Path::new("/tmp/w.json"), 1),
            PathBuf::from("/tmp/w.1.json")
        );
        assert_eq!(numbered(Path::new("w"), 0), PathBuf::from("w.0"));
    }
}
