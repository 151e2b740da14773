//! Command-line front end: parse and pretty-print programs, report fragment
//! membership, run the seven translations, evaluate under an output profile,
//! compare two programs on a shared input, and drive seeded differential
//! campaigns.
//!
//! Exit codes: 0 on success, 1 on a semantic failure (parse or evaluation
//! error, fragment violation with `--expect`, unequal diff, failed fuzz
//! trials), 2 on a usage error.

use crate::error::{Error, Result};
use crate::fragments::{classify_lars_fragments, classify_ldsr_fragments, FragmentVerdict};
use crate::harness::{
    check_expressibility, differential_campaign, parse_fragment_name, profile_output, GenBounds,
    LTuple, Language, Profile,
};
use crate::lars::{parse_lars, LarsProgram};
use crate::ldsr::{parse_ldsr, LdsrProgram};
use crate::stream::{
    parse_background, parse_stream_json, parse_stream_text, print_stream_text, Slot, Stream,
};
use crate::transpile::{rho1, rho2, rho3, rho4, rho5, rho6, rho7, Provenance, Translation};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "streamlog", version, about = "Workbench for two stream reasoning languages")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a program and print its canonical form.
    Parse {
        file: PathBuf,
        /// Program language; inferred from the file extension when omitted.
        #[arg(long)]
        lang: Option<Language>,
        /// Shared signature file holding predicate declarations.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Report fragment membership with violation witnesses.
    Classify {
        file: PathBuf,
        #[arg(long)]
        lang: Option<Language>,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Fail (exit 1) unless the program belongs to this fragment.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Translate a program with one of the seven translations.
    Translate {
        file: PathBuf,
        /// Which translation to run: 1..=3 read the modal language, 4..=7
        /// the incremental one.
        #[arg(long)]
        rho: u8,
        #[arg(long)]
        lang: Option<Language>,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Evaluate a program over a stream and print one output profile.
    Eval {
        file: PathBuf,
        #[arg(long)]
        lang: Option<Language>,
        /// Input stream file, in stream text or JSON format.
        #[arg(long)]
        stream: PathBuf,
        /// Background atoms file; empty when omitted.
        #[arg(long)]
        background: Option<PathBuf>,
        /// Evaluation time point.
        #[arg(long)]
        t: usize,
        #[arg(long)]
        profile: Profile,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Compare two programs' profile outputs on a shared input.
    Diff {
        src: PathBuf,
        dst: PathBuf,
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        background: Option<PathBuf>,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        profile: Profile,
        /// Compare all predicates; without this both outputs are restricted
        /// to the source program's predicates first.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        src_lang: Option<Language>,
        #[arg(long)]
        dst_lang: Option<Language>,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Run a seeded differential campaign for a fragment and translation.
    Fuzz {
        /// Source fragment, F1..F7.
        #[arg(long)]
        fragment: String,
        #[arg(long)]
        rho: u8,
        #[arg(long)]
        profile: Profile,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parsed output plus whether the run counts as a semantic failure.
struct Outcome {
    stdout: String,
    failed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, failed: false }
    }
}

pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            if !out.stdout.is_empty() {
                print!("{}", out.stdout);
                if !out.stdout.ends_with('\n') {
                    println!();
                }
            }
            if out.failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Parse { file, lang, sig } => cmd_parse(&file, lang, sig.as_deref(), format),
        Cmd::Classify { file, lang, sig, expect } => {
            cmd_classify(&file, lang, sig.as_deref(), expect.as_deref(), format)
        }
        Cmd::Translate { file, rho, lang, sig } => {
            cmd_translate(&file, rho, lang, sig.as_deref(), format)
        }
        Cmd::Eval { file, lang, stream, background, t, profile, sig } => cmd_eval(
            &file,
            lang,
            &stream,
            background.as_deref(),
            t,
            profile,
            sig.as_deref(),
            format,
        ),
        Cmd::Diff { src, dst, stream, background, t, profile, strict, src_lang, dst_lang, sig } => {
            cmd_diff(
                &src,
                &dst,
                &stream,
                background.as_deref(),
                t,
                profile,
                strict,
                src_lang,
                dst_lang,
                sig.as_deref(),
                format,
            )
        }
        Cmd::Fuzz { fragment, rho, profile, strict, trials, seed } => {
            cmd_fuzz(&fragment, rho, profile, strict, trials, seed, format)
        }
    }
}

enum AnyProgram {
    Ldsr(LdsrProgram),
    Lars(LarsProgram),
}

fn infer_lang(path: &Path, explicit: Option<Language>) -> Result<Language> {
    if let Some(l) = explicit {
        return Ok(l);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("ldsr") => Ok(Language::Ldsr),
        Some("lars") => Ok(Language::Lars),
        _ => Err(Error::Config(format!(
            "cannot infer the language of {} from its extension; pass --lang",
            path.display()
        ))),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Loads a program, prepending declarations from the signature file if one
/// is given. The signature file may hold only declarations; a conflicting
/// declaration in the program file is a validation error.
fn load_program(path: &Path, lang: Option<Language>, sig: Option<&Path>) -> Result<AnyProgram> {
    let lang = infer_lang(path, lang)?;
    let mut text = String::new();
    if let Some(sig_path) = sig {
        let sig_text = read(sig_path)?;
        let decls_only = parse_ldsr(&sig_text)
            .map_err(|e| Error::Config(format!("signature file {}: {e}", sig_path.display())))?;
        if !decls_only.rules.is_empty() {
            return Err(Error::Config(format!(
                "signature file {} contains rules; only declarations are allowed",
                sig_path.display()
            )));
        }
        text.push_str(&sig_text);
        text.push('\n');
    }
    text.push_str(&read(path)?);
    match lang {
        Language::Ldsr => Ok(AnyProgram::Ldsr(parse_ldsr(&text)?)),
        Language::Lars => Ok(AnyProgram::Lars(parse_lars(&text)?)),
    }
}

fn load_stream(path: &Path) -> Result<Stream> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        Ok(parse_stream_json(&text)?)
    } else {
        Ok(parse_stream_text(&text)?)
    }
}

fn load_background(path: Option<&Path>) -> Result<Slot> {
    match path {
        Some(p) => Ok(parse_background(&read(p)?)?),
        None => Ok(Slot::new()),
    }
}

fn cmd_parse(
    path: &Path,
    lang: Option<Language>,
    sig: Option<&Path>,
    format: Format,
) -> Result<Outcome> {
    let program = load_program(path, lang, sig)?;
    let stdout = match format {
        Format::Text => match &program {
            AnyProgram::Ldsr(p) => p.to_string(),
            AnyProgram::Lars(p) => p.to_string(),
        },
        Format::Structured => {
            let (lang, decls, rules) = match &program {
                AnyProgram::Ldsr(p) => (
                    Language::Ldsr,
                    decl_values(p.sig.decls()),
                    p.rules.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                ),
                AnyProgram::Lars(p) => (
                    Language::Lars,
                    decl_values(p.sig.decls()),
                    p.rules.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                ),
            };
            let v = json!({
                "language": lang.to_string(),
                "declarations": decls,
                "rules": rules,
            });
            format!("{v:#}\n")
        }
    };
    Ok(Outcome::ok(stdout))
}

fn decl_values<'a>(
    decls: impl Iterator<Item = &'a crate::atoms::PredicateDecl>,
) -> Vec<serde_json::Value> {
    decls
        .map(|d| {
            json!({
                "name": d.name,
                "arity": d.arity,
                "kind": format!("{:?}", d.kind).to_lowercase(),
            })
        })
        .collect()
}

fn verdict_value(v: &FragmentVerdict) -> serde_json::Value {
    let fragments: Vec<serde_json::Value> = v
        .assessed
        .iter()
        .map(|&frag| {
            let violations: Vec<serde_json::Value> = v
                .violations
                .iter()
                .filter(|viol| viol.fragment == frag)
                .map(|viol| {
                    json!({
                        "condition": viol.condition,
                        "rule": viol.witness.rule,
                        "predicate": viol.witness.predicate,
                        "cycle": viol.witness.cycle,
                    })
                })
                .collect();
            json!({
                "fragment": frag.to_string(),
                "member": v.is_member(frag),
                "violations": violations,
            })
        })
        .collect();
    json!({ "fragments": fragments })
}

fn cmd_classify(
    path: &Path,
    lang: Option<Language>,
    sig: Option<&Path>,
    expect: Option<&str>,
    format: Format,
) -> Result<Outcome> {
    let program = load_program(path, lang, sig)?;
    let verdict = match &program {
        AnyProgram::Ldsr(p) => classify_ldsr_fragments(p),
        AnyProgram::Lars(p) => classify_lars_fragments(p),
    };
    let failed = match expect {
        Some(name) => {
            let frag = parse_fragment_name(name)?;
            if !verdict.assessed.contains(&frag) {
                return Err(Error::Config(format!(
                    "{frag} is not assessed for this language; expected one of {:?}",
                    verdict.assessed.iter().map(|f| f.to_string()).collect::<Vec<_>>()
                )));
            }
            !verdict.is_member(frag)
        }
        None => false,
    };
    let stdout = match format {
        Format::Text => verdict.to_string(),
        Format::Structured => format!("{:#}\n", verdict_value(&verdict)),
    };
    Ok(Outcome { stdout, failed })
}

fn provenance_value(p: &Provenance) -> serde_json::Value {
    json!({
        "output_rule": p.output_rule,
        "source_rule": p.source_rule,
        "helper": p.helper,
    })
}

fn translation_outcome<P: std::fmt::Display>(
    rho: u8,
    tr: &Translation<P>,
    rules: Vec<String>,
    format: Format,
) -> Outcome {
    match format {
        Format::Text => {
            let mut s = tr.program.to_string();
            writeln!(s, "% rho {rho} provenance").unwrap();
            for p in &tr.provenance {
                writeln!(s, "% {p}").unwrap();
            }
            if !tr.aux_predicates.is_empty() {
                let names: Vec<&str> = tr.aux_predicates.iter().map(|s| s.as_str()).collect();
                writeln!(s, "% auxiliary predicates: {}", names.join(", ")).unwrap();
            }
            Outcome::ok(s)
        }
        Format::Structured => {
            let v = json!({
                "rho": rho,
                "program": tr.program.to_string(),
                "rules": rules,
                "aux_predicates": tr.aux_predicates.iter().collect::<Vec<_>>(),
                "provenance": tr.provenance.iter().map(provenance_value).collect::<Vec<_>>(),
            });
            Outcome::ok(format!("{v:#}\n"))
        }
    }
}

fn cmd_translate(
    path: &Path,
    rho: u8,
    lang: Option<Language>,
    sig: Option<&Path>,
    format: Format,
) -> Result<Outcome> {
    let program = load_program(path, lang, sig)?;
    match (rho, program) {
        (1..=3, AnyProgram::Lars(p)) => {
            let tr = match rho {
                1 => rho1(&p)?,
                2 => rho2(&p)?,
                _ => rho3(&p)?,
            };
            let rules = tr.program.rules.iter().map(|r| r.to_string()).collect();
            Ok(translation_outcome(rho, &tr, rules, format))
        }
        (4..=7, AnyProgram::Ldsr(p)) => {
            let tr = match rho {
                4 => rho4(&p)?,
                5 => rho5(&p)?,
                6 => rho6(&p)?,
                _ => rho7(&p)?,
            };
            let rules = tr.program.rules.iter().map(|r| r.to_string()).collect();
            Ok(translation_outcome(rho, &tr, rules, format))
        }
        (1..=3, AnyProgram::Ldsr(_)) => Err(Error::Config(format!(
            "rho {rho} reads a lars program, but {} parsed as ldsr",
            path.display()
        ))),
        (4..=7, AnyProgram::Lars(_)) => Err(Error::Config(format!(
            "rho {rho} reads an ldsr program, but {} parsed as lars",
            path.display()
        ))),
        _ => Err(Error::Config(format!("--rho must be 1..=7, got {rho}"))),
    }
}

fn make_tuple(program: AnyProgram, input: Stream, background: Slot) -> Result<LTuple> {
    match program {
        AnyProgram::Ldsr(p) => LTuple::ldsr(p, input, background),
        AnyProgram::Lars(p) => LTuple::lars(p, input, background),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    path: &Path,
    lang: Option<Language>,
    stream: &Path,
    background: Option<&Path>,
    t: usize,
    profile: Profile,
    sig: Option<&Path>,
    format: Format,
) -> Result<Outcome> {
    let program = load_program(path, lang, sig)?;
    let input = load_stream(stream)?;
    let bg = load_background(background)?;
    let tuple = make_tuple(program, input, bg)?;
    let out = profile_output(&tuple, t, profile)?;
    let stdout = match format {
        Format::Text => print_stream_text(&out.stream),
        Format::Structured => {
            let slots: Vec<Vec<String>> = out
                .stream
                .slots()
                .iter()
                .map(|s| s.iter().map(|a| a.to_string()).collect())
                .collect();
            let v = json!({
                "profile": out.profile.to_string(),
                "t": out.t,
                "stream": { "n": out.stream.n(), "slots": slots },
            });
            format!("{v:#}\n")
        }
    };
    Ok(Outcome::ok(stdout))
}

#[allow(clippy::too_many_arguments)]
fn cmd_diff(
    src: &Path,
    dst: &Path,
    stream: &Path,
    background: Option<&Path>,
    t: usize,
    profile: Profile,
    strict: bool,
    src_lang: Option<Language>,
    dst_lang: Option<Language>,
    sig: Option<&Path>,
    format: Format,
) -> Result<Outcome> {
    let input = load_stream(stream)?;
    let bg = load_background(background)?;
    let source = make_tuple(load_program(src, src_lang, sig)?, input.clone(), bg.clone())?;
    let target = make_tuple(load_program(dst, dst_lang, sig)?, input, bg)?;
    let verdict = check_expressibility(&source, &target, t, profile, strict)?;
    let stdout = match format {
        Format::Text => format!("{verdict}\n"),
        Format::Structured => {
            let v = serde_json::to_value(&verdict)
                .map_err(|e| Error::Format(format!("cannot serialize the verdict: {e}")))?;
            format!("{v:#}\n")
        }
    };
    Ok(Outcome { stdout, failed: !verdict.equal })
}

fn cmd_fuzz(
    fragment: &str,
    rho: u8,
    profile: Profile,
    strict: bool,
    trials: usize,
    seed: u64,
    format: Format,
) -> Result<Outcome> {
    let fragment = parse_fragment_name(fragment)?;
    let report =
        differential_campaign(fragment, rho, profile, strict, trials, seed, &GenBounds::default())?;
    let stdout = match format {
        Format::Text => report.to_string(),
        Format::Structured => {
            let v = serde_json::to_value(&report)
                .map_err(|e| Error::Format(format!("cannot serialize the report: {e}")))?;
            format!("{v:#}\n")
        }
    };
    Ok(Outcome { stdout, failed: !report.all_passed() })
}
