//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde_json::json;

use crate::error::{Error, Result};
use crate::formula::{self, Formula};
use crate::inference::{self, AnalysisReport, Classification, Decomposition, SegmentEnd};
use crate::set::{SetHandle, UpSet};
use crate::sources;
use crate::window::{SearchLimits, Value, WindowEngine, WindowProfile};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_HORIZON: i32 = 65;
pub const EXIT_INFERENCE: i32 = 70;
/// `compare` found a disagreement.
pub const EXIT_DIFFERENT: i32 = 1;

/// Default analysis horizon for inputs that have none.
const DEFAULT_BOUND: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "presmin", version, about = "Ultimately periodic sets and periodicity inference")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Cap on the shifts examined for finite inputs.
    #[arg(long, env = "PRESMIN_MAX_SEARCH", global = true)]
    pub max_search: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula to its set.
    Eval {
        formula: String,
    },
    /// Print the normal-form formula of a set.
    Synth {
        #[arg(long = "set")]
        set: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Tabulate the window minimizers.
    Windows {
        #[arg(long = "set")]
        set: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Decompose into points and cosets.
    Decompose {
        #[arg(long = "set")]
        set: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Classify as eventually periodic, expanding or inconclusive.
    Analyze {
        #[arg(long = "set")]
        set: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long = "B")]
        bound: Option<u64>,
    },
    /// Compare two sets pointwise on [0, B].
    Compare {
        #[arg(long = "set", num_args = 1, required = true)]
        sets: Vec<String>,
        #[arg(long = "B")]
        bound: Option<u64>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 20)]
    pub nmax: u64,
    /// Period used for the alpha table instead of the inferred one.
    #[arg(long)]
    pub d: Option<u64>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HorizonExceeded { .. } => EXIT_HORIZON,
        Error::InferenceFailure(_) => EXIT_INFERENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "presmin: {e}");
            exit_code(&e)
        }
    }
}

fn limits(cli: &Cli) -> SearchLimits {
    cli.max_search
        .map(SearchLimits::with_max_shift)
        .unwrap_or_default()
}

fn engine(cli: &Cli, set: &SetHandle) -> Result<WindowEngine> {
    Ok(WindowEngine::new(set)?.with_limits(limits(cli)))
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn value_cell(v: Value) -> String {
    match v {
        Value::Defined(x) => x.to_string(),
        Value::UndefinedAtHorizon => "?".into(),
        Value::ProvablyUndefined => "-".into(),
    }
}

fn set_json(s: &UpSet) -> serde_json::Value {
    json!({
        "literal": s.to_string(),
        "N": s.threshold(),
        "d": s.period(),
        "E": s.exceptional(),
        "R": s.residues(),
    })
}

/// Runs a parsed command; returns the rendered output and exit code.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Eval { formula: text } => {
            let f = formula::parse(text)?;
            let set = formula::eval(&f)?;
            let normal = formula::synthesize(&set);
            Ok((
                if json {
                    json_text(&json!({
                        "ast": serde_json::to_value(&f).expect("ast serializes"),
                        "formula": f.to_string(),
                        "set": set_json(&set),
                        "normal_form": normal.to_string(),
                    }))
                } else {
                    format!("{set}\n{normal}\n")
                },
                0,
            ))
        }
        Command::Synth { set, window } => {
            let handle = sources::resolve_str(set)?;
            let upset = match handle.as_periodic() {
                Some(s) => s.clone(),
                None => inference::decompose(&engine(cli, &handle)?, window.nmax, window.d)?.to_upset()?,
            };
            let f: Formula = formula::synthesize(&upset);
            Ok((
                if json {
                    json_text(&json!({
                        "set": set_json(&upset),
                        "formula": f.to_string(),
                        "ast": serde_json::to_value(&f).expect("ast serializes"),
                    }))
                } else {
                    format!("{f}\n")
                },
                0,
            ))
        }
        Command::Windows { set, window } => {
            let handle = sources::resolve_str(set)?;
            let e = engine(cli, &handle)?;
            let shift = window.d.or_else(|| inference::find_uniform_period(&e, window.nmax).defined());
            let profile = e.profile(window.nmax, shift);
            Ok((
                if json {
                    json_text(&profile.to_json())
                } else {
                    render_profile(&profile)
                },
                0,
            ))
        }
        Command::Decompose { set, window } => {
            let handle = sources::resolve_str(set)?;
            let dec = inference::decompose(&engine(cli, &handle)?, window.nmax, window.d)?;
            let f = formula::synthesize(&dec.to_upset()?);
            Ok((
                if json {
                    let mut v = serde_json::to_value(&dec).expect("decomposition serializes");
                    v["formula"] = f.to_string().into();
                    json_text(&v)
                } else {
                    let mut s = render_decomposition(&dec);
                    let _ = writeln!(s, "formula: {f}");
                    s
                },
                0,
            ))
        }
        Command::Analyze { set, window, bound } => {
            let handle = sources::resolve_str(set)?;
            let bound = match (bound, handle.horizon()) {
                (Some(b), Some(h)) if *b > h => {
                    return Err(Error::HorizonExceeded { query: *b, horizon: h })
                }
                (Some(b), _) => *b,
                (None, Some(h)) => h,
                (None, None) => DEFAULT_BOUND,
            };
            let report = inference::classify(&handle, window.nmax, bound, limits(cli))?;
            let code = report.classification.exit_code();
            Ok((
                if json {
                    json_text(&report.to_json())
                } else {
                    render_report(&report)
                },
                code,
            ))
        }
        Command::Compare { sets, bound } => {
            let [a, b] = sets.as_slice() else {
                return Err(Error::Malformed("compare takes exactly two --set arguments".into()));
            };
            let a = sources::resolve_str(a)?;
            let b = sources::resolve_str(b)?;
            let bound = match bound {
                Some(v) => *v,
                None => match (a.horizon(), b.horizon()) {
                    (Some(x), Some(y)) => x.min(y),
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => {
                        // past both thresholds one common period decides equality
                        let (p, q) = (a.as_periodic().unwrap(), b.as_periodic().unwrap());
                        p.threshold().max(q.threshold()) + p.period().lcm(&q.period())
                    }
                },
            };
            for x in 0..=bound {
                let (in_a, in_b) = (a.contains(x)?, b.contains(x)?);
                if in_a != in_b {
                    let text = if json {
                        json_text(&json!({"equal": false, "B": bound, "first_difference": x, "in_first": in_a}))
                    } else {
                        let (yes, no) = if in_a { ("first", "second") } else { ("second", "first") };
                        format!("differ at {x}: in the {yes} set, not in the {no}\n")
                    };
                    return Ok((text, EXIT_DIFFERENT));
                }
            }
            Ok((
                if json {
                    json_text(&json!({"equal": true, "B": bound}))
                } else {
                    format!("equal on [0,{bound}]\n")
                },
                0,
            ))
        }
    }
}

fn render_profile(p: &WindowProfile) -> String {
    let mut s = String::new();
    let shift = p.alpha_shift.map_or("-".to_string(), |d| d.to_string());
    let _ = writeln!(s, "# alpha shift {shift}; {}", if p.exact { "exact" } else { "bounded search" });
    let _ = writeln!(s, "{:>4} {:>7} {:>7} {:>7} {:>7}  status", "n", "dtilde", "D", "A", "alpha");
    for e in &p.entries {
        let status = serde_json::to_value(e.status()).expect("status serializes");
        let _ = writeln!(
            s,
            "{:>4} {:>7} {:>7} {:>7} {:>7}  {}",
            e.n,
            value_cell(e.dtilde),
            value_cell(e.big_d),
            value_cell(e.big_a),
            value_cell(e.alpha),
            status.as_str().unwrap_or_default()
        );
    }
    let gap = |g: Option<u64>| g.map_or("-".to_string(), |g| g.to_string());
    let _ = writeln!(s, "monotone domain (D, A): {}", join(&p.monotone_domain));
    let _ = writeln!(s, "monotone domain (alpha): {}", join(&p.alpha_domain));
    let _ = writeln!(s, "image gaps: D {}, alpha {}", gap(p.d_image_gap), gap(p.alpha_image_gap));
    s
}

fn render_decomposition(dec: &Decomposition) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "threshold {}, period {}", dec.threshold, dec.period);
    let _ = writeln!(s, "points: {}", join(&dec.points));
    for seg in &dec.segments {
        let hi = match seg.hi {
            SegmentEnd::Infinite => "inf".to_string(),
            SegmentEnd::AtHorizon(h) => format!("{h} (horizon)"),
        };
        let _ = writeln!(
            s,
            "segment [{}, {hi}] mod {}: {}",
            seg.lo,
            seg.modulus,
            join(&seg.residues)
        );
    }
    let _ = writeln!(s, "verified: {}", if dec.certified { "exactly" } else { "up to the horizon" });
    s
}

fn render_report(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "classification: {}", r.classification.label());
    match &r.classification {
        Classification::EventuallyPeriodic(dec) => s.push_str(&render_decomposition(dec)),
        _ => {
            if let Some(why) = &r.failure {
                let _ = writeln!(s, "decomposition failed: {why}");
            }
        }
    }
    let _ = writeln!(s, "u: {}", r.gap_bound.map_or("-".to_string(), |u| u.to_string()));
    let records: Vec<String> = r
        .evidence
        .record_gaps
        .iter()
        .map(|(x, g)| format!("{x}+{g}"))
        .collect();
    let _ = writeln!(s, "record gaps: {}", records.join(" "));
    let _ = writeln!(s, "witnesses (n: count; largest):");
    for (n, row) in &r.evidence.witnesses {
        let _ = writeln!(s, "{n:>4}: {}; {}", row.count, join(&row.largest));
    }
    s.push_str(&render_profile(&r.profile));
    s
}
