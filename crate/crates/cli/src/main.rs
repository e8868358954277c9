//! `zeckford`: Zeckendorf decompositions, random legal-decomposition
//! simulations, verification suites, and Benford digit experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure.

mod emit;
mod parse;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use zeckford::{
    big_random_benford, density_converge, exhaustive_benford, fib, fib_leading_block_fast,
    ratio_stats_of_set, run_verify_suite, simulate_counts, zd, BigUint, ConvergeMode,
    ProcessConfig, RatioStats, VerifySuite, ZeckSet, DEFAULT_SEED,
};

use emit::{csv, fib_digits10, fmt_sig, meta, svg_histogram, to_json, Sink};
use parse::{parse_p, parse_set};

/// Summand values longer than this print as digit count + leading block.
const VALUE_DIGITS_MAX: u64 = 40;

#[derive(Parser)]
#[command(
    name = "zeckford",
    version,
    about = "Zeckendorf decompositions, random legal decompositions, and Benford digit statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModeArg {
    /// Draw m exactly uniformly from [0, F_{n+1}) and decompose it.
    UniformM,
    /// Run the random take/skip process over indices 1..=n.
    Process,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum SuiteArg {
    /// Decomposition bijection against exhaustive bitmask enumeration.
    Zeckendorf,
    /// Closed-form process law against exact tree enumeration.
    Law,
    /// Exact golden-mean identities in Q(sqrt 5).
    Phi,
    /// Per-index take probabilities: closed form vs recurrence.
    ProbFk,
    /// Every suite above.
    All,
}

impl From<SuiteArg> for VerifySuite {
    fn from(s: SuiteArg) -> VerifySuite {
        match s {
            SuiteArg::Zeckendorf => VerifySuite::Zeckendorf,
            SuiteArg::Law => VerifySuite::Law,
            SuiteArg::Phi => VerifySuite::Phi,
            SuiteArg::ProbFk => VerifySuite::ProbFk,
            SuiteArg::All => VerifySuite::All,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose an integer into non-adjacent Fibonacci summands
    Decompose {
        /// The integer, as a decimal string of any length
        m: String,
        /// Also count summands in this set: all | digit:D | block:D.DD | mod:M,R
        #[arg(long, value_name = "SPEC")]
        set: Option<String>,
        /// Digit base for leading-block displays and set membership
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write output here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Chi-square of summand leading digits for every m in [F_lo, F_hi)
    ExhaustiveBenford {
        /// First Fibonacci index of the swept interval
        #[arg(long, default_value_t = 25)]
        lo: u32,
        /// One past the last Fibonacci index of the swept interval
        #[arg(long, default_value_t = 26)]
        hi: u32,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Decompose one uniform random integer with the given decimal length
    BigRandomBenford {
        /// Sample m uniformly from [10^DIGITS, 10^{DIGITS+1})
        #[arg(long, value_name = "DIGITS")]
        digits: u64,
        /// PRNG seed (defaults to a fixed documented constant, never random)
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Per-trial summand ratios Y/X against a set's reference density
    DensityConverge {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Largest Fibonacci index in play
        #[arg(long)]
        n: u32,
        /// Take probability (process mode only): a/b or phi^-2
        #[arg(long, value_name = "SPEC")]
        p: Option<String>,
        /// Reference set: all | digit:D | block:D.DD | mod:M,R
        #[arg(long, value_name = "SPEC")]
        set: String,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// PRNG seed (defaults to a fixed documented constant, never random)
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Raw (W, Z) counts from independent runs of the random process
    Simulate {
        /// Largest Fibonacci index in play
        #[arg(long)]
        n: u32,
        /// Take probability: a/b or phi^-2
        #[arg(long, value_name = "SPEC")]
        p: String,
        /// Set counted by Z: all | digit:D | block:D.DD | mod:M,R
        #[arg(long, value_name = "SPEC", default_value = "all")]
        set: String,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// PRNG seed (defaults to a fixed documented constant, never random)
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite; exits 2 if any check fails
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 by default; this tool reserves 2 for failed
            // verification, so usage errors map to 1 (help/version to 0).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Decompose {
            m,
            set,
            base,
            format,
            out,
        } => cmd_decompose(&m, set.as_deref(), base, format, out),
        Cmd::ExhaustiveBenford {
            lo,
            hi,
            base,
            format,
            out,
        } => cmd_exhaustive_benford(lo, hi, base, format, out),
        Cmd::BigRandomBenford {
            digits,
            seed,
            base,
            format,
            out,
        } => cmd_big_random_benford(digits, seed, base, format, out),
        Cmd::DensityConverge {
            mode,
            n,
            p,
            set,
            trials,
            seed,
            base,
            format,
            out,
        } => cmd_density_converge(mode, n, p.as_deref(), &set, trials, seed, base, format, out),
        Cmd::Simulate {
            n,
            p,
            set,
            trials,
            seed,
            base,
            format,
            out,
        } => cmd_simulate(n, &p, &set, trials, seed, base, format, out),
        Cmd::Verify { suite, out } => cmd_verify(suite, out),
    }
}

/// First few characters of an arbitrarily long argument, for error text.
fn preview(s: &str) -> String {
    if s.chars().count() <= 24 {
        s.to_string()
    } else {
        let head: String = s.chars().take(24).collect();
        format!("{head}...")
    }
}

fn cmd_decompose(
    m: &str,
    set: Option<&str>,
    base: u32,
    format: Format,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let trimmed = m.trim();
    if trimmed.is_empty() || !trimmed.bytes().all(|b| b.is_ascii_digit()) {
        bail!("`{}` is not a non-negative decimal integer", preview(m));
    }
    let value = BigUint::parse_bytes(trimmed.as_bytes(), 10)
        .with_context(|| format!("`{}` is not a non-negative decimal integer", preview(m)))?;
    let m_digits = {
        let t = trimmed.trim_start_matches('0');
        if t.is_empty() {
            1
        } else {
            t.len() as u64
        }
    };

    let s = zd(&value);
    let stats: Option<(String, RatioStats)> = match set {
        Some(spec) => {
            let set = parse_set(spec, base)?;
            Some((
                set.label().to_string(),
                ratio_stats_of_set(&s, set.as_ref()),
            ))
        }
        None => None,
    };

    let sink = Sink::new(out);
    match format {
        Format::Text => sink.write(&decompose_text(m_digits, &s, base, &stats))?,
        Format::Json => {
            let body = decompose_json(m_digits, &s, base, &stats);
            let doc = json!({
                "meta": meta("decompose", None, json!({ "base": base, "m_digits": m_digits })),
                "decomposition": body,
            });
            sink.write(&to_json(&doc))?;
        }
        _ => bail!("decompose emits text or json"),
    }
    Ok(ExitCode::SUCCESS)
}

fn decompose_text(
    m_digits: u64,
    s: &ZeckSet,
    base: u32,
    stats: &Option<(String, RatioStats)>,
) -> String {
    let mut doc = format!(
        "m: {m_digits} digit{} long\nsummands: {}{}\n",
        if m_digits == 1 { "" } else { "s" },
        s.len(),
        if s.is_empty() {
            " (empty decomposition)"
        } else {
            ""
        }
    );
    for i in s.iter() {
        let digits = fib_digits10(i);
        if digits <= VALUE_DIGITS_MAX {
            let _ = writeln!(doc, "  i={i}\t{}", fib(i));
        } else {
            let block = fib_leading_block_fast(i, base, 8);
            if base == 10 {
                let _ = writeln!(doc, "  i={i}\t~{block}e{} ({digits} digits)", digits - 1);
            } else {
                let _ = writeln!(
                    doc,
                    "  i={i}\t{digits} decimal digits, leading block {block} (base {base})"
                );
            }
        }
    }
    if let Some((label, st)) = stats {
        let ratio = match st.ratio() {
            Some(r) => fmt_sig(r, 6),
            None => "n/a".into(),
        };
        let _ = writeln!(doc, "set {label}: X={} Y={} ratio={ratio}", st.x, st.y);
    }
    doc
}

fn decompose_json(
    m_digits: u64,
    s: &ZeckSet,
    base: u32,
    stats: &Option<(String, RatioStats)>,
) -> serde_json::Value {
    let summands: Vec<serde_json::Value> = s
        .iter()
        .map(|i| {
            let digits = fib_digits10(i);
            if digits <= VALUE_DIGITS_MAX {
                json!({ "index": i, "value": fib(i).to_string() })
            } else {
                json!({
                    "index": i,
                    "digits10": digits,
                    "leading": fib_leading_block_fast(i, base, 8).to_string(),
                })
            }
        })
        .collect();
    let mut body = json!({
        "m_digits": m_digits,
        "summands": s.len(),
        "summand_list": summands,
    });
    if let Some((label, st)) = stats {
        body["set"] = json!({ "label": label, "x": st.x, "y": st.y, "ratio": st.ratio() });
    }
    body
}

fn cmd_exhaustive_benford(
    lo: u32,
    hi: u32,
    base: u32,
    format: Format,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let summary = exhaustive_benford(lo, hi, base)?;
    // rows with fewer summands than digit categories cannot fill the
    // histogram; their statistics are degenerate and worth flagging
    let sparse = summary
        .rows
        .iter()
        .filter(|r| (r.summands as u64) < base as u64 - 1)
        .count();
    let sink = Sink::new(out);
    match format {
        Format::Csv => {
            let rows: Vec<String> = summary
                .rows
                .iter()
                .map(|r| format!("{},{},{}", r.m, r.summands, fmt_sig(r.statistic, 6)))
                .collect();
            sink.write(&csv(
                "exhaustive-benford",
                &format!("lo={lo} hi={hi} base={base}"),
                None,
                "m,summands,statistic",
                &rows,
            ))?;
        }
        Format::Json => {
            let total = summary.pooled.total().max(1) as f64;
            let pooled_freq: Vec<f64> = (1..base)
                .map(|d| summary.pooled.count(d) as f64 / total)
                .collect();
            let mut body = serde_json::to_value(&summary)?;
            body["sparse_rows"] = json!(sparse);
            body["pooled_freq"] = json!(pooled_freq);
            let doc = json!({
                "meta": meta(
                    "exhaustive-benford",
                    None,
                    json!({ "lo": lo, "hi": hi, "base": base }),
                ),
                "summary": body,
            });
            sink.write(&to_json(&doc))?;
        }
        _ => bail!("exhaustive-benford emits csv or json"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_big_random_benford(
    digits: u64,
    seed: u64,
    base: u32,
    format: Format,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let summary = big_random_benford(digits, seed, base)?;
    let sink = Sink::new(out);
    match format {
        Format::Json => {
            let doc = json!({
                "meta": meta(
                    "big-random-benford",
                    Some(seed),
                    json!({ "digits": digits, "base": base }),
                ),
                "summary": summary,
            });
            sink.write(&to_json(&doc))?;
        }
        Format::Svg => {
            let subtitle = format!(
                "m: {} digits (seed {seed}) | {} summands | chi-square {} on {} dof",
                summary.m_digits,
                summary.summands,
                fmt_sig(summary.report.statistic, 6),
                summary.report.dof,
            );
            sink.write(&svg_histogram(
                &summary.histogram,
                "Leading digits of Zeckendorf summands",
                &subtitle,
            ))?;
        }
        _ => bail!("big-random-benford emits json or svg"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density_converge(
    mode: ModeArg,
    n: u32,
    p: Option<&str>,
    set_spec: &str,
    trials: u32,
    seed: u64,
    base: u32,
    format: Format,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let set = parse_set(set_spec, base)?;
    let mode = match mode {
        ModeArg::UniformM => {
            if p.is_some() {
                bail!("--p only applies to --mode process");
            }
            ConvergeMode::UniformM
        }
        ModeArg::Process => ConvergeMode::Process {
            p: parse_p(p.context("--mode process requires --p")?)?,
        },
    };
    let summary = density_converge(&mode, n, set.as_ref(), trials, seed)?;
    let sink = Sink::new(out);
    match format {
        Format::Csv => {
            let rows: Vec<String> = summary
                .rows
                .iter()
                .map(|r| {
                    let ratio = r.ratio().map(|v| fmt_sig(v, 6)).unwrap_or_default();
                    format!("{},{},{},{ratio}", r.trial, r.x, r.y)
                })
                .collect();
            sink.write(&csv(
                "density-converge",
                &format!(
                    "mode={} n={n} set={} trials={trials} base={base}",
                    summary.mode, summary.set_label
                ),
                Some(seed),
                "trial,x,y,ratio",
                &rows,
            ))?;
        }
        Format::Json => {
            let doc = json!({
                "meta": meta(
                    "density-converge",
                    Some(seed),
                    json!({ "mode": summary.mode, "n": n, "set": summary.set_label, "trials": trials, "base": base }),
                ),
                "summary": summary,
            });
            sink.write(&to_json(&doc))?;
        }
        _ => bail!("density-converge emits csv or json"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    n: u32,
    p: &str,
    set_spec: &str,
    trials: u32,
    seed: u64,
    base: u32,
    format: Format,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let p = parse_p(p)?;
    let set = parse_set(set_spec, base)?;
    let config = ProcessConfig::new(n, p, seed)?;
    let summary = simulate_counts(&config, set.as_ref(), trials)?;
    let sink = Sink::new(out);
    match format {
        Format::Csv => {
            let rows: Vec<String> = summary
                .trials
                .iter()
                .enumerate()
                .map(|(t, c)| format!("{t},{},{}", c.w, c.z))
                .collect();
            sink.write(&csv(
                "simulate",
                &format!("n={n} set={} trials={trials} base={base}", set.label()),
                Some(seed),
                "trial,w,z",
                &rows,
            ))?;
        }
        Format::Json => {
            let doc = json!({
                "meta": meta(
                    "simulate",
                    Some(seed),
                    json!({ "n": n, "set": set.label(), "trials": trials, "base": base }),
                ),
                "summary": summary,
            });
            sink.write(&to_json(&doc))?;
        }
        _ => bail!("simulate emits csv or json"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: SuiteArg, out: Option<PathBuf>) -> Result<ExitCode> {
    let report = run_verify_suite(suite.into())?;
    let doc = json!({
        "meta": meta("verify", None, json!({ "suite": report.suite })),
        "report": report,
    });
    Sink::new(out).write(&to_json(&doc))?;
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
