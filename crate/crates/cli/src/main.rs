//! `wordmeas`: command-line surface over the exact word-measure
//! calculator and its statistical cross-checks.
//!
//! Every subcommand prints a JSON envelope on stdout:
//! `{schema_version, tool_version, command, input, params, result,
//! timing_ms}`.  Keys serialize sorted, exact rationals ride as strings,
//! and `timing_ms` is the only field that varies between identical
//! invocations.  Exit codes: 0 success, 2 bad input, 3 resource cap.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::time::Instant;
use wordmeas_core::fringe::{enumerate_fringe, FringeConfig};
use wordmeas_core::measures::{
    chi_report, expected_fixed_points_subgroup, length_bounds, primitivity_rank, surface_test,
    trace_rational, Bound, Chi, McCheck, Orientation, Pi,
};
use wordmeas_core::sampler::{
    estimate_trace_chained, exhaustive_trace, GroupSpec, DEFAULT_ORACLE_CAP,
};
use wordmeas_core::words::Word;
use wordmeas_core::{Modulus, RatFn};

#[derive(Parser)]
#[command(
    name = "wordmeas",
    version,
    about = "Exact expected traces of word-random elements of S_N, C_m wr S_N, S^1 wr S_N, \
             and seeded statistical cross-checks on U(N)/O(N)"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact expected trace as a rational function of N.
    Trace {
        /// Word text: single-letter (xyXY) or numbered (x1x2X1X2).
        #[arg(long)]
        word: String,
        /// Ambient rank; defaults to the largest generator index used.
        #[arg(long)]
        rank: Option<u32>,
        /// Trace modulus: 1 (S_N), an integer >= 2 (C_m wr S_N), or inf.
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// chi_m, witness subgroups, and second-order Laurent data.
    Chi {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        /// Modulus >= 2 or inf (for m = 1 use `pi`).
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Primitivity rank and witness count from the S_N trace.
    Pi {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// The subgroups covered by <w>, optionally filtered by a modulus.
    Fringe {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        /// Keep only elements whose signed counts the modulus kills.
        #[arg(long)]
        m: Option<String>,
        /// Include a free basis for each subgroup.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Expected number of points fixed by all generators in S_N.
    SubgroupFix {
        /// Comma-separated generator words, e.g. "xx,y".
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Lower bounds on commutator-style lengths from chi.
    Bounds {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Necessary-condition battery for surface-relator behaviour.
    SurfaceTest {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        orientable: bool,
        #[arg(long)]
        nonorientable: bool,
        /// Add a Monte-Carlo check on U(N) / O(N).
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 8)]
        dim: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Acceptance band in standard errors.
        #[arg(long, default_value_t = 4.0)]
        band: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Seeded Monte-Carlo trace estimate on any supported group.
    Sample {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        /// sym:N | wreath:M:N | circle:N | u:N | o:N.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent generator streams (fixed splitting rule).
        #[arg(long, default_value_t = 1)]
        chains: u64,
    },
    /// Exact exhaustive average over all of (C_m wr S_N)^r.
    Oracle {
        #[arg(long)]
        word: String,
        #[arg(long)]
        rank: Option<u32>,
        /// Finite modulus >= 1.
        #[arg(long)]
        m: String,
        #[arg(long)]
        dim: u32,
    },
}

enum CliError {
    Core(wordmeas_core::Error),
    Input(String),
}

impl From<wordmeas_core::Error> for CliError {
    fn from(e: wordmeas_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_limit() => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli.cmd) {
        Ok((command, input, params, result)) => {
            let envelope = json!({
                "schema_version": 1,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "command": command,
                "input": input,
                "params": params,
                "result": result,
                "timing_ms": start.elapsed().as_millis() as u64,
            });
            let text = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&envelope).expect("envelope serializes")
                }
                Format::Plain => {
                    let mut buf = String::new();
                    render_plain(&envelope, "", &mut buf);
                    buf.truncate(buf.trim_end().len());
                    buf
                }
            };
            emit(&text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

type CmdOutput = (&'static str, Value, Value, Value);

fn run(cmd: &Cmd) -> Result<CmdOutput, CliError> {
    match cmd {
        Cmd::Trace {
            word,
            rank,
            m,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let m: Modulus = m.parse()?;
            let cfg = fringe_config(*threads)?;
            let f = trace_rational(&w, m, &cfg)?;
            let mut result = ratfn_json(&f);
            // A-priori validity bound from the word alone, for reference:
            // half the largest per-generator letter count, rounded up.
            let max_count = letter_counts(&w).into_iter().max().unwrap_or(0);
            result["n_min_word_bound"] = json!(max_count.div_ceil(2).max(1));
            Ok((
                "trace",
                word_input(&w),
                json!({"m": m.to_string(), "threads": threads}),
                result,
            ))
        }
        Cmd::Chi {
            word,
            rank,
            m,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let m: Modulus = m.parse()?;
            let cfg = fringe_config(*threads)?;
            let r = chi_report(&w, m, &cfg)?;
            let witnesses: Vec<Value> = r
                .witnesses
                .iter()
                .map(|wit| {
                    json!({
                        "rank": wit.rank,
                        "basis": wit.basis.iter().map(Word::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let result = json!({
                "chi": chi_json(r.chi),
                "leading_coefficient": r.leading_coefficient,
                "witnesses": witnesses,
                "chi2": chi_json(r.chi2),
                "c2": r.c2,
                "unique_ae": r.unique_ae,
                "trace": ratfn_json(&r.trace),
            });
            Ok((
                "chi",
                word_input(&w),
                json!({"m": m.to_string(), "threads": threads}),
                result,
            ))
        }
        Cmd::Pi {
            word,
            rank,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let cfg = fringe_config(*threads)?;
            let (pi, c) = primitivity_rank(&w, &cfg)?;
            let trace = trace_rational(&w, Modulus::Finite(1), &cfg)?;
            let result = json!({
                "pi": match pi {
                    Pi::Finite(v) => json!(v),
                    Pi::Infinity => json!("inf"),
                },
                "witness_count": c,
                "trace": ratfn_json(&trace),
            });
            Ok(("pi", word_input(&w), json!({"threads": threads}), result))
        }
        Cmd::Fringe {
            word,
            rank,
            m,
            list,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let m: Option<Modulus> = m.as_deref().map(str::parse).transpose()?;
            let cfg = fringe_config(*threads)?;
            let (core, _) = w.cyclic_reduce();
            let fringe = enumerate_fringe(&core, &cfg)?;
            let elements: Vec<Value> = fringe
                .iter()
                .filter(|el| m.map_or(true, |m| el.profile.annihilated_by(m)))
                .map(|el| {
                    let mut v = json!({
                        "vertices": el.graph.num_vertices(),
                        "edges": el.graph.num_edges(),
                        "rank": el.graph.rank(),
                        "signed_counts": el.profile.signed,
                        "unsigned_counts": el.profile.unsigned,
                    });
                    if *list {
                        v["basis"] = json!(el
                            .graph
                            .spanning_tree_basis()
                            .iter()
                            .map(Word::to_string)
                            .collect::<Vec<_>>());
                    }
                    v
                })
                .collect();
            let result = json!({
                "core_word": core.to_string(),
                "size": elements.len(),
                "elements": elements,
            });
            Ok((
                "fringe",
                word_input(&w),
                json!({
                    "m": m.map(|m| m.to_string()),
                    "list": list,
                    "threads": threads,
                }),
                result,
            ))
        }
        Cmd::SubgroupFix { gens, threads } => {
            let words = parse_gens(gens)?;
            let cfg = fringe_config(*threads)?;
            let f = expected_fixed_points_subgroup(&words, &cfg)?;
            Ok((
                "subgroup-fix",
                json!({"gens": words.iter().map(Word::to_string).collect::<Vec<_>>()}),
                json!({"threads": threads}),
                ratfn_json(&f),
            ))
        }
        Cmd::Bounds {
            word,
            rank,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let cfg = fringe_config(*threads)?;
            let b = length_bounds(&w, &cfg)?;
            let bound_json = |b: Bound| match b {
                Bound::AtLeast(v) => json!(v),
                Bound::Infinite => json!("inf"),
            };
            let result = json!({
                "cl_lower": bound_json(b.cl_lower),
                "mixed_lower": bound_json(b.mixed_lower),
            });
            Ok(("bounds", word_input(&w), json!({"threads": threads}), result))
        }
        Cmd::SurfaceTest {
            word,
            rank,
            genus,
            orientable,
            nonorientable,
            mc,
            dim,
            samples,
            seed,
            band,
            threads,
        } => {
            let w = Word::parse(word, *rank)?;
            let orientation = match (orientable, nonorientable) {
                (true, false) => Orientation::Orientable,
                (false, true) => Orientation::NonOrientable,
                _ => {
                    return Err(CliError::Input(
                        "pass exactly one of --orientable / --nonorientable".into(),
                    ))
                }
            };
            let cfg = fringe_config(*threads)?;
            let mc_check = mc.then_some(McCheck {
                dimension: *dim,
                samples: *samples,
                seed: *seed,
                band: *band,
            });
            let verdict = surface_test(&w, *genus, orientation, mc_check.as_ref(), &cfg)?;
            let checks: Vec<Value> = verdict
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "evidence": c.evidence}))
                .collect();
            let result = json!({
                "orientation": match orientation {
                    Orientation::Orientable => "orientable",
                    Orientation::NonOrientable => "nonorientable",
                },
                "genus": genus,
                "consistent": verdict.consistent,
                "checks": checks,
            });
            let params = json!({
                "mc": mc_check.map(|m| json!({
                    "dim": m.dimension, "samples": m.samples, "seed": m.seed, "band": m.band,
                })),
                "threads": threads,
            });
            Ok(("surface-test", word_input(&w), params, result))
        }
        Cmd::Sample {
            word,
            rank,
            group,
            samples,
            seed,
            chains,
        } => {
            let w = Word::parse(word, *rank)?;
            let spec: GroupSpec = group.parse()?;
            let est = estimate_trace_chained(&w, spec, *samples, *seed, *chains)?;
            let result = json!({
                "mean_re": est.mean.re,
                "mean_im": est.mean.im,
                "stderr_re": est.stderr_re,
                "stderr_im": est.stderr_im,
                "samples": est.samples,
                "seed": est.seed,
            });
            Ok((
                "sample",
                word_input(&w),
                json!({
                    "group": spec.to_string(),
                    "samples": samples,
                    "seed": seed,
                    "chains": chains,
                }),
                result,
            ))
        }
        Cmd::Oracle {
            word,
            rank,
            m,
            dim,
        } => {
            let w = Word::parse(word, *rank)?;
            let m: Modulus = m.parse()?;
            let value = exhaustive_trace(&w, m, *dim, oracle_cap()?)?;
            Ok((
                "oracle",
                word_input(&w),
                json!({"m": m.to_string(), "dim": dim}),
                json!({"value": value.to_string()}),
            ))
        }
    }
}

fn word_input(w: &Word) -> Value {
    json!({"word": w.to_string(), "rank": w.ambient_rank()})
}

fn ratfn_json(f: &RatFn) -> Value {
    json!({
        "numerator": f.num().to_string(),
        "denominator": f.den().to_string(),
        "n_min": f.n_min(),
    })
}

fn chi_json(chi: Chi) -> Value {
    match chi {
        Chi::Finite(v) => json!(v),
        Chi::MinusInfinity => json!("-inf"),
    }
}

fn letter_counts(w: &Word) -> Vec<u64> {
    let mut counts = vec![0u64; w.ambient_rank() as usize];
    for l in w.letters() {
        counts[(l.gen() - 1) as usize] += 1;
    }
    counts
}

fn parse_gens(gens: &str) -> Result<Vec<Word>, CliError> {
    let texts: Vec<&str> = gens
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if texts.is_empty() {
        return Err(CliError::Input(
            "--gens needs at least one comma-separated word".into(),
        ));
    }
    let parsed: Vec<Word> = texts
        .iter()
        .map(|t| Word::parse(t, None))
        .collect::<Result<_, _>>()?;
    // Re-interpret every generator in the common ambient rank.
    let rank = parsed.iter().map(Word::ambient_rank).max().unwrap_or(1);
    parsed
        .iter()
        .map(|w| w.with_rank(rank).map_err(CliError::from))
        .collect()
}

fn fringe_config(threads: usize) -> Result<FringeConfig, CliError> {
    let mut cfg = FringeConfig {
        threads: threads.max(1),
        ..FringeConfig::default()
    };
    if let Ok(text) = std::env::var("WORDMEAS_FRINGE_CAP") {
        cfg.max_base_vertices = text.parse().map_err(|_| {
            CliError::Input(format!(
                "WORDMEAS_FRINGE_CAP must be a vertex count, got {text:?}"
            ))
        })?;
    }
    Ok(cfg)
}

fn oracle_cap() -> Result<f64, CliError> {
    match std::env::var("WORDMEAS_ORACLE_CAP") {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Input(format!(
                "WORDMEAS_ORACLE_CAP must be a work budget, got {text:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

/// Write to stdout, exiting quietly if the downstream pipe has closed.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() || out.flush().is_err() {
        std::process::exit(0);
    }
}

/// Flat `path = value` rendering for terminals.
fn render_plain(v: &Value, prefix: &str, buf: &mut String) {
    use std::fmt::Write;
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_plain(val, &path, buf);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                render_plain(val, &format!("{prefix}[{i}]"), buf);
            }
        }
        Value::String(s) => {
            let _ = writeln!(buf, "{prefix} = {s}");
        }
        other => {
            let _ = writeln!(buf, "{prefix} = {other}");
        }
    }
}
