//! The `apm-lab` command line.
//!
//! One subcommand per experiment. Every report echoes the fully resolved
//! configuration, and a given configuration and seed always produce the same
//! bytes. Wall-clock time goes to stderr, and into the report only with
//! `--timing`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 resource cap, 4 I/O.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

use crate::adversary::{key_expansion_report, MemorySpec};
use crate::analysis::{expected_tvd, closeness_sweep, OracleMode, SetFamily};
use crate::bits::{index_to_string, BitString};
use crate::error::{Error, Result};
use crate::matching::{count_matchings, sample_matching, Matching};
use crate::protocols::{binomial_stderr, covered_edge_prob_exact, estimate_success, sample_hard_instance, Solver};
use crate::qsim::{instance_events, parse_stream, run_quantum_message_protocol, run_streaming, validate_stream, StreamEvent};
use crate::report::{emit_report, num, Format, Report};
use crate::rng::SeededRng;
use crate::spectral::{fwht, kkl_margin, CubeFunction};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "APM_LAB_SEED";

#[derive(Debug, Parser, Serialize)]
#[command(name = "apm-lab", version, about = "Experiments on the α-partial-matching extractor and its one-way protocols")]
pub struct ExperimentConfig {
    /// Master seed for every random stream.
    #[arg(long, env = SEED_ENV, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Embed wall-clock time in the report (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverArg {
    Quantum,
    Classical,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Compute z = Mx.
    Extract {
        /// Input bits, character k = x_k.
        #[arg(long)]
        x: String,
        /// Matching as "i j;i j;...".
        #[arg(long, conflicts_with = "matching_file")]
        matching: Option<String>,
        /// Matching file, one "i j" per line.
        #[arg(long)]
        matching_file: Option<PathBuf>,
    },
    /// Count matchings with m edges on n vertices.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Draw uniform matchings.
    SampleMatching {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Fourier coefficients of the indicator of a set.
    Fourier {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "first-bits-fixed")]
        family: String,
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Only list nonzero coefficients.
        #[arg(long)]
        nonzero: bool,
    },
    /// Check the KKL inequality on a signed set indicator.
    KklCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "random")]
        family: String,
        #[arg(long, default_value_t = 1)]
        c: usize,
        /// Give each member a random sign.
        #[arg(long)]
        random_signs: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
        delta: Vec<f64>,
    },
    /// Expected distance from uniform for one set.
    Tvd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "first-bits-fixed")]
        family: String,
        #[arg(long, default_value_t = 1)]
        c: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Expected distance from uniform across a range of c.
    TvdSweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "first-bits-fixed")]
        family: String,
        #[arg(long, default_value_t = 0)]
        c_min: usize,
        #[arg(long)]
        c_max: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Success rate of a one-way solver on hard instances.
    Protocol {
        #[arg(long, value_enum)]
        solver: SolverArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Fingerprint copies (quantum).
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Revealed positions (classical).
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Repeat the quantum message protocol on a fixed (x, M).
    Qsim {
        #[arg(long)]
        x: String,
        #[arg(long, conflicts_with = "matching_file")]
        matching: Option<String>,
        #[arg(long)]
        matching_file: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Run the streaming algorithm on an event file or a random instance.
    StreamSim {
        #[arg(long)]
        n: usize,
        /// Event file: "b i v", "e i j", "w i j v" per line.
        #[arg(long, conflicts_with = "random_instance")]
        events: Option<PathBuf>,
        /// Edges of a random hard instance, streamed in random order.
        #[arg(long)]
        random_instance: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Classical c-bit memory versus one fingerprint state.
    Adversary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// first:c | subset:i,j,... | parity:FILE | file:PATH
        #[arg(long)]
        memory: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Extract { .. } => "extract",
            Command::Count { .. } => "count",
            Command::SampleMatching { .. } => "sample-matching",
            Command::Fourier { .. } => "fourier",
            Command::KklCheck { .. } => "kkl-check",
            Command::Tvd { .. } => "tvd",
            Command::TvdSweep { .. } => "tvd-sweep",
            Command::Protocol { .. } => "protocol",
            Command::Qsim { .. } => "qsim",
            Command::StreamSim { .. } => "stream-sim",
            Command::Adversary { .. } => "adversary",
        }
    }
}

fn oracle_mode(mode: ModeArg, trials: u64) -> OracleMode {
    match mode {
        ModeArg::Exact => OracleMode::Exact,
        ModeArg::Mc => OracleMode::MonteCarlo { trials },
    }
}

fn load_matching(n: usize, inline: &Option<String>, file: &Option<PathBuf>) -> Result<Matching> {
    match (inline, file) {
        (Some(s), _) => Matching::parse_inline(n, s),
        (None, Some(p)) => Matching::parse_file(n, &std::fs::read_to_string(p)?),
        (None, None) => Err(Error::Validation("give --matching or --matching-file".into())),
    }
}

fn tvd_summary(r: &mut Report, report: &crate::analysis::TvdReport) {
    r.set_f64("mean", report.mean)
        .set_f64("mean_sq", report.mean_sq)
        .set_f64("stderr", report.stderr)
        .set("matchings_evaluated", report.matchings_evaluated)
        .set("cauchy_schwarz_violations", report.cauchy_schwarz_violations);
}

/// Runs one experiment and returns its report.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut rng = SeededRng::new(config.seed, 0);
    let mut r = Report::new(config.command.name());
    r.config = match serde_json::to_value(config) {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("config serializes to an object"),
    };
    match &config.command {
        Command::Extract { x, matching, matching_file } => {
            let x: BitString = x.parse()?;
            let mm = load_matching(x.len(), matching, matching_file)?;
            r.set("z", mm.extract(&x)?.to_string());
        }
        Command::Count { n, m } => {
            r.set("n", *n).set("m", *m).set("count", count_matchings(*n, *m)?.to_string());
        }
        Command::SampleMatching { n, m, count } => {
            r.with_columns(&["draw", "matching"]);
            for k in 0..*count {
                let mm = sample_matching(*n, *m, &mut rng)?;
                r.push_row(vec![k.into(), mm.to_string().into()])?;
            }
        }
        Command::Fourier { n, family, c, nonzero } => {
            let a = SetFamily::parse(family, config.seed)?.build(*n, *c)?;
            let spec = fwht(a.indicator());
            r.set("set_size", a.len());
            r.with_columns(&["s", "weight", "coeff"]);
            for (s, &coeff) in spec.coeffs().iter().enumerate() {
                if *nonzero && coeff == 0.0 {
                    continue;
                }
                r.push_row(vec![index_to_string(s as u64, *n).into(), s.count_ones().into(), num(coeff)])?;
            }
        }
        Command::KklCheck { n, family, c, random_signs, delta } => {
            let a = SetFamily::parse(family, config.seed)?.build(*n, *c)?;
            let mut f = a.indicator().into_values();
            if *random_signs {
                for v in f.iter_mut().filter(|v| **v != 0.0) {
                    if rng.coin() {
                        *v = -1.0;
                    }
                }
            }
            let f = CubeFunction::new(*n, f)?;
            r.set("set_size", a.len());
            r.with_columns(&["delta", "lhs", "rhs", "holds"]);
            let mut all = true;
            for &d in delta {
                let k = kkl_margin(&f, d)?;
                all &= k.holds(1e-9);
                r.push_row(vec![num(d), num(k.lhs), num(k.rhs), k.holds(1e-9).into()])?;
            }
            r.set("all_hold", all);
        }
        Command::Tvd { n, m, family, c, mode, trials } => {
            let mode = oracle_mode(*mode, *trials);
            r.mode = Some(mode.name().into());
            let a = SetFamily::parse(family, config.seed)?.build(*n, *c)?;
            let report = expected_tvd(&a, *m, mode, &mut rng)?;
            r.set("set_size", a.len()).set_f64("deficit", a.deficit());
            tvd_summary(&mut r, &report);
        }
        Command::TvdSweep { n, m, family, c_min, c_max, mode, trials } => {
            let mode = oracle_mode(*mode, *trials);
            r.mode = Some(mode.name().into());
            let fam = SetFamily::parse(family, config.seed)?;
            let rows = closeness_sweep(*n, *m, &fam, *c_min..=*c_max, mode, &mut rng)?;
            r.set("proven_regime", 4 * m <= *n);
            r.with_columns(&["c", "set_size", "mean_tvd", "mean_tvd_sq", "stderr", "c_sqrt_alpha_over_n", "proven_regime"]);
            for row in rows {
                r.push_row(vec![
                    row.c.into(),
                    row.set_size.into(),
                    num(row.report.mean),
                    num(row.report.mean_sq),
                    num(row.report.stderr),
                    num(row.scale),
                    row.proven_regime.into(),
                ])?;
            }
        }
        Command::Protocol { solver, n, m, copies, d, trials } => {
            let solver = match solver {
                SolverArg::Quantum => Solver::Quantum { copies: *copies },
                SolverArg::Classical => Solver::Classical { d: *d },
            };
            r.mode = Some("monte-carlo".into());
            let rep = estimate_success(solver, *n, *m, *trials, &mut rng)?;
            let predicted = match solver {
                Solver::Quantum { copies } => {
                    let alpha = *m as f64 / *n as f64;
                    Some(0.5 + 0.5 * (1.0 - (1.0 - 2.0 * alpha).powi(copies as i32)))
                }
                Solver::Classical { d } => covered_edge_prob_exact(*n, *m, d)
                    .ok()
                    .and_then(|p| p.to_f64())
                    .map(|p| 0.5 + p / 2.0),
            };
            let (cost, unit) = solver.message_cost(*n);
            r.set("solver", solver.name())
                .set("trials", rep.trials)
                .set("successes", rep.successes)
                .set_f64("rate", rep.rate)
                .set_f64("stderr", rep.stderr)
                .set("learned", rep.learned)
                .set("conditional_correct", rep.conditional_correct)
                .set("predicted_rate", predicted.map_or(Value::Null, num))
                .set("message_cost", cost)
                .set("message_unit", unit);
        }
        Command::Qsim { x, matching, matching_file, trials } => {
            let x: BitString = x.parse()?;
            let mm = load_matching(x.len(), matching, matching_file)?;
            let z = mm.extract(&x)?;
            r.mode = Some("monte-carlo".into());
            let mut per_edge = vec![0u64; mm.len()];
            let mut correct = 0u64;
            let streams = rng.trial_streams();
            for t in 0..*trials {
                if let Some(l) = run_quantum_message_protocol(&x, &mm, &mut streams.trial(t))? {
                    per_edge[l.edge] += 1;
                    correct += (l.bit == z.get(l.edge)) as u64;
                }
            }
            let present: u64 = per_edge.iter().sum();
            let rate = present as f64 / *trials as f64;
            r.set("trials", *trials)
                .set("present", present)
                .set_f64("presence_rate", rate)
                .set_f64("stderr", binomial_stderr(rate, *trials))
                .set_f64("expected_rate", 2.0 * mm.alpha())
                .set("conditional_correct", correct);
            r.with_columns(&["edge", "i", "j", "z", "count"]);
            for (l, &(i, j)) in mm.pairs().iter().enumerate() {
                r.push_row(vec![l.into(), i.into(), j.into(), (z.get(l) as u8).into(), per_edge[l].into()])?;
            }
        }
        Command::StreamSim { n, events, random_instance, trials } => {
            let events = match (events, random_instance) {
                (Some(p), _) => parse_stream(&std::fs::read_to_string(p)?)?,
                (None, Some(m)) => {
                    let inst = sample_hard_instance(*n, *m, &mut rng)?;
                    let mut ev = instance_events(&inst.x, &inst.matching, &inst.w)?;
                    rand::seq::SliceRandom::shuffle(ev.as_mut_slice(), &mut rng);
                    ev
                }
                (None, None) => return Err(Error::Validation("give --events or --random-instance".into())),
            };
            stream_report(&mut r, *n, &events, *trials, &mut rng)?;
        }
        Command::Adversary { n, m, memory, trials } => {
            let spec = MemorySpec::parse(memory, *n)?;
            let s = key_expansion_report(&spec, *n, *m, *trials, &mut rng)?;
            r.mode = Some("exact+monte-carlo".into());
            r.set("n", s.n)
                .set("m", s.m)
                .set("memory", s.memory.clone())
                .set("c", s.c)
                .set_f64("classical_advantage", s.classical_advantage)
                .set_f64("quantum_success", s.quantum_success)
                .set_f64("quantum_stderr", s.quantum_stderr)
                .set_f64("quantum_advantage", s.quantum_advantage())
                .set_f64("quantum_memory_qubits", s.quantum_memory_qubits)
                .set("trials", s.trials)
                .set("degenerate", s.degenerate);
        }
    }
    Ok(r)
}

/// Expected `b` for edge `(i, j)` when the stream carries `x_i`, `x_j` and
/// the edge's promise bit.
fn expected_stream_bits(events: &[StreamEvent]) -> std::collections::HashMap<(usize, usize), bool> {
    let mut x = std::collections::HashMap::new();
    let mut w = Vec::new();
    for e in events {
        match *e {
            StreamEvent::Bit { i, v } => {
                x.insert(i, v);
            }
            StreamEvent::PromiseBit { i, j, v } => w.push(((i.min(j), i.max(j)), v)),
            StreamEvent::Edge { .. } => {}
        }
    }
    w.into_iter()
        .filter_map(|((i, j), v)| Some(((i, j), x.get(&i)? ^ x.get(&j)? ^ v)))
        .collect()
}

fn stream_report(r: &mut Report, n: usize, events: &[StreamEvent], trials: u64, rng: &mut SeededRng) -> Result<()> {
    let mm = validate_stream(n, events)?;
    let expected = expected_stream_bits(events);
    r.mode = Some("monte-carlo".into());
    let mut counts = std::collections::BTreeMap::new();
    let mut present = 0u64;
    let mut checked = 0u64;
    let mut correct = 0u64;
    let streams = rng.trial_streams();
    for t in 0..trials {
        if let Some(o) = run_streaming(n, events, &mut streams.trial(t))? {
            present += 1;
            *counts.entry((o.edge, o.bit)).or_insert(0u64) += 1;
            if let Some(&b) = expected.get(&o.edge) {
                checked += 1;
                correct += (b == o.bit) as u64;
            }
        }
    }
    let rate = present as f64 / trials as f64;
    r.set("events", events.len())
        .set("edges", mm.len())
        .set("trials", trials)
        .set("present", present)
        .set_f64("presence_rate", rate)
        .set_f64("stderr", binomial_stderr(rate, trials))
        .set_f64("expected_rate", 2.0 * mm.alpha())
        .set("checked", checked)
        .set("conditional_correct", correct);
    r.with_columns(&["i", "j", "b", "count"]);
    for (((i, j), b), c) in counts {
        r.push_row(vec![i.into(), j.into(), (b as u8).into(), c.into()])?;
    }
    Ok(())
}

fn run_with_pool(config: &ExperimentConfig) -> Result<Report> {
    match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?
            .install(|| run(config)),
        None => run(config),
    }
}

/// Parses `args`, runs, and writes the report to `--output` or `stdout`.
/// Diagnostics and timing go to `stderr`. Returns the exit code.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match ExperimentConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return e.exit_code();
        }
    };
    let started = Instant::now();
    let outcome = run_with_pool(&config).and_then(|mut report| {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        if config.timing {
            report.elapsed_ms = Some(ms);
        }
        match &config.output {
            Some(path) => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                emit_report(&report, config.format, &mut f)?;
                f.flush()?;
            }
            None => emit_report(&report, config.format, stdout)?,
        }
        Ok(ms)
    });
    match outcome {
        Ok(ms) => {
            let _ = writeln!(stderr, "{}: done in {ms:.1} ms", config.command.name());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    execute(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Convenience for tests and examples: run `args` and return the rendered
/// report.
pub fn run_to_string<I, T>(args: I) -> std::result::Result<String, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = execute(args, &mut out, &mut err);
    if code == 0 {
        Ok(String::from_utf8_lossy(&out).into_owned())
    } else {
        Err((code, String::from_utf8_lossy(&err).into_owned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json(args: &[&str]) -> Value {
        let mut full = vec!["apm-lab"];
        full.extend_from_slice(args);
        serde_json::from_str(&run_to_string(full).unwrap()).unwrap()
    }

    #[test]
    fn extract_subcommand() {
        let v = json(&["extract", "--x", "1010", "--matching", "0 1;2 3"]);
        assert_eq!(v["summary"]["z"], "11");
        assert_eq!(v["config"]["command"]["x"], "1010");
    }

    #[test]
    fn tvd_subcommand() {
        let v = json(&["tvd", "--n", "4", "--m", "1", "--family", "prefix-parity", "--c", "1", "--mode", "exact"]);
        assert_eq!(v["summary"]["mean"].as_f64().unwrap(), 1.0 / 6.0);
        assert_eq!(v["mode"], "exact");
    }

    #[test]
    fn exit_codes() {
        let code = |args: &[&str]| {
            let mut full = vec!["apm-lab"];
            full.extend_from_slice(args);
            run_to_string(full).unwrap_err().0
        };
        assert_eq!(code(&["nonsense"]), 2);
        assert_eq!(code(&["count", "--n", "3", "--m", "2"]), 2);
        assert_eq!(code(&["tvd", "--n", "26", "--m", "13", "--family", "full", "--c", "0"]), 3);
        assert_eq!(code(&["stream-sim", "--n", "4", "--events", "/nonexistent/events.txt"]), 4);
    }
}
