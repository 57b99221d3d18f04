//! Classical versus quantum memory against the matching extractor.
//!
//! Alice and Bob derive the key `Z = z(X, Y)` from a source `X` and a seed
//! `Y` (a uniform matching) that the adversary later learns. A classical
//! adversary keeps a function `m(X)` of its memory budget; its best possible
//! advantage at telling `(Y, Z)` from `(Y, uniform)` is computed exactly by
//! Bayes over every message class and every matching. A quantum adversary
//! keeps one fingerprint state of `X` (`log₂ n` qubits) and measures it once
//! `Y` is revealed; its success rate is simulated.
//!
//! Only flat sources are considered: any source of min-entropy `k` is a
//! convex combination of flat sources of that min-entropy, so a flat source is
//! the worst case for an extractor.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{expected_tvd, pairwise_sum, OracleMode, SubsetA};
use crate::bits::BitString;
use crate::error::{dim_check, Error, Result};
use crate::matching::sample_matching;
use crate::protocols::{binomial_stderr, estimate_success, Solver, SuccessReport};
use crate::qsim::run_quantum_message_protocol;
use crate::rng::SeededRng;

/// Largest `n` for the exact classical oracle.
pub const MAX_EXACT_N: usize = 14;

const CHUNK: u64 = 2048;

/// What a classical adversary stores about `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MemorySpec {
    /// The first `c` bits.
    FirstBits(usize),
    /// The bits at these positions.
    SubsetBits(Vec<usize>),
    /// One parity `⟨mask, x⟩` per mask.
    ParityBank(Vec<BitString>),
    /// Arbitrary partition: `labels[x]` is the message for cube point `x`.
    Partition(Vec<u64>),
}

impl MemorySpec {
    /// Parses `first:c`, `subset:i,j,...`, `parity:FILE` (one mask bitstring
    /// per line) or `file:PATH` (lines `"<bitstring> <label>"` covering the
    /// cube exactly once).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("memory spec {s:?} needs kind:argument")))?;
        let spec = match kind {
            "first" => MemorySpec::FirstBits(
                arg.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad bit count {arg:?}")))?,
            ),
            "subset" => MemorySpec::SubsetBits(
                arg.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad position {t:?}")))
                    })
                    .collect::<Result<_>>()?,
            ),
            "parity" => Self::parity_file(&std::fs::read_to_string(Path::new(arg))?)?,
            "file" => Self::partition_file(&std::fs::read_to_string(Path::new(arg))?, n)?,
            _ => return Err(Error::Validation(format!("unknown memory kind {kind:?}"))),
        };
        spec.validate(n)?;
        Ok(spec)
    }

    pub fn parity_file(text: &str) -> Result<Self> {
        Ok(MemorySpec::ParityBank(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::parse)
                .collect::<Result<_>>()?,
        ))
    }

    pub fn partition_file(text: &str, n: usize) -> Result<Self> {
        if n > MAX_EXACT_N {
            return Err(Error::Resource(format!("partition files support n ≤ {MAX_EXACT_N}")));
        }
        let mut labels = vec![None; 1 << n];
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (x, label) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("expected \"<bits> <label>\", got {line:?}")))?;
            let x: BitString = x.parse()?;
            dim_check("partition point length", n, x.len())?;
            let label = label
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad label {label:?}")))?;
            let slot = &mut labels[x.to_index()? as usize];
            if slot.is_some() {
                return Err(Error::Validation(format!("point {x} listed twice")));
            }
            *slot = Some(label);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(x, l)| {
                l.ok_or_else(|| Error::Validation(format!("point {} has no label", crate::bits::index_to_string(x as u64, n))))
            })
            .collect::<Result<_>>()?;
        Ok(MemorySpec::Partition(labels))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            MemorySpec::FirstBits(c) if *c > n => {
                Err(Error::Validation(format!("cannot store {c} of {n} bits")))
            }
            MemorySpec::SubsetBits(pos) => {
                let mut seen = vec![false; n];
                for &p in pos {
                    if p >= n || std::mem::replace(&mut seen[p], true) {
                        return Err(Error::Validation(format!("bad or repeated position {p}")));
                    }
                }
                Ok(())
            }
            MemorySpec::ParityBank(masks) => {
                if masks.len() > n {
                    return Err(Error::Validation(format!("{} parities exceed n = {n}", masks.len())));
                }
                masks.iter().try_for_each(|mk| dim_check("parity mask length", n, mk.len()))
            }
            MemorySpec::Partition(labels) => dim_check("partition size", 1 << n, labels.len()),
            _ => Ok(()),
        }
    }

    /// Stored bits `c` (for partitions, `⌈log₂ #classes⌉`).
    pub fn memory_bits(&self) -> usize {
        match self {
            MemorySpec::FirstBits(c) => *c,
            MemorySpec::SubsetBits(p) => p.len(),
            MemorySpec::ParityBank(m) => m.len(),
            MemorySpec::Partition(labels) => {
                let mut l = labels.clone();
                l.sort_unstable();
                l.dedup();
                crate::protocols::ceil_log2(l.len()) as usize
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MemorySpec::FirstBits(c) => format!("first:{c}"),
            MemorySpec::SubsetBits(p) => format!(
                "subset:{}",
                p.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            ),
            MemorySpec::ParityBank(m) => format!("parity:{} masks", m.len()),
            MemorySpec::Partition(_) => "partition".into(),
        }
    }

    /// The stored message for cube point `x`.
    pub fn message(&self, x: u64) -> u64 {
        match self {
            MemorySpec::FirstBits(c) => x & ((1u64 << c) - 1),
            MemorySpec::SubsetBits(pos) => pos
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &p)| acc | (((x >> p) & 1) << k)),
            MemorySpec::ParityBank(masks) => masks.iter().enumerate().fold(0, |acc, (k, mk)| {
                let mask = mk.words().first().copied().unwrap_or(0);
                acc | (((x & mask).count_ones() as u64 & 1) << k)
            }),
            MemorySpec::Partition(labels) => labels[x as usize],
        }
    }

    /// Message classes `A_msg`, ordered by message.
    pub fn classes(&self, n: usize) -> Result<Vec<SubsetA>> {
        self.validate(n)?;
        let mut by_msg: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for x in 0..1u64 << n {
            by_msg.entry(self.message(x)).or_default().push(x);
        }
        by_msg.into_values().map(|xs| SubsetA::new(n, xs)).collect()
    }
}

/// Exact optimal advantage over 1/2 of a classical adversary holding `m(X)`:
/// `Σ_msg (|A_msg| / 2^n) · E_M ‖p_{A_msg, M} − U‖_tvd / 4`.
pub fn classical_advantage_exact(spec: &MemorySpec, n: usize, m: usize) -> Result<f64> {
    if n > MAX_EXACT_N {
        return Err(Error::Resource(format!(
            "exact classical advantage supports n ≤ {MAX_EXACT_N}, got {n}"
        )));
    }
    let classes = spec.classes(n)?;
    let cube = (1u64 << n) as f64;
    let terms = classes
        .par_iter()
        .map(|a| {
            let r = expected_tvd(a, m, OracleMode::Exact, &mut SeededRng::new(0, 0))?;
            Ok(a.len() as f64 / cube * r.mean)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms) / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackMode {
    /// Decide `w = Z` versus `w = Z̄`; expected success `1/2 + α`.
    Apm,
    /// Decide whether `w` is the real key `Z` or uniform; expected success
    /// `1/2 + α/2`.
    RealVsUniform,
}

impl AttackMode {
    pub fn name(&self) -> &'static str {
        match self {
            AttackMode::Apm => "apm",
            AttackMode::RealVsUniform => "real-vs-uniform",
        }
    }
}

/// Simulated success rate of the one-fingerprint quantum adversary.
pub fn quantum_adversary_trial(
    n: usize,
    m: usize,
    mode: AttackMode,
    trials: u64,
    rng: &mut SeededRng,
) -> Result<SuccessReport> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("the quantum adversary needs even n, got {n}")));
    }
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    match mode {
        AttackMode::Apm => estimate_success(Solver::Quantum { copies: 1 }, n, m, trials, rng),
        AttackMode::RealVsUniform => {
            if 2 * m > n {
                return Err(Error::Domain(format!("{m} edges need 2m ≤ n = {n}")));
            }
            let streams = rng.trial_streams();
            let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
            let counts = starts
                .par_iter()
                .map(|&start| -> Result<[u64; 3]> {
                    let mut c = [0u64; 3];
                    for t in start..(start + CHUNK).min(trials) {
                        let mut r = streams.trial(t);
                        let mm = sample_matching(n, m, &mut r)?;
                        let x = BitString::from_bits((0..n).map(|_| r.coin()));
                        let real = r.coin();
                        let w = if real {
                            mm.extract(&x)?
                        } else {
                            BitString::from_bits((0..m).map(|_| r.coin()))
                        };
                        let (guess, learned) = match run_quantum_message_protocol(&x, &mm, &mut r)? {
                            Some(l) => (w.get(l.edge) == l.bit, true),
                            None => (r.coin(), false),
                        };
                        let ok = guess == real;
                        c[0] += ok as u64;
                        c[1] += learned as u64;
                        c[2] += (learned && ok) as u64;
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            let t = counts.iter().fold([0u64; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
            Ok(SuccessReport::from_counts(trials, t[0], t[1], t[2]))
        }
    }
}

/// Classical exact advantage next to the simulated quantum attack.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub n: usize,
    pub m: usize,
    pub memory: String,
    /// Classical memory in bits.
    pub c: usize,
    /// Exact optimal classical advantage over 1/2, in `[0, 1/2]`.
    pub classical_advantage: f64,
    /// Quantum real-vs-uniform success rate.
    pub quantum_success: f64,
    pub quantum_stderr: f64,
    pub quantum_memory_qubits: f64,
    pub trials: u64,
    /// `m = 0`: there is no key and both sides sit at 1/2.
    pub degenerate: bool,
}

impl ScenarioReport {
    pub fn quantum_advantage(&self) -> f64 {
        self.quantum_success - 0.5
    }
}

/// Bounded-storage key expansion at desk scale.
pub fn key_expansion_report(spec: &MemorySpec, n: usize, m: usize, trials: u64, rng: &mut SeededRng) -> Result<ScenarioReport> {
    let classical_advantage = classical_advantage_exact(spec, n, m)?;
    let q = quantum_adversary_trial(n, m, AttackMode::RealVsUniform, trials, rng)?;
    Ok(ScenarioReport {
        n,
        m,
        memory: spec.label(),
        c: spec.memory_bits(),
        classical_advantage,
        quantum_success: q.rate,
        quantum_stderr: binomial_stderr(q.rate, q.trials),
        quantum_memory_qubits: (n as f64).log2(),
        trials,
        degenerate: m == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_examples() {
        assert_eq!(classical_advantage_exact(&MemorySpec::FirstBits(0), 6, 2).unwrap(), 0.0);
        assert_eq!(classical_advantage_exact(&MemorySpec::FirstBits(1), 4, 1).unwrap(), 0.0);
        let a = classical_advantage_exact(&MemorySpec::FirstBits(2), 4, 1).unwrap();
        assert!((a - 1.0 / 24.0).abs() < 1e-16);
        assert!(matches!(
            classical_advantage_exact(&MemorySpec::FirstBits(2), 16, 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn full_information_advantage() {
        for (n, m) in [(4, 1), (4, 2), (6, 2), (8, 3)] {
            let spec = MemorySpec::SubsetBits((0..n).collect());
            let a = classical_advantage_exact(&spec, n, m).unwrap();
            let expect = 0.25 * (2.0 - 2.0 / (1u64 << m) as f64);
            assert!((a - expect).abs() < 1e-12, "n={n} m={m}");
        }
    }

    #[test]
    fn refinement_never_hurts() {
        for n in [6, 8, 10] {
            let m = n / 4;
            let adv: Vec<f64> = (0..=4)
                .map(|c| classical_advantage_exact(&MemorySpec::FirstBits(c), n, m).unwrap())
                .collect();
            assert!(adv.windows(2).all(|w| w[0] <= w[1] + 1e-15), "{adv:?}");
        }
        // parity x0⊕x1 is coarser than the bits x0, x1
        let par = MemorySpec::ParityBank(vec!["1100".parse().unwrap()]);
        let bits = MemorySpec::SubsetBits(vec![0, 1]);
        let a = classical_advantage_exact(&par, 4, 1).unwrap();
        let b = classical_advantage_exact(&bits, 4, 1).unwrap();
        assert!(a <= b + 1e-15);
        assert!((a - 1.0 / 24.0).abs() < 1e-16);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(MemorySpec::parse("first:3", 8).unwrap(), MemorySpec::FirstBits(3));
        assert_eq!(MemorySpec::parse("subset:0,5", 8).unwrap(), MemorySpec::SubsetBits(vec![0, 5]));
        assert!(MemorySpec::parse("subset:0,0", 8).is_err());
        assert!(MemorySpec::parse("first:9", 8).is_err());
        assert!(MemorySpec::parse("bogus", 8).is_err());
        let p = MemorySpec::partition_file("00 0\n01 0\n10 1\n11 1\n", 2).unwrap();
        assert_eq!(p.classes(2).unwrap().len(), 2);
        assert_eq!(p.memory_bits(), 1);
        assert!(MemorySpec::partition_file("00 0\n01 0\n", 2).is_err());
        assert!(MemorySpec::partition_file("00 0\n00 1\n01 0\n10 0\n11 0\n", 2).is_err());
    }

    #[test]
    fn messages() {
        let x = 0b1011_0110u64;
        assert_eq!(MemorySpec::FirstBits(3).message(x), 0b110);
        assert_eq!(MemorySpec::SubsetBits(vec![7, 0]).message(x), 0b01);
        let masks = MemorySpec::ParityBank(vec!["11000000".parse().unwrap(), "01100000".parse().unwrap()]);
        // x0=0 x1=1 x2=1: parities x0⊕x1 = 1, x1⊕x2 = 0
        assert_eq!(masks.message(x), 0b01);
    }

    #[test]
    fn degenerate_scenario() {
        let mut rng = SeededRng::new(5, 0);
        let r = key_expansion_report(&MemorySpec::FirstBits(2), 6, 0, 20_000, &mut rng).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.classical_advantage, 0.0);
        assert!((r.quantum_success - 0.5).abs() < 3.0 * r.quantum_stderr + 1e-3);
        assert!(quantum_adversary_trial(7, 1, AttackMode::Apm, 10, &mut rng).is_err());
    }

    #[test]
    fn quantum_apm_with_perfect_matching() {
        let mut rng = SeededRng::new(6, 0);
        let r = quantum_adversary_trial(8, 4, AttackMode::Apm, 2000, &mut rng).unwrap();
        assert_eq!(r.rate, 1.0);
    }
}
