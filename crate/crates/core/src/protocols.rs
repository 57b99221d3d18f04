//! The α-partial-matching problem end to end.
//!
//! Alice holds `x`, Bob holds `M` and `w` with the promise `w = Mx ⊕ b^m`;
//! the answer is `b`. Instances come from the hard distribution (uniform `x`,
//! uniform `M`, fair `b`). Two one-way solvers are provided: the quantum one
//! (fingerprint state, `⌈log₂ n⌉` qubits per copy) and the classical
//! birthday-paradox one (Alice reveals `d` random positions of `x`). Both
//! have zero-sided error: when they learn a parity they are always right, and
//! otherwise they flip a coin from the trial's own stream.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::matching::{binomial, count_matchings, enumerate_matchings_capped, sample_matching, Matching, DEFAULT_ENUMERATION_CAP};
use crate::qsim::run_quantum_message_protocol;
use crate::rng::SeededRng;

const CHUNK: u64 = 2048;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApmInstance {
    pub x: BitString,
    pub matching: Matching,
    pub w: BitString,
    /// Hidden answer.
    pub b: bool,
}

impl ApmInstance {
    /// Builds `w = Mx ⊕ b^m`.
    pub fn new(x: BitString, matching: Matching, b: bool) -> Result<Self> {
        let z = matching.extract(&x)?;
        let w = if b { z.complement() } else { z };
        Ok(ApmInstance { x, matching, w, b })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.matching.len()
    }

    /// `w = Mx ⊕ b^m` exactly.
    pub fn satisfies_promise(&self) -> bool {
        match self.matching.extract(&self.x) {
            Ok(z) => {
                let expect = if self.b { z.complement() } else { z };
                expect == self.w
            }
            Err(_) => false,
        }
    }
}

/// Uniform `x`, uniform `M ∈ ℳ_{n,m}`, fair `b`, and `w = z ⊕ b^m`. With
/// `m = 0` the answer is still drawn but cannot be determined from `w`.
pub fn sample_hard_instance(n: usize, m: usize, rng: &mut SeededRng) -> Result<ApmInstance> {
    let matching = sample_matching(n, m, rng)?;
    let x = BitString::from_bits((0..n).map(|_| rng.coin()));
    let b = rng.coin();
    ApmInstance::new(x, matching, b)
}

/// A solver's answer and whether it came from a learned parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guess {
    pub bit: bool,
    pub learned: bool,
}

/// Runs the quantum protocol on `copies` independent fingerprint states and
/// answers `z_ℓ ⊕ w_ℓ` from the first learned parity.
pub fn solve_apm_quantum(inst: &ApmInstance, copies: usize, rng: &mut SeededRng) -> Result<Guess> {
    if copies == 0 {
        return Err(Error::Validation("the quantum solver needs at least one copy".into()));
    }
    for _ in 0..copies {
        if let Some(learned) = run_quantum_message_protocol(&inst.x, &inst.matching, rng)? {
            return Ok(Guess {
                bit: learned.bit ^ inst.w.get(learned.edge),
                learned: true,
            });
        }
    }
    Ok(Guess {
        bit: rng.coin(),
        learned: false,
    })
}

/// Alice reveals a uniform `d`-subset of positions with their values; Bob
/// answers from the lowest-indexed edge with both endpoints revealed.
pub fn solve_apm_classical(inst: &ApmInstance, d: usize, rng: &mut SeededRng) -> Result<Guess> {
    let n = inst.n();
    if d > n {
        return Err(Error::Domain(format!("cannot reveal {d} of {n} bits")));
    }
    let mut revealed = vec![false; n];
    for i in index::sample(rng, n, d) {
        revealed[i] = true;
    }
    let hit = inst
        .matching
        .pairs()
        .iter()
        .position(|&(i, j)| revealed[i] && revealed[j]);
    Ok(match hit {
        Some(l) => {
            let (i, j) = inst.matching.pairs()[l];
            Guess {
                bit: inst.x.get(i) ^ inst.x.get(j) ^ inst.w.get(l),
                learned: true,
            }
        }
        None => Guess {
            bit: rng.coin(),
            learned: false,
        },
    })
}

/// Which solver to run and its resource parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Quantum { copies: usize },
    Classical { d: usize },
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Quantum { .. } => "quantum",
            Solver::Classical { .. } => "classical",
        }
    }

    pub fn solve(&self, inst: &ApmInstance, rng: &mut SeededRng) -> Result<Guess> {
        match *self {
            Solver::Quantum { copies } => solve_apm_quantum(inst, copies, rng),
            Solver::Classical { d } => solve_apm_classical(inst, d, rng),
        }
    }

    /// Message length: `copies · ⌈log₂ n⌉` qubits, or `d · (⌈log₂ n⌉ + 1)`
    /// bits for index-plus-value pairs. Public-coin derandomization would cut
    /// the classical cost to about `d + O(log n)`; that is not modeled.
    pub fn message_cost(&self, n: usize) -> (u64, &'static str) {
        let idx = ceil_log2(n);
        match *self {
            Solver::Quantum { copies } => (copies as u64 * idx, "qubits"),
            Solver::Classical { d } => (d as u64 * (idx + 1), "bits"),
        }
    }
}

pub(crate) fn ceil_log2(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuccessReport {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    /// Binomial standard error `√(rate(1 − rate)/trials)`.
    pub stderr: f64,
    /// Trials where the solver answered from a learned parity.
    pub learned: u64,
    /// Learned trials whose answer was correct; equals `learned` for
    /// zero-sided-error solvers.
    pub conditional_correct: u64,
}

impl SuccessReport {
    pub fn from_counts(trials: u64, successes: u64, learned: u64, conditional_correct: u64) -> Self {
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        SuccessReport {
            trials,
            successes,
            rate,
            stderr: binomial_stderr(rate, trials),
            learned,
            conditional_correct,
        }
    }
}

pub(crate) fn binomial_stderr(rate: f64, trials: u64) -> f64 {
    if trials == 0 {
        0.0
    } else {
        (rate * (1.0 - rate) / trials as f64).sqrt()
    }
}

/// Success rate of `solver` on `trials` hard instances. Trial `t` always uses
/// the same child stream, so the report does not depend on thread count.
pub fn estimate_success(solver: Solver, n: usize, m: usize, trials: u64, rng: &mut SeededRng) -> Result<SuccessReport> {
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    if 2 * m > n {
        return Err(Error::Domain(format!("{m} edges need 2m ≤ n = {n}")));
    }
    if matches!(solver, Solver::Quantum { .. }) && n % 2 != 0 {
        return Err(Error::Domain(format!("the quantum solver needs even n, got {n}")));
    }
    let streams = rng.trial_streams();
    let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
    let counts = starts
        .par_iter()
        .map(|&start| -> Result<[u64; 3]> {
            let mut c = [0u64; 3];
            for t in start..(start + CHUNK).min(trials) {
                let mut r = streams.trial(t);
                let inst = sample_hard_instance(n, m, &mut r)?;
                let g = solver.solve(&inst, &mut r)?;
                let ok = g.bit == inst.b;
                c[0] += ok as u64;
                c[1] += g.learned as u64;
                c[2] += (g.learned && ok) as u64;
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = counts.iter().fold([0u64; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    Ok(SuccessReport::from_counts(trials, total[0], total[1], total[2]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverageMode {
    Exact,
    MonteCarlo { trials: u64 },
}

/// Probability that a uniform `d`-subset of `[n]` contains both endpoints of
/// some edge of a uniform `M ∈ ℳ_{n,m}`.
pub fn covered_edge_prob(n: usize, m: usize, d: usize, mode: CoverageMode, rng: &mut SeededRng) -> Result<f64> {
    match mode {
        CoverageMode::Exact => Ok(covered_edge_prob_exact(n, m, d)?
            .to_f64()
            .expect("probability is finite")),
        CoverageMode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::Validation("Monte Carlo mode needs trials ≥ 1".into()));
            }
            check_coverage_args(n, m, d)?;
            let streams = rng.trial_streams();
            let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
            let hits: u64 = starts
                .par_iter()
                .map(|&start| {
                    (start..(start + CHUNK).min(trials))
                        .filter(|&t| {
                            let mut r = streams.trial(t);
                            let mm = sample_matching(n, m, &mut r).expect("shape checked");
                            let mut inside = vec![false; n];
                            for i in index::sample(&mut r, n, d) {
                                inside[i] = true;
                            }
                            mm.pairs().iter().any(|&(i, j)| inside[i] && inside[j])
                        })
                        .count() as u64
                })
                .collect::<Vec<_>>()
                .iter()
                .sum();
            Ok(hits as f64 / trials as f64)
        }
    }
}

fn check_coverage_args(n: usize, m: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::Domain(format!("subset size {d} exceeds n = {n}")));
    }
    if 2 * m > n {
        return Err(Error::Domain(format!("{m} edges need 2m ≤ n = {n}")));
    }
    Ok(())
}

/// Exact coverage probability. By symmetry one side can be fixed: either the
/// subset is `{0, …, d−1}` and matchings are enumerated, or the matching is
/// `{(0,1), (2,3), …}` and subsets are enumerated, whichever family is
/// smaller.
pub fn covered_edge_prob_exact(n: usize, m: usize, d: usize) -> Result<BigRational> {
    check_coverage_args(n, m, d)?;
    let matchings = count_matchings(n, m)?;
    let subsets = binomial(n as u64, d as u64);
    let cap = BigUint::from(DEFAULT_ENUMERATION_CAP);
    let frac = |hits: u64, total: BigUint| BigRational::new(BigInt::from(hits), BigInt::from(total));
    if matchings <= subsets && matchings <= cap {
        let hits = enumerate_matchings_capped(n, m, DEFAULT_ENUMERATION_CAP)?
            .filter(|mm| mm.pairs().iter().any(|&(_, j)| j < d))
            .count() as u64;
        Ok(frac(hits, matchings))
    } else if subsets <= cap && n < 64 {
        let edges: Vec<u64> = (0..m).map(|l| 0b11u64 << (2 * l)).collect();
        let hits = subsets_of_size(n, d)
            .filter(|s| edges.iter().any(|e| s & e == *e))
            .count() as u64;
        Ok(frac(hits, subsets))
    } else if m == 0 {
        Ok(BigRational::zero())
    } else {
        Err(Error::Resource(format!(
            "exact coverage at n = {n}, m = {m}, d = {d} needs {matchings} matchings or {subsets} subsets; use Monte Carlo mode"
        )))
    }
}

/// All `d`-subsets of `[n]` as bitmasks in increasing order (Gosper's hack).
fn subsets_of_size(n: usize, d: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if d == 0 { 0 } else { (1u64 << d) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}
