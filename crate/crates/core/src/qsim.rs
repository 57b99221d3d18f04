//! Statevector simulation over the index space `[n]`.
//!
//! `log n` qubits are modeled as an `n`-dimensional complex vector with no
//! padding to a power of two. Measurements sample by inverse CDF on the
//! exactly computed outcome probabilities and renormalize after collapse.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::rng::SeededRng;

/// Amplitudes below this magnitude count as outside the support.
const SUPPORT_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Normalizes `amps`; rejects the zero vector.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let mut s = QuantumState { amps };
        s.renormalize()?;
        Ok(s)
    }

    /// `(1/√n) Σ_i |i⟩`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("state space needs n ≥ 1".into()));
        }
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(QuantumState { amps: vec![a; n] })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.amps.len())
            .filter(|&i| self.amps[i].norm() > SUPPORT_EPS)
            .collect()
    }

    /// `|i⟩ ↦ −|i⟩`.
    pub fn phase_flip(&mut self, i: usize) {
        self.amps[i] = -self.amps[i];
    }

    fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sq().sqrt();
        if norm <= SUPPORT_EPS || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(())
    }

    /// Projects onto the span of `keep` and renormalizes.
    fn project(&mut self, keep: impl Fn(usize) -> bool) -> Result<()> {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if !keep(i) {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.renormalize()
    }
}

/// Index of the outcome selected by `u ∈ [0, 1)` under `probs`, skipping
/// zero-probability outcomes.
fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = k;
        acc += p;
        if target < acc {
            return k;
        }
    }
    last
}

/// `(1/√n) Σ_i (−1)^{x_i} |i⟩`.
pub fn make_fingerprint_state(x: &BitString) -> Result<QuantumState> {
    let mut s = QuantumState::uniform(x.len())?;
    for i in x.ones_positions() {
        s.phase_flip(i);
    }
    Ok(s)
}

/// Born probability of each edge of a perfect matching.
pub fn matching_outcome_probs(state: &QuantumState, p: &Matching) -> Vec<f64> {
    p.pairs()
        .iter()
        .map(|&(i, j)| state.amps[i].norm_sqr() + state.amps[j].norm_sqr())
        .collect()
}

/// Measures with the `n/2` two-dimensional projectors of a perfect matching.
/// Returns the edge index and the state collapsed onto that edge.
pub fn measure_matching(
    state: &QuantumState,
    p: &Matching,
    rng: &mut SeededRng,
) -> Result<(usize, QuantumState)> {
    if p.n() != state.dim() {
        return Err(Error::Dimension(format!(
            "matching on {} vertices vs {}-dimensional state",
            p.n(),
            state.dim()
        )));
    }
    if !p.is_perfect() {
        return Err(Error::Domain("matching measurement needs a perfect matching".into()));
    }
    let probs = matching_outcome_probs(state, p);
    let edge = inverse_cdf(&probs, rng.unit());
    let (i, j) = p.pairs()[edge];
    let mut collapsed = state.clone();
    collapsed.project(|k| k == i || k == j)?;
    Ok((edge, collapsed))
}

/// Readout of a state supported on `{i, j}` in the basis
/// `(|i⟩ ± |j⟩)/√2`: 0 for `+`, 1 for `−`. Deterministic when the two
/// amplitudes have relative phase ±1.
pub fn measure_pm_basis(state: &QuantumState, rng: &mut SeededRng) -> Result<bool> {
    let support = state.support();
    let &[i, j] = support.as_slice() else {
        return Err(Error::Domain(format!(
            "± readout needs support on exactly two indices, found {}",
            support.len()
        )));
    };
    let (a, b) = (state.amps[i], state.amps[j]);
    let p_plus = (a + b).norm_sqr() / 2.0;
    let p_plus = p_plus / (a.norm_sqr() + b.norm_sqr());
    if p_plus >= 1.0 - 1e-12 {
        Ok(false)
    } else if p_plus <= 1e-12 {
        Ok(true)
    } else {
        Ok(rng.unit() >= p_plus)
    }
}

/// Edge index `ℓ` of `M` and the learned parity `z_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LearnedBit {
    pub edge: usize,
    pub bit: bool,
}

/// One run of the one-way protocol: Alice sends the fingerprint of `x`, Bob
/// completes `M` to a perfect matching, measures, and reads out the parity if
/// the outcome is one of his own edges.
pub fn run_quantum_message_protocol(
    x: &BitString,
    mm: &Matching,
    rng: &mut SeededRng,
) -> Result<Option<LearnedBit>> {
    if x.len() % 2 != 0 {
        return Err(Error::Domain(format!("protocol needs even n, got {}", x.len())));
    }
    if mm.n() != x.len() {
        return Err(Error::Dimension(format!(
            "matching on {} vertices vs {}-bit input",
            mm.n(),
            x.len()
        )));
    }
    let state = make_fingerprint_state(x)?;
    let completed = mm.complete()?;
    let (edge, collapsed) = measure_matching(&state, &completed, rng)?;
    let Some(l) = mm.position(completed.pairs()[edge]) else {
        return Ok(None);
    };
    let bit = measure_pm_basis(&collapsed, rng)?;
    Ok(Some(LearnedBit { edge: l, bit }))
}

/// One item of the input stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamEvent {
    /// `x_i = v`
    Bit { i: usize, v: bool },
    /// Edge `(i, j)` of Bob's matching.
    Edge { i: usize, j: usize },
    /// Promise bit `w_ℓ = v` for the edge `(i, j)`.
    PromiseBit { i: usize, j: usize, v: bool },
}

impl fmt::Display for StreamEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StreamEvent::Bit { i, v } => write!(f, "b {i} {}", v as u8),
            StreamEvent::Edge { i, j } => write!(f, "e {i} {j}"),
            StreamEvent::PromiseBit { i, j, v } => write!(f, "w {i} {j} {}", v as u8),
        }
    }
}

impl FromStr for StreamEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index {t:?} in event {line:?}")))
        };
        let bit = |t: &str| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::Parse(format!("bad bit {t:?} in event {line:?}"))),
        };
        match toks.as_slice() {
            ["b", i, v] => Ok(StreamEvent::Bit { i: num(i)?, v: bit(v)? }),
            ["e", i, j] => Ok(StreamEvent::Edge { i: num(i)?, j: num(j)? }),
            ["w", i, j, v] => Ok(StreamEvent::PromiseBit { i: num(i)?, j: num(j)?, v: bit(v)? }),
            _ => Err(Error::Parse(format!("unrecognized stream event {line:?}"))),
        }
    }
}

/// Stream file: one event per line, `#` comments and blank lines skipped.
pub fn parse_stream(text: &str) -> Result<Vec<StreamEvent>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

pub fn format_stream(events: &[StreamEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

fn canon(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Checks the stream describes one input `x`, one matching and one promise
/// string: indices in range, each bit once, edges disjoint and unique, and
/// every promise bit attached to an edge of the stream.
pub fn validate_stream(n: usize, events: &[StreamEvent]) -> Result<Matching> {
    let bad = |msg: String| Err(Error::Validation(msg));
    let mut bits = HashSet::new();
    let mut edges = Vec::new();
    let mut promised = HashSet::new();
    for e in events {
        match *e {
            StreamEvent::Bit { i, .. } => {
                if i >= n {
                    return bad(format!("bit index {i} out of range for n = {n}"));
                }
                if !bits.insert(i) {
                    return bad(format!("bit x_{i} streamed twice"));
                }
            }
            StreamEvent::Edge { i, j } => edges.push((i, j)),
            StreamEvent::PromiseBit { i, j, .. } => {
                if !promised.insert(canon(i, j)) {
                    return bad(format!("promise bit for edge ({i}, {j}) streamed twice"));
                }
            }
        }
    }
    let mm = Matching::new(n, edges.iter().copied())?;
    if let Some(&(i, j)) = promised.iter().find(|&&e| mm.position(e).is_none()) {
        return bad(format!("promise bit for ({i}, {j}) which is not a streamed edge"));
    }
    Ok(mm)
}

/// Outcome of a streaming run that caught an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamOutcome {
    pub edge: (usize, usize),
    /// `x_i ⊕ x_j ⊕ w_ℓ` for the caught edge.
    pub bit: bool,
}

/// Simulates the `log n`-qubit streaming algorithm. Events may arrive in any
/// order; `None` means no edge measurement fired.
pub fn run_streaming(
    n: usize,
    events: &[StreamEvent],
    rng: &mut SeededRng,
) -> Result<Option<StreamOutcome>> {
    validate_stream(n, events)?;
    let mut state = QuantumState::uniform(n)?;
    let mut caught = None;
    for e in events {
        match *e {
            StreamEvent::Bit { i, v } => {
                if v {
                    state.phase_flip(i);
                }
            }
            StreamEvent::PromiseBit { i, j, v } => {
                if v {
                    state.phase_flip(i.min(j));
                }
            }
            StreamEvent::Edge { i, j } => {
                let p1 = state.amps[i].norm_sqr() + state.amps[j].norm_sqr();
                if p1 <= SUPPORT_EPS {
                    continue;
                }
                let fired = p1 >= 1.0 - SUPPORT_EPS || rng.unit() < p1;
                if fired {
                    state.project(|k| k == i || k == j)?;
                    caught = Some(canon(i, j));
                } else {
                    state.project(|k| k != i && k != j)?;
                }
            }
        }
    }
    match caught {
        Some(edge) => Ok(Some(StreamOutcome {
            edge,
            bit: measure_pm_basis(&state, rng)?,
        })),
        None => Ok(None),
    }
}

/// The full event stream of an instance `(x, M, w)`, in canonical order:
/// bits, then edges, then promise bits.
pub fn instance_events(x: &BitString, mm: &Matching, w: &BitString) -> Result<Vec<StreamEvent>> {
    if w.len() != mm.len() {
        return Err(Error::Dimension(format!(
            "promise string has {} bits for {} edges",
            w.len(),
            mm.len()
        )));
    }
    let mut ev: Vec<StreamEvent> = x.iter().enumerate().map(|(i, v)| StreamEvent::Bit { i, v }).collect();
    ev.extend(mm.pairs().iter().map(|&(i, j)| StreamEvent::Edge { i, j }));
    ev.extend(
        mm.pairs()
            .iter()
            .enumerate()
            .map(|(l, &(i, j))| StreamEvent::PromiseBit { i, j, v: w.get(l) }),
    );
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn m(s: &str) -> Matching {
        s.parse().unwrap()
    }

    #[test]
    fn fingerprint_examples() {
        let s = make_fingerprint_state(&bits("0000")).unwrap();
        assert!(s.amps().iter().all(|a| (a.re - 0.5).abs() < 1e-15 && a.im == 0.0));
        let s = make_fingerprint_state(&bits("10")).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.amps()[0].re + h).abs() < 1e-15 && (s.amps()[1].re - h).abs() < 1e-15);
        let s = make_fingerprint_state(&bits("1101001")).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        assert!(make_fingerprint_state(&BitString::zeros(0)).is_err());
    }

    #[test]
    fn matching_probabilities_on_fingerprints() {
        let x = bits("10110010");
        let s = make_fingerprint_state(&x).unwrap();
        let p = m("8:0 5;1 2;3 7;4 6");
        for pr in matching_outcome_probs(&s, &p) {
            assert!((pr - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn collapse_keeps_edge_phases() {
        let x = bits("10110010");
        let s = make_fingerprint_state(&x).unwrap();
        let p = m("8:0 5;1 2;3 7;4 6");
        let mut rng = SeededRng::new(1, 0);
        for _ in 0..50 {
            let (edge, c) = measure_matching(&s, &p, &mut rng).unwrap();
            let (i, j) = p.pairs()[edge];
            assert!((c.norm_sq() - 1.0).abs() < 1e-12);
            assert_eq!(c.support(), vec![i, j]);
            let h = 1.0 / 2f64.sqrt();
            let sign = |b: bool| if b { -h } else { h };
            assert!((c.amps()[i].re - sign(x.get(i))).abs() < 1e-12);
            assert!((c.amps()[j].re - sign(x.get(j))).abs() < 1e-12);
            assert_eq!(measure_pm_basis(&c, &mut rng).unwrap(), x.get(i) ^ x.get(j));
        }
        assert!(measure_matching(&s, &m("8:0 1"), &mut rng).is_err());
    }

    #[test]
    fn pm_readout() {
        let mut rng = SeededRng::new(2, 0);
        let h = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        let plus = QuantumState::new(vec![z, h, z, h]).unwrap();
        let minus = QuantumState::new(vec![z, h, z, -h]).unwrap();
        assert!(!measure_pm_basis(&plus, &mut rng).unwrap());
        assert!(measure_pm_basis(&minus, &mut rng).unwrap());
        let three = QuantumState::uniform(3).unwrap();
        assert!(measure_pm_basis(&three, &mut rng).is_err());
        // |i⟩ alone: support of one index
        let one = QuantumState::new(vec![h, z]).unwrap();
        assert!(measure_pm_basis(&one, &mut rng).is_err());
        // relative phase i: each outcome with probability 1/2
        let i_phase = QuantumState::new(vec![h, Complex64::new(0.0, h.re)]).unwrap();
        let ones = (0..20_000).filter(|_| measure_pm_basis(&i_phase, &mut rng).unwrap()).count();
        assert!((ones as f64 / 20_000.0 - 0.5).abs() < 0.015);
    }

    #[test]
    fn perfect_matching_always_learns() {
        let mut rng = SeededRng::new(3, 0);
        let x = bits("011010");
        let mm = m("6:0 3;1 4;2 5");
        let z = mm.extract(&x).unwrap();
        for _ in 0..200 {
            let got = run_quantum_message_protocol(&x, &mm, &mut rng).unwrap().unwrap();
            assert_eq!(got.bit, z.get(got.edge));
        }
        assert!(run_quantum_message_protocol(&bits("01101"), &m("5:0 1"), &mut rng).is_err());
    }

    #[test]
    fn stream_event_text() {
        let ev = parse_stream("# demo\nb 3 1\ne 0 2\nw 2 0 1\n").unwrap();
        assert_eq!(
            ev,
            vec![
                StreamEvent::Bit { i: 3, v: true },
                StreamEvent::Edge { i: 0, j: 2 },
                StreamEvent::PromiseBit { i: 2, j: 0, v: true },
            ]
        );
        assert_eq!(format_stream(&ev), "b 3 1\ne 0 2\nw 2 0 1\n");
        assert!(parse_stream("x 1 2").is_err());
        assert!(parse_stream("b 1 2").is_err());
    }

    #[test]
    fn stream_validation() {
        let ok = parse_stream("b 0 1\ne 0 1\nw 1 0 0").unwrap();
        assert!(validate_stream(4, &ok).is_ok());
        for bad in ["b 0 1\nb 0 0", "b 4 1", "e 0 1\ne 1 2", "e 0 1\ne 1 0", "w 0 1 1", "e 0 1\nw 0 1 0\nw 1 0 1"] {
            let ev = parse_stream(bad).unwrap();
            assert!(validate_stream(4, &ev).is_err(), "{bad}");
        }
    }

    #[test]
    fn all_zero_stream_reads_zero() {
        let mut rng = SeededRng::new(4, 0);
        let x = BitString::zeros(8);
        let mm = m("8:0 6;2 3");
        let w = BitString::zeros(2);
        let mut ev = instance_events(&x, &mm, &w).unwrap();
        ev.reverse();
        let mut present = 0;
        for _ in 0..500 {
            if let Some(o) = run_streaming(8, &ev, &mut rng).unwrap() {
                assert!(!o.bit);
                present += 1;
            }
        }
        assert!(present > 150 && present < 350);
    }
}
