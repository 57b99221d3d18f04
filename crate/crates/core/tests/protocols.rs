use apm_lab::adversary::{classical_advantage_exact, quantum_adversary_trial, AttackMode, MemorySpec};
use apm_lab::protocols::{estimate_success, sample_hard_instance, Solver};
use apm_lab::SeededRng;

const TRIALS: u64 = 100_000;

fn sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn hard_instances_keep_the_promise_and_balance_b() {
    let streams = SeededRng::new(1, 0).trial_streams();
    let mut ones = 0u64;
    for t in 0..TRIALS {
        let inst = sample_hard_instance(10, 3, &mut streams.trial(t)).unwrap();
        assert!(inst.satisfies_promise());
        ones += inst.b as u64;
    }
    let rate = ones as f64 / TRIALS as f64;
    assert!((rate - 0.5).abs() <= 3.0 * sigma(0.5, TRIALS), "{rate}");
}

#[test]
fn one_fingerprint_beats_short_classical_messages() {
    let mut rng = SeededRng::new(2, 0);
    let q = estimate_success(Solver::Quantum { copies: 1 }, 16, 4, TRIALS, &mut rng).unwrap();
    assert_eq!(q.learned, q.conditional_correct);
    for d in 0..=2 {
        let c = estimate_success(Solver::Classical { d }, 16, 4, TRIALS, &mut rng).unwrap();
        let gap = q.rate - c.rate;
        let s = (q.stderr.powi(2) + c.stderr.powi(2)).sqrt();
        assert!(gap > 3.0 * s, "d={d}: quantum {} vs classical {}", q.rate, c.rate);
        assert_eq!(c.learned, c.conditional_correct);
    }
}

#[test]
fn many_copies_almost_always_succeed() {
    for (n, m) in [(8usize, 2usize), (16, 1)] {
        let alpha = m as f64 / n as f64;
        let t = ((4.0 / (2.0 * alpha)).ceil() * 100f64.ln()).ceil() as usize;
        let r = estimate_success(Solver::Quantum { copies: t }, n, m, 20_000, &mut SeededRng::new(3, 0)).unwrap();
        assert!(r.rate >= 0.99, "n={n} m={m} t={t}: {}", r.rate);
    }
}

#[test]
fn quantum_advantage_does_not_shrink_with_n() {
    for n in (2..=16usize).step_by(2) {
        let m = (n / 4).max(1);
        let alpha = m as f64 / n as f64;
        let r = quantum_adversary_trial(n, m, AttackMode::Apm, TRIALS, &mut SeededRng::new(4, n as u64)).unwrap();
        assert!(r.rate - 0.5 >= alpha - 3.0 * r.stderr, "n={n} m={m}: {}", r.rate);
    }
}

#[test]
fn real_vs_uniform_rate() {
    let r = quantum_adversary_trial(8, 2, AttackMode::RealVsUniform, TRIALS, &mut SeededRng::new(5, 0)).unwrap();
    assert!((r.rate - 0.625).abs() <= 3.0 * sigma(0.625, TRIALS), "{}", r.rate);
}

#[test]
fn classical_advantage_decays_with_n() {
    // Fixed m: with m = ⌊n/4⌋ the edge density wobbles and so does the table.
    for c in [2usize, 3] {
        let table: Vec<f64> = [8usize, 10, 12, 14]
            .iter()
            .map(|&n| classical_advantage_exact(&MemorySpec::FirstBits(c), n, 2).unwrap())
            .collect();
        for w in table.windows(2) {
            assert!(w[1] < w[0], "c={c}: {table:?}");
        }
    }
}
