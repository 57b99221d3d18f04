use apm_lab::analysis::{conditional_dist, l2_dist_sq, matching_hit_prob, pm_spectrum_via_f, tvd, Distribution, SubsetA};
use apm_lab::matching::{count_matchings, enumerate_matchings, sample_matching};
use apm_lab::qsim::make_fingerprint_state;
use apm_lab::spectral::{fwht, inverse_fwht, CubeFunction};
use apm_lab::{BitString, Matching, SeededRng};
use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

/// (n, m, matching seed)
fn instance() -> impl Strategy<Value = (usize, Matching)> {
    (2usize..=12)
        .prop_flat_map(|n| (Just(n), 0..=n / 2, any::<u64>()))
        .prop_map(|(n, m, seed)| (n, sample_matching(n, m, &mut SeededRng::new(seed, 0)).unwrap()))
}

fn bits(n: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), n).prop_map(BitString::from_bits)
}

proptest! {
    #[test]
    fn extractor_is_linear(((n, mm), seed) in (instance(), any::<u64>())) {
        let mut r = SeededRng::new(seed, 1);
        let x = BitString::from_bits((0..n).map(|_| r.coin()));
        let y = BitString::from_bits((0..n).map(|_| r.coin()));
        let lhs = mm.extract(&x.xor(&y).unwrap()).unwrap();
        let rhs = mm.extract(&x).unwrap().xor(&mm.extract(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // Flipping every input bit leaves every edge parity unchanged.
        prop_assert_eq!(mm.extract(&x.complement()).unwrap(), mm.extract(&x).unwrap());
    }

    #[test]
    fn transpose_is_adjoint(((n, mm), seed) in (instance(), any::<u64>())) {
        let mut r = SeededRng::new(seed, 2);
        let x = BitString::from_bits((0..n).map(|_| r.coin()));
        let s = BitString::from_bits((0..mm.len()).map(|_| r.coin()));
        let ts = mm.transpose_apply(&s).unwrap();
        prop_assert_eq!(x.dot(&ts).unwrap(), mm.extract(&x).unwrap().dot(&s).unwrap());
        prop_assert_eq!(ts.weight(), 2 * s.weight());
    }

    #[test]
    fn bitstring_text_roundtrip(x in (0usize..100).prop_flat_map(bits)) {
        prop_assert_eq!(x.to_string().parse::<BitString>().unwrap(), x);
    }

    #[test]
    fn parseval_and_inverse(n in 0usize..=12, seed in any::<u64>()) {
        let mut r = SeededRng::new(seed, 3);
        let f = CubeFunction::from_fn(n, |_| 2.0 * r.unit() - 1.0).unwrap();
        let spec = fwht(f.clone());
        let rel = (spec.energy() - f.norm_sq()).abs() / f.norm_sq().max(1e-300);
        prop_assert!(rel < 1e-12);
        let back = inverse_fwht(spec);
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_path_matches_counting(((n, mm), seed) in (instance(), any::<u64>())) {
        let mut r = SeededRng::new(seed, 4);
        let a = SubsetA::from_predicate(n, |_| r.coin()).or_else(|_| SubsetA::full(n)).unwrap();
        let p = conditional_dist(&a, &mm).unwrap();
        let via_f = pm_spectrum_via_f(&a, &mm).unwrap();
        let direct = fwht(p.to_cube_function());
        for (x, y) in via_f.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        // Cauchy–Schwarz between the two distances.
        let u = Distribution::uniform(mm.len());
        let t = tvd(&p, &u).unwrap();
        let l2 = l2_dist_sq(&p, &u).unwrap();
        prop_assert!(t * t <= (1u64 << (2 * mm.len())) as f64 * l2 * (1.0 + 1e-12) + 1e-15);
        prop_assert!((0.0..=2.0).contains(&t));
    }

    #[test]
    fn fingerprint_is_normalized(x in (1usize..=64).prop_flat_map(bits)) {
        let s = make_fingerprint_state(&x).unwrap();
        prop_assert!((s.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_matchings_are_valid((n, mm) in instance()) {
        let mut seen = vec![false; n];
        for &(i, j) in mm.pairs() {
            prop_assert!(i < j && j < n);
            prop_assert!(!seen[i] && !seen[j]);
            seen[i] = true;
            seen[j] = true;
        }
    }
}

#[test]
fn enumeration_count_agrees_with_formula() {
    for n in 0..=10 {
        for m in 0..=n / 2 {
            let got = enumerate_matchings(n, m).unwrap().count();
            assert_eq!(BigUint::from(got), count_matchings(n, m).unwrap(), "n={n} m={m}");
        }
    }
}

#[test]
fn hit_probability_matches_enumeration_for_first_k() {
    // v = first k coordinates; by symmetry this is every weight-k v.
    for n in 2..=10usize {
        for m in 0..=n / 2 {
            let ms: Vec<Matching> = enumerate_matchings(n, m).unwrap().collect();
            for k in 0..=n {
                let v = (1u64 << k) - 1;
                let hits = ms
                    .iter()
                    .filter(|mm| (0..1u64 << m).any(|s| mm.transpose_index(s) == v))
                    .count();
                let got = BigRational::new(hits.into(), ms.len().into());
                assert_eq!(got, matching_hit_prob(n, m, k).unwrap(), "n={n} m={m} k={k}");
            }
        }
    }
}
