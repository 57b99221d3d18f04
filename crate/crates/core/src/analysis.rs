//! How far `z = Mx` is from uniform when `x` is uniform on a set `A`.
//!
//! For a fixed matching `M` Bob's view of `z` is the conditional distribution
//! `p_M(z) = |{x ∈ A : Mx = z}| / |A|`. This module computes `p_M` by counting,
//! its total variation distance from uniform (the factor-2-free convention,
//! range `[0, 2]`, so one-sample distinguishing succeeds with probability
//! `1/2 + tvd/4`), the same spectrum via the Fourier coefficients of the
//! indicator of `A`, and the average `E_M ‖p_M − U‖` exactly or by sampling.
//!
//! Averages are reduced with fixed-order pairwise summation over fixed-size
//! chunks, so results are bit-identical across thread counts.

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::index;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{dim_check, Error, Result};
use crate::matching::{binomial, enumerate_matchings, sample_matching, Matching};
use crate::rng::SeededRng;
use crate::spectral::{fwht, level_weight, CubeFunction, Spectrum, MAX_DIM};

const CHUNK: usize = 1024;

/// Probability vector over `{0,1}^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    m: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(m: usize, probs: Vec<f64>) -> Result<Self> {
        if m > MAX_DIM {
            return Err(Error::Domain(format!("outcome length {m} exceeds {MAX_DIM}")));
        }
        dim_check("probability vector length", 1 << m, probs.len())?;
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Validation("negative or NaN probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { m, probs })
    }

    pub fn uniform(m: usize) -> Self {
        let len = 1usize << m;
        Distribution {
            m,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn point_mass(m: usize, z: u64) -> Self {
        let mut probs = vec![0.0; 1 << m];
        probs[z as usize] = 1.0;
        Distribution { m, probs }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Lifts to a cube function for spectral analysis.
    pub fn to_cube_function(&self) -> CubeFunction {
        CubeFunction::new(self.m, self.probs.clone()).expect("length checked on construction")
    }
}

/// `Σ_z |p(z) − q(z)|`, in `[0, 2]`.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64> {
    dim_check("distribution outcome length", p.m, q.m)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Averaged squared distance `‖p − q‖₂² = 2^{-m} Σ_z (p(z) − q(z))²`.
pub fn l2_dist_sq(p: &Distribution, q: &Distribution) -> Result<f64> {
    dim_check("distribution outcome length", p.m, q.m)?;
    let s: f64 = p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(s / p.probs.len() as f64)
}

/// A nonempty set `A ⊆ {0,1}^n` of packed cube points, sorted and unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetA {
    n: usize,
    members: Vec<u64>,
}

impl SubsetA {
    pub fn new(n: usize, mut members: Vec<u64>) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Domain(format!("set dimension {n} exceeds {MAX_DIM}")));
        }
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::Domain("the set A must be nonempty".into()));
        }
        if let Some(&x) = members.iter().find(|&&x| x >> n != 0) {
            return Err(Error::Dimension(format!("point {x} outside the {n}-cube")));
        }
        Ok(SubsetA { n, members })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_predicate(n, |_| true)
    }

    pub fn from_predicate(n: usize, mut keep: impl FnMut(u64) -> bool) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Domain(format!("set dimension {n} exceeds {MAX_DIM}")));
        }
        Self::new(n, (0..1u64 << n).filter(|&x| keep(x)).collect())
    }

    pub fn from_bitstrings<'a>(n: usize, xs: impl IntoIterator<Item = &'a BitString>) -> Result<Self> {
        let mut members = Vec::new();
        for x in xs {
            dim_check("set member length", n, x.len())?;
            members.push(x.to_index()?);
        }
        Self::new(n, members)
    }

    /// Set file: one bitstring per line; blank lines and `#` comments skipped.
    pub fn parse_set_file(text: &str) -> Result<Self> {
        let rows: Vec<BitString> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        let n = rows
            .first()
            .map(BitString::len)
            .ok_or_else(|| Error::Domain("set file lists no members".into()))?;
        Self::from_bitstrings(n, &rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Entropy deficit `c = n − log₂ |A|`.
    pub fn deficit(&self) -> f64 {
        self.n as f64 - (self.members.len() as f64).log2()
    }

    pub fn indicator(&self) -> CubeFunction {
        CubeFunction::indicator(self.n, self.members.iter().copied())
            .expect("members validated on construction")
    }
}

fn check_pair(a: &SubsetA, mm: &Matching) -> Result<()> {
    dim_check("set dimension vs matching vertex count", a.n, mm.n())?;
    if mm.len() > MAX_DIM {
        return Err(Error::Domain(format!("{} edges exceed {MAX_DIM}", mm.len())));
    }
    Ok(())
}

fn fill_counts(a: &SubsetA, mm: &Matching, counts: &mut [u64]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for &x in &a.members {
        counts[mm.extract_index(x) as usize] += 1;
    }
}

/// `p_M(z) = |{x ∈ A : Mx = z}| / |A|`.
pub fn conditional_dist(a: &SubsetA, mm: &Matching) -> Result<Distribution> {
    check_pair(a, mm)?;
    let mut counts = vec![0u64; 1 << mm.len()];
    fill_counts(a, mm, &mut counts);
    let size = a.len() as f64;
    Ok(Distribution {
        m: mm.len(),
        probs: counts.iter().map(|&c| c as f64 / size).collect(),
    })
}

/// `(‖p_M − U‖_tvd, ‖p_M − U‖₂²)` straight from the counts.
fn distances_from_counts(counts: &[u64], size: usize) -> (f64, f64) {
    let u = 1.0 / counts.len() as f64;
    let size = size as f64;
    let mut tv = 0.0;
    let mut l2 = 0.0;
    for &c in counts {
        let d = c as f64 / size - u;
        tv += d.abs();
        l2 += d * d;
    }
    (tv, l2 / counts.len() as f64)
}

/// Cauchy–Schwarz: `tvd² ≤ 2^{2m} ‖p − U‖₂²`.
fn cauchy_schwarz_holds(tv: f64, l2: f64, m: usize) -> bool {
    let bound = (1u64 << (2 * m)) as f64 * l2;
    tv * tv <= bound * (1.0 + 1e-12) + 1e-15
}

/// Spectrum of `p_M` obtained from `f̂ = fwht(1_A)`:
/// `p̂_M(s) = 2^n / (|A| 2^m) · f̂(Mᵀs)`.
pub fn pm_spectrum_via_f(a: &SubsetA, mm: &Matching) -> Result<Spectrum> {
    check_pair(a, mm)?;
    let f_hat = fwht(a.indicator());
    pm_spectrum_from_indicator_spectrum(&f_hat, a.len(), mm)
}

/// As [`pm_spectrum_via_f`] with a precomputed `fwht(1_A)`.
pub fn pm_spectrum_from_indicator_spectrum(
    f_hat: &Spectrum,
    set_size: usize,
    mm: &Matching,
) -> Result<Spectrum> {
    dim_check("spectrum dimension vs matching vertex count", f_hat.dim(), mm.n())?;
    let m = mm.len();
    let scale = (1u64 << f_hat.dim()) as f64 / (set_size as f64 * (1u64 << m) as f64);
    let coeffs = (0..1u64 << m)
        .map(|s| scale * f_hat.coeff(mm.transpose_index(s)))
        .collect();
    Spectrum::new(m, coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Average over every matching in `ℳ_{n,m}`.
    Exact,
    /// Average over this many uniformly sampled matchings.
    MonteCarlo { trials: u64 },
}

impl OracleMode {
    pub fn name(&self) -> &'static str {
        match self {
            OracleMode::Exact => "exact",
            OracleMode::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Summary of `E_M ‖p_M − U‖_tvd`.
#[derive(Clone, Debug, PartialEq)]
pub struct TvdReport {
    pub mean: f64,
    /// `E_M ‖p_M − U‖²_tvd`
    pub mean_sq: f64,
    /// Standard error of `mean`; zero in exact mode.
    pub stderr: f64,
    pub mode: OracleMode,
    pub matchings_evaluated: u64,
    /// Evaluations where `tvd² ≤ 2^{2m} ‖p − U‖₂²` failed. Always zero unless
    /// something is badly wrong.
    pub cauchy_schwarz_violations: u64,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    tv: f64,
    tv_sq: f64,
    count: u64,
    violations: u64,
}

fn reduce_chunk(samples: &[(f64, f64)], m: usize) -> Partial {
    let tv: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let sq: Vec<f64> = samples.iter().map(|s| s.0 * s.0).collect();
    Partial {
        tv: pairwise_sum(&tv),
        tv_sq: pairwise_sum(&sq),
        count: samples.len() as u64,
        violations: samples
            .iter()
            .filter(|(t, l)| !cauchy_schwarz_holds(*t, *l, m))
            .count() as u64,
    }
}

fn combine(parts: &[Partial]) -> Partial {
    let tv: Vec<f64> = parts.iter().map(|p| p.tv).collect();
    let sq: Vec<f64> = parts.iter().map(|p| p.tv_sq).collect();
    Partial {
        tv: pairwise_sum(&tv),
        tv_sq: pairwise_sum(&sq),
        count: parts.iter().map(|p| p.count).sum(),
        violations: parts.iter().map(|p| p.violations).sum(),
    }
}

/// `E_M ‖p_M − U‖_tvd` for `x` uniform on `A` and `M` uniform on `ℳ_{n,m}`.
pub fn expected_tvd(a: &SubsetA, m: usize, mode: OracleMode, rng: &mut SeededRng) -> Result<TvdReport> {
    if 2 * m > a.n {
        return Err(Error::Domain(format!("{m} edges need 2m ≤ n = {}", a.n)));
    }
    if m > MAX_DIM {
        return Err(Error::Domain(format!("{m} edges exceed {MAX_DIM}")));
    }
    let eval = |mm: &Matching, counts: &mut Vec<u64>| {
        fill_counts(a, mm, counts);
        distances_from_counts(counts, a.len())
    };
    let total = match mode {
        OracleMode::Exact => {
            let mut iter = enumerate_matchings(a.n, m)?;
            let mut parts = Vec::new();
            loop {
                let chunk: Vec<Matching> = iter.by_ref().take(CHUNK * 16).collect();
                if chunk.is_empty() {
                    break;
                }
                let chunk_parts: Vec<Partial> = chunk
                    .par_chunks(CHUNK)
                    .map_init(
                        || vec![0u64; 1 << m],
                        |counts, ms| {
                            let samples: Vec<(f64, f64)> = ms.iter().map(|mm| eval(mm, counts)).collect();
                            reduce_chunk(&samples, m)
                        },
                    )
                    .collect();
                parts.extend(chunk_parts);
            }
            combine(&parts)
        }
        OracleMode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::Validation("Monte Carlo mode needs trials ≥ 1".into()));
            }
            let streams = rng.trial_streams();
            let n = a.n;
            let starts: Vec<u64> = (0..trials).step_by(CHUNK).collect();
            let parts: Vec<Partial> = starts
                .par_iter()
                .map_init(
                    || vec![0u64; 1 << m],
                    |counts, &start| {
                        let end = (start + CHUNK as u64).min(trials);
                        let samples: Vec<(f64, f64)> = (start..end)
                            .map(|t| {
                                let mm = sample_matching(n, m, &mut streams.trial(t))
                                    .expect("shape checked above");
                                eval(&mm, counts)
                            })
                            .collect();
                        reduce_chunk(&samples, m)
                    },
                )
                .collect();
            combine(&parts)
        }
    };
    let count = total.count as f64;
    let mean = total.tv / count;
    let mean_sq = total.tv_sq / count;
    let stderr = match mode {
        OracleMode::Exact => 0.0,
        OracleMode::MonteCarlo { .. } if total.count > 1 => {
            let var = ((total.tv_sq - count * mean * mean) / (count - 1.0)).max(0.0);
            (var / count).sqrt()
        }
        OracleMode::MonteCarlo { .. } => 0.0,
    };
    Ok(TvdReport {
        mean,
        mean_sq: mean_sq.max(mean * mean),
        stderr,
        mode,
        matchings_evaluated: total.count,
        cauchy_schwarz_violations: total.violations,
    })
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

fn ratio(num: num_bigint::BigUint, den: num_bigint::BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Probability over uniform `M ∈ ℳ_{n,m}` that a fixed weight-`k` vector `v`
/// equals `Mᵀs` for some `s`: `C(m, k/2) / C(n, k)`, and zero for odd `k`.
pub fn matching_hit_prob(n: usize, m: usize, k: usize) -> Result<BigRational> {
    if k > n {
        return Err(Error::Domain(format!("weight {k} exceeds n = {n}")));
    }
    if 2 * m > n {
        return Err(Error::Domain(format!("{m} edges need 2m ≤ n = {n}")));
    }
    if k % 2 == 1 {
        return Ok(BigRational::zero());
    }
    Ok(ratio(binomial(m as u64, (k / 2) as u64), binomial(n as u64, k as u64)))
}

/// `g(k) = C(m, k/2) / C(n, k)` on even `k ∈ [2, 2m]`.
pub fn gk(n: usize, m: usize, k: usize) -> Result<BigRational> {
    if k % 2 == 1 {
        return Err(Error::Domain(format!("g(k) is defined for even k, got {k}")));
    }
    if k < 2 || k > 2 * m {
        return Err(Error::Domain(format!("k = {k} outside [2, 2m = {}]", 2 * m)));
    }
    matching_hit_prob(n, m, k)
}

/// Level-set bound `(4√2 · c / k)^k` for `1 ≤ k ≤ 4c`.
pub fn level_bound(c: f64, k: usize) -> Result<f64> {
    if k < 1 || (k as f64) > 4.0 * c {
        return Err(Error::Domain(format!("k = {k} outside [1, 4c = {}]", 4.0 * c)));
    }
    Ok((4.0 * std::f64::consts::SQRT_2 * c / k as f64).powi(k as i32))
}

/// `(2^{2n} / |A|²) Σ_{|v| = k} f̂(v)²` for `f = 1_A`, the quantity bounded
/// by [`level_bound`].
pub fn normalized_level_weight(a: &SubsetA, k: usize) -> Result<f64> {
    let f_hat = fwht(a.indicator());
    let scale = (1u64 << a.n) as f64 / a.len() as f64;
    Ok(scale * scale * level_weight(&f_hat, k)?)
}

/// Named generators of sets `A_c` with `|A_c| = 2^{n−c}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetFamily {
    /// The whole cube, for every `c`.
    Full,
    /// `x_{2i} ⊕ x_{2i+1} = 0` for `i < c`.
    PrefixParity,
    /// First `c` bits zero.
    FirstBitsFixed,
    /// Uniformly random subset of size `2^{n−c}` drawn from stream `(seed, c)`.
    Random { seed: u64 },
    /// Fixed set read from a set file; `c` is ignored.
    File(PathBuf),
}

impl SetFamily {
    pub fn parse(s: &str, default_seed: u64) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        Ok(match (head, arg) {
            ("full", None) => SetFamily::Full,
            ("prefix-parity", None) => SetFamily::PrefixParity,
            ("first-bits-fixed", None) => SetFamily::FirstBitsFixed,
            ("random", None) => SetFamily::Random { seed: default_seed },
            ("random", Some(seed)) => SetFamily::Random {
                seed: seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?,
            },
            ("file", Some(path)) => SetFamily::File(PathBuf::from(path)),
            _ => {
                return Err(Error::Validation(format!(
                    "unknown set family {s:?} (full, prefix-parity, first-bits-fixed, random[:seed], file:PATH)"
                )))
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            SetFamily::Full => "full".into(),
            SetFamily::PrefixParity => "prefix-parity".into(),
            SetFamily::FirstBitsFixed => "first-bits-fixed".into(),
            SetFamily::Random { seed } => format!("random:{seed}"),
            SetFamily::File(p) => format!("file:{}", p.display()),
        }
    }

    pub fn build(&self, n: usize, c: usize) -> Result<SubsetA> {
        if n > MAX_DIM {
            return Err(Error::Domain(format!("set dimension {n} exceeds {MAX_DIM}")));
        }
        match self {
            SetFamily::Full => SubsetA::full(n),
            SetFamily::PrefixParity => {
                if 2 * c > n {
                    return Err(Error::Domain(format!(
                        "prefix-parity needs 2c ≤ n, got c = {c}, n = {n}"
                    )));
                }
                SubsetA::from_predicate(n, |x| {
                    (0..c).all(|i| ((x >> (2 * i)) ^ (x >> (2 * i + 1))) & 1 == 0)
                })
            }
            SetFamily::FirstBitsFixed => {
                if c > n {
                    return Err(Error::Domain(format!("cannot fix {c} of {n} bits")));
                }
                let mask = (1u64 << c) - 1;
                SubsetA::from_predicate(n, |x| x & mask == 0)
            }
            SetFamily::Random { seed } => {
                if c > n {
                    return Err(Error::Domain(format!("c = {c} exceeds n = {n}")));
                }
                let mut rng = SeededRng::new(*seed, c as u64);
                let picked = index::sample(&mut rng, 1 << n, 1 << (n - c));
                SubsetA::new(n, picked.into_iter().map(|x| x as u64).collect())
            }
            SetFamily::File(path) => {
                let a = SubsetA::parse_set_file(&std::fs::read_to_string(path)?)?;
                dim_check("set file dimension", n, a.n)?;
                Ok(a)
            }
        }
    }
}

/// One row of an expected-TVD sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub c: usize,
    pub set_size: usize,
    /// `n − log₂ |A|`; equals `c` for the generated families except `full`.
    pub deficit: f64,
    pub report: TvdReport,
    /// `c · √(α / n)`, the scale against which the closeness constant is fit.
    pub scale: f64,
    /// `α ≤ 1/4`, where the closeness bound is proven.
    pub proven_regime: bool,
}

/// One [`expected_tvd`] evaluation per `c` in `cs`.
pub fn closeness_sweep(
    n: usize,
    m: usize,
    family: &SetFamily,
    cs: std::ops::RangeInclusive<usize>,
    mode: OracleMode,
    rng: &mut SeededRng,
) -> Result<Vec<SweepRow>> {
    let alpha = m as f64 / n as f64;
    cs.map(|c| {
        let a = family.build(n, c)?;
        let report = expected_tvd(&a, m, mode, rng)?;
        Ok(SweepRow {
            c,
            set_size: a.len(),
            deficit: a.deficit(),
            report,
            scale: c as f64 * (alpha / n as f64).sqrt(),
            proven_regime: 4 * m <= n,
        })
    })
    .collect()
}
