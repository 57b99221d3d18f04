//! Fourier analysis on the Boolean cube `{0,1}^n`.
//!
//! Normalization: the forward transform carries the `2^{-n}` factor,
//!
//! ```text
//! f̂(s) = 2^{-n} Σ_y f(y) (−1)^{y·s},        f = Σ_s f̂(s) χ_s,
//! ```
//!
//! and norms are averages, `‖f‖₂² = 2^{-n} Σ_y f(y)²`, so Parseval reads
//! `‖f‖₂² = Σ_s f̂(s)²`. Cube points and Fourier indices are packed integers,
//! bit `k` of the index being coordinate `k`.

use crate::error::{Error, Result};

/// Largest supported cube dimension.
pub const MAX_DIM: usize = 26;

/// Real-valued function on `{0,1}^n`; `values[y]` is `f(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction {
    n: usize,
    values: Vec<f64>,
}

/// Fourier coefficients; `coeffs[s]` is `f̂(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::Domain(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    if len != 1usize << n {
        return Err(Error::Dimension(format!(
            "expected 2^{n} = {} values, got {len}",
            1usize << n
        )));
    }
    Ok(())
}

impl CubeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_len(n, values.len())?;
        Ok(CubeFunction { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_len(n, 1usize << n.min(MAX_DIM + 1))?;
        Ok(CubeFunction {
            n,
            values: vec![c; 1 << n],
        })
    }

    pub fn from_fn(n: usize, f: impl FnMut(u64) -> f64) -> Result<Self> {
        check_len(n, 1usize << n.min(MAX_DIM + 1))?;
        Ok(CubeFunction {
            n,
            values: (0..1u64 << n).map(f).collect(),
        })
    }

    /// Indicator of a set of cube points.
    pub fn indicator(n: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut f = CubeFunction::constant(n, 0.0)?;
        for x in members {
            let slot = f.values.get_mut(x as usize).ok_or_else(|| {
                Error::Dimension(format!("point {x} outside the {n}-cube"))
            })?;
            *slot = 1.0;
        }
        Ok(f)
    }

    /// The character `χ_v(y) = (−1)^{y·v}`.
    pub fn character(n: usize, v: u64) -> Result<Self> {
        CubeFunction::from_fn(n, |y| if (y & v).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `‖f‖₂² = 2^{-n} Σ f(y)²`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_len(n, coeffs.len())?;
        Ok(Spectrum { n, coeffs })
    }

    pub fn point_mass(n: usize, s: u64, weight: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; 1usize << n.min(MAX_DIM + 1)];
        check_len(n, coeffs.len())?;
        let slot = coeffs
            .get_mut(s as usize)
            .ok_or_else(|| Error::Dimension(format!("index {s} outside the {n}-cube")))?;
        *slot = weight;
        Ok(Spectrum { n, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: u64) -> f64 {
        self.coeffs[s as usize]
    }

    /// `Σ_s f̂(s)²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly on a power-of-two buffer.
pub fn walsh_hadamard_in_place(buf: &mut [f64]) {
    let len = buf.len();
    assert!(len.is_power_of_two(), "buffer length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Forward transform, consuming the function's buffer.
pub fn fwht(f: CubeFunction) -> Spectrum {
    let n = f.n;
    let mut buf = f.values;
    walsh_hadamard_in_place(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Spectrum { n, coeffs: buf }
}

/// `f = Σ_s f̂(s) χ_s`.
pub fn inverse_fwht(spec: Spectrum) -> CubeFunction {
    let n = spec.n;
    let mut buf = spec.coeffs;
    walsh_hadamard_in_place(&mut buf);
    CubeFunction { n, values: buf }
}

/// `Σ_{|s| = k} f̂(s)²`.
pub fn level_weight(spec: &Spectrum, k: usize) -> Result<f64> {
    if k > spec.n {
        return Err(Error::Domain(format!(
            "level {k} outside 0..={}",
            spec.n
        )));
    }
    Ok(spec
        .coeffs
        .iter()
        .enumerate()
        .filter(|(s, _)| s.count_ones() as usize == k)
        .map(|(_, c)| c * c)
        .sum())
}

/// All level weights `0..=n` in one pass.
pub fn level_weights(spec: &Spectrum) -> Vec<f64> {
    let mut w = vec![0.0; spec.n + 1];
    for (s, c) in spec.coeffs.iter().enumerate() {
        w[s.count_ones() as usize] += c * c;
    }
    w
}

/// Both sides of the KKL inequality for a `{−1, 0, 1}`-valued function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KklMargin {
    /// `Σ_s δ^{|s|} f̂(s)²`
    pub lhs: f64,
    /// `(|A| / 2^n)^{2/(1+δ)}`, `A` the support of `f`
    pub rhs: f64,
}

impl KklMargin {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

pub fn kkl_margin(f: &CubeFunction, delta: f64) -> Result<KklMargin> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("δ = {delta} outside [0, 1]")));
    }
    if let Some(bad) = f.values.iter().find(|&&v| v != -1.0 && v != 0.0 && v != 1.0) {
        return Err(Error::Domain(format!(
            "KKL needs values in {{-1, 0, 1}}, found {bad}"
        )));
    }
    let support = f.values.iter().filter(|&&v| v != 0.0).count();
    let density = support as f64 / f.values.len() as f64;
    let weights = level_weights(&fwht(f.clone()));
    let lhs = weights
        .iter()
        .enumerate()
        .map(|(k, w)| delta.powi(k as i32) * w)
        .sum();
    let rhs = density.powf(2.0 / (1.0 + delta));
    Ok(KklMargin { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    /// Direct O(4^n) transform.
    fn naive(f: &CubeFunction) -> Vec<f64> {
        let len = f.values().len() as u64;
        (0..len)
            .map(|s| {
                (0..len)
                    .map(|y| {
                        let sign = if (y & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * f.values()[y as usize]
                    })
                    .sum::<f64>()
                    / len as f64
            })
            .collect()
    }

    #[test]
    fn transform_examples() {
        let f = CubeFunction::new(1, vec![1.0, 0.0]).unwrap();
        assert_eq!(fwht(f).coeffs(), &[0.5, 0.5]);
        let one = CubeFunction::constant(3, 1.0).unwrap();
        assert_eq!(fwht(one), Spectrum::point_mass(3, 0, 1.0).unwrap());
        let f = CubeFunction::indicator(2, [0b00, 0b11]).unwrap();
        assert_eq!(fwht(f).coeffs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = SeededRng::new(5, 0);
        let f = CubeFunction::from_fn(6, |_| rng.unit() - 0.5).unwrap();
        assert!(close(fwht(f.clone()).coeffs(), &naive(&f), 1e-13));
    }

    #[test]
    fn inverse_examples() {
        let g = inverse_fwht(Spectrum::point_mass(4, 0, 1.0).unwrap());
        assert!(g.values().iter().all(|&v| v == 1.0));
        let g = inverse_fwht(Spectrum::new(1, vec![0.5, 0.5]).unwrap());
        assert_eq!(g.values(), &[1.0, 0.0]);
        let mut rng = SeededRng::new(9, 0);
        let f = CubeFunction::from_fn(10, |_| 2.0 * rng.unit() - 1.0).unwrap();
        let back = inverse_fwht(fwht(f.clone()));
        assert!(close(back.values(), f.values(), 1e-12));
    }

    #[test]
    fn characters_are_point_masses() {
        for v in 0..16 {
            let spec = fwht(CubeFunction::character(4, v).unwrap());
            assert!(close(spec.coeffs(), Spectrum::point_mass(4, v, 1.0).unwrap().coeffs(), 1e-15));
        }
    }

    #[test]
    fn level_weight_examples() {
        let one = fwht(CubeFunction::constant(3, 1.0).unwrap());
        assert_eq!(level_weight(&one, 0).unwrap(), 1.0);
        assert_eq!(level_weight(&one, 2).unwrap(), 0.0);
        let single = fwht(CubeFunction::indicator(2, [0]).unwrap());
        assert!((level_weight(&single, 1).unwrap() - 0.125).abs() < 1e-15);
        assert!(level_weight(&single, 3).is_err());
        let total: f64 = level_weights(&single).iter().sum();
        assert!((total - single.energy()).abs() < 1e-15);
    }

    #[test]
    fn kkl_examples() {
        for n in 1..8 {
            let m = kkl_margin(&CubeFunction::indicator(n, [0]).unwrap(), 1.0).unwrap();
            let expect = 0.5f64.powi(n as i32);
            assert!((m.lhs - expect).abs() < 1e-15 && (m.rhs - expect).abs() < 1e-15);
        }
        for delta in [0.0, 0.3, 1.0] {
            let m = kkl_margin(&CubeFunction::constant(4, 1.0).unwrap(), delta).unwrap();
            assert!((m.lhs - 1.0).abs() < 1e-15 && (m.rhs - 1.0).abs() < 1e-15);
        }
        let mut rng = SeededRng::new(17, 0);
        let f = CubeFunction::from_fn(8, |_| [-1.0, 0.0, 1.0][(rng.unit() * 3.0) as usize]).unwrap();
        assert!(kkl_margin(&f, 0.5).unwrap().holds(1e-9));
    }

    #[test]
    fn kkl_rejects_bad_inputs() {
        let f = CubeFunction::new(1, vec![0.5, 1.0]).unwrap();
        assert!(matches!(kkl_margin(&f, 0.5), Err(Error::Domain(_))));
        let g = CubeFunction::constant(1, 1.0).unwrap();
        assert!(kkl_margin(&g, 1.5).is_err());
        assert!(kkl_margin(&g, -0.1).is_err());
    }

    #[test]
    fn malformed_lengths() {
        assert!(matches!(CubeFunction::new(2, vec![0.0; 3]), Err(Error::Dimension(_))));
        assert!(Spectrum::new(3, vec![0.0; 4]).is_err());
        assert!(CubeFunction::constant(MAX_DIM + 1, 0.0).is_err());
    }
}
