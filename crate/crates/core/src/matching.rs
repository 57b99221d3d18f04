//! α-matchings over `n` vertices and the edge-parity extractor.
//!
//! A [`Matching`] is kept in canonical form: every pair `(i, j)` has `i < j`
//! and pairs are sorted by `i`. Two matchings are equal iff they have the same
//! edge set, and enumeration order is lexicographic on the pair list.
//!
//! Viewed as an `m × n` matrix over GF(2) (row `ℓ` has ones at `i_ℓ`, `j_ℓ`),
//! [`Matching::extract`] computes `Mx` and [`Matching::transpose_apply`]
//! computes `Mᵀs`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::index;

use crate::bits::BitString;
use crate::error::{dim_check, Error, Result};
use crate::rng::SeededRng;

/// Largest matching family the exact oracles will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Validates and canonicalizes an edge list.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::Validation(format!("self-loop on vertex {a}")));
            }
            for v in [a, b] {
                if v >= n {
                    return Err(Error::Validation(format!(
                        "vertex {v} out of range for n = {n}"
                    )));
                }
                if seen[v] {
                    return Err(Error::Validation(format!(
                        "vertex {v} is covered by two edges"
                    )));
                }
                seen[v] = true;
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        Ok(Matching { n, pairs: out })
    }

    pub fn empty(n: usize) -> Self {
        Matching {
            n,
            pairs: Vec::new(),
        }
    }

    /// Parses the command-line form `"i j;i j;..."`.
    pub fn parse_inline(n: usize, s: &str) -> Result<Self> {
        Self::new(n, parse_pairs(s.split(';'))?)
    }

    /// Parses a matching file: one `"i j"` pair per line, blank lines and
    /// `#` comments ignored.
    pub fn parse_file(n: usize, text: &str) -> Result<Self> {
        Self::new(n, parse_pairs(text.lines())?)
    }

    pub fn to_file_string(&self) -> String {
        self.pairs
            .iter()
            .map(|(i, j)| format!("{i} {j}\n"))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges `m = αn`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_perfect(&self) -> bool {
        2 * self.pairs.len() == self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn alpha(&self) -> f64 {
        self.pairs.len() as f64 / self.n as f64
    }

    pub fn position(&self, edge: (usize, usize)) -> Option<usize> {
        let e = (edge.0.min(edge.1), edge.0.max(edge.1));
        self.pairs.binary_search(&e).ok()
    }

    /// `z = Mx`: bit `ℓ` is `x[i_ℓ] ⊕ x[j_ℓ]`.
    pub fn extract(&self, x: &BitString) -> Result<BitString> {
        dim_check("input length vs matching vertex count", self.n, x.len())?;
        Ok(BitString::from_bits(
            self.pairs.iter().map(|&(i, j)| x.get(i) ^ x.get(j)),
        ))
    }

    /// `v = Mᵀs`: bits `i_ℓ` and `j_ℓ` are set iff `s[ℓ] = 1`.
    pub fn transpose_apply(&self, s: &BitString) -> Result<BitString> {
        dim_check("seed length vs edge count", self.pairs.len(), s.len())?;
        let mut v = BitString::zeros(self.n);
        for (l, &(i, j)) in self.pairs.iter().enumerate() {
            if s.get(l) {
                v.set(i, true);
                v.set(j, true);
            }
        }
        Ok(v)
    }

    /// Extractor on packed cube indices (`n ≤ 64`, `m ≤ 64`).
    #[inline]
    pub fn extract_index(&self, x: u64) -> u64 {
        let mut z = 0u64;
        for (l, &(i, j)) in self.pairs.iter().enumerate() {
            z |= (((x >> i) ^ (x >> j)) & 1) << l;
        }
        z
    }

    /// `Mᵀs` on packed cube indices.
    #[inline]
    pub fn transpose_index(&self, s: u64) -> u64 {
        let mut v = 0u64;
        for (l, &(i, j)) in self.pairs.iter().enumerate() {
            if (s >> l) & 1 == 1 {
                v |= (1 << i) | (1 << j);
            }
        }
        v
    }

    /// Extends to a perfect matching; uncovered vertices are paired in
    /// ascending order.
    pub fn complete(&self) -> Result<Matching> {
        if self.n % 2 != 0 {
            return Err(Error::Domain(format!(
                "cannot complete a matching on odd n = {}",
                self.n
            )));
        }
        let mut covered = vec![false; self.n];
        for &(i, j) in &self.pairs {
            covered[i] = true;
            covered[j] = true;
        }
        let free: Vec<usize> = (0..self.n).filter(|&v| !covered[v]).collect();
        let extra = free.chunks_exact(2).map(|c| (c[0], c[1]));
        Matching::new(self.n, self.pairs.iter().copied().chain(extra))
    }
}

fn parse_pairs<'a>(chunks: impl Iterator<Item = &'a str>) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for chunk in chunks {
        let chunk = chunk.split('#').next().unwrap_or("").trim();
        if chunk.is_empty() {
            continue;
        }
        let nums: Vec<&str> = chunk.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!("expected \"i j\", got {chunk:?}")));
        }
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad vertex index {t:?}")))
        };
        pairs.push((parse(nums[0])?, parse(nums[1])?));
    }
    Ok(pairs)
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(i, j)| format!("{i} {j}")).collect();
        f.write_str(&parts.join(";"))
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matching(n={}, {{{self}}})", self.n)
    }
}

impl FromStr for Matching {
    type Err = Error;

    /// `"n:i j;i j"`; mostly useful in tests.
    fn from_str(s: &str) -> Result<Self> {
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse("expected \"n:i j;...\"".into()))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex count {n:?}")))?;
        Matching::parse_inline(n, rest)
    }
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if 2 * m > n {
        return Err(Error::Domain(format!(
            "{m} disjoint edges need 2m ≤ n, got n = {n}"
        )));
    }
    Ok(())
}

/// `|ℳ_{n,m}| = n! / (2^m · m! · (n − 2m)!)`.
pub fn count_matchings(n: usize, m: usize) -> Result<BigUint> {
    check_shape(n, m)?;
    // C(n, 2m) · (2m − 1)!!
    let mut count = binomial(n as u64, 2 * m as u64);
    for k in (1..2 * m as u64).step_by(2) {
        count *= k;
    }
    Ok(count)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Every matching in `ℳ_{n,m}`, lexicographically, refusing families above
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_matchings(n: usize, m: usize) -> Result<MatchingIter> {
    enumerate_matchings_capped(n, m, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_matchings_capped(n: usize, m: usize, cap: u64) -> Result<MatchingIter> {
    let count = count_matchings(n, m)?;
    if count.to_u64().map_or(true, |c| c > cap) {
        return Err(Error::Resource(format!(
            "|M(n={n}, m={m})| = {count} exceeds the enumeration cap {cap}; use Monte Carlo mode"
        )));
    }
    Ok(MatchingIter {
        n,
        m,
        pairs: Vec::with_capacity(m),
        used: vec![false; n],
        started: false,
        done: false,
    })
}

/// Lazy depth-first enumeration with exact feasibility pruning, so every
/// branch reaches a complete matching.
#[derive(Debug, Clone)]
pub struct MatchingIter {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    used: Vec<bool>,
    started: bool,
    done: bool,
}

impl MatchingIter {
    /// Smallest feasible `(i, j) ≥ from` for the edge at `depth`.
    fn place(&self, depth: usize, from: (usize, usize)) -> Option<(usize, usize)> {
        let remaining = self.m - depth - 1;
        let (mut i, mut j) = from;
        while i < self.n {
            if !self.used[i] {
                let free_above = (i + 1..self.n).filter(|&v| !self.used[v]).count();
                // Vertices below i are never revisited, so this only shrinks.
                if free_above < 1 + 2 * remaining {
                    return None;
                }
                if let Some(jj) = (j.max(i + 1)..self.n).find(|&v| !self.used[v]) {
                    return Some((i, jj));
                }
            }
            i += 1;
            j = i + 1;
        }
        None
    }

    fn seek(&mut self, mut depth: usize, mut from: (usize, usize)) -> bool {
        loop {
            if depth == self.m {
                return true;
            }
            match self.place(depth, from) {
                Some((i, j)) => {
                    self.used[i] = true;
                    self.used[j] = true;
                    self.pairs.push((i, j));
                    depth += 1;
                    from = (i + 1, i + 2);
                }
                None => {
                    if depth == 0 {
                        return false;
                    }
                    depth -= 1;
                    let (i, j) = self.pairs.pop().expect("depth > 0");
                    self.used[i] = false;
                    self.used[j] = false;
                    from = (i, j + 1);
                }
            }
        }
    }
}

impl Iterator for MatchingIter {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let found = if !self.started {
            self.started = true;
            self.seek(0, (0, 1))
        } else if let Some((i, j)) = self.pairs.pop() {
            self.used[i] = false;
            self.used[j] = false;
            self.seek(self.m - 1, (i, j + 1))
        } else {
            false
        };
        if !found {
            self.done = true;
            return None;
        }
        Some(Matching {
            n: self.n,
            pairs: self.pairs.clone(),
        })
    }
}

/// Uniform draw from `ℳ_{n,m}`: a partial Fisher–Yates shuffle picks `2m`
/// distinct vertices in order, consecutive ones become edges, and
/// canonicalization quotients out the orderings.
pub fn sample_matching(n: usize, m: usize, rng: &mut SeededRng) -> Result<Matching> {
    check_shape(n, m)?;
    let picked = index::sample(rng, n, 2 * m).into_vec();
    Matching::new(n, picked.chunks_exact(2).map(|c| (c[0], c[1])))
}
