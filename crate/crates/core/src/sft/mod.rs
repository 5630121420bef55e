//! Subshifts of finite type: pruned transition structure, gluing
//! constants (primitivity index), topological entropy, periodic
//! orbits, shift-commuting block codes, and Markov measures.

mod code;
mod measure;

pub use code::{
    enumerate_automorphisms, find_inverse, theorem_a_check, InverseSearch, SlidingBlockCode,
    TheoremAVerdict,
};
pub use measure::{
    cesaro_average, measure_from_json, parry_measure, pushforward, pushforward_markov,
    rpf_equilibrium, CesaroTable, CylinderMeasure, PushforwardTable,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::RatInterval;
use crate::linalg::IntMatrix;
use crate::spectral::{isolate_real_roots, SpectralError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SftError {
    #[error("subshift is empty after pruning")]
    EmptySubshift,
    #[error("transition matrix is not primitive")]
    NotPrimitive,
    #[error("transition matrix is not irreducible")]
    NotIrreducible,
    #[error("block code is not invertible within the search budget")]
    NotInvertible,
    #[error("rule space exceeds the enumeration budget")]
    RadiusTooLarge,
    #[error("invalid block code rule: {0}")]
    InvalidRule(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// A subshift of finite type on the pruned alphabet {0, …, k−1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sft {
    k: usize,
    /// original labels of the surviving symbols, ascending
    labels: Vec<usize>,
    /// k×k 0/1 transition matrix: t[a][b] = 1 ⟺ "ab" allowed
    t: Vec<Vec<u8>>,
    irreducible: bool,
    /// least t with Tᵗ > 0 entrywise, when primitive
    primitivity_index: Option<usize>,
}

impl Sft {
    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn transition(&self) -> &[Vec<u8>] {
        &self.t
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_index.is_some()
    }

    pub fn allows(&self, a: u8, b: u8) -> bool {
        self.t[a as usize][b as usize] == 1
    }

    pub fn word_allowed(&self, w: &[u8]) -> bool {
        w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    pub fn cyclic_word_allowed(&self, w: &[u8]) -> bool {
        if w.is_empty() {
            return false;
        }
        self.word_allowed(w) && self.allows(w[w.len() - 1], w[0])
    }

    /// All allowed words of a given length, lexicographic.
    pub fn allowed_words(&self, len: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut w = Vec::with_capacity(len);
        self.collect_words(len, &mut w, &mut out);
        out
    }

    fn collect_words(&self, len: usize, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if w.len() == len {
            out.push(w.clone());
            return;
        }
        for s in 0..self.k as u8 {
            if w.last().is_none_or(|&prev| self.allows(prev, s)) {
                w.push(s);
                self.collect_words(len, w, out);
                w.pop();
            }
        }
    }

    pub fn transition_matrix(&self) -> IntMatrix {
        IntMatrix::new(
            self.k,
            self.t
                .iter()
                .flat_map(|row| row.iter().map(|&e| BigInt::from(e)))
                .collect(),
        )
    }
}

/// Build a pruned SFT from a 0/1 matrix: stranded symbols (no
/// outgoing or no incoming allowed transition) are removed
/// iteratively.
pub fn build_sft(t: &[Vec<u8>]) -> Result<Sft, SftError> {
    let n = t.len();
    assert!(t.iter().all(|r| r.len() == n), "transition matrix must be square");
    assert!(
        t.iter().flatten().all(|&e| e <= 1),
        "transition entries must be 0/1"
    );
    let mut alive: Vec<bool> = vec![true; n];
    loop {
        let mut changed = false;
        for a in 0..n {
            if !alive[a] {
                continue;
            }
            let out = (0..n).any(|b| alive[b] && t[a][b] == 1);
            let inc = (0..n).any(|b| alive[b] && t[b][a] == 1);
            if !out || !inc {
                alive[a] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let labels: Vec<usize> = (0..n).filter(|&a| alive[a]).collect();
    if labels.is_empty() {
        return Err(SftError::EmptySubshift);
    }
    let k = labels.len();
    let tt: Vec<Vec<u8>> = labels
        .iter()
        .map(|&a| labels.iter().map(|&b| t[a][b]).collect())
        .collect();
    let irreducible = strongly_connected(&tt);
    let primitivity_index = if irreducible {
        primitivity_index(&tt)
    } else {
        None
    };
    Ok(Sft {
        k,
        labels,
        t: tt,
        irreducible,
        primitivity_index,
    })
}

fn strongly_connected(t: &[Vec<u8>]) -> bool {
    let k = t.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..k {
                let edge = if forward { t[a][b] } else { t[b][a] };
                if edge == 1 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Least t with Tᵗ entrywise positive, bounded by Wielandt's
/// (k−1)² + 1.
fn primitivity_index(t: &[Vec<u8>]) -> Option<usize> {
    let k = t.len();
    let bound = (k - 1) * (k - 1) + 1;
    let mut pw: Vec<Vec<u64>> = t
        .iter()
        .map(|r| r.iter().map(|&e| e as u64).collect())
        .collect();
    for idx in 1..=bound {
        if pw.iter().flatten().all(|&e| e > 0) {
            return Some(idx);
        }
        // boolean matrix product keeps entries bounded
        let mut next = vec![vec![0u64; k]; k];
        for a in 0..k {
            for c in 0..k {
                if pw[a][c] > 0 {
                    for b in 0..k {
                        if t[c][b] == 1 {
                            next[a][b] = 1;
                        }
                    }
                }
            }
        }
        pw = next;
    }
    if pw.iter().flatten().all(|&e| e > 0) {
        Some(bound)
    } else {
        None
    }
}

/// Uniform symbolic gluing gap: the primitivity index of T. Any two
/// allowed words can be joined by a connecting word of length ≤ K.
pub fn gluing_constant(s: &Sft) -> Result<usize, SftError> {
    s.primitivity_index.ok_or(SftError::NotPrimitive)
}

/// Enclosure of log(Perron root of T) of width ≤ tol.
pub fn sft_entropy(s: &Sft, tol: &BigRational) -> Result<RatInterval, SftError> {
    if !s.irreducible {
        return Err(SftError::NotIrreducible);
    }
    let root = perron_enclosure(&s.transition_matrix(), tol)?;
    let eps = tol / BigRational::from_integer(4.into());
    let mut cur = tol.clone();
    let mut enc = root;
    loop {
        let ln = enc.ln(&eps);
        if &ln.width() <= tol {
            return Ok(ln);
        }
        cur /= BigRational::from_integer(16.into());
        enc = perron_enclosure(&s.transition_matrix(), &cur)?;
    }
}

/// Enclosure of the largest real eigenvalue (the Perron root for a
/// pruned irreducible T, hence ≥ 1).
pub(crate) fn perron_enclosure(
    m: &IntMatrix,
    tol: &BigRational,
) -> Result<RatInterval, SftError> {
    let p = m.charpoly().to_q();
    let sf = p.squarefree_part();
    let roots = isolate_real_roots(&sf, tol);
    let enc = roots.into_iter().last().ok_or(SftError::EmptySubshift)?;
    // the charpoly is monic, so any rational root is an integer;
    // snap to it for exact downstream arithmetic
    let cand = enc.midpoint().round();
    if enc.contains(&cand) && sf.eval(&cand) == BigRational::from_integer(0.into()) {
        return Ok(RatInterval::point(cand));
    }
    Ok(enc)
}

/// One shift-orbit of periodic sequences, as its lexicographically
/// least cyclic representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub word: Vec<u8>,
    pub period: usize,
}

/// All shift-orbits of prime period ≤ max_period, ordered by period
/// then representative.
pub fn enumerate_periodic_words(s: &Sft, max_period: usize) -> Vec<PeriodicOrbit> {
    assert!(max_period >= 1);
    let mut out = Vec::new();
    for n in 1..=max_period {
        let mut seen: std::collections::HashSet<Vec<u8>> = std::collections::HashSet::new();
        for w in s.allowed_words(n) {
            if !s.cyclic_word_allowed(&w) {
                continue;
            }
            if prime_period(&w) != n {
                continue;
            }
            let rep = least_rotation(&w);
            if seen.insert(rep.clone()) {
                out.push(PeriodicOrbit {
                    word: rep,
                    period: n,
                });
            }
        }
        let start = out.len() - seen.len();
        out[start..].sort_by(|a, b| a.word.cmp(&b.word));
    }
    out
}

pub(crate) fn prime_period(w: &[u8]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&d| n % d == 0 && (0..n).all(|i| w[i] == w[i % d]))
        .unwrap()
}

pub(crate) fn least_rotation(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    (0..n)
        .map(|j| {
            let mut r = Vec::with_capacity(n);
            r.extend_from_slice(&w[j..]);
            r.extend_from_slice(&w[..j]);
            r
        })
        .min()
        .unwrap()
}

#[cfg(test)]
pub(crate) fn full_shift(k: usize) -> Sft {
    build_sft(&vec![vec![1u8; k]; k]).unwrap()
}

#[cfg(test)]
pub(crate) fn golden_mean() -> Sft {
    build_sft(&[vec![1, 1], vec![1, 0]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn build_and_prune() {
        let full = full_shift(2);
        assert_eq!(full.alphabet_size(), 2);
        assert!(full.is_primitive());

        let gm = golden_mean();
        assert_eq!(gm.alphabet_size(), 2);
        assert!(!gm.word_allowed(&[1, 1]));
        assert!(gm.word_allowed(&[0, 1, 0, 0, 1]));

        assert_eq!(build_sft(&[vec![0]]), Err(SftError::EmptySubshift));

        // symbol 2 has no incoming edge: pruned away
        let pruned = build_sft(&[vec![1, 1, 0], vec![1, 1, 0], vec![1, 0, 0]]).unwrap();
        assert_eq!(pruned.alphabet_size(), 2);
        assert_eq!(pruned.labels(), &[0, 1]);
    }

    #[test]
    fn gluing_constants() {
        assert_eq!(gluing_constant(&full_shift(2)).unwrap(), 1);
        assert_eq!(gluing_constant(&golden_mean()).unwrap(), 2);
        let cycle = build_sft(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(cycle.is_irreducible());
        assert_eq!(gluing_constant(&cycle), Err(SftError::NotPrimitive));
    }

    #[test]
    fn entropies() {
        let tol = rat(1, 1_000_000_000);
        let e2 = sft_entropy(&full_shift(2), &tol).unwrap();
        // log 2 ≈ 0.6931471805599453
        assert!(e2.contains(&rat(6_931_471_805_599_453, 10_000_000_000_000_000)));
        assert!(e2.width() <= tol);

        let egm = sft_entropy(&golden_mean(), &tol).unwrap();
        // log φ ≈ 0.48121182505960347
        assert!(egm.contains(&rat(4_812_118_250_596_034, 10_000_000_000_000_000)));

        let e3 = sft_entropy(&full_shift(3), &tol).unwrap();
        assert!(e3.contains(&rat(1_098_612_288_668_110, 1_000_000_000_000_000)));
    }

    #[test]
    fn entropy_of_cycle_is_zero() {
        let cycle = build_sft(&[vec![0, 1], vec![1, 0]]).unwrap();
        let e = sft_entropy(&cycle, &rat(1, 1000)).unwrap();
        assert!(e.contains(&BigRational::from_integer(0.into())));
        assert!(e.width() <= rat(1, 1000));
    }

    #[test]
    fn periodic_words_match_traces() {
        let full = full_shift(2);
        let orbits = enumerate_periodic_words(&full, 2);
        assert_eq!(
            orbits,
            vec![
                PeriodicOrbit { word: vec![0], period: 1 },
                PeriodicOrbit { word: vec![1], period: 1 },
                PeriodicOrbit { word: vec![0, 1], period: 2 },
            ]
        );

        let gm = golden_mean();
        let orbits = enumerate_periodic_words(&gm, 2);
        assert_eq!(
            orbits,
            vec![
                PeriodicOrbit { word: vec![0], period: 1 },
                PeriodicOrbit { word: vec![0, 1], period: 2 },
            ]
        );
        assert_eq!(enumerate_periodic_words(&gm, 1).len(), 1);

        // trace(Tⁿ) = Σ_{d|n} d · #(prime-period-d orbits)
        for s in [full_shift(2), golden_mean(), full_shift(3)] {
            let t = s.transition_matrix();
            let orbits = enumerate_periodic_words(&s, 6);
            for n in 1..=6usize {
                let trace = t.pow(n as i64).unwrap().trace();
                let counted: usize = orbits
                    .iter()
                    .filter(|o| n % o.period == 0)
                    .map(|o| o.period)
                    .sum();
                assert_eq!(trace, BigInt::from(counted), "n = {}", n);
            }
        }
    }

    #[test]
    fn entropy_scaling_cross_check() {
        // full 4-shift entropy = 2 × full 2-shift entropy
        let tol = rat(1, 1_000_000);
        let e2 = sft_entropy(&full_shift(2), &tol).unwrap();
        let e4 = sft_entropy(&full_shift(4), &tol).unwrap();
        let double = e2.scale(&rat(2, 1));
        assert!((e4.midpoint() - double.midpoint()).abs() < rat(1, 100_000));
        assert!(BigRational::one() > rat(1, 2));
    }
}
