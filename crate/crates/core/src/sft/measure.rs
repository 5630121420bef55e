//! Stationary Markov measures on SFTs: Parry (maximal entropy) and
//! Ruelle–Perron–Frobenius equilibrium states with certified interval
//! entries, push-forwards under block codes, and Cesàro averages.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{find_inverse, InverseSearch, Sft, SftError, SlidingBlockCode};
use crate::interval::{parse_rational, RatInterval};
use crate::linalg::{IntMatrix, IntPoly, QPoly};

/// A stationary Markov measure: stationary vector π and row-stochastic
/// transition matrix P supported on the transition structure.
/// Entries are certified intervals; exact rational data is kept when
/// available.
#[derive(Clone, Debug)]
pub struct CylinderMeasure {
    k: usize,
    pi: Vec<RatInterval>,
    p: Vec<Vec<RatInterval>>,
    exact: Option<(Vec<BigRational>, Vec<Vec<BigRational>>)>,
    pub entropy: RatInterval,
}

impl CylinderMeasure {
    /// Exact stationary Markov measure from rational data, validated:
    /// Σπ = 1, P row-stochastic, πP = π, support within T.
    pub fn from_rational(
        sft: &Sft,
        pi: Vec<BigRational>,
        p: Vec<Vec<BigRational>>,
        tol: &BigRational,
    ) -> Result<CylinderMeasure, SftError> {
        let k = sft.alphabet_size();
        if pi.len() != k || p.len() != k || p.iter().any(|r| r.len() != k) {
            return Err(SftError::InvalidMeasure("dimension mismatch".into()));
        }
        if pi.iter().any(|x| x.is_negative()) || p.iter().flatten().any(|x| x.is_negative()) {
            return Err(SftError::InvalidMeasure("negative entry".into()));
        }
        if pi.iter().sum::<BigRational>() != BigRational::one() {
            return Err(SftError::InvalidMeasure("pi does not sum to 1".into()));
        }
        for (a, row) in p.iter().enumerate() {
            if row.iter().sum::<BigRational>() != BigRational::one() {
                return Err(SftError::InvalidMeasure(format!("row {} not stochastic", a)));
            }
            for (b, v) in row.iter().enumerate() {
                if !v.is_zero() && !sft.allows(a as u8, b as u8) {
                    return Err(SftError::InvalidMeasure(format!(
                        "P[{}][{}] positive outside the transition support",
                        a, b
                    )));
                }
            }
        }
        for b in 0..k {
            let s: BigRational = (0..k).map(|a| &pi[a] * &p[a][b]).sum();
            if s != pi[b] {
                return Err(SftError::InvalidMeasure("pi is not stationary".into()));
            }
        }
        let entropy = entropy_from_terms(&exact_entropy_terms(&pi, &p), tol);
        Ok(CylinderMeasure {
            k,
            pi: pi.iter().cloned().map(RatInterval::point).collect(),
            p: p
                .iter()
                .map(|r| r.iter().cloned().map(RatInterval::point).collect())
                .collect(),
            exact: Some((pi, p)),
            entropy,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn pi(&self) -> &[RatInterval] {
        &self.pi
    }

    pub fn transitions(&self) -> &[Vec<RatInterval>] {
        &self.p
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_data(&self) -> Option<(&[BigRational], &[Vec<BigRational>])> {
        self.exact.as_ref().map(|(pi, p)| (&pi[..], &p[..]))
    }

    /// Weight of the cylinder [w]: π(w₀)·Π P(wᵢ, wᵢ₊₁).
    pub fn word_weight(&self, w: &[u8]) -> RatInterval {
        let mut acc = self.pi[w[0] as usize].clone();
        for pair in w.windows(2) {
            acc = acc.mul(&self.p[pair[0] as usize][pair[1] as usize]);
        }
        acc
    }

    /// Canonical entropy representation −Σ cᵢ·ln(vᵢ) for exact
    /// measures: sorted (value, coefficient) pairs with multiplicities
    /// merged and ln(1)-terms dropped. Equal term lists imply exactly
    /// equal entropy.
    pub fn entropy_terms(&self) -> Option<Vec<(BigRational, BigRational)>> {
        let (pi, p) = self.exact.as_ref()?;
        Some(exact_entropy_terms(pi, p))
    }
}

/// Merge −Σ_a,b π_a P_ab ln P_ab into canonical (value, coefficient)
/// pairs keyed by the transition probability.
fn exact_entropy_terms(
    pi: &[BigRational],
    p: &[Vec<BigRational>],
) -> Vec<(BigRational, BigRational)> {
    let mut terms: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    for (a, row) in p.iter().enumerate() {
        for v in row {
            if v.is_zero() || v.is_one() {
                continue;
            }
            let c = &pi[a] * v;
            *terms.entry(v.clone()).or_insert_with(BigRational::zero) += c;
        }
    }
    terms
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Entropy interval −Σ c·ln(v) of width ≤ tol from canonical terms.
fn entropy_from_terms(terms: &[(BigRational, BigRational)], tol: &BigRational) -> RatInterval {
    if terms.is_empty() {
        return RatInterval::zero();
    }
    let eps = tol / BigRational::from_integer(BigInt::from(terms.len()));
    let mut acc = RatInterval::zero();
    for (v, c) in terms {
        let ln = RatInterval::point(v.clone()).ln(&eps);
        acc = acc.sub(&ln.scale(c));
    }
    acc
}

/// adj(λI − A) as a matrix of integer polynomials in λ, via the
/// Faddeev–LeVerrier recurrence.
fn adjugate_polys(a: &IntMatrix) -> Vec<Vec<IntPoly>> {
    let n = a.dim();
    let mut coeff_mats: Vec<IntMatrix> = Vec::with_capacity(n);
    let mut b = IntMatrix::identity(n);
    coeff_mats.push(b.clone());
    for k in 1..n {
        let m = a * &b;
        let c = -m.trace() / BigInt::from(k);
        b = &m + &IntMatrix::scalar(n, &c);
        coeff_mats.push(b.clone());
    }
    // adj(λI − A) = Σ_{k=0}^{n−1} B_k λ^{n−1−k}
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let coeffs: Vec<BigInt> = (0..n)
                        .map(|deg| coeff_mats[n - 1 - deg].get(i, j).clone())
                        .collect();
                    IntPoly::new(coeffs)
                })
                .collect()
        })
        .collect()
}

/// Markov measure from the Perron data of a nonnegative integer
/// matrix supported on the SFT's transitions:
/// P(a,b) = M[a][b]·v_b / (λ·v_a), π_a ∝ u_a·v_a.
fn markov_from_perron(
    sft: &Sft,
    m: &IntMatrix,
    tol: &BigRational,
) -> Result<CylinderMeasure, SftError> {
    let k = sft.alphabet_size();
    let adj = adjugate_polys(m);
    let adj_q: Vec<Vec<QPoly>> = adj.iter().map(|r| r.iter().map(|p| p.to_q()).collect()).collect();
    let mut cur = tol.clone();
    loop {
        let lambda = super::perron_enclosure(m, &cur)?;
        // right Perron vector from column 0, left from row 0; at the
        // Perron root adj(λI−M) = p'(λ)·v·uᵀ/(uᵀv) with p'(λ) > 0,
        // so all entries are positive once λ is tight enough.
        let v: Vec<RatInterval> = (0..k).map(|a| adj_q[a][0].eval_interval(&lambda)).collect();
        let u: Vec<RatInterval> = (0..k).map(|a| adj_q[0][a].eval_interval(&lambda)).collect();
        let positive = lambda.is_positive()
            && v.iter().all(|x| x.is_positive())
            && u.iter().all(|x| x.is_positive());
        if positive {
            let mut p: Vec<Vec<RatInterval>> = vec![vec![RatInterval::zero(); k]; k];
            let mut exact = true;
            for a in 0..k {
                for b in 0..k {
                    let w = m.get(a, b);
                    if !w.is_zero() {
                        let num = v[b].scale(&BigRational::from_integer(w.clone()));
                        p[a][b] = num.div(&lambda.mul(&v[a]));
                        exact &= p[a][b].is_point();
                    }
                }
            }
            let weights: Vec<RatInterval> = (0..k).map(|a| u[a].mul(&v[a])).collect();
            let total = weights
                .iter()
                .fold(RatInterval::zero(), |acc, w| acc.add(w));
            let pi: Vec<RatInterval> = weights.iter().map(|w| w.div(&total)).collect();
            exact &= pi.iter().all(|x| x.is_point());

            let widths_ok = p
                .iter()
                .flatten()
                .chain(pi.iter())
                .all(|x| &x.width() <= tol);
            if widths_ok {
                let (entropy, exact_data) = if exact {
                    let pi_q: Vec<BigRational> = pi.iter().map(|x| x.midpoint()).collect();
                    let p_q: Vec<Vec<BigRational>> = p
                        .iter()
                        .map(|r| r.iter().map(|x| x.midpoint()).collect())
                        .collect();
                    (
                        entropy_from_terms(&exact_entropy_terms(&pi_q, &p_q), tol),
                        Some((pi_q, p_q)),
                    )
                } else {
                    (interval_entropy(&pi, &p, tol), None)
                };
                return Ok(CylinderMeasure {
                    k,
                    pi,
                    p,
                    exact: exact_data,
                    entropy,
                });
            }
        }
        cur /= BigRational::from_integer(64.into());
        assert!(
            cur > tol / BigRational::from_integer(BigInt::from(1u128 << 120)),
            "Perron refinement failed to converge"
        );
    }
}

/// −Σ π_a P_ab ln P_ab with interval entries; only a valid enclosure,
/// width driven by the entry widths and tol.
fn interval_entropy(
    pi: &[RatInterval],
    p: &[Vec<RatInterval>],
    tol: &BigRational,
) -> RatInterval {
    let k = pi.len();
    let eps = tol / BigRational::from_integer(BigInt::from((k * k + 1) as u64));
    let mut acc = RatInterval::zero();
    for a in 0..k {
        for b in 0..k {
            let pab = &p[a][b];
            if pab.is_positive() {
                let term = pi[a].mul(pab).mul(&pab.ln(&eps));
                acc = acc.sub(&term);
            }
        }
    }
    acc
}

/// The Parry measure (unique maximal entropy measure) of a primitive
/// SFT, entries certified to width ≤ tol.
pub fn parry_measure(sft: &Sft, tol: &BigRational) -> Result<CylinderMeasure, SftError> {
    if !sft.is_primitive() {
        return Err(SftError::NotPrimitive);
    }
    markov_from_perron(sft, &sft.transition_matrix(), tol)
}

/// Equilibrium state of a locally constant potential φ(x) = ln
/// weights[x₀], via RPF on W[a][b] = weights[a]·T[a][b]. Reduces to
/// the Parry measure when all weights are equal.
pub fn rpf_equilibrium(
    sft: &Sft,
    weights: &[BigRational],
    tol: &BigRational,
) -> Result<CylinderMeasure, SftError> {
    if !sft.is_primitive() {
        return Err(SftError::NotPrimitive);
    }
    let k = sft.alphabet_size();
    if weights.len() != k || weights.iter().any(|w| !w.is_positive()) {
        return Err(SftError::InvalidMeasure(
            "weights must be positive, one per symbol".into(),
        ));
    }
    // scale to an integer matrix; Perron ratios are scale-invariant
    let denom = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let entries: Vec<BigInt> = (0..k)
        .flat_map(|a| {
            let wa = &weights[a] * BigRational::from_integer(denom.clone());
            let wa = wa.to_integer();
            (0..k)
                .map(move |b| {
                    if sft.transition()[a][b] == 1 {
                        wa.clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    markov_from_perron(sft, &IntMatrix::new(k, entries), tol)
}

/// Exact/interval weights of h_*m on all allowed L-cylinders, with a
/// preservation verdict against m.
#[derive(Clone, Debug)]
pub struct PushforwardTable {
    pub len: usize,
    pub weights: BTreeMap<Vec<u8>, RatInterval>,
    /// sup over L-words of an upper bound for |h_*m − m|
    pub distance_to_source: BigRational,
    pub preserved: bool,
}

fn require_invertible(sft: &Sft, h: &SlidingBlockCode) -> Result<(), SftError> {
    match find_inverse(sft, h, 3 * h.radius() + 1) {
        InverseSearch::Found(_) => Ok(()),
        _ => Err(SftError::NotInvertible),
    }
}

/// Weight table of h_*m on L-cylinders: the preimage of an L-cylinder
/// under a radius-r code is a union of (L+2r)-cylinders, summed
/// exactly.
fn pushforward_weights(
    sft: &Sft,
    m: &CylinderMeasure,
    h: &SlidingBlockCode,
    len: usize,
) -> BTreeMap<Vec<u8>, RatInterval> {
    let r = h.radius();
    let mut table: BTreeMap<Vec<u8>, RatInterval> = sft
        .allowed_words(len)
        .into_iter()
        .map(|w| (w, RatInterval::zero()))
        .collect();
    for u in sft.allowed_words(len + 2 * r) {
        let image = h.apply_word(&u);
        let w = m.word_weight(&u);
        let slot = table.get_mut(&image).expect("valid code image is allowed");
        *slot = slot.add(&w);
    }
    table
}

pub fn pushforward(
    sft: &Sft,
    m: &CylinderMeasure,
    h: &SlidingBlockCode,
    len: usize,
    tol: &BigRational,
) -> Result<PushforwardTable, SftError> {
    assert!(len >= 2 * h.radius() + 1, "cylinder length below 2r+1");
    require_invertible(sft, h)?;
    let weights = pushforward_weights(sft, m, h, len);
    let mut distance = BigRational::zero();
    for (w, hw) in &weights {
        let diff = hw.sub(&m.word_weight(w)).abs();
        if diff.hi > distance {
            distance = diff.hi.clone();
        }
    }
    let preserved = &distance <= tol;
    Ok(PushforwardTable {
        len,
        weights,
        distance_to_source: distance,
        preserved,
    })
}

/// Markov transport of an exact measure under a radius-0 automorphism
/// (a symbol permutation): π'(h(a)) = π(a), P'(h(a), h(b)) = P(a, b).
/// The push-forward stays 1-step Markov and its entropy terms are
/// identical.
pub fn pushforward_markov(
    sft: &Sft,
    m: &CylinderMeasure,
    h: &SlidingBlockCode,
    tol: &BigRational,
) -> Result<CylinderMeasure, SftError> {
    if h.radius() != 0 {
        return Err(SftError::InvalidRule(
            "Markov transport requires a radius-0 code".into(),
        ));
    }
    require_invertible(sft, h)?;
    let (pi, p) = m
        .exact_data()
        .ok_or_else(|| SftError::InvalidMeasure("Markov transport requires exact data".into()))?;
    let k = sft.alphabet_size();
    let img = |a: usize| h.rule()[&vec![a as u8][..]] as usize;
    let mut pi2 = vec![BigRational::zero(); k];
    let mut p2 = vec![vec![BigRational::zero(); k]; k];
    for a in 0..k {
        pi2[img(a)] = pi[a].clone();
        for b in 0..k {
            p2[img(a)][img(b)] = p[a][b].clone();
        }
    }
    CylinderMeasure::from_rational(sft, pi2, p2, tol)
}

/// Cylinder weights of μ_n = (1/n) Σ_{j<n} h_*ʲ m, and the
/// sup-distance between μ_n and h_*μ_n.
#[derive(Clone, Debug)]
pub struct CesaroTable {
    pub len: usize,
    pub steps: usize,
    pub weights: BTreeMap<Vec<u8>, RatInterval>,
    pub distance_to_image: BigRational,
}

pub fn cesaro_average(
    sft: &Sft,
    m: &CylinderMeasure,
    h: &SlidingBlockCode,
    steps: usize,
    len: usize,
    _tol: &BigRational,
) -> Result<CesaroTable, SftError> {
    assert!(steps >= 1);
    assert!(len >= 2 * h.radius() + 1 || h.radius() == 0);
    require_invertible(sft, h)?;
    // weight tables of h_*ʲ m for j = 0..=steps (one extra for h_*μ_n)
    let mut tables: Vec<BTreeMap<Vec<u8>, RatInterval>> = Vec::with_capacity(steps + 1);
    let mut power = SlidingBlockCode::identity(sft);
    for _ in 0..=steps {
        tables.push(pushforward_weights(sft, m, &power, len));
        power = SlidingBlockCode::compose(h, &power, sft);
    }
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(steps as u64));
    let average = |range: std::ops::Range<usize>| -> BTreeMap<Vec<u8>, RatInterval> {
        let mut acc: BTreeMap<Vec<u8>, RatInterval> = tables[0]
            .keys()
            .map(|w| (w.clone(), RatInterval::zero()))
            .collect();
        for j in range {
            for (w, v) in &tables[j] {
                let slot = acc.get_mut(w).unwrap();
                *slot = slot.add(v);
            }
        }
        acc.into_iter().map(|(w, v)| (w, v.scale(&inv_n))).collect()
    };
    let mu_n = average(0..steps);
    let image = average(1..steps + 1);
    let mut distance = BigRational::zero();
    for (w, v) in &mu_n {
        let diff = v.sub(&image[w]).abs();
        if diff.hi > distance {
            distance = diff.hi.clone();
        }
    }
    Ok(CesaroTable {
        len,
        steps,
        weights: mu_n,
        distance_to_image: distance,
    })
}

/// Parse {"pi": [...], "P": [[...]]} with rational strings into an
/// exact measure on the given SFT.
pub fn measure_from_json(
    sft: &Sft,
    value: &serde_json::Value,
    tol: &BigRational,
) -> Result<CylinderMeasure, SftError> {
    let bad = |m: &str| SftError::InvalidMeasure(m.to_string());
    let obj = value.as_object().ok_or_else(|| bad("expected object"))?;
    let parse_entry = |v: &serde_json::Value| -> Result<BigRational, SftError> {
        match v {
            serde_json::Value::String(s) => {
                parse_rational(s).ok_or_else(|| bad("unparseable rational"))
            }
            serde_json::Value::Number(n) => {
                parse_rational(&n.to_string()).ok_or_else(|| bad("unparseable number"))
            }
            _ => Err(bad("entries must be rational strings or numbers")),
        }
    };
    let pi = obj
        .get("pi")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing pi array"))?
        .iter()
        .map(parse_entry)
        .collect::<Result<Vec<_>, _>>()?;
    let p = obj
        .get("P")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing P array"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| bad("P rows must be arrays"))?
                .iter()
                .map(parse_entry)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    CylinderMeasure::from_rational(sft, pi, p, tol)
}

#[cfg(test)]
mod tests {
    use super::super::{build_sft, full_shift, golden_mean, sft_entropy};
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bernoulli(sft: &Sft, ps: &[(i64, i64)], tol: &BigRational) -> CylinderMeasure {
        let pi: Vec<BigRational> = ps.iter().map(|&(n, d)| rat(n, d)).collect();
        let p = vec![pi.clone(); ps.len()];
        CylinderMeasure::from_rational(sft, pi, p, tol).unwrap()
    }

    fn swap(sft: &Sft) -> SlidingBlockCode {
        let rule = [(vec![0u8], 1u8), (vec![1], 0)].into_iter().collect();
        SlidingBlockCode::new(sft, 0, rule).unwrap()
    }

    #[test]
    fn parry_full_shifts_are_uniform_bernoulli() {
        let tol = rat(1, 1_000_000);
        for k in [2usize, 3] {
            let s = full_shift(k);
            let m = parry_measure(&s, &tol).unwrap();
            assert!(m.is_exact());
            let (pi, p) = m.exact_data().unwrap();
            for a in 0..k {
                assert_eq!(pi[a], rat(1, k as i64));
                for b in 0..k {
                    assert_eq!(p[a][b], rat(1, k as i64));
                }
            }
        }
    }

    #[test]
    fn parry_golden_mean() {
        let tol = rat(1, 1_000_000);
        let s = golden_mean();
        let m = parry_measure(&s, &tol).unwrap();
        // P(0→0) = 1/φ ≈ 0.6180, P(0→1) ≈ 0.3820, P(1→0) = 1
        assert!(m.transitions()[0][0].contains(&rat(618_034, 1_000_000))
            || m.transitions()[0][0].intersects(&RatInterval::new(rat(6_180, 10_000), rat(6_181, 10_000))));
        assert!(m.transitions()[0][1]
            .intersects(&RatInterval::new(rat(3_819, 10_000), rat(3_821, 10_000))));
        assert!(m.transitions()[1][0].contains(&BigRational::one()));
        assert!(m.transitions()[1][1].is_point());
        assert_eq!(m.transitions()[1][1], RatInterval::zero());
        // entropy of the Parry measure matches the topological entropy
        let h_top = sft_entropy(&s, &tol).unwrap();
        assert!(m.entropy.intersects(&h_top));
        assert!((m.entropy.midpoint() - h_top.midpoint()).abs() < rat(2, 1_000_000));
    }

    #[test]
    fn parry_requires_primitive() {
        let cycle = build_sft(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            parry_measure(&cycle, &rat(1, 100)),
            Err(SftError::NotPrimitive)
        ));
    }

    #[test]
    fn rpf_weighted_full_shift() {
        let tol = rat(1, 1_000_000);
        let s = full_shift(2);
        let m = rpf_equilibrium(&s, &[rat(2, 1), rat(1, 1)], &tol).unwrap();
        assert!(m.is_exact());
        let (pi, p) = m.exact_data().unwrap();
        assert_eq!(pi, &[rat(2, 3), rat(1, 3)][..]);
        for a in 0..2 {
            assert_eq!(p[a][0], rat(2, 3));
            assert_eq!(p[a][1], rat(1, 3));
        }
        // equal weights reduce to Parry
        let uniform = rpf_equilibrium(&s, &[rat(3, 7), rat(3, 7)], &tol).unwrap();
        let (pi_u, _) = uniform.exact_data().unwrap();
        assert_eq!(pi_u, &[rat(1, 2), rat(1, 2)][..]);

        let gm_uniform = rpf_equilibrium(&golden_mean(), &[rat(1, 1), rat(1, 1)], &tol).unwrap();
        let parry = parry_measure(&golden_mean(), &tol).unwrap();
        assert!((gm_uniform.transitions()[0][0].midpoint()
            - parry.transitions()[0][0].midpoint())
        .abs()
            < rat(1, 100_000));
    }

    #[test]
    fn pushforward_symmetric_bernoulli_preserved() {
        let tol = rat(1, 1_000_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(1, 2), (1, 2)], &tol);
        let t = pushforward(&s, &m, &swap(&s), 3, &tol).unwrap();
        assert!(t.preserved);
        assert_eq!(t.weights.len(), 8);
        for w in t.weights.values() {
            assert_eq!(*w, RatInterval::point(rat(1, 8)));
        }
    }

    #[test]
    fn pushforward_asymmetric_bernoulli_not_preserved() {
        let tol = rat(1, 1_000_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(2, 3), (1, 3)], &tol);
        let t = pushforward(&s, &m, &swap(&s), 1, &tol).unwrap();
        assert!(!t.preserved);
        assert_eq!(t.weights[&vec![0u8]], RatInterval::point(rat(1, 3)));
        assert_eq!(t.weights[&vec![1u8]], RatInterval::point(rat(2, 3)));
        assert_eq!(t.distance_to_source, rat(1, 3));
    }

    #[test]
    fn pushforward_identity_preserves_everything() {
        let tol = rat(1, 1_000_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(2, 3), (1, 3)], &tol);
        let id = SlidingBlockCode::identity(&s);
        for len in 1..=4 {
            let t = pushforward(&s, &m, &id, len, &tol).unwrap();
            assert!(t.preserved);
            assert_eq!(t.distance_to_source, BigRational::zero());
        }
    }

    #[test]
    fn pushforward_mass_and_marginals() {
        let tol = rat(1, 1_000_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(2, 3), (1, 3)], &tol);
        let t3 = pushforward(&s, &m, &swap(&s), 3, &tol).unwrap();
        let total: BigRational = t3.weights.values().map(|w| w.midpoint()).sum();
        assert_eq!(total, BigRational::one());
        // marginal consistency with the L=2 table
        let t2 = pushforward(&s, &m, &swap(&s), 2, &tol).unwrap();
        for (w, v) in &t2.weights {
            let ext: BigRational = t3
                .weights
                .iter()
                .filter(|(u, _)| u[..2] == w[..])
                .map(|(_, x)| x.midpoint())
                .sum();
            assert_eq!(ext, v.midpoint());
        }
    }

    #[test]
    fn markov_transport_keeps_entropy_terms() {
        let tol = rat(1, 1_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(2, 3), (1, 3)], &tol);
        let moved = pushforward_markov(&s, &m, &swap(&s), &tol).unwrap();
        assert_eq!(m.entropy_terms(), moved.entropy_terms());
        let (pi, _) = moved.exact_data().unwrap();
        assert_eq!(pi, &[rat(1, 3), rat(2, 3)][..]);
    }

    #[test]
    fn cesaro_recovers_symmetric_measure() {
        let tol = rat(1, 1_000_000_000);
        let s = full_shift(2);
        let m = bernoulli(&s, &[(2, 3), (1, 3)], &tol);
        let c2 = cesaro_average(&s, &m, &swap(&s), 2, 1, &tol).unwrap();
        assert_eq!(c2.weights[&vec![0u8]], RatInterval::point(rat(1, 2)));
        assert_eq!(c2.weights[&vec![1u8]], RatInterval::point(rat(1, 2)));
        assert_eq!(c2.distance_to_image, BigRational::zero());

        let c3 = cesaro_average(&s, &m, &swap(&s), 3, 1, &tol).unwrap();
        assert_eq!(c3.weights[&vec![0u8]], RatInterval::point(rat(5, 9)));
        assert_eq!(c3.weights[&vec![1u8]], RatInterval::point(rat(4, 9)));
        assert_eq!(c3.distance_to_image, rat(1, 9));

        let id = SlidingBlockCode::identity(&s);
        let c5 = cesaro_average(&s, &m, &id, 5, 1, &tol).unwrap();
        assert_eq!(c5.weights[&vec![0u8]], RatInterval::point(rat(2, 3)));
    }

    #[test]
    fn measure_json_parsing() {
        let tol = rat(1, 1_000_000);
        let s = full_shift(2);
        let v: serde_json::Value = serde_json::from_str(
            r#"{"pi": ["2/3", "1/3"], "P": [["2/3", "1/3"], ["2/3", "1/3"]]}"#,
        )
        .unwrap();
        let m = measure_from_json(&s, &v, &tol).unwrap();
        let (pi, _) = m.exact_data().unwrap();
        assert_eq!(pi, &[rat(2, 3), rat(1, 3)][..]);

        let bad: serde_json::Value =
            serde_json::from_str(r#"{"pi": ["1/2", "1/3"], "P": [["1","0"],["1","0"]]}"#).unwrap();
        assert!(measure_from_json(&s, &bad, &tol).is_err());
    }

    #[test]
    fn rejects_invalid_measures() {
        let tol = rat(1, 100);
        let s = golden_mean();
        // positive mass on the forbidden transition 1→1
        let pi = vec![rat(1, 2), rat(1, 2)];
        let p = vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]];
        assert!(matches!(
            CylinderMeasure::from_rational(&s, pi, p, &tol),
            Err(SftError::InvalidMeasure(_))
        ));
    }
}
