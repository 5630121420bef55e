//! Sliding block codes (Curtis–Hedlund–Lyndon form), bounded inverse
//! search, automorphism enumeration, and the periodic-orbit power
//! criterion.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{enumerate_periodic_words, least_rotation, Sft, SftError};

/// A shift-commuting map given by a local rule on allowed
/// (2·radius+1)-words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockCode {
    radius: usize,
    rule: BTreeMap<Vec<u8>, u8>,
}

impl SlidingBlockCode {
    /// Validate totality on allowed windows and admissibility of the
    /// induced image (checked at the (2r+2)-word level).
    pub fn new(
        sft: &Sft,
        radius: usize,
        rule: BTreeMap<Vec<u8>, u8>,
    ) -> Result<SlidingBlockCode, SftError> {
        let windows = sft.allowed_words(2 * radius + 1);
        for w in &windows {
            match rule.get(w) {
                None => {
                    return Err(SftError::InvalidRule(format!(
                        "rule undefined on allowed word {:?}",
                        w
                    )))
                }
                Some(&s) if (s as usize) >= sft.alphabet_size() => {
                    return Err(SftError::InvalidRule(format!(
                        "rule output {} outside alphabet",
                        s
                    )))
                }
                _ => {}
            }
        }
        for (w, _) in rule.iter() {
            if w.len() != 2 * radius + 1 {
                return Err(SftError::InvalidRule(format!(
                    "rule key {:?} has wrong length",
                    w
                )));
            }
        }
        let code = SlidingBlockCode { radius, rule };
        for u in sft.allowed_words(2 * radius + 2) {
            let a = code.rule[&u[..2 * radius + 1]];
            let b = code.rule[&u[1..]];
            if !sft.allows(a, b) {
                return Err(SftError::InvalidRule(format!(
                    "image of {:?} leaves the subshift",
                    u
                )));
            }
        }
        Ok(code)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn rule(&self) -> &BTreeMap<Vec<u8>, u8> {
        &self.rule
    }

    pub fn identity(sft: &Sft) -> SlidingBlockCode {
        Self::shift_power(sft, 0)
    }

    /// σᵏ as a radius-|k| code: w ↦ w[|k| + k].
    pub fn shift_power(sft: &Sft, k: i64) -> SlidingBlockCode {
        let r = k.unsigned_abs() as usize;
        let rule = sft
            .allowed_words(2 * r + 1)
            .into_iter()
            .map(|w| {
                let v = w[(r as i64 + k) as usize];
                (w, v)
            })
            .collect();
        SlidingBlockCode { radius: r, rule }
    }

    /// Image of a finite word (length ≥ 2r+1): output length
    /// len − 2r, aligned to the input's center.
    pub fn apply_word(&self, w: &[u8]) -> Vec<u8> {
        let span = 2 * self.radius + 1;
        assert!(w.len() >= span);
        w.windows(span).map(|win| self.rule[win]).collect()
    }

    /// Image of the periodic point …www… as a cyclic word of the same
    /// length.
    pub fn apply_cyclic(&self, w: &[u8]) -> Vec<u8> {
        let n = w.len() as i64;
        let r = self.radius as i64;
        (0..n)
            .map(|i| {
                let win: Vec<u8> = (i - r..=i + r)
                    .map(|j| w[j.rem_euclid(n) as usize])
                    .collect();
                self.rule[&win]
            })
            .collect()
    }

    /// Same map presented at a larger radius.
    pub fn extend_to_radius(&self, sft: &Sft, big: usize) -> SlidingBlockCode {
        assert!(big >= self.radius);
        let pad = big - self.radius;
        let rule = sft
            .allowed_words(2 * big + 1)
            .into_iter()
            .map(|w| {
                let v = self.rule[&w[pad..w.len() - pad]];
                (w, v)
            })
            .collect();
        SlidingBlockCode { radius: big, rule }
    }

    /// outer ∘ inner, radius r_outer + r_inner.
    pub fn compose(outer: &SlidingBlockCode, inner: &SlidingBlockCode, sft: &Sft) -> SlidingBlockCode {
        let radius = outer.radius + inner.radius;
        let rule = sft
            .allowed_words(2 * radius + 1)
            .into_iter()
            .map(|w| {
                let mid = inner.apply_word(&w);
                let v = outer.rule[&mid[..]];
                (w, v)
            })
            .collect();
        SlidingBlockCode { radius, rule }
    }

    /// Equality as maps: compare rules at a common radius.
    pub fn equals_on(&self, other: &SlidingBlockCode, sft: &Sft) -> bool {
        let big = self.radius.max(other.radius);
        self.extend_to_radius(sft, big).rule == other.extend_to_radius(sft, big).rule
    }

    /// Is this code the identity map?
    pub fn is_identity_on(&self, sft: &Sft) -> bool {
        self.rule.iter().all(|(w, &v)| w[self.radius] == v)
            && sft
                .allowed_words(2 * self.radius + 1)
                .iter()
                .all(|w| self.rule.contains_key(w))
    }
}

/// Outcome of the bounded inverse search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InverseSearch {
    Found(SlidingBlockCode),
    /// Two distinct periodic points with the same image.
    RefutedInjective { pair: (Vec<u8>, Vec<u8>) },
    /// A word with no preimage: the code is not surjective.
    RefutedSurjective { word: Vec<u8> },
    /// Neither found nor refuted within the radius budget.
    NotFoundAtBudget,
}

/// Search for an inverse block code of radius ≤ budget and verify
/// both compositions are the identity at the word level.
pub fn find_inverse(sft: &Sft, code: &SlidingBlockCode, budget: usize) -> InverseSearch {
    let r = code.radius;
    // Injectivity refutation on periodic points.
    let horizon = (2 * r + 2).max(4);
    for n in 1..=horizon {
        let mut images: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
        for w in sft.allowed_words(n) {
            if !sft.cyclic_word_allowed(&w) {
                continue;
            }
            let v = code.apply_cyclic(&w);
            if let Some(prev) = images.insert(v, w.clone()) {
                return InverseSearch::RefutedInjective { pair: (prev, w) };
            }
        }
    }
    for s in 0..=budget {
        match try_inverse_radius(sft, code, s) {
            InverseAttempt::Found(g) => return InverseSearch::Found(g),
            InverseAttempt::NoPreimage(word) => {
                return InverseSearch::RefutedSurjective { word }
            }
            InverseAttempt::Conflict => continue,
        }
    }
    InverseSearch::NotFoundAtBudget
}

enum InverseAttempt {
    Found(SlidingBlockCode),
    NoPreimage(Vec<u8>),
    Conflict,
}

fn try_inverse_radius(sft: &Sft, code: &SlidingBlockCode, s: usize) -> InverseAttempt {
    let r = code.radius;
    // Preimages of each (2s+1)-word are (2s+2r+1)-words; the inverse
    // rule needs all their center symbols to agree.
    let mut centers: HashMap<Vec<u8>, u8> = HashMap::new();
    let mut conflict = false;
    for u in sft.allowed_words(2 * s + 2 * r + 1) {
        let v = code.apply_word(&u);
        let c = u[s + r];
        match centers.entry(v) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(e) => {
                if *e.get() != c {
                    conflict = true;
                    break;
                }
            }
        }
    }
    if conflict {
        return InverseAttempt::Conflict;
    }
    // Every allowed (2s+1)-word must have a preimage; a missing one
    // proves non-surjectivity (larger radii only restrict further).
    for v in sft.allowed_words(2 * s + 1) {
        if !centers.contains_key(&v) {
            return InverseAttempt::NoPreimage(v);
        }
    }
    let rule: BTreeMap<Vec<u8>, u8> = sft
        .allowed_words(2 * s + 1)
        .into_iter()
        .map(|v| {
            let c = centers[&v];
            (v, c)
        })
        .collect();
    let g = SlidingBlockCode { radius: s, rule };
    let gf = SlidingBlockCode::compose(&g, code, sft);
    let fg = SlidingBlockCode::compose(code, &g, sft);
    if gf.is_identity_on(sft) && fg.is_identity_on(sft) {
        InverseAttempt::Found(g)
    } else {
        InverseAttempt::Conflict
    }
}

/// All radius-≤r block codes that are automorphisms of the subshift,
/// in canonical rule order. Invertibility decided by inverse search
/// with radius budget 3r+1.
pub fn enumerate_automorphisms(sft: &Sft, r: usize) -> Result<Vec<SlidingBlockCode>, SftError> {
    let words = sft.allowed_words(2 * r + 1);
    let k = sft.alphabet_size();
    let nrules = (k as u128).checked_pow(words.len() as u32);
    let nrules = match nrules {
        Some(n) if n <= 1 << 20 => n as u64,
        _ => return Err(SftError::RadiusTooLarge),
    };
    let budget = 3 * r + 1;
    let mut found: Vec<SlidingBlockCode> = (0..nrules)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rule = BTreeMap::new();
            let mut rem = idx;
            for w in &words {
                rule.insert(w.clone(), (rem % k as u64) as u8);
                rem /= k as u64;
            }
            let code = SlidingBlockCode::new(sft, r, rule).ok()?;
            match find_inverse(sft, &code, budget) {
                InverseSearch::Found(_) => Some(code),
                _ => None,
            }
        })
        .collect();
    found.sort_by(|a, b| {
        let va: Vec<u8> = a.rule.values().copied().collect();
        let vb: Vec<u8> = b.rule.values().copied().collect();
        va.cmp(&vb)
    });
    Ok(found)
}

/// Verdict of the periodic-orbit power criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremAVerdict {
    /// h maps every tested orbit to itself with constant shift k and
    /// equals σᵏ exactly as a block code.
    PowerDetected(i64),
    /// witness: the lexicographic representative of an orbit h does
    /// not map to itself.
    NotOrbitPreserving { witness: Vec<u8> },
    /// Orbits preserved but the shifts are not consistent with a
    /// single power (or the rule-level check failed).
    Inconsistent { witness: Option<(Vec<u8>, Vec<u8>)> },
}

/// Test whether h preserves every shift-orbit of prime period ≤
/// max_period and, if the normalized shifts n(p) ∈ (−π(p)/2, π(p)/2]
/// are constant ≡ k on long orbits, verify h = σᵏ exactly.
pub fn theorem_a_check(
    sft: &Sft,
    h: &SlidingBlockCode,
    max_period: usize,
) -> Result<TheoremAVerdict, SftError> {
    if !matches!(
        find_inverse(sft, h, 3 * h.radius + 1),
        InverseSearch::Found(_)
    ) {
        return Err(SftError::NotInvertible);
    }
    let orbits = enumerate_periodic_words(sft, max_period);
    let mut shifts: Vec<(Vec<u8>, i64, i64)> = Vec::new(); // (rep, period, n)
    for o in &orbits {
        let v = h.apply_cyclic(&o.word);
        if least_rotation(&v) != o.word {
            return Ok(TheoremAVerdict::NotOrbitPreserving {
                witness: o.word.clone(),
            });
        }
        let n = o.period as i64;
        // v = σʲ(w): v[i] = w[i+j]; unique mod n on prime-period words
        let j = (0..n)
            .find(|&j| {
                (0..n).all(|i| v[i as usize] == o.word[((i + j) % n) as usize])
            })
            .expect("rotation exists");
        let mut shift = j;
        if 2 * shift > n {
            shift -= n;
        }
        shifts.push((o.word.clone(), n, shift));
    }
    let Some((k_rep, _, k)) = shifts.iter().max_by_key(|(_, p, _)| *p).cloned() else {
        return Ok(TheoremAVerdict::Inconsistent { witness: None });
    };
    for (rep, period, shift) in &shifts {
        let consistent = if *period > 2 * k.abs() {
            *shift == k
        } else {
            (*shift - k).rem_euclid(*period) == 0
        };
        if !consistent {
            return Ok(TheoremAVerdict::Inconsistent {
                witness: Some((k_rep, rep.clone())),
            });
        }
    }
    let sigma_k = SlidingBlockCode::shift_power(sft, k);
    if h.equals_on(&sigma_k, sft) {
        Ok(TheoremAVerdict::PowerDetected(k))
    } else {
        Ok(TheoremAVerdict::Inconsistent { witness: None })
    }
}

// JSON form: {"radius": r, "rule": {"010": "1", ...}} with words as
// digit strings.
#[derive(Serialize, Deserialize)]
struct CodeJson {
    radius: usize,
    rule: BTreeMap<String, String>,
}

impl Serialize for SlidingBlockCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rule = self
            .rule
            .iter()
            .map(|(w, v)| {
                let key: String = w.iter().map(|c| char::from(b'0' + c)).collect();
                (key, v.to_string())
            })
            .collect();
        CodeJson {
            radius: self.radius,
            rule,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SlidingBlockCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CodeJson::deserialize(d)?;
        let mut rule = BTreeMap::new();
        for (key, val) in raw.rule {
            let w: Option<Vec<u8>> = key
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect();
            let w = w.ok_or_else(|| serde::de::Error::custom("rule key must be digits"))?;
            if w.len() != 2 * raw.radius + 1 {
                return Err(serde::de::Error::custom("rule key length != 2r+1"));
            }
            let v: u8 = val
                .parse()
                .map_err(|_| serde::de::Error::custom("rule value must be a symbol"))?;
            rule.insert(w, v);
        }
        Ok(SlidingBlockCode {
            radius: raw.radius,
            rule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{full_shift, golden_mean};
    use super::*;

    fn swap(sft: &Sft) -> SlidingBlockCode {
        let rule = [(vec![0u8], 1u8), (vec![1], 0)].into_iter().collect();
        SlidingBlockCode::new(sft, 0, rule).unwrap()
    }

    #[test]
    fn radius0_autos_of_full_2_shift() {
        let s = full_shift(2);
        let autos = enumerate_automorphisms(&s, 0).unwrap();
        assert_eq!(autos.len(), 2);
        assert!(autos[0].is_identity_on(&s));
        assert_eq!(autos[1], swap(&s));
    }

    #[test]
    fn radius1_autos_of_full_2_shift() {
        let s = full_shift(2);
        let autos = enumerate_automorphisms(&s, 1).unwrap();
        assert_eq!(autos.len(), 6);
        // σ⁻¹, id, σ, and their compositions with swap
        let sigma = SlidingBlockCode::shift_power(&s, 1);
        let sigma_inv = SlidingBlockCode::shift_power(&s, -1);
        let sw = swap(&s);
        let expected = [
            sigma_inv.clone(),
            SlidingBlockCode::identity(&s),
            sigma.clone(),
            SlidingBlockCode::compose(&sigma_inv, &sw, &s),
            sw.clone(),
            SlidingBlockCode::compose(&sigma, &sw, &s),
        ];
        for e in &expected {
            assert!(autos.iter().any(|a| a.equals_on(e, &s)), "missing {:?}", e);
        }
    }

    #[test]
    fn golden_mean_radius0_autos() {
        let s = golden_mean();
        let autos = enumerate_automorphisms(&s, 0).unwrap();
        assert_eq!(autos.len(), 1);
        assert!(autos[0].is_identity_on(&s));
        // the swap rule is not even a valid code: 00 ↦ 11 forbidden
        let rule = [(vec![0u8], 1u8), (vec![1], 0)].into_iter().collect();
        assert!(SlidingBlockCode::new(&s, 0, rule).is_err());
    }

    #[test]
    fn inverse_search_results() {
        let s = full_shift(2);
        let sigma = SlidingBlockCode::shift_power(&s, 1);
        let InverseSearch::Found(inv) = find_inverse(&s, &sigma, 4) else {
            panic!("shift must be invertible");
        };
        assert!(inv.equals_on(&SlidingBlockCode::shift_power(&s, -1), &s));

        let const0 = SlidingBlockCode::new(
            &s,
            0,
            [(vec![0u8], 0u8), (vec![1], 0)].into_iter().collect(),
        )
        .unwrap();
        assert!(matches!(
            find_inverse(&s, &const0, 2),
            InverseSearch::RefutedInjective { .. }
        ));
    }

    #[test]
    fn theorem_a_on_full_2_shift() {
        let s = full_shift(2);
        let sigma = SlidingBlockCode::shift_power(&s, 1);
        assert_eq!(
            theorem_a_check(&s, &sigma, 4).unwrap(),
            TheoremAVerdict::PowerDetected(1)
        );
        assert_eq!(
            theorem_a_check(&s, &swap(&s), 1).unwrap(),
            TheoremAVerdict::NotOrbitPreserving { witness: vec![0] }
        );
        let sswap = SlidingBlockCode::compose(&sigma, &swap(&s), &s);
        assert_eq!(
            theorem_a_check(&s, &sswap, 1).unwrap(),
            TheoremAVerdict::NotOrbitPreserving { witness: vec![0] }
        );
        let non_invertible = SlidingBlockCode::new(
            &s,
            0,
            [(vec![0u8], 0u8), (vec![1], 0)].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(
            theorem_a_check(&s, &non_invertible, 2),
            Err(SftError::NotInvertible)
        );
    }

    #[test]
    fn theorem_a_exhaustive_radius_1() {
        // among all radius ≤ 1 automorphisms of the full 2-shift,
        // exactly the shift powers pass with PowerDetected
        let s = full_shift(2);
        let autos = enumerate_automorphisms(&s, 1).unwrap();
        let mut detected = 0;
        for a in &autos {
            match theorem_a_check(&s, a, 4).unwrap() {
                TheoremAVerdict::PowerDetected(k) => {
                    detected += 1;
                    assert!(a.equals_on(&SlidingBlockCode::shift_power(&s, k), &s));
                }
                TheoremAVerdict::NotOrbitPreserving { .. } => {}
                v => panic!("unexpected verdict {:?}", v),
            }
        }
        assert_eq!(detected, 3); // σ⁻¹, id, σ
    }

    #[test]
    fn code_json_round_trip() {
        let s = full_shift(2);
        let sigma = SlidingBlockCode::shift_power(&s, 1);
        let js = serde_json::to_string(&sigma).unwrap();
        let back: SlidingBlockCode = serde_json::from_str(&js).unwrap();
        assert_eq!(back, sigma);
        assert!(js.contains("\"radius\":1"));
    }

    #[test]
    fn commutes_with_shift_by_construction() {
        // h ∘ σ = σ ∘ h at the rule level for every enumerated code
        let s = full_shift(2);
        let sigma = SlidingBlockCode::shift_power(&s, 1);
        for a in enumerate_automorphisms(&s, 1).unwrap() {
            let hs = SlidingBlockCode::compose(&a, &sigma, &s);
            let sh = SlidingBlockCode::compose(&sigma, &a, &s);
            assert!(hs.equals_on(&sh, &s));
        }
    }
}
