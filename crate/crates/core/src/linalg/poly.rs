use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer polynomial; `coeffs[i]` is the degree-`i` coefficient.
/// Characteristic polynomials are stored monic: det(λI − A).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    #[serde(with = "coeff_serde")]
    coeffs: Vec<BigInt>,
}

mod coeff_serde {
    use super::*;
    use serde::de::Error;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(coeffs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let vals: Vec<serde_json::Value> = coeffs
            .iter()
            .map(crate::linalg::matrix::bigint_to_json)
            .collect();
        serde::Serialize::serialize(&vals, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let vals: Vec<serde_json::Value> = serde::Deserialize::deserialize(d)?;
        vals.iter()
            .map(|v| {
                crate::linalg::matrix::bigint_from_json(v)
                    .ok_or_else(|| D::Error::custom("polynomial coefficient must be an integer"))
            })
            .collect()
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// x^d · p(1/x): coefficient reversal.
    pub fn reversal(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn to_q(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// GCD of all coefficients (positive), 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn pretty(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            let term = if i == 0 {
                abs.to_string()
            } else {
                let pow = if i == 1 {
                    var.to_string()
                } else {
                    format!("{}^{}", var, i)
                };
                if abs.is_one() {
                    pow
                } else {
                    format!("{}{}", abs, pow)
                }
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{}", term)
                } else {
                    term
                });
            } else {
                parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, term));
            }
        }
        parts.join(" ")
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self.pretty("x"))
    }
}

/// Rational polynomial; the engine for Sturm sequences and root
/// isolation. `coeffs[i]` is the degree-`i` coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        QPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation over an interval (outward, exact rational
    /// endpoints).
    pub fn eval_interval(&self, x: &crate::interval::RatInterval) -> crate::interval::RatInterval {
        let mut acc = crate::interval::RatInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .add(&crate::interval::RatInterval::point(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.degree() == 0 {
            return QPoly::new(vec![]);
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        QPoly::new(out)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.degree() < dd || self.is_zero() {
            return (QPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        let lead = divisor.leading();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let v = &c * dc;
                rem[k + j] -= v;
            }
            quot[k] = c;
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.normalized();
        }
        a.monic()
    }

    /// Divide by leading coefficient.
    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading().clone();
        self.scale(&l.recip())
    }

    /// Rescale by a positive rational so coefficients are coprime
    /// integers; preserves signs everywhere.
    pub fn normalized(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() {
            g = BigInt::one();
        }
        QPoly::new(
            ints.iter()
                .map(|c| BigRational::from_integer(c / &g))
                .collect(),
        )
    }

    /// p / gcd(p, p'): same roots, all simple.
    pub fn squarefree_part(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return self.normalized();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q.normalized()
    }

    /// Cauchy root bound: all roots have |x| < bound.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading().abs();
        let mut max = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let v = c.abs() / &lead;
            if v > max {
                max = v;
            }
        }
        max + BigRational::one()
    }

    /// Sturm chain (signed remainder sequence, scaled positively).
    pub fn sturm_chain(&self) -> Vec<QPoly> {
        let mut chain = vec![self.normalized(), self.derivative().normalized()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().normalized());
        }
        chain
    }

    /// Number of distinct real roots in the half-open interval (a, b];
    /// requires p(a) != 0.
    pub fn count_roots_between(chain: &[QPoly], a: &BigRational, b: &BigRational) -> usize {
        let va = sign_variations_at(chain, a);
        let vb = sign_variations_at(chain, b);
        va.saturating_sub(vb)
    }

    /// Number of distinct real roots in (-inf, +inf).
    pub fn count_real_roots(chain: &[QPoly]) -> usize {
        let va = sign_variations_at_infinity(chain, false);
        let vb = sign_variations_at_infinity(chain, true);
        va.saturating_sub(vb)
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}x^{}", c, i))
            .collect();
        write!(f, "QPoly({})", parts.join(" + "))
    }
}

pub fn sign_variations_at(chain: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .collect();
    count_variations(&signs)
}

pub fn sign_variations_at_infinity(chain: &[QPoly], positive: bool) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            if p.is_zero() {
                return 0;
            }
            let mut s = if p.leading().is_positive() { 1i8 } else { -1 };
            if !positive && p.degree() % 2 == 1 {
                s = -s;
            }
            s
        })
        .collect();
    count_variations(&signs)
}

fn count_variations(signs: &[i8]) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eval_and_derivative() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]); // x^3 - 4x - 1
        assert_eq!(p.eval_int(&BigInt::from(2)), BigInt::from(-1));
        assert_eq!(p.derivative(), IntPoly::from_i64(&[-4, 0, 3]));
        assert_eq!(p.eval_rat(&rat(1, 2)), rat(-23, 8));
    }

    #[test]
    fn div_rem_exact() {
        let p = IntPoly::from_i64(&[-1, 0, 1]).to_q(); // x^2 - 1
        let d = IntPoly::from_i64(&[-1, 1]).to_q(); // x - 1
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, IntPoly::from_i64(&[1, 1]).to_q());
    }

    #[test]
    fn gcd_and_squarefree() {
        // (x-1)^2 (x+2)
        let p = IntPoly::from_i64(&[2, -3, 0, 1]).to_q();
        let sf = p.squarefree_part();
        assert_eq!(sf.degree(), 2);
        // roots 1 and -2 only
        assert!(sf.eval(&rat(1, 1)).is_zero());
        assert!(sf.eval(&rat(-2, 1)).is_zero());
    }

    #[test]
    fn sturm_counts() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]).to_q(); // three real roots
        let chain = p.sturm_chain();
        assert_eq!(QPoly::count_real_roots(&chain), 3);
        assert_eq!(
            QPoly::count_roots_between(&chain, &rat(0, 1), &rat(3, 1)),
            1
        );
        assert_eq!(
            QPoly::count_roots_between(&chain, &rat(-2, 1), &rat(0, 1)),
            2
        );
        let q = IntPoly::from_i64(&[1, 0, 1]).to_q(); // x^2 + 1
        let chain = q.sturm_chain();
        assert_eq!(QPoly::count_real_roots(&chain), 0);
    }

    #[test]
    fn root_bound_contains_roots() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]).to_q();
        let b = p.root_bound();
        let chain = p.sturm_chain();
        assert_eq!(QPoly::count_roots_between(&chain, &-b.clone(), &b), 3);
    }

    #[test]
    fn poly_json_constant_first() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[-1,-4,0,1]");
        let back: IntPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn pretty_print() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]);
        assert_eq!(p.pretty("λ"), "λ^3 - 4λ - 1");
    }
}
