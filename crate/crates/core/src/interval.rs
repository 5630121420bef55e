//! Closed rational intervals with outward-rounded transcendental
//! enclosures. Every operation returns an interval that contains the
//! exact image of its inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn from_ints(lo: i64, hi: i64) -> Self {
        Self::new(
            BigRational::from_integer(lo.into()),
            BigRational::from_integer(hi.into()),
        )
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &RatInterval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    /// Strictly above 0.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatInterval {
                lo: BigRational::zero(),
                hi: self.lo.abs().max(self.hi.abs()),
            }
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> RatInterval {
        if k.is_negative() {
            RatInterval {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        } else {
            RatInterval {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        }
    }

    /// Division; the divisor must not contain 0.
    pub fn div(&self, other: &RatInterval) -> RatInterval {
        assert!(
            other.is_positive() || other.is_negative(),
            "interval division by an interval containing zero"
        );
        let inv = RatInterval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv)
    }

    /// Round endpoints outward to dyadic rationals with denominator
    /// `2^prec_bits`, bounding coefficient growth in long pipelines.
    pub fn outward_round(&self, prec_bits: u32) -> RatInterval {
        RatInterval {
            lo: round_dyadic(&self.lo, prec_bits, false),
            hi: round_dyadic(&self.hi, prec_bits, true),
        }
    }

    /// Natural logarithm, valid for intervals with `lo > 0`. The result
    /// is widened by at most `eps` beyond the exact image.
    pub fn ln(&self, eps: &BigRational) -> RatInterval {
        assert!(self.is_positive(), "ln of a non-positive interval");
        let half = eps / BigRational::from_integer(2.into());
        let lo = ln_enclosure(&self.lo, &half);
        let hi = ln_enclosure(&self.hi, &half);
        RatInterval { lo: lo.lo, hi: hi.hi }
    }

    /// Render the midpoint to `digits` decimal places.
    pub fn decimal(&self, digits: usize) -> String {
        rational_decimal(&self.midpoint(), digits)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational_decimal(&self.lo, 12),
            rational_decimal(&self.hi, 12)
        )
    }
}

/// Serialize a rational as `num/den`.
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let i: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let fdigits = frac.len() as u32;
        let fnum: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let den = BigInt::from(10u32).pow(fdigits);
        let q = BigRational::new(i * &den, den.clone())
            + BigRational::new(fnum, den) * if neg { -BigRational::one() } else { BigRational::one() };
        Some(q)
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Parse scientific notation like `1e-9` in addition to the forms
/// handled by [`parse_rational`].
pub fn parse_tolerance(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let m = parse_rational(mant)?;
        let e: i32 = exp.parse().ok()?;
        let ten = BigRational::from_integer(10.into());
        let mut q = m;
        if e >= 0 {
            for _ in 0..e {
                q *= &ten;
            }
        } else {
            for _ in 0..(-e) {
                q /= &ten;
            }
        }
        Some(q)
    } else {
        parse_rational(s)
    }
}

pub fn rational_decimal(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (a * BigRational::from_integer(scale.clone())).round();
    let scaled = scaled.to_integer();
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    let frac_str = format!("{:0>width$}", frac.to_string(), width = digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{}{}", sign, int)
    } else {
        format!("{}{}.{}", sign, int, frac_str)
    }
}

fn round_dyadic(q: &BigRational, prec_bits: u32, up: bool) -> BigRational {
    let scale = BigInt::from(1u32) << prec_bits;
    let scaled = q * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let num = if up && scaled != BigRational::from_integer(floor.clone()) {
        floor + 1
    } else {
        floor
    };
    BigRational::new(num, scale)
}

/// Certified enclosure of `ln q` for rational `q > 0`, width ≤ `eps`.
pub fn ln_enclosure(q: &BigRational, eps: &BigRational) -> RatInterval {
    assert!(q.is_positive(), "ln of non-positive rational");
    if q.is_one() {
        return RatInterval::zero();
    }
    // Write q = m * 2^e with m in [1, 2).
    let mut e: i64 = 0;
    let two = BigRational::from_integer(2.into());
    let one = BigRational::one();
    let mut m = q.clone();
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < one {
        m *= &two;
        e -= 1;
    }
    let sub_eps = eps / BigRational::from_integer(BigInt::from(2 * (e.unsigned_abs() + 1)));
    let ln_m = atanh_ln(&m, &sub_eps);
    if e == 0 {
        return ln_m.outward_round(128);
    }
    let ln2 = atanh_ln(&two, &sub_eps);
    let scaled = ln2.scale(&BigRational::from_integer(e.into()));
    ln_m.add(&scaled).outward_round(128)
}

/// ln x = 2 atanh((x-1)/(x+1)) for x in [1, 2], by power series with a
/// certified geometric tail bound.
fn atanh_ln(x: &BigRational, eps: &BigRational) -> RatInterval {
    let one = BigRational::one();
    let u = (x - &one) / (x + &one);
    if u.is_zero() {
        return RatInterval::zero();
    }
    let u2 = (&u * &u).reduced();
    let mut term = u.clone(); // u^{2k+1}
    let mut sum = BigRational::zero();
    let mut k: u64 = 0;
    loop {
        sum += &term / BigRational::from_integer((2 * k + 1).into());
        term = (&term * &u2).reduced();
        k += 1;
        // Tail bound: sum_{j>=k} u^{2j+1}/(2j+1) <= u^{2k+1} / ((2k+1)(1-u^2)).
        let tail = &term
            / (BigRational::from_integer((2 * k + 1).into()) * (BigRational::one() - &u2));
        if &(tail.clone() * BigRational::from_integer(2.into())) < eps {
            let lo = &sum * BigRational::from_integer(2.into());
            let hi = &lo + tail * BigRational::from_integer(2.into());
            return RatInterval::new(lo, hi);
        }
        // Keep the series arithmetic from ballooning.
        term = term.reduced();
    }
}
