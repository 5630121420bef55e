//! Certified spectra of integer polynomials and matrices: root
//! enclosures, exact hyperbolicity decisions, entropy (log-Mahler
//! measure) intervals and partially hyperbolic splittings.

mod roots;

pub use roots::{
    complex_pair_moduli, count_roots_in_disk, isolate_real_roots, refine_enclosure,
    squarefree_decomposition,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::interval::RatInterval;
use crate::linalg::{IntMatrix, IntPoly, QPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("zero polynomial has no spectrum")]
    ZeroPolynomial,
    #[error("an eigenvalue modulus could not be separated from 1")]
    UnitModulusUndecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    Real,
    ComplexPair,
}

/// A certified enclosure: for real roots the interval contains the
/// root itself; for complex-conjugate pairs it contains the common
/// modulus of the pair.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub kind: RootKind,
    pub interval: RatInterval,
    pub multiplicity: usize,
}

impl RootEnclosure {
    /// Enclosure of |λ|.
    pub fn modulus(&self) -> RatInterval {
        match self.kind {
            RootKind::Real => self.interval.abs(),
            RootKind::ComplexPair => self.interval.clone(),
        }
    }

    /// Number of polynomial roots accounted for (pairs count twice).
    pub fn root_count(&self) -> usize {
        match self.kind {
            RootKind::Real => self.multiplicity,
            RootKind::ComplexPair => 2 * self.multiplicity,
        }
    }
}

/// Isolate the spectrum of a nonconstant integer polynomial: real
/// roots to width ≤ tol, complex pairs as certified modulus intervals
/// of width ≤ tol. Multiplicities come from squarefree decomposition.
pub fn isolate_spectrum(
    p: &IntPoly,
    tol: &BigRational,
) -> Result<Vec<RootEnclosure>, SpectralError> {
    if p.is_zero() {
        return Err(SpectralError::ZeroPolynomial);
    }
    assert!(tol.is_positive(), "tolerance must be positive");
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(&p.to_q()) {
        for enc in isolate_real_roots(&factor, tol) {
            out.push(RootEnclosure {
                kind: RootKind::Real,
                interval: enc,
                multiplicity: mult,
            });
        }
        for (interval, pairs) in complex_pair_moduli(&factor, tol) {
            for _ in 0..pairs {
                out.push(RootEnclosure {
                    kind: RootKind::ComplexPair,
                    interval: interval.clone(),
                    multiplicity: mult,
                });
            }
        }
    }
    out.sort_by(|a, b| a.interval.midpoint().cmp(&b.interval.midpoint()));
    Ok(out)
}

/// Exact count of distinct roots on the unit circle of a squarefree
/// rational polynomial.
fn unit_circle_root_count(p_sf: &QPoly) -> usize {
    let one = BigRational::one();
    let mut count = 0;
    let mut q = p_sf.normalized();
    for root in [one.clone(), -one] {
        if q.eval(&root).is_zero() {
            count += 1;
            let lin = QPoly::new(vec![-root, BigRational::one()]);
            let (quot, rem) = q.div_rem(&lin);
            debug_assert!(rem.is_zero());
            q = quot;
        }
    }
    if q.degree() == 0 {
        return count;
    }
    let g = q.gcd(&q.to_reversal());
    if g.degree() == 0 {
        return count;
    }
    let t = chebyshev_transform(&g);
    let chain = t.sturm_chain();
    let two = BigRational::from_integer(2.into());
    count + 2 * QPoly::count_roots_between(&chain, &-two.clone(), &two)
}

trait Reversal {
    fn to_reversal(&self) -> QPoly;
}

impl Reversal for QPoly {
    fn to_reversal(&self) -> QPoly {
        let mut c = self.coeffs().to_vec();
        c.reverse();
        QPoly::new(c)
    }
}

/// For a monic palindromic polynomial g of even degree 2m, the
/// degree-m polynomial t with g(x) = x^m t(x + 1/x), built from the
/// recurrence P_0 = 2, P_1 = y, P_{i+1} = y P_i - P_{i-1} for
/// x^i + x^{-i} = P_i(x + 1/x).
fn chebyshev_transform(g: &QPoly) -> QPoly {
    let deg = g.degree();
    assert!(deg % 2 == 0, "self-reciprocal factor must have even degree");
    let m = deg / 2;
    let c = g.coeffs();
    let y = QPoly::new(vec![BigRational::zero(), BigRational::one()]);
    let mut p_prev = QPoly::new(vec![BigRational::from_integer(2.into())]); // P_0
    let mut p_cur = y.clone(); // P_1
    let mut t = QPoly::new(vec![c[m].clone()]);
    for i in 1..=m {
        t = t.add(&p_cur.scale(&c[m + i]));
        if i < m {
            let next = y.mul(&p_cur).sub(&p_prev);
            p_prev = p_cur;
            p_cur = next;
        }
    }
    t
}

/// Exact hyperbolicity decision: true iff no root lies on the unit
/// circle. No floating point; reproducible bit-for-bit.
pub fn is_hyperbolic(p: &IntPoly) -> Result<bool, SpectralError> {
    if p.is_zero() {
        return Err(SpectralError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(true);
    }
    // Eigenvalue 0 cannot occur for a |det|=1 characteristic
    // polynomial; a zero constant term is rejected outright.
    if p.coeffs()[0].is_zero() {
        return Ok(false);
    }
    let one = BigInt::one();
    if p.eval_int(&one).is_zero() || p.eval_int(&-one).is_zero() {
        return Ok(false);
    }
    let sf = p.to_q().squarefree_part();
    let g = sf.gcd(&sf.to_reversal());
    if g.degree() == 0 {
        return Ok(true);
    }
    let t = chebyshev_transform(&g).squarefree_part();
    let chain = t.sturm_chain();
    let two = BigRational::from_integer(2.into());
    Ok(QPoly::count_roots_between(&chain, &-two.clone(), &two) == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VsOne {
    Below,
    OnCircle,
    Above,
}

#[derive(Clone, Debug)]
pub struct ClassifiedModulus {
    pub kind: RootKind,
    pub modulus: RatInterval,
    pub multiplicity: usize,
    /// Number of roots at this modulus per multiplicity unit
    /// (1 for real, 2 for a pair).
    pub weight: usize,
    pub vs_one: VsOne,
}

/// Certified moduli with an exact classification against the unit
/// circle. Refines internally until every modulus is decided; roots
/// genuinely on the circle are returned as exact [1, 1].
pub fn classified_moduli(
    p: &IntPoly,
    tol: &BigRational,
) -> Result<Vec<ClassifiedModulus>, SpectralError> {
    if p.is_zero() {
        return Err(SpectralError::ZeroPolynomial);
    }
    let one = BigRational::one();
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(&p.to_q()) {
        let circle = unit_circle_root_count(&factor);
        let mut cur_tol = tol.clone();
        let floor = tol / BigRational::from_integer(BigInt::from(1u128 << 80));
        loop {
            let mut items: Vec<(RootKind, RatInterval, usize)> = Vec::new();
            for enc in isolate_real_roots(&factor, &cur_tol) {
                items.push((RootKind::Real, enc.abs(), 1));
            }
            for (interval, pairs) in complex_pair_moduli(&factor, &cur_tol) {
                for _ in 0..pairs {
                    items.push((RootKind::ComplexPair, interval.clone(), 2));
                }
            }
            let undecided_weight: usize = items
                .iter()
                .filter(|(_, m, _)| m.contains(&one))
                .map(|(_, _, w)| w)
                .sum();
            if undecided_weight == circle {
                for (kind, m, w) in items {
                    let vs_one = if m.contains(&one) {
                        VsOne::OnCircle
                    } else if m.hi < one {
                        VsOne::Below
                    } else {
                        VsOne::Above
                    };
                    let modulus = if vs_one == VsOne::OnCircle {
                        RatInterval::point(one.clone())
                    } else {
                        m
                    };
                    out.push(ClassifiedModulus {
                        kind,
                        modulus,
                        multiplicity: mult,
                        weight: w,
                        vs_one,
                    });
                }
                break;
            }
            cur_tol /= BigRational::from_integer(16.into());
            if cur_tol < floor {
                return Err(SpectralError::UnitModulusUndecided);
            }
        }
    }
    out.sort_by(|a, b| a.modulus.midpoint().cmp(&b.modulus.midpoint()));
    Ok(out)
}

/// Interval of width ≤ tol around Σ_{|λ|>1} log|λ| (the log-Mahler
/// measure of the characteristic polynomial). Exactly [0, 0] when no
/// modulus exceeds 1.
pub fn entropy_interval(m: &IntMatrix, tol: &BigRational) -> Result<RatInterval, SpectralError> {
    entropy_of_poly(&m.charpoly(), tol)
}

pub fn entropy_of_poly(p: &IntPoly, tol: &BigRational) -> Result<RatInterval, SpectralError> {
    assert!(tol.is_positive());
    let deg = p.degree().max(1);
    let mut cur_tol = tol.clone();
    loop {
        let classified = classified_moduli(p, &cur_tol)?;
        let expanding: Vec<&ClassifiedModulus> = classified
            .iter()
            .filter(|c| c.vs_one == VsOne::Above)
            .collect();
        if expanding.is_empty() {
            return Ok(RatInterval::zero());
        }
        let ln_eps = tol / BigRational::from_integer(BigInt::from(4 * deg));
        let mut total = RatInterval::zero();
        for c in &expanding {
            let contribution = c
                .modulus
                .ln(&ln_eps)
                .scale(&BigRational::from_integer(BigInt::from(c.weight * c.multiplicity)));
            total = total.add(&contribution);
        }
        if &total.width() <= tol {
            if total.lo.is_negative() {
                // expanding moduli have lo > 1, so ln stays positive
                total.lo = BigRational::zero();
            }
            return Ok(total);
        }
        cur_tol /= BigRational::from_integer(16.into());
    }
}

/// Full spectrum report for an integer matrix.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub enclosures: Vec<RootEnclosure>,
    pub hyperbolic: bool,
    pub stable_dim: usize,
    pub unstable_dim: usize,
    pub entropy: RatInterval,
}

pub fn spectrum_report(m: &IntMatrix, tol: &BigRational) -> Result<SpectrumReport, SpectralError> {
    let p = m.charpoly();
    let enclosures = isolate_spectrum(&p, tol)?;
    let classified = classified_moduli(&p, tol)?;
    let stable_dim = classified
        .iter()
        .filter(|c| c.vs_one == VsOne::Below)
        .map(|c| c.weight * c.multiplicity)
        .sum();
    let unstable_dim = classified
        .iter()
        .filter(|c| c.vs_one == VsOne::Above)
        .map(|c| c.weight * c.multiplicity)
        .sum();
    Ok(SpectrumReport {
        enclosures,
        hyperbolic: is_hyperbolic(&p)?,
        stable_dim,
        unstable_dim,
        entropy: entropy_of_poly(&p, tol)?,
    })
}

/// Result of the partially hyperbolic splitting detection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhSplitting {
    /// Certified invariant splitting with expanding block E^u and the
    /// complementary (center-stable) block E^c.
    Split {
        unstable_dim: usize,
        center_dim: usize,
        hyperbolic: bool,
    },
    /// Certified: no eigenvalue modulus exceeds 1.
    CertifiedAbsent,
    /// Could not be decided at the precision floor.
    Undecided,
}

pub fn ph_splitting(m: &IntMatrix, tol: &BigRational) -> Result<PhSplitting, SpectralError> {
    let p = m.charpoly();
    let classified = match classified_moduli(&p, tol) {
        Ok(c) => c,
        Err(SpectralError::UnitModulusUndecided) => return Ok(PhSplitting::Undecided),
        Err(e) => return Err(e),
    };
    let unstable_dim: usize = classified
        .iter()
        .filter(|c| c.vs_one == VsOne::Above)
        .map(|c| c.weight * c.multiplicity)
        .sum();
    if unstable_dim == 0 {
        return Ok(PhSplitting::CertifiedAbsent);
    }
    let total: usize = classified.iter().map(|c| c.weight * c.multiplicity).sum();
    Ok(PhSplitting::Split {
        unstable_dim,
        center_dim: total - unstable_dim,
        hyperbolic: is_hyperbolic(&p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn section4_a() -> IntMatrix {
        IntMatrix::from_i64(&[&[0, 1, 1], &[2, 1, 0], &[1, 0, -1]])
    }

    #[test]
    fn spectrum_of_section4_matrix() {
        let p = section4_a().charpoly();
        let enc = isolate_spectrum(&p, &rat(1, 10_000)).unwrap();
        assert_eq!(enc.len(), 3);
        assert!(enc.iter().all(|e| e.kind == RootKind::Real));
        assert!(enc[0].interval.lo > rat(-187, 100) && enc[0].interval.hi < rat(-186, 100));
        assert!(enc[1].interval.lo > rat(-26, 100) && enc[1].interval.hi < rat(-25, 100));
        assert!(enc[2].interval.lo > rat(211, 100) && enc[2].interval.hi < rat(212, 100));
    }

    #[test]
    fn double_root_multiplicity() {
        let p = IntPoly::from_i64(&[1, -2, 1]); // (x-1)^2
        let enc = isolate_spectrum(&p, &rat(1, 1000)).unwrap();
        assert_eq!(enc.len(), 1);
        assert_eq!(enc[0].multiplicity, 2);
        assert!(enc[0].interval.contains(&rat(1, 1)));
    }

    #[test]
    fn golden_quadratic_roots() {
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let enc = isolate_spectrum(&p, &rat(1, 10000)).unwrap();
        assert_eq!(enc.len(), 2);
        // (3±√5)/2 ≈ 0.381966, 2.618034
        assert!(enc[0].interval.contains_interval(&RatInterval::new(
            rat(381_966, 1_000_000),
            rat(381_967, 1_000_000)
        )) || enc[0].interval.intersects(&RatInterval::new(
            rat(381_966, 1_000_000),
            rat(381_967, 1_000_000)
        )));
        assert!(enc[1].interval.intersects(&RatInterval::new(
            rat(2_618_033, 1_000_000),
            rat(2_618_034, 1_000_000)
        )));
    }

    #[test]
    fn hyperbolicity_decisions() {
        assert_eq!(is_hyperbolic(&IntPoly::from_i64(&[1, -3, 1])), Ok(true));
        assert_eq!(is_hyperbolic(&IntPoly::from_i64(&[1, 0, 1])), Ok(false)); // ±i
        assert_eq!(is_hyperbolic(&IntPoly::from_i64(&[1, -2, 1])), Ok(false)); // root 1
        assert_eq!(is_hyperbolic(&IntPoly::from_i64(&[-1, -4, 0, 1])), Ok(true));
        assert_eq!(
            is_hyperbolic(&IntPoly::zero()),
            Err(SpectralError::ZeroPolynomial)
        );
        // Lehmer's polynomial has two roots on the unit circle... no:
        // it has exactly one root outside and one inside; the rest lie
        // on the circle, so it is not hyperbolic.
        let lehmer = IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert_eq!(is_hyperbolic(&lehmer), Ok(false));
    }

    #[test]
    fn entropy_cat_map() {
        let cat = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let e = entropy_interval(&cat, &rat(1, 1_000_000)).unwrap();
        // log((3+√5)/2) ≈ 0.9624236501
        assert!(e.lo < rat(9_624_237, 10_000_000));
        assert!(e.hi > rat(9_624_236, 10_000_000));
        assert!(e.width() <= rat(1, 1_000_000));
    }

    #[test]
    fn entropy_identity_is_zero_point() {
        let id = IntMatrix::identity(3);
        let e = entropy_interval(&id, &rat(1, 1000)).unwrap();
        assert_eq!(e, RatInterval::zero());
    }

    #[test]
    fn entropy_with_circle_roots() {
        // companion-like: block diag of cat map and rotation [[0,-1],[1,0]]
        let m = IntMatrix::from_i64(&[
            &[2, 1, 0, 0],
            &[1, 1, 0, 0],
            &[0, 0, 0, -1],
            &[0, 0, 1, 0],
        ]);
        let e = entropy_interval(&m, &rat(1, 100_000)).unwrap();
        assert!(e.lo < rat(9_624_237, 10_000_000));
        assert!(e.hi > rat(9_624_236, 10_000_000));
    }

    #[test]
    fn spectrum_report_dims() {
        let a = section4_a();
        let rep = spectrum_report(&a, &rat(1, 10_000)).unwrap();
        assert!(rep.hyperbolic);
        assert_eq!(rep.stable_dim, 1);
        assert_eq!(rep.unstable_dim, 2);
        // entropy ≈ 1.3700
        assert!(rep.entropy.lo > rat(136, 100));
        assert!(rep.entropy.hi < rat(138, 100));
    }

    #[test]
    fn ph_splitting_cases() {
        let cat = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(
            ph_splitting(&cat, &rat(1, 1000)).unwrap(),
            PhSplitting::Split {
                unstable_dim: 1,
                center_dim: 1,
                hyperbolic: true
            }
        );
        let diag = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert_eq!(
            ph_splitting(&diag, &rat(1, 1000)).unwrap(),
            PhSplitting::Split {
                unstable_dim: 1,
                center_dim: 1,
                hyperbolic: false
            }
        );
        let b = IntMatrix::from_i64(&[&[2, 1, 1], &[2, 3, 0], &[1, 0, 1]]);
        assert_eq!(
            ph_splitting(&b, &rat(1, 1000)).unwrap(),
            PhSplitting::Split {
                unstable_dim: 2,
                center_dim: 1,
                hyperbolic: true
            }
        );
        let id = IntMatrix::identity(2);
        assert_eq!(
            ph_splitting(&id, &rat(1, 1000)).unwrap(),
            PhSplitting::CertifiedAbsent
        );
    }

    #[test]
    fn refining_tol_shrinks_enclosures() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]);
        let coarse = isolate_spectrum(&p, &rat(1, 100)).unwrap();
        let fine = isolate_spectrum(&p, &rat(1, 100_000)).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            assert!(c.interval.contains_interval(&f.interval));
        }
    }
}
