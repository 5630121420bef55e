//! Real root isolation and certified modulus enclosures for complex
//! conjugate pairs. Everything here is exact rational arithmetic; no
//! floating point is involved anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::RatInterval;
use crate::linalg::QPoly;

/// Yun's squarefree decomposition: returns pairs (factor, multiplicity)
/// with the factors squarefree, pairwise coprime, and
/// p = c · Π factor_i^{mult_i}.
pub fn squarefree_decomposition(p: &QPoly) -> Vec<(QPoly, usize)> {
    assert!(!p.is_zero());
    if p.degree() == 0 {
        return vec![];
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    if a0.is_constant() {
        return vec![(p.normalized(), 1)];
    }
    let (mut b, r) = p.div_rem(&a0);
    debug_assert!(r.is_zero());
    let (mut c, r) = dp.div_rem(&a0);
    debug_assert!(r.is_zero());
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let d = c.sub(&b.derivative());
        if d.is_zero() {
            if b.degree() > 0 {
                out.push((b.normalized(), i));
            }
            break;
        }
        let g = b.gcd(&d);
        if g.degree() > 0 {
            out.push((g.normalized(), i));
        }
        let (nb, r) = b.div_rem(&g);
        debug_assert!(r.is_zero());
        let (nc, r) = d.div_rem(&g);
        debug_assert!(r.is_zero());
        b = nb;
        c = nc;
        i += 1;
        if b.degree() == 0 {
            break;
        }
    }
    out
}

/// Disjoint closed intervals of width ≤ tol, one per distinct real
/// root of a squarefree polynomial. Rational roots come back as point
/// intervals. Sorted in increasing order.
pub fn isolate_real_roots(p: &QPoly, tol: &BigRational) -> Vec<RatInterval> {
    assert!(!p.is_zero());
    if p.degree() == 0 {
        return vec![];
    }
    let chain = p.sturm_chain();
    let bound = p.root_bound();
    let a = -bound.clone();
    let b = bound;
    debug_assert!(!p.eval(&a).is_zero() && !p.eval(&b).is_zero());
    let total = QPoly::count_roots_between(&chain, &a, &b);
    let mut out = Vec::new();
    subdivide(p, &chain, &a, &b, total, tol, &mut out);
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

fn subdivide(
    p: &QPoly,
    chain: &[QPoly],
    a: &BigRational,
    b: &BigRational,
    count: usize,
    tol: &BigRational,
    out: &mut Vec<RatInterval>,
) {
    if count == 0 {
        return;
    }
    if count == 1 {
        out.push(refine_sign_change(p, a.clone(), b.clone(), tol));
        return;
    }
    let two = BigRational::from_integer(2.into());
    let m = (a + b) / &two;
    if p.eval(&m).is_zero() {
        out.push(RatInterval::point(m.clone()));
        // Shrink toward m from both sides until m is the only root in
        // the margin, then recurse on the outer pieces.
        let mut w = (b - a) / &two;
        let (left_edge, right_edge);
        loop {
            w /= &two;
            let l = &m - &w;
            let r = &m + &w;
            if p.eval(&l).is_zero() || p.eval(&r).is_zero() {
                continue;
            }
            if QPoly::count_roots_between(chain, &l, &r) == 1 {
                left_edge = l;
                right_edge = r;
                break;
            }
        }
        let left_count = QPoly::count_roots_between(chain, a, &left_edge);
        let right_count = QPoly::count_roots_between(chain, &right_edge, b);
        subdivide(p, chain, a, &left_edge, left_count, tol, out);
        subdivide(p, chain, &right_edge, b, right_count, tol, out);
        return;
    }
    let left = QPoly::count_roots_between(chain, a, &m);
    subdivide(p, chain, a, &m, left, tol, out);
    subdivide(p, chain, &m, b, count - left, tol, out);
}

/// Bisection on a sign change; p(a) and p(b) nonzero with opposite
/// signs bracketing a single simple root.
fn refine_sign_change(
    p: &QPoly,
    mut a: BigRational,
    mut b: BigRational,
    tol: &BigRational,
) -> RatInterval {
    let sa = p.eval(&a).is_positive();
    debug_assert!(p.eval(&a).is_positive() != p.eval(&b).is_positive());
    let two = BigRational::from_integer(2.into());
    while &(&b - &a) > tol {
        let m = (&a + &b) / &two;
        let v = p.eval(&m);
        if v.is_zero() {
            return RatInterval::point(m);
        }
        if v.is_positive() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    RatInterval::new(a, b)
}

/// Shrink an existing bracketing interval further (monotone
/// refinement: the result is contained in the input).
pub fn refine_enclosure(p: &QPoly, enc: &RatInterval, tol: &BigRational) -> RatInterval {
    if enc.is_point() {
        return enc.clone();
    }
    refine_sign_change(p, enc.lo.clone(), enc.hi.clone(), tol)
}

// ---------------------------------------------------------------------------
// Root counting inside a disk via the argument principle.
//
// The circle |z| = r is rationally parametrized by
//   z(t) = r (1 - t^2 + 2 i t) / (1 + t^2),  t ∈ (-∞, ∞),
// traversed counterclockwise (missing only z = -r). Writing
//   N(t) = Σ_k a_k r^k (1 - t^2 + 2 i t)^k (1 + t^2)^{d-k} = A(t) + i B(t),
// the number of roots inside the disk equals the winding number of the
// curve (A(t), B(t)) around the origin, computed exactly by counting
// signed crossings of a real half-axis.
// ---------------------------------------------------------------------------

/// Number of roots of `p` (with multiplicity) in the open disk
/// |z| < r. Returns None when a root lies on the circle or the
/// parametrization is degenerate at z = -r; callers nudge r.
pub fn count_roots_in_disk(p: &QPoly, r: &BigRational) -> Option<usize> {
    assert!(r.is_positive());
    let d = p.degree();
    if d == 0 {
        return Some(0);
    }
    if p.eval(&-r.clone()).is_zero() || p.eval(r).is_zero() {
        return None;
    }

    // Complex polynomial N(t) as a (re, im) pair.
    let one = BigRational::one();
    let w_re = QPoly::new(vec![one.clone(), BigRational::zero(), -one.clone()]); // 1 - t^2
    let w_im = QPoly::new(vec![BigRational::zero(), BigRational::from_integer(2.into())]); // 2t
    let s = QPoly::new(vec![one.clone(), BigRational::zero(), one.clone()]); // 1 + t^2

    // s^j for j = 0..d
    let mut s_pows = vec![QPoly::new(vec![one.clone()])];
    for j in 1..=d {
        s_pows.push(s_pows[j - 1].mul(&s));
    }

    let mut a_poly = QPoly::new(vec![]);
    let mut b_poly = QPoly::new(vec![]);
    let mut w_pow_re = QPoly::new(vec![one.clone()]);
    let mut w_pow_im = QPoly::new(vec![]);
    let mut r_pow = BigRational::one();
    for (k, coeff) in p.coeffs().iter().enumerate() {
        if !coeff.is_zero() {
            let scale = coeff * &r_pow;
            let term_re = w_pow_re.mul(&s_pows[d - k]).scale(&scale);
            let term_im = w_pow_im.mul(&s_pows[d - k]).scale(&scale);
            a_poly = a_poly.add(&term_re);
            b_poly = b_poly.add(&term_im);
        }
        if k < d {
            let nre = w_pow_re.mul(&w_re).sub(&w_pow_im.mul(&w_im));
            let nim = w_pow_re.mul(&w_im).add(&w_pow_im.mul(&w_re));
            w_pow_re = nre;
            w_pow_im = nim;
            r_pow *= r;
        }
    }

    // A common real root of (A, B) is a root of p on the circle.
    let g = a_poly.gcd(&b_poly);
    if g.degree() > 0 {
        let g_chain = g.sturm_chain();
        if QPoly::count_real_roots(&g_chain) > 0 {
            return None;
        }
    }

    // As t → ±∞ the curve tends to the real axis with the sign of
    // p(-r); count signed crossings of the opposite half-axis.
    let end_sign = p.eval(&-r.clone()).is_positive();
    let b_sf = b_poly.squarefree_part();
    let b_chain = b_sf.sturm_chain();
    let bound = if b_sf.degree() == 0 {
        BigRational::one()
    } else {
        b_sf.root_bound()
    };
    let mut cuts = isolate_real_roots(&b_sf, &BigRational::new(BigInt::one(), BigInt::from(16)));
    cuts.retain(|c| !b_is_even_touch(&b_poly, c, &b_chain));

    let mut winding: i64 = 0;
    // Sample points strictly between consecutive sign-change roots.
    let mut samples = Vec::with_capacity(cuts.len() + 1);
    samples.push(-bound.clone() - BigRational::one());
    for w in cuts.windows(2) {
        samples.push((&w[0].hi + &w[1].lo) / BigRational::from_integer(2.into()));
    }
    samples.push(bound + BigRational::one());
    if cuts.is_empty() {
        return Some(0);
    }
    for (i, cut) in cuts.iter().enumerate() {
        let before = b_poly.eval(&samples[i]);
        let after = b_poly.eval(&samples[i + 1]);
        let sb = before.is_positive();
        let sa = after.is_positive();
        if sb == sa {
            continue; // even touch, no crossing
        }
        // Sign of A at the crossing point.
        let a_sign = sign_at_root(&a_poly, &b_sf, cut);
        // We count crossings of the half-axis opposite to end_sign.
        if a_sign > 0 && !end_sign {
            // crossing positive real axis: - → + is CCW (+1)
            winding += if sa { 1 } else { -1 };
        } else if a_sign < 0 && end_sign {
            // crossing negative real axis: + → - is CCW (+1)
            winding += if sa { -1 } else { 1 };
        }
    }
    debug_assert!(winding >= 0, "negative winding number");
    Some(winding.max(0) as usize)
}

fn b_is_even_touch(b: &QPoly, cut: &RatInterval, _chain: &[QPoly]) -> bool {
    if cut.is_point() {
        return false; // decided by sample signs later anyway
    }
    let before = b.eval(&cut.lo);
    let after = b.eval(&cut.hi);
    !before.is_zero() && !after.is_zero() && before.is_positive() == after.is_positive()
}

/// Sign of `target` at the unique root of `host` inside `enc`
/// (target and host coprime there). Exact: refines until no root of
/// `target` can sit inside the bracket.
fn sign_at_root(target: &QPoly, host: &QPoly, enc: &RatInterval) -> i8 {
    if enc.is_point() {
        let v = target.eval(&enc.lo);
        return if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
    }
    let t_chain = target.sturm_chain();
    let mut a = enc.lo.clone();
    let mut b = enc.hi.clone();
    let sa_host = host.eval(&a).is_positive();
    let two = BigRational::from_integer(2.into());
    loop {
        let va = target.eval(&a);
        if !va.is_zero() && QPoly::count_roots_between(&t_chain, &a, &b) == 0 {
            return if va.is_positive() { 1 } else { -1 };
        }
        let m = (&a + &b) / &two;
        let hv = host.eval(&m);
        if hv.is_zero() {
            let v = target.eval(&m);
            return if v.is_positive() { 1 } else { -1 };
        }
        if hv.is_positive() == sa_host {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Count of real roots (of a squarefree p) in the open interval (-r, r).
pub fn count_real_roots_in_symmetric(chain: &[QPoly], p: &QPoly, r: &BigRational) -> Option<usize> {
    if p.eval(r).is_zero() || p.eval(&-r.clone()).is_zero() {
        return None;
    }
    Some(QPoly::count_roots_between(chain, &-r.clone(), r))
}

/// Certified modulus enclosure for every complex-conjugate pair of a
/// squarefree real polynomial. Returns (modulus interval, pair count)
/// entries; pairs whose moduli cannot be separated at width ≤ tol share
/// an interval.
pub fn complex_pair_moduli(p: &QPoly, tol: &BigRational) -> Vec<(RatInterval, usize)> {
    let d = p.degree();
    if d < 2 {
        return vec![];
    }
    let chain = p.sturm_chain();
    let n_real = QPoly::count_real_roots(&chain);
    let n_pairs = (d - n_real) / 2;
    if n_pairs == 0 {
        return vec![];
    }

    let complex_below = |r: &BigRational| -> usize {
        // Number of conjugate pairs with modulus < r, robust against
        // boundary hits by nudging the radius.
        let mut radius = r.clone();
        let mut nudge = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20)) * r;
        loop {
            if let (Some(total), Some(real)) = (
                count_roots_in_disk(p, &radius),
                count_real_roots_in_symmetric(&chain, p, &radius),
            ) {
                return (total - real) / 2;
            }
            radius = r + &nudge;
            nudge = &nudge / BigRational::from_integer(3.into());
        }
    };

    let bound = p.root_bound() + BigRational::one();
    // Stack of (lo, hi, pairs strictly inside (lo, hi)).
    let mut todo = vec![(BigRational::zero(), bound.clone(), n_pairs)];
    let mut done: Vec<(RatInterval, usize)> = Vec::new();
    let two = BigRational::from_integer(2.into());
    while let Some((lo, hi, k)) = todo.pop() {
        if k == 0 {
            continue;
        }
        if &(&hi - &lo) <= tol {
            done.push((RatInterval::new(lo, hi), k));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        let below_mid = complex_below(&mid);
        let below_lo = if lo.is_zero() { 0 } else { complex_below(&lo) };
        let left = below_mid - below_lo;
        todo.push((lo, mid.clone(), left));
        todo.push((mid, hi, k - left));
    }
    done.sort_by(|a, b| a.0.lo.cmp(&b.0.lo));
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntPoly;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^2 (x+2)^3
        let f1 = IntPoly::from_i64(&[-1, 1]).to_q();
        let f2 = IntPoly::from_i64(&[2, 1]).to_q();
        let p = f1.mul(&f1).mul(&f2).mul(&f2).mul(&f2);
        let dec = squarefree_decomposition(&p);
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0].1, 2);
        assert_eq!(dec[1].1, 3);
        assert!(dec[0].0.eval(&rat(1, 1)).is_zero());
        assert!(dec[1].0.eval(&rat(-2, 1)).is_zero());
    }

    #[test]
    fn isolate_cubic() {
        let p = IntPoly::from_i64(&[-1, -4, 0, 1]).to_q();
        let tol = rat(1, 10_000);
        let roots = isolate_real_roots(&p, &tol);
        assert_eq!(roots.len(), 3);
        // paper's intervals ]-1.87,-1.86[, ]-0.26,-0.25[, ]2.11,2.12[
        assert!(roots[0].lo > rat(-187, 100) && roots[0].hi < rat(-186, 100));
        assert!(roots[1].lo > rat(-26, 100) && roots[1].hi < rat(-25, 100));
        assert!(roots[2].lo > rat(211, 100) && roots[2].hi < rat(212, 100));
    }

    #[test]
    fn isolate_rational_roots_exact() {
        // roots -1, 0, 1 with bisection landing on them exactly
        let p = IntPoly::from_i64(&[0, -1, 0, 1]).to_q();
        let roots = isolate_real_roots(&p, &rat(1, 1000));
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(r.width() <= rat(1, 1000));
        }
        assert!(roots[1].contains(&rat(0, 1)));
    }

    #[test]
    fn disk_counts_basic() {
        // x^2 + 1: roots ±i
        let p = IntPoly::from_i64(&[1, 0, 1]).to_q();
        assert_eq!(count_roots_in_disk(&p, &rat(2, 1)), Some(2));
        assert_eq!(count_roots_in_disk(&p, &rat(1, 2)), Some(0));
        assert_eq!(count_roots_in_disk(&p, &rat(1, 1)), None); // on circle

        // (x-3)(x^2+1)
        let q = IntPoly::from_i64(&[-3, 1, -3, 1]).to_q();
        assert_eq!(count_roots_in_disk(&q, &rat(2, 1)), Some(2));
        assert_eq!(count_roots_in_disk(&q, &rat(4, 1)), Some(3));

        // x^2 - 3x + 1: real roots 0.38, 2.61
        let g = IntPoly::from_i64(&[1, -3, 1]).to_q();
        assert_eq!(count_roots_in_disk(&g, &rat(1, 1)), Some(1));
        assert_eq!(count_roots_in_disk(&g, &rat(3, 1)), Some(2));
        assert_eq!(count_roots_in_disk(&g, &rat(1, 4)), Some(0));
    }

    #[test]
    fn complex_moduli_enclosures() {
        // x^2 - 2x + 2: roots 1 ± i, modulus sqrt(2)
        let p = IntPoly::from_i64(&[2, -2, 1]).to_q();
        let enc = complex_pair_moduli(&p, &rat(1, 10000));
        assert_eq!(enc.len(), 1);
        assert_eq!(enc[0].1, 1);
        // sqrt(2) ≈ 1.41421356
        assert!(enc[0].0.lo < rat(1_414_214, 1_000_000));
        assert!(enc[0].0.hi > rat(1_414_213, 1_000_000));

        // x^4 + 1: two pairs, both modulus 1 → shared interval
        let q = IntPoly::from_i64(&[1, 0, 0, 0, 1]).to_q();
        let enc = complex_pair_moduli(&q, &rat(1, 1000));
        let total: usize = enc.iter().map(|e| e.1).sum();
        assert_eq!(total, 2);
        for e in &enc {
            assert!(e.0.contains(&rat(1, 1)));
        }
    }
}
