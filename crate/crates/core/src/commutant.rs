//! Integer commutant lattices { X : AX = XA }, their unit groups in a
//! coordinate box, and relation structure of commuting hyperbolic
//! matrices: power relations, identity relations, log-eigenvalue-ratio
//! independence certificates, and centralizer entropy sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::interval::RatInterval;
use crate::linalg::{integer_kernel, IntMatrix, QPoly};
use crate::spectral::{
    self, entropy_interval, is_hyperbolic, isolate_real_roots, SpectralError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommutantError {
    #[error("matrices do not commute")]
    NotCommuting,
    #[error("independence certificate requires a squarefree real spectrum")]
    ComplexSpectrumUnsupported,
    #[error("matrix is not hyperbolic")]
    NotHyperbolic,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Z-basis of the commutant lattice of a fixed base matrix, in
/// canonical Hermite-reduced coordinates on the n²-dimensional
/// ambient lattice (row-major vectorization).
#[derive(Clone, Debug)]
pub struct CommutantLattice {
    base: IntMatrix,
    basis: Vec<IntMatrix>,
}

impl CommutantLattice {
    pub fn base(&self) -> &IntMatrix {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntMatrix] {
        &self.basis
    }

    /// Reconstruct Σ cᵢ · basisᵢ.
    pub fn combination(&self, coords: &[BigInt]) -> IntMatrix {
        assert_eq!(coords.len(), self.rank());
        let n = self.base.dim();
        let mut acc = IntMatrix::zero(n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = &acc + &b.scale(c);
            }
        }
        acc
    }

    /// Coordinates of a lattice member; None when X is not in the
    /// lattice. Exact back-substitution against the Hermite basis.
    pub fn coordinates_of(&self, x: &IntMatrix) -> Option<Vec<BigInt>> {
        let n = self.base.dim();
        if x.dim() != n {
            return None;
        }
        let mut residual: Vec<BigInt> = x.entries().to_vec();
        let mut coords = vec![BigInt::zero(); self.rank()];
        for (i, b) in self.basis.iter().enumerate() {
            let flat = b.entries();
            let pivot = flat.iter().position(|v| !v.is_zero())?;
            // Hermite rows: pivot entry of basis i is the first
            // nonzero coordinate not hit by earlier rows.
            let (q, r) = residual[pivot].div_rem(&flat[pivot]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (res, v) in residual.iter_mut().zip(flat) {
                    *res -= &q * v;
                }
            }
            coords[i] = q;
        }
        if residual.iter().all(|v| v.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &IntMatrix) -> bool {
        self.coordinates_of(x).is_some()
    }
}

/// Canonical Z-basis of { X : AX = XA }, computed as the integer
/// kernel of the linear system Σ_k A[i][k] X[k][j] − X[i][k] A[k][j] = 0.
pub fn commutant_basis(a: &IntMatrix) -> CommutantLattice {
    let n = a.dim();
    let vars = n * n;
    let mut rows = Vec::with_capacity(vars);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![BigInt::zero(); vars];
            for k in 0..n {
                // coefficient of X[k][j] from (AX)[i][j]
                row[k * n + j] += a.get(i, k);
                // coefficient of X[i][k] from -(XA)[i][j]
                row[i * n + k] -= a.get(k, j);
            }
            rows.push(row);
        }
    }
    let kernel = integer_kernel(&rows);
    let basis: Vec<IntMatrix> = kernel
        .into_iter()
        .map(|v| IntMatrix::new(n, v))
        .collect();
    for b in &basis {
        debug_assert!(b.commutes_with(a));
    }
    CommutantLattice {
        base: a.clone(),
        basis,
    }
}

/// One enumerated unit with its lattice coordinates.
#[derive(Clone, Debug)]
pub struct UnitMatrix {
    pub coords: Vec<BigInt>,
    pub matrix: IntMatrix,
}

/// All X = Σ cᵢ basisᵢ with |cᵢ| ≤ box and |det X| = 1, in
/// lexicographic coordinate order. Schedule-independent: results are
/// sorted canonically after the parallel scan.
pub fn enumerate_units(lattice: &CommutantLattice, box_bound: u32) -> Vec<UnitMatrix> {
    assert!(box_bound >= 1, "box bound must be >= 1");
    let rank = lattice.rank();
    let side = 2 * box_bound as i64 + 1;
    let total: i64 = (0..rank).fold(1i64, |acc, _| acc.saturating_mul(side));
    let mut units: Vec<UnitMatrix> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut coords = Vec::with_capacity(rank);
            let mut rem = idx;
            for _ in 0..rank {
                coords.push(BigInt::from(rem % side - box_bound as i64));
                rem /= side;
            }
            coords.reverse();
            let x = lattice.combination(&coords);
            if x.det().abs().is_one() {
                Some(UnitMatrix { coords, matrix: x })
            } else {
                None
            }
        })
        .collect();
    units.sort_by(|a, b| a.coords.cmp(&b.coords));
    units
}

/// Outcome of a bounded relation search or an independence
/// certification.
#[derive(Clone, Debug, PartialEq)]
pub enum RelationCertificate {
    /// Exponents verified by exact re-multiplication. For power
    /// relations the vector is [n, m] with Aⁿ = Bᵐ; for identity
    /// relations it is the exponent tuple with Π matᵢ^{eᵢ} = I.
    FoundRelation { exponents: Vec<i64> },
    /// Pairwise-disjoint enclosures of log|μᵢ| / log|λᵢ|; already two
    /// distinct ratios preclude Aⁿ = Bᵐ with nm ≠ 0.
    Independence { ratios: Vec<RatInterval> },
    /// Bounded search exhausted without a verdict. Carries the ratio
    /// enclosures when an independence attempt computed them.
    Inconclusive { ratios: Option<Vec<RatInterval>> },
}

/// Search 0 < |n|, |m| ≤ max_exp for Aⁿ = Bᵐ; the returned relation is
/// minimal in graded order (|n|+|m|, positives first).
pub fn find_power_relations(
    a: &IntMatrix,
    b: &IntMatrix,
    max_exp: u32,
) -> Result<RelationCertificate, CommutantError> {
    if !a.commutes_with(b) {
        return Err(CommutantError::NotCommuting);
    }
    let mut relations: Vec<(i64, i64)> = Vec::new();
    let mut a_powers = std::collections::HashMap::new();
    for n in exponent_range(max_exp) {
        let m = a.pow(n).map_err(|_| CommutantError::NotHyperbolic)?;
        a_powers.entry(m.entries().to_vec()).or_insert(n);
    }
    for m in exponent_range(max_exp) {
        let bm = b.pow(m).map_err(|_| CommutantError::NotHyperbolic)?;
        if let Some(&n) = a_powers.get(bm.entries()) {
            relations.push((n, m));
        }
    }
    relations.sort_by_key(|&(n, m)| (n.abs() + m.abs(), exp_key(n), exp_key(m)));
    match relations.first() {
        Some(&(n, m)) => {
            debug_assert_eq!(a.pow(n).unwrap(), b.pow(m).unwrap());
            Ok(RelationCertificate::FoundRelation {
                exponents: vec![n, m],
            })
        }
        None => Ok(RelationCertificate::Inconclusive { ratios: None }),
    }
}

fn exponent_range(max_exp: u32) -> impl Iterator<Item = i64> {
    (1..=max_exp as i64).flat_map(|k| [k, -k])
}

fn exp_key(e: i64) -> (i64, u8) {
    (e.abs(), if e > 0 { 0 } else { 1 })
}

/// Search exponent tuples (graded order, positives first) with
/// Π matᵢ^{eᵢ} = I.
pub fn find_identity_relations(
    mats: &[IntMatrix],
    max_exp: u32,
) -> Result<RelationCertificate, CommutantError> {
    assert!(!mats.is_empty());
    let n = mats[0].dim();
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            if !a.commutes_with(b) {
                return Err(CommutantError::NotCommuting);
            }
        }
    }
    // Cache powers of each generator.
    let m = max_exp as i64;
    let mut powers: Vec<std::collections::HashMap<i64, IntMatrix>> = Vec::new();
    for mat in mats {
        let mut map = std::collections::HashMap::new();
        for e in -m..=m {
            map.insert(e, mat.pow(e).map_err(|_| CommutantError::NotHyperbolic)?);
        }
        powers.push(map);
    }
    let mut tuples: Vec<Vec<i64>> = Vec::new();
    collect_tuples(mats.len(), m, &mut vec![], &mut tuples);
    tuples.retain(|t| t.iter().any(|&e| e != 0));
    tuples.sort_by(|x, y| {
        let gx: i64 = x.iter().map(|e| e.abs()).sum();
        let gy: i64 = y.iter().map(|e| e.abs()).sum();
        gx.cmp(&gy).then_with(|| {
            let kx: Vec<_> = x.iter().map(|&e| exp_key(e)).collect();
            let ky: Vec<_> = y.iter().map(|&e| exp_key(e)).collect();
            kx.cmp(&ky)
        })
    });
    let identity = IntMatrix::identity(n);
    for t in &tuples {
        let mut prod = IntMatrix::identity(n);
        for (i, &e) in t.iter().enumerate() {
            if e != 0 {
                prod = &prod * &powers[i][&e];
            }
        }
        if prod == identity {
            return Ok(RelationCertificate::FoundRelation {
                exponents: t.clone(),
            });
        }
    }
    Ok(RelationCertificate::Inconclusive { ratios: None })
}

fn collect_tuples(k: usize, m: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for e in -m..=m {
        prefix.push(e);
        collect_tuples(k, m, prefix, out);
        prefix.pop();
    }
}

/// Certify A and B power-independent by pairing eigenvalues along
/// shared eigenspaces and enclosing the ratios log|μᵢ| / log|λᵢ|.
///
/// Because charpoly(A) is squarefree, A is non-derogatory and every
/// commuting B is a rational polynomial g(A); the pairing μᵢ = g(λᵢ)
/// is then exact rather than numerically matched.
pub fn certify_independence(
    a: &IntMatrix,
    b: &IntMatrix,
    tol: &BigRational,
) -> Result<RelationCertificate, CommutantError> {
    if !a.commutes_with(b) {
        return Err(CommutantError::NotCommuting);
    }
    let pa = a.charpoly();
    let pb = b.charpoly();
    if !is_hyperbolic(&pa)? || !is_hyperbolic(&pb)? {
        return Err(CommutantError::NotHyperbolic);
    }
    let paq = pa.to_q();
    if paq.gcd(&paq.derivative()).degree() != 0 {
        return Err(CommutantError::ComplexSpectrumUnsupported);
    }
    let n = a.dim();
    let chain = paq.sturm_chain();
    if QPoly::count_real_roots(&chain) != n {
        return Err(CommutantError::ComplexSpectrumUnsupported);
    }
    let g = express_in_powers(a, b).ok_or(CommutantError::ComplexSpectrumUnsupported)?;

    let sf = paq.squarefree_part();
    let mut root_tol = tol.clone();
    loop {
        let roots = isolate_real_roots(&sf, &root_tol);
        debug_assert_eq!(roots.len(), n);
        let ln_eps = tol / BigRational::from_integer(BigInt::from(64));
        let mut ratios = Vec::with_capacity(n);
        let mut widths_ok = true;
        for lam in &roots {
            let mu = eval_interval(&g, lam);
            let mu_abs = mu.abs();
            if !mu_abs.is_positive() {
                widths_ok = false;
                break;
            }
            let lam_abs = lam.abs();
            if !lam_abs.is_positive() || lam_abs.contains(&BigRational::one()) {
                widths_ok = false;
                break;
            }
            let ratio = mu_abs.ln(&ln_eps).div(&lam_abs.ln(&ln_eps));
            if &ratio.width() > tol {
                widths_ok = false;
                break;
            }
            ratios.push(ratio);
        }
        if widths_ok {
            let mut disjoint = true;
            'outer: for i in 0..ratios.len() {
                for j in i + 1..ratios.len() {
                    if ratios[i].intersects(&ratios[j]) {
                        disjoint = false;
                        break 'outer;
                    }
                }
            }
            return Ok(if disjoint {
                RelationCertificate::Independence { ratios }
            } else {
                RelationCertificate::Inconclusive {
                    ratios: Some(ratios),
                }
            });
        }
        root_tol /= BigRational::from_integer(32.into());
        // Ratios of exact powers (B = A^k) never separate; stop once
        // the enclosures are far tighter than the requested tolerance.
        if root_tol < tol / BigRational::from_integer(BigInt::from(1u128 << 100)) {
            return Ok(RelationCertificate::Inconclusive { ratios: None });
        }
    }
}

/// Solve B = Σ g_k A^k over Q (possible exactly when A is
/// non-derogatory and B commutes with A).
fn express_in_powers(a: &IntMatrix, b: &IntMatrix) -> Option<QPoly> {
    let n = a.dim();
    let vars = n;
    // Columns: vec(A^k); rows: n^2 equations.
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(vars);
    let mut pw = IntMatrix::identity(n);
    for k in 0..vars {
        cols.push(
            pw.entries()
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect(),
        );
        if k + 1 < vars {
            pw = &pw * a;
        }
    }
    let rhs: Vec<BigRational> = b
        .entries()
        .iter()
        .map(|e| BigRational::from_integer(e.clone()))
        .collect();
    solve_least_system(&cols, &rhs).map(QPoly::new)
}

/// Solve a tall consistent linear system given by columns; returns
/// None if inconsistent.
fn solve_least_system(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = rhs.len();
    let vars = cols.len();
    let mut aug: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..vars {
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].clone().recip();
        for j in c..=vars {
            aug[r][j] = &aug[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=vars {
                    let s = &f * &aug[r][j];
                    aug[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistency: zero row with nonzero rhs.
    for row in &aug[r..] {
        if row[..vars].iter().all(|v| v.is_zero()) && !row[vars].is_zero() {
            return None;
        }
    }
    let mut sol = vec![BigRational::zero(); vars];
    for (row_idx, &c) in pivots.iter().enumerate() {
        sol[c] = aug[row_idx][vars].clone();
    }
    // Verify (the system may be over-determined).
    for i in 0..rows {
        let mut acc = BigRational::zero();
        for (c, col) in cols.iter().enumerate() {
            acc += &sol[c] * &col[i];
        }
        if acc != rhs[i] {
            return None;
        }
    }
    Some(sol)
}

fn eval_interval(p: &QPoly, x: &RatInterval) -> RatInterval {
    p.eval_interval(x)
}

/// One entry of the entropy set: a unit of the commutant with its
/// certified entropy interval.
#[derive(Clone, Debug)]
pub struct EntropySetEntry {
    pub coords: Vec<BigInt>,
    pub matrix: IntMatrix,
    pub entropy: RatInterval,
}

#[derive(Clone, Debug)]
pub struct EntropySet {
    pub entries: Vec<EntropySetEntry>,
    /// For k = 1..=4: does every computed entropy lie within tol of
    /// the lattice { n · h_top(A)/k : n ≥ 0 }?
    pub lattice_fit: Vec<(u32, bool)>,
    pub base_entropy: RatInterval,
}

impl EntropySet {
    /// Smallest k whose lattice fits, if any: step h_top(A)/k.
    pub fn detected_step(&self) -> Option<u32> {
        self.lattice_fit.iter().find(|(_, fit)| *fit).map(|(k, _)| *k)
    }
}

/// Entropies of all units of the commutant of A inside the coordinate
/// box, sorted by entropy midpoint, with an arithmetic-progression
/// report against h_top(A)/k for k ≤ 4.
pub fn entropy_set(
    a: &IntMatrix,
    box_bound: u32,
    tol: &BigRational,
) -> Result<EntropySet, CommutantError> {
    if !is_hyperbolic(&a.charpoly())? {
        return Err(CommutantError::NotHyperbolic);
    }
    let lattice = commutant_basis(a);
    let units = enumerate_units(&lattice, box_bound);
    let fine = tol / BigRational::from_integer(4.into());
    let mut entries: Vec<EntropySetEntry> = units
        .into_par_iter()
        .map(|u| {
            let entropy = entropy_interval(&u.matrix, &fine)?;
            Ok(EntropySetEntry {
                coords: u.coords,
                matrix: u.matrix,
                entropy,
            })
        })
        .collect::<Result<_, CommutantError>>()?;
    entries.sort_by(|x, y| {
        x.entropy
            .midpoint()
            .cmp(&y.entropy.midpoint())
            .then_with(|| x.coords.cmp(&y.coords))
    });

    let base_entropy = entropy_interval(a, &fine)?;
    let h = base_entropy.midpoint();
    let mut lattice_fit = Vec::new();
    for k in 1..=4u32 {
        let step = &h / BigRational::from_integer(k.into());
        let fits = entries.iter().all(|e| {
            let mid = e.entropy.midpoint();
            if step.is_zero() {
                return mid.abs() <= *tol;
            }
            let n = (&mid / &step).round();
            !n.is_negative() && (mid - n * &step).abs() <= *tol
        });
        lattice_fit.push((k, fits));
    }
    Ok(EntropySet {
        entries,
        lattice_fit,
        base_entropy,
    })
}

/// Spectral re-export used by callers that already depend on this
/// module.
pub use spectral::entropy_of_poly;

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cat() -> IntMatrix {
        IntMatrix::from_i64(&[&[2, 1], &[1, 1]])
    }

    fn section4_a() -> IntMatrix {
        IntMatrix::from_i64(&[&[0, 1, 1], &[2, 1, 0], &[1, 0, -1]])
    }

    fn section4_b() -> IntMatrix {
        IntMatrix::from_i64(&[&[2, 1, 1], &[2, 3, 0], &[1, 0, 1]])
    }

    #[test]
    fn commutant_ranks() {
        assert_eq!(commutant_basis(&section4_a()).rank(), 3);
        assert_eq!(commutant_basis(&cat()).rank(), 2);
        assert_eq!(commutant_basis(&IntMatrix::identity(2)).rank(), 4);
    }

    #[test]
    fn commutant_contains_polynomials_in_a() {
        for a in [cat(), section4_a()] {
            let lat = commutant_basis(&a);
            assert!(lat.contains(&IntMatrix::identity(a.dim())));
            assert!(lat.contains(&a));
            assert!(lat.contains(&(&a * &a)));
        }
    }

    #[test]
    fn section4_lattice_matches_paper_family() {
        let a = section4_a();
        let lat = commutant_basis(&a);
        let id = IntMatrix::identity(3);
        let a2 = &a * &a;
        // paper's coordinate matrices: B(1,0,0) = I + A,
        // B(0,1,0) = -I + A + A², B(0,0,1) = I
        let e1 = &id + &a;
        let e2 = &(&id.scale(&BigInt::from(-1)) + &a) + &a2;
        let e3 = id.clone();
        for m in [&e1, &e2, &e3] {
            assert!(lat.contains(m));
            assert!(m.commutes_with(&a));
        }
        // B = A + 2I has paper coordinates (1, 0, 1): e1 + e3
        let b = section4_b();
        assert_eq!(&e1 + &e3, b);
        // and the two bases span the same lattice
        let coords: Vec<_> = [&e1, &e2, &e3]
            .iter()
            .map(|m| lat.coordinates_of(m).unwrap())
            .collect();
        let det3 = IntMatrix::new(3, coords.concat()).det();
        assert!(det3.abs().is_one(), "paper family is a basis change");
    }

    #[test]
    fn units_of_cat_commutant() {
        let lat = commutant_basis(&cat());
        let units = enumerate_units(&lat, 3);
        let f = IntMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        for m in [
            IntMatrix::identity(2),
            f.clone(),
            cat(),
            IntMatrix::from_i64(&[&[3, 2], &[2, 1]]),
        ] {
            assert!(units.iter().any(|u| u.matrix == m), "missing {:?}", m);
            let neg = m.scale(&BigInt::from(-1));
            assert!(units.iter().any(|u| u.matrix == neg));
        }
        for u in &units {
            assert!(u.matrix.det().abs().is_one());
            assert!(u.matrix.commutes_with(&cat()));
        }
    }

    #[test]
    fn units_contain_section4_b() {
        let lat = commutant_basis(&section4_a());
        let units = enumerate_units(&lat, 2);
        assert!(units.iter().any(|u| u.matrix == section4_b()));
        // box 1 always contains ±I
        let small = enumerate_units(&lat, 1);
        let id = IntMatrix::identity(3);
        assert!(small.iter().any(|u| u.matrix == id));
        assert!(small.iter().any(|u| u.matrix == id.scale(&BigInt::from(-1))));
    }

    #[test]
    fn power_relations() {
        let f = IntMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        assert_eq!(
            find_power_relations(&cat(), &f, 5).unwrap(),
            RelationCertificate::FoundRelation {
                exponents: vec![1, 2]
            }
        );
        assert_eq!(
            find_power_relations(&cat(), &cat(), 1).unwrap(),
            RelationCertificate::FoundRelation {
                exponents: vec![1, 1]
            }
        );
        let rel = find_power_relations(&section4_a(), &section4_b(), 20).unwrap();
        assert_eq!(rel, RelationCertificate::Inconclusive { ratios: None });
        let non_commuting = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            find_power_relations(&cat(), &non_commuting, 2),
            Err(CommutantError::NotCommuting)
        );
    }

    #[test]
    fn identity_relations() {
        let f = IntMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        assert_eq!(
            find_identity_relations(&[cat(), f], 3).unwrap(),
            RelationCertificate::FoundRelation {
                exponents: vec![1, -2]
            }
        );
        assert_eq!(
            find_identity_relations(&[IntMatrix::identity(2)], 1).unwrap(),
            RelationCertificate::FoundRelation {
                exponents: vec![1]
            }
        );
        assert_eq!(
            find_identity_relations(&[section4_a(), section4_b()], 10).unwrap(),
            RelationCertificate::Inconclusive { ratios: None }
        );
    }

    #[test]
    fn independence_certificate_section4() {
        let cert = certify_independence(&section4_a(), &section4_b(), &rat(1, 1000)).unwrap();
        let RelationCertificate::Independence { ratios } = cert else {
            panic!("expected an independence certificate, got {:?}", cert);
        };
        assert_eq!(ratios.len(), 3);
        // sorted by eigenvalue: λ₁ ≈ -1.8608, λ₂ ≈ -0.2541, λ₃ ≈ 2.1149
        // ratios ≈ -3.18, -0.41, 1.89 (the paper prints -3.26 for the first)
        assert!(ratios[0].contains(&rat(-318, 100)) || ratios[0].intersects(&RatInterval::new(rat(-319, 100), rat(-317, 100))));
        assert!(ratios[1].intersects(&RatInterval::new(rat(-42, 100), rat(-40, 100))));
        assert!(ratios[2].intersects(&RatInterval::new(rat(188, 100), rat(190, 100))));
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(!ratios[i].intersects(&ratios[j]));
            }
        }
        // the paper's printed first ratio is NOT in the certified enclosure
        assert!(!ratios[0].contains(&rat(-326, 100)));
    }

    #[test]
    fn independence_inconclusive_for_powers() {
        let a = cat();
        let cert = certify_independence(&a, &a, &rat(1, 100)).unwrap();
        assert!(matches!(cert, RelationCertificate::Inconclusive { .. }));
        let a2 = a.pow(2).unwrap();
        let cert = certify_independence(&a, &a2, &rat(1, 100)).unwrap();
        assert!(matches!(cert, RelationCertificate::Inconclusive { .. }));
        // and the bounded search finds the relation instead
        assert_eq!(
            find_power_relations(&a, &a2, 2).unwrap(),
            RelationCertificate::FoundRelation {
                exponents: vec![2, 1]
            }
        );
    }

    #[test]
    fn entropy_set_cat_map() {
        let set = entropy_set(&cat(), 3, &rat(1, 1_000_000)).unwrap();
        // Units are ±F^k (F = Fibonacci matrix); box 3 in canonical
        // coordinates covers k ∈ {-4..3}, so the entropies are
        // 0, log φ, 2 log φ, 3 log φ, 4 log φ (the last from F⁻⁴ at
        // coordinates (2, -3)). log φ ≈ 0.4812118250596.
        let logphi = rat(4_812_118, 10_000_000);
        let mut mids: Vec<BigRational> = set
            .entries
            .iter()
            .map(|e| e.entropy.midpoint())
            .collect();
        mids.dedup_by(|a, b| (&*a - &*b).abs() < rat(1, 10_000));
        assert_eq!(mids.len(), 5);
        for (i, m) in mids.iter().enumerate() {
            let expect = &logphi * BigRational::from_integer(i.into());
            assert!((m - expect).abs() < rat(1, 1_000), "entry {} got {}", i, m);
        }
        // h_top(A) = 2 log φ; the progression step is h/2
        assert_eq!(set.detected_step(), Some(2));
        assert!(!set.lattice_fit[0].1);
        assert!(set.lattice_fit[1].1);
    }

    #[test]
    fn entropy_set_rejects_non_hyperbolic() {
        assert_eq!(
            entropy_set(&IntMatrix::identity(2), 1, &rat(1, 100)).err(),
            Some(CommutantError::NotHyperbolic)
        );
    }

    #[test]
    fn unit_closure_within_box() {
        let lat = commutant_basis(&cat());
        let units = enumerate_units(&lat, 3);
        for u in &units {
            for v in &units {
                let prod = &u.matrix * &v.matrix;
                if let Some(coords) = lat.coordinates_of(&prod) {
                    if coords.iter().all(|c| c.abs() <= BigInt::from(3)) {
                        assert!(units.iter().any(|w| w.matrix == prod));
                    }
                }
            }
        }
    }
}
