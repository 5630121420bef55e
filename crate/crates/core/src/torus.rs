//! Periodic-point structure of hyperbolic toral automorphisms: exact
//! Lefschetz counts, mod-q orbit tables, orbit preservation by a
//! commuting map with the normalized integer function n(p), and
//! grid-dense periodic orbits.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::spectral::{is_hyperbolic, SpectralError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("matrix is not hyperbolic")]
    NotHyperbolic,
    #[error("matrix is not invertible mod q")]
    NotInvertibleModQ,
    #[error("matrices do not commute")]
    NotCommuting,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// A rational point (coords/q) mod 1 on the torus, coordinates
/// reduced mod q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    pub q: u64,
    pub coords: Vec<u64>,
}

/// One A-orbit in (Z/q)ⁿ: points in iteration order starting from
/// the lexicographically least representative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Orbit {
    pub representative: Vec<u64>,
    pub period: u64,
    pub points: Vec<Vec<u64>>,
}

/// The full A-orbit partition of (Z/q)ⁿ; n_values is populated by
/// orbit-preservation scans.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitTable {
    pub q: u64,
    pub dim: usize,
    pub orbits: Vec<Orbit>,
    pub n_values: Option<Vec<i64>>,
}

impl OrbitTable {
    pub fn total_points(&self) -> u64 {
        self.orbits.iter().map(|o| o.period).sum()
    }
}

/// Matrix reduced mod q, as row-major u64 entries.
fn mat_mod(a: &IntMatrix, q: u64) -> Vec<u64> {
    let qq = BigInt::from(q);
    a.entries()
        .iter()
        .map(|e| {
            let r = e.mod_floor(&qq);
            u64::try_from(r).expect("reduced residue fits u64")
        })
        .collect()
}

use num_integer::Integer;

fn apply_mod(m: &[u64], n: usize, p: &[u64], q: u64) -> Vec<u64> {
    (0..n)
        .map(|i| {
            let mut acc: u128 = 0;
            for (j, &pj) in p.iter().enumerate() {
                acc += m[i * n + j] as u128 * pj as u128;
            }
            (acc % q as u128) as u64
        })
        .collect()
}

fn invertible_mod(a: &IntMatrix, q: u64) -> bool {
    if q == 1 {
        return true;
    }
    let d = a.det().mod_floor(&BigInt::from(q));
    let d = u64::try_from(d).unwrap();
    d.gcd(&q) == 1
}

fn point_index(p: &[u64], q: u64) -> usize {
    p.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

fn index_point(mut idx: usize, n: usize, q: u64) -> Vec<u64> {
    let mut p = vec![0u64; n];
    for i in (0..n).rev() {
        p[i] = (idx % q as usize) as u64;
        idx /= q as usize;
    }
    p
}

/// Number of fixed points of f_Aⁿ on Tⁿ: |det(Aⁿ − I)|, exact.
pub fn count_periodic(a: &IntMatrix, n: u64) -> Result<BigInt, TorusError> {
    assert!(n >= 1);
    if !is_hyperbolic(&a.charpoly())? {
        return Err(TorusError::NotHyperbolic);
    }
    let an = a.pow(n as i64).expect("non-negative power");
    let d = (&an - &IntMatrix::identity(a.dim())).det().abs();
    if d.is_zero() {
        return Err(TorusError::NotHyperbolic);
    }
    Ok(d)
}

/// Full A-orbit partition of (Z/q)ⁿ, representatives lexicographically
/// least per orbit, points in iteration order.
pub fn enumerate_periodic(a: &IntMatrix, q: u64) -> Result<OrbitTable, TorusError> {
    assert!(q >= 1);
    if !invertible_mod(a, q) {
        return Err(TorusError::NotInvertibleModQ);
    }
    let n = a.dim();
    let total = (q as usize)
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 28)
        .expect("q^n too large to enumerate");
    let m = mat_mod(a, q);
    let mut visited = vec![false; total];
    let mut orbits = Vec::new();
    for start in 0..total {
        if visited[start] {
            continue;
        }
        // Scanning indices in ascending order guarantees the orbit's
        // starting point is its lexicographically least member.
        let p0 = index_point(start, n, q);
        let mut points = vec![p0.clone()];
        visited[start] = true;
        let mut p = apply_mod(&m, n, &p0, q);
        while p != p0 {
            visited[point_index(&p, q)] = true;
            let next = apply_mod(&m, n, &p, q);
            points.push(p);
            p = next;
        }
        orbits.push(Orbit {
            representative: p0,
            period: points.len() as u64,
            points,
        });
    }
    Ok(OrbitTable {
        q,
        dim: n,
        orbits,
        n_values: None,
    })
}

/// Per-q outcome of an orbit-preservation scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QScan {
    pub q: u64,
    pub all_preserved: bool,
    /// (representative, period, n(p)) for each preserved orbit, with
    /// n(p) in the window (−π(p)/2, π(p)/2].
    pub n_values: Vec<(RationalPoint, u64, i64)>,
    /// Representatives of orbits B does not map to themselves.
    pub failures: Vec<RationalPoint>,
}

/// Aggregated report over q ≤ qmax.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreservationReport {
    pub qmax: u64,
    pub scans: Vec<QScan>,
    pub all_preserved: bool,
    /// Some(k) when every scanned orbit is preserved, n ≡ k on all
    /// orbits of period > 2|k|, and n ≡ k (mod period) on the rest —
    /// evidence that h = f^k on the scanned periodic points.
    pub detected_power: Option<i64>,
    pub max_abs_n: i64,
}

/// For each q ≤ qmax with A, B invertible mod q: does B map every
/// A-orbit to itself, and with which normalized shift n(p)?
pub fn orbit_preservation_scan(
    a: &IntMatrix,
    b: &IntMatrix,
    qmax: u64,
) -> Result<PreservationReport, TorusError> {
    if !a.commutes_with(b) {
        return Err(TorusError::NotCommuting);
    }
    if !is_hyperbolic(&a.charpoly())? {
        return Err(TorusError::NotHyperbolic);
    }
    let n = a.dim();
    let scans: Vec<QScan> = (1..=qmax)
        .into_par_iter()
        .filter(|&q| invertible_mod(a, q) && invertible_mod(b, q))
        .map(|q| {
            let table = enumerate_periodic(a, q).expect("invertibility checked");
            let bm = mat_mod(b, q);
            let mut n_values = Vec::new();
            let mut failures = Vec::new();
            for orbit in &table.orbits {
                let image = apply_mod(&bm, n, &orbit.representative, q);
                match orbit.points.iter().position(|p| *p == image) {
                    Some(j) => {
                        let period = orbit.period as i64;
                        let mut shift = j as i64;
                        // normalize into (−π/2, π/2]
                        if 2 * shift > period {
                            shift -= period;
                        }
                        n_values.push((
                            RationalPoint {
                                q,
                                coords: orbit.representative.clone(),
                            },
                            orbit.period,
                            shift,
                        ));
                    }
                    None => failures.push(RationalPoint {
                        q,
                        coords: orbit.representative.clone(),
                    }),
                }
            }
            QScan {
                q,
                all_preserved: failures.is_empty(),
                n_values,
                failures,
            }
        })
        .collect();
    let all_preserved = scans.iter().all(|s| s.all_preserved);
    let max_abs_n = scans
        .iter()
        .flat_map(|s| s.n_values.iter().map(|(_, _, sh)| sh.abs()))
        .max()
        .unwrap_or(0);
    let detected_power = if all_preserved {
        detect_constant_shift(&scans)
    } else {
        None
    };
    Ok(PreservationReport {
        qmax,
        scans,
        all_preserved,
        detected_power,
        max_abs_n,
    })
}

/// Power detection: candidate k from the longest-period orbit, then a
/// window/congruence consistency check across every orbit.
fn detect_constant_shift(scans: &[QScan]) -> Option<i64> {
    let (_, _, k) = scans
        .iter()
        .flat_map(|s| s.n_values.iter())
        .max_by_key(|(_, period, _)| *period)?;
    let k = *k;
    for (_, period, shift) in scans.iter().flat_map(|s| s.n_values.iter()) {
        let period = *period as i64;
        if period > 2 * k.abs() {
            if *shift != k {
                return None;
            }
        } else if (*shift - k).rem_euclid(period) != 0 {
            return None;
        }
    }
    Some(k)
}

/// A periodic orbit visiting every cell of the g×…×g grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseWitness {
    pub q: u64,
    pub representative: RationalPoint,
    pub period: u64,
    pub grid: u64,
}

/// First (smallest q, then lexicographic representative) A-orbit in
/// (Z/q)ⁿ, q ≤ qmax, that meets every cell of the g-grid. Cell of a
/// coordinate c/q is floor(c·g / q) — exact integer arithmetic.
pub fn dense_orbit_search(
    a: &IntMatrix,
    g: u64,
    qmax: u64,
) -> Result<Option<DenseWitness>, TorusError> {
    assert!(g >= 1);
    if !is_hyperbolic(&a.charpoly())? {
        return Err(TorusError::NotHyperbolic);
    }
    let n = a.dim();
    let cells_total = (g as usize).pow(n as u32);
    for q in 1..=qmax {
        if !invertible_mod(a, q) {
            continue;
        }
        let table = enumerate_periodic(a, q)?;
        for orbit in &table.orbits {
            let mut seen = vec![false; cells_total];
            let mut count = 0usize;
            for p in &orbit.points {
                let cell = p
                    .iter()
                    .fold(0usize, |acc, &c| acc * g as usize + (c * g / q) as usize);
                if !seen[cell] {
                    seen[cell] = true;
                    count += 1;
                }
            }
            if count == cells_total {
                return Ok(Some(DenseWitness {
                    q,
                    representative: RationalPoint {
                        q,
                        coords: orbit.representative.clone(),
                    },
                    period: orbit.period,
                    grid: g,
                }));
            }
        }
    }
    Ok(None)
}
