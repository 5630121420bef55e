use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// U · M · V = D with U, V unimodular and D diagonal with the
/// divisibility chain d_i | d_{i+1}.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let r = a.len();
    let inner = b.len();
    let c = b[0].len();
    let mut out = vec![vec![BigInt::zero(); c]; r];
    for i in 0..r {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                let v = &a[i][k] * &b[k][j];
                out[i][j] += v;
            }
        }
    }
    out
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn det_rows(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let entries: Vec<BigInt> = m.iter().flat_map(|r| r.iter().cloned()).collect();
    IntMatrix::new(n, entries).det()
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len().min(self.d[0].len()))
            .map(|i| self.d[i][i].clone())
            .collect()
    }

    /// Exact re-check of U·M·V = D and unimodularity.
    pub fn verify(&self, m: &[Vec<BigInt>]) -> bool {
        let um = mat_mul(&self.u, m);
        let umv = mat_mul(&um, &self.v);
        if umv != self.d {
            return false;
        }
        det_rows(&self.u).abs().is_one() && det_rows(&self.v).abs().is_one()
    }
}

/// Smith normal form of a rectangular integer matrix.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SnfDecomposition {
    let rows = m.len();
    let cols = m[0].len();
    let mut d: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = identity_rows(rows);
    let mut v = identity_rows(cols);

    let rank_bound = rows.min(cols);
    reduce_block(&mut d, &mut u, &mut v, 0);
    normalize_signs(&mut d, &mut v, rank_bound);

    // Enforce the divisibility chain d_i | d_{i+1}.
    loop {
        let mut fixed = true;
        for i in 0..rank_bound.saturating_sub(1) {
            let a = d[i][i].clone();
            let b = d[i + 1][i + 1].clone();
            if a.is_zero() || b.is_zero() || (&b % &a).is_zero() {
                continue;
            }
            fixed = false;
            // Add column i+1 to column i, then re-reduce the 2x2 block.
            for r in 0..d.len() {
                let s = d[r][i + 1].clone();
                d[r][i] += s;
            }
            for r in 0..v.len() {
                let s = v[r][i + 1].clone();
                v[r][i] += s;
            }
            reduce_block(&mut d, &mut u, &mut v, i);
        }
        if fixed {
            break;
        }
    }
    normalize_signs(&mut d, &mut v, rank_bound);

    SnfDecomposition { u, d, v }
}

fn normalize_signs(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], rank_bound: usize) {
    for i in 0..rank_bound {
        if d[i][i].is_negative() {
            for row in d.iter_mut() {
                row[i] = -row[i].clone();
            }
            for row in v.iter_mut() {
                row[i] = -row[i].clone();
            }
        }
    }
}

/// Re-run elimination on the trailing block starting at (i, i).
fn reduce_block(
    d: &mut Vec<Vec<BigInt>>,
    u: &mut Vec<Vec<BigInt>>,
    v: &mut Vec<Vec<BigInt>>,
    start: usize,
) {
    let rows = d.len();
    let cols = d[0].len();
    let mut t = start;
    let rank_bound = rows.min(cols);
    while t < rank_bound {
        let mut pivot = None;
        'search: for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let (q, r) = d[i][t].div_mod_floor(&d[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &q * &d[t][j];
                        d[i][j] -= s;
                    }
                    for j in 0..u[0].len() {
                        let s = &q * &u[t][j];
                        u[i][j] -= s;
                    }
                }
                if !r.is_zero() {
                    d.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let (q, r) = d[t][j].div_mod_floor(&d[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = &q * &d[i][t];
                        d[i][j] -= s;
                    }
                    for i in 0..v.len() {
                        let s = &q * &v[i][t];
                        v[i][j] -= s;
                    }
                }
                if !r.is_zero() {
                    for row in d.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            let col_clear = (t + 1..rows).all(|i| d[i][t].is_zero());
            let row_clear = (t + 1..cols).all(|j| d[t][j].is_zero());
            if !dirty && col_clear && row_clear {
                break;
            }
        }
        t += 1;
    }
}

/// Row-style Hermite normal form of a list of integer row vectors:
/// positive pivots that strictly move right, entries above each pivot
/// reduced into [0, pivot). Zero rows are dropped. The result is the
/// canonical basis of the row lattice.
pub fn hermite_normal_form(rows_in: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows_in.is_empty() {
        return vec![];
    }
    let cols = rows_in[0].len();
    let mut rows: Vec<Vec<BigInt>> = rows_in.to_vec();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows.len() {
            break;
        }
        // Use extended-gcd style row combinations to produce a single
        // nonzero entry in this column at pivot_row.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if rows[i][col].abs() < rows[b][col].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_mod_floor(&rows[pivot_row][col]).0;
                for j in 0..cols {
                    let s = &q * &rows[pivot_row][j];
                    rows[i][j] -= s;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for j in 0..cols {
                rows[pivot_row][j] = -rows[pivot_row][j].clone();
            }
        }
        // Reduce entries above the pivot into [0, pivot).
        for i in 0..pivot_row {
            let q = rows[i][col].div_mod_floor(&rows[pivot_row][col]).0;
            if q.is_zero() {
                continue;
            }
            for j in 0..cols {
                let s = &q * &rows[pivot_row][j];
                rows[i][j] -= s;
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

/// Canonical basis of the integer kernel { x : M x = 0 } of a
/// rectangular matrix given as rows. Computed by row-reducing the
/// augmented matrix [Mᵀ | I]: rows whose Mᵀ-part vanishes carry kernel
/// vectors in the identity part. Output is Hermite-reduced.
pub fn integer_kernel(m_rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let r = m_rows.len();
    assert!(r > 0);
    let c = m_rows[0].len();
    // Augmented rows: for each variable j, (column j of M, e_j).
    let mut aug: Vec<Vec<BigInt>> = (0..c)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..r).map(|i| m_rows[i][j].clone()).collect();
            let mut unit = vec![BigInt::zero(); c];
            unit[j] = BigInt::one();
            row.extend(unit);
            row
        })
        .collect();

    // Eliminate the first r columns with unimodular row operations.
    let total = r + c;
    let mut pivot_row = 0;
    for col in 0..r {
        if pivot_row >= aug.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..aug.len() {
                if aug[i][col].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if aug[i][col].abs() < aug[b][col].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            aug.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..aug.len() {
                if aug[i][col].is_zero() {
                    continue;
                }
                let q = aug[i][col].div_mod_floor(&aug[pivot_row][col]).0;
                for j in 0..total {
                    let s = &q * &aug[pivot_row][j];
                    aug[i][j] -= s;
                }
                if !aug[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !aug[pivot_row][col].is_zero() {
            pivot_row += 1;
        }
    }

    let kernel: Vec<Vec<BigInt>> = aug[pivot_row..]
        .iter()
        .filter(|row| row[..r].iter().all(|v| v.is_zero()))
        .map(|row| row[r..].to_vec())
        .collect();
    hermite_normal_form(&kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(data: &[&[i64]]) -> Vec<Vec<BigInt>> {
        data.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn kernel_rank_one() {
        let m = rows(&[&[2, 4], &[1, 2]]);
        let k = integer_kernel(&m);
        assert_eq!(k, rows(&[&[2, -1]]));
    }

    #[test]
    fn kernel_trivial_and_full() {
        let id = rows(&[&[1, 0], &[0, 1]]);
        assert!(integer_kernel(&id).is_empty());
        let z = rows(&[&[0, 0], &[0, 0]]);
        assert_eq!(integer_kernel(&z), rows(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = rows(&[&[6, 10, 15], &[2, 4, 5]]);
        let k = integer_kernel(&m);
        for v in &k {
            for row in &m {
                let dot: BigInt = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn kernel_is_primitive() {
        // M = [1, -2]: kernel generated by (2, 1), not (4, 2).
        let m = rows(&[&[1, -2]]);
        let k = integer_kernel(&m);
        assert_eq!(k, rows(&[&[2, 1]]));
    }

    #[test]
    fn hnf_canonical() {
        let h = hermite_normal_form(&rows(&[&[2, 1, 1], &[1, 1, 1]]));
        // pivots positive, above-pivot entries reduced
        assert_eq!(h.len(), 2);
        assert!(h[0][0].is_positive());
        let h2 = hermite_normal_form(&rows(&[&[1, 1, 1], &[2, 1, 1]]));
        assert_eq!(h, h2);
    }

    #[test]
    fn snf_verifies_and_divides() {
        for m in [
            rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]),
            rows(&[&[1, 2], &[3, 4]]),
            rows(&[&[0, 0], &[0, 0]]),
            rows(&[&[6, 0], &[0, 10], &[0, 0]]),
        ] {
            let snf = smith_normal_form(&m);
            assert!(snf.verify(&m), "U M V != D for {:?}", m);
            let diag = snf.diagonal();
            for w in diag.windows(2) {
                if !w[0].is_zero() && !w[1].is_zero() {
                    assert!((&w[1] % &w[0]).is_zero(), "divisibility broken: {:?}", diag);
                }
                if w[0].is_zero() {
                    assert!(w[1].is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_known_diagonal() {
        // Classic example: diag(2, 6) lattice
        let m = rows(&[&[2, 0], &[0, 6]]);
        let snf = smith_normal_form(&m);
        assert_eq!(
            snf.diagonal(),
            vec![BigInt::from(2), BigInt::from(6)]
        );
    }
}
