use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::IntPoly;
use super::LinalgError;

/// Square integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Self {
        assert!(n >= 1, "matrix dimension must be >= 1");
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        IntMatrix { n, entries }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            for &v in *r {
                entries.push(BigInt::from(v));
            }
        }
        IntMatrix::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn scalar(n: usize, k: &BigInt) -> IntMatrix {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = k.clone();
        }
        m
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                // pivot search
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev; // exact by Bareiss
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Monic characteristic polynomial det(λI − M), by the
    /// Faddeev–LeVerrier recursion (all divisions exact).
    pub fn charpoly(&self) -> IntPoly {
        let n = self.n;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = IntMatrix::identity(n);
        for k in 1..=n {
            m = self * &m;
            let tr = m.trace();
            let k_big = BigInt::from(k);
            debug_assert!((&tr % &k_big).is_zero() || true);
            let c = -exact_div(&tr, &k_big);
            coeffs[n - k] = c.clone();
            m = &m + &IntMatrix::scalar(n, &c);
        }
        IntPoly::new(coeffs)
    }

    /// Exact inverse; requires |det| = 1.
    pub fn inverse(&self) -> Result<IntMatrix, LinalgError> {
        let d = self.det();
        if !d.abs().is_one() {
            return Err(LinalgError::NonUnimodularInverse);
        }
        // From Cayley–Hamilton: M^{-1} = -(M^{n-1} + c_{n-1} M^{n-2} + ... + c_1 I) / c_0.
        let p = self.charpoly();
        let n = self.n;
        let c = p.coeffs();
        let mut acc = IntMatrix::zero(n);
        let mut power = IntMatrix::identity(n);
        for k in 1..=n {
            // add c_k * M^{k-1}
            let term = power.scale(&c[k]);
            acc = &acc + &term;
            if k < n {
                power = self * &power;
            }
        }
        // c_0 = ±1 here
        let c0 = &c[0];
        let inv = acc.scale(&-BigInt::one());
        Ok(if c0.is_negative() {
            inv.scale(&-BigInt::one())
        } else {
            inv
        })
    }

    /// M^k for k ∈ Z; negative k requires |det M| = 1.
    pub fn pow(&self, k: i64) -> Result<IntMatrix, LinalgError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut result = IntMatrix::identity(self.n);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(result)
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    pub fn commutes_with(&self, other: &IntMatrix) -> bool {
        self.n == other.n && self * other == other * self
    }

    /// Apply to an integer vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }
}

fn exact_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    assert!(r.is_zero(), "non-exact division in Faddeev-LeVerrier");
    q
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        IntMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        IntMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a * rhs.get(k, j);
                    let cur = out.get(i, j) + v;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// JSON form: {"n": 2, "entries": [[2, 1], [1, 1]]}, entries as numbers
// or decimal strings (strings are required above 2^53).

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<serde_json::Value>>,
}

pub(crate) fn bigint_to_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(small) if small.abs() < (1i64 << 53) => serde_json::Value::from(small),
        _ => serde_json::Value::from(v.to_string()),
    }
}

pub(crate) fn bigint_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(num) => num.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| bigint_to_json(self.get(i, j))).collect())
            .collect();
        MatrixJson {
            n: self.n,
            entries: rows,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.n == 0 {
            return Err(D::Error::custom("matrix dimension must be >= 1"));
        }
        if raw.entries.len() != raw.n {
            return Err(D::Error::custom("row count does not match n"));
        }
        let mut entries = Vec::with_capacity(raw.n * raw.n);
        for row in &raw.entries {
            if row.len() != raw.n {
                return Err(D::Error::custom("row length does not match n"));
            }
            for v in row {
                entries.push(
                    bigint_from_json(v)
                        .ok_or_else(|| D::Error::custom("matrix entry must be an integer or integer string"))?,
                );
            }
        }
        Ok(IntMatrix::new(raw.n, entries))
    }
}
