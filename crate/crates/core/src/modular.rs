//! Exact integer and `Z_N` linear algebra for the transversal design
//! construction.
//!
//! Determinants are always taken over the integers first and reduced
//! afterwards: `N` need not be prime, so elimination mod `N` could hit zero
//! divisors. Solving uses Cramer's rule with a single modular inverse.

use std::fmt;

use num::integer::Integer;
use num::{BigInt, BigUint, One, Signed, ToPrimitive, Zero};

use crate::combin::combinations;
use crate::error::{Error, Result};

/// A dense matrix over `Z_N`, entries stored reduced in `[0, N)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ZModMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ZModMatrix {
    /// Builds a matrix from integer rows, reducing every entry mod `modulus`.
    pub fn from_rows(modulus: u64, rows: &[Vec<i64>]) -> Result<Self> {
        check_modulus(modulus)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::param("matrix dimensions must be positive"));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged matrix rows"));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| x.rem_euclid(modulus as i64) as u64)
            .collect();
        Ok(ZModMatrix {
            modulus,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn identity(modulus: u64, size: usize) -> Result<Self> {
        let rows: Vec<Vec<i64>> = (0..size)
            .map(|i| (0..size).map(|j| i64::from(i == j)).collect())
            .collect();
        ZModMatrix::from_rows(modulus, &rows)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// The matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::param("column selection out of range"));
        }
        let entries = (0..self.rows)
            .flat_map(|i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(ZModMatrix {
            modulus: self.modulus,
            rows: self.rows,
            cols: cols.len(),
            entries,
        })
    }

    /// `M * x mod N`.
    pub fn mul_vec(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::param(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let n = self.modulus as u128;
        Ok((0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .fold(0u128, |acc, (&a, &b)| (acc + a as u128 * (b as u128 % n)) % n);
                acc as u64
            })
            .collect())
    }

    /// Determinant of the stored representatives, over the integers.
    pub fn integer_determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::param("determinant of a non-square matrix"));
        }
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Ok(bareiss_determinant(rows))
    }
}

impl fmt::Debug for ZModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u64]> = (0..self.rows).map(|i| self.row(i)).collect();
        write!(f, "ZModMatrix(mod {}) {:?}", self.modulus, rows)
    }
}

fn check_modulus(modulus: u64) -> Result<()> {
    if modulus < 2 {
        return Err(Error::param(format!("modulus {modulus} is below 2")));
    }
    if modulus > i64::MAX as u64 {
        return Err(Error::param(format!("modulus {modulus} is too large")));
    }
    Ok(())
}

/// Fraction-free elimination; every intermediate division is exact.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
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
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `x mod m` in `[0, m)`.
pub fn reduce(x: &BigInt, modulus: u64) -> u64 {
    x.mod_floor(&BigInt::from(modulus))
        .to_u64()
        .expect("residue fits in u64")
}

/// `prod_{i<j} (x_j - x_i)` for a strictly increasing sequence.
pub fn vandermonde_det(xs: &[i64]) -> Result<BigInt> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param(format!("{xs:?} is not strictly increasing")));
    }
    let mut acc = BigInt::one();
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            acc *= BigInt::from(b) - BigInt::from(a);
        }
    }
    Ok(acc)
}

/// `M_{k,n}`: lcm of the Vandermonde determinants of all increasing
/// `n`-sequences drawn from `{0, ..., k-1}`.
pub fn m_lcm(k: u32, n: u32) -> Result<BigUint> {
    if n < 1 || n > k {
        return Err(Error::param(format!("m_lcm({k}, {n}): need 1 <= n <= k")));
    }
    let mut acc = BigUint::one();
    for xs in combinations(k, n) {
        let xs: Vec<i64> = xs.into_iter().map(i64::from).collect();
        let d = vandermonde_det(&xs)?
            .to_biguint()
            .expect("increasing sequences give a positive determinant");
        acc = acc.lcm(&d);
    }
    Ok(acc)
}

/// `b` with `a * b = 1 (mod modulus)`.
pub fn mod_inverse(a: i64, modulus: u64) -> Result<u64> {
    check_modulus(modulus)?;
    let m = modulus as i128;
    let a = (a as i128).rem_euclid(m);
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NonUnit {
            value: a.to_string(),
            modulus,
        });
    }
    Ok(old_s.rem_euclid(m) as u64)
}

/// The unique `x` with `M x = rhs (mod N)`, for square `M` whose integer
/// determinant is a unit mod `N`.
pub fn solve_unit_system(m: &ZModMatrix, rhs: &[u64]) -> Result<Vec<u64>> {
    if m.rows() != m.cols() {
        return Err(Error::param(format!(
            "{}x{} system is not square",
            m.rows(),
            m.cols()
        )));
    }
    if rhs.len() != m.rows() {
        return Err(Error::param(format!(
            "right-hand side of length {} for {} equations",
            rhs.len(),
            m.rows()
        )));
    }
    let n = m.modulus();
    let det = m.integer_determinant()?;
    let inv = mod_inverse(reduce(&det, n) as i64, n).map_err(|_| Error::NonUnit {
        value: det.to_string(),
        modulus: n,
    })?;
    let rhs: Vec<u64> = rhs.iter().map(|&b| b % n).collect();
    let size = m.rows();
    let mut x = Vec::with_capacity(size);
    for col in 0..size {
        let rows: Vec<Vec<BigInt>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| BigInt::from(if j == col { rhs[i] } else { m.get(i, j) }))
                    .collect()
            })
            .collect();
        let minor = reduce(&bareiss_determinant(rows), n);
        x.push(((minor as u128 * inv as u128) % n as u128) as u64);
    }
    if m.mul_vec(&x)? != rhs {
        return Err(Error::Defect(format!(
            "Cramer solution {x:?} does not satisfy {m:?} x = {rhs:?}"
        )));
    }
    Ok(x)
}

/// Inverse of a square matrix with unit determinant, column by column.
pub fn unit_inverse(m: &ZModMatrix) -> Result<ZModMatrix> {
    let size = m.rows();
    let mut cols = Vec::with_capacity(size);
    for j in 0..size {
        let e: Vec<u64> = (0..size).map(|i| u64::from(i == j)).collect();
        cols.push(solve_unit_system(m, &e)?);
    }
    let rows: Vec<Vec<i64>> = (0..size)
        .map(|i| cols.iter().map(|c| c[i] as i64).collect())
        .collect();
    ZModMatrix::from_rows(m.modulus(), &rows)
}

/// The `rows x k` matrix with entry `(i, j) = j^i mod N`, taking `0^0 = 1`.
pub fn power_matrix(k: usize, rows: usize, modulus: u64) -> Result<ZModMatrix> {
    if rows < 1 || k < rows {
        return Err(Error::param(format!(
            "power matrix with {rows} rows and {k} columns: need 1 <= rows <= k"
        )));
    }
    check_modulus(modulus)?;
    let m = modulus as u128;
    let table: Vec<Vec<i64>> = (0..rows)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let base = j as u128 % m;
                    (0..i).fold(1u128 % m, |acc, _| acc * base % m) as i64
                })
                .collect()
        })
        .collect();
    ZModMatrix::from_rows(modulus, &table)
}

/// Whether `x` is coprime to `modulus`.
pub fn is_unit(x: &BigInt, modulus: u64) -> bool {
    x.abs().gcd(&BigInt::from(modulus)).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_det(&[5]).unwrap(), BigInt::from(1));
        assert_eq!(vandermonde_det(&[]).unwrap(), BigInt::from(1));
        assert_eq!(vandermonde_det(&[0, 1, 2]).unwrap(), BigInt::from(2));
        assert_eq!(vandermonde_det(&[0, 2, 3]).unwrap(), BigInt::from(6));
        assert!(vandermonde_det(&[0, 2, 2]).is_err());
        assert!(vandermonde_det(&[3, 1]).is_err());
    }

    #[test]
    fn m_lcm_examples() {
        for k in 1..=8 {
            assert_eq!(m_lcm(k, 1).unwrap(), BigUint::one());
        }
        assert_eq!(m_lcm(4, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(m_lcm(5, 3).unwrap(), BigUint::from(48u32));
        assert!(m_lcm(3, 4).is_err());
        assert!(m_lcm(3, 0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 9).unwrap(), 1);
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert!(matches!(mod_inverse(2, 4), Err(Error::NonUnit { .. })));
        assert!(mod_inverse(1, 1).is_err());
    }

    #[test]
    fn solve_examples() {
        let id = ZModMatrix::identity(11, 3).unwrap();
        assert_eq!(solve_unit_system(&id, &[4, 0, 10]).unwrap(), vec![4, 0, 10]);
        let m = ZModMatrix::from_rows(7, &[vec![1, 1], vec![2, 3]]).unwrap();
        assert_eq!(solve_unit_system(&m, &[0, 0]).unwrap(), vec![0, 0]);
        assert_eq!(solve_unit_system(&m, &[1, 0]).unwrap(), vec![3, 5]);
        assert!(solve_unit_system(&m, &[1]).is_err());
        let singular = ZModMatrix::from_rows(6, &[vec![1, 1], vec![0, 2]]).unwrap();
        assert!(matches!(
            solve_unit_system(&singular, &[1, 0]),
            Err(Error::NonUnit { .. })
        ));
    }

    #[test]
    fn inverse_matrix() {
        let m = ZModMatrix::from_rows(7, &[vec![1, 1], vec![2, 3]]).unwrap();
        let inv = unit_inverse(&m).unwrap();
        for j in 0..2 {
            let col: Vec<u64> = (0..2).map(|i| inv.get(i, j)).collect();
            let e: Vec<u64> = (0..2).map(|i| u64::from(i == j)).collect();
            assert_eq!(m.mul_vec(&col).unwrap(), e);
        }
    }

    #[test]
    fn power_matrix_examples() {
        assert_eq!(power_matrix(3, 1, 5).unwrap().row(0), &[1, 1, 1]);
        let m = power_matrix(4, 2, 7).unwrap();
        assert_eq!((m.row(0), m.row(1)), (&[1, 1, 1, 1][..], &[0, 1, 2, 3][..]));
        let m = power_matrix(4, 2, 3).unwrap();
        assert_eq!(m.row(1), &[0, 1, 2, 0]);
        assert!(power_matrix(2, 3, 5).is_err());
    }

    #[test]
    fn bareiss_matches_small_cases() {
        let m = ZModMatrix::from_rows(1000, &[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]).unwrap();
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(m.integer_determinant().unwrap(), BigInt::zero());
        let m = ZModMatrix::from_rows(1000, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.integer_determinant().unwrap(), BigInt::from(-1));
    }
}
