//! Exact linear algebra over the prime fields F_p, p in {2, 3, 5, 7}.
//!
//! Matrices are dense row-major byte matrices; subspaces are kept in reduced
//! row-echelon form so that equality of subspaces is equality of bytes.

use crate::{Error, Result};
use num::BigUint;
use std::fmt;

/// The primes this crate computes over.
pub const SUPPORTED_PRIMES: [u8; 4] = [2, 3, 5, 7];

/// A validated field characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u8);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if SUPPORTED_PRIMES.contains(&(p as u8)) && u64::from(p as u8) == p {
            Ok(Prime(p as u8))
        } else {
            Err(Error::BadPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    #[inline]
    fn reduce(self, x: i64) -> u8 {
        (x.rem_euclid(self.0 as i64)) as u8
    }

    /// Multiplicative inverse of a nonzero residue.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(a % self.0 != 0);
        // p <= 7, a tiny scan is fastest
        for b in 1..self.0 {
            if (a as u16 * b as u16) % self.0 as u16 == 1 {
                return b;
            }
        }
        unreachable!("nonzero residue has an inverse")
    }

    /// A generator of the cyclic group F_p^*.
    pub fn unit_generator(self) -> u8 {
        match self.0 {
            2 => 1,
            3 => 2,
            5 => 2,
            7 => 3,
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A residue mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqScalar {
    pub value: u8,
    pub prime: Prime,
}

impl FqScalar {
    pub fn new(value: i64, prime: Prime) -> FqScalar {
        FqScalar {
            value: prime.reduce(value),
            prime,
        }
    }

    pub fn add(self, other: FqScalar) -> FqScalar {
        debug_assert_eq!(self.prime, other.prime);
        FqScalar::new(self.value as i64 + other.value as i64, self.prime)
    }

    pub fn mul(self, other: FqScalar) -> FqScalar {
        debug_assert_eq!(self.prime, other.prime);
        FqScalar::new(self.value as i64 * other.value as i64, self.prime)
    }

    pub fn neg(self) -> FqScalar {
        FqScalar::new(-(self.value as i64), self.prime)
    }

    pub fn inv(self) -> FqScalar {
        FqScalar {
            value: self.prime.inv(self.value),
            prime: self.prime,
        }
    }
}

/// Dense matrix over F_p, row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    prime: Prime,
    entries: Vec<u8>,
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqMatrix{}x{}/F{}[", self.rows, self.cols, self.prime)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl FqMatrix {
    pub fn zero(rows: usize, cols: usize, prime: Prime) -> FqMatrix {
        FqMatrix {
            rows,
            cols,
            prime,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, prime: Prime) -> FqMatrix {
        let mut m = FqMatrix::zero(n, n, prime);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], prime: Prime) -> FqMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = FqMatrix::zero(r, c, prime);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, prime.reduce(x));
            }
        }
        m
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.entries[r * self.cols + c] = v % self.prime.get();
    }

    pub fn entry(&self, r: usize, c: usize) -> FqScalar {
        FqScalar {
            value: self.at(r, c),
            prime: self.prime,
        }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        assert_eq!(self.prime, other.prime);
        let p = self.prime.get() as u32;
        let mut out = FqMatrix::zero(self.rows, other.cols, self.prime);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.at(i, j) as u32;
                    out.entries[i * other.cols + j] = ((cur + a * other.at(k, j) as u32) % p) as u8;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &FqMatrix) -> FqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.prime.get() as u16;
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a = ((*a as u16 + b as u16) % p) as u8;
        }
        out
    }

    pub fn scale(&self, s: u8) -> FqMatrix {
        let p = self.prime.get() as u16;
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = ((*a as u16 * s as u16) % p) as u8;
        }
        out
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut out = FqMatrix::zero(self.cols, self.rows, self.prime);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c));
            }
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let p = self.prime.get() as u32;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u32;
                for c in 0..self.cols {
                    acc += self.at(r, c) as u32 * v[c] as u32;
                }
                (acc % p) as u8
            })
            .collect()
    }

    /// Vertical stack.
    pub fn vstack(&self, other: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.prime, other.prime);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        FqMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            prime: self.prime,
            entries,
        }
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (FqMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.prime;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // find a pivot in column c at or below row r
            let mut pr = None;
            for i in r..m.rows {
                if m.at(i, c) != 0 {
                    pr = Some(i);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            // swap rows
            if pr != r {
                for j in 0..m.cols {
                    let a = m.at(r, j);
                    let b = m.at(pr, j);
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            // normalize
            let inv = p.inv(m.at(r, c));
            for j in 0..m.cols {
                let x = m.at(r, j);
                m.set(r, j, ((x as u16 * inv as u16) % p.get() as u16) as u8);
            }
            // eliminate everywhere else
            for i in 0..m.rows {
                if i != r && m.at(i, c) != 0 {
                    let f = m.at(i, c) as i64;
                    for j in 0..m.cols {
                        let x = m.at(i, j) as i64 - f * m.at(r, j) as i64;
                        m.set(i, j, p.reduce(x));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<FqMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FqMatrix::zero(n, 2 * n, self.prime);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = FqMatrix::zero(n, n, self.prime);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.at(r, n + c));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the right kernel {v : Mv = 0}, rows of the result.
    pub fn kernel_basis(&self) -> FqMatrix {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = FqMatrix::zero(free.len(), self.cols, self.prime);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                let x = red.at(r, fc);
                if x != 0 {
                    out.set(k, pc, self.prime.reduce(-(x as i64)));
                }
            }
        }
        out
    }

    /// Solve M x = b; returns one solution if any.
    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FqMatrix::zero(self.rows, self.cols + 1, self.prime);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![0u8; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = red.at(r, self.cols);
        }
        Some(x)
    }

    /// All matrices of the given shape, in lexicographic entry order.
    pub fn enumerate_all(rows: usize, cols: usize, prime: Prime) -> impl Iterator<Item = FqMatrix> {
        let n = rows * cols;
        let p = prime.get();
        let total: u64 = (p as u64).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut entries = vec![0u8; n];
            for e in entries.iter_mut().rev() {
                *e = (code % p as u64) as u8;
                code /= p as u64;
            }
            FqMatrix {
                rows,
                cols,
                prime,
                entries,
            }
        })
    }
}

/// A subspace of F_p^n, canonically represented by its reduced row-echelon
/// basis (rows are basis vectors). Equality of subspaces is structural
/// equality of the representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subspace {
    pub ambient_dim: usize,
    basis: FqMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The span of the rows of `gens`, canonicalized.
    pub fn from_span(gens: &FqMatrix) -> Subspace {
        let (red, pivots) = gens.rref();
        let k = pivots.len();
        let mut basis = FqMatrix::zero(k, gens.cols, gens.prime());
        for r in 0..k {
            for c in 0..gens.cols {
                basis.set(r, c, red.at(r, c));
            }
        }
        Subspace {
            ambient_dim: gens.cols,
            basis,
            pivots,
        }
    }

    pub fn zero(ambient_dim: usize, prime: Prime) -> Subspace {
        Subspace {
            ambient_dim,
            basis: FqMatrix::zero(0, ambient_dim, prime),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize, prime: Prime) -> Subspace {
        Subspace::from_span(&FqMatrix::identity(ambient_dim, prime))
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &FqMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn prime(&self) -> Prime {
        self.basis.prime()
    }

    /// Canonical coset representative: v reduced modulo this subspace.
    pub fn reduce_vector(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.ambient_dim);
        let p = self.prime();
        let mut w: Vec<i64> = v.iter().map(|&x| x as i64).collect();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let f = p.reduce(w[pc]);
            if f != 0 {
                for c in 0..self.ambient_dim {
                    w[c] -= f as i64 * self.basis.at(r, c) as i64;
                }
            }
        }
        w.into_iter().map(|x| p.reduce(x)).collect()
    }

    pub fn contains_vector(&self, v: &[u8]) -> bool {
        self.reduce_vector(v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        (0..other.dim()).all(|r| self.contains_vector(other.basis.row(r)))
    }

    /// Image of this subspace under the linear map `m` (acting on column
    /// vectors), as a subspace of the target.
    pub fn image_under(&self, m: &FqMatrix) -> Subspace {
        assert_eq!(m.cols, self.ambient_dim);
        let mut rows = FqMatrix::zero(self.dim(), m.rows, m.prime());
        for r in 0..self.dim() {
            let img = m.apply(self.basis.row(r));
            for c in 0..m.rows {
                rows.set(r, c, img[c]);
            }
        }
        Subspace::from_span(&rows)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::from_span(&self.basis.vstack(&other.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // kernel of [A^T | B^T]-style construction: v in both spans
        // solve: v = x A = y B; equivalently (x, y) in kernel of [A^T, -B^T]
        let p = self.prime();
        let n = self.ambient_dim;
        let ka = self.dim();
        let kb = other.dim();
        let mut m = FqMatrix::zero(n, ka + kb, p);
        for c in 0..ka {
            for r in 0..n {
                m.set(r, c, self.basis.at(c, r));
            }
        }
        for c in 0..kb {
            for r in 0..n {
                m.set(r, ka + c, p.reduce(-(other.basis.at(c, r) as i64)));
            }
        }
        let ker = m.kernel_basis();
        let mut gens = FqMatrix::zero(ker.rows, n, p);
        for r in 0..ker.rows {
            for c in 0..n {
                let mut acc = 0i64;
                for j in 0..ka {
                    acc += ker.at(r, j) as i64 * self.basis.at(j, c) as i64;
                }
                gens.set(r, c, p.reduce(acc));
            }
        }
        Subspace::from_span(&gens)
    }
}

/// Order of GL_n(F_p): prod_{i<n} (p^n - p^i).
pub fn gl_order(n: usize, p: Prime) -> u128 {
    let pn = (p.get() as u128).pow(n as u32);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc *= pn - (p.get() as u128).pow(i as u32);
    }
    acc
}

pub fn gl_order_big(n: usize, p: Prime) -> BigUint {
    BigUint::from(gl_order(n, p))
}

/// Gaussian binomial coefficient [n choose k]_p as an exact integer.
pub fn gaussian_binomial(n: usize, k: usize, p: Prime) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(p.get());
    let one = BigUint::from(1u32);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= num::pow::pow(q.clone(), n - i) - &one;
        den *= num::pow::pow(q.clone(), k - i) - &one;
    }
    num / den
}

/// All k-dimensional subspaces of F_p^n, in canonical echelon order:
/// lexicographically by pivot set, then by free entries.
pub fn enumerate_subspaces(ambient: usize, k: usize, p: Prime) -> Vec<Subspace> {
    if k > ambient {
        return Vec::new();
    }
    let mut out = Vec::new();
    // iterate over pivot column sets in lexicographic order
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free positions: (row i, col j) with j > pivots[i], j not a pivot
        let mut free = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for j in (pc + 1)..ambient {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let total: u64 = (p.get() as u64).pow(free.len() as u32);
        for mut code in 0..total {
            let mut basis = FqMatrix::zero(k, ambient, p);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(i, pc, 1);
            }
            for &(i, j) in free.iter().rev() {
                basis.set(i, j, (code % p.get() as u64) as u8);
                code /= p.get() as u64;
            }
            out.push(Subspace {
                ambient_dim: ambient,
                basis,
                pivots: pivots.clone(),
            });
        }
        // next combination
        if k == 0 {
            break;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] != i + ambient - k {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: u64) -> Prime {
        Prime::new(x).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(6).is_err());
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(7).is_ok());
    }

    #[test]
    fn gl_order_examples() {
        assert_eq!(gl_order(0, p(2)), 1);
        assert_eq!(gl_order(2, p(2)), 6);
        assert_eq!(gl_order(2, p(3)), 48);
    }

    #[test]
    fn gl_order_counts_invertible_matrices() {
        // brute-force oracle at small sizes
        for &q in &[2u64, 3] {
            for n in 0..=2 {
                let count = FqMatrix::enumerate_all(n, n, p(q))
                    .filter(|m| m.is_invertible())
                    .count() as u128;
                assert_eq!(count, gl_order(n, p(q)), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FqMatrix::identity(2, p(2)).rank(), 2);
        assert_eq!(FqMatrix::zero(3, 2, p(3)).rank(), 0);
        let m = FqMatrix::from_rows(&[vec![1, 1], vec![1, 1]], p(2));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn subspace_counts_match_gaussian_binomial() {
        for &q in &[2u64, 3] {
            for n in 0..=4usize {
                for k in 0..=n {
                    let subs = enumerate_subspaces(n, k, p(q));
                    assert_eq!(
                        BigUint::from(subs.len() as u64),
                        gaussian_binomial(n, k, p(q)),
                        "n={n} k={k} q={q}"
                    );
                }
            }
        }
    }

    #[test]
    fn subspace_examples() {
        assert_eq!(enumerate_subspaces(2, 0, p(2)).len(), 1);
        assert_eq!(enumerate_subspaces(2, 1, p(2)).len(), 3);
        assert_eq!(enumerate_subspaces(2, 1, p(3)).len(), 4);
        assert!(enumerate_subspaces(2, 3, p(2)).is_empty());
    }

    #[test]
    fn subspace_enumeration_matches_vector_span_oracle() {
        // dedupe spans of all nonzero vectors: lines of F_q^n
        for &q in &[2u64, 3] {
            for n in 1..=3usize {
                let mut lines = std::collections::BTreeSet::new();
                for m in FqMatrix::enumerate_all(1, n, p(q)) {
                    if !m.is_zero() {
                        lines.insert(Subspace::from_span(&m));
                    }
                }
                assert_eq!(lines.len(), enumerate_subspaces(n, 1, p(q)).len());
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = FqMatrix::from_rows(&[vec![1, 1], vec![0, 1]], p(2));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FqMatrix::identity(2, p(2)));
        let sing = FqMatrix::from_rows(&[vec![1, 1], vec![1, 1]], p(2));
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = FqMatrix::from_rows(&[vec![1, 2, 0], vec![0, 0, 1]], p(3));
        let ker = m.kernel_basis();
        assert_eq!(ker.rows, 1);
        for r in 0..ker.rows {
            assert!(m.apply(ker.row(r)).iter().all(|&x| x == 0));
        }
    }

    proptest! {
        #[test]
        fn echelon_canonicalization_is_idempotent(seed in 0u64..2000) {
            // pseudo-random small matrix over F_3
            let pr = p(3);
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as i64 };
            let rows: Vec<Vec<i64>> = (0..3).map(|_| (0..4).map(|_| next() % 3).collect()).collect();
            let m = FqMatrix::from_rows(&rows, pr);
            let s1 = Subspace::from_span(&m);
            let s2 = Subspace::from_span(s1.basis());
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn span_equal_bases_canonicalize_equally(seed in 0u64..500) {
            let pr = p(2);
            let mut s = seed.wrapping_add(7);
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as i64 };
            let rows: Vec<Vec<i64>> = (0..2).map(|_| (0..3).map(|_| next() % 2).collect()).collect();
            let m = FqMatrix::from_rows(&rows, pr);
            let sub = Subspace::from_span(&m);
            // swap rows, add one row to the other: same span
            let r0: Vec<i64> = m.row(0).iter().map(|&x| x as i64).collect();
            let r1: Vec<i64> = m.row(1).iter().map(|&x| x as i64).collect();
            let sum: Vec<i64> = r0.iter().zip(&r1).map(|(a, b)| a + b).collect();
            let m2 = FqMatrix::from_rows(&[r1, sum], pr);
            prop_assert_eq!(sub, Subspace::from_span(&m2));
        }
    }
}
