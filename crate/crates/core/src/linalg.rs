//! Exact Gaussian elimination over the scalar domains used in this crate:
//! rationals, cyclotomics, and prime fields.

use crate::cyclotomic::Cyclotomic;
use crate::rational::Rational;
use num_traits::{One, Zero};

pub(crate) trait FieldOps<T> {
    fn zero(&self) -> T;
    fn one(&self) -> T;
    fn is_zero(&self, a: &T) -> bool;
    fn sub(&self, a: &T, b: &T) -> T;
    fn mul(&self, a: &T, b: &T) -> T;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &T) -> T;
}

pub(crate) struct RationalField;
pub(crate) const RATIONAL_FIELD: RationalField = RationalField;

impl FieldOps<Rational> for RationalField {
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn inv(&self, a: &Rational) -> Rational {
        Rational::one() / a
    }
}

pub(crate) struct CyclotomicField;
pub(crate) const CYCLOTOMIC_FIELD: CyclotomicField = CyclotomicField;

impl FieldOps<Cyclotomic> for CyclotomicField {
    fn zero(&self) -> Cyclotomic {
        Cyclotomic::zero()
    }
    fn one(&self) -> Cyclotomic {
        Cyclotomic::one()
    }
    fn is_zero(&self, a: &Cyclotomic) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        a.sub(b)
    }
    fn mul(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        a.mul(b)
    }
    fn inv(&self, a: &Cyclotomic) -> Cyclotomic {
        a.inv().expect("nonzero pivot")
    }
}

/// The prime field `F_p` with `u64` representatives.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.p;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl FieldOps<u64> for Fp {
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a % self.p != 0, "zero has no inverse");
        self.pow(*a, self.p - 2)
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref<T: Clone, F: FieldOps<T>>(m: &mut [Vec<T>], f: &F) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.inv(&m[r][c]);
        for j in c..cols {
            m[r][j] = f.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !f.is_zero(&m[i][c]) {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let t = f.mul(&factor, &m[r][j]);
                    m[i][j] = f.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Solves `A x = b`; returns one solution (free variables zero) when the
/// system is consistent, `None` otherwise.
pub(crate) fn solve<T: Clone, F: FieldOps<T>>(a: &[Vec<T>], b: &[T], f: &F) -> Option<Vec<T>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, f);
    // Inconsistent when a pivot lands in the augmented column.
    if pivots.last().is_some_and(|&c| c == cols) {
        return None;
    }
    let mut x = vec![f.zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][cols].clone();
    }
    Some(x)
}

/// Basis of the solution space of `A x = 0`.
pub(crate) fn nullspace<T: Clone, F: FieldOps<T>>(a: &[Vec<T>], f: &F) -> Vec<Vec<T>> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let pivots = rref(&mut m, f);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = f.sub(&f.zero(), &m[i][free]);
        }
        basis.push(v);
    }
    basis
}
