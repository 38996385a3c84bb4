//! Ryser permanents over small commutative rings.
//!
//! The same Gray-code loop evaluates plain complex permanents, dual numbers
//! (first derivatives along one column) and hyper-dual numbers (mixed second
//! derivatives along one row and one column). Perturbing a single column by
//! `eps1` and a single row by `eps2` and reading off the `eps1*eps2`
//! coefficient is the second-order minor expansion of the permanent.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Largest permanent the library will evaluate.
pub const PERMANENT_CAP: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub trait RingElement:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
}

impl RingElement for Complex64 {
    fn zero() -> Self {
        ZERO
    }
}

/// `a + b*eps` with `eps^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: Complex64,
    pub eps: Complex64,
}

impl Dual {
    pub fn new(re: Complex64, eps: Complex64) -> Self {
        Self { re, eps }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl RingElement for Dual {
    fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }
}

/// `a + b*e1 + c*e2 + d*e1*e2` with `e1^2 = e2^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub re: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub e12: Complex64,
}

impl HyperDual {
    pub fn new(re: Complex64, e1: Complex64, e2: Complex64, e12: Complex64) -> Self {
        Self { re, e1, e2, e12 }
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re,
            self.re * o.e1 + self.e1 * o.re,
            self.re * o.e2 + self.e2 * o.re,
            self.re * o.e12 + self.e12 * o.re + self.e1 * o.e2 + self.e2 * o.e1,
        )
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl RingElement for HyperDual {
    fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }
}

/// Permanent of the `n x n` matrix with entries `entry(row, col)`.
///
/// Ryser's inclusion-exclusion formula, visiting column subsets in Gray-code
/// order so each step updates the row sums with a single column. Cost is
/// `O(2^n * n)` ring operations. `n = 0` returns zero.
pub fn ryser<T, F>(n: usize, entry: F) -> T
where
    T: RingElement,
    F: Fn(usize, usize) -> T,
{
    if n == 0 {
        return T::zero();
    }
    assert!(n < usize::BITS as usize, "permanent size out of range");
    let cols: Vec<Vec<T>> = (0..n).map(|c| (0..n).map(|r| entry(r, c)).collect()).collect();
    let mut row_sums = vec![T::zero(); n];
    let mut acc = T::zero();
    let mut gray: usize = 0;
    for k in 1usize..(1 << n) {
        let bit = k.trailing_zeros() as usize;
        let mask = 1 << bit;
        let adding = gray & mask == 0;
        gray ^= mask;
        let col = &cols[bit];
        if adding {
            for (s, &v) in row_sums.iter_mut().zip(col) {
                *s = *s + v;
            }
        } else {
            for (s, &v) in row_sums.iter_mut().zip(col) {
                *s = *s - v;
            }
        }
        let mut prod = row_sums[0];
        for &s in &row_sums[1..] {
            prod = prod * s;
        }
        // sign (-1)^(n - |S|)
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            acc = acc + prod;
        } else {
            acc = acc - prod;
        }
    }
    acc
}
