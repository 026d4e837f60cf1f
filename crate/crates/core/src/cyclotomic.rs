//! Exact arithmetic in cyclotomic fields `Q(ζ_n)` for prime-power `n`.
//!
//! Elements are stored by rational coordinates on the power basis
//! `1, ζ, ..., ζ^{φ(n)-1}`, reduced with the relation `Φ_n(ζ) = 0`, which
//! makes the representation canonical.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ffield::prime_divisors;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    n: u32,
    coords: Vec<BigRational>,
}

/// `(ℓ, e)` with `n = ℓ^e`, or `None` if `n` is not a prime power above 1.
fn prime_power(n: u32) -> Option<(u32, u32)> {
    let primes = prime_divisors(n as u64);
    if primes.len() != 1 {
        return None;
    }
    let l = primes[0] as u32;
    let mut e = 0;
    let mut m = n;
    while m % l == 0 {
        m /= l;
        e += 1;
    }
    Some((l, e))
}

/// Euler's totient of a prime power.
fn phi(n: u32) -> usize {
    let (l, e) = prime_power(n).expect("conductor must be a prime power");
    ((l - 1) * l.pow(e - 1)) as usize
}

impl CyclotomicNumber {
    /// # Panics
    /// If `n` is not a prime power.
    pub fn zero(n: u32) -> Self {
        CyclotomicNumber {
            n,
            coords: vec![BigRational::zero(); phi(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_integer(n, 1)
    }

    pub fn from_integer(n: u32, value: i64) -> Self {
        Self::from_rational(n, BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_rational(n: u32, value: BigRational) -> Self {
        let mut z = Self::zero(n);
        z.coords[0] = value;
        z
    }

    /// `ζ_n^k` for any integer `k`.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let mut full = vec![BigRational::zero(); n as usize];
        full[k.rem_euclid(n as i64) as usize] = BigRational::one();
        Self::reduce(n, full)
    }

    /// Builds `Σ c_j ζ^j` from coordinates of any length.
    pub fn from_exponent_coeffs(n: u32, coeffs: &[BigRational]) -> Self {
        let mut full = vec![BigRational::zero(); n as usize];
        for (j, c) in coeffs.iter().enumerate() {
            full[j % n as usize] += c;
        }
        Self::reduce(n, full)
    }

    /// Reduces a length-`n` vector of exponent coefficients modulo `Φ_n`.
    fn reduce(n: u32, mut full: Vec<BigRational>) -> Self {
        let (l, e) = prime_power(n).expect("conductor must be a prime power");
        let m = l.pow(e - 1) as usize;
        let deg = (l as usize - 1) * m;
        // ζ^d = -Σ_{j<l-1} ζ^{d-(l-1-j)m} for d >= φ(n)
        for d in (deg..n as usize).rev() {
            let c = std::mem::take(&mut full[d]);
            if c.is_zero() {
                continue;
            }
            for j in 0..(l as usize - 1) {
                full[d - (l as usize - 1 - j) * m] -= &c;
            }
        }
        full.truncate(deg);
        CyclotomicNumber { n, coords: full }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.n)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// The integer value, if the element lies in `Z`.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CyclotomicNumber {
            n: self.n,
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The automorphism `ζ -> ζ^a`; `a` must be prime to the conductor.
    pub fn galois(&self, a: u32) -> Self {
        assert_eq!(num_integer::gcd(a, self.n), 1, "galois exponent must be a unit");
        let mut full = vec![BigRational::zero(); self.n as usize];
        for (j, c) in self.coords.iter().enumerate() {
            full[(j * a as usize) % self.n as usize] += c;
        }
        Self::reduce(self.n, full)
    }

    fn galois_units(&self) -> impl Iterator<Item = u32> + '_ {
        (2..self.n).filter(move |&a| num_integer::gcd(a, self.n) == 1)
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for a in self.galois_units() {
            acc = &acc * &self.galois(a);
        }
        acc.to_rational().expect("norm is Galois-invariant")
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut conj = Self::one(self.n);
        for a in self.galois_units() {
            conj = &conj * &self.galois(a);
        }
        let norm = (self * &conj).to_rational().expect("norm is rational");
        Some(conj.scale(&norm.recip()))
    }

    /// Value under the embedding `ζ -> exp(2πi/n)`.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.n as f64;
        self.coords
            .iter()
            .enumerate()
            .map(|(j, c)| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// If `self = ζ^k` for some `k`, returns `k` in `[0, n)`.
    pub fn root_of_unity_exponent(&self) -> Option<u32> {
        (0..self.n).find(|&k| *self == Self::zeta_pow(self.n, k as i64))
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(self.n, other.n, "cyclotomic conductors differ");
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.assert_same(rhs);
        CyclotomicNumber {
            n: self.n,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.assert_same(rhs);
        CyclotomicNumber {
            n: self.n,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.assert_same(rhs);
        let n = self.n as usize;
        let mut full = vec![BigRational::zero(); n];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % n] += a * b;
                }
            }
        }
        CyclotomicNumber::reduce(self.n, full)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            n: self.n,
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $m(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let show_mag = j == 0 || !mag.is_one();
            match (j, show_mag) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{mag}*")?,
                _ => {}
            }
            match j {
                0 => {}
                1 => write!(f, "z{}", self.n)?,
                _ => write!(f, "z{}^{j}", self.n)?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CyclotomicNumber", 2)?;
        st.serialize_field("n", &self.n)?;
        let coords: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::zeta_pow(n, k)
    }

    #[test]
    fn relation_and_order() {
        for n in [5u32, 11, 9, 25, 27, 121] {
            let mut sum = CyclotomicNumber::zero(n);
            for k in 0..n {
                sum = &sum + &z(n, k as i64);
            }
            let (l, e) = prime_power(n).unwrap();
            if e == 1 {
                assert!(sum.is_zero(), "sum of all {n}th roots");
            }
            assert!(z(n, 1).pow(n as u64).is_one());
            assert!(!z(n, 1).pow((n / l) as u64).is_one());
        }
    }

    #[test]
    fn multiplication_matches_exponents() {
        for n in [5u32, 11, 9] {
            for a in 0..n as i64 {
                for b in 0..n as i64 {
                    assert_eq!(&z(n, a) * &z(n, b), z(n, a + b));
                }
            }
        }
    }

    #[test]
    fn inverse_and_norm() {
        let x = &CyclotomicNumber::from_integer(5, 2) + &z(5, 1);
        let inv = x.inv().unwrap();
        assert!((&x * &inv).is_one());
        // N(2 + ζ5) = Φ5(-2) = 16 - 8 + 4 - 2 + 1
        assert_eq!(x.norm(), BigRational::from_integer(11.into()));
        assert!(CyclotomicNumber::zero(5).inv().is_none());
    }

    #[test]
    fn complex_embedding() {
        let c = z(5, 2).to_complex();
        let expected = Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 5.0);
        assert!((c - expected).norm() < 1e-12);
    }

    #[test]
    fn galois_is_ring_map() {
        let x = &z(5, 1) + &CyclotomicNumber::from_integer(5, 3);
        let y = &z(5, 3) - &z(5, 2);
        for a in 1..5 {
            assert_eq!((&x * &y).galois(a), &x.galois(a) * &y.galois(a));
        }
    }

    #[test]
    fn display() {
        assert_eq!(z(5, 1).to_string(), "z5");
        assert_eq!(z(5, 4).to_string(), "-1 - z5 - z5^2 - z5^3");
        assert_eq!(CyclotomicNumber::zero(5).to_string(), "0");
    }
}
