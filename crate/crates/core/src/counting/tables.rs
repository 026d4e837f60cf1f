//! Exponential/Zech-logarithm tables for fast arithmetic in a fixed `F_q`.
//!
//! Nonzero elements are handled as exponents `e` of a primitive element
//! `g`; multiplication adds exponents and addition uses
//! `g^a + g^b = g^{a + Z(b - a)}` with `Z(n) = log(1 + g^n)`.

use crate::ffield::{prime_divisors, FieldDescriptor, FieldElement};

use super::CountError;

/// Marker for the zero element in the exponent domain.
pub const ZERO: u32 = u32::MAX;

/// Tables are built only up to this field size (three `u32` arrays of length `q`).
pub const MAX_TABLE_SIZE: u64 = 1 << 26;

pub struct ZechTables {
    p: u32,
    q: u64,
    order: u32,
    /// exponent -> element index
    exp: Vec<u32>,
    /// element index -> exponent (`ZERO` at index 0)
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl ZechTables {
    pub fn new(field: &FieldDescriptor) -> Result<Self, CountError> {
        let q = field.q();
        if q > MAX_TABLE_SIZE {
            return Err(CountError::TableTooLarge { q });
        }
        let order = (q - 1) as u32;
        let g = primitive_element(field);
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![ZERO; q as usize];
        let mut cur = field.one();
        for e in 0..order {
            let idx = field.index(&cur) as u32;
            exp[e as usize] = idx;
            log[idx as usize] = e;
            cur = field.mul(&cur, &g)?;
        }
        let p = field.p();
        let zech = (0..order)
            .map(|n| {
                let idx = exp[n as usize];
                // adding 1 only touches the constant digit
                let c0 = idx % p;
                let shifted = idx - c0 + (c0 + 1) % p;
                log[shifted as usize]
            })
            .collect();
        Ok(ZechTables { p, q, order, exp, log, zech })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q - 1`, the order of the multiplicative group.
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn log_of_index(&self, idx: u64) -> u32 {
        self.log[idx as usize]
    }

    #[inline]
    pub fn index_of_log(&self, e: u32) -> u64 {
        if e == ZERO {
            0
        } else {
            self.exp[e as usize] as u64
        }
    }

    pub fn log_of(&self, field: &FieldDescriptor, a: &FieldElement) -> u32 {
        self.log_of_index(field.index(a))
    }

    /// Exponent of the image of an integer.
    pub fn log_of_int(&self, n: i64) -> u32 {
        self.log[n.rem_euclid(self.p as i64) as usize]
    }

    #[inline]
    pub fn zech(&self, n: u32) -> u32 {
        self.zech[n as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a + b;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.order - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            return ZERO;
        }
        let s = a + z;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == ZERO || self.p == 2 {
            return a;
        }
        let s = a + self.order / 2;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse of a nonzero exponent.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert_ne!(a, ZERO);
        if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    #[inline]
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == ZERO {
            return if e == 0 { 0 } else { ZERO };
        }
        ((a as u64 * (e % self.order as u64)) % self.order as u64) as u32
    }

    /// Quadratic character: the parity of the exponent.
    #[inline]
    pub fn chi(&self, a: u32) -> i64 {
        if a == ZERO {
            0
        } else if a & 1 == 0 {
            1
        } else {
            -1
        }
    }
}

fn primitive_element(field: &FieldDescriptor) -> FieldElement {
    let order = field.q() - 1;
    let primes = prime_divisors(order);
    for idx in 1..field.q() {
        let g = field.from_index(idx).expect("index in range");
        let one = field.one();
        if primes.iter().all(|&l| field.pow(&g, order / l).expect("same field") != one) {
            return g;
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}
