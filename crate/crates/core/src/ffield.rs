//! Arithmetic in prime fields and their extensions `F_{p^k}`.
//!
//! A field is described by a monic irreducible modulus over `F_p`; elements
//! are little-endian coefficient vectors in the class of `x`. The modulus is
//! the first irreducible polynomial in the order of the integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` built from its non-leading
//! coefficients, so the same `(p, k)` always yields the same field.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field size accepted by [`build_field`].
pub const MAX_FIELD_SIZE: u64 = 1 << 40;

/// Fields at most this large get a full quadratic-character table.
pub const CHI_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{k} exceeds 2^40")]
    TooLarge { p: u64, k: u32 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("quadratic character requested in characteristic 2")]
    CharacteristicTwo,
    #[error("malformed element: {0}")]
    Malformed(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Identifies a field so that elements of different fields are never mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldId {
    pub p: u32,
    pub k: u32,
    /// The modulus packed as the base-`p` integer of its low coefficients.
    pub modulus_code: u64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    field: FieldId,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field_id(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u64),
}

#[derive(Clone)]
pub struct FieldDescriptor {
    p: u32,
    k: u32,
    q: u64,
    /// Monic, length `k + 1`, little-endian.
    modulus: Vec<u32>,
    id: FieldId,
    chi_table: Option<Vec<i8>>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDescriptor")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds `F_{p^k}` with the deterministic modulus described in the module docs.
pub fn build_field(p: u64, k: u32) -> Result<FieldDescriptor, FieldError> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(FieldError::NotPrime(p));
    }
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = checked_pow(p, k).filter(|&q| q < MAX_FIELD_SIZE).ok_or(FieldError::TooLarge { p, k })?;
    let modulus = first_irreducible(p as u32, k);
    FieldDescriptor::with_modulus(p as u32, k, q, modulus)
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let limit = checked_pow(p as u64, k).expect("size checked by caller");
    for code in 0..limit {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if poly[0] != 0 && is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Rabin's test: `x^{p^k} = x (mod f)` and `gcd(x^{p^{k/l}} - x, f) = 1` for
/// every prime `l | k`. `f` must be monic of degree `k >= 1`.
pub fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let k = f.len() - 1;
    if k == 0 || f[k] != 1 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0, 1];
    let frob_power = |times: usize| -> Vec<u32> {
        let mut acc = x.clone();
        for _ in 0..times {
            acc = fp_poly::powmod(p, &acc, p as u64, f);
        }
        acc
    };
    if fp_poly::sub(p, &frob_power(k), &x) != Vec::<u32>::new() {
        return false;
    }
    for l in prime_divisors(k as u64) {
        let diff = fp_poly::sub(p, &frob_power(k / l as usize), &x);
        let g = fp_poly::gcd(p, &diff, f);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FieldDescriptor {
    fn with_modulus(p: u32, k: u32, q: u64, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let modulus_code = modulus[..k as usize].iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64);
        let mut field = FieldDescriptor {
            p,
            k,
            q,
            modulus,
            id: FieldId { p, k, modulus_code },
            chi_table: None,
        };
        if p != 2 && q <= CHI_TABLE_LIMIT {
            field.chi_table = Some(field.build_chi_table());
        }
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(vec![0; self.k as usize])
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let mut coeffs = vec![0; self.k as usize];
        coeffs[0] = n.rem_euclid(self.p as i64) as u32;
        self.wrap(coeffs)
    }

    /// The class of the polynomial variable, a root of the modulus.
    pub fn modulus_root(&self) -> FieldElement {
        if self.k == 1 {
            // modulus x: the root is 0
            return self.zero();
        }
        let mut coeffs = vec![0; self.k as usize];
        coeffs[1] = 1;
        self.wrap(coeffs)
    }

    pub fn from_coeffs(&self, coeffs: Vec<u32>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.k as usize {
            return Err(FieldError::Malformed(format!("expected {} coefficients, got {}", self.k, coeffs.len())));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::Malformed(format!("residue {c} not reduced mod {}", self.p)));
        }
        Ok(self.wrap(coeffs))
    }

    /// Element whose coefficient vector is the base-`p` expansion of `index`.
    pub fn from_index(&self, index: u64) -> Result<FieldElement, FieldError> {
        if index >= self.q {
            return Err(FieldError::Malformed(format!("index {index} out of range for q = {}", self.q)));
        }
        let mut coeffs = Vec::with_capacity(self.k as usize);
        let mut n = index;
        for _ in 0..self.k {
            coeffs.push((n % self.p as u64) as u32);
            n /= self.p as u64;
        }
        Ok(self.wrap(coeffs))
    }

    pub fn index(&self, a: &FieldElement) -> u64 {
        a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.from_index(i).expect("index in range"))
    }

    fn wrap(&self, coeffs: Vec<u32>) -> FieldElement {
        FieldElement { coeffs, field: self.id }
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.field == self.id {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let p = self.p;
        Ok(self.wrap(a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % p).collect()))
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let p = self.p;
        Ok(self.wrap(a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect()))
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        let p = self.p;
        Ok(self.wrap(a.coeffs.iter().map(|&x| (p - x) % p).collect()))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.mul_raw(&a.coeffs, &b.coeffs)))
    }

    fn mul_raw(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &m) in self.modulus[..k].iter().enumerate() {
                let t = c * m as u64 % p;
                prod[d - k + j] = (prod[d - k + j] + p - t) % p;
            }
        }
        prod.truncate(k);
        prod.into_iter().map(|c| c as u32).collect()
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: &FieldElement, mut e: u64) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        let mut base = a.coeffs.clone();
        let mut acc = self.one().coeffs;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            base = self.mul_raw(&base, &base);
            e >>= 1;
        }
        Ok(self.wrap(acc))
    }

    /// `a^{q-2}`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        self.pow(a, self.q - 2)
    }

    /// Dispatches one of the field operations; `b` is ignored by `Inv` and `Pow`.
    pub fn arith(&self, a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
        self.check(b)?;
        match op {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow(e) => self.pow(a, e),
        }
    }

    /// `a^{(q-1)/2}` read as `-1, 0, +1`; served from a table when `q <= 2^20`.
    pub fn quadratic_character(&self, a: &FieldElement) -> Result<i8, FieldError> {
        self.check(a)?;
        if self.p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if let Some(table) = &self.chi_table {
            return Ok(table[self.index(a) as usize]);
        }
        Ok(self.euler_criterion(&a.coeffs))
    }

    /// The character computed by exponentiation, bypassing any table.
    pub fn quadratic_character_euler(&self, a: &FieldElement) -> Result<i8, FieldError> {
        self.check(a)?;
        if self.p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        Ok(self.euler_criterion(&a.coeffs))
    }

    fn euler_criterion(&self, a: &[u32]) -> i8 {
        if a.iter().all(|&c| c == 0) {
            return 0;
        }
        let r = self.pow(&self.wrap(a.to_vec()), (self.q - 1) / 2).expect("same field");
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// The character table indexed by [`FieldDescriptor::index`], if built.
    pub fn chi_table(&self) -> Option<&[i8]> {
        self.chi_table.as_deref()
    }

    fn build_chi_table(&self) -> Vec<i8> {
        // Squaring every nonzero element marks exactly the (q-1)/2 nonzero squares.
        let mut table = vec![-1i8; self.q as usize];
        table[0] = 0;
        for i in 1..self.q {
            let a = self.from_index(i).expect("index in range");
            let sq = self.mul_raw(&a.coeffs, &a.coeffs);
            let j = sq.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64);
            table[j as usize] = 1;
        }
        table
    }
}

/// Dense polynomials over `F_p`, little-endian, normalized without trailing zeros.
pub mod fp_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn inv_mod_p(p: u32, a: u32) -> u32 {
        let mut e = p as u64 - 2;
        let mut base = a as u64 % p as u64;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
        let m = trim(m.to_vec());
        assert!(!m.is_empty(), "division by the zero polynomial");
        let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(p, m[dm]) as u64;
        let p64 = p as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p64;
            if c != 0 {
                for (j, &mj) in m.iter().enumerate() {
                    let idx = top - dm + j;
                    r[idx] = (r[idx] + p64 - c * mj as u64 % p64) % p64;
                }
            }
            r.pop();
        }
        trim(r.into_iter().map(|c| c as u32).collect())
    }

    pub fn mulmod(p: u32, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        rem(p, &mul(p, a, b), m)
    }

    pub fn powmod(p: u32, a: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
        let mut base = rem(p, a, m);
        let mut acc = rem(p, &[1], m);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(p, &acc, &base, m);
            }
            base = mulmod(p, &base, &base, m);
            e >>= 1;
        }
        acc
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(p, &a, &b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let inv = inv_mod_p(p, lead) as u64;
            a.iter_mut().for_each(|c| *c = (*c as u64 * inv % p as u64) as u32);
        }
        a
    }
}
