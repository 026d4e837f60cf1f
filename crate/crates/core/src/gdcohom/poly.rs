use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclotomic::CyclotomicNumber;

/// Number of variables `x_0..x_4`.
pub const NVARS: usize = 5;
/// Conductor of the coefficient field `Q(ζ_5)`.
pub const CONDUCTOR: u32 = 5;

pub type Exponent = [u8; NVARS];

/// Graded reverse lexicographic order on monomials of any degree.
pub fn grevlex_cmp(a: &Exponent, b: &Exponent) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for i in (0..NVARS).rev() {
            if a[i] != b[i] {
                // smaller exponent in the last differing variable wins
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

/// All exponents of total degree `d`, largest first in grevlex.
pub fn monomials_of_degree(d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut cur = [0u8; NVARS];
    fill(d, 0, &mut cur, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out
}

fn fill(rest: u32, i: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
    if i == NVARS - 1 {
        cur[i] = rest as u8;
        out.push(*cur);
        return;
    }
    for e in 0..=rest {
        cur[i] = e as u8;
        fill(rest - e, i + 1, cur, out);
    }
}

pub fn exponent_degree(e: &Exponent) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

pub fn format_monomial(e: &Exponent) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Homogeneous polynomial in `x_0..x_4` over `Q(ζ_5)`.
#[derive(Clone, PartialEq, Eq)]
pub struct CycPoly {
    degree: u32,
    terms: BTreeMap<Exponent, CyclotomicNumber>,
}

impl CycPoly {
    pub fn zero(degree: u32) -> Self {
        CycPoly {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(e: Exponent, c: CyclotomicNumber) -> Self {
        let mut p = CycPoly::zero(exponent_degree(&e));
        p.add_term(e, c);
        p
    }

    /// `x_i`.
    pub fn variable(i: usize) -> Self {
        let mut e = [0u8; NVARS];
        e[i] = 1;
        CycPoly::monomial(e, CyclotomicNumber::one(CONDUCTOR))
    }

    pub fn from_integer_terms(terms: &[(Exponent, i64)]) -> Self {
        let degree = terms.first().map_or(0, |(e, _)| exponent_degree(e));
        let mut p = CycPoly::zero(degree);
        for (e, c) in terms {
            p.add_term(*e, CyclotomicNumber::from_integer(CONDUCTOR, *c));
        }
        p
    }

    /// # Panics
    /// If `e` has the wrong degree.
    pub fn add_term(&mut self, e: Exponent, c: CyclotomicNumber) {
        assert_eq!(exponent_degree(&e), self.degree, "inhomogeneous term");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(|| CyclotomicNumber::zero(CONDUCTOR));
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &CyclotomicNumber)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &Exponent) -> CyclotomicNumber {
        self.terms.get(e).cloned().unwrap_or_else(|| CyclotomicNumber::zero(CONDUCTOR))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CyclotomicNumber::from_integer(CONDUCTOR, -1)))
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        let mut out = CycPoly::zero(self.degree);
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        CycPoly {
            degree: self.degree,
            terms: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.terms.iter().map(|(e, x)| (*e, x.scale(c))).collect()
            },
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CycPoly::zero(self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut e = *a;
                for i in 0..NVARS {
                    e[i] += b[i];
                }
                out.add_term(e, x * y);
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = CycPoly::zero(self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = *e;
            f[i] -= 1;
            out.add_term(f, c.scale(&BigRational::from_integer(e[i].into())));
        }
        out
    }

    /// The substitution `x_i -> x_{i+1}` (indices mod 5).
    pub fn cyclic_shift(&self) -> Self {
        let mut out = CycPoly::zero(self.degree);
        for (e, c) in &self.terms {
            let mut f = [0u8; NVARS];
            for i in 0..NVARS {
                f[(i + 1) % NVARS] = e[i];
            }
            out.add_term(f, c.clone());
        }
        out
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(e, c)| format!("({c})*{}", format_monomial(e))).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycPoly[{}]({self})", self.degree)
    }
}
