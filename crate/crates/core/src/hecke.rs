//! Arithmetic of `K = Q(sqrt(-11))`: splitting of primes, generators of
//! split primes, the CM coefficients `a_p(f)` and `a_p(g)`, the order-5
//! character of conductor 11 and the twisted product factors.
//!
//! `f` is the weight-2 CM newform of level 121 attached to a grössencharacter
//! `μ` of conductor `(sqrt(-11))`, `g` the weight-4 form attached to `μ^3`.

use num_integer::Roots;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;
use crate::ffield::is_prime;
use crate::lfunc::{LfuncError, LocalFactor};

/// Conductor of the CM field discriminant and of `χ`.
pub const LEVEL_PRIME: u64 = 11;
/// Order of `χ`.
pub const CHI_ORDER: u32 = 5;

/// Nonzero squares mod 11.
const SQUARES_MOD_11: [u64; 5] = [1, 3, 4, 5, 9];

/// `DLOG2[r]` is the discrete log of `r` base 2 in `(Z/11)^*`.
const DLOG2: [u32; 11] = [u32::MAX, 0, 1, 8, 2, 4, 9, 7, 3, 6, 5];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("11 is the bad prime")]
    BadPrime,
    #[error("no solution of a^2 + 11 b^2 = 4 * {0}")]
    NoSolution(u64),
    #[error("twist index {0} is not in 0..5")]
    TwistIndex(u32),
    #[error("coefficient of x^{degree} at p = {p} is not an integer: {value}")]
    NonIntegral { p: u64, degree: usize, value: String },
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        }
    }
}

/// `(a + b sqrt(-11)) / 2` with `a ≡ b (mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    a: i64,
    b: i64,
}

impl QuadInt {
    /// `None` if `a` and `b` have different parity.
    pub fn new(a: i64, b: i64) -> Option<Self> {
        ((a - b).rem_euclid(2) == 0).then_some(QuadInt { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn trace(&self) -> i64 {
        self.a
    }

    pub fn norm(&self) -> i64 {
        (self.a * self.a + 11 * self.b * self.b) / 4
    }

    pub fn conj(&self) -> Self {
        QuadInt { a: self.a, b: -self.b }
    }

    pub fn mul(&self, other: &Self) -> Self {
        // (a + b w)(c + d w) / 4 with w^2 = -11
        let a = (self.a * other.a - 11 * self.b * other.b) / 2;
        let b = (self.a * other.b + self.b * other.a) / 2;
        QuadInt { a, b }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(QuadInt { a: 2, b: 0 }, |acc, _| acc.mul(self))
    }

    /// Image in `O_K / (sqrt(-11)) = F_11`, i.e. `a / 2 mod 11`.
    pub fn residue_mod_root(&self) -> u64 {
        (self.a.rem_euclid(11) as u64 * 6) % 11
    }
}

fn check_prime(p: u64) -> Result<(), HeckeError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(HeckeError::NotPrime(p))
    }
}

pub fn split_type(p: u64) -> Result<SplitType, HeckeError> {
    check_prime(p)?;
    Ok(if p == LEVEL_PRIME {
        SplitType::Ramified
    } else if SQUARES_MOD_11.contains(&(p % 11)) {
        SplitType::Split
    } else {
        SplitType::Inert
    })
}

/// The positive solution of `a^2 + 11 b^2 = 4p`.
pub fn solve_norm_form(p: u64) -> Result<(u64, u64), HeckeError> {
    check_prime(p)?;
    let four_p = 4 * p;
    let mut b = 1u64;
    while 11 * b * b < four_p {
        let rest = four_p - 11 * b * b;
        let a = rest.sqrt();
        if a * a == rest {
            return Ok((a, b));
        }
        b += 1;
    }
    Err(HeckeError::NoSolution(p))
}

/// `μ(𝔭)` for the prime `𝔭` above a split `p` singled out by the residue rule.
pub fn grossencharacter_value(p: u64) -> Result<Option<QuadInt>, HeckeError> {
    if split_type(p)? != SplitType::Split {
        return Ok(None);
    }
    let (a, b) = solve_norm_form(p)?;
    let plus = QuadInt { a: a as i64, b: b as i64 };
    let gen = if SQUARES_MOD_11.contains(&plus.residue_mod_root()) {
        plus
    } else {
        QuadInt { a: -(a as i64), b: b as i64 }
    };
    Ok(Some(gen))
}

pub fn ap_f(p: u64) -> Result<i64, HeckeError> {
    Ok(grossencharacter_value(p)?.map_or(0, |m| m.trace()))
}

/// `π^3 + π̄^3 = a^3 - 3pa`.
pub fn ap_g(p: u64) -> Result<i64, HeckeError> {
    let a = ap_f(p)?;
    Ok(a * a * a - 3 * p as i64 * a)
}

/// Discrete log base 2 of `n mod 11`, or `None` if `11 | n`.
pub fn chi_dlog(n: i64) -> Option<u32> {
    let r = n.rem_euclid(11) as usize;
    (r != 0).then(|| DLOG2[r])
}

/// `χ^i(n)` with `χ(2) = ζ_5`.
pub fn chi(n: i64, i: u32) -> CyclotomicNumber {
    match chi_dlog(n) {
        None => CyclotomicNumber::zero(CHI_ORDER),
        Some(d) => CyclotomicNumber::zeta_pow(CHI_ORDER, (i as i64 * d as i64) % CHI_ORDER as i64),
    }
}

fn check_good(p: u64) -> Result<(), HeckeError> {
    check_prime(p)?;
    if p == LEVEL_PRIME {
        Err(HeckeError::BadPrime)
    } else {
        Ok(())
    }
}

/// `p a_p(f) Σ_i χ^i(p)`, the predicted trace of Frobenius on `H^3`.
pub fn trace_prediction(p: u64) -> Result<i128, HeckeError> {
    check_good(p)?;
    let char_sum = (0..CHI_ORDER).fold(CyclotomicNumber::zero(CHI_ORDER), |acc, i| acc + chi(p as i64, i));
    let s = char_sum.to_integer().expect("a sum over all powers of a character value is rational");
    let s: i128 = s.try_into().expect("the sum lies in {0, 5}");
    Ok(p as i128 * ap_f(p)? as i128 * s)
}

/// Coefficients `c_0..c_n` of a polynomial over `Q(ζ_5)`.
pub type CycPolynomial = Vec<CyclotomicNumber>;

pub fn cyc_poly_mul(a: &[CyclotomicNumber], b: &[CyclotomicNumber]) -> CycPolynomial {
    let n = a.first().or(b.first()).map_or(CHI_ORDER, |c| c.conductor());
    let mut out = vec![CyclotomicNumber::zero(n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `1 - a χ^i(p) s T + χ^{2i}(p) n T^2`.
fn twisted_quadratic(p: u64, i: u32, a: i64, s: i64, n: i64) -> CycPolynomial {
    let c = chi(p as i64, i);
    let c2 = chi(p as i64, 2 * i);
    vec![CyclotomicNumber::one(CHI_ORDER), c.scale(&rat(-a * s)), c2.scale(&rat(n))]
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn to_integers(p: u64, poly: &[CyclotomicNumber]) -> Result<Vec<i128>, HeckeError> {
    poly.iter()
        .enumerate()
        .map(|(degree, c)| {
            let z = c.to_integer().ok_or_else(|| HeckeError::NonIntegral {
                p,
                degree,
                value: c.to_string(),
            })?;
            i128::try_from(z).map_err(|_| LfuncError::Overflow("product coefficients").into())
        })
        .collect()
}

/// `∏_{i=0}^{4} (1 - a_p(f) χ^i(p) p x + χ^{2i}(p) p^3 x^2)`, checked to be integral.
pub fn h3_local_factor_product(p: u64) -> Result<LocalFactor, HeckeError> {
    check_good(p)?;
    let a = ap_f(p)?;
    let p_i = p as i64;
    let product = (0..CHI_ORDER).fold(vec![CyclotomicNumber::one(CHI_ORDER)], |acc, i| {
        cyc_poly_mul(&acc, &twisted_quadratic(p, i, a, p_i, p_i.pow(3)))
    });
    Ok(LocalFactor::new(p, to_integers(p, &product)?)?)
}

/// `(1 - a_p(f) χ^i(p) T + χ^{2i}(p) p T^2)(1 - a_p(g) χ^i(p) T + χ^{2i}(p) p^3 T^2)`.
pub fn spinor_local_factor(p: u64, i: u32) -> Result<CycPolynomial, HeckeError> {
    check_good(p)?;
    if i >= CHI_ORDER {
        return Err(HeckeError::TwistIndex(i));
    }
    let p_i = p as i64;
    let f = twisted_quadratic(p, i, ap_f(p)?, 1, p_i);
    let g = twisted_quadratic(p, i, ap_g(p)?, 1, p_i.pow(3));
    Ok(cyc_poly_mul(&f, &g))
}

/// Integer coefficients of `∏_i spinor_local_factor(p, i)`.
pub fn spinor_product(p: u64) -> Result<Vec<i128>, HeckeError> {
    let mut acc = vec![CyclotomicNumber::one(CHI_ORDER)];
    for i in 0..CHI_ORDER {
        acc = cyc_poly_mul(&acc, &spinor_local_factor(p, i)?);
    }
    to_integers(p, &acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeRecord {
    pub p: u64,
    pub split_type: SplitType,
    /// Positive solution of the norm form at split `p`.
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub ap_f: i64,
    pub ap_g: i64,
    pub chi_p: CyclotomicNumber,
    pub chi_dlog: Option<u32>,
}

pub fn hecke_record(p: u64) -> Result<HeckeRecord, HeckeError> {
    let split = split_type(p)?;
    let (a, b) = match split {
        SplitType::Split => {
            let (a, b) = solve_norm_form(p)?;
            (Some(a), Some(b))
        }
        _ => (None, None),
    };
    Ok(HeckeRecord {
        p,
        split_type: split,
        a,
        b,
        ap_f: ap_f(p)?,
        ap_g: ap_g(p)?,
        chi_p: chi(p as i64, 1),
        chi_dlog: chi_dlog(p as i64),
    })
}

/// Records for all primes `p <= max`, in increasing order.
pub fn hecke_table(max: u64) -> Vec<HeckeRecord> {
    let primes: Vec<u64> = (2..=max).filter(|&n| is_prime(n)).collect();
    primes.par_iter().map(|&p| hecke_record(p).expect("p is prime")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_weierstrass, WeierstrassCurve};
    use crate::ffield::build_field;
    use crate::lfunc::weil_bound_check;

    fn primes_up_to(n: u64) -> impl Iterator<Item = u64> {
        (2..=n).filter(|&m| is_prime(m))
    }

    #[test]
    fn splitting() {
        assert_eq!(split_type(11).unwrap(), SplitType::Ramified);
        assert_eq!(split_type(3).unwrap(), SplitType::Split);
        assert_eq!(split_type(2).unwrap(), SplitType::Inert);
        assert_eq!(split_type(43).unwrap(), SplitType::Inert);
        assert_eq!(split_type(9), Err(HeckeError::NotPrime(9)));
    }

    #[test]
    fn norm_form_examples() {
        assert_eq!(solve_norm_form(3).unwrap(), (1, 1));
        assert_eq!(solve_norm_form(5).unwrap(), (3, 1));
        assert_eq!(solve_norm_form(23).unwrap(), (9, 1));
        assert_eq!(solve_norm_form(2), Err(HeckeError::NoSolution(2)));
        for p in primes_up_to(1000).filter(|&p| split_type(p).unwrap() == SplitType::Split) {
            let (a, b) = solve_norm_form(p).unwrap();
            assert_eq!(a * a + 11 * b * b, 4 * p);
            assert_eq!(QuadInt::new(a as i64, b as i64).unwrap().norm(), p as i64);
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(ap_f(3).unwrap(), -1);
        assert_eq!(ap_f(2).unwrap(), 0);
        assert_eq!(ap_f(5).unwrap(), -3);
        assert_eq!(ap_f(23).unwrap(), -9);
        assert_eq!(ap_f(11).unwrap(), 0);
        assert_eq!(ap_g(3).unwrap(), 8);
        assert_eq!(ap_g(2).unwrap(), 0);
        assert_eq!(ap_g(5).unwrap(), 18);
    }

    #[test]
    fn ap_g_is_trace_of_cube() {
        for p in primes_up_to(300) {
            if let Some(m) = grossencharacter_value(p).unwrap() {
                assert_eq!(m.pow(3).trace(), ap_g(p).unwrap(), "p = {p}");
                assert_eq!(m.mul(&m.conj()).a(), 2 * p as i64);
            }
        }
    }

    #[test]
    fn character_values() {
        assert_eq!(chi(2, 1), CyclotomicNumber::zeta_pow(5, 1));
        assert_eq!(chi(3, 1), CyclotomicNumber::zeta_pow(5, 3));
        assert_eq!(chi(10, 1), CyclotomicNumber::one(5));
        assert!(chi(22, 3).is_zero());
        assert_eq!(chi(-1, 1), CyclotomicNumber::one(5));
        for m in 1..11i64 {
            for n in 1..11i64 {
                assert_eq!(chi(m * n, 1), &chi(m, 1) * &chi(n, 1));
            }
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_prediction(3).unwrap(), 0);
        assert_eq!(trace_prediction(23).unwrap(), -1035);
        assert_eq!(trace_prediction(43).unwrap(), 0);
        assert_eq!(trace_prediction(11), Err(HeckeError::BadPrime));
    }

    #[test]
    fn product_factor_at_three() {
        let lf = h3_local_factor_product(3).unwrap();
        assert_eq!(lf.coeffs(), &[1, 0, 0, 0, 0, 7533, 0, 0, 0, 0, 14348907]);
    }

    #[test]
    fn product_factor_examples() {
        let lf = h3_local_factor_product(2).unwrap();
        let mut expect = [0i128; 11];
        expect[0] = 1;
        expect[10] = 1 << 15;
        assert_eq!(lf.coeffs(), &expect[..]);

        let lf = h3_local_factor_product(23).unwrap();
        let quad: [i128; 3] = [1, 9 * 23, 23i128.pow(3)];
        let expect = crate::lfunc::expand_product(&[&quad[..]; 5]).unwrap();
        assert_eq!(lf.coeffs(), &expect[..]);
    }

    #[test]
    fn cm_dichotomy_and_hasse() {
        for p in primes_up_to(1000) {
            let a = ap_f(p).unwrap();
            assert_eq!(a == 0, split_type(p).unwrap() != SplitType::Split, "p = {p}");
            assert!((a * a) as u64 <= 4 * p, "p = {p}");
        }
    }

    #[test]
    fn agrees_with_curve_counts() {
        let curve = WeierstrassCurve::cm_conductor_121();
        for p in primes_up_to(500).filter(|&p| p != 11) {
            let n = count_weierstrass(&curve, &build_field(p, 1).unwrap()).unwrap() as i64;
            assert_eq!(ap_f(p).unwrap(), p as i64 + 1 - n, "p = {p}");
        }
    }

    #[test]
    fn product_factors_are_pure_and_match_traces() {
        for p in primes_up_to(100).filter(|&p| p != 11) {
            let lf = h3_local_factor_product(p).unwrap();
            assert!(weil_bound_check(&lf).unwrap(), "p = {p}");
            assert_eq!(-lf.coeffs()[1], trace_prediction(p).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn spinor_factors() {
        let s = spinor_local_factor(3, 0).unwrap();
        let ints: Vec<i64> = s.iter().map(|c| c.to_integer().unwrap().try_into().unwrap()).collect();
        // (1 + T + 3T^2)(1 - 8T + 27T^2)
        assert_eq!(ints, vec![1, -7, 22, 3, 81]);

        for i in 0..5 {
            let s = spinor_local_factor(2, i).unwrap();
            let c2 = chi(2, 2 * i);
            assert!(s[1].is_zero() && s[3].is_zero());
            assert_eq!(s[2], c2.scale(&rat(10)));
            assert_eq!(s[4], (&c2 * &c2).scale(&rat(16)));
        }
        for p in [2u64, 3, 5, 7, 13, 23] {
            assert_eq!(spinor_product(p).unwrap().len(), 21);
        }
        assert_eq!(spinor_local_factor(3, 5), Err(HeckeError::TwistIndex(5)));
    }

    #[test]
    fn table_is_sorted_and_consistent() {
        let t = hecke_table(100);
        assert_eq!(t.len(), 25);
        assert!(t.windows(2).all(|w| w[0].p < w[1].p));
        for r in &t {
            assert_eq!(r.ap_g, r.ap_f.pow(3) - 3 * r.p as i64 * r.ap_f);
            assert_eq!(r.a.is_some(), r.split_type == SplitType::Split);
        }
    }
}
