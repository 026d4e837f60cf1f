//! Degree-10 Frobenius polynomials on `H^3` from point counts.
//!
//! With `t_k = Σ λ_i^k` over the ten eigenvalues on `H^3`, the Lefschetz
//! formula reads `N_k = 1 + p^k + p^{2k} + p^{3k} - t_k`. Newton's identities
//! recover `e_1..e_5`; the pairing on `H^3` forces
//! `c_{10-j} = p^{3(5-j)} c_j` for the coefficients of
//! `P(x) = det(1 - Frob x) = Σ c_k x^k`, `c_k = (-1)^k e_k`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::is_prime;

pub const WEIGHT: u32 = 3;
pub const DEGREE: usize = 10;
/// Relative tolerance on `|λ| / p^{3/2}` used by [`weil_bound_check`].
pub const PURITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LfuncError {
    #[error("{0} is not a prime of good reduction")]
    BadPrime(u64),
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("Newton step {k} is not integral: {numerator}/{k}")]
    NonIntegral { k: usize, numerator: i128 },
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("invalid local factor: {0}")]
    Invalid(String),
    #[error("power sum t_{k} = {value} violates the Weil bound")]
    WeilBound { k: usize, value: i128 },
    #[error("root finding did not converge for degree {degree}")]
    NonConvergence { degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    p: u64,
    coeffs: Vec<i128>,
}

fn pow_i128(base: u64, exp: u32) -> Result<i128, LfuncError> {
    (base as i128).checked_pow(exp).ok_or(LfuncError::Overflow("raising p to a power"))
}

/// `1 + p^k + p^{2k} + p^{3k}`, the trace on even cohomology.
pub fn even_trace(p: u64, k: u32) -> Result<i128, LfuncError> {
    let mut acc = 0i128;
    for i in 0..4 {
        acc = acc.checked_add(pow_i128(p, i * k)?).ok_or(LfuncError::Overflow("summing even traces"))?;
    }
    Ok(acc)
}

impl LocalFactor {
    /// Checks `c_0 = 1`, degree 10 and the functional equation.
    pub fn new(p: u64, coeffs: Vec<i128>) -> Result<Self, LfuncError> {
        if !is_prime(p) {
            return Err(LfuncError::BadPrime(p));
        }
        if coeffs.len() != DEGREE + 1 {
            return Err(LfuncError::Invalid(format!("expected {} coefficients, got {}", DEGREE + 1, coeffs.len())));
        }
        if coeffs[0] != 1 {
            return Err(LfuncError::Invalid(format!("constant term {} != 1", coeffs[0])));
        }
        if let Some(j) = functional_equation_defect(p, &coeffs)? {
            return Err(LfuncError::Invalid(format!("c_{} != p^{} c_{j}", DEGREE - j, 3 * (5 - j))));
        }
        Ok(LocalFactor { p, coeffs })
    }

    /// Builds a factor without the functional-equation check.
    pub fn new_unchecked(p: u64, coeffs: Vec<i128>) -> Self {
        LocalFactor { p, coeffs }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn weight(&self) -> u32 {
        WEIGHT
    }

    /// Elementary symmetric functions `e_0..e_10` of the eigenvalues.
    pub fn elementary(&self) -> Vec<i128> {
        self.coeffs.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }).collect()
    }

    /// `t_1..t_m` by Newton's identities.
    pub fn power_sums(&self, m: usize) -> Result<PowerSums, LfuncError> {
        let e = self.elementary();
        let e_at = |k: usize| e.get(k).copied().unwrap_or(0);
        let mut t: Vec<i128> = Vec::with_capacity(m);
        for k in 1..=m {
            let sign = |i: usize| if i % 2 == 0 { 1i128 } else { -1 };
            let mut acc = sign(k - 1)
                .checked_mul(k as i128)
                .and_then(|s| s.checked_mul(e_at(k)))
                .ok_or(LfuncError::Overflow("Newton forward"))?;
            for i in 1..k {
                let term = e_at(k - i).checked_mul(t[i - 1]).ok_or(LfuncError::Overflow("Newton forward"))?;
                acc = acc.checked_add(sign(k - 1 + i) * term).ok_or(LfuncError::Overflow("Newton forward"))?;
            }
            t.push(acc);
        }
        Ok(PowerSums { p: self.p, sums: t })
    }

    /// `N_k = 1 + p^k + p^{2k} + p^{3k} - t_k` for `k = 1..m`.
    pub fn point_counts(&self, m: usize) -> Result<Vec<i128>, LfuncError> {
        let ps = self.power_sums(m)?;
        ps.sums
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                even_trace(self.p, i as u32 + 1)?
                    .checked_sub(t)
                    .ok_or(LfuncError::Overflow("point counts"))
            })
            .collect()
    }
}

/// First `j` in `0..=4` with `c_{10-j} != p^{3(5-j)} c_j`, if any.
pub fn functional_equation_defect(p: u64, coeffs: &[i128]) -> Result<Option<usize>, LfuncError> {
    for j in 0..=4 {
        let scaled = pow_i128(p, 3 * (5 - j) as u32)?
            .checked_mul(coeffs[j])
            .ok_or(LfuncError::Overflow("functional equation"))?;
        if coeffs[DEGREE - j] != scaled {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSums {
    pub p: u64,
    /// `t_1, t_2, ...`
    pub sums: Vec<i128>,
}

impl PowerSums {
    /// Exact check of `|t_k| <= 10 p^{3k/2}`, i.e. `t_k^2 <= 100 p^{3k}`.
    pub fn check_weil_bound(&self) -> Result<(), LfuncError> {
        for (i, &t) in self.sums.iter().enumerate() {
            let k = i + 1;
            let bound = pow_i128(self.p, 3 * k as u32).ok().and_then(|b| b.checked_mul(100));
            let sq = t.checked_mul(t);
            match (sq, bound) {
                (Some(sq), Some(bound)) if sq > bound => return Err(LfuncError::WeilBound { k, value: t }),
                (None, Some(_)) => return Err(LfuncError::WeilBound { k, value: t }),
                _ => {}
            }
        }
        Ok(())
    }
}

/// `t_k = (1 + p^k + p^{2k} + p^{3k}) - N_k`.
pub fn counts_to_power_sums(counts: &[u128], p: u64) -> Result<PowerSums, LfuncError> {
    if p == 11 || !is_prime(p) {
        return Err(LfuncError::BadPrime(p));
    }
    let sums = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let n = i128::try_from(n).map_err(|_| LfuncError::Overflow("reading counts"))?;
            even_trace(p, i as u32 + 1)?.checked_sub(n).ok_or(LfuncError::Overflow("power sums"))
        })
        .collect::<Result<Vec<_>, LfuncError>>()?;
    let ps = PowerSums { p, sums };
    ps.check_weil_bound()?;
    Ok(ps)
}

/// Newton's identities on `t_1..t_5`, completed by the functional equation.
pub fn power_sums_to_local_factor(ps: &PowerSums) -> Result<LocalFactor, LfuncError> {
    if ps.sums.len() < 5 {
        return Err(LfuncError::TooFew {
            needed: 5,
            got: ps.sums.len(),
        });
    }
    let t = &ps.sums;
    let mut e = vec![1i128];
    for k in 1..=5 {
        // k e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} t_i
        let mut acc = 0i128;
        for i in 1..=k {
            let term = e[k - i].checked_mul(t[i - 1]).ok_or(LfuncError::Overflow("Newton inverse"))?;
            acc = if i % 2 == 1 { acc.checked_add(term) } else { acc.checked_sub(term) }.ok_or(LfuncError::Overflow("Newton inverse"))?;
        }
        if acc % k as i128 != 0 {
            return Err(LfuncError::NonIntegral { k, numerator: acc });
        }
        e.push(acc / k as i128);
    }
    let mut coeffs = vec![0i128; DEGREE + 1];
    for (k, &ek) in e.iter().enumerate() {
        coeffs[k] = if k % 2 == 0 { ek } else { -ek };
    }
    for j in 0..5 {
        coeffs[DEGREE - j] = pow_i128(ps.p, 3 * (5 - j) as u32)?
            .checked_mul(coeffs[j])
            .ok_or(LfuncError::Overflow("functional equation"))?;
    }
    LocalFactor::new(ps.p, coeffs)
}

/// Convenience: counts `N_1..N_5` straight to the local factor.
pub fn local_factor_from_counts(counts: &[u128], p: u64) -> Result<LocalFactor, LfuncError> {
    power_sums_to_local_factor(&counts_to_power_sums(counts, p)?)
}

/// Product of integer polynomials (little-endian coefficients).
pub fn poly_mul(a: &[i128], b: &[i128]) -> Result<Vec<i128>, LfuncError> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let t = x.checked_mul(y).ok_or(LfuncError::Overflow("polynomial product"))?;
            out[i + j] = out[i + j].checked_add(t).ok_or(LfuncError::Overflow("polynomial product"))?;
        }
    }
    Ok(out)
}

/// Whether every reciprocal root `λ` of `P` has `|λ| = p^{3/2}` within
/// [`PURITY_TOLERANCE`]. Repeated roots are split off first (Yun's
/// square-free decomposition over `Q`), then each square-free part is solved
/// numerically after the substitution `x = y p^{-3/2}`.
pub fn weil_bound_check(lf: &LocalFactor) -> Result<bool, LfuncError> {
    let roots = reciprocal_roots(lf)?;
    let target = (lf.p as f64).powf(1.5);
    Ok(roots.iter().all(|lam| ((lam.norm() - target) / target).abs() <= PURITY_TOLERANCE))
}

/// The reciprocal roots `λ` with multiplicity, `P(x) = Π (1 - λ x)`.
pub fn reciprocal_roots(lf: &LocalFactor) -> Result<Vec<Complex64>, LfuncError> {
    let poly: Vec<BigRational> = lf.coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    let scale = (lf.p as f64).powf(-1.5);
    let mut out = Vec::new();
    for (factor, mult) in qpoly::square_free_decomposition(&poly) {
        let deg = factor.len() - 1;
        if deg == 0 {
            continue;
        }
        // normalize to roots near the unit circle; coefficients scale by p^{-3k/2}
        let coeffs: Vec<Complex64> = factor
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::new(c.to_f64().unwrap_or(f64::NAN) * scale.powi(k as i32), 0.0))
            .collect();
        let ys = roots::aberth(&coeffs).ok_or(LfuncError::NonConvergence { degree: deg })?;
        for y in ys {
            let lam = Complex64::new(1.0, 0.0) / (y * scale);
            for _ in 0..mult {
                out.push(lam);
            }
        }
    }
    Ok(out)
}

/// Polynomials over `Q`, little-endian, trimmed.
mod qpoly {
    use super::*;

    pub type QPoly = Vec<BigRational>;

    pub fn trim(mut a: QPoly) -> QPoly {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        a
    }

    pub fn deriv(a: &[BigRational]) -> QPoly {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
        let n = a.len().max(b.len());
        let z = BigRational::zero();
        trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
    }

    pub fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
        let b = trim(b.to_vec());
        let db = b.len() - 1;
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut quot = vec![BigRational::zero(); r.len() - db];
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let c = &r[dr] / &b[db];
            for (j, bj) in b.iter().enumerate() {
                r[dr - db + j] -= &c * bj;
            }
            quot[dr - db] = c;
            r = trim(r);
            if r.len() <= db {
                break;
            }
        }
        (trim(quot), r)
    }

    pub fn monic(a: QPoly) -> QPoly {
        match a.last().cloned() {
            Some(lead) => a.into_iter().map(|c| c / &lead).collect(),
            None => a,
        }
    }

    pub fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y);
            x = y;
            y = r;
        }
        monic(x)
    }

    fn is_constant(a: &[BigRational]) -> bool {
        a.len() <= 1
    }

    /// Yun's algorithm: pairs `(g_i, i)` with `f = c Π g_i^i`, `g_i` square-free.
    pub fn square_free_decomposition(f: &[BigRational]) -> Vec<(QPoly, usize)> {
        let f = trim(f.to_vec());
        let df = deriv(&f);
        let a = gcd(&f, &df);
        let mut b = divrem(&f, &a).0;
        let mut c = divrem(&df, &a).0;
        let mut d = sub(&c, &deriv(&b));
        let mut out = Vec::new();
        let mut i = 1;
        while !is_constant(&b) {
            let g = gcd(&b, &d);
            b = divrem(&b, &g).0;
            c = divrem(&d, &g).0;
            d = sub(&c, &deriv(&b));
            if !is_constant(&g) {
                out.push((g, i));
            }
            i += 1;
        }
        out
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        fn q(v: &[i64]) -> QPoly {
            v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()
        }

        #[test]
        fn yun_on_repeated_factor() {
            // (x - 1)^3 (x + 2)
            let f = q(&[2, -5, 3, 1, -1]).into_iter().map(|c| -c).collect::<Vec<_>>();
            let f = trim(f);
            let parts = square_free_decomposition(&f);
            let degs: Vec<(usize, usize)> = parts.iter().map(|(g, i)| (g.len() - 1, *i)).collect();
            assert_eq!(degs, vec![(1, 1), (1, 3)]);
            assert_eq!(parts[1].0, q(&[-1, 1]));
        }
    }
}

/// Simultaneous polynomial root finding.
mod roots {
    use num_complex::Complex64;

    fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Aberth–Ehrlich iteration followed by Newton polishing. Returns `None`
    /// if the iterates fail to settle.
    pub fn aberth(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let c: Vec<Complex64> = coeffs.iter().map(|&a| a / lead).collect();
        if n == 1 {
            return Some(vec![-c[0]]);
        }
        let radius = c[0].norm().powf(1.0 / n as f64).max(1e-3);
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.4))
            .collect();
        let mut converged = false;
        for _ in 0..1000 {
            let mut max_step = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval_with_derivative(&c, z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if !w.re.is_finite() || !w.im.is_finite() {
                    return None;
                }
                z[i] -= w;
                max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
            }
            if max_step < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            let worst = z.iter().map(|&zi| eval_with_derivative(&c, zi).0.norm()).fold(0.0, f64::max);
            if worst > 1e-9 {
                return None;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = eval_with_derivative(&c, *zi);
                if dp.norm() == 0.0 {
                    break;
                }
                *zi -= p / dp;
            }
        }
        Some(z)
    }
}

/// Product of several integer polynomials.
pub fn expand_product(factors: &[&[i128]]) -> Result<Vec<i128>, LfuncError> {
    let mut acc = vec![1i128];
    for f in factors {
        acc = poly_mul(&acc, f)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRATIC: [i128; 3] = [1, 3, 27];
    const OCTIC: [i128; 9] = [1, -3, -18, 135, 81, 3645, -13122, -59049, 531441];

    fn l3() -> Vec<i128> {
        expand_product(&[&QUADRATIC, &OCTIC]).unwrap()
    }

    #[test]
    fn expanded_l3_shape() {
        let c = l3();
        assert_eq!(c, vec![1, 0, 0, 0, 0, 7533, 0, 0, 0, 0, 14348907]);
        assert!(LocalFactor::new(3, c).is_ok());
    }

    #[test]
    fn newton_recovers_l3() {
        let ps = PowerSums {
            p: 3,
            sums: vec![0, 0, 0, 0, -37665],
        };
        assert_eq!(power_sums_to_local_factor(&ps).unwrap().coeffs(), l3().as_slice());
    }

    #[test]
    fn zero_power_sums() {
        for p in [2u64, 3, 5, 23] {
            let lf = power_sums_to_local_factor(&PowerSums { p, sums: vec![0; 5] }).unwrap();
            let mut expected = vec![0i128; 11];
            expected[0] = 1;
            expected[10] = (p as i128).pow(15);
            assert_eq!(lf.coeffs(), expected.as_slice());
            assert!(weil_bound_check(&lf).unwrap());
        }
    }

    #[test]
    fn counts_round_trip() {
        let lf = LocalFactor::new(3, l3()).unwrap();
        let counts: Vec<u128> = lf.point_counts(5).unwrap().into_iter().map(|n| n as u128).collect();
        assert_eq!(counts[0], 40);
        let ps = counts_to_power_sums(&counts, 3).unwrap();
        assert_eq!(ps.sums, vec![0, 0, 0, 0, -37665]);
        assert_eq!(power_sums_to_local_factor(&ps).unwrap(), lf);
    }

    #[test]
    fn power_sums_of_l3() {
        let lf = LocalFactor::new(3, l3()).unwrap();
        assert_eq!(lf.power_sums(5).unwrap().sums, vec![0, 0, 0, 0, -37665]);
    }

    #[test]
    fn p23_trace() {
        let ps = counts_to_power_sums(&[even_trace(23, 1).unwrap() as u128 + 1035], 23).unwrap();
        assert_eq!(ps.sums, vec![-1035]);
    }

    #[test]
    fn purity() {
        let lf = LocalFactor::new(3, l3()).unwrap();
        assert!(weil_bound_check(&lf).unwrap());
        let mut bumped = l3();
        bumped[1] += 1;
        assert!(!weil_bound_check(&LocalFactor::new_unchecked(3, bumped)).unwrap());
    }

    #[test]
    fn purity_with_repeated_roots() {
        // (1 + 9*23 x + 23^3 x^2)^5
        let quad = [1i128, 207, 12167];
        let lf = LocalFactor::new(23, expand_product(&[&quad[..]; 5]).unwrap()).unwrap();
        assert!(weil_bound_check(&lf).unwrap());
        assert_eq!(reciprocal_roots(&lf).unwrap().len(), 10);
    }

    #[test]
    fn errors() {
        assert!(matches!(counts_to_power_sums(&[1], 11), Err(LfuncError::BadPrime(11))));
        assert!(matches!(
            power_sums_to_local_factor(&PowerSums { p: 3, sums: vec![0; 4] }),
            Err(LfuncError::TooFew { .. })
        ));
        // t_2 = 1 with t_1 = 0 forces 2 e_2 = -1
        let bad = PowerSums {
            p: 3,
            sums: vec![0, 1, 0, 0, 0],
        };
        assert!(matches!(power_sums_to_local_factor(&bad), Err(LfuncError::NonIntegral { k: 2, .. })));
        assert!(LocalFactor::new(3, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]).is_err());
        assert!(matches!(counts_to_power_sums(&[1000], 3), Err(LfuncError::WeilBound { .. })));
    }

    #[test]
    fn json_shape() {
        let lf = LocalFactor::new(3, l3()).unwrap();
        let json = serde_json::to_string(&lf).unwrap();
        assert_eq!(json, r#"{"p":3,"coeffs":[1,0,0,0,0,7533,0,0,0,0,14348907]}"#);
    }
}
