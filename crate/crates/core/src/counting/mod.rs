//! Point counting on the Klein cubic threefold, elliptic curves and
//! general hypersurfaces over finite fields.

mod curve_sum;
mod form;
mod klein;
mod naive;
pub mod tables;
mod weierstrass;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{build_field, FieldDescriptor, FieldElement, FieldError};

pub use curve_sum::count_klein_curve_sum;
pub use form::{verify_fermat_cover, FermatCoverCheck, HomogeneousForm, Monomial};
pub use klein::{count_by_x0_fibers, count_klein_direct, count_klein_fast};
pub use naive::count_hypersurface_naive;
pub use weierstrass::{count_weierstrass, WeierstrassCurve};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("the {0} counter needs odd characteristic")]
    CharacteristicTwo(&'static str),
    #[error("work estimate {work} exceeds the budget {budget}")]
    BudgetExceeded { work: u128, budget: u128 },
    #[error("field of size {q} is too large for lookup tables")]
    TableTooLarge { q: u64 },
    #[error("curve has bad reduction at {p}")]
    BadReduction { p: u32 },
    #[error("form has {got} variables, expected {expected}")]
    Arity { got: usize, expected: usize },
}

/// Counting strategy, serialized as the tag stored in count caches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// `O(q^4)` sum of quadratic-character values over fibers in `x_0`.
    QuadFiber,
    /// `O(q log q)` character sum over an auxiliary plane curve (odd `p`).
    CurveSum,
    /// `O(q^5)` evaluation of the cubic at every affine point.
    Direct,
    /// Generic evaluation at every projective point.
    Naive,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::QuadFiber => "quad-fiber",
            Algorithm::CurveSum => "curve-sum",
            Algorithm::Direct => "direct",
            Algorithm::Naive => "naive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Algorithm::QuadFiber, Algorithm::CurveSum, Algorithm::Direct, Algorithm::Naive]
            .into_iter()
            .find(|a| a.as_str() == s)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Upper bound on the number of fibers (or points) a counter may visit.
    pub budget: u128,
    /// Outer `(x_1, x_3)` pairs per parallel work item.
    pub chunk_size: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        // 243^4 fibers fit; 256^4 (p = 2, k = 8) does not.
        CountOptions {
            budget: 4_000_000_000,
            chunk_size: 4096,
        }
    }
}

impl CountOptions {
    fn check(&self, work: u128) -> Result<(), CountError> {
        if work > self.budget {
            Err(CountError::BudgetExceeded { work, budget: self.budget })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub p: u32,
    pub k: u32,
    pub count: u128,
    pub algorithm: Algorithm,
    pub elapsed_ms: u64,
}

/// `q^4 + q^3 + q^2 + q + 1`.
pub fn projective_space_size(q: u64, dim: u32) -> u128 {
    (0..=dim).map(|i| (q as u128).pow(i)).sum()
}

/// Counts `#X(F_{p^k})` with the requested algorithm and records the timing.
pub fn count_klein(p: u64, k: u32, algorithm: Algorithm, options: &CountOptions) -> Result<CountRecord, CountError> {
    let field = build_field(p, k)?;
    let start = Instant::now();
    let count = match algorithm {
        Algorithm::QuadFiber => count_klein_fast(&field, options)?,
        Algorithm::CurveSum => count_klein_curve_sum(&field)?,
        Algorithm::Direct => count_klein_direct(&field, options)?,
        Algorithm::Naive => count_hypersurface_naive(&HomogeneousForm::klein(), &field, options)?,
    };
    Ok(CountRecord {
        p: field.p(),
        k,
        count,
        algorithm,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// The cheapest exact method for a field: direct enumeration in
/// characteristic 2, the fiber method for small odd fields and the curve
/// sum beyond that.
pub fn preferred_algorithm(p: u64, k: u32) -> Algorithm {
    let q = (p as u128).pow(k);
    if p == 2 {
        Algorithm::Direct
    } else if q <= 243 {
        Algorithm::QuadFiber
    } else {
        Algorithm::CurveSum
    }
}

/// Number of roots of `a x^2 + b x + c` in `F_q` (`q` if the polynomial vanishes).
pub fn quadratic_root_count(a: &FieldElement, b: &FieldElement, c: &FieldElement, field: &FieldDescriptor) -> Result<u64, CountError> {
    if field.p() == 2 {
        return Err(CountError::CharacteristicTwo("quadratic root"));
    }
    if !a.is_zero() {
        let disc = field.sub(&field.mul(b, b)?, &field.mul(&field.from_int(4), &field.mul(a, c)?)?)?;
        return Ok((1 + field.quadratic_character(&disc)? as i64) as u64);
    }
    if !b.is_zero() {
        return Ok(1);
    }
    Ok(if c.is_zero() { field.q() } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root_examples() {
        let f7 = build_field(7, 1).unwrap();
        let e = |n| f7.from_int(n);
        assert_eq!(quadratic_root_count(&e(1), &e(0), &e(-1), &f7).unwrap(), 2);
        assert_eq!(quadratic_root_count(&e(1), &e(0), &e(1), &f7).unwrap(), 0);
        assert_eq!(quadratic_root_count(&e(1), &e(2), &e(1), &f7).unwrap(), 1);
        assert_eq!(quadratic_root_count(&e(0), &e(3), &e(1), &f7).unwrap(), 1);
        assert_eq!(quadratic_root_count(&e(0), &e(0), &e(1), &f7).unwrap(), 0);
        let f5 = build_field(5, 1).unwrap();
        let z = f5.zero();
        assert_eq!(quadratic_root_count(&z, &z, &z, &f5).unwrap(), 5);
        let f2 = build_field(2, 1).unwrap();
        assert!(quadratic_root_count(&f2.one(), &f2.one(), &f2.one(), &f2).is_err());
    }

    #[test]
    fn quadratic_root_count_matches_enumeration() {
        let f = build_field(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let roots = f
                        .elements()
                        .filter(|x| {
                            let ax2 = f.mul(&a, &f.mul(x, x).unwrap()).unwrap();
                            let bx = f.mul(&b, x).unwrap();
                            f.add(&f.add(&ax2, &bx).unwrap(), &c).unwrap().is_zero()
                        })
                        .count() as u64;
                    assert_eq!(quadratic_root_count(&a, &b, &c, &f).unwrap(), roots);
                }
            }
        }
    }

    #[test]
    fn algorithm_tags() {
        for a in [Algorithm::QuadFiber, Algorithm::CurveSum, Algorithm::Direct, Algorithm::Naive] {
            assert_eq!(Algorithm::parse(a.as_str()), Some(a));
        }
        assert_eq!(preferred_algorithm(2, 5), Algorithm::Direct);
        assert_eq!(preferred_algorithm(3, 5), Algorithm::QuadFiber);
        assert_eq!(preferred_algorithm(23, 2), Algorithm::CurveSum);
    }
}
