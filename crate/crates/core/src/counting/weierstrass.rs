use serde::{Deserialize, Serialize};

use crate::ffield::{FieldDescriptor, FieldElement};

use super::CountError;

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl WeierstrassCurve {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Self {
        WeierstrassCurve { a1, a2, a3, a4, a6 }
    }

    /// `y^2 + y = x^3 - x^2 - 7x + 10`, conductor 121, CM by the maximal
    /// order of `Q(sqrt(-11))`.
    pub fn cm_conductor_121() -> Self {
        Self::new(0, -1, 1, -7, 10)
    }

    pub fn b_invariants(&self) -> [i128; 4] {
        let (a1, a2, a3, a4, a6) = (self.a1 as i128, self.a2 as i128, self.a3 as i128, self.a4 as i128, self.a6 as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn has_good_reduction(&self, p: u32) -> bool {
        self.discriminant() % p as i128 != 0
    }
}

/// `#E(F_q)`, including the point at infinity.
pub fn count_weierstrass(curve: &WeierstrassCurve, field: &FieldDescriptor) -> Result<u64, CountError> {
    if !curve.has_good_reduction(field.p()) {
        return Err(CountError::BadReduction { p: field.p() });
    }
    let c = |n: i64| field.from_int(n);
    let mut count = 1u64;
    if field.p() == 2 {
        let elems: Vec<FieldElement> = field.elements().collect();
        for x in &elems {
            let x2 = field.mul(x, x)?;
            let x3 = field.mul(&x2, x)?;
            let rhs = field.add(
                &field.add(&x3, &field.mul(&c(curve.a2), &x2)?)?,
                &field.add(&field.mul(&c(curve.a4), x)?, &c(curve.a6))?,
            )?;
            let lin = field.add(&field.mul(&c(curve.a1), x)?, &c(curve.a3))?;
            for y in &elems {
                let lhs = field.add(&field.mul(y, y)?, &field.mul(&lin, y)?)?;
                if lhs == rhs {
                    count += 1;
                }
            }
        }
        return Ok(count);
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    let [b2, b4, b6, _] = curve.b_invariants();
    let red = |n: i128| field.from_int(n.rem_euclid(field.p() as i128) as i64);
    for x in field.elements() {
        let x2 = field.mul(&x, &x)?;
        let x3 = field.mul(&x2, &x)?;
        let mut rhs = field.mul(&c(4), &x3)?;
        rhs = field.add(&rhs, &field.mul(&red(b2), &x2)?)?;
        rhs = field.add(&rhs, &field.mul(&red(2 * b4), &x)?)?;
        rhs = field.add(&rhs, &red(b6))?;
        count += (1 + field.quadratic_character(&rhs)? as i64) as u64;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::build_field;

    fn brute(curve: &WeierstrassCurve, p: u64) -> u64 {
        let p = p as i64;
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                let lhs = y * y + curve.a1 * x * y + curve.a3 * y;
                let rhs = x * x * x + curve.a2 * x * x + curve.a4 * x + curve.a6;
                if (lhs - rhs).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn cm_curve_small_primes() {
        let e = WeierstrassCurve::cm_conductor_121();
        assert_eq!(e.discriminant(), -1331);
        assert_eq!(count_weierstrass(&e, &build_field(3, 1).unwrap()).unwrap(), 5);
        assert_eq!(count_weierstrass(&e, &build_field(5, 1).unwrap()).unwrap(), 9);
        for p in [2u64, 3, 5, 7, 13, 17, 19, 23, 29, 31, 37] {
            assert_eq!(count_weierstrass(&e, &build_field(p, 1).unwrap()).unwrap(), brute(&e, p), "p = {p}");
        }
        assert!(matches!(
            count_weierstrass(&e, &build_field(11, 1).unwrap()),
            Err(CountError::BadReduction { p: 11 })
        ));
    }

    #[test]
    fn general_model_with_a1() {
        let e = WeierstrassCurve::new(1, -1, 1, -3, 3);
        for p in [2u64, 3, 5, 7, 13] {
            if e.has_good_reduction(p as u32) {
                assert_eq!(count_weierstrass(&e, &build_field(p, 1).unwrap()).unwrap(), brute(&e, p), "p = {p}");
            }
        }
    }

    #[test]
    fn hasse_bound_over_extensions() {
        let e = WeierstrassCurve::cm_conductor_121();
        for (p, k) in [(2u64, 3u32), (3, 3), (5, 2), (7, 2)] {
            let f = build_field(p, k).unwrap();
            let n = count_weierstrass(&e, &f).unwrap() as i64;
            let q = f.q() as i64;
            let t = q + 1 - n;
            assert!(t * t <= 4 * q, "q = {q}, trace {t}");
        }
    }
}
