//! Point counts from a character sum over a plane curve.
//!
//! For `x_1 != 0` the fiber discriminant `D = x_4^4 - 4 x_1 c` is a
//! quadratic in `x_2` with leading coefficient `-4 x_1 x_3`, so its
//! character sum over `x_2` is `-χ(-4 x_1 x_3)` or `(q - 1) χ(-4 x_1 x_3)`
//! according to whether the discriminant in `x_2` vanishes. Scaling
//! `x_3 = x_1 u`, `x_4 = x_1 v` turns that condition into the curve
//! `C: u v^4 - 4 u^3 v + 1 = 0`, and the whole count collapses to
//!
//! `#X(F_q) = q^3 + q^2 + 2q + 1 + q W`,  `W = Σ_{u != 0} χ(-u) #{v : (u, v) ∈ C}`.
//!
//! Each `u` costs one root count of a quartic in `v`, done as
//! `deg gcd(f, v^q - v)`. The summand is constant on orbits of
//! `u -> u^p` and, when `11 | q - 1`, of `u -> ζ u` for `ζ^11 = 1`
//! (with `v -> ζ^{-3} v`), so only orbit representatives are evaluated.

use rayon::prelude::*;

use crate::ffield::FieldDescriptor;

use super::tables::{ZechTables, ZERO};
use super::CountError;

type Quartic = [u32; 4];

struct QuarticRing<'a> {
    t: &'a ZechTables,
    /// `-A` and `-B` for the modulus `v^4 + A v + B`.
    neg_a: u32,
    neg_b: u32,
}

impl QuarticRing<'_> {
    fn mul(&self, a: &Quartic, b: &Quartic) -> Quartic {
        let t = self.t;
        let mut c = [ZERO; 7];
        for (i, &ai) in a.iter().enumerate() {
            if ai == ZERO {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                c[i + j] = t.add(c[i + j], t.mul(ai, bj));
            }
        }
        for d in (4..7).rev() {
            let top = c[d];
            if top != ZERO {
                c[d - 3] = t.add(c[d - 3], t.mul(self.neg_a, top));
                c[d - 4] = t.add(c[d - 4], t.mul(self.neg_b, top));
            }
        }
        [c[0], c[1], c[2], c[3]]
    }

    fn mul_by_v(&self, a: &Quartic) -> Quartic {
        let t = self.t;
        let top = a[3];
        let mut c = [ZERO, a[0], a[1], a[2]];
        if top != ZERO {
            c[1] = t.add(c[1], t.mul(self.neg_a, top));
            c[0] = t.add(c[0], t.mul(self.neg_b, top));
        }
        c
    }

    /// `v^e` reduced, for `e >= 1`.
    fn v_pow(&self, e: u64) -> Quartic {
        let mut acc: Quartic = [ZERO, 0, ZERO, ZERO];
        for bit in (0..63 - e.leading_zeros()).rev() {
            acc = self.mul(&acc, &acc);
            if (e >> bit) & 1 == 1 {
                acc = self.mul_by_v(&acc);
            }
        }
        acc
    }
}

fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != ZERO)
}

fn rem(t: &ZechTables, mut a: Vec<u32>, b: &[u32]) -> Vec<u32> {
    let db = degree(b).expect("nonzero divisor");
    let lead_inv = t.inv(b[db]);
    while let Some(da) = degree(&a) {
        if da < db {
            break;
        }
        let c = t.mul(a[da], lead_inv);
        for j in 0..=db {
            a[da - db + j] = t.sub(a[da - db + j], t.mul(c, b[j]));
        }
    }
    a
}

/// Number of distinct roots of `u v^4 - 4 u^3 v + 1` in `F_q`, for `u = g^e`.
fn curve_fiber_size(t: &ZechTables, q: u64, neg4: u32, e: u32) -> u64 {
    // monic form v^4 + A v + B with A = -4 u^2, B = 1/u
    let a = t.mul(neg4, t.mul(e, e));
    let b = t.inv(e);
    let ring = QuarticRing {
        t,
        neg_a: t.neg(a),
        neg_b: t.neg(b),
    };
    let mut g = ring.v_pow(q);
    g[1] = t.sub(g[1], 0);
    let mut x: Vec<u32> = vec![b, a, ZERO, ZERO, 0];
    let mut y: Vec<u32> = g.to_vec();
    while degree(&y).is_some() {
        let r = rem(t, x, &y);
        x = y;
        y = r;
    }
    degree(&x).expect("gcd with a monic quartic is nonzero") as u64
}

/// `#X(F_q)` for odd `q` in `O(q log q)` field operations.
pub fn count_klein_curve_sum(field: &FieldDescriptor) -> Result<u128, CountError> {
    if field.p() == 2 {
        return Err(CountError::CharacteristicTwo("curve-sum"));
    }
    let t = ZechTables::new(field)?;
    let q = field.q();
    let order = t.order();
    let p = field.p() as u64;
    let shift = (order % 11 == 0).then_some(order / 11);

    // orbit representatives with multiplicities
    let mut seen = vec![false; order as usize];
    let mut reps: Vec<(u32, u64)> = Vec::new();
    let mut stack = Vec::new();
    for e in 0..order {
        if seen[e as usize] {
            continue;
        }
        seen[e as usize] = true;
        stack.push(e);
        let mut size = 0u64;
        while let Some(x) = stack.pop() {
            size += 1;
            let frob = ((x as u64 * p) % order as u64) as u32;
            let mut next = vec![frob];
            if let Some(s) = shift {
                next.push((x + s) % order);
            }
            for y in next {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        reps.push((e, size));
    }

    let neg4 = t.log_of_int(-4);
    let w: i128 = reps
        .par_iter()
        .map(|&(e, size)| {
            let chi = t.chi(t.neg(e)) as i128;
            chi * size as i128 * curve_fiber_size(&t, q, neg4, e) as i128
        })
        .sum();
    let q = q as i128;
    let count = q * q * q + q * q + 2 * q + 1 + q * w;
    Ok(u128::try_from(count).expect("point count is nonnegative"))
}
