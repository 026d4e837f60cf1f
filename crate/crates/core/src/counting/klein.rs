use rayon::prelude::*;

use crate::ffield::{FieldDescriptor, FieldElement};

use super::tables::{ZechTables, ZERO};
use super::{quadratic_root_count, CountError, CountOptions};

/// Projective count from the affine count of the cone.
fn projectivize(affine: u128, q: u64) -> u128 {
    let q = q as u128;
    debug_assert_eq!((affine - 1) % (q - 1), 0, "affine cone count must be 1 mod q - 1");
    (affine - 1) / (q - 1)
}

/// `#X(F_q)` for odd `q` via fibers of the projection forgetting `x_0`.
///
/// Over a tail `(x_1, .., x_4)` the equation is the quadratic
/// `x_1 x_0^2 + x_4^2 x_0 + c` with `c = x_1^2 x_2 + x_2^2 x_3 + x_3^2 x_4`.
/// For `x_1 != 0` it has `1 + χ(D)` roots, `D = x_4^4 - 4 x_1 c`; for
/// `x_1 = 0` it is linear and summed in closed form.
///
/// Write `D = h(x_4) + K` with `h(x_4) = x_4^4 + L x_4`, `L = -4 x_1 x_3^2`
/// and `K = -4 x_1 (x_1^2 x_2 + x_2^2 x_3)`. Work items are `(x_1, x_3)`
/// pairs: `h` is tabulated once per pair, then for each `x_2` the inner loop
/// over `x_4` reads `χ(h + K) = χ(K) χ(1 + h/K)` from a table of
/// `χ(1 + g^n)`.
pub fn count_klein_fast(field: &FieldDescriptor, options: &CountOptions) -> Result<u128, CountError> {
    if field.p() == 2 {
        return Err(CountError::CharacteristicTwo("quad-fiber"));
    }
    let q = field.q();
    options.check((q as u128).pow(4))?;
    let t = ZechTables::new(field)?;
    let q128 = q as u128;

    // x_1 = 0: x_4 != 0 gives one root; x_4 = 0 leaves x_2^2 x_3, which
    // vanishes on 2q - 1 pairs and then every x_0 is a root.
    let linear_part = q128 * q128 * (q128 - 1) + q128 * (2 * q128 - 1);

    let order = t.order();
    let chi_one_plus: Vec<i8> = (0..order).map(|n| t.chi(t.zech(n)) as i8).collect();
    let logs: Vec<u32> = (0..q).map(|i| t.log_of_index(i)).collect();
    let neg4 = t.log_of_int(-4);

    let pairs = order as u64 * q;
    let chunk = options.chunk_size.max(1) as u64;
    let n_chunks = pairs.div_ceil(chunk);
    let chi_sum: i64 = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(pairs);
            let mut h = Vec::with_capacity(q as usize);
            let mut acc = 0i64;
            for idx in start..end {
                let l1 = (idx / q) as u32;
                let e3 = logs[(idx % q) as usize];
                acc += pair_chi_sum(&t, &chi_one_plus, &logs, neg4, l1, e3, &mut h);
            }
            acc
        })
        .sum();

    let outer = order as i128 * q as i128 * q as i128;
    let affine = linear_part as i128 + outer * q as i128 + chi_sum as i128;
    Ok(projectivize(affine as u128, q))
}

/// `Σ_{x_2, x_4} χ(D)` for fixed `x_1 = g^{l1}` and `x_3 = g^{e3}`.
fn pair_chi_sum(t: &ZechTables, chi_one_plus: &[i8], logs: &[u32], neg4: u32, l1: u32, e3: u32, h: &mut Vec<u32>) -> i64 {
    let order = t.order();
    let big_l = t.mul(neg4, t.mul(l1, t.mul(e3, e3)));
    // nonzero values of h = x_4^4 + L x_4; `vanishing` counts its zeros
    h.clear();
    let mut vanishing = 0i64;
    let mut chi_h = 0i64;
    for &e4 in logs {
        let v = t.add(t.pow(e4, 4), t.mul(big_l, e4));
        if v == ZERO {
            vanishing += 1;
        } else {
            chi_h += t.chi(v);
            h.push(v);
        }
    }
    let l1_sq = t.mul(l1, l1);
    let mut acc = 0i64;
    for &e2 in logs {
        let inner = t.add(t.mul(l1_sq, e2), t.mul(t.mul(e2, e2), e3));
        let big_k = t.mul(neg4, t.mul(l1, inner));
        if big_k == ZERO {
            acc += chi_h;
            continue;
        }
        let shift = order - big_k;
        let mut s = 0i64;
        for &v in h.iter() {
            let mut n = v + shift;
            if n >= order {
                n -= order;
            }
            s += chi_one_plus[n as usize] as i64;
        }
        acc += t.chi(big_k) * (s + vanishing);
    }
    acc
}

/// `#X(F_q)` by evaluating the cubic at every affine point (any characteristic).
pub fn count_klein_direct(field: &FieldDescriptor, options: &CountOptions) -> Result<u128, CountError> {
    let q = field.q();
    options.check((q as u128).pow(5))?;
    let t = ZechTables::new(field)?;
    let logs: Vec<u32> = (0..q).map(|i| t.log_of_index(i)).collect();
    let term = |a: u32, b: u32| t.mul(t.mul(a, a), b);
    let zeros: u128 = logs
        .par_iter()
        .map(|&x0| {
            let mut n = 0u128;
            for &x1 in &logs {
                let s01 = term(x0, x1);
                for &x2 in &logs {
                    let s12 = t.add(s01, term(x1, x2));
                    for &x3 in &logs {
                        let s23 = t.add(s12, term(x2, x3));
                        for &x4 in &logs {
                            let s = t.add(t.add(s23, term(x3, x4)), term(x4, x0));
                            if s == ZERO {
                                n += 1;
                            }
                        }
                    }
                }
            }
            n
        })
        .sum();
    Ok(projectivize(zeros, q))
}

/// Projective count of a hypersurface `a x_0^2 + b x_0 + c = 0` whose
/// coefficients are given as functions of the tail `(x_1, .., x_4)`; the
/// fiber counts come from [`quadratic_root_count`]. Slow; meant as an oracle.
pub fn count_by_x0_fibers<F>(field: &FieldDescriptor, options: &CountOptions, coeffs: F) -> Result<u128, CountError>
where
    F: Fn(&[FieldElement; 4]) -> Result<[FieldElement; 3], CountError>,
{
    let q = field.q();
    options.check((q as u128).pow(4))?;
    let elems: Vec<FieldElement> = field.elements().collect();
    let mut affine = 0u128;
    for i in 0..q.pow(4) {
        let tail = [
            elems[(i % q) as usize].clone(),
            elems[(i / q % q) as usize].clone(),
            elems[(i / q / q % q) as usize].clone(),
            elems[(i / q / q / q) as usize].clone(),
        ];
        let [a, b, c] = coeffs(&tail)?;
        affine += quadratic_root_count(&a, &b, &c, field)? as u128;
    }
    Ok(projectivize(affine, q))
}
