//! Griffiths–Dwork description of `H^3_dR(X)` for the Klein cubic through
//! `H^4_dR(P^4 - X)`: classes `A Ω / S^m` with `deg A = 3m - 5`, reduced in
//! pole order modulo exact forms using the Jacobian ideal.
//!
//! `Ω = Σ_i (-1)^i x_i dx_0 ∧ .. ∧ \hat{dx_i} ∧ .. ∧ dx_4`. The relation used
//! is `(Σ B_i ∂_i S) Ω / S^m ≡ (1/(m-1)) (Σ ∂_i B_i) Ω / S^{m-1}`.

mod jacobian;
mod poly;

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;

use jacobian::{lift_high_monomial, partial_terms, piece, LIFT_DEGREE};
pub use poly::{exponent_degree, format_monomial, grevlex_cmp, monomials_of_degree, CycPoly, Exponent, CONDUCTOR, NVARS};

/// `dim H^3`.
pub const H3_DIM: usize = 10;
/// Rank of `Fil^2`, the classes of pole order 2.
pub const FIL2_RANK: usize = 5;

pub type CycMatrix = Vec<Vec<CyclotomicNumber>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GdError {
    #[error("numerator of degree {degree} does not balance pole order {m} (need 3m - 5)")]
    DegreeBalance { degree: u32, m: u32 },
    #[error("pole order {0} is below 2")]
    PoleOrder(u32),
    #[error("form is not in the Jacobian ideal")]
    NotInIdeal,
    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("matrix does not satisfy M^5 = 1")]
    NotOrderFive,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn unit_exponent(i: usize) -> Exponent {
    let mut e = [0u8; NVARS];
    e[i] = 1;
    e
}

/// `S = x_0^2 x_1 + x_1^2 x_2 + x_2^2 x_3 + x_3^2 x_4 + x_4^2 x_0`.
pub fn klein_cubic() -> CycPoly {
    let terms: Vec<(Exponent, i64)> = (0..NVARS)
        .map(|i| {
            let mut e = [0u8; NVARS];
            e[i] = 2;
            e[(i + 1) % NVARS] = 1;
            (e, 1)
        })
        .collect();
    CycPoly::from_integer_terms(&terms)
}

/// `∂_i S = 2 x_i x_{i+1} + x_{i-1}^2`.
pub fn jacobian_generators() -> [CycPoly; NVARS] {
    std::array::from_fn(|i| CycPoly::from_integer_terms(&partial_terms(i)))
}

/// `Σ B_i ∂_i S`.
pub fn ideal_combination(b: &[CycPoly; NVARS]) -> CycPoly {
    let gens = jacobian_generators();
    let mut acc = CycPoly::zero(b[0].degree() + 2);
    for (bi, g) in b.iter().zip(&gens) {
        acc = acc.add(&bi.mul(g));
    }
    acc
}

/// `Σ ∂_i B_i`.
pub fn divergence(b: &[CycPoly; NVARS]) -> CycPoly {
    let mut acc = CycPoly::zero(b[0].degree().saturating_sub(1));
    for (i, bi) in b.iter().enumerate() {
        acc = acc.add(&bi.derivative(i));
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDim {
    pub degree: u32,
    pub dim: usize,
    /// Standard monomials for grevlex, spanning a complement of `J_d`.
    pub basis: Vec<Exponent>,
}

/// `dim (R/J)_d` with a monomial complement.
pub fn graded_dim(d: u32) -> GradedDim {
    let p = piece(d);
    GradedDim {
        degree: d,
        dim: p.dim_quotient(),
        basis: p.complement_monomials(),
    }
}

/// Some `(B_0, .., B_4)` with `A = Σ B_i ∂_i S`.
pub fn lift_to_jacobian_ideal(a: &CycPoly) -> Result<[CycPoly; NVARS], GdError> {
    let d = a.degree();
    let lower = d.saturating_sub(2);
    if d < 2 {
        return if a.is_zero() {
            Ok(std::array::from_fn(|_| CycPoly::zero(0)))
        } else {
            Err(GdError::NotInIdeal)
        };
    }
    if d <= LIFT_DEGREE {
        let (harm, lifts) = piece(d).split(a);
        return if harm.is_zero() {
            Ok(lifts.expect("low pieces track lifts"))
        } else {
            Err(GdError::NotInIdeal)
        };
    }
    let mut memo = HashMap::new();
    let mut acc: [CycPoly; NVARS] = std::array::from_fn(|_| CycPoly::zero(lower));
    for (e, c) in a.terms() {
        let b = lift_high_monomial(e, &mut memo);
        for i in 0..NVARS {
            acc[i] = acc[i].add(&b[i].scale(c));
        }
    }
    Ok(acc)
}

/// The class `A Ω / S^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalDifferential {
    a: CycPoly,
    m: u32,
}

impl RationalDifferential {
    pub fn new(a: CycPoly, m: u32) -> Result<Self, GdError> {
        if m < 2 {
            return Err(GdError::PoleOrder(m));
        }
        if a.degree() + 5 != 3 * m {
            return Err(GdError::DegreeBalance { degree: a.degree(), m });
        }
        Ok(RationalDifferential { a, m })
    }

    pub fn numerator(&self) -> &CycPoly {
        &self.a
    }

    pub fn pole_order(&self) -> u32 {
        self.m
    }

    /// The same class written with pole order `m + 1`.
    pub fn raise_pole(&self) -> Self {
        RationalDifferential {
            a: self.a.mul(&klein_cubic()),
            m: self.m + 1,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut x, mut y) = (self.clone(), other.clone());
        while x.m < y.m {
            x = x.raise_pole();
        }
        while y.m < x.m {
            y = y.raise_pole();
        }
        RationalDifferential { a: x.a.add(&y.a), m: x.m }
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        RationalDifferential {
            a: self.a.scale(c),
            m: self.m,
        }
    }

    /// Pullback under `x_i -> x_{i+1}`; `S` and `Ω` are invariant.
    pub fn cyclic_pullback(&self) -> Self {
        RationalDifferential {
            a: self.a.cyclic_shift(),
            m: self.m,
        }
    }
}

/// Representatives left after reduction: a linear form over `S^2` plus a
/// complement-supported quartic over `S^3`.
fn reduce_parts(w: &RationalDifferential) -> (CycPoly, CycPoly) {
    let mut cur = w.a.clone();
    let mut m = w.m;
    let mut pole3 = CycPoly::zero(4);
    while m >= 3 {
        let b = if m == 3 {
            let (harm, lifts) = piece(4).split(&cur);
            pole3 = harm;
            lifts.expect("degree-4 piece tracks lifts")
        } else {
            lift_to_jacobian_ideal(&cur).expect("(R/J)_d vanishes above the socle degree")
        };
        cur = divergence(&b).scale_rational(&q(m as i64 - 1).recip());
        m -= 1;
    }
    (cur, pole3)
}

/// Ten classes: `x_i Ω / S^2` (spanning `Fil^2`) then `A Ω / S^3` for the
/// degree-4 standard monomials `A`.
#[derive(Debug, Clone)]
pub struct CohomologyBasis {
    classes: Vec<RationalDifferential>,
    pole3_monomials: Vec<Exponent>,
}

impl CohomologyBasis {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn fil2_rank(&self) -> usize {
        self.classes.iter().filter(|c| c.m == 2).count()
    }

    pub fn classes(&self) -> &[RationalDifferential] {
        &self.classes
    }

    pub fn pole3_monomials(&self) -> &[Exponent] {
        &self.pole3_monomials
    }

    /// Coordinates of a class in this basis.
    pub fn coordinates(&self, w: &RationalDifferential) -> Vec<CyclotomicNumber> {
        let (pole2, pole3) = reduce_parts(w);
        let mut out: Vec<CyclotomicNumber> = (0..NVARS).map(|i| pole2.coefficient(&unit_exponent(i))).collect();
        out.extend(self.pole3_monomials.iter().map(|e| pole3.coefficient(e)));
        out
    }

    /// `Σ c_j ω_j`, written with pole order 3.
    pub fn class_from_coordinates(&self, coords: &[CyclotomicNumber]) -> RationalDifferential {
        let mut acc = RationalDifferential { a: CycPoly::zero(4), m: 3 };
        for (c, w) in coords.iter().zip(&self.classes) {
            acc = acc.add(&w.scale(c));
        }
        acc
    }
}

pub fn h3_basis() -> Result<CohomologyBasis, GdError> {
    let d1 = graded_dim(1);
    let d4 = graded_dim(4);
    if d1.dim != FIL2_RANK {
        return Err(GdError::Dimension {
            what: "(R/J)_1",
            expected: FIL2_RANK,
            found: d1.dim,
        });
    }
    if d4.dim != H3_DIM - FIL2_RANK {
        return Err(GdError::Dimension {
            what: "(R/J)_4",
            expected: H3_DIM - FIL2_RANK,
            found: d4.dim,
        });
    }
    let one = CyclotomicNumber::one(CONDUCTOR);
    let mut classes: Vec<RationalDifferential> = (0..NVARS)
        .map(|i| RationalDifferential {
            a: CycPoly::variable(i),
            m: 2,
        })
        .collect();
    classes.extend(d4.basis.iter().map(|e| RationalDifferential {
        a: CycPoly::monomial(*e, one.clone()),
        m: 3,
    }));
    Ok(CohomologyBasis {
        classes,
        pole3_monomials: d4.basis,
    })
}

/// Coordinates of a class in the basis of [`h3_basis`].
pub fn griffiths_reduce(w: &RationalDifferential) -> Result<Vec<CyclotomicNumber>, GdError> {
    Ok(h3_basis()?.coordinates(w))
}

/// Matrix of `α^*` on the basis: column `j` holds the coordinates of the
/// pullback of class `j`.
pub fn alpha_pullback(basis: &CohomologyBasis) -> CycMatrix {
    let cols: Vec<Vec<CyclotomicNumber>> = basis.classes.iter().map(|w| basis.coordinates(&w.cyclic_pullback())).collect();
    let n = cols.len();
    (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
}

pub fn mat_mul(a: &CycMatrix, b: &CycMatrix) -> CycMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    a[i].iter().zip(b).fold(
                        CyclotomicNumber::zero(CONDUCTOR),
                        |acc, (x, row)| {
                            if x.is_zero() {
                                acc
                            } else {
                                &acc + &(x * &row[j])
                            }
                        },
                    )
                })
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> CycMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| CyclotomicNumber::from_integer(CONDUCTOR, (i == j) as i64)).collect())
        .collect()
}

/// Smallest `k <= max` with `M^k = 1`.
pub fn matrix_order(m: &CycMatrix, max: u32) -> Option<u32> {
    let id = identity(m.len());
    let mut acc = m.clone();
    for k in 1..=max {
        if acc == id {
            return Some(k);
        }
        acc = mat_mul(&acc, m);
    }
    None
}

/// Rank by Gaussian elimination over `Q(ζ_5)`.
pub fn rank(mut rows: CycMatrix) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        let pivot: Vec<CyclotomicNumber> = rows[r].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

fn shifted(m: &CycMatrix, k: u32, size: usize) -> CycMatrix {
    let z = CyclotomicNumber::zeta_pow(CONDUCTOR, k as i64);
    (0..size)
        .map(|i| (0..size).map(|j| if i == j { &m[i][j] - &z } else { m[i][j].clone() }).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Eigenspace {
    /// The eigenvalue is `ζ_5^exponent`.
    pub exponent: u32,
    pub dimension: usize,
    pub fil2_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenSplit {
    pub spaces: Vec<Eigenspace>,
    /// `(j, k)`: `v_j = Σ_i ζ^{j(i+1)} x_i Ω/S^2` has eigenvalue `ζ^k`.
    pub fil2_vectors: Vec<(u32, u32)>,
}

/// Eigenspaces of an order-5 matrix whose first [`FIL2_RANK`] coordinates
/// span an invariant subspace.
pub fn eigenspace_split(m: &CycMatrix) -> Result<EigenSplit, GdError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) || n < FIL2_RANK || !matches!(matrix_order(m, 5), Some(1 | 5)) {
        return Err(GdError::NotOrderFive);
    }
    let fil: CycMatrix = m[..FIL2_RANK].iter().map(|r| r[..FIL2_RANK].to_vec()).collect();
    let spaces: Vec<Eigenspace> = (0..5)
        .map(|k| Eigenspace {
            exponent: k,
            dimension: n - rank(shifted(m, k, n)),
            fil2_dimension: FIL2_RANK - rank(shifted(&fil, k, FIL2_RANK)),
        })
        .collect();
    let total: usize = spaces.iter().map(|s| s.dimension).sum();
    if total != n {
        return Err(GdError::Dimension {
            what: "sum of eigenspaces",
            expected: n,
            found: total,
        });
    }
    let mut fil2_vectors = Vec::new();
    for j in 0..5u32 {
        let v: Vec<CyclotomicNumber> = (0..n)
            .map(|i| {
                if i < FIL2_RANK {
                    CyclotomicNumber::zeta_pow(CONDUCTOR, (j * (i as u32 + 1)) as i64)
                } else {
                    CyclotomicNumber::zero(CONDUCTOR)
                }
            })
            .collect();
        let col: CycMatrix = v.iter().map(|x| vec![x.clone()]).collect();
        let image: Vec<CyclotomicNumber> = mat_mul(m, &col).into_iter().map(|r| r[0].clone()).collect();
        let k = (0..5u32).find(|&k| {
            let z = CyclotomicNumber::zeta_pow(CONDUCTOR, k as i64);
            image.iter().zip(&v).all(|(a, b)| *a == b * &z)
        });
        if let Some(k) = k {
            fil2_vectors.push((j, k));
        }
    }
    Ok(EigenSplit { spaces, fil2_vectors })
}

/// The multiplication pairing `(R/J)_1 × (R/J)_4 -> (R/J)_5`, as the matrix
/// of socle coefficients.
pub fn gorenstein_pairing() -> Result<Vec<Vec<BigRational>>, GdError> {
    let d5 = graded_dim(5);
    if d5.dim != 1 {
        return Err(GdError::Dimension {
            what: "(R/J)_5",
            expected: 1,
            found: d5.dim,
        });
    }
    let socle = d5.basis[0];
    let p5 = piece(5);
    let d4 = graded_dim(4);
    let one = CyclotomicNumber::one(CONDUCTOR);
    Ok((0..NVARS)
        .map(|i| {
            d4.basis
                .iter()
                .map(|e| {
                    let prod = CycPoly::variable(i).mul(&CycPoly::monomial(*e, one.clone()));
                    let (harm, _) = p5.split(&prod);
                    harm.coefficient(&socle).to_rational().expect("rational input has rational normal form")
                })
                .collect()
        })
        .collect())
}

pub fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    rank(
        m.iter()
            .map(|r| r.iter().map(|x| CyclotomicNumber::from_rational(CONDUCTOR, x.clone())).collect())
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologySummary {
    /// `dim (R/J)_d` for `d = 0..=6`.
    pub graded_dims: Vec<usize>,
    pub h3_dim: usize,
    pub fil2_rank: usize,
    pub pole3_basis: Vec<String>,
    pub alpha_order: Option<u32>,
    pub eigenspaces: Vec<Eigenspace>,
    pub fil2_eigenvectors: Vec<(u32, u32)>,
    pub gorenstein_rank: usize,
}

pub fn cohomology_summary() -> Result<CohomologySummary, GdError> {
    let basis = h3_basis()?;
    let m = alpha_pullback(&basis);
    let split = eigenspace_split(&m)?;
    Ok(CohomologySummary {
        graded_dims: (0..=6).map(|d| graded_dim(d).dim).collect(),
        h3_dim: basis.dim(),
        fil2_rank: basis.fil2_rank(),
        pole3_basis: basis.pole3_monomials().iter().map(format_monomial).collect(),
        alpha_order: matrix_order(&m, 10),
        eigenspaces: split.spaces,
        fil2_eigenvectors: split.fil2_vectors,
        gorenstein_rank: rational_rank(&gorenstein_pairing()?),
    })
}

/// `1 / (m - 1)` as used by the reduction step, exposed for callers that
/// build exact forms by hand.
pub fn reduction_constant(m: u32) -> BigRational {
    assert!(m >= 2, "pole order below 2");
    BigRational::one() / q(m as i64 - 1)
}
