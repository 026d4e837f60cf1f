//! Exact `p`-adic bookkeeping for the local theta-lift computation at a
//! prime `p`: the action `ρ(h_1, h_2) x = h_1^{-1} x h_2` on pairs of 2×2
//! matrices, Schwartz-function supports given by entrywise valuation
//! constraints, the four families of double-coset representatives and an
//! exhaustive scan of which representatives move `(e_1, α)` into the support.

mod archimedean;
mod scan;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;
use crate::ffield::is_prime;

pub use archimedean::{
    archimedean_equivariance, equivariance_residual, max_equivariance_residual, pairing, rotation, PhaseSign, P_MINUS, P_MINUS_TRANSPOSED, P_PLUS,
};
pub use scan::{scan_all, scan_type, translation_set, CellReport, ClaimStatus, ScanBox, ThetaReport, TypeReport};

/// The prime of the level structure.
pub const DEFAULT_PRIME: u64 = 11;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThetaError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("matrix is singular")]
    Singular,
    #[error("malformed coset parameters: {0}")]
    Malformed(String),
}

pub(crate) fn check_odd_prime(p: u64) -> Result<(), ThetaError> {
    if p != 2 && is_prime(p) {
        Ok(())
    } else {
        Err(ThetaError::NotOddPrime(p))
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `p^k` for any integer `k`.
pub fn p_power(p: u64, k: i32) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base.recip(), k.unsigned_abs() as usize)
    }
}

fn int_valuation(p: &BigInt, n: &BigInt) -> i32 {
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)`, or `None` for zero.
pub fn valuation(p: u64, x: &BigRational) -> Option<i32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    Some(int_valuation(&p, x.numer()) - int_valuation(&p, x.denom()))
}

/// 2×2 matrix over `Q`, viewed inside `M_2(Q_p)`.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicMat2 {
    p: u64,
    e: [[BigRational; 2]; 2],
}

impl PadicMat2 {
    pub fn new(p: u64, e: [[BigRational; 2]; 2]) -> Self {
        PadicMat2 { p, e }
    }

    pub fn from_ints(p: u64, e: [[i64; 2]; 2]) -> Self {
        PadicMat2 { p, e: e.map(|r| r.map(int)) }
    }

    pub fn identity(p: u64) -> Self {
        Self::from_ints(p, [[1, 0], [0, 1]])
    }

    pub fn zero(p: u64) -> Self {
        Self::from_ints(p, [[0, 0], [0, 0]])
    }

    /// `[[1, x], [0, 1]]`.
    pub fn unipotent(p: u64, x: BigRational) -> Self {
        PadicMat2 {
            p,
            e: [[int(1), x], [int(0), int(1)]],
        }
    }

    /// `diag(p^m, 1)`.
    pub fn diag_power(p: u64, m: i32) -> Self {
        PadicMat2 {
            p,
            e: [[p_power(p, m), int(0)], [int(0), int(1)]],
        }
    }

    /// `[[0, -1], [p^2, 0]]`.
    pub fn atkin_lehner(p: u64) -> Self {
        Self::from_ints(p, [[0, -1], [(p * p) as i64, 0]])
    }

    /// `e_1 = [[0, 1/p], [0, 0]]`.
    pub fn e1(p: u64) -> Self {
        PadicMat2 {
            p,
            e: [[int(0), p_power(p, -1)], [int(0), int(0)]],
        }
    }

    /// `α = diag(1/p, -1/p)`.
    pub fn alpha(p: u64) -> Self {
        let q = p_power(p, -1);
        PadicMat2 {
            p,
            e: [[q.clone(), int(0)], [int(0), -q]],
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.e[i][j]
    }

    pub fn entries(&self) -> &[[BigRational; 2]; 2] {
        &self.e
    }

    pub fn valuation(&self, i: usize, j: usize) -> Option<i32> {
        valuation(self.p, &self.e[i][j])
    }

    pub fn det(&self) -> BigRational {
        &self.e[0][0] * &self.e[1][1] - &self.e[0][1] * &self.e[1][0]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| &self.e[i][0] * &o.e[0][j] + &self.e[i][1] * &o.e[1][j];
        PadicMat2 {
            p: self.p,
            e: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PadicMat2 {
            p: self.p,
            e: self.e.clone().map(|r| r.map(|x| x * c)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| &self.e[i][j] + &o.e[i][j];
        PadicMat2 {
            p: self.p,
            e: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn inv(&self) -> Result<Self, ThetaError> {
        let d = self.det();
        if d.is_zero() {
            return Err(ThetaError::Singular);
        }
        let [[a, b], [c, dd]] = &self.e;
        Ok(PadicMat2 {
            p: self.p,
            e: [[dd / &d, -b / &d], [-c / &d, a / &d]],
        })
    }
}

impl fmt::Display for PadicMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.e;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl fmt::Debug for PadicMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicMat2(p={}, {self})", self.p)
    }
}

/// `h_1^{-1} x h_2`.
pub fn rho_act(h1: &PadicMat2, h2: &PadicMat2, x: &PadicMat2) -> Result<PadicMat2, ThetaError> {
    Ok(h1.inv()?.mul(x).mul(h2))
}

/// Entry constraint `v(x) >= v_min`, or `v(x) = v_min` when `unit_exact`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntryConstraint {
    pub v_min: i32,
    pub unit_exact: bool,
}

impl EntryConstraint {
    pub const fn at_least(v_min: i32) -> Self {
        EntryConstraint { v_min, unit_exact: false }
    }

    pub const fn exactly(v_min: i32) -> Self {
        EntryConstraint { v_min, unit_exact: true }
    }

    /// `v` is `None` for a zero entry.
    pub fn admits(&self, v: Option<i32>) -> bool {
        match v {
            None => !self.unit_exact,
            Some(v) if self.unit_exact => v == self.v_min,
            Some(v) => v >= self.v_min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub entries: [[EntryConstraint; 2]; 2],
}

impl LatticeSpec {
    pub const fn from_minima(v: [[i32; 2]; 2]) -> Self {
        use EntryConstraint as C;
        LatticeSpec {
            entries: [[C::at_least(v[0][0]), C::at_least(v[0][1])], [C::at_least(v[1][0]), C::at_least(v[1][1])]],
        }
    }

    /// `[[Z_p, p^{-1} Z_p], [p Z_p, Z_p]]`.
    pub const fn lev_first() -> Self {
        Self::from_minima([[0, -1], [1, 0]])
    }

    /// `[[p^{-1} Z_p^×, p^{-1} Z_p], [p Z_p, p^{-1} Z_p^×]]`.
    pub const fn lev_second() -> Self {
        LatticeSpec {
            entries: [
                [EntryConstraint::exactly(-1), EntryConstraint::at_least(-1)],
                [EntryConstraint::at_least(1), EntryConstraint::exactly(-1)],
            ],
        }
    }

    /// `[[p Z_p, p^{-1} Z_p], [p^3 Z_p, p Z_p]]`.
    pub const fn para_first() -> Self {
        Self::from_minima([[1, -1], [3, 1]])
    }

    /// `p^{-1} M_2(Z_p)`.
    pub const fn para_second() -> Self {
        Self::from_minima([[-1, -1], [-1, -1]])
    }

    /// The constraints satisfied by `p^k x` exactly when `x` satisfies `self`.
    pub fn shifted(&self, k: i32) -> Self {
        LatticeSpec {
            entries: self.entries.map(|r| r.map(|c| EntryConstraint { v_min: c.v_min + k, ..c })),
        }
    }
}

pub fn in_lattice(x: &PadicMat2, l: &LatticeSpec) -> bool {
    (0..2).all(|i| (0..2).all(|j| l.entries[i][j].admits(x.valuation(i, j))))
}

/// Support of a Schwartz function on pairs: a product of two lattice specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub blocks: [LatticeSpec; 2],
}

impl SupportSpec {
    pub const fn phi_lev() -> Self {
        SupportSpec {
            blocks: [LatticeSpec::lev_first(), LatticeSpec::lev_second()],
        }
    }

    pub const fn phi_para() -> Self {
        SupportSpec {
            blocks: [LatticeSpec::para_first(), LatticeSpec::para_second()],
        }
    }

    pub fn contains(&self, x1: &PadicMat2, x2: &PadicMat2) -> bool {
        in_lattice(x1, &self.blocks[0]) && in_lattice(x2, &self.blocks[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CosetType {
    I,
    II,
    III,
    IV,
}

impl CosetType {
    pub const ALL: [CosetType; 4] = [CosetType::I, CosetType::II, CosetType::III, CosetType::IV];

    pub fn as_str(self) -> &'static str {
        match self {
            CosetType::I => "I",
            CosetType::II => "II",
            CosetType::III => "III",
            CosetType::IV => "IV",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str().eq_ignore_ascii_case(s))
    }

    /// `n` as forced by `m` and `r`.
    pub fn n_from(self, m: i32, r: i32) -> i32 {
        match self {
            CosetType::I | CosetType::IV => m + 2 * r,
            CosetType::II => 2 * r + m + 2,
            CosetType::III => 2 * r + m - 2,
        }
    }

    /// Whether `h_1` (resp. `h_2`) carries the factor `[[0, -1], [p^2, 0]] U(·)`.
    pub fn twisted(self) -> (bool, bool) {
        match self {
            CosetType::I => (false, false),
            CosetType::II => (true, false),
            CosetType::III => (false, true),
            CosetType::IV => (true, true),
        }
    }

    /// Whether the newform Whittaker values `β(h_1) β(h_2)` can be nonzero.
    /// Only components of the form `p^r U(x) diag(p^k, 1)` are constrained,
    /// and there `k = 0` is required.
    pub fn whittaker_allows(self, m: i32, n: i32) -> bool {
        let (t1, t2) = self.twisted();
        (t1 || m == 0) && (t2 || n == 0)
    }
}

impl fmt::Display for CosetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of a double-coset representative. `s = s_num / p` and
/// `t = t_num / p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetParams {
    pub ty: CosetType,
    pub m: i32,
    pub n: i32,
    pub r: i32,
    pub s_num: u64,
    pub t_num: u64,
    pub x: BigRational,
}

impl CosetParams {
    /// `n` is derived from `m` and `r`.
    pub fn new(ty: CosetType, m: i32, r: i32, s_num: u64, t_num: u64, x: BigRational) -> Self {
        CosetParams {
            ty,
            m,
            n: ty.n_from(m, r),
            r,
            s_num,
            t_num,
            x,
        }
    }

    pub fn validate(&self, p: u64) -> Result<(), ThetaError> {
        check_odd_prime(p)?;
        if self.ty.n_from(self.m, self.r) != self.n {
            return Err(ThetaError::Malformed(format!(
                "type {} needs n = {}, got {}",
                self.ty,
                self.ty.n_from(self.m, self.r),
                self.n
            )));
        }
        let (t1, t2) = self.ty.twisted();
        for (num, used, name) in [(self.s_num, t1, "s"), (self.t_num, t2, "t")] {
            if num >= p {
                return Err(ThetaError::Malformed(format!("{name} = {num}/{p} is not in [0, 1)")));
            }
            if num != 0 && !used {
                return Err(ThetaError::Malformed(format!("type {} has no {name} parameter", self.ty)));
            }
        }
        Ok(())
    }

    pub fn s(&self, p: u64) -> BigRational {
        BigRational::new(self.s_num.into(), p.into())
    }

    pub fn t(&self, p: u64) -> BigRational {
        BigRational::new(self.t_num.into(), p.into())
    }
}

/// The pair `(h_1, h_2)`:
/// `h_1 = p^r U(x) diag(p^m, 1) [W U(s)]`, `h_2 = diag(p^n, 1) [W U(t)]`
/// with `W = [[0, -1], [p^2, 0]]` present according to the type.
pub fn coset_rep(p: u64, params: &CosetParams) -> Result<(PadicMat2, PadicMat2), ThetaError> {
    params.validate(p)?;
    let (t1, t2) = params.ty.twisted();
    let w = PadicMat2::atkin_lehner(p);
    let mut h1 = PadicMat2::unipotent(p, params.x.clone())
        .mul(&PadicMat2::diag_power(p, params.m))
        .scale(&p_power(p, params.r));
    if t1 {
        h1 = h1.mul(&w).mul(&PadicMat2::unipotent(p, params.s(p)));
    }
    let mut h2 = PadicMat2::diag_power(p, params.n);
    if t2 {
        h2 = h2.mul(&w).mul(&PadicMat2::unipotent(p, params.t(p)));
    }
    Ok((h1, h2))
}

/// `ρ(h)(e_1, α)`.
pub fn image_of_base_pair(h1: &PadicMat2, h2: &PadicMat2) -> Result<(PadicMat2, PadicMat2), ThetaError> {
    let p = h1.p();
    Ok((rho_act(h1, h2, &PadicMat2::e1(p))?, rho_act(h1, h2, &PadicMat2::alpha(p))?))
}

/// `Σ_{y ∈ p^{-v} Z / Z} ψ(y)` for the standard additive character
/// `ψ(y) = exp(2πi y)`, computed in `Q(ζ_{p^v})` and returned in `Q(ζ_p)`.
pub fn char_sum(p: u64, v: u32) -> Result<CyclotomicNumber, ThetaError> {
    check_odd_prime(p)?;
    let pc = p as u32;
    if v == 0 {
        return Ok(CyclotomicNumber::one(pc));
    }
    let n = pc
        .checked_pow(v)
        .ok_or_else(|| ThetaError::Malformed(format!("conductor {p}^{v} is too large")))?;
    let ones = vec![BigRational::one(); n as usize];
    let total = CyclotomicNumber::from_exponent_coeffs(n, &ones);
    let value = total.to_rational().expect("the full sum is Galois invariant");
    Ok(CyclotomicNumber::from_rational(pc, value))
}

/// For each sample `(γ_1, γ_2)` and each probe pair, compares membership of
/// `ρ(γ)(x_1, x_2)` and `(x_1, x_2)` in the support of `φ^lev`.
pub fn stabilizer_invariance_check(p: u64, samples: &[(PadicMat2, PadicMat2)]) -> Result<bool, ThetaError> {
    let spec = SupportSpec::phi_lev();
    let probes = probe_pairs(p);
    for (g1, g2) in samples {
        for (x1, x2) in &probes {
            let before = spec.contains(x1, x2);
            let after = spec.contains(&rho_act(g1, g2, x1)?, &rho_act(g1, g2, x2)?);
            if before != after {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fixed probe pairs: `(e_1, α)` and perturbations whose entries straddle
/// every constraint boundary of `φ^lev`.
pub fn probe_pairs(p: u64) -> Vec<(PadicMat2, PadicMat2)> {
    let vals: Vec<BigRational> = [
        None,
        Some((1, -2)),
        Some((1, -1)),
        Some((2, -1)),
        Some((1, 0)),
        Some((3, 0)),
        Some((1, 1)),
        Some((1, 2)),
    ]
    .iter()
    .map(|o| o.map_or_else(BigRational::zero, |(u, k)| int(u) * p_power(p, k)))
    .collect();
    let e1 = PadicMat2::e1(p);
    let alpha = PadicMat2::alpha(p);
    let mut out = vec![(e1.clone(), alpha.clone())];
    for i in 0..2 {
        for j in 0..2 {
            for v in &vals {
                let mut x1 = e1.clone();
                x1.e[i][j] = &x1.e[i][j] + v;
                out.push((x1, alpha.clone()));
                let mut x2 = alpha.clone();
                x2.e[i][j] = &x2.e[i][j] + v;
                out.push((e1.clone(), x2));
            }
        }
    }
    out
}

/// Whether `g` is in `Γ_0(p^2)`: integral, lower-left divisible by `p^2`,
/// determinant a `p`-adic unit.
pub fn in_gamma0_p2(g: &PadicMat2) -> bool {
    let p = g.p();
    let integral = g.e.iter().flatten().all(|x| valuation(p, x).is_none_or(|v| v >= 0));
    integral && g.valuation(1, 0).is_none_or(|v| v >= 2) && valuation(p, &g.det()) == Some(0)
}
