//! Exhaustive scan of coset representatives over a finite parameter box.
//!
//! For fixed `(m, n, r, s, t)` the image `ρ(h)(X)` is affine in `x`:
//! `h_1^{-1} = Q U(-x)` with `Q` independent of `x`, so
//! `ρ(h)(X) = A - x B` with `A = Q X h_2` and `B = Q N X h_2`,
//! `N = [[0, 1], [0, 0]]`. Each cell computes `A` and `B` once in exact
//! arithmetic; entries with `B = 0` are checked once, and the remaining
//! entries only need the valuation of `a - x b`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    char_sum, check_odd_prime, coset_rep, image_of_base_pair, p_power, valuation, CosetParams, CosetType, EntryConstraint, PadicMat2, SupportSpec,
    ThetaError,
};

/// `x` values are `0` and `u p^v` with `v_min <= v <= v_max` and `u` running
/// over `(Z / p^unit_depth)^×`; `m, n, r` range over `[-radius, radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanBox {
    pub radius: i32,
    pub v_min: i32,
    pub v_max: i32,
    pub unit_depth: u32,
}

impl Default for ScanBox {
    fn default() -> Self {
        ScanBox::with_radius(4)
    }
}

impl ScanBox {
    pub fn with_radius(radius: i32) -> Self {
        ScanBox {
            radius,
            v_min: -radius,
            v_max: radius,
            unit_depth: 3,
        }
    }

    pub fn contains(&self, other: &ScanBox) -> bool {
        self.radius >= other.radius && self.v_min <= other.v_min && self.v_max >= other.v_max && self.unit_depth >= other.unit_depth
    }

    /// Scan points for `x`, as `(u, v)`, zero first.
    fn x_values(&self, p: u64) -> Vec<Option<(i128, i32)>> {
        let modulus = (p as i128).pow(self.unit_depth);
        let mut out = vec![None];
        for v in self.v_min..=self.v_max {
            out.extend((1..modulus).filter(|u| u % p as i128 != 0).map(|u| Some((u, v))));
        }
        out
    }

    /// The box is too small to say anything about `x ∈ Z_p` versus `p^{-1} Z_p`
    /// or about neighbours of `m = n = r = 0`.
    fn adequate(&self) -> bool {
        self.radius >= 1 && self.v_min <= -1 && self.v_max >= 1 && self.unit_depth >= 1
    }
}

/// Translations `0` and `u p^v` with `v ∈ {-1, 0, 1}`, `0 < u < p`: a finite
/// stand-in for `p^{-1} Z_p`.
pub fn translation_set(p: u64) -> Vec<Option<(i128, i32)>> {
    let mut out = vec![None];
    for v in -1..=1 {
        out.extend((1..p as i128).map(|u| Some((u, v))));
    }
    out
}

/// `num p^exp / den` with `p ∤ num den`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PRat {
    num: i128,
    den: i128,
    exp: i32,
}

impl PRat {
    const ZERO: PRat = PRat { num: 0, den: 1, exp: 0 };

    fn is_zero(&self) -> bool {
        self.num == 0
    }

    fn normalized(p: i128, mut num: i128, den: i128, mut exp: i32) -> PRat {
        if num == 0 {
            return PRat::ZERO;
        }
        while num % p == 0 {
            num /= p;
            exp += 1;
        }
        PRat { num, den, exp }
    }

    fn from_big(p: u64, x: &BigRational) -> Option<PRat> {
        let Some(v) = valuation(p, x) else { return Some(PRat::ZERO) };
        let unit = x * p_power(p, -v);
        let g = unit.numer().gcd(unit.denom());
        let num = (unit.numer() / &g).to_i128()?;
        let den = (unit.denom() / &g).to_i128()?;
        (num.abs() < 1 << 60 && den < 1 << 60).then_some(PRat { num, den, exp: v })
    }

    fn from_point(x: Option<(i128, i32)>) -> PRat {
        x.map_or(PRat::ZERO, |(u, v)| PRat { num: u, den: 1, exp: v })
    }

    fn mul(&self, o: &PRat) -> Option<PRat> {
        if self.is_zero() || o.is_zero() {
            return Some(PRat::ZERO);
        }
        Some(PRat {
            num: self.num.checked_mul(o.num)?,
            den: self.den.checked_mul(o.den)?,
            exp: self.exp + o.exp,
        })
    }

    fn add(&self, p: i128, o: &PRat) -> Option<PRat> {
        if self.is_zero() {
            return Some(*o);
        }
        if o.is_zero() {
            return Some(*self);
        }
        let e = self.exp.min(o.exp);
        let lift = |x: &PRat, other_den: i128| -> Option<i128> { x.num.checked_mul(p.checked_pow((x.exp - e) as u32)?)?.checked_mul(other_den) };
        let num = lift(self, o.den)?.checked_add(lift(o, self.den)?)?;
        Some(PRat::normalized(p, num, self.den.checked_mul(o.den)?, e))
    }

    /// Valuation of `self - x b` for `x b` already formed.
    fn valuation_of_difference(&self, p: i128, xb: &PRat) -> Option<Option<i32>> {
        if xb.is_zero() {
            return Some((!self.is_zero()).then_some(self.exp));
        }
        if self.is_zero() {
            return Some(Some(xb.exp));
        }
        if self.exp != xb.exp {
            return Some(Some(self.exp.min(xb.exp)));
        }
        let num = self.num.checked_mul(xb.den)?.checked_sub(xb.num.checked_mul(self.den)?)?;
        Some((num != 0).then(|| PRat::normalized(p, num, 1, self.exp).exp))
    }
}

struct AffineEntry {
    a: PRat,
    b: PRat,
    constraint: EntryConstraint,
}

/// One `(m, n, r, s, t)` cell with `x` left free.
struct Cell {
    p: u64,
    params: CosetParams,
    /// `x`-dependent entries of both image matrices; `None` if the exact
    /// values do not fit the fast representation.
    entries: Option<Vec<AffineEntry>>,
    /// Whether the `x`-independent entries satisfy their constraints.
    fixed_ok: bool,
}

impl Cell {
    fn new(p: u64, params: CosetParams, spec: &SupportSpec) -> Result<Self, ThetaError> {
        let mut at_zero = params.clone();
        at_zero.x = BigRational::zero();
        let (h1, h2) = coset_rep(p, &at_zero)?;
        let q = h1.inv()?;
        let n = PadicMat2::from_ints(p, [[0, 1], [0, 0]]);
        let mut entries = Some(Vec::new());
        let mut fixed_ok = true;
        for (k, x) in [PadicMat2::e1(p), PadicMat2::alpha(p)].iter().enumerate() {
            let a = q.mul(x).mul(&h2);
            let b = q.mul(&n).mul(x).mul(&h2);
            for i in 0..2 {
                for j in 0..2 {
                    let constraint = spec.blocks[k].entries[i][j];
                    if b.entry(i, j).is_zero() {
                        fixed_ok &= constraint.admits(a.valuation(i, j));
                        continue;
                    }
                    let fast = PRat::from_big(p, a.entry(i, j)).zip(PRat::from_big(p, b.entry(i, j)));
                    match (fast, entries.as_mut()) {
                        (Some((a, b)), Some(list)) => list.push(AffineEntry { a, b, constraint }),
                        _ => entries = None,
                    }
                }
            }
        }
        Ok(Cell {
            p,
            params,
            entries,
            fixed_ok,
        })
    }

    fn slow_contains(&self, x: &PRat, spec: &SupportSpec) -> bool {
        let mut params = self.params.clone();
        params.x = if x.is_zero() {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::from(x.num), BigInt::from(x.den)) * p_power(self.p, x.exp)
        };
        let (h1, h2) = coset_rep(self.p, &params).expect("cell parameters were validated");
        let (x1, x2) = image_of_base_pair(&h1, &h2).expect("coset representatives are invertible");
        spec.contains(&x1, &x2)
    }

    fn contains(&self, x: &PRat, spec: &SupportSpec) -> bool {
        if !self.fixed_ok {
            return false;
        }
        let p = self.p as i128;
        if let Some(list) = &self.entries {
            let mut fast = Some(true);
            for e in list {
                let v = x.mul(&e.b).and_then(|xb| e.a.valuation_of_difference(p, &xb));
                match v {
                    Some(v) if e.constraint.admits(v) => {}
                    Some(_) => return false,
                    None => {
                        fast = None;
                        break;
                    }
                }
            }
            if let Some(ok) = fast {
                return ok;
            }
        }
        self.slow_contains(x, spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Certified,
    Fail,
    Inconclusive,
}

/// Tally of one `(m, n, r, s, t)` cell. Tuples in the support are either
/// canceled (the support is stable under `x -> x + y` for every `y` in the
/// translation set, so the `ψ(x)`-twisted sum vanishes), filtered (the
/// Whittaker support forces `β(h_1) β(h_2) = 0`), or contributing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub m: i32,
    pub n: i32,
    pub r: i32,
    /// `s = s_num / p`.
    pub s_num: u64,
    pub t_num: u64,
    pub support: u64,
    pub canceled: u64,
    pub filtered: u64,
    pub contributing: u64,
    /// Valuations of contributing `x`; `null` stands for `x = 0`.
    pub contributing_valuations: BTreeSet<Option<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeReport {
    pub p: u64,
    pub ty: CosetType,
    pub scan_box: ScanBox,
    pub cells_scanned: u64,
    pub tuples_scanned: u64,
    pub support: u64,
    pub canceled: u64,
    pub filtered: u64,
    pub contributing: u64,
    /// Cells meeting the support.
    pub cells: Vec<CellReport>,
    pub claim: String,
    pub status: ClaimStatus,
    pub detail: String,
}

impl TypeReport {
    pub fn contributing_cells(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| c.contributing > 0)
    }
}

fn cells_for(p: u64, ty: CosetType, b: &ScanBox) -> Vec<CosetParams> {
    let (t1, t2) = ty.twisted();
    let mut out = Vec::new();
    for m in -b.radius..=b.radius {
        for r in -b.radius..=b.radius {
            let n = ty.n_from(m, r);
            if n.abs() > b.radius {
                continue;
            }
            for s_num in 0..if t1 { p } else { 1 } {
                for t_num in 0..if t2 { p } else { 1 } {
                    out.push(CosetParams {
                        ty,
                        m,
                        n,
                        r,
                        s_num,
                        t_num,
                        x: BigRational::zero(),
                    });
                }
            }
        }
    }
    out
}

fn scan_cell(p: u64, params: CosetParams, xs: &[Option<(i128, i32)>], ys: &[Option<(i128, i32)>]) -> Result<CellReport, ThetaError> {
    let spec = SupportSpec::phi_lev();
    let whittaker = params.ty.whittaker_allows(params.m, params.n);
    let cell = Cell::new(p, params, &spec)?;
    let mut report = CellReport {
        m: cell.params.m,
        n: cell.params.n,
        r: cell.params.r,
        s_num: cell.params.s_num,
        t_num: cell.params.t_num,
        support: 0,
        canceled: 0,
        filtered: 0,
        contributing: 0,
        contributing_valuations: BTreeSet::new(),
    };
    if !cell.fixed_ok {
        return Ok(report);
    }
    let pi = p as i128;
    for &x in xs {
        let xp = PRat::from_point(x);
        if !cell.contains(&xp, &spec) {
            continue;
        }
        report.support += 1;
        let stable = ys.iter().all(|&y| {
            let shifted = PRat::from_point(y).add(pi, &xp).expect("box points and translations fit in i128");
            cell.contains(&shifted, &spec)
        });
        if stable {
            report.canceled += 1;
        } else if !whittaker {
            report.filtered += 1;
        } else {
            report.contributing += 1;
            report.contributing_valuations.insert(x.map(|(_, v)| v));
        }
    }
    Ok(report)
}

/// Scans every representative of one type in the box against the support of
/// `φ^lev` and checks the corresponding claim.
pub fn scan_type(p: u64, ty: CosetType, scan_box: &ScanBox) -> Result<TypeReport, ThetaError> {
    check_odd_prime(p)?;
    let xs = scan_box.x_values(p);
    let ys = translation_set(p);
    let params = cells_for(p, ty, scan_box);
    let cells_scanned = params.len() as u64;
    let all: Vec<CellReport> = params.into_par_iter().map(|c| scan_cell(p, c, &xs, &ys)).collect::<Result<_, _>>()?;
    let sum = |f: fn(&CellReport) -> u64| all.iter().map(f).sum::<u64>();
    let mut report = TypeReport {
        p,
        ty,
        scan_box: *scan_box,
        cells_scanned,
        tuples_scanned: cells_scanned * xs.len() as u64,
        support: sum(|c| c.support),
        canceled: sum(|c| c.canceled),
        filtered: sum(|c| c.filtered),
        contributing: sum(|c| c.contributing),
        cells: all.into_iter().filter(|c| c.support > 0).collect(),
        claim: String::new(),
        status: ClaimStatus::Inconclusive,
        detail: String::new(),
    };
    let (claim, status, detail) = judge(&report, xs.len());
    report.claim = claim.into();
    report.status = status;
    report.detail = detail;
    Ok(report)
}

fn integral(v: &Option<i32>) -> bool {
    v.is_none_or(|v| v >= 0)
}

fn judge(rep: &TypeReport, n_x: usize) -> (&'static str, ClaimStatus, String) {
    let b = &rep.scan_box;
    let on_boundary = rep
        .contributing_cells()
        .any(|c| c.m.abs() == b.radius || c.n.abs() == b.radius || c.r.abs() == b.radius);
    let undecided = |msg: String| {
        if b.adequate() && !on_boundary {
            None
        } else {
            Some((ClaimStatus::Inconclusive, msg))
        }
    };
    match rep.ty {
        CosetType::I => {
            let claim = "contributing set is {m = n = r = 0, x in Z_p}";
            let stray: Vec<&CellReport> = rep
                .contributing_cells()
                .filter(|c| (c.m, c.n, c.r) != (0, 0, 0) || !c.contributing_valuations.iter().all(integral))
                .collect();
            if let Some(c) = stray.first() {
                return (
                    claim,
                    ClaimStatus::Fail,
                    format!(
                        "contribution at m={}, n={}, r={} with x valuations {:?}",
                        c.m, c.n, c.r, c.contributing_valuations
                    ),
                );
            }
            let units_per_v = (n_x - 1) / (b.v_max - b.v_min + 1) as usize;
            let expected = 1 + units_per_v as u64 * (b.v_max.max(-1) + 1) as u64;
            let found: u64 = rep.contributing_cells().map(|c| c.contributing).sum();
            if found != expected {
                return (
                    claim,
                    ClaimStatus::Fail,
                    format!("{found} contributing tuples at m = n = r = 0, expected every integral x ({expected})"),
                );
            }
            let detail = format!("{found} contributing tuples, all with m = n = r = 0 and x in Z_p");
            undecided(detail.clone()).map_or((claim, ClaimStatus::Certified, detail), |(s, d)| (claim, s, d))
        }
        CosetType::II => {
            let claim = "support is stable under x -> x + p^-1 Z_p wherever the Whittaker values are nonzero";
            if rep.contributing > 0 {
                let c = rep.contributing_cells().next().expect("nonzero total");
                return (
                    claim,
                    ClaimStatus::Fail,
                    format!("unstable support tuple at m={}, n={}, r={}, s={}/p", c.m, c.n, c.r, c.s_num),
                );
            }
            let detail = if rep.support == 0 {
                format!(
                    "support is empty in the box ({} tuples scanned); the claim holds vacuously",
                    rep.tuples_scanned
                )
            } else {
                format!("{} support tuples, none surviving cancellation", rep.support)
            };
            undecided(detail.clone()).map_or((claim, ClaimStatus::Certified, detail), |(s, d)| (claim, s, d))
        }
        CosetType::III => {
            let claim = "type III does not contribute";
            if rep.contributing > 0 {
                return (claim, ClaimStatus::Fail, format!("{} contributing tuples", rep.contributing));
            }
            let detail = format!("no contributing tuples; support size {}", rep.support);
            undecided(detail.clone()).map_or((claim, ClaimStatus::Certified, detail), |(s, d)| (claim, s, d))
        }
        CosetType::IV => {
            let claim = "contributions force m = n = r = 0, x in Z_p and s + t in Z";
            let p = rep.p;
            let stray = rep
                .contributing_cells()
                .find(|c| (c.m, c.n, c.r) != (0, 0, 0) || !c.contributing_valuations.iter().all(integral) || (c.s_num + c.t_num) % p != 0);
            if let Some(c) = stray {
                return (
                    claim,
                    ClaimStatus::Fail,
                    format!("contribution at m={}, n={}, r={}, s={}/p, t={}/p", c.m, c.n, c.r, c.s_num, c.t_num),
                );
            }
            let cells = rep.contributing_cells().count();
            let detail = format!(
                "{} contributing tuples in {cells} cells, all with m = n = r = 0, x in Z_p, s + t in Z",
                rep.contributing
            );
            undecided(detail.clone()).map_or((claim, ClaimStatus::Certified, detail), |(s, d)| (claim, s, d))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaReport {
    pub p: u64,
    pub scan_box: ScanBox,
    pub types: Vec<TypeReport>,
    /// `(v, Σ_{y ∈ p^{-v} Z / Z} ψ(y))` for `v = 0..=4`.
    pub char_sums: Vec<(u32, String)>,
    pub char_sums_vanish: bool,
    pub all_certified: bool,
}

pub fn scan_all(p: u64, types: &[CosetType], scan_box: &ScanBox) -> Result<ThetaReport, ThetaError> {
    let reports: Vec<TypeReport> = types.iter().map(|&t| scan_type(p, t, scan_box)).collect::<Result<_, _>>()?;
    let sums: Vec<(u32, String)> = (0..=4u32).map(|v| char_sum(p, v).map(|c| (v, c.to_string()))).collect::<Result<_, _>>()?;
    let vanish = (1..=4).all(|v| char_sum(p, v).map(|c| c.is_zero()).unwrap_or(false)) && char_sum(p, 0)?.is_one();
    let all_certified = vanish && reports.iter().all(|r| r.status == ClaimStatus::Certified);
    Ok(ThetaReport {
        p,
        scan_box: *scan_box,
        types: reports,
        char_sums: sums,
        char_sums_vanish: vanish,
        all_certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prat_arithmetic_matches_rationals() {
        let p = 5u64;
        let vals = [
            BigRational::new(3.into(), 25.into()),
            BigRational::new((-7).into(), 5.into()),
            BigRational::from_integer(10.into()),
            BigRational::new(2.into(), 3.into()),
        ];
        for a in &vals {
            for b in &vals {
                let (pa, pb) = (PRat::from_big(p, a).unwrap(), PRat::from_big(p, b).unwrap());
                let sum = pa.add(5, &pb).unwrap();
                assert_eq!(if sum.is_zero() { None } else { Some(sum.exp) }, valuation(p, &(a + b)));
                let prod = pa.mul(&pb).unwrap();
                assert_eq!(prod.exp, valuation(p, &(a * b)).unwrap());
                assert_eq!(pa.valuation_of_difference(5, &pb).unwrap(), valuation(p, &(a - b)));
            }
        }
        assert!(PRat::from_big(p, &BigRational::from_integer(BigInt::from(1u8) << 100)).is_none());
    }

    #[test]
    fn fast_membership_matches_exact() {
        let spec = SupportSpec::phi_lev();
        let p = 3;
        let b = ScanBox::with_radius(2);
        let xs = b.x_values(p);
        for ty in CosetType::ALL {
            for params in cells_for(p, ty, &b).into_iter().step_by(3) {
                let cell = Cell::new(p, params, &spec).unwrap();
                for &x in xs.iter().step_by(5) {
                    let xp = PRat::from_point(x);
                    assert_eq!(
                        cell.contains(&xp, &spec),
                        cell.fixed_ok && cell.slow_contains(&xp, &spec),
                        "{ty} {:?} x={x:?}",
                        cell.params
                    );
                }
            }
        }
    }

    #[test]
    fn box_point_counts() {
        let b = ScanBox::default();
        assert_eq!(b.x_values(11).len(), 1 + 9 * 1210);
        assert_eq!(translation_set(11).len(), 31);
        assert_eq!(cells_for(11, CosetType::IV, &b).len(), 41 * 121);
        assert_eq!(cells_for(11, CosetType::I, &b).len(), 41);
        assert!(!ScanBox::with_radius(0).adequate());
    }
}
