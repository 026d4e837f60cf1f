//! Graded pieces of the Jacobian ideal `J = (∂_0 S, .., ∂_4 S)` as sparse
//! echelon forms over `Q`, with pivots on grevlex-leading monomials.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CyclotomicNumber;

use super::poly::{monomials_of_degree, CycPoly, Exponent, CONDUCTOR, NVARS};

/// Pieces of degree at most this keep the generator combinations needed for
/// lifting; above it every monomial lies in `J` and lifts are built from
/// this degree.
pub(crate) const LIFT_DEGREE: u32 = 6;

type SparseQ = BTreeMap<usize, BigRational>;

/// `∂_i S = 2 x_i x_{i+1} + x_{i-1}^2` as integer terms.
pub(crate) fn partial_terms(i: usize) -> [(Exponent, i64); 2] {
    let mut a = [0u8; NVARS];
    a[i] += 1;
    a[(i + 1) % NVARS] += 1;
    let mut b = [0u8; NVARS];
    b[(i + NVARS - 1) % NVARS] = 2;
    [(a, 2), (b, 1)]
}

struct Pivot {
    row: SparseQ,
    /// Expression of `row` in the generators `m * ∂_i S`.
    combo: SparseQ,
}

pub(crate) struct GradedPiece {
    degree: u32,
    monos: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    /// Monomials of degree `d - 2`, indexing generators `i * len + j`.
    lower: Vec<Exponent>,
    pivots: HashMap<usize, Pivot>,
    complement: Vec<usize>,
    tracks_lifts: bool,
}

fn axpy(dst: &mut SparseQ, c: &BigRational, src: &SparseQ) {
    for (&k, v) in src {
        let e = dst.entry(k).or_insert_with(BigRational::zero);
        *e -= c * v;
        if e.is_zero() {
            dst.remove(&k);
        }
    }
}

impl GradedPiece {
    fn build(degree: u32, tracks_lifts: bool) -> Self {
        let monos = monomials_of_degree(degree);
        let index: HashMap<Exponent, usize> = monos.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let lower = if degree >= 2 { monomials_of_degree(degree - 2) } else { Vec::new() };
        let mut pivots: HashMap<usize, Pivot> = HashMap::new();
        for i in 0..NVARS {
            for (j, m) in lower.iter().enumerate() {
                let mut row = SparseQ::new();
                for (e, c) in partial_terms(i) {
                    let mut f = *m;
                    for v in 0..NVARS {
                        f[v] += e[v];
                    }
                    *row.entry(index[&f]).or_insert_with(BigRational::zero) += BigRational::from_integer(c.into());
                }
                let mut combo = SparseQ::new();
                if tracks_lifts {
                    combo.insert(i * lower.len() + j, BigRational::one());
                }
                let mut cursor = 0;
                while let Some((&k, c)) = row.range(cursor..).next() {
                    if let Some(p) = pivots.get(&k) {
                        let c = c.clone();
                        axpy(&mut row, &c, &p.row);
                        if tracks_lifts {
                            axpy(&mut combo, &c, &p.combo);
                        }
                    }
                    cursor = k + 1;
                }
                if let Some((&lead, c)) = row.iter().next() {
                    let inv = c.recip();
                    row.values_mut().for_each(|v| *v *= &inv);
                    combo.values_mut().for_each(|v| *v *= &inv);
                    pivots.insert(lead, Pivot { row, combo });
                }
            }
        }
        let complement = (0..monos.len()).filter(|k| !pivots.contains_key(k)).collect();
        GradedPiece {
            degree,
            monos,
            index,
            lower,
            pivots,
            complement,
            tracks_lifts,
        }
    }

    pub(crate) fn dim_quotient(&self) -> usize {
        self.complement.len()
    }

    pub(crate) fn complement_monomials(&self) -> Vec<Exponent> {
        self.complement.iter().map(|&k| self.monos[k]).collect()
    }

    /// Splits `a = harm + Σ B_i ∂_i S` with `harm` supported on the complement.
    /// The `B_i` are returned only when the piece tracks lifts.
    pub(crate) fn split(&self, a: &CycPoly) -> (CycPoly, Option<[CycPoly; NVARS]>) {
        assert_eq!(a.degree(), self.degree, "degree mismatch");
        let mut v: BTreeMap<usize, CyclotomicNumber> = a.terms().map(|(e, c)| (self.index[e], c.clone())).collect();
        let mut gens: BTreeMap<usize, CyclotomicNumber> = BTreeMap::new();
        let mut cursor = 0;
        while let Some((&k, c)) = v.range(cursor..).next() {
            if let Some(p) = self.pivots.get(&k) {
                let c = c.clone();
                for (&idx, x) in &p.row {
                    sub_scaled(&mut v, idx, &c, x);
                }
                if self.tracks_lifts {
                    for (&idx, x) in &p.combo {
                        sub_scaled(&mut gens, idx, &c, &-x);
                    }
                }
            }
            cursor = k + 1;
        }
        let mut harm = CycPoly::zero(self.degree);
        for (k, c) in v {
            harm.add_term(self.monos[k], c);
        }
        let lifts = self.tracks_lifts.then(|| {
            let d = self.degree.saturating_sub(2);
            let mut bs: [CycPoly; NVARS] = std::array::from_fn(|_| CycPoly::zero(d));
            for (idx, c) in gens {
                let (i, j) = (idx / self.lower.len(), idx % self.lower.len());
                bs[i].add_term(self.lower[j], c);
            }
            bs
        });
        (harm, lifts)
    }
}

/// `dst[idx] -= c * x`.
fn sub_scaled(dst: &mut BTreeMap<usize, CyclotomicNumber>, idx: usize, c: &CyclotomicNumber, x: &BigRational) {
    let e = dst.entry(idx).or_insert_with(|| CyclotomicNumber::zero(CONDUCTOR));
    *e = &*e - &c.scale(x);
    if e.is_zero() {
        dst.remove(&idx);
    }
}

type Cache = Mutex<HashMap<u32, Arc<GradedPiece>>>;

pub(crate) fn piece(degree: u32) -> Arc<GradedPiece> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache lock").get(&degree) {
        return p.clone();
    }
    let built = Arc::new(GradedPiece::build(degree, degree <= LIFT_DEGREE));
    cache.lock().expect("cache lock").entry(degree).or_insert(built).clone()
}

/// Lifts a single monomial of degree above [`LIFT_DEGREE`] into `J`:
/// `x^e = x_j x^{e'}` with `x^{e'}` lifted recursively.
pub(crate) fn lift_high_monomial(e: &Exponent, memo: &mut HashMap<Exponent, [CycPoly; NVARS]>) -> [CycPoly; NVARS] {
    if let Some(b) = memo.get(e) {
        return b.clone();
    }
    let degree: u32 = e.iter().map(|&x| x as u32).sum();
    let out = if degree == LIFT_DEGREE {
        let (harm, lifts) = piece(degree).split(&CycPoly::monomial(*e, CyclotomicNumber::one(CONDUCTOR)));
        assert!(harm.is_zero(), "monomials of degree {LIFT_DEGREE} lie in the Jacobian ideal");
        lifts.expect("lifting piece tracks combinations")
    } else {
        let j = (0..NVARS).find(|&j| e[j] > 0).expect("positive degree");
        let mut rest = *e;
        rest[j] -= 1;
        let lower = lift_high_monomial(&rest, memo);
        let xj = CycPoly::variable(j);
        lower.map(|b| b.mul(&xj))
    };
    memo.insert(*e, out.clone());
    out
}
