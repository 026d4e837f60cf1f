use std::collections::BTreeMap;

use crate::ffield::{FieldDescriptor, FieldElement};

use super::CountError;

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Homogeneous polynomial with integer coefficients; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousForm {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, i64>,
}

impl HomogeneousForm {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogeneousForm {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// # Panics
    /// If a monomial has the wrong length or degree.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, i64)>>(nvars: usize, degree: u32, terms: I) -> Self {
        let mut f = Self::zero(nvars, degree);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    /// `x0^2 x1 + x1^2 x2 + x2^2 x3 + x3^2 x4 + x4^2 x0`.
    pub fn klein() -> Self {
        Self::from_terms(
            5,
            3,
            (0..5).map(|i| {
                let mut m = vec![0; 5];
                m[i] = 2;
                m[(i + 1) % 5] = 1;
                (m, 1)
            }),
        )
    }

    /// The linear form `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::from_terms(nvars, 1, [(m, 1)])
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        assert_eq!(m.len(), self.nvars, "monomial length");
        assert_eq!(m.iter().sum::<u32>(), self.degree, "monomial degree");
        let entry = self.terms.entry(m).or_insert(0);
        *entry = entry.checked_add(c).expect("coefficient overflow");
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, i64> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[u32]) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(m, ca.checked_mul(*cb).expect("coefficient overflow"));
            }
        }
        out
    }

    /// Substitutes `x_i -> images[i]`; all images must share one degree.
    pub fn substitute_monomials(&self, images: &[Monomial]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let new_vars = images[0].len();
        let image_degree: u32 = images[0].iter().sum();
        assert!(images.iter().all(|m| m.len() == new_vars && m.iter().sum::<u32>() == image_degree));
        let mut out = Self::zero(new_vars, self.degree * image_degree);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_vars];
            for (i, &power) in m.iter().enumerate() {
                for (slot, &d) in e.iter_mut().zip(&images[i]) {
                    *slot += power * d;
                }
            }
            out.add_term(e, *c);
        }
        out
    }

    pub fn evaluate(&self, field: &FieldDescriptor, point: &[FieldElement]) -> Result<FieldElement, CountError> {
        if point.len() != self.nvars {
            return Err(CountError::Arity {
                got: point.len(),
                expected: self.nvars,
            });
        }
        let mut acc = field.zero();
        for (m, &c) in &self.terms {
            let mut term = field.from_int(c);
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    term = field.mul(&term, &field.pow(x, e as u64)?)?;
                }
            }
            acc = field.add(&acc, &term)?;
        }
        Ok(acc)
    }
}

/// `x_i -> y_i^4 y_{i+1}^2 y_{i+2}^3 y_{i+3}^8`, indices mod 5.
pub fn fermat_cover_map() -> Vec<Monomial> {
    (0..5)
        .map(|i| {
            let mut m = vec![0u32; 5];
            for (offset, e) in [(0, 4), (1, 2), (2, 3), (3, 8)] {
                m[(i + offset) % 5] += e;
            }
            m
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatCoverCheck {
    pub pulled_back: HomogeneousForm,
    pub expected: HomogeneousForm,
    pub holds: bool,
}

/// Pulls the Klein cubic back along [`fermat_cover_map`] and compares with
/// `(y_0 ... y_4)^8 (y_0^11 + ... + y_4^11)`.
pub fn fermat_cover_check() -> FermatCoverCheck {
    let pulled_back = HomogeneousForm::klein().substitute_monomials(&fermat_cover_map());
    let fermat = HomogeneousForm::from_terms(
        5,
        11,
        (0..5).map(|i| {
            let mut m = vec![0; 5];
            m[i] = 11;
            (m, 1)
        }),
    );
    let norm8 = HomogeneousForm::from_terms(5, 40, [(vec![8; 5], 1)]);
    let expected = norm8.mul(&fermat);
    let holds = pulled_back == expected;
    FermatCoverCheck {
        pulled_back,
        expected,
        holds,
    }
}

pub fn verify_fermat_cover() -> bool {
    fermat_cover_check().holds
}
