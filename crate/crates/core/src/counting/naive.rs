use crate::ffield::{FieldDescriptor, FieldElement};

use super::{projective_space_size, CountError, CountOptions, HomogeneousForm};

/// Number of projective zeros of `form`, evaluated point by point.
///
/// Representatives are normalized so that the first nonzero coordinate is 1.
pub fn count_hypersurface_naive(form: &HomogeneousForm, field: &FieldDescriptor, options: &CountOptions) -> Result<u128, CountError> {
    let n = form.nvars();
    let q = field.q();
    options.check(projective_space_size(q, n as u32 - 1))?;
    let elems: Vec<FieldElement> = field.elements().collect();
    let mut count = 0u128;
    for lead in 0..n {
        let free = n - lead - 1;
        let mut point = vec![field.zero(); n];
        point[lead] = field.one();
        for i in 0..q.pow(free as u32) {
            let mut rest = i;
            for slot in point.iter_mut().skip(lead + 1) {
                *slot = elems[(rest % q) as usize].clone();
                rest /= q;
            }
            if form.evaluate(field, &point)?.is_zero() {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::build_field;

    #[test]
    fn hyperplane_is_p3() {
        let f = build_field(3, 1).unwrap();
        let x0 = HomogeneousForm::variable(5, 0);
        assert_eq!(count_hypersurface_naive(&x0, &f, &CountOptions::default()).unwrap(), 40);
    }

    #[test]
    fn klein_over_f2() {
        let f = build_field(2, 1).unwrap();
        assert_eq!(
            count_hypersurface_naive(&HomogeneousForm::klein(), &f, &CountOptions::default()).unwrap(),
            15
        );
    }

    #[test]
    fn degenerate_cubics_over_f4() {
        let f = build_field(2, 2).unwrap();
        let opts = CountOptions::default();
        let cube = |i: usize| {
            let mut m = vec![0; 5];
            m[i] = 3;
            (m, 1)
        };
        // x0^3 = 0 is the hyperplane x0 = 0 as a set
        let single = HomogeneousForm::from_terms(5, 3, [cube(0)]);
        assert_eq!(count_hypersurface_naive(&single, &f, &opts).unwrap(), 85);
        // every nonzero element of F4 is a cube root of 1, so x0^3 + x1^3 = 0
        // iff x0 = x1 = 0 (21 points) or both are nonzero (9 * 64 / 3 points)
        let pair = HomogeneousForm::from_terms(5, 3, [cube(0), cube(1)]);
        assert_eq!(count_hypersurface_naive(&pair, &f, &opts).unwrap(), 21 + 192);
    }

    #[test]
    fn budget() {
        let f = build_field(13, 1).unwrap();
        let opts = CountOptions {
            budget: 1000,
            ..Default::default()
        };
        assert!(count_hypersurface_naive(&HomogeneousForm::klein(), &f, &opts).is_err());
    }
}
