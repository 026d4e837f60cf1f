//! Equivariance of the archimedean polynomials `P_±(x) = tr(x M_±)` under
//! `x -> u_{t_1}^{-1} x u_{t_2}`.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

type CMat2 = [[Complex64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `P_+(x) = tr(x [[-i, -1], [-1, i]])`, with phase `e^{-i(t_2 + t_1)}`.
pub const P_PLUS: CMat2 = [[Complex64::new(0.0, -1.0), Complex64::new(-1.0, 0.0)], [Complex64::new(-1.0, 0.0), I]];

/// `P_-(x) = tr(x [[i, -1], [1, i]])`, with phase `e^{-i(t_2 - t_1)}`.
pub const P_MINUS: CMat2 = [[I, Complex64::new(-1.0, 0.0)], [ONE, I]];

/// The transpose of [`P_MINUS`]. It is equivariant with the conjugate phase
/// `e^{+i(t_2 - t_1)}`.
pub const P_MINUS_TRANSPOSED: CMat2 = [[I, ONE], [Complex64::new(-1.0, 0.0), I]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    pub fn matrix(self) -> CMat2 {
        match self {
            PhaseSign::Plus => P_PLUS,
            PhaseSign::Minus => P_MINUS,
        }
    }

    /// `e^{-i(t_2 ± t_1)}`.
    pub fn phase(self, t1: f64, t2: f64) -> Complex64 {
        let angle = match self {
            PhaseSign::Plus => t2 + t1,
            PhaseSign::Minus => t2 - t1,
        };
        Complex64::from_polar(1.0, -angle)
    }
}

/// `u_t = [[cos t, sin t], [-sin t, cos t]]`.
pub fn rotation(t: f64) -> [[f64; 2]; 2] {
    let (s, c) = t.sin_cos();
    [[c, s], [-s, c]]
}

fn mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

/// `tr(x m)`.
pub fn pairing(m: &CMat2, x: &[[f64; 2]; 2]) -> Complex64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| m[j][i] * x[i][j]).sum()
}

/// `|P(u_{t_1}^{-1} x u_{t_2}) - phase · P(x)|` for an arbitrary matrix `m`.
pub fn equivariance_residual(m: &CMat2, phase: Complex64, t1: f64, t2: f64, x: &[[f64; 2]; 2]) -> f64 {
    // u_t is orthogonal, so u_t^{-1} = u_{-t}.
    let moved = mul(&mul(&rotation(-t1), x), &rotation(t2));
    (pairing(m, &moved) - phase * pairing(m, x)).norm()
}

pub fn archimedean_equivariance(t1: f64, t2: f64, x: &[[f64; 2]; 2], sign: PhaseSign) -> f64 {
    equivariance_residual(&sign.matrix(), sign.phase(t1, t2), t1, t2, x)
}

/// Largest residual over `samples` random `(t_1, t_2, x, ±)` with angles in
/// `[0, 2π)` and entries of `x` in `[-1, 1]`.
pub fn max_equivariance_residual(samples: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..samples)
        .map(|_| {
            let t1 = rng.gen_range(0.0..tau);
            let t2 = rng.gen_range(0.0..tau);
            let x = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
            let sign = if rng.gen_bool(0.5) { PhaseSign::Plus } else { PhaseSign::Minus };
            archimedean_equivariance(t1, t2, &x, sign)
        })
        .fold(0.0, f64::max)
}
