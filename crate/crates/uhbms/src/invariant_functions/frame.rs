//! Linear frames `(u, v)` adapted to the orbits of each orientation case.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::little_groups::{LittleGroupSpec, OrientationCase};

/// `(ρ, σ) → (u, v)` with `u` constant along the one-parameter orbits:
///
/// | case | u        | v        |
/// |------|----------|----------|
/// | 1    | σ − qρ   | qσ + ρ   |
/// | 2    | ρ − qσ   | qρ + σ   |
/// | 3    | σ + qρ   | qσ − ρ   |
/// | 4    | −ρ − qσ  | σ − qρ   |
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameTransform {
    pub case: OrientationCase,
    pub q: Ratio<i64>,
}

type R = Ratio<i64>;

impl FrameTransform {
    pub fn new(case: OrientationCase, q: Ratio<i64>) -> Self {
        FrameTransform { case, q }
    }

    pub fn for_spec(spec: &LittleGroupSpec) -> Self {
        FrameTransform { case: spec.case(), q: spec.q_ratio() }
    }

    fn qf(&self) -> f64 {
        *self.q.numer() as f64 / *self.q.denom() as f64
    }

    /// Exact matrix `[[uρ, uσ], [vρ, vσ]]` of the forward map.
    pub fn matrix(&self) -> [[R; 2]; 2] {
        let q = self.q;
        let one = R::from_integer(1);
        match self.case {
            OrientationCase::One => [[-q, one], [one, q]],
            OrientationCase::Two => [[one, -q], [q, one]],
            OrientationCase::Three => [[q, one], [-one, q]],
            OrientationCase::Four => [[-one, -q], [-q, one]],
        }
    }

    pub fn forward(&self, rho: f64, sigma: f64) -> (f64, f64) {
        let m = self.matrix();
        let f = |r: R| *r.numer() as f64 / *r.denom() as f64;
        (f(m[0][0]) * rho + f(m[0][1]) * sigma, f(m[1][0]) * rho + f(m[1][1]) * sigma)
    }

    /// Inverse map; every frame has determinant `±(1 + q²)`.
    pub fn inverse(&self, u: f64, v: f64) -> (f64, f64) {
        let q = self.qf();
        let d = 1.0 + q * q;
        match self.case {
            OrientationCase::One => ((v - q * u) / d, (q * v + u) / d),
            OrientationCase::Two => ((u + q * v) / d, (v - q * u) / d),
            OrientationCase::Three => ((q * u - v) / d, (u + q * v) / d),
            OrientationCase::Four => (-(u + q * v) / d, (v - q * u) / d),
        }
    }

    /// `(dρ, dσ)/dθ` along the orbit of `(R(aθ), R(bθ))` with `(a, b)` the
    /// case's signed slopes: the action shifts `(ρ, σ)` by `(2aθ, 2bθ)`.
    pub fn orbit_direction(spec: &LittleGroupSpec) -> (i64, i64) {
        let (a, b) = spec.slopes();
        (2 * a, 2 * b)
    }

    /// Exact change of `(u, v)` per unit θ along the orbit.
    pub fn orbit_drift(&self, spec: &LittleGroupSpec) -> (R, R) {
        let (dr, ds) = Self::orbit_direction(spec);
        let m = self.matrix();
        let (dr, ds) = (R::from_integer(dr), R::from_integer(ds));
        (m[0][0] * dr + m[0][1] * ds, m[1][0] * dr + m[1][1] * ds)
    }
}
