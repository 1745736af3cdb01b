//! Arc functions with an anti-periodic extension.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::little_groups::LittleGroupSpec;

/// One odd harmonic `a sin(kπu/P) + b cos(kπu/P)`, `k` odd.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddHarmonic {
    pub k: u32,
    pub sin: f64,
    pub cos: f64,
}

#[derive(Clone)]
enum Kind {
    Zero,
    /// `sin(πu/P)`, which for `P = 2π/(q0 N′)` is `sin(q0 N′ u/2)`.
    Sine,
    Harmonics(Vec<OddHarmonic>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A function on the arc `[0, P)`, `P = 2π/(q0 N′)`, extended to the line
/// by `ϑ(u + P) = -ϑ(u)`.
#[derive(Clone)]
pub struct GeneratorFunction {
    kind: Kind,
    scale: f64,
    q0: u32,
    n_prime: u32,
    period: f64,
}

impl fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Zero => "zero".to_string(),
            Kind::Sine => "sine".to_string(),
            Kind::Harmonics(h) => format!("harmonics({})", h.len()),
            Kind::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("GeneratorFunction")
            .field("kind", &kind)
            .field("scale", &self.scale)
            .field("q0", &self.q0)
            .field("n_prime", &self.n_prime)
            .finish()
    }
}

impl GeneratorFunction {
    fn with_kind(spec: &LittleGroupSpec, kind: Kind) -> Self {
        GeneratorFunction {
            kind,
            scale: 1.0,
            q0: spec.q0(),
            n_prime: spec.n_prime(),
            period: spec.anti_period(),
        }
    }

    /// The witness `sin(N q0 u/(2l))`.
    pub fn witness(spec: &LittleGroupSpec) -> Self {
        Self::with_kind(spec, Kind::Sine)
    }

    pub fn zero(spec: &LittleGroupSpec) -> Self {
        Self::with_kind(spec, Kind::Zero)
    }

    /// Random combination of the first `terms` odd harmonics with
    /// coefficients uniform in `[-1, 1]`.
    pub fn random_trig<R: Rng + ?Sized>(spec: &LittleGroupSpec, terms: usize, rng: &mut R) -> Self {
        let h = (0..terms)
            .map(|j| OddHarmonic { k: 2 * j as u32 + 1, sin: rng.gen_range(-1.0..=1.0), cos: rng.gen_range(-1.0..=1.0) })
            .collect();
        Self::with_kind(spec, Kind::Harmonics(h))
    }

    pub fn harmonics(spec: &LittleGroupSpec, terms: Vec<OddHarmonic>) -> Self {
        assert!(terms.iter().all(|t| t.k % 2 == 1), "harmonic index must be odd");
        Self::with_kind(spec, Kind::Harmonics(terms))
    }

    /// Arbitrary arc values; only `[0, P)` is ever evaluated.
    pub fn custom<F>(spec: &LittleGroupSpec, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_kind(spec, Kind::Custom(Arc::new(f)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        GeneratorFunction { scale: self.scale * c, ..self.clone() }
    }

    /// Anti-period `P`.
    pub fn anti_period(&self) -> f64 {
        self.period
    }

    pub fn q0(&self) -> u32 {
        self.q0
    }

    pub fn n_prime(&self) -> u32 {
        self.n_prime
    }

    /// True when the generator was built for `spec`'s anti-period.
    pub fn matches(&self, spec: &LittleGroupSpec) -> bool {
        self.q0 == spec.q0() && self.n_prime == spec.n_prime()
    }

    /// Value on the arc, `r ∈ [0, P)`.
    pub fn on_arc(&self, r: f64) -> f64 {
        let x = PI * r / self.period;
        self.scale
            * match &self.kind {
                Kind::Zero => 0.0,
                Kind::Sine => x.sin(),
                Kind::Harmonics(h) => h
                    .iter()
                    .map(|t| {
                        let (s, c) = (t.k as f64 * x).sin_cos();
                        t.sin * s + t.cos * c
                    })
                    .sum(),
                Kind::Custom(f) => f(r),
            }
    }

    /// Anti-periodic extension: `u = kP + r` gives `(-1)^k ϑ(r)`.
    pub fn eval(&self, u: f64) -> f64 {
        let mut k = (u / self.period).floor();
        let mut r = u - k * self.period;
        // Rounding can leave r = P just below a multiple of P.
        if r >= self.period {
            r -= self.period;
            k += 1.0;
        }
        let v = self.on_arc(r.max(0.0));
        if k.rem_euclid(2.0) == 1.0 {
            -v
        } else {
            v
        }
    }

    /// `∫₀^P ϑ² du` by composite Simpson with `2m` panels.
    pub fn arc_norm_sq(&self, m: usize) -> f64 {
        let n = 2 * m.max(1);
        let h = self.period / n as f64;
        let f = |i: usize| {
            let v = self.on_arc(i as f64 * h);
            v * v
        };
        let mut s = f(0) + f(n);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
        }
        s * h / 3.0
    }
}
