//! Fixed functions of the little groups `H(N, q0, p0)`: closed forms in the
//! four orientation frames, their separated product form, fundamental
//! regions and the actuality scan.

pub mod actuality;
pub mod frame;
pub mod generator;
pub mod region;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{sum_indexed, Exec};
use crate::little_groups::{LittleGroupSpec, OrientationCase};
use crate::torus_action::{sign_sin, TorusFunction};

pub use actuality::{actuality_scan, ActualityScan, ResidualField};
pub use frame::FrameTransform;
pub use generator::{GeneratorFunction, OddHarmonic};
pub use region::{fundamental_region, EdgeLine, FundamentalRegion, PiPoint};

/// `(l, N′, m′)` with `l = gcd(N, m)`, `N′ = N/l`, `m′ = m/l`.
pub fn gcd_split(n: u32, m: u32) -> Result<(u32, u32, u32)> {
    if n == 0 || m == 0 || n.is_multiple_of(2) || m.is_multiple_of(2) {
        return Err(Error::Parity(format!("gcd_split needs positive odd inputs, got ({n}, {m})")));
    }
    let l = n.gcd(&m);
    Ok((l, n / l, m / l))
}

/// The closed-form fixed function of a little group:
///
/// | case | φ(ρ, σ)                        |
/// |------|--------------------------------|
/// | 1    | ς(−ρ/2) ς(σ/2) ϑ(σ − qρ)       |
/// | 2    | ς(ρ/2) ς(−σ/2) ϑ(ρ − qσ)       |
/// | 3    | ς(ρ/2) ς(σ/2) ϑ(σ + qρ)        |
/// | 4    | ς(−ρ/2) ς(−σ/2) ϑ(−ρ − qσ)     |
#[derive(Clone, Debug)]
pub struct FixedFunction {
    spec: LittleGroupSpec,
    gen: GeneratorFunction,
    q: f64,
}

impl FixedFunction {
    pub fn spec(&self) -> &LittleGroupSpec {
        &self.spec
    }

    pub fn generator(&self) -> &GeneratorFunction {
        &self.gen
    }
}

impl TorusFunction for FixedFunction {
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        let (hr, hs) = (0.5 * rho, 0.5 * sigma);
        let q = self.q;
        match self.spec.case() {
            OrientationCase::One => sign_sin(-hr) * sign_sin(hs) * self.gen.eval(sigma - q * rho),
            OrientationCase::Two => sign_sin(hr) * sign_sin(-hs) * self.gen.eval(rho - q * sigma),
            OrientationCase::Three => sign_sin(hr) * sign_sin(hs) * self.gen.eval(sigma + q * rho),
            OrientationCase::Four => sign_sin(-hr) * sign_sin(-hs) * self.gen.eval(-rho - q * sigma),
        }
    }
}

/// The fixed function of `spec` generated by `gen`. The generator must carry
/// the spec's anti-period `2π/(q0 N′)`.
pub fn build_fixed_function(spec: &LittleGroupSpec, gen: &GeneratorFunction) -> Result<FixedFunction> {
    if !gen.matches(spec) {
        return Err(Error::InvalidArgument(format!(
            "generator built for q0={}, N'={} does not match {spec}",
            gen.q0(),
            gen.n_prime()
        )));
    }
    Ok(FixedFunction { spec: *spec, gen: gen.clone(), q: spec.q() })
}

/// `ψ(u, v) = ς((qu − v)/(2(1+q²))) ς((u + qv)/(2(1+q²))) ψ(u, 0)` in the
/// case's `(u, v)` frame. The same expression serves all four cases, and it
/// holds for every real `u`, not only on the reduced arc.
#[derive(Clone, Debug)]
pub struct SeparatedForm {
    gen: GeneratorFunction,
    frame: FrameTransform,
    q: f64,
}

pub fn separated_form(gen: &GeneratorFunction, case: OrientationCase, q: num_rational::Ratio<i64>) -> SeparatedForm {
    SeparatedForm {
        gen: gen.clone(),
        frame: FrameTransform::new(case, q),
        q: *q.numer() as f64 / *q.denom() as f64,
    }
}

impl SeparatedForm {
    pub fn eval_uv(&self, u: f64, v: f64) -> f64 {
        let d = 2.0 * (1.0 + self.q * self.q);
        sign_sin((self.q * u - v) / d) * sign_sin((u + self.q * v) / d) * self.gen.eval(u)
    }

    pub fn frame(&self) -> &FrameTransform {
        &self.frame
    }
}

impl TorusFunction for SeparatedForm {
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        let (u, v) = self.frame.forward(rho, sigma);
        self.eval_uv(u, v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormIdentityReport {
    /// `∬_F |φ|² dρ dσ` over the case's fundamental region.
    pub region_integral: f64,
    /// `2π q0 N′ ∫ |ϑ|² du` over the arc.
    pub arc_integral: f64,
    pub rel_error: f64,
    pub grid: usize,
}

/// Compare the region integral of `|φ|²` (midpoint rule on an `n × n` grid
/// in the parallelogram's affine coordinates) with the arc integral.
pub fn norm_identity_check(spec: &LittleGroupSpec, gen: &GeneratorFunction, n: usize, exec: Exec) -> Result<NormIdentityReport> {
    let phi = build_fixed_function(spec, gen)?;
    let region = fundamental_region(spec.case(), spec.q0(), spec.p0());
    let (ax, ay) = region.a.to_f64();
    let (gx, gy) = region.gamma.to_f64();
    let jac = (ax * gy - ay * gx).abs();
    let h = 1.0 / n as f64;
    let sum = sum_indexed(exec, n * n, |k| {
        let (s, t) = (((k / n) as f64 + 0.5) * h, ((k % n) as f64 + 0.5) * h);
        let v = phi.eval(s * ax + t * gx, s * ay + t * gy);
        v * v
    });
    let region_integral = sum * h * h * jac;
    let arc = gen.arc_norm_sq(n.max(64));
    let arc_integral = std::f64::consts::TAU * (spec.q0() * spec.n_prime()) as f64 * arc;
    let denom = region_integral.abs().max(arc_integral.abs());
    let rel_error = if denom == 0.0 { 0.0 } else { (region_integral - arc_integral).abs() / denom };
    Ok(NormIdentityReport { region_integral, arc_integral, rel_error, grid: n })
}
