//! Independent reference for the fixed functions: propagate a point along
//! its H-orbit back to the seed arc `v = 0` and read the generator there.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uhbms::group_core::wrap_angle;
use uhbms::invariant_functions::{FrameTransform, GeneratorFunction};
use uhbms::little_groups::{LittleGroupSpec, OrientationCase};
use uhbms::torus_action::{off_boundary, rotation_factors, sign_sin};

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Value of the invariant function at `(ρ, σ)` obtained by orbit
/// propagation, or `None` when the path crosses a sign boundary within
/// `eps`.
pub fn orbit_oracle(spec: &LittleGroupSpec, gen: &GeneratorFunction, rho: f64, sigma: f64, eps: f64) -> Option<f64> {
    let frame = FrameTransform::for_spec(spec);
    let m = frame.matrix();
    let (rho, sigma) = (wrap_angle(rho), wrap_angle(sigma));

    // Integer form of the u row: u(2π(m, n)) = 2π (U1 m + U2 n)/D.
    let den = m[0][0].denom().lcm(m[0][1].denom());
    let big = |r: Ratio<i64>| (r * den).to_integer();
    let (u1, u2) = (big(m[0][0]), big(m[0][1]));
    let (g, x, y) = ext_gcd(u1, u2);
    let cell = TAU * g as f64 / den as f64;

    let (u, _) = frame.forward(rho, sigma);
    let k = (u / cell).floor() as i64;
    let (dr, ds) = (-(k * x) as f64 * TAU, -(k * y) as f64 * TAU);
    let (r0, s0) = (rho + dr, sigma + ds);
    let (ub, vb) = frame.forward(r0, s0);

    let (_, dv) = frame.orbit_drift(spec);
    let drift = *dv.numer() as f64 / *dv.denom() as f64;
    let theta = -vb / drift;
    let (a, b) = spec.slopes();
    let (ta, tb) = (rho / 2.0 + a as f64 * theta, sigma / 2.0 + b as f64 * theta);
    let near = |t: f64| {
        let r = t.rem_euclid(PI);
        r < eps || PI - r < eps
    };
    if near(ta) || near(tb) || !off_boundary(rho, sigma, eps) {
        return None;
    }
    let (_, s1) = rotation_factors(a as f64 * theta, rho);
    let (_, s2) = rotation_factors(b as f64 * theta, sigma);

    let q = spec.q();
    let d = 2.0 * (1.0 + q * q);
    let (sa, sb) = (q * ub / d, ub / d);
    if near(sa) || near(sb) {
        return None;
    }
    Some(s1 * s2 * sign_sin(sa) * sign_sin(sb) * gen.eval(ub))
}

/// `count` uniform points at least `eps` away from every sign boundary of
/// the oracle path.
pub fn oracle_points(spec: &LittleGroupSpec, gen: &GeneratorFunction, count: usize, eps: f64, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (r, s) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        if let Some(v) = orbit_oracle(spec, gen, r, s, eps) {
            out.push((r, s, v));
        }
    }
    out
}

/// The specs used by the invariance and oracle checks.
pub fn reference_specs() -> Vec<LittleGroupSpec> {
    let mut v = Vec::new();
    for (n, q0, p0) in [(1, 1, 1), (3, 1, 1), (3, 1, 3), (5, 3, 5)] {
        for case in OrientationCase::ALL {
            v.push(LittleGroupSpec::new(n, q0, p0, case).expect("valid spec"));
        }
    }
    v
}
