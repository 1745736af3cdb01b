//! Invariant measures: the adjoint condition on `H`, left invariance of the
//! Haar measure, and the fibration `∫_𝒢 f = ∫_{𝒢/H} ∫_H f(gh) dh dq`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{map_indexed, Exec};
use crate::group_core::{
    adjoint_matrix, haar_integrate_mc, polar_decompose, wrap_angle, ChartBox, HaarChart, McEstimate, PosSym,
    Sl2,
};
use crate::little_groups::{GroupElementParams, LittleGroupSpec};

use super::{section, CosetFrame};

/// `max | |det Ad(ε)| − 1 |` over sampled `ε ∈ H`.
pub fn adjoint_deviation(spec: &LittleGroupSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let p = GroupElementParams::new(rng.gen_range(0.0..TAU), rng.gen_range(0..spec.n() as i64), spec.n());
            (adjoint_matrix(&spec.element(p)).determinant().abs() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Test function on SL(2,R): a Gaussian in the `(a, b, c)` chart centred at
/// the identity, cut off outside `|s| ≤ R`, `|u| ≤ w` in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpFactor {
    pub width: f64,
    pub radius: f64,
    pub angle: f64,
}

impl Default for BumpFactor {
    fn default() -> Self {
        BumpFactor { width: 0.3, radius: 0.6, angle: 0.6 }
    }
}

impl BumpFactor {
    pub fn eval(&self, g: &Sl2) -> f64 {
        let p = polar_decompose(g);
        let (s1, s2) = p.kappa.log();
        let mut u = wrap_angle(p.u);
        if u > PI {
            u -= TAU;
        }
        if s1.hypot(s2) > self.radius || u.abs() > self.angle {
            return 0.0;
        }
        let e = (g.a() - 1.0).powi(2) + g.b().powi(2) + g.c().powi(2);
        (-e / (2.0 * self.width * self.width)).exp()
    }

    /// Chart box containing the support after left translation by `g0⁻¹`.
    pub fn support_box(&self, g0: &Sl2) -> ChartBox {
        let inv = g0.inverse();
        let mut pts = Vec::new();
        for i in 0..=12 {
            for j in 0..=12 {
                for k in 0..=12 {
                    let s1 = self.radius * (i as f64 / 6.0 - 1.0);
                    let s2 = self.radius * (j as f64 / 6.0 - 1.0);
                    if s1.hypot(s2) > self.radius {
                        continue;
                    }
                    let u = self.angle * (k as f64 / 6.0 - 1.0);
                    pts.push(inv * PosSym::from_log(s1, s2).to_sl2() * Sl2::rotation(u));
                }
            }
        }
        ChartBox::bounding(HaarChart::Abc, &pts, 0.05)
    }
}

/// `∫ f(g) dg` and `∫ f(g0 g) dg` for the bump test function.
pub fn haar_invariance_check(g0: &Sl2, samples: usize, seed: u64, exec: Exec) -> (McEstimate, McEstimate) {
    let f = BumpFactor::default();
    let plain = haar_integrate_mc(|g| f.eval(g), &f.support_box(&Sl2::IDENTITY), samples, seed, exec);
    let moved = haar_integrate_mc(|g| f.eval(&(*g0 * *g)), &f.support_box(g0), samples, seed ^ 0x9e37, exec);
    (plain, moved)
}

const TILE: usize = 4096;

fn tiled_mc<F>(samples: usize, seed: u64, scale: f64, exec: Exec, draw: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    let tiles = samples.div_ceil(TILE);
    let m = map_indexed(exec, tiles, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let n = TILE.min(samples - t * TILE);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = draw(&mut rng);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = m.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    McEstimate::from_moments(scale, s, s2, samples)
}

/// Both sides of the fibration identity for `f(g, h) = F(g) F(h)`.
///
/// The left side samples the `(a, b, c)` chart of each factor. The right
/// side samples `(s, s′) ∈ [−R, R]⁴`, `φ ∈ [0, Φ)`, `θ ∈ [0, 2π)` and
/// `i ∈ C_N`, and evaluates `f(s(q)·h(θ, i))`. The torus `(α, β)` is covered
/// `l` times by `(φ, θ, i)`, and `dα dβ = dφ dθ`.
pub fn fibration_check(spec: &LittleGroupSpec, samples: usize, seed: u64, exec: Exec) -> (McEstimate, McEstimate) {
    let f = BumpFactor::default();
    let bx = f.support_box(&Sl2::IDENTITY);
    let chart = bx.chart;
    let lhs = tiled_mc(samples, seed, bx.volume() * bx.volume(), exec, |rng| {
        let mut v = 1.0;
        for _ in 0..2 {
            let x: [f64; 3] = std::array::from_fn(|i| rng.gen_range(bx.lo[i]..bx.hi[i]));
            match chart.element(x) {
                Ok(g) => v *= f.eval(&g) * chart.density(&g).unwrap_or(0.0),
                Err(_) => return 0.0,
            }
        }
        v
    });

    let frame = CosetFrame::new(spec);
    let n = spec.n();
    let l = (frame.period * n as f64 / TAU).round();
    let r = f.radius;
    let scale = (2.0 * r).powi(4) * frame.period * TAU * n as f64 / l;
    let group = spec.group();
    let rhs = tiled_mc(samples, seed ^ 0x5bd1, scale, exec, |rng| {
        let s: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-r..r));
        let phi = rng.gen_range(0.0..frame.period);
        let theta = rng.gen_range(0.0..TAU);
        let i = rng.gen_range(0..n as i64);
        let (k1, k2) = (PosSym::from_log(s[0], s[1]), PosSym::from_log(s[2], s[3]));
        let e = section(&k1, &k2, phi, spec) * group.element(GroupElementParams::new(theta, i, n));
        let w = super::lattice::log_weight(s[0], s[1]) * super::lattice::log_weight(s[2], s[3]);
        f.eval(&e.left) * f.eval(&e.right) * w
    });
    (lhs, rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub adjoint_deviation: f64,
    pub adjoint_samples: usize,
    pub haar: (McEstimate, McEstimate),
    pub haar_z: f64,
    pub fibration: (McEstimate, McEstimate),
    pub fibration_z: f64,
}

pub fn measure_quotient_check(spec: &LittleGroupSpec, samples: usize, mc_samples: usize, seed: u64, exec: Exec) -> MeasureReport {
    let g0 = Sl2::new(1.1, 0.15, -0.05, (1.0 - 0.15 * 0.05) / 1.1).expect("unimodular by construction");
    let haar = haar_invariance_check(&g0, mc_samples, seed, exec);
    let fibration = fibration_check(spec, mc_samples, seed.wrapping_add(1), exec);
    MeasureReport {
        adjoint_deviation: adjoint_deviation(spec, samples, seed),
        adjoint_samples: samples,
        haar_z: haar.0.z_score(&haar.1),
        haar,
        fibration_z: fibration.0.z_score(&fibration.1),
        fibration,
    }
}
