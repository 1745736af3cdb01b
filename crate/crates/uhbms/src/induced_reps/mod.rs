//! Characters of the little groups, the coset space `𝒢/H`, and operators of
//! the induced representations on sections discretized over a truncated
//! orbit lattice.
//!
//! Coset coordinates: every `e = (κ1 R(α), κ2 R(β))` has the H-invariant
//! angle `φ = qs β − ps α`, with `(qs, ps)` the signed slopes of the spec.
//! The section
//! `s(κ1, κ2, φ) = (κ1 R(−ps φ/S), κ2 R(qs φ/S))`, `S = qs² + ps²`, meets
//! each coset, and `s(φ + Φ) = s(φ)·h_Φ` with `Φ = 2π l/N`.

pub mod lattice;
pub mod measure;
pub mod translation;

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_core::{polar_decompose, wrap_angle, G2Element, PosSym, Sl2};
use crate::little_groups::{GroupElementParams, LittleGroupSpec};

pub use lattice::{GaussianBump, GaussianState, LatticeGeometry, SectionLattice};
pub use measure::{measure_quotient_check, MeasureReport};
pub use translation::{apply_translation, translation_phase};

/// The character `(θ, j) ↦ e^{2πiνj/N} e^{inθ}` of `C_N × S¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub nu: u32,
    pub n: i64,
}

impl Character {
    pub fn new(nu: i64, n: i64, group_n: u32) -> Self {
        Character { nu: nu.rem_euclid(group_n as i64) as u32, n }
    }
}

pub fn character_eval(ch: Character, group_n: u32, params: GroupElementParams) -> Complex64 {
    let arg = TAU * (ch.nu as f64) * (params.i() as f64) / group_n as f64 + ch.n as f64 * params.theta;
    Complex64::from_polar(1.0, arg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterCheck {
    /// `max |χ(x1 + x2) − χ(x1) χ(x2)|`.
    pub homomorphism: f64,
    /// `max ||χ(x)| − 1|`.
    pub unitarity: f64,
}

/// Homomorphism and unitarity deviations over random parameter pairs.
pub fn character_homomorphism_check(ch: Character, group_n: u32, samples: usize, seed: u64) -> CharacterCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut hom, mut uni) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let (t1, t2) = (rng.gen_range(-TAU..TAU), rng.gen_range(-TAU..TAU));
        let (j1, j2) = (rng.gen_range(0..group_n as i64), rng.gen_range(0..group_n as i64));
        let a = GroupElementParams::new(t1, j1, group_n);
        let b = GroupElementParams::new(t2, j2, group_n);
        let ab = GroupElementParams::new(t1 + t2, j1 + j2, group_n);
        let (xa, xb) = (character_eval(ch, group_n, a), character_eval(ch, group_n, b));
        hom = hom.max((character_eval(ch, group_n, ab) - xa * xb).norm());
        uni = uni.max((xa.norm() - 1.0).abs());
    }
    CharacterCheck { homomorphism: hom, unitarity: uni }
}

/// Check that `χ` is trivial on the parameters `(θ, i)` that map to the
/// identity of `H`. These are `θ = 2πk/qs` with `ps k/qs + i/N ∈ Z`.
pub fn character_well_defined(ch: Character, spec: &LittleGroupSpec) -> Result<()> {
    let (qs, ps) = spec.slopes();
    let n = spec.n() as i64;
    let m = (qs * n).abs();
    for k in 0..qs.abs() {
        for i in 0..n {
            if (ps * k * n + i * qs).rem_euclid(m) != 0 {
                continue;
            }
            // χ = exp(2πi (ν i/N + n_ch k/qs))
            if (ch.nu as i64 * i * qs + ch.n * k * n).rem_euclid(m) != 0 {
                return Err(Error::CharacterNotWellDefined { nu: ch.nu, n: ch.n });
            }
        }
    }
    Ok(())
}

/// `χ(e)` for a group element of `H`, if `e` lies in `H`.
pub fn character_on_element(ch: Character, spec: &LittleGroupSpec, e: &G2Element) -> Option<Complex64> {
    let p = spec.group().parameters_of(e, 1e-9)?;
    Some(character_eval(ch, spec.n(), p))
}

/// All characters `(ν, n)` with `ν < N` and `n` in the window.
pub fn character_table(group_n: u32, n_window: std::ops::RangeInclusive<i64>) -> Vec<Character> {
    (0..group_n as i64)
        .flat_map(|nu| n_window.clone().map(move |n| Character::new(nu, n, group_n)))
        .collect()
}

/// Smallest pairwise gap between the characters evaluated at one element.
pub fn min_separation(chars: &[Character], group_n: u32, at: GroupElementParams) -> f64 {
    let v: Vec<_> = chars.iter().map(|c| character_eval(*c, group_n, at)).collect();
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.min((v[i] - v[j]).norm());
        }
    }
    best
}

/// A point of `𝒢/H`: two positive parts and the invariant angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub kappa1: PosSym,
    pub kappa2: PosSym,
    /// In `[0, Φ)`.
    pub phi: f64,
}

/// Geometry of the coset fibre for a spec.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetFrame {
    pub qs: i64,
    pub ps: i64,
    /// `qs² + ps²`.
    pub s: f64,
    /// Period `2π l/N` of `φ` on `𝒢/H`.
    pub period: f64,
}

impl CosetFrame {
    pub fn new(spec: &LittleGroupSpec) -> Self {
        let (qs, ps) = spec.slopes();
        let l = (qs.unsigned_abs() as u32).gcd(&spec.n());
        CosetFrame { qs, ps, s: (qs * qs + ps * ps) as f64, period: TAU * l as f64 / spec.n() as f64 }
    }

    /// `(α, β) = (−ps φ/S, qs φ/S)`.
    pub fn section_angles(&self, phi: f64) -> (f64, f64) {
        (-(self.ps as f64) * phi / self.s, self.qs as f64 * phi / self.s)
    }

    /// Split angle increments `(δ1, δ2)` into the orbit parameter
    /// `θ = (qs δ1 + ps δ2)/S` and the fibre shift `c = qs δ2 − ps δ1`.
    pub fn split(&self, d1: f64, d2: f64) -> (f64, f64) {
        let (q, p) = (self.qs as f64, self.ps as f64);
        ((q * d1 + p * d2) / self.s, q * d2 - p * d1)
    }
}

pub fn coset_project(e: &G2Element, spec: &LittleGroupSpec) -> OrbitPoint {
    let f = CosetFrame::new(spec);
    let (a, b) = (polar_decompose(&e.left), polar_decompose(&e.right));
    let phi = (f.qs as f64 * b.u - f.ps as f64 * a.u).rem_euclid(f.period);
    // Values within rounding of the period belong at 0.
    let phi = if f.period - phi < 1e-12 { 0.0 } else { phi };
    OrbitPoint { kappa1: a.kappa, kappa2: b.kappa, phi }
}

/// Section representative `s(κ1, κ2, φ)`; `φ` may be any real.
pub fn section(kappa1: &PosSym, kappa2: &PosSym, phi: f64, spec: &LittleGroupSpec) -> G2Element {
    let (a, b) = CosetFrame::new(spec).section_angles(phi);
    G2Element::new(kappa1.to_sl2() * Sl2::rotation(a), kappa2.to_sl2() * Sl2::rotation(b))
}

/// `h_Φ ∈ H` with `s(φ + Φ) = s(φ)·h_Φ`.
pub fn period_holonomy(spec: &LittleGroupSpec) -> GroupElementParams {
    let f = CosetFrame::new(spec);
    let (a, b) = f.section_angles(f.period);
    spec.group()
        .parameters_of(&G2Element::rotations(a, b), 1e-9)
        .expect("the fibre period is an element of H")
}

/// Distance between orbit points, comparing `φ` on the circle of length `Φ`.
pub fn orbit_distance(x: &OrbitPoint, y: &OrbitPoint, period: f64) -> f64 {
    let d = (x.phi - y.phi).rem_euclid(period);
    let dk = |a: &PosSym, b: &PosSym| (a.p - b.p).abs() + (a.q - b.q).abs() + (a.t - b.t).abs();
    dk(&x.kappa1, &y.kappa1) + dk(&x.kappa2, &y.kappa2) + d.min(period - d)
}

/// Polar split of `g⁻¹ κ`: the new positive part and the angle, wrapped to
/// `(−π, π]`.
pub(crate) fn pull_back(g_inv: &Sl2, kappa: &PosSym) -> (PosSym, f64) {
    let p = polar_decompose(&(*g_inv * kappa.to_sl2()));
    let mut d = wrap_angle(p.u);
    if d > std::f64::consts::PI {
        d -= TAU;
    }
    (p.kappa, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::little_groups::OrientationCase;
    use approx::assert_abs_diff_eq;

    #[test]
    fn character_examples() {
        let p0 = GroupElementParams::new(0.0, 0, 3);
        assert_abs_diff_eq!((character_eval(Character::new(2, 5, 3), 3, p0) - 1.0).norm(), 0.0, epsilon = 1e-15);
        let p = GroupElementParams::new(0.0, 1, 3);
        let z = character_eval(Character::new(1, 0, 3), 3, p);
        assert_abs_diff_eq!((z - Complex64::from_polar(1.0, TAU / 3.0)).norm(), 0.0, epsilon = 1e-15);
        let p = GroupElementParams::new(0.9, 2, 5);
        let z = character_eval(Character::new(0, 3, 5), 5, p);
        assert_abs_diff_eq!((z - Complex64::from_polar(1.0, 2.7)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn homomorphism_and_unitarity() {
        let c = character_homomorphism_check(Character::new(0, 1, 1), 1, 10_000, 3);
        assert!(c.homomorphism <= 1e-14 && c.unitarity <= 1e-15, "{c:?}");
        let c = character_homomorphism_check(Character::new(4, -7, 9), 9, 2000, 4);
        assert!(c.homomorphism <= 1e-12, "{c:?}");
    }

    #[test]
    fn well_definedness_kernel() {
        let spec = LittleGroupSpec::new(3, 3, 5, OrientationCase::One).unwrap();
        assert!(character_well_defined(Character::new(1, 2, 3), &spec).is_ok());
        assert!(character_well_defined(Character::new(0, 0, 3), &spec).is_ok());
        assert!(matches!(
            character_well_defined(Character::new(1, 0, 3), &spec),
            Err(Error::CharacterNotWellDefined { .. })
        ));
        let coprime = LittleGroupSpec::new(5, 1, 3, OrientationCase::One).unwrap();
        for ch in character_table(5, -3..=3) {
            assert!(character_well_defined(ch, &coprime).is_ok());
        }
    }

    #[test]
    fn well_defined_characters_are_homomorphisms_on_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for case in OrientationCase::ALL {
            let spec = LittleGroupSpec::new(3, 3, 5, case).unwrap();
            for ch in character_table(3, -4..=4) {
                if character_well_defined(ch, &spec).is_err() {
                    continue;
                }
                for _ in 0..20 {
                    let a = spec.element(GroupElementParams::new(rng.gen_range(0.0..TAU), rng.gen_range(0..3), 3));
                    let b = spec.element(GroupElementParams::new(rng.gen_range(0.0..TAU), rng.gen_range(0..3), 3));
                    let x = character_on_element(ch, &spec, &a).unwrap() * character_on_element(ch, &spec, &b).unwrap();
                    let y = character_on_element(ch, &spec, &(a * b)).unwrap();
                    assert!((x - y).norm() < 1e-8, "{spec} {ch:?}");
                }
            }
        }
    }

    #[test]
    fn characters_are_distinguishable() {
        let chars = character_table(5, -3..=3);
        assert_eq!(chars.len(), 5 * 7);
        assert!(min_separation(&chars, 5, GroupElementParams::new(0.7, 1, 5)) > 1e-3);
    }

    #[test]
    fn coset_projection_examples() {
        let spec = LittleGroupSpec::new(1, 1, 1, OrientationCase::One).unwrap();
        let o = coset_project(&G2Element::IDENTITY, &spec);
        assert_eq!(o.phi, 0.0);
        assert_abs_diff_eq!(o.kappa1.p, 1.0, epsilon = 1e-15);
        let e = G2Element::new(Sl2::rotation(0.4), Sl2::IDENTITY);
        assert_abs_diff_eq!(coset_project(&e, &spec).phi, TAU - 0.4, epsilon = 1e-12);
    }

    #[test]
    fn projection_is_constant_on_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (n, q0, p0) in [(1, 1, 1), (3, 1, 3), (9, 3, 5)] {
            for case in OrientationCase::ALL {
                let spec = LittleGroupSpec::new(n, q0, p0, case).unwrap();
                let period = CosetFrame::new(&spec).period;
                for _ in 0..50 {
                    let e = G2Element::random(&mut rng, 1.5);
                    let h = spec.element(GroupElementParams::new(rng.gen_range(0.0..TAU), rng.gen_range(0..n as i64), n));
                    let (x, y) = (coset_project(&e, &spec), coset_project(&(e * h), &spec));
                    assert!(orbit_distance(&x, &y, period) < 1e-10, "{spec}");
                    let hid = coset_project(&h, &spec);
                    assert!(orbit_distance(&hid, &coset_project(&G2Element::IDENTITY, &spec), period) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn section_is_a_right_inverse_and_quasi_periodic() {
        let spec = LittleGroupSpec::new(9, 3, 5, OrientationCase::Four).unwrap();
        let f = CosetFrame::new(&spec);
        let (k1, k2) = (PosSym::from_log(0.3, -0.2), PosSym::from_log(-0.5, 0.1));
        for i in 0..20 {
            let phi = -3.0 + 0.37 * i as f64;
            let o = coset_project(&section(&k1, &k2, phi, &spec), &spec);
            let expect = OrbitPoint { kappa1: k1, kappa2: k2, phi: phi.rem_euclid(f.period) };
            assert!(orbit_distance(&o, &expect, f.period) < 1e-10);
        }
        let hp = spec.element(period_holonomy(&spec));
        let a = section(&k1, &k2, 0.2 + f.period, &spec);
        let b = section(&k1, &k2, 0.2, &spec) * hp;
        assert!(a.distance(&b) < 1e-10);
    }
}
