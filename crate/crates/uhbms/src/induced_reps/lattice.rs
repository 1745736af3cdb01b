//! Sections `Ψ(κ1, κ2, φ) = ψ(s(κ1, κ2, φ))` on a truncated lattice.
//!
//! Each positive part is sampled on an `n × n` grid of its log coordinates
//! `(s1, s2) ∈ [−R, R]²`. In `φ` a section is quasi-periodic,
//! `Ψ(φ + Φ) = χ(h_Φ)⁻¹ Ψ(φ)`, so it is stored as `e^{iλφ} Σ P_m e^{2πi m φ/Φ}`
//! with `e^{iλΦ} = χ(h_Φ)⁻¹` and `M` modes in FFT order. The invariant
//! measure is `w(s) w(s′) ds ds′ dφ` with `w(s) = sinh(2|s|)/|s|`.
//!
//! `U(g, h)` factors into a stage acting on `κ1` and one acting on `κ2`.
//! Each stage moves the positive part (bicubic interpolation) and multiplies
//! each mode by a phase; the fibre shift is exact in the mode basis.

use std::f64::consts::TAU;

use num_complex::{Complex32, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{for_each_chunk_mut, map_indexed, sum_indexed, Exec};
use crate::group_core::{G2Element, PosSym, Sl2};
use crate::little_groups::LittleGroupSpec;

use super::{character_eval, character_well_defined, period_holonomy, pull_back, Character, CosetFrame};

/// Grid shape of the truncated orbit lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    /// Nodes per log coordinate.
    pub n: usize,
    /// Half-width `R` of the log-coordinate box.
    pub radius: f64,
    /// Fourier modes in `φ`.
    pub modes: usize,
}

impl LatticeGeometry {
    pub fn new(n: usize, radius: f64, modes: usize) -> Self {
        assert!(n >= 4 && modes >= 1 && radius > 0.0, "degenerate lattice");
        LatticeGeometry { n, radius, modes }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.n - 1) as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.spacing()
    }

    /// Nodes of one positive-part plane.
    pub fn plane(&self) -> usize {
        self.n * self.n
    }

    pub fn log_coords(&self, x: usize) -> (f64, f64) {
        (self.coord(x / self.n), self.coord(x % self.n))
    }

    /// Total complex values stored.
    pub fn len(&self) -> usize {
        self.plane() * self.plane() * self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Signed frequency of storage slot `m`.
    pub fn frequency(&self, m: usize) -> i64 {
        if m < self.modes.div_ceil(2) {
            m as i64
        } else {
            m as i64 - self.modes as i64
        }
    }

    /// Nodes within `ring` of the edge in either coordinate.
    fn on_rim(&self, x: usize, ring: usize) -> bool {
        let (i, j) = (x / self.n, x % self.n);
        i < ring || j < ring || i + ring >= self.n || j + ring >= self.n
    }
}

/// Invariant density of one positive part in log coordinates.
pub fn log_weight(s1: f64, s2: f64) -> f64 {
    let r = s1.hypot(s2);
    if r < 1e-8 {
        2.0
    } else {
        (2.0 * r).sinh() / r
    }
}

/// `Σ_m coef_m e^{2πi m φ/Φ} · exp(−|s − c1|²/2w²) exp(−|s′ − c2|²/2w²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub c1: [f64; 2],
    pub c2: [f64; 2],
    pub width: f64,
    /// `(frequency, coefficient)`.
    pub modes: Vec<(i64, Complex64)>,
}

/// A test section given in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub bumps: Vec<GaussianBump>,
}

impl GaussianState {
    /// Two bumps near the origin with a few low modes.
    pub fn reference() -> Self {
        let c = Complex64::new;
        GaussianState {
            bumps: vec![
                GaussianBump {
                    c1: [0.1, -0.05],
                    c2: [-0.1, 0.05],
                    width: 0.45,
                    modes: vec![(0, c(1.0, 0.0)), (1, c(0.3, -0.2)), (-2, c(0.0, 0.15))],
                },
                GaussianBump {
                    c1: [-0.15, 0.1],
                    c2: [0.1, 0.1],
                    width: 0.4,
                    modes: vec![(0, c(0.0, 0.4)), (-1, c(0.25, 0.1))],
                },
            ],
        }
    }

    fn max_frequency(&self) -> i64 {
        self.bumps.iter().flat_map(|b| b.modes.iter().map(|m| m.0.abs())).max().unwrap_or(0)
    }

    /// Mode coefficients at `(s, s′)`, accumulated into storage order.
    pub fn coefficients(&self, s: (f64, f64), t: (f64, f64), out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        let m = out.len() as i64;
        for b in &self.bumps {
            let d1 = (s.0 - b.c1[0]).powi(2) + (s.1 - b.c1[1]).powi(2);
            let d2 = (t.0 - b.c2[0]).powi(2) + (t.1 - b.c2[1]).powi(2);
            let g = (-(d1 + d2) / (2.0 * b.width * b.width)).exp();
            for &(f, c) in &b.modes {
                out[f.rem_euclid(m) as usize] += c * g;
            }
        }
    }
}

/// A section of the induced bundle for `(spec, χ)` on a lattice.
#[derive(Clone, Debug)]
pub struct SectionLattice {
    pub geom: LatticeGeometry,
    pub spec: LittleGroupSpec,
    pub ch: Character,
    frame: CosetFrame,
    lambda: f64,
    /// Layout `[κ1 node][κ2 node][mode]`.
    pub data: Vec<Complex32>,
}

/// One precomputed stage: for each target node, 16 source taps, their
/// weights, and a phase per mode.
struct StageTable {
    taps: Vec<[(u32, f32); 16]>,
    phases: Vec<Complex32>,
    lost: usize,
}

fn catmull_rom(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Interpolation taps at continuous grid position `(x, y)`; taps outside
/// the grid read zero. `None` when the position leaves the grid.
fn taps_at(n: usize, x: f64, y: f64) -> Option<[(u32, f32); 16]> {
    let top = (n - 1) as f64;
    if !(0.0..=top).contains(&x) || !(0.0..=top).contains(&y) {
        return None;
    }
    let (ix, iy) = ((x.floor() as usize).min(n - 2), (y.floor() as usize).min(n - 2));
    let (wx, wy) = (catmull_rom(x - ix as f64), catmull_rom(y - iy as f64));
    let mut out = [(0u32, 0.0f32); 16];
    for a in 0..4 {
        for b in 0..4 {
            let (i, j) = (ix as isize + a as isize - 1, iy as isize + b as isize - 1);
            if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                continue;
            }
            out[4 * a + b] = ((i as usize * n + j as usize) as u32, (wx[a] * wy[b]) as f32);
        }
    }
    Some(out)
}

/// Radon–Nikodym factor of the orbit measure under `g0`. The measure is
/// invariant, so this is identically one.
pub fn radon_nikodym(_g0: &G2Element, _s: (f64, f64), _t: (f64, f64)) -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl SectionLattice {
    /// Sample a closed-form state. Fails when `ch` is not a character of `H`.
    pub fn from_state(
        geom: LatticeGeometry,
        spec: &LittleGroupSpec,
        ch: Character,
        state: &GaussianState,
        exec: Exec,
    ) -> Result<Self> {
        character_well_defined(ch, spec)?;
        let frame = CosetFrame::new(spec);
        let chi = character_eval(ch, spec.n(), period_holonomy(spec));
        let lambda = -chi.arg() / frame.period;
        assert!(
            (state.max_frequency() as usize) < geom.modes.div_ceil(2),
            "state frequencies exceed the lattice modes"
        );
        let mut data = vec![Complex32::new(0.0, 0.0); geom.len()];
        let plane = geom.plane();
        for_each_chunk_mut(exec, &mut data, plane * geom.modes, |a, chunk| {
            let mut buf = vec![Complex64::new(0.0, 0.0); geom.modes];
            let s = geom.log_coords(a);
            for b in 0..plane {
                state.coefficients(s, geom.log_coords(b), &mut buf);
                for (dst, src) in chunk[b * geom.modes..(b + 1) * geom.modes].iter_mut().zip(&buf) {
                    *dst = Complex32::new(src.re as f32, src.im as f32);
                }
            }
        });
        Ok(SectionLattice { geom, spec: *spec, ch, frame, lambda, data })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn period(&self) -> f64 {
        self.frame.period
    }

    pub fn frame(&self) -> &CosetFrame {
        &self.frame
    }

    /// Wavenumber `k_m = λ + 2π m/Φ` of storage slot `m`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        self.lambda + TAU * self.geom.frequency(m) as f64 / self.frame.period
    }

    /// Value `Ψ(κ1, κ2, φ)` at lattice nodes `(a, b)`.
    pub fn value(&self, a: usize, b: usize, phi: f64) -> Complex64 {
        let m = self.geom.modes;
        let base = (a * self.geom.plane() + b) * m;
        (0..m)
            .map(|k| {
                let z = self.data[base + k];
                Complex64::new(z.re as f64, z.im as f64) * Complex64::from_polar(1.0, self.wavenumber(k) * phi)
            })
            .sum()
    }

    /// Mode phase of the stage for the angle increment `δ`.
    fn stage_phase(&self, side: Side, delta: f64, m: usize) -> Complex32 {
        let (q, p, s) = (self.frame.qs as f64, self.frame.ps as f64, self.frame.s);
        let n = self.ch.n as f64;
        let k = self.wavenumber(m);
        // e^{−inθ} with θ = (q δ1 + p δ2)/S, and e^{ik c} with c = q δ2 − p δ1.
        let arg = match side {
            Side::Left => -n * q * delta / s - k * p * delta,
            Side::Right => -n * p * delta / s + k * q * delta,
        };
        let (si, co) = arg.sin_cos();
        Complex32::new(co as f32, si as f32)
    }

    fn stage_table(&self, side: Side, g: &Sl2) -> StageTable {
        let geom = self.geom;
        let g_inv = g.inverse();
        let h = geom.spacing();
        let mut taps = Vec::with_capacity(geom.plane());
        let mut phases = Vec::with_capacity(geom.plane() * geom.modes);
        let mut lost = 0;
        for x in 0..geom.plane() {
            let (s1, s2) = geom.log_coords(x);
            let (kappa, delta) = pull_back(&g_inv, &PosSym::from_log(s1, s2));
            let (t1, t2) = kappa.log();
            let t = taps_at(geom.n, (t1 + geom.radius) / h, (t2 + geom.radius) / h);
            if t.is_none() {
                lost += 1;
            }
            taps.push(t.unwrap_or([(0, 0.0); 16]));
            phases.extend((0..geom.modes).map(|m| self.stage_phase(side, delta, m)));
        }
        StageTable { taps, phases, lost }
    }

    fn apply_plane(table: &StageTable, modes: usize, input: &[Complex32], output: &mut [Complex32]) {
        for (x, out) in output.chunks_mut(modes).enumerate() {
            out.iter_mut().for_each(|z| *z = Complex32::new(0.0, 0.0));
            for &(src, w) in &table.taps[x] {
                if w == 0.0 {
                    continue;
                }
                let row = &input[src as usize * modes..(src as usize + 1) * modes];
                for (o, v) in out.iter_mut().zip(row) {
                    *o += v * w;
                }
            }
            for (o, p) in out.iter_mut().zip(&table.phases[x * modes..(x + 1) * modes]) {
                *o *= p;
            }
        }
    }

    /// `(U(g0)Ψ)(q) = √(dμ_{g0}/dμ) Ψ(g0⁻¹ q)` in place. Returns the number of
    /// positive-part nodes whose pull-back left the box (per stage).
    pub fn apply_group(&mut self, g0: &G2Element, exec: Exec) -> (usize, usize) {
        debug_assert_eq!(radon_nikodym(g0, (0.0, 0.0), (0.0, 0.0)), 1.0);
        let geom = self.geom;
        let (plane, modes) = (geom.plane(), geom.modes);

        // κ2 stage: each κ1 block `[b][m]` is contiguous.
        let right = self.stage_table(Side::Right, &g0.right);
        for_each_chunk_mut(exec, &mut self.data, plane * modes, |_, block| {
            let input = block.to_vec();
            Self::apply_plane(&right, modes, &input, block);
        });

        // κ1 stage: gather the strided plane of each κ2 node, in batches.
        let left = self.stage_table(Side::Left, &g0.left);
        let batch = geom.n;
        for start in (0..plane).step_by(batch) {
            let end = (start + batch).min(plane);
            let data = &self.data;
            let planes = map_indexed(exec, end - start, |k| {
                let b = start + k;
                let mut input = Vec::with_capacity(plane * modes);
                for a in 0..plane {
                    let off = (a * plane + b) * modes;
                    input.extend_from_slice(&data[off..off + modes]);
                }
                let mut out = vec![Complex32::new(0.0, 0.0); plane * modes];
                Self::apply_plane(&left, modes, &input, &mut out);
                out
            });
            for (k, out) in planes.into_iter().enumerate() {
                let b = start + k;
                for a in 0..plane {
                    let off = (a * plane + b) * modes;
                    self.data[off..off + modes].copy_from_slice(&out[a * modes..(a + 1) * modes]);
                }
            }
        }
        (left.lost, right.lost)
    }

    fn node_weight(&self, a: usize, b: usize) -> f64 {
        let (s, t) = (self.geom.log_coords(a), self.geom.log_coords(b));
        let h2 = self.geom.spacing().powi(2);
        log_weight(s.0, s.1) * log_weight(t.0, t.1) * h2 * h2 * self.frame.period
    }

    fn weighted_sum<F>(&self, exec: Exec, f: F) -> f64
    where
        F: Fn(usize, usize, &[Complex32]) -> f64 + Sync,
    {
        let (plane, modes) = (self.geom.plane(), self.geom.modes);
        sum_indexed(exec, plane * plane, |k| {
            let (a, b) = (k / plane, k % plane);
            self.node_weight(a, b) * f(a, b, &self.data[k * modes..(k + 1) * modes])
        })
    }

    /// `‖Ψ‖²` for the invariant measure (Parseval in `φ`).
    pub fn norm_sq(&self, exec: Exec) -> f64 {
        self.weighted_sum(exec, |_, _, v| v.iter().map(|z| z.norm_sqr() as f64).sum())
    }

    /// `⟨Ψ, Ψ′⟩`; both sections must share lattice, spec and character.
    pub fn inner(&self, other: &SectionLattice, exec: Exec) -> Complex64 {
        assert_eq!(self.geom, other.geom);
        let (plane, modes) = (self.geom.plane(), self.geom.modes);
        let part = |im: bool| {
            sum_indexed(exec, plane * plane, |k| {
                let w = self.node_weight(k / plane, k % plane);
                let r = k * modes..(k + 1) * modes;
                let z: Complex64 = self.data[r.clone()]
                    .iter()
                    .zip(&other.data[r])
                    .map(|(x, y)| {
                        let p = x.conj() * y;
                        Complex64::new(p.re as f64, p.im as f64)
                    })
                    .sum();
                w * if im { z.im } else { z.re }
            })
        };
        Complex64::new(part(false), part(true))
    }

    /// Share of `‖Ψ‖²` on nodes within `ring` of the box edge.
    pub fn boundary_mass(&self, ring: usize, exec: Exec) -> f64 {
        let total = self.norm_sq(exec);
        let rim = self.weighted_sum(exec, |a, b, v| {
            if self.geom.on_rim(a, ring) || self.geom.on_rim(b, ring) {
                v.iter().map(|z| z.norm_sqr() as f64).sum()
            } else {
                0.0
            }
        });
        if total == 0.0 {
            0.0
        } else {
            rim / total
        }
    }

    /// Closed-form coefficients of `U(g0)Ψ0` at nodes `(a, b)`.
    pub fn exact_coefficients(&self, state: &GaussianState, g0: &G2Element, a: usize, b: usize, out: &mut [Complex64]) {
        let (s, t) = (self.geom.log_coords(a), self.geom.log_coords(b));
        let (k1, d1) = pull_back(&g0.left.inverse(), &PosSym::from_log(s.0, s.1));
        let (k2, d2) = pull_back(&g0.right.inverse(), &PosSym::from_log(t.0, t.1));
        state.coefficients(k1.log(), k2.log(), out);
        let (theta, c) = self.frame.split(d1, d2);
        let n = self.ch.n as f64;
        for (m, z) in out.iter_mut().enumerate() {
            *z *= Complex64::from_polar(1.0, -n * theta + self.wavenumber(m) * c);
        }
    }

    /// Relative weighted `L²` distance between the lattice and `U(g0)Ψ0`.
    pub fn relative_error(&self, state: &GaussianState, g0: &G2Element, exec: Exec) -> f64 {
        let modes = self.geom.modes;
        let acc = |diff: bool| {
            self.weighted_sum(exec, |a, b, v| {
                let mut buf = vec![Complex64::new(0.0, 0.0); modes];
                self.exact_coefficients(state, g0, a, b, &mut buf);
                buf.iter()
                    .zip(v)
                    .map(|(e, z)| if diff { (e - Complex64::new(z.re as f64, z.im as f64)).norm_sqr() } else { e.norm_sqr() })
                    .sum()
            })
        };
        (acc(true) / acc(false)).sqrt()
    }
}

/// Outcome of the lattice verification of the induced group action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedReport {
    pub geometry: LatticeGeometry,
    /// `|‖U(g2)Ψ‖ − ‖Ψ‖|/‖Ψ‖`.
    pub norm_deviation: f64,
    /// Boundary share of `‖Ψ‖²` before and after the action.
    pub boundary_mass: f64,
    /// Relative distance of `U(g2)Ψ` from its closed form.
    pub single_error: f64,
    /// Relative distance of `U(g1)U(g2)Ψ` from the closed form of `U(g1 g2)Ψ`.
    pub composition_error: f64,
    pub lost_nodes: usize,
}

/// Apply `g2` then `g1` to the sampled reference state and compare with the
/// closed forms. Holds one lattice in memory.
pub fn verify_group_action(
    geom: LatticeGeometry,
    spec: &LittleGroupSpec,
    ch: Character,
    g1: &G2Element,
    g2: &G2Element,
    exec: Exec,
) -> Result<InducedReport> {
    let state = GaussianState::reference();
    let mut psi = SectionLattice::from_state(geom, spec, ch, &state, exec)?;
    let n0 = psi.norm_sq(exec).sqrt();
    let b0 = psi.boundary_mass(2, exec);
    let (l1, r1) = psi.apply_group(g2, exec);
    let n1 = psi.norm_sq(exec).sqrt();
    let b1 = psi.boundary_mass(2, exec);
    let single_error = psi.relative_error(&state, g2, exec);
    let (l2, r2) = psi.apply_group(g1, exec);
    let composition_error = psi.relative_error(&state, &(*g1 * *g2), exec);
    Ok(InducedReport {
        geometry: geom,
        norm_deviation: (n1 - n0).abs() / n0,
        boundary_mass: b0.max(b1),
        single_error,
        composition_error,
        lost_nodes: l1 + r1 + l2 + r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::little_groups::{GroupElementParams, OrientationCase};
    use approx::assert_abs_diff_eq;

    fn small() -> LatticeGeometry {
        LatticeGeometry::new(21, 2.5, 8)
    }

    fn spec111() -> LittleGroupSpec {
        LittleGroupSpec::new(1, 1, 1, OrientationCase::One).unwrap()
    }

    #[test]
    fn catmull_rom_partition_of_unity() {
        for i in 0..10 {
            let w = catmull_rom(i as f64 / 10.0);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
        assert_eq!(catmull_rom(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_leaves_the_section_unchanged() {
        let st = GaussianState::reference();
        let mut psi = SectionLattice::from_state(small(), &spec111(), Character::new(0, 1, 1), &st, Exec::default()).unwrap();
        let before = psi.data.clone();
        psi.apply_group(&G2Element::IDENTITY, Exec::default());
        let diff = psi.data.iter().zip(&before).map(|(a, b)| (a - b).norm()).fold(0.0f32, f32::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn element_of_h_multiplies_the_base_value_by_the_character() {
        let spec = LittleGroupSpec::new(3, 1, 3, OrientationCase::One).unwrap();
        let ch = Character::new(1, 2, 3);
        let st = GaussianState::reference();
        let geom = LatticeGeometry::new(21, 2.5, 8);
        let mut psi = SectionLattice::from_state(geom, &spec, ch, &st, Exec::default()).unwrap();
        let params = GroupElementParams::new(0.7, 1, 3);
        let h = spec.element(params);
        let centre = geom.plane() / 2;
        let before = psi.value(centre, centre, 0.0);
        psi.apply_group(&h, Exec::default());
        let after = psi.value(centre, centre, 0.0);
        let chi = character_eval(ch, 3, params);
        assert!((after - chi * before).norm() < 1e-5 * before.norm(), "{after} vs {}", chi * before);
    }

    #[test]
    fn quasi_periodic_in_phi() {
        let spec = LittleGroupSpec::new(3, 1, 3, OrientationCase::Two).unwrap();
        let ch = Character::new(2, -1, 3);
        let psi = SectionLattice::from_state(small(), &spec, ch, &GaussianState::reference(), Exec::default()).unwrap();
        let chi = character_eval(ch, 3, period_holonomy(&spec));
        let (a, b) = (200, 210);
        let v = psi.value(a, b, 0.3);
        let w = psi.value(a, b, 0.3 + psi.period());
        assert!((w - v / chi).norm() < 1e-9 * v.norm().max(1e-30));
    }

    #[test]
    fn ill_defined_character_is_rejected() {
        let spec = LittleGroupSpec::new(3, 3, 5, OrientationCase::One).unwrap();
        let r = SectionLattice::from_state(small(), &spec, Character::new(1, 0, 3), &GaussianState::reference(), Exec::default());
        assert!(r.is_err());
    }

    #[test]
    fn small_lattice_norm_and_group_law() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g1 = G2Element::random(&mut rng, 1.2);
        let g2 = G2Element::random(&mut rng, 1.2);
        let near = |g: G2Element| {
            // Keep the shifts of the positive parts moderate.
            let p = (g.left.polar().kappa, g.right.polar().kappa);
            let s = |k: PosSym| {
                let (a, b) = k.log();
                let f = 0.3 / a.hypot(b).max(0.3);
                PosSym::from_log(a * f, b * f).to_sl2()
            };
            G2Element::new(s(p.0) * Sl2::rotation(g.left.polar().u), s(p.1) * Sl2::rotation(g.right.polar().u))
        };
        let (g1, g2) = (near(g1), near(g2));
        let geom = LatticeGeometry::new(25, 2.5, 8);
        let rep = verify_group_action(geom, &spec111(), Character::new(0, 1, 1), &g1, &g2, Exec::default()).unwrap();
        assert!(rep.norm_deviation < 0.02, "{rep:?}");
        assert!(rep.boundary_mass < 0.005, "{rep:?}");
        assert!(rep.composition_error < 0.05, "{rep:?}");
    }

    #[test]
    fn inner_product_matches_norm() {
        let psi = SectionLattice::from_state(small(), &spec111(), Character::new(0, 1, 1), &GaussianState::reference(), Exec::default()).unwrap();
        let z = psi.inner(&psi, Exec::default());
        assert_abs_diff_eq!(z.re, psi.norm_sq(Exec::default()), epsilon = 1e-9 * z.re);
        assert!(z.im.abs() < 1e-9 * z.re);
    }

    #[test]
    fn policies_agree_bitwise() {
        use crate::group_core::Sl2;
        let st = GaussianState::reference();
        let g = G2Element::new(Sl2::new(1.1, 0.2, 0.1, (1.0 + 0.02) / 1.1).unwrap(), Sl2::rotation(0.3));
        let mut a = SectionLattice::from_state(small(), &spec111(), Character::new(0, 2, 1), &st, Exec::Sequential).unwrap();
        let mut b = a.clone();
        a.apply_group(&g, Exec::Sequential);
        b.apply_group(&g, Exec::default());
        assert_eq!(a.data, b.data);
        assert_eq!(a.norm_sq(Exec::Sequential), b.norm_sq(Exec::default()));
    }
}
