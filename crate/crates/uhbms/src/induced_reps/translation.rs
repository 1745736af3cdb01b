//! The abelian part: `(U(α)Ψ)(q) = e^{i⟨q, α⟩} Ψ(q)`, where the orbit point
//! `q = gH` acts as the functional `T′(g)φₒ` paired with `α` in `L²(dρ dσ)`.

use num_complex::{Complex32, Complex64};
use rustfft::FftPlanner;

use crate::exec::{for_each_chunk_mut, Exec};
use crate::group_core::{G2Element, PosSym};
use crate::torus_action::{dual_action, l2_inner, primal_action, TorusFunction, TorusGrid};

use super::{section, SectionLattice};

/// `⟨T′(g)φₒ, α⟩` by midpoint quadrature.
pub fn translation_phase<A, P>(g: &G2Element, alpha: &A, base_phi: &P, grid: TorusGrid, exec: Exec) -> f64
where
    A: TorusFunction + ?Sized,
    P: TorusFunction + ?Sized,
{
    l2_inner(&dual_action(*g, base_phi), alpha, grid, exec)
}

/// Multiply a lattice section by `e^{i⟨q, α⟩}`. The phase is `Φ`-periodic
/// in `φ`, so it acts on the periodic factor by sampling at the `M` nodes
/// `φ_j = jΦ/M`; the map is exactly unitary on the lattice.
pub fn apply_translation<A, P>(psi: &mut SectionLattice, alpha: &A, base_phi: &P, grid: TorusGrid, exec: Exec)
where
    A: TorusFunction + ?Sized,
    P: TorusFunction + ?Sized,
{
    let geom = psi.geom;
    let (plane, modes) = (geom.plane(), geom.modes);
    let spec = psi.spec;
    let period = psi.period();
    let mut planner = FftPlanner::<f32>::new();
    let (fwd, inv) = (planner.plan_fft_forward(modes), planner.plan_fft_inverse(modes));
    let scale = 1.0 / modes as f32;
    for_each_chunk_mut(exec, &mut psi.data, modes, |k, chunk| {
        let (a, b) = (k / plane, k % plane);
        let (s, t) = (geom.log_coords(a), geom.log_coords(b));
        let (k1, k2) = (PosSym::from_log(s.0, s.1), PosSym::from_log(t.0, t.1));
        inv.process(chunk);
        for (j, z) in chunk.iter_mut().enumerate() {
            let g = section(&k1, &k2, j as f64 * period / modes as f64, &spec);
            let p = translation_phase(&g, alpha, base_phi, grid, Exec::Sequential);
            let (si, co) = p.sin_cos();
            *z *= Complex32::new(co as f32, si as f32) * scale;
        }
        fwd.process(chunk);
    });
}

/// `|⟨T′(q)φₒ, T(g0)α⟩ − ⟨T′(g0⁻¹q)φₒ, α⟩|`: translating by `α` and then
/// acting with `g0` equals acting first and translating by `T(g0)α`.
pub fn semidirect_defect<A, P>(g0: &G2Element, q: &G2Element, alpha: &A, base_phi: &P, grid: TorusGrid, exec: Exec) -> f64
where
    A: TorusFunction + ?Sized,
    P: TorusFunction + ?Sized,
{
    let moved = primal_action(*g0, alpha);
    let lhs = translation_phase(q, &moved, base_phi, grid, exec);
    let rhs = translation_phase(&(g0.inverse() * *q), alpha, base_phi, grid, exec);
    (lhs - rhs).abs()
}

/// `e^{i⟨q, α⟩}` as a unit complex number.
pub fn translation_multiplier<A, P>(g: &G2Element, alpha: &A, base_phi: &P, grid: TorusGrid, exec: Exec) -> Complex64
where
    A: TorusFunction + ?Sized,
    P: TorusFunction + ?Sized,
{
    Complex64::from_polar(1.0, translation_phase(g, alpha, base_phi, grid, exec))
}
