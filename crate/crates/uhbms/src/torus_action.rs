//! The torus of pairs of points on the real projective line, its angular
//! coordinates `x = cot(ρ/2)`, the conformal and sign cocycles, the dual
//! action on functions and midpoint-rule inner products.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::exec::{self, Exec};
use crate::group_core::{wrap_angle, G2Element, Sl2};

/// A point `(ρ, σ) ∈ [0, 2π)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    rho: f64,
    sigma: f64,
}

impl TorusPoint {
    pub fn new(rho: f64, sigma: f64) -> Self {
        TorusPoint { rho: wrap_angle(rho), sigma: wrap_angle(sigma) }
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// A point of the real projective line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProjCoord {
    Finite(f64),
    Infinity,
}

/// `x = cot(ρ/2)`; `ρ = 0` is the point at infinity.
pub fn angle_to_projective(rho: f64) -> ProjCoord {
    let r = wrap_angle(rho);
    if r == 0.0 {
        ProjCoord::Infinity
    } else {
        let h = 0.5 * r;
        ProjCoord::Finite(h.cos() / h.sin())
    }
}

/// Inverse of [`angle_to_projective`], landing in `[0, 2π)`.
pub fn projective_to_angle(x: ProjCoord) -> f64 {
    match x {
        ProjCoord::Infinity => 0.0,
        ProjCoord::Finite(x) => 2.0 * 1f64.atan2(x),
    }
}

pub fn to_projective(p: &TorusPoint) -> (ProjCoord, ProjCoord) {
    (angle_to_projective(p.rho), angle_to_projective(p.sigma))
}

pub fn to_angular(x: ProjCoord, y: ProjCoord) -> TorusPoint {
    TorusPoint::new(projective_to_angle(x), projective_to_angle(y))
}

/// `x·g = (xa + c)/(xb + d)`, with poles sent to infinity and `∞·g = a/b`.
pub fn mobius(x: ProjCoord, g: &Sl2) -> ProjCoord {
    let (num, den) = match x {
        ProjCoord::Finite(x) => (x * g.a() + g.c(), x * g.b() + g.d()),
        ProjCoord::Infinity => (g.a(), g.b()),
    };
    if den == 0.0 {
        ProjCoord::Infinity
    } else {
        ProjCoord::Finite(num / den)
    }
}

/// `k_g(x) = sqrt(((xb + d)² + (xa + c)²)/(1 + x²))`.
pub fn k_factor(x: f64, g: &Sl2) -> f64 {
    let n = x * g.b() + g.d();
    let m = x * g.a() + g.c();
    ((n * n + m * m) / (1.0 + x * x)).sqrt()
}

/// A sign value together with a flag marking the measure-zero set on which
/// the `+1` convention was applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sign {
    pub value: i8,
    pub boundary: bool,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x == 0.0 {
            Sign { value: 1, boundary: true }
        } else {
            Sign { value: if x > 0.0 { 1 } else { -1 }, boundary: false }
        }
    }
    pub fn as_f64(self) -> f64 {
        self.value as f64
    }
}

/// `s_g(x) = sign(xb + d)`, `+1` (flagged) on its zero set.
pub fn s_factor(x: f64, g: &Sl2) -> Sign {
    Sign::of(x * g.b() + g.d())
}

/// Sign of `sin x`, with `+1` (flagged) at multiples of π. Uses the parity of
/// `⌊x/π⌋`, which is robust where the floating-point sine has the wrong sign.
pub fn sign_sin_flagged(x: f64) -> Sign {
    let k = (x / PI).floor();
    let r = x - k * PI;
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    if r <= tol || PI - r <= tol {
        return Sign { value: 1, boundary: true };
    }
    let odd = (k.rem_euclid(2.0)) == 1.0;
    Sign { value: if odd { -1 } else { 1 }, boundary: false }
}

/// `ς(x)`, the sign of `sin x` with `ς(kπ) = +1`.
#[inline]
pub fn sign_sin(x: f64) -> f64 {
    sign_sin_flagged(x).as_f64()
}

/// Action of one SL(2,R) factor at angular coordinate `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    /// Angle of `x·g`.
    pub rho: f64,
    pub k: f64,
    pub s: f64,
    pub boundary: bool,
}

/// Image angle and cocycle factors at `ρ`, computed on the unit vector
/// `(cos ρ/2, sin ρ/2)` so that `ρ = 0` needs no special casing.
#[inline]
pub fn action_factors(g: &Sl2, rho: f64) -> Factors {
    let (x2, x1) = (0.5 * rho).sin_cos();
    let num = x1 * g.a() + x2 * g.c();
    let den = x1 * g.b() + x2 * g.d();
    let k = num.hypot(den);
    let sign = Sign::of(den);
    // Half-angle of the image, taken in [0, π).
    let (y, x) = if den < 0.0 || (den == 0.0 && num < 0.0) { (-den, -num) } else { (den, num) };
    let mut r = 2.0 * y.atan2(x);
    if r >= TAU {
        r -= TAU;
    }
    Factors { rho: r.max(0.0), k, s: sign.as_f64(), boundary: sign.boundary }
}

/// Rotation shortcut: `R(θ)` sends `ρ` to `ρ + 2θ` with `k = 1` and
/// `s = ς(ρ/2 + θ)` (for `ρ ∈ [0, 2π)`, `ς(ρ/2) = +1`).
#[inline]
pub fn rotation_factors(theta: f64, rho: f64) -> (f64, f64) {
    let t = 0.5 * rho + theta;
    let mut k = (t / PI).floor();
    let mut r = t - k * PI;
    if r >= PI {
        r -= PI;
        k += 1.0;
    }
    let s = if k.rem_euclid(2.0) == 1.0 && r > 0.0 { -1.0 } else { 1.0 };
    let mut out = 2.0 * r;
    if out >= TAU {
        out -= TAU;
    }
    (out, s)
}

/// A real function on the torus given by a closed-form evaluator. Arguments
/// may be any reals; implementations are doubly 2π-periodic.
pub trait TorusFunction: Sync {
    fn eval(&self, rho: f64, sigma: f64) -> f64;
}

impl<F> TorusFunction for F
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        self(rho, sigma)
    }
}

impl TorusFunction for Box<dyn TorusFunction + Send> {
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        (**self).eval(rho, sigma)
    }
}

/// `(T′(g,h)φ)(x,y) = k_g⁻³(x) s_g(x) k_h⁻³(y) s_h(y) φ(xg, yh)`.
pub fn dual_action_at<F: TorusFunction + ?Sized>(e: &G2Element, f: &F, rho: f64, sigma: f64) -> f64 {
    let a = action_factors(&e.left, wrap_angle(rho));
    let b = action_factors(&e.right, wrap_angle(sigma));
    a.s * b.s / (a.k * b.k).powi(3) * f.eval(a.rho, b.rho)
}

/// `(T(g,h)α)(x,y) = k_g(x) s_g(x) k_h(y) s_h(y) α(xg, yh)`, the action
/// dual to [`dual_action_at`] for the measure `dρ dσ`.
pub fn primal_action_at<F: TorusFunction + ?Sized>(e: &G2Element, f: &F, rho: f64, sigma: f64) -> f64 {
    let a = action_factors(&e.left, wrap_angle(rho));
    let b = action_factors(&e.right, wrap_angle(sigma));
    a.s * b.s * a.k * b.k * f.eval(a.rho, b.rho)
}

/// `T′(e)f` as a torus function.
#[derive(Clone, Copy)]
pub struct DualAction<'a, F: ?Sized> {
    pub e: G2Element,
    pub f: &'a F,
}

impl<F: TorusFunction + ?Sized> TorusFunction for DualAction<'_, F> {
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        dual_action_at(&self.e, self.f, rho, sigma)
    }
}

pub fn dual_action<F: TorusFunction + ?Sized>(e: G2Element, f: &F) -> DualAction<'_, F> {
    DualAction { e, f }
}

/// `T(e)α` as a torus function.
#[derive(Clone, Copy)]
pub struct PrimalAction<'a, F: ?Sized> {
    pub e: G2Element,
    pub f: &'a F,
}

impl<F: TorusFunction + ?Sized> TorusFunction for PrimalAction<'_, F> {
    fn eval(&self, rho: f64, sigma: f64) -> f64 {
        primal_action_at(&self.e, self.f, rho, sigma)
    }
}

pub fn primal_action<F: TorusFunction + ?Sized>(e: G2Element, f: &F) -> PrimalAction<'_, F> {
    PrimalAction { e, f }
}

/// `T′(R(ω), R(χ))f` at a point via the rotation shortcut.
#[inline]
pub fn dual_rotation_at<F: TorusFunction + ?Sized>(omega: f64, chi: f64, f: &F, rho: f64, sigma: f64) -> f64 {
    let (r, s1) = rotation_factors(omega, rho);
    let (t, s2) = rotation_factors(chi, sigma);
    s1 * s2 * f.eval(r, t)
}

/// Midpoint tensor grid with `n × n` cells on `[0, 2π)²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
}

impl TorusGrid {
    pub fn new(n: usize) -> Self {
        assert!(n >= 16, "quadrature grid must be at least 16x16");
        TorusGrid { n }
    }
    pub fn h(&self) -> f64 {
        TAU / self.n as f64
    }
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }
    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }
}

/// `∫∫ f1 f2 dρ dσ` by the midpoint rule (unnormalized measure).
pub fn l2_inner<F1, F2>(f1: &F1, f2: &F2, grid: TorusGrid, exec: Exec) -> f64
where
    F1: TorusFunction + ?Sized,
    F2: TorusFunction + ?Sized,
{
    let n = grid.n;
    exec::sum_indexed(exec, n, |i| {
        let r = grid.node(i);
        (0..n)
            .map(|j| {
                let s = grid.node(j);
                f1.eval(r, s) * f2.eval(r, s)
            })
            .sum::<f64>()
    }) * grid.cell_area()
}

pub fn l2_norm<F: TorusFunction + ?Sized>(f: &F, grid: TorusGrid, exec: Exec) -> f64 {
    l2_inner(f, f, grid, exec).sqrt()
}

/// Row-major samples `f(ρ_i, σ_j)` on the midpoint grid.
pub fn sample_grid<F: TorusFunction + ?Sized>(f: &F, grid: TorusGrid, exec: Exec) -> Vec<f64> {
    let n = grid.n;
    let rows = exec::map_indexed(exec, n, |i| {
        let r = grid.node(i);
        (0..n).map(|j| f.eval(r, grid.node(j))).collect::<Vec<_>>()
    });
    rows.concat()
}

/// True when `(ρ, σ)` is at least `eps` away from the lines `ρ, σ ∈ {0, π}`
/// (mod 2π), where the sign factors jump.
pub fn off_boundary(rho: f64, sigma: f64, eps: f64) -> bool {
    let far = |x: f64| {
        let r = x.rem_euclid(PI);
        r > eps && PI - r > eps
    };
    far(rho) && far(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projective_examples() {
        assert_eq!(angle_to_projective(0.0), ProjCoord::Infinity);
        match angle_to_projective(PI) {
            ProjCoord::Finite(x) => assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15),
            _ => panic!(),
        }
        match angle_to_projective(PI / 2.0) {
            ProjCoord::Finite(x) => assert_abs_diff_eq!(x, 1.0, epsilon = 1e-15),
            _ => panic!(),
        }
        assert_eq!(projective_to_angle(ProjCoord::Infinity), 0.0);
        for &r in &[0.1, 1.0, 3.0, 5.5, 6.2] {
            let back = projective_to_angle(angle_to_projective(r));
            assert_abs_diff_eq!(back, r, epsilon = 1e-12);
        }
    }

    #[test]
    fn mobius_examples() {
        let r = Sl2::rotation(PI / 2.0);
        // R(π/2) entries are rounded; the exact matrix [[0,1],[-1,0]]:
        let q = Sl2::new(0.0, 1.0, -1.0, 0.0).unwrap();
        match mobius(ProjCoord::Finite(2.0), &q) {
            ProjCoord::Finite(y) => assert_abs_diff_eq!(y, -0.5, epsilon = 1e-15),
            _ => panic!(),
        }
        match mobius(ProjCoord::Finite(2.0), &r) {
            ProjCoord::Finite(y) => assert_abs_diff_eq!(y, -0.5, epsilon = 1e-15),
            _ => panic!(),
        }
        let g = Sl2::new(2.0, 3.0, 1.0, 2.0).unwrap();
        match mobius(ProjCoord::Infinity, &g) {
            ProjCoord::Finite(y) => assert_abs_diff_eq!(y, 2.0 / 3.0, epsilon = 1e-15),
            _ => panic!(),
        }
        assert_eq!(mobius(ProjCoord::Finite(-2.0 / 3.0), &g), ProjCoord::Infinity);
    }

    #[test]
    fn k_and_s_examples() {
        assert_eq!(k_factor(0.7, &Sl2::IDENTITY), 1.0);
        assert_eq!(s_factor(0.7, &Sl2::IDENTITY), Sign { value: 1, boundary: false });
        for &x in &[-3.0, 0.0, 0.4, 10.0] {
            assert_abs_diff_eq!(k_factor(x, &Sl2::rotation(1.3)), 1.0, epsilon = 1e-12);
        }
        let g = Sl2::diag(3.0).unwrap();
        assert_abs_diff_eq!(k_factor(0.0, &g), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(s_factor(0.0, &g).value, 1);
        let z = Sl2::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(s_factor(-1.0, &z), Sign { value: 1, boundary: true });
    }

    #[test]
    fn sign_sin_examples() {
        assert_eq!(sign_sin(PI / 2.0), 1.0);
        assert_eq!(sign_sin(3.0 * PI / 2.0), -1.0);
        assert_eq!(sign_sin_flagged(PI), Sign { value: 1, boundary: true });
        assert_eq!(sign_sin_flagged(TAU), Sign { value: 1, boundary: true });
        assert_eq!(sign_sin(-0.5), -1.0);
        assert_eq!(sign_sin(0.0), 1.0);
    }

    #[test]
    fn angular_factors_match_projective_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let g = Sl2::random(&mut rng, 3.0);
            let rho: f64 = rng.gen_range(0.01..TAU - 0.01);
            let x = match angle_to_projective(rho) {
                ProjCoord::Finite(x) => x,
                ProjCoord::Infinity => continue,
            };
            let f = action_factors(&g, rho);
            assert!((f.k - k_factor(x, &g)).abs() <= 1e-10 * f.k.max(1.0));
            assert_eq!(f.s as i8, s_factor(x, &g).value);
            let img = projective_to_angle(mobius(ProjCoord::Finite(x), &g));
            let d = (img - f.rho).abs();
            assert!(d.min(TAU - d) < 1e-8, "{img} vs {}", f.rho);
        }
    }

    #[test]
    fn infinity_limit() {
        let g = Sl2::new(2.0, 3.0, 1.0, 2.0).unwrap();
        let f = action_factors(&g, 0.0);
        assert_abs_diff_eq!(f.k, 13f64.sqrt(), epsilon = 1e-14);
        assert_eq!(f.s, 1.0);
        assert_abs_diff_eq!(f.rho, projective_to_angle(ProjCoord::Finite(2.0 / 3.0)), epsilon = 1e-14);
    }

    #[test]
    fn rotation_shortcut_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let th: f64 = rng.gen_range(-10.0..10.0);
            let rho: f64 = rng.gen_range(0.0..TAU);
            let (r, s) = rotation_factors(th, rho);
            let f = action_factors(&Sl2::rotation(th), rho);
            if f.rho.min(TAU - f.rho) < 1e-9 {
                continue;
            }
            assert_abs_diff_eq!(r, f.rho, epsilon = 1e-9);
            assert_eq!(s, f.s);
            assert_abs_diff_eq!(f.k, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dual_action_examples() {
        let f = |r: f64, s: f64| (r + 0.3).sin() * (2.0 * s).cos() + 0.2;
        let minus = G2Element::new(
            Sl2::new(-1.0, 0.0, 0.0, -1.0).unwrap(),
            Sl2::new(-1.0, 0.0, 0.0, -1.0).unwrap(),
        );
        let rpi = G2Element::new(Sl2::new(-1.0, 0.0, 0.0, -1.0).unwrap(), Sl2::IDENTITY);
        for &(r, s) in &[(0.3, 1.2), (2.0, 5.0), (4.4, 0.7)] {
            assert_eq!(dual_action_at(&G2Element::IDENTITY, &f, r, s), f(r, s));
            assert_abs_diff_eq!(dual_action_at(&minus, &f, r, s), f(r, s), epsilon = 1e-14);
            assert_abs_diff_eq!(dual_action_at(&rpi, &f, r, s), -f(r, s), epsilon = 1e-14);
        }
    }

    #[test]
    fn l2_examples() {
        let g = TorusGrid::new(512);
        let one = |_: f64, _: f64| 1.0;
        assert_abs_diff_eq!(l2_inner(&one, &one, g, Exec::default()), 4.0 * PI * PI, epsilon = 1e-10);
        let a = |r: f64, _: f64| r.sin();
        let b = |r: f64, _: f64| r.cos();
        assert_abs_diff_eq!(l2_inner(&a, &b, g, Exec::default()), 0.0, epsilon = 1e-10);
        let c = |r: f64, s: f64| (s - r).sin();
        assert_abs_diff_eq!(l2_inner(&c, &c, g, Exec::default()), 2.0 * PI * PI, epsilon = 1e-6);
    }

    #[test]
    fn boundary_filter() {
        assert!(!off_boundary(0.0, 1.0, 1e-6));
        assert!(!off_boundary(1.0, PI + 1e-7, 1e-6));
        assert!(off_boundary(1.0, 2.0, 1e-6));
    }
}
