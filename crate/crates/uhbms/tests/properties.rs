use std::f64::consts::TAU;

use num_integer::Integer;
use num_rational::Ratio;
use proptest::prelude::*;
use uhbms::group_core::{polar_decompose, G2Element, PosSym, Sl2};
use uhbms::induced_reps::{character_eval, coset_project, orbit_distance, section, Character, CosetFrame};
use uhbms::invariant_functions::{build_fixed_function, fundamental_region, FrameTransform, GeneratorFunction};
use uhbms::little_groups::{canonicalize, GroupElementParams, LittleGroupSpec, OrientationCase};
use uhbms::torus_action::{dual_action_at, dual_rotation_at, off_boundary, TorusFunction};

fn case() -> impl Strategy<Value = OrientationCase> {
    prop::sample::select(OrientationCase::ALL.to_vec())
}

fn odd(max: u32) -> impl Strategy<Value = u32> {
    (0..max).prop_map(|k| 2 * k + 1)
}

/// Valid specs with small parameters.
fn spec() -> impl Strategy<Value = LittleGroupSpec> {
    (odd(4), odd(4), odd(6), case()).prop_filter_map("invalid spec", |(n, a, b, c)| {
        let (q0, p0) = (a.min(b), a.max(b));
        LittleGroupSpec::new(n, q0, p0, c).ok()
    })
}

fn sl2() -> impl Strategy<Value = Sl2> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.0..TAU).prop_map(|(s1, s2, u)| PosSym::from_log(s1, s2).to_sl2() * Sl2::rotation(u))
}

proptest! {
    #[test]
    fn region_area_is_four(q0 in odd(8), p0 in odd(8), c in case()) {
        prop_assert_eq!(fundamental_region(c, q0, p0).area_pi2(), Ratio::from_integer(4));
    }

    #[test]
    fn region_tiles_the_plane(q0 in odd(4), p0 in odd(4), c in case(), r in 0.0..TAU, s in 0.0..TAU) {
        prop_assume!(q0.gcd(&p0) == 1);
        let f = fundamental_region(c, q0, p0);
        prop_assert_eq!(f.representatives(r, s, 12).len(), 1);
    }

    #[test]
    fn frame_round_trip(c in case(), a in 1i64..9, b in 1i64..9, r in -10.0..10.0f64, s in -10.0..10.0f64) {
        let f = FrameTransform::new(c, Ratio::new(a, b));
        let (u, v) = f.forward(r, s);
        let (r2, s2) = f.inverse(u, v);
        prop_assert!((r - r2).abs() < 1e-9 && (s - s2).abs() < 1e-9);
    }

    #[test]
    fn canonical_form_is_stable(q in -20i64..20, p in -20i64..20, k in 1i64..5) {
        prop_assume!(q != 0 && p != 0);
        let c = canonicalize(q, p).unwrap();
        prop_assert!(c.q0 <= c.p0);
        prop_assert_eq!(canonicalize(k * q, k * p).unwrap(), c);
        prop_assert_eq!(canonicalize(-q, -p).unwrap(), c);
        let (a, b) = c.slopes();
        prop_assert_eq!(canonicalize(a, b).unwrap(), c);
    }

    #[test]
    fn polar_decomposition_reconstructs(g in sl2()) {
        let p = polar_decompose(&g);
        let back = p.kappa.to_sl2() * Sl2::rotation(p.u);
        prop_assert!(back.distance(&g) < 1e-10);
    }

    #[test]
    fn dual_action_is_a_homomorphism(g1 in sl2(), g2 in sl2(), h1 in sl2(), h2 in sl2(), r in 0.0..TAU, s in 0.0..TAU) {
        prop_assume!(off_boundary(r, s, 1e-3));
        let f = |x: f64, y: f64| (x + 0.3).sin() * (2.0 * y).cos() + 0.2 * (x - y).cos();
        let (e1, e2) = (G2Element::new(g1, h1), G2Element::new(g2, h2));
        let inner = |x: f64, y: f64| dual_action_at(&e2, &f, x, y);
        let lhs = dual_action_at(&e1, &inner, r, s);
        let rhs = dual_action_at(&(e1 * e2), &f, r, s);
        // Points that land within rounding of a sign line can disagree.
        prop_assume!(lhs.signum() == rhs.signum() || lhs.abs() < 1e-9);
        prop_assert!((lhs - rhs).abs() < 1e-7 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn rotation_shortcut_matches_general_action(w in -10.0..10.0f64, c in -10.0..10.0f64, r in 0.0..TAU, s in 0.0..TAU) {
        let f = |x: f64, y: f64| (x + 0.3).sin() + (2.0 * y).cos() * x.cos();
        let a = dual_rotation_at(w, c, &f, r, s);
        let b = dual_action_at(&G2Element::rotations(w, c), &f, r, s);
        prop_assume!(off_boundary(r + 2.0 * w, s + 2.0 * c, 1e-6));
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn fixed_functions_are_invariant(sp in spec(), theta in 0.0..TAU, i in 0i64..9, r in 0.0..TAU, s in 0.0..TAU) {
        prop_assume!(off_boundary(r, s, 1e-6));
        let phi = build_fixed_function(&sp, &GeneratorFunction::witness(&sp)).unwrap();
        let e = sp.element(GroupElementParams::new(theta, i, sp.n()));
        prop_assert!((dual_action_at(&e, &phi, r, s) - phi.eval(r, s)).abs() < 1e-8);
    }

    #[test]
    fn character_is_multiplicative(nu in 0i64..7, n in -6i64..6, t1 in -TAU..TAU, t2 in -TAU..TAU, j1 in 0i64..7, j2 in 0i64..7) {
        let gn = 7;
        let ch = Character::new(nu, n, gn);
        let x = |t, j| character_eval(ch, gn, GroupElementParams::new(t, j, gn));
        prop_assert!((x(t1 + t2, j1 + j2) - x(t1, j1) * x(t2, j2)).norm() < 1e-12);
    }

    #[test]
    fn section_projects_back(sp in spec(), s in prop::array::uniform4(-1.0..1.0f64), frac in 0.0..1.0f64) {
        let period = CosetFrame::new(&sp).period;
        let (k1, k2) = (PosSym::from_log(s[0], s[1]), PosSym::from_log(s[2], s[3]));
        let phi = frac * period;
        let q = coset_project(&section(&k1, &k2, phi, &sp), &sp);
        let (a1, a2) = q.kappa1.log();
        let (b1, b2) = q.kappa2.log();
        prop_assert!((a1 - s[0]).abs() + (a2 - s[1]).abs() + (b1 - s[2]).abs() + (b2 - s[3]).abs() < 1e-9);
        let want = uhbms::induced_reps::OrbitPoint { kappa1: k1, kappa2: k2, phi };
        prop_assert!(orbit_distance(&q, &want, period) < 1e-9);
    }
}
