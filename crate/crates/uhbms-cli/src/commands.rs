use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use uhbms::group_core::{G2Element, PosSym, Sl2};
use uhbms::induced_reps::lattice::verify_group_action;
use uhbms::induced_reps::measure::{adjoint_deviation, fibration_check, haar_invariance_check};
use uhbms::induced_reps::{character_homomorphism_check, character_well_defined, Character, LatticeGeometry};
use uhbms::invariant_functions::{
    actuality_scan, build_fixed_function, fundamental_region, norm_identity_check, FundamentalRegion, GeneratorFunction,
    PiPoint,
};
use uhbms::little_groups::{average_norm_ratios, group_average, GroupElementParams, LittleGroupSpec, OrientationCase, SubgroupSampler};
use uhbms::torus_action::{dual_action_at, off_boundary, sample_grid, TorusFunction, TorusGrid};
use uhbms::Exec;

use crate::config::CampaignConfig;
use crate::report::{write_table, Comparison, Report};
use crate::svg::{region_svg, well_formed};
use crate::CliError;

fn no_specs(report: &mut Report, cfg: &CampaignConfig) -> bool {
    if cfg.specs.is_empty() {
        report.warn("spec list is empty; no spec checks were run");
        true
    } else {
        false
    }
}

pub fn verify_invariance(cfg: &CampaignConfig, exec: Exec) -> Result<Report, CliError> {
    let mut report = Report::new("verify-invariance", cfg);
    if no_specs(&mut report, cfg) {
        return Ok(report);
    }
    let c = &cfg.invariance;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = TorusGrid::new(c.grid);
    let points: Vec<(f64, f64)> = (0..c.grid * c.grid)
        .map(|k| (grid.node(k / c.grid), grid.node(k % c.grid)))
        .filter(|&(r, s)| off_boundary(r, s, 1e-6))
        .collect();
    for spec in &cfg.specs {
        let label = spec.label();
        let elems: Vec<G2Element> = (0..c.elements)
            .map(|_| spec.element(GroupElementParams::new(rng.gen_range(0.0..TAU), rng.gen_range(0..spec.n() as i64), spec.n())))
            .collect();
        let mut gens = vec![("witness".to_string(), GeneratorFunction::witness(spec))];
        for k in 0..c.random_generators {
            gens.push((format!("random-{k}"), GeneratorFunction::random_trig(spec, c.harmonics, &mut rng)));
        }
        for (name, gen) in &gens {
            let phi = build_fixed_function(spec, gen).map_err(|e| CliError::Config(e.to_string()))?;
            let worst = elems
                .iter()
                .flat_map(|e| points.iter().map(move |&(r, s)| (e, r, s)))
                .map(|(e, r, s)| (dual_action_at(e, &phi, r, s) - phi.eval(r, s)).abs())
                .fold(0.0, f64::max);
            report.check(
                &format!("invariance/{name}"),
                &label,
                worst,
                c.tolerance,
                Comparison::AtMost,
                "the fixed function built from the generator is invariant under every sampled element of H",
            );
        }
        let norm = norm_identity_check(spec, &GeneratorFunction::witness(spec), c.norm_grid, exec)
            .map_err(|e| CliError::Config(e.to_string()))?;
        report.check(
            "norm-identity",
            &label,
            norm.rel_error,
            c.norm_tolerance,
            Comparison::AtMost,
            "the squared norm over the fundamental region equals the scaled squared norm of the generator on its arc",
        );
    }
    Ok(report)
}

struct TrigPoly(Vec<(f64, f64, f64, f64)>);

impl TorusFunction for TrigPoly {
    fn eval(&self, r: f64, s: f64) -> f64 {
        self.0.iter().map(|&(m, n, c, ph)| c * (m * r + n * s + ph).cos()).sum()
    }
}

#[derive(Serialize)]
struct RatioRow {
    family: String,
    samples: usize,
    ratio: f64,
}

pub fn vanishing(cfg: &CampaignConfig, out: &Path, exec: Exec) -> Result<Report, CliError> {
    let mut report = Report::new("vanishing", cfg);
    let c = &cfg.vanishing;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = TrigPoly(
        (0..c.harmonics)
            .map(|_| (rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU)))
            .collect(),
    );
    let grid = TorusGrid::new(c.grid);
    let mut rows = Vec::new();
    for (k, fam) in c.families.iter().enumerate() {
        let sampler = fam.sampler()?;
        let label = sampler.label();
        let ratios = average_norm_ratios(&sampler, &f, &c.checkpoints, grid, cfg.seed.wrapping_add(k as u64 + 1), exec);
        let last = ratios.last().map_or(f64::NAN, |r| r.1);
        report.check(
            "decay",
            &label,
            last,
            c.threshold,
            Comparison::AtMost,
            "group averages of a generic function tend to zero: the subgroup has no nonzero fixed functions",
        );
        let worst_step = ratios.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max);
        report.check(
            "monotone",
            &label,
            worst_step,
            1.0,
            Comparison::Below,
            "the averaged norm decreases each time the sample count doubles",
        );
        rows.extend(ratios.iter().map(|&(m, r)| RatioRow { family: label.clone(), samples: m, ratio: r }));
    }
    write_table(out, "vanishing_ratios", &rows)?;

    for spec in &cfg.specs {
        let phi = build_fixed_function(spec, &GeneratorFunction::witness(spec)).map_err(|e| CliError::Config(e.to_string()))?;
        let avg = group_average(&SubgroupSampler::Winding(spec.group()), &phi, c.reproduction_samples, grid, cfg.seed, exec);
        let direct = sample_grid(&phi, grid, exec);
        let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = avg.values.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        report.check(
            "fixed-point-reproduction",
            &spec.label(),
            worst,
            c.reproduction_tolerance,
            Comparison::AtMost,
            "averaging an invariant function over its own group returns the function",
        );
    }
    Ok(report)
}

#[derive(Serialize)]
struct NodeRow {
    i: usize,
    j: usize,
    omega: f64,
    chi: f64,
}

pub fn actuality(cfg: &CampaignConfig, out: &Path, exec: Exec) -> Result<Report, CliError> {
    let mut report = Report::new("actuality", cfg);
    if no_specs(&mut report, cfg) {
        return Ok(report);
    }
    let c = &cfg.actuality;
    for spec in &cfg.specs {
        let label = spec.label();
        let scan = actuality_scan(spec, c.grid, c.c, exec).map_err(|e| CliError::Config(e.to_string()))?;
        report.check(
            "family-match",
            &label,
            scan.soundness.max(scan.completeness),
            1.0,
            Comparison::AtMost,
            "the fixed set of the witness is the family of H within one grid cell",
        );
        report.check(
            "components",
            &label,
            scan.components as f64,
            scan.expected_components as f64,
            Comparison::Equal,
            "the fixed set has exactly the components of H and no spurious ones",
        );
        let identity = scan.nodes.contains(&(0, 0));
        report.check(
            "identity-recovered",
            &label,
            f64::from(u8::from(identity)),
            1.0,
            Comparison::Equal,
            "the identity element fixes the witness",
        );
        let rows: Vec<NodeRow> =
            scan.nodes.iter().map(|&(i, j)| NodeRow { i, j, omega: i as f64 * scan.h, chi: j as f64 * scan.h }).collect();
        write_table(out, &format!("actuality_{}", file_label(spec)), &rows)?;
    }
    Ok(report)
}

fn file_label(spec: &LittleGroupSpec) -> String {
    format!("N{}_q{}_p{}_case{}", spec.n(), spec.q0(), spec.p0(), spec.case().index())
}

fn vertex_set(f: &FundamentalRegion) -> Vec<PiPoint> {
    let mut v = f.vertices().to_vec();
    v.sort_by_key(|p| (p.x, p.y));
    v
}

fn mirrored(f: &FundamentalRegion, map: fn(&PiPoint) -> PiPoint) -> Vec<PiPoint> {
    let mut v: Vec<PiPoint> = f.vertices().iter().map(map).collect();
    v.sort_by_key(|p| (p.x, p.y));
    v
}

#[derive(Serialize)]
struct VertexRow {
    q0: u32,
    p0: u32,
    case: u8,
    vertex: &'static str,
    rho_over_pi: String,
    sigma_over_pi: String,
}

pub fn regions(cfg: &CampaignConfig, out: &Path) -> Result<Report, CliError> {
    let mut report = Report::new("regions", cfg);
    if no_specs(&mut report, cfg) {
        return Ok(report);
    }
    let dir = out.join("regions");
    fs::create_dir_all(&dir)?;
    let mut rows = Vec::new();
    let mut seen = Vec::new();
    for spec in &cfg.specs {
        let key = (spec.q0(), spec.p0());
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let subject = format!("q0={} p0={}", key.0, key.1);
        let f: Vec<FundamentalRegion> = OrientationCase::ALL.iter().map(|&c| fundamental_region(c, key.0, key.1)).collect();
        for (region, case) in f.iter().zip(OrientationCase::ALL) {
            let area = region.area_pi2();
            report.check(
                &format!("area/case{}", case.index()),
                &subject,
                *area.numer() as f64 / *area.denom() as f64,
                4.0,
                Comparison::Equal,
                "the fundamental region has area 4π² in exact rational arithmetic",
            );
            let rep = LittleGroupSpec::new(spec.n(), key.0, key.1, case).map_err(|e| CliError::Config(e.to_string()))?;
            let svg = region_svg(region, &rep, cfg.regions.scale, cfg.regions.orbit_points);
            report.check(
                &format!("svg/case{}", case.index()),
                &subject,
                f64::from(u8::from(well_formed(&svg))),
                1.0,
                Comparison::Equal,
                "the rendered figure is well-formed SVG",
            );
            fs::write(dir.join(format!("F{}_q{}_p{}.svg", case.index(), key.0, key.1)), svg)?;
            for (name, p) in ["O", "Gamma", "B", "A"].into_iter().zip(region.vertices()) {
                rows.push(VertexRow {
                    q0: key.0,
                    p0: key.1,
                    case: case.index(),
                    vertex: name,
                    rho_over_pi: p.x.to_string(),
                    sigma_over_pi: p.y.to_string(),
                });
            }
        }
        let mirrors = [
            vertex_set(&f[1]) == mirrored(&f[0], PiPoint::swap),
            vertex_set(&f[2]) == mirrored(&f[0], PiPoint::mirror_rho),
            vertex_set(&f[3]) == mirrored(&f[2], PiPoint::mirror_anti),
        ];
        report.check(
            "mirror-symmetry",
            &subject,
            mirrors.iter().filter(|&&m| m).count() as f64,
            3.0,
            Comparison::Equal,
            "regions 2, 3 and 4 are the reflections of 1 across ρ = σ, of 1 across ρ = 0 and of 3 across σ = −ρ",
        );
    }
    write_table(out, "region_vertices", &rows)?;
    Ok(report)
}

fn default_character(spec: &LittleGroupSpec) -> Option<Character> {
    let n = spec.n();
    (1..=6i64)
        .flat_map(|k| [k, -k])
        .flat_map(|m| (0..n as i64).map(move |nu| Character::new(nu, m, n)))
        .find(|&ch| character_well_defined(ch, spec).is_ok())
}

/// Element with both polar parts clamped to `|s| ≤ 0.3`, keeping the
/// transported reference state well inside the lattice.
fn moderate(rng: &mut ChaCha8Rng) -> G2Element {
    let clamp = |g: Sl2| {
        let p = g.polar();
        let (a, b) = p.kappa.log();
        let f = 0.3 / a.hypot(b).max(0.3);
        PosSym::from_log(a * f, b * f).to_sl2() * Sl2::rotation(p.u)
    };
    let g = G2Element::random(rng, 1.2);
    G2Element::new(clamp(g.left), clamp(g.right))
}

pub fn induced(cfg: &CampaignConfig, exec: Exec) -> Result<Report, CliError> {
    let mut report = Report::new("induced", cfg);
    let c = &cfg.induced;
    let g0 = Sl2::new(1.1, 0.15, -0.05, (1.0 - 0.15 * 0.05) / 1.1).expect("unimodular by construction");
    let (a, b) = haar_invariance_check(&g0, c.mc_samples, cfg.seed, exec);
    report.check(
        "haar-invariance",
        "",
        a.z_score(&b),
        c.z_max,
        Comparison::Below,
        "the Haar measure of SL(2,R) is left invariant (Monte-Carlo z-score)",
    );
    if no_specs(&mut report, cfg) {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for spec in &cfg.specs {
        let label = spec.label();
        let n = spec.n();
        report.check(
            "adjoint-determinant",
            &label,
            adjoint_deviation(spec, c.adjoint_samples, cfg.seed),
            c.adjoint_tolerance,
            Comparison::AtMost,
            "|det Ad(ε)| = 1 on H, so an invariant measure exists on the quotient",
        );
        let chars: Vec<Character> = if c.characters.is_empty() {
            default_character(spec).into_iter().collect()
        } else {
            c.characters.iter().map(|&(nu, m)| Character::new(nu, m, n)).collect()
        };
        for ch in &chars {
            let subject = format!("{label} chi({},{})", ch.nu, ch.n);
            let chk = character_homomorphism_check(*ch, n, c.character_samples, cfg.seed);
            report.check(
                "character-homomorphism",
                &subject,
                chk.homomorphism,
                c.character_tolerance,
                Comparison::AtMost,
                "the character is a homomorphism of H",
            );
            report.check("character-unitarity", &subject, chk.unitarity, c.character_tolerance, Comparison::AtMost, "the character takes unit values");
        }
        let (l, r) = fibration_check(spec, c.mc_samples, cfg.seed.wrapping_add(1), exec);
        report.check(
            "fibration",
            &label,
            l.z_score(&r),
            c.z_max,
            Comparison::Below,
            "integrating over the group equals integrating over H and then the quotient (Monte-Carlo z-score)",
        );
        let Some(ch) = chars.iter().copied().find(|&ch| character_well_defined(ch, spec).is_ok()) else {
            report.warn(format!("{label}: no well-defined character; lattice checks skipped"));
            continue;
        };
        let (g1, g2) = (moderate(&mut rng), moderate(&mut rng));
        let geom = LatticeGeometry::new(c.lattice, c.radius, c.modes);
        let rep = verify_group_action(geom, spec, ch, &g1, &g2, exec).map_err(|e| CliError::Config(e.to_string()))?;
        let subject = format!("{label} chi({},{})", ch.nu, ch.n);
        report.check("unitarity", &subject, rep.norm_deviation, c.norm_tolerance, Comparison::AtMost, "the induced operator preserves the norm");
        report.check(
            "boundary-mass",
            &subject,
            rep.boundary_mass,
            c.boundary_tolerance,
            Comparison::AtMost,
            "the truncated lattice holds the state away from its rim",
        );
        report.check(
            "composition",
            &subject,
            rep.composition_error,
            c.composition_tolerance,
            Comparison::AtMost,
            "U(g1)U(g2) agrees with the closed form of U(g1 g2)",
        );
    }
    Ok(report)
}
