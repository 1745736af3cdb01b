//! Subgroups of SO(2)×SO(2): winding lines and their closure, the infinite
//! not-connected groups `H(N, q0, p0)` in their four orientations, Haar
//! samplers and group averaging of torus functions.

use std::f64::consts::TAU;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::group_core::{wrap_angle, G2Element};
use crate::torus_action::{dual_rotation_at, TorusFunction, TorusGrid};

/// Orientation of the one-parameter part relative to the two factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum OrientationCase {
    /// `H(N, q0, p0)`: `(R(q0 θ), R(p0 θ + 2πi/N))`.
    One,
    /// `H(N, p0, q0)`: `(R(p0 θ), R(q0 θ + 2πi/N))`.
    Two,
    /// `H(N, -q0, p0)`: `(R(-q0 θ), R(p0 θ + 2πi/N))`.
    Three,
    /// `H(N, -p0, q0)`: `(R(-p0 θ), R(q0 θ + 2πi/N))`.
    Four,
}

impl OrientationCase {
    pub const ALL: [OrientationCase; 4] =
        [OrientationCase::One, OrientationCase::Two, OrientationCase::Three, OrientationCase::Four];

    pub fn index(self) -> u8 {
        match self {
            OrientationCase::One => 1,
            OrientationCase::Two => 2,
            OrientationCase::Three => 3,
            OrientationCase::Four => 4,
        }
    }
}

impl TryFrom<u8> for OrientationCase {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(OrientationCase::One),
            2 => Ok(OrientationCase::Two),
            3 => Ok(OrientationCase::Three),
            4 => Ok(OrientationCase::Four),
            _ => Err(Error::InvalidSpec(format!("orientation case must be 1..=4, got {v}"))),
        }
    }
}

impl From<OrientationCase> for u8 {
    fn from(c: OrientationCase) -> u8 {
        c.index()
    }
}

/// Parameters `(θ, i)` of an element of `H(N, ·, ·)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElementParams {
    pub theta: f64,
    i: u32,
}

impl GroupElementParams {
    pub fn new(theta: f64, i: i64, n: u32) -> Self {
        GroupElementParams { theta, i: i.rem_euclid(n as i64) as u32 }
    }
    pub fn i(&self) -> u32 {
        self.i
    }
}

/// The closed subgroup `{(R(q θ), R(p θ + 2πi/N))}` for integer slopes.
/// No parity or ordering conditions; this also covers the non-little
/// families used by the vanishing checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindingGroup {
    pub n: u32,
    pub q: i64,
    pub p: i64,
}

impl WindingGroup {
    pub fn new(n: u32, q: i64, p: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("N must be positive".into()));
        }
        if q == 0 && p == 0 {
            return Err(Error::ZeroSlope);
        }
        Ok(WindingGroup { n, q, p })
    }

    /// Rotation angles `(ω, χ)` of the element with parameters `(θ, i)`.
    pub fn angles(&self, theta: f64, i: i64) -> (f64, f64) {
        (
            self.q as f64 * theta,
            self.p as f64 * theta + TAU * i.rem_euclid(self.n as i64) as f64 / self.n as f64,
        )
    }

    pub fn element(&self, params: GroupElementParams) -> G2Element {
        let (w, c) = self.angles(params.theta, params.i as i64);
        G2Element::rotations(w, c)
    }

    /// Period of the invariant `p ω − q χ` on the group's angle set.
    fn functional_period(&self) -> (i64, i64, f64) {
        let g = self.q.gcd(&self.p);
        let (q, p) = (self.q / g, self.p / g);
        let l = q.gcd(&(self.n as i64));
        (q, p, TAU * l as f64 / self.n as f64)
    }

    /// Flat-torus distance from the rotation-angle pair `(ω, χ)` to the set
    /// of angle pairs of this group. The set is a union of parallel lines
    /// `p ω − q χ ∈ L·Z` that is invariant under the 2π lattice.
    pub fn angle_distance(&self, omega: f64, chi: f64) -> f64 {
        let (q, p, period) = self.functional_period();
        let f = p as f64 * omega - q as f64 * chi;
        let r = f.rem_euclid(period);
        r.min(period - r) / ((q * q + p * p) as f64).sqrt()
    }

    /// Recover `(θ, i)` with `element(θ, i) = e` (within `tol`), searching
    /// every lift of the first angle.
    pub fn parameters_of(&self, e: &G2Element, tol: f64) -> Option<GroupElementParams> {
        let w = e.left.b().atan2(e.left.a());
        let c = e.right.b().atan2(e.right.a());
        let close = |x: f64, y: f64| {
            let d = (x - y).rem_euclid(TAU);
            d.min(TAU - d) <= tol
        };
        if self.q == 0 {
            let th = if self.p == 0 { 0.0 } else { c / self.p as f64 };
            for i in 0..self.n as i64 {
                let (w1, c1) = self.angles(th, i);
                if close(w1, w) && close(c1, c) {
                    return Some(GroupElementParams::new(th, i, self.n));
                }
            }
            return None;
        }
        for k in 0..self.q.unsigned_abs() as i64 {
            let th = (w + TAU * k as f64) / self.q as f64;
            for i in 0..self.n as i64 {
                let (_, c1) = self.angles(th, i);
                if close(c1, c) {
                    return Some(GroupElementParams::new(th, i, self.n));
                }
            }
        }
        None
    }
}

/// A validated `H(N, q0, p0)` in one of the four orientations: `N` odd,
/// `q0`, `p0` odd and coprime, `p0 > q0 > 0` or `p0 = q0 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct LittleGroupSpec {
    n: u32,
    q0: u32,
    p0: u32,
    case: OrientationCase,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct RawSpec {
    n: u32,
    q0: u32,
    p0: u32,
    case: OrientationCase,
}

impl TryFrom<RawSpec> for LittleGroupSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        LittleGroupSpec::new(r.n, r.q0, r.p0, r.case)
    }
}

impl From<LittleGroupSpec> for RawSpec {
    fn from(s: LittleGroupSpec) -> RawSpec {
        RawSpec { n: s.n, q0: s.q0, p0: s.p0, case: s.case }
    }
}

impl LittleGroupSpec {
    pub fn new(n: u32, q0: u32, p0: u32, case: OrientationCase) -> Result<Self> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::Parity(format!("N = {n} must be odd and positive")));
        }
        if q0.is_multiple_of(2) || p0.is_multiple_of(2) {
            return Err(Error::Parity(format!("q0 = {q0} and p0 = {p0} must both be odd")));
        }
        if q0.gcd(&p0) != 1 {
            return Err(Error::InvalidSpec(format!("q0 = {q0} and p0 = {p0} are not coprime")));
        }
        if !(p0 > q0 || (p0 == 1 && q0 == 1)) {
            return Err(Error::InvalidSpec(format!("need p0 > q0 > 0 or p0 = q0 = 1, got q0 = {q0}, p0 = {p0}")));
        }
        Ok(LittleGroupSpec { n, q0, p0, case })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q0(&self) -> u32 {
        self.q0
    }
    pub fn p0(&self) -> u32 {
        self.p0
    }
    pub fn case(&self) -> OrientationCase {
        self.case
    }

    /// `q = p0/q0`.
    pub fn q_ratio(&self) -> Ratio<i64> {
        Ratio::new(self.p0 as i64, self.q0 as i64)
    }
    pub fn q(&self) -> f64 {
        self.p0 as f64 / self.q0 as f64
    }

    /// Signed slopes `(q, p)` of the one-parameter part.
    pub fn slopes(&self) -> (i64, i64) {
        let (q0, p0) = (self.q0 as i64, self.p0 as i64);
        match self.case {
            OrientationCase::One => (q0, p0),
            OrientationCase::Two => (p0, q0),
            OrientationCase::Three => (-q0, p0),
            OrientationCase::Four => (-p0, q0),
        }
    }

    pub fn group(&self) -> WindingGroup {
        let (q, p) = self.slopes();
        WindingGroup { n: self.n, q, p }
    }

    /// `l = gcd(N, |first slope|)`: `gcd(N, q0)` for cases 1 and 3,
    /// `gcd(N, p0)` for cases 2 and 4.
    pub fn l(&self) -> u32 {
        self.n.gcd(&(self.slopes().0.unsigned_abs() as u32))
    }

    /// `N′ = N/l`.
    pub fn n_prime(&self) -> u32 {
        self.n / self.l()
    }

    /// Anti-period `2π/(q0 N′)` of the generators of the fixed functions.
    pub fn anti_period(&self) -> f64 {
        TAU / (self.q0 as f64 * self.n_prime() as f64)
    }

    pub fn element(&self, params: GroupElementParams) -> G2Element {
        self.group().element(params)
    }

    pub fn label(&self) -> String {
        format!("H({},{},{})#{}", self.n, self.q0, self.p0, self.case.index())
    }
}

impl fmt::Display for LittleGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (q, p) = self.slopes();
        write!(f, "H({}, {}, {}) [case {}]", self.n, q, p, self.case.index())
    }
}

/// `element(spec, (θ, i))`.
pub fn element(spec: &LittleGroupSpec, params: GroupElementParams) -> G2Element {
    spec.element(params)
}

/// Canonical slope data `(q0, p0, case)` of a winding subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalSlope {
    pub q0: u32,
    pub p0: u32,
    pub case: OrientationCase,
}

impl CanonicalSlope {
    /// Signed slopes of the subgroup this canonical form names.
    pub fn slopes(&self) -> (i64, i64) {
        let (q0, p0) = (self.q0 as i64, self.p0 as i64);
        match self.case {
            OrientationCase::One => (q0, p0),
            OrientationCase::Two => (p0, q0),
            OrientationCase::Three => (-q0, p0),
            OrientationCase::Four => (-p0, q0),
        }
    }
}

/// Normal form of the one-parameter subgroup with integer slopes `(q, p)`:
/// divide by the gcd, use `(q, p) ~ (-q, -p)` to make `p > 0`, then order
/// the pair so that `q0 ≤ p0`, which fixes the orientation case.
pub fn canonicalize(q: i64, p: i64) -> Result<CanonicalSlope> {
    if q == 0 && p == 0 {
        return Err(Error::ZeroSlope);
    }
    if q == 0 || p == 0 {
        return Err(Error::AxisSlope { q, p });
    }
    let g = q.gcd(&p);
    let (mut q, mut p) = (q / g, p / g);
    if p < 0 {
        q = -q;
        p = -p;
    }
    let a = q.unsigned_abs() as u32;
    let b = p as u32;
    let (q0, p0, case) = match (q > 0, a <= b) {
        (true, true) => (a, b, OrientationCase::One),
        (true, false) => (b, a, OrientationCase::Two),
        (false, true) => (a, b, OrientationCase::Three),
        (false, false) => (b, a, OrientationCase::Four),
    };
    Ok(CanonicalSlope { q0, p0, case })
}

/// Closure of a one-parameter subgroup in the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    Closed,
    Dense,
}

/// Exact slope component: a rational, a rational multiple of a named
/// irrational, or an untagged float (which cannot be decided).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SlopeValue {
    Rational(Ratio<i64>),
    Irrational { tag: String, coefficient: Ratio<i64> },
    Float(f64),
}

impl SlopeValue {
    pub fn int(v: i64) -> Self {
        SlopeValue::Rational(Ratio::from_integer(v))
    }
    pub fn tagged(tag: &str) -> Self {
        SlopeValue::Irrational { tag: tag.into(), coefficient: Ratio::from_integer(1) }
    }
    fn is_zero(&self) -> bool {
        match self {
            SlopeValue::Rational(r) => *r == Ratio::from_integer(0),
            SlopeValue::Irrational { coefficient, .. } => *coefficient == Ratio::from_integer(0),
            SlopeValue::Float(x) => *x == 0.0,
        }
    }
}

/// Generator data `q g1 + p g2` of a one-parameter subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingLine {
    pub q: SlopeValue,
    pub p: SlopeValue,
}

impl WindingLine {
    pub fn new(q: SlopeValue, p: SlopeValue) -> Result<Self> {
        if q.is_zero() && p.is_zero() {
            return Err(Error::ZeroSlope);
        }
        Ok(WindingLine { q, p })
    }
}

/// Closed if the slope ratio is rational (axis cases included), dense if it
/// is irrational. Distinct irrational tags are taken to be linearly
/// independent over the rationals.
pub fn is_closed(line: &WindingLine) -> Result<Closure> {
    use SlopeValue::*;
    if matches!(line.q, Float(_)) || matches!(line.p, Float(_)) {
        return Err(Error::UntaggedSlope);
    }
    if line.q.is_zero() || line.p.is_zero() {
        return Ok(Closure::Closed);
    }
    match (&line.q, &line.p) {
        (Rational(_), Rational(_)) => Ok(Closure::Closed),
        (Rational(_), Irrational { .. }) | (Irrational { .. }, Rational(_)) => Ok(Closure::Dense),
        (Irrational { tag: a, .. }, Irrational { tag: b, .. }) => {
            Ok(if a == b { Closure::Closed } else { Closure::Dense })
        }
        _ => unreachable!("floats rejected above"),
    }
}

/// Angle-set distance between two subgroups estimated from `samples`
/// elements of each: the larger of the two directed sup-distances.
pub fn subgroup_set_distance(a: &WindingGroup, b: &WindingGroup, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let th = rng.gen_range(0.0..TAU);
        let (w, c) = a.angles(th, rng.gen_range(0..a.n as i64));
        worst = worst.max(b.angle_distance(w, c));
        let (w, c) = b.angles(th, rng.gen_range(0..b.n as i64));
        worst = worst.max(a.angle_distance(w, c));
    }
    worst
}

/// Haar-uniform samplers for the compact subgroups acting by rotations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SubgroupSampler {
    /// The whole of SO(2)×SO(2).
    Torus,
    /// `SO(2) × C_N`.
    CircleCyclic { n: u32 },
    /// `C_N × SO(2)`.
    CyclicCircle { n: u32 },
    /// A winding group `H(N, q, p)` with θ uniform and i uniform.
    Winding(WindingGroup),
}

impl SubgroupSampler {
    /// Rotation angles `(ω, χ)` of a Haar-random element.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let cyc = |rng: &mut R, n: u32| TAU * rng.gen_range(0..n) as f64 / n as f64;
        match *self {
            SubgroupSampler::Torus => (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)),
            SubgroupSampler::CircleCyclic { n } => {
                let w = rng.gen_range(0.0..TAU);
                (w, cyc(rng, n))
            }
            SubgroupSampler::CyclicCircle { n } => {
                let c = cyc(rng, n);
                (c, rng.gen_range(0.0..TAU))
            }
            SubgroupSampler::Winding(g) => {
                let th = rng.gen_range(0.0..TAU);
                let i = rng.gen_range(0..g.n as i64);
                g.angles(th, i)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SubgroupSampler::Torus => "SO(2)xSO(2)".into(),
            SubgroupSampler::CircleCyclic { n } => format!("S1xC{n}"),
            SubgroupSampler::CyclicCircle { n } => format!("C{n}xS1"),
            SubgroupSampler::Winding(g) => format!("H({},{},{})", g.n, g.q, g.p),
        }
    }
}

/// A function sampled on the midpoint grid (row-major in `(ρ, σ)`).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Draw `m` nested Haar samples: the first `k` of them are the samples a
/// run with `k` points would use.
pub fn draw_samples(sampler: &SubgroupSampler, m: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| sampler.sample(&mut rng)).collect()
}

/// `(1/M) Σ T′(e_m) f` on the grid, for `M` Haar samples of the subgroup.
pub fn group_average<F>(sampler: &SubgroupSampler, f: &F, m: usize, grid: TorusGrid, seed: u64, exec: Exec) -> SampledFunction
where
    F: TorusFunction + ?Sized,
{
    let samples = draw_samples(sampler, m, seed);
    let n = grid.n;
    let rows = exec::map_indexed(exec, n, |i| {
        let r = grid.node(i);
        let mut acc = vec![0.0; n];
        for &(w, c) in &samples {
            for (j, a) in acc.iter_mut().enumerate() {
                *a += dual_rotation_at(w, c, f, r, grid.node(j));
            }
        }
        acc.iter_mut().for_each(|a| *a /= m as f64);
        acc
    });
    SampledFunction { grid, values: rows.concat() }
}

/// `‖avg_M f‖/‖f‖` at each checkpoint `M` of a single nested run.
pub fn average_norm_ratios<F>(sampler: &SubgroupSampler, f: &F, checkpoints: &[usize], grid: TorusGrid, seed: u64, exec: Exec) -> Vec<(usize, f64)>
where
    F: TorusFunction + ?Sized,
{
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let m = *cps.last().unwrap_or(&0);
    let samples = draw_samples(sampler, m, seed);
    let n = grid.n;
    let per_row = exec::map_indexed(exec, n, |i| {
        let r = grid.node(i);
        let mut acc = vec![0.0; n];
        let mut out = Vec::with_capacity(cps.len());
        let mut f2 = 0.0;
        for j in 0..n {
            let v = f.eval(r, grid.node(j));
            f2 += v * v;
        }
        let mut done = 0;
        for &cp in &cps {
            for &(w, c) in &samples[done..cp] {
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += dual_rotation_at(w, c, f, r, grid.node(j));
                }
            }
            done = cp;
            let s: f64 = acc.iter().map(|a| (a / cp as f64).powi(2)).sum();
            out.push(s);
        }
        (f2, out)
    });
    let f2: f64 = per_row.iter().map(|r| r.0).sum();
    cps.iter()
        .enumerate()
        .map(|(k, &cp)| {
            let s: f64 = per_row.iter().map(|r| r.1[k]).sum();
            (cp, if f2 > 0.0 { (s / f2).sqrt() } else { 0.0 })
        })
        .collect()
}

/// Wrap every sample angle pair into `[0, 2π)²`.
pub fn wrap_pair((w, c): (f64, f64)) -> (f64, f64) {
    (wrap_angle(w), wrap_angle(c))
}
