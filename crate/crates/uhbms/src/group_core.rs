//! SL(2,R) and its square: products, rotations, polar parts, the adjoint
//! matrix on the six-dimensional Lie algebra, and Haar densities.

use std::f64::consts::TAU;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix6};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};

/// Determinant tolerance for unimodular input, relative to the entry scale.
pub const DET_TOL: f64 = 1e-12;

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A real unimodular 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Sl2 {
    pub const IDENTITY: Sl2 = Sl2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Checked constructor; `ad - bc` must equal 1 up to [`DET_TOL`].
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = (a * d).abs().max((b * c).abs()).max(1.0);
        if !det.is_finite() || (det - 1.0).abs() > DET_TOL * scale {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Sl2 { a, b, c, d })
    }

    /// Exact constructor from rational entries.
    pub fn from_rational(a: Ratio<i64>, b: Ratio<i64>, c: Ratio<i64>, d: Ratio<i64>) -> Result<Self> {
        let det = a * d - b * c;
        let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        if det != Ratio::from_integer(1) {
            return Err(Error::NotUnimodular { det: f(det) });
        }
        Ok(Sl2 { a: f(a), b: f(b), c: f(c), d: f(d) })
    }

    /// Rescale a matrix with nonzero determinant onto SL(2,R). A negative
    /// determinant is fixed by negating the second row first.
    pub fn project(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NotUnimodular { det });
        }
        let (c, d) = if det < 0.0 { (-c, -d) } else { (c, d) };
        let s = det.abs().sqrt().recip();
        Ok(Sl2 { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub(crate) const fn from_raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Sl2 { a, b, c, d }
    }

    /// `R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Sl2 { a: c, b: s, c: -s, d: c }
    }

    /// `diag(λ, 1/λ)`.
    pub fn diag(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::NotUnimodular { det: 0.0 });
        }
        Ok(Sl2 { a: lambda, b: 0.0, c: 0.0, d: lambda.recip() })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Sl2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn transpose(&self) -> Self {
        Sl2 { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// Frobenius distance to another matrix.
    pub fn distance(&self, o: &Sl2) -> f64 {
        let d = [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d];
        d.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.b, self.c, self.d)
    }

    /// Polar part: `self = κ·R(u)` with κ positive symmetric unimodular.
    pub fn polar(&self) -> Polar {
        polar_decompose(self)
    }

    /// Draw a matrix with entries uniform in `[-r, r]`, projected to det 1.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Self {
        loop {
            let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-r..=r));
            let det = e[0] * e[3] - e[1] * e[2];
            if det.abs() > 1e-3 {
                if let Ok(g) = Sl2::project(e[0], e[1], e[2], e[3]) {
                    return g;
                }
            }
        }
    }
}

impl Mul for Sl2 {
    type Output = Sl2;
    fn mul(self, o: Sl2) -> Sl2 {
        Sl2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// An element `(g, h)` of SL(2,R) × SL(2,R).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Element {
    pub left: Sl2,
    pub right: Sl2,
}

impl G2Element {
    pub const IDENTITY: G2Element = G2Element { left: Sl2::IDENTITY, right: Sl2::IDENTITY };

    pub fn new(left: Sl2, right: Sl2) -> Self {
        G2Element { left, right }
    }

    pub fn rotations(omega: f64, chi: f64) -> Self {
        G2Element { left: Sl2::rotation(omega), right: Sl2::rotation(chi) }
    }

    pub fn inverse(&self) -> Self {
        G2Element { left: self.left.inverse(), right: self.right.inverse() }
    }

    pub fn distance(&self, o: &G2Element) -> f64 {
        self.left.distance(&o.left).hypot(self.right.distance(&o.right))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Self {
        G2Element { left: Sl2::random(rng, r), right: Sl2::random(rng, r) }
    }
}

impl Mul for G2Element {
    type Output = G2Element;
    fn mul(self, o: G2Element) -> G2Element {
        compose(&self, &o)
    }
}

/// Componentwise product.
pub fn compose(g1: &G2Element, g2: &G2Element) -> G2Element {
    G2Element { left: g1.left * g2.left, right: g1.right * g2.right }
}

/// A pair of rotation angles with both entries in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationPair {
    omega: f64,
    chi: f64,
}

impl RotationPair {
    pub fn new(omega: f64, chi: f64) -> Self {
        RotationPair { omega: wrap_angle(omega), chi: wrap_angle(chi) }
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn chi(&self) -> f64 {
        self.chi
    }
    pub fn to_element(&self) -> G2Element {
        G2Element::rotations(self.omega, self.chi)
    }
}

/// A positive-definite symmetric unimodular matrix `[[p, q], [q, t]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosSym {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl PosSym {
    pub const IDENTITY: PosSym = PosSym { p: 1.0, q: 0.0, t: 1.0 };

    /// `exp(S)` for `S = [[s1, s2], [s2, -s1]]`.
    pub fn from_log(s1: f64, s2: f64) -> Self {
        let r = s1.hypot(s2);
        let sh = if r < 1e-8 { 1.0 + r * r / 6.0 } else { r.sinh() / r };
        let ch = r.cosh();
        PosSym { p: ch + sh * s1, q: sh * s2, t: ch - sh * s1 }
    }

    /// Inverse of [`PosSym::from_log`].
    pub fn log(&self) -> (f64, f64) {
        let h = (0.5 * (self.p - self.t)).hypot(self.q);
        let r = h.asinh();
        let f = if h < 1e-8 { 1.0 - h * h / 6.0 } else { r / h };
        (f * 0.5 * (self.p - self.t), f * self.q)
    }

    pub fn inverse(&self) -> Self {
        PosSym { p: self.t, q: -self.q, t: self.p }
    }

    pub fn to_sl2(&self) -> Sl2 {
        Sl2::from_raw(self.p, self.q, self.q, self.t)
    }
}

/// `g = κ·R(u)` with `u ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub kappa: PosSym,
    pub u: f64,
}

/// Closed-form polar decomposition: `κ = (g gᵀ)^{1/2} = (g gᵀ + I)/sqrt(tr(g gᵀ) + 2)`,
/// valid because `det(g gᵀ) = 1`.
pub fn polar_decompose(g: &Sl2) -> Polar {
    let m00 = g.a * g.a + g.b * g.b;
    let m01 = g.a * g.c + g.b * g.d;
    let m11 = g.c * g.c + g.d * g.d;
    let tau = (m00 + m11 + 2.0).sqrt();
    let kappa = PosSym { p: (m00 + 1.0) / tau, q: m01 / tau, t: (m11 + 1.0) / tau };
    let r = kappa.inverse().to_sl2() * *g;
    // r = [[cos u, sin u], [-sin u, cos u]]
    let u = wrap_angle((r.b - r.c).atan2(r.a + r.d));
    Polar { kappa, u }
}

const ALG_BASIS: [Sl2; 3] = [
    Sl2::from_raw(0.0, 1.0, 1.0, 0.0),
    Sl2::from_raw(1.0, 0.0, 0.0, -1.0),
    Sl2::from_raw(0.0, 1.0, -1.0, 0.0),
];

/// Coordinates of a traceless matrix in the basis `A1 = [[0,1],[1,0]]`,
/// `A2 = diag(1,-1)`, `A3 = [[0,1],[-1,0]]`.
fn algebra_coords(x: &Sl2) -> [f64; 3] {
    [0.5 * (x.b + x.c), 0.5 * (x.a - x.d), 0.5 * (x.b - x.c)]
}

fn conj(g: &Sl2, x: &Sl2) -> Sl2 {
    *g * *x * g.inverse()
}

/// Matrix of `Ad(e)` in the basis `Ω1..Ω6` (`A1..A3` on the left block, then
/// on the right block). Column `j` holds the coordinates of `Ad(e) Ω_j`.
pub fn adjoint_matrix(e: &G2Element) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    for (block, g) in [e.left, e.right].iter().enumerate() {
        for (j, basis) in ALG_BASIS.iter().enumerate() {
            let c = algebra_coords(&conj(g, basis));
            for (i, v) in c.iter().enumerate() {
                m[(3 * block + i, 3 * block + j)] = *v;
            }
        }
    }
    m
}

/// Chart of SL(2,R) used to express Haar measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaarChart {
    /// Coordinates `(a, b, c)`, density `1/|a|`.
    Abc,
    /// Coordinates `(a, b, d)`, density `1/|b|`.
    Abd,
}

impl HaarChart {
    pub fn name(self) -> &'static str {
        match self {
            HaarChart::Abc => "abc",
            HaarChart::Abd => "abd",
        }
    }

    /// Rebuild a group element from chart coordinates.
    pub fn element(self, x: [f64; 3]) -> Result<Sl2> {
        match self {
            HaarChart::Abc => {
                let [a, b, c] = x;
                if a == 0.0 {
                    return Err(Error::ChartSingular { chart: self.name() });
                }
                Ok(Sl2::from_raw(a, b, c, (1.0 + b * c) / a))
            }
            HaarChart::Abd => {
                let [a, b, d] = x;
                if b == 0.0 {
                    return Err(Error::ChartSingular { chart: self.name() });
                }
                Ok(Sl2::from_raw(a, b, (a * d - 1.0) / b, d))
            }
        }
    }

    pub fn coords(self, g: &Sl2) -> [f64; 3] {
        match self {
            HaarChart::Abc => [g.a, g.b, g.c],
            HaarChart::Abd => [g.a, g.b, g.d],
        }
    }

    /// Haar density at `g` in this chart.
    pub fn density(self, g: &Sl2) -> Result<f64> {
        let x = match self {
            HaarChart::Abc => g.a,
            HaarChart::Abd => g.b,
        };
        if x == 0.0 {
            Err(Error::ChartSingular { chart: self.name() })
        } else {
            Ok(x.abs().recip())
        }
    }
}

/// Haar density `1/|a|` in the `(a, b, c)` chart.
pub fn haar_density(g: &Sl2) -> Result<f64> {
    HaarChart::Abc.density(g)
}

/// Preferred chart at `g` (`abc` when `|a| ≥ |b|`) with its density.
pub fn haar_chart_density(g: &Sl2) -> (HaarChart, f64) {
    let chart = if g.a.abs() >= g.b.abs() { HaarChart::Abc } else { HaarChart::Abd };
    // |a| ≥ |b| and ad - bc = 1 rule out a = 0 in the chosen chart.
    (chart, chart.density(g).unwrap_or(f64::INFINITY))
}

/// Axis-aligned box in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartBox {
    pub chart: HaarChart,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl ChartBox {
    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }

    /// Box centred on the chart coordinates of `g` with half-width `r`.
    pub fn around(chart: HaarChart, g: &Sl2, r: f64) -> Self {
        let c = chart.coords(g);
        ChartBox { chart, lo: c.map(|x| x - r), hi: c.map(|x| x + r) }
    }

    /// Smallest box containing all `points`, padded by `pad`.
    pub fn bounding(chart: HaarChart, points: &[Sl2], pad: f64) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for g in points {
            let c = chart.coords(g);
            for i in 0..3 {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        ChartBox { chart, lo: lo.map(|x| x - pad), hi: hi.map(|x| x + pad) }
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Difference of two independent estimates in units of the combined
    /// standard error.
    pub fn z_score(&self, other: &McEstimate) -> f64 {
        let se = self.std_err.hypot(other.std_err);
        if se == 0.0 {
            if self.value == other.value {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - other.value).abs() / se
        }
    }

    pub(crate) fn from_moments(scale: f64, sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0);
        McEstimate { value: scale * mean, std_err: scale * (var / (nf - 1.0).max(1.0)).sqrt(), samples: n }
    }
}

pub(crate) const MC_TILE: usize = 4096;

/// Estimate `∫ f dg` over the chart box by uniform sampling, weighting each
/// sample with the chart's Haar density. Tile `t` draws from ChaCha stream
/// `t`, so results do not depend on the execution policy.
pub fn haar_integrate_mc<F>(f: F, region: &ChartBox, samples: usize, seed: u64, exec: Exec) -> McEstimate
where
    F: Fn(&Sl2) -> f64 + Sync,
{
    let tiles = samples.div_ceil(MC_TILE);
    let moments = exec::map_indexed(exec, tiles, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let n = MC_TILE.min(samples - t * MC_TILE);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x: [f64; 3] = std::array::from_fn(|i| rng.gen_range(region.lo[i]..region.hi[i]));
            let v = match region.chart.element(x) {
                Ok(g) => f(&g) * region.chart.density(&g).unwrap_or(0.0),
                Err(_) => 0.0,
            };
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = moments.iter().fold((0.0, 0.0), |acc, m| (acc.0 + m.0, acc.1 + m.1));
    McEstimate::from_moments(region.volume(), s, s2, samples)
}
