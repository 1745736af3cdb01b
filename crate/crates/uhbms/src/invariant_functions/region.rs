//! Fundamental parallelograms of the period lattice of the fixed functions,
//! with vertices held exactly as rational multiples of π.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::little_groups::OrientationCase;

type R = Ratio<i64>;

/// A point `(ρ, σ) = π·(x, y)` with rational `x, y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiPoint {
    pub x: R,
    pub y: R,
}

impl PiPoint {
    pub fn new(x: R, y: R) -> Self {
        PiPoint { x, y }
    }
    pub fn origin() -> Self {
        PiPoint { x: R::from_integer(0), y: R::from_integer(0) }
    }
    pub fn to_f64(&self) -> (f64, f64) {
        let f = |r: R| PI * (*r.numer() as f64) / (*r.denom() as f64);
        (f(self.x), f(self.y))
    }
    fn add(&self, o: &PiPoint) -> PiPoint {
        PiPoint { x: self.x + o.x, y: self.y + o.y }
    }
    /// Reflection across `ρ = σ`.
    pub fn swap(&self) -> PiPoint {
        PiPoint { x: self.y, y: self.x }
    }
    /// Reflection across `ρ = 0`.
    pub fn mirror_rho(&self) -> PiPoint {
        PiPoint { x: -self.x, y: self.y }
    }
    /// Reflection across `σ = −ρ`.
    pub fn mirror_anti(&self) -> PiPoint {
        PiPoint { x: -self.y, y: -self.x }
    }
}

/// A side line `a ρ + b σ = c π` with integer-normalized rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLine {
    pub a: R,
    pub b: R,
    pub c: R,
}

impl EdgeLine {
    fn through(p: &PiPoint, q: &PiPoint) -> Self {
        let a = q.y - p.y;
        let b = p.x - q.x;
        let c = a * p.x + b * p.y;
        EdgeLine { a, b, c }.normalized()
    }

    /// Scale so that the σ coefficient is 1 (or ρ's when σ is absent).
    fn normalized(self) -> Self {
        let s = if self.b != R::from_integer(0) { self.b } else { self.a };
        EdgeLine { a: self.a / s, b: self.b / s, c: self.c / s }
    }

    /// True when `p` lies on the line.
    pub fn contains(&self, p: &PiPoint) -> bool {
        self.a * p.x + self.b * p.y == self.c
    }
}

impl fmt::Display for EdgeLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = R::from_integer(0);
        if self.b == zero {
            return write!(f, "rho = {}pi", self.c / self.a);
        }
        // σ = -aρ + cπ
        write!(f, "sigma = {}*rho", -self.a)?;
        if self.c != zero {
            write!(f, " + {}pi", self.c)?;
        }
        Ok(())
    }
}

/// The parallelogram `O, Γ, B, A` with `B = A + Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalRegion {
    pub case: OrientationCase,
    pub o: PiPoint,
    pub a: PiPoint,
    pub b: PiPoint,
    pub gamma: PiPoint,
}

/// `F_i` for the pair `(q0, p0)`: `F1` has `A1 = (−q c, c)` with
/// `c = 2π/((1 + q²) q0)` and `Γ1 = (2π q0, 2π p0)`. The other regions are
/// mirror images: `F2` across `ρ = σ`, `F3` across `ρ = 0`, `F4 = F3`
/// reflected across `σ = −ρ`.
pub fn fundamental_region(case: OrientationCase, q0: u32, p0: u32) -> FundamentalRegion {
    let (q0, p0) = (q0 as i64, p0 as i64);
    let s = q0 * q0 + p0 * p0;
    // c/π = 2 q0 / (q0² + p0²), q c/π = 2 p0 / (q0² + p0²)
    let a1 = PiPoint::new(R::new(-2 * p0, s), R::new(2 * q0, s));
    let g1 = PiPoint::new(R::from_integer(2 * q0), R::from_integer(2 * p0));
    let map = |p: PiPoint| match case {
        OrientationCase::One => p,
        OrientationCase::Two => p.swap(),
        OrientationCase::Three => p.mirror_rho(),
        OrientationCase::Four => p.mirror_rho().mirror_anti(),
    };
    let a = map(a1);
    let gamma = map(g1);
    FundamentalRegion { case, o: PiPoint::origin(), a, b: a.add(&gamma), gamma }
}

impl FundamentalRegion {
    /// Vertices in boundary order `O, Γ, B, A`.
    pub fn vertices(&self) -> [PiPoint; 4] {
        [self.o, self.gamma, self.b, self.a]
    }

    /// Exact shoelace area in units of π².
    pub fn area_pi2(&self) -> R {
        let v = self.vertices();
        let mut s = R::from_integer(0);
        for i in 0..4 {
            let (p, q) = (v[i], v[(i + 1) % 4]);
            s += p.x * q.y - q.x * p.y;
        }
        let s = s / R::from_integer(2);
        if s < R::from_integer(0) {
            -s
        } else {
            s
        }
    }

    /// Side lines `OΓ, ΓB, BA, AO`.
    pub fn edges(&self) -> [(&'static str, EdgeLine); 4] {
        [
            ("O-Gamma", EdgeLine::through(&self.o, &self.gamma)),
            ("Gamma-B", EdgeLine::through(&self.gamma, &self.b)),
            ("B-A", EdgeLine::through(&self.b, &self.a)),
            ("A-O", EdgeLine::through(&self.a, &self.o)),
        ]
    }

    /// Affine coordinates `(s, t)` with `p = s A + t Γ`.
    pub fn affine_coords(&self, rho: f64, sigma: f64) -> (f64, f64) {
        let (ax, ay) = self.a.to_f64();
        let (gx, gy) = self.gamma.to_f64();
        let det = ax * gy - ay * gx;
        ((rho * gy - sigma * gx) / det, (ax * sigma - ay * rho) / det)
    }

    /// Membership in the half-open parallelogram `{s A + t Γ : s, t ∈ [0, 1)}`.
    pub fn contains_half_open(&self, rho: f64, sigma: f64) -> bool {
        let (s, t) = self.affine_coords(rho, sigma);
        (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t)
    }

    /// Lattice shifts `(m, n)` for which `p + 2π(m, n)` lies in the region.
    pub fn representatives(&self, rho: f64, sigma: f64, search: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for m in -search..=search {
            for n in -search..=search {
                let (r, s) = (rho + 2.0 * PI * m as f64, sigma + 2.0 * PI * n as f64);
                if self.contains_half_open(r, s) {
                    out.push((m, n));
                }
            }
        }
        out
    }
}
