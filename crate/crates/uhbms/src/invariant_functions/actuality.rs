//! Which rotation pairs fix a given function. On the half-angle torus
//! `(a, b) = (ρ/2, σ/2)` the dual action of `(R(ω), R(χ))` is the shift by
//! `(ω, χ)` of the odd lift `Φ(a, b) = ς(a) ς(b) φ(2a, 2b)`, so every residual
//! `‖T′(R(ω), R(χ))φ − φ‖²` on an `n × n` shift grid follows from one
//! autocorrelation: `2‖Φ‖² − 2 C(ω, χ)`.

use std::collections::HashSet;
use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{for_each_chunk_mut, map_indexed, sum_indexed, Exec};
use crate::little_groups::{LittleGroupSpec, OrientationCase};
use crate::torus_action::{dual_rotation_at, sign_sin, TorusFunction, TorusGrid};

use super::{build_fixed_function, GeneratorFunction};

/// Residuals on the shift grid `(ω_i, χ_j) = (i, j)·2π/n`, row-major in `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualField {
    pub n: usize,
    pub values: Vec<f64>,
}

impl ResidualField {
    pub fn h(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

fn fft_rows(exec: Exec, data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for_each_chunk_mut(exec, data, n, |_, row| fft.process(row));
}

fn transpose(data: &[Complex<f64>], n: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}

fn fft2(exec: Exec, data: &mut Vec<Complex<f64>>, n: usize, inverse: bool) {
    fft_rows(exec, data, n, inverse);
    let mut t = transpose(data, n);
    fft_rows(exec, &mut t, n, inverse);
    *data = transpose(&t, n);
}

/// All residuals `‖T′(R(ω), R(χ))f − f‖` on the `n × n` shift grid, with
/// the lift sampled at the midpoints `(i + ½)·2π/n`.
pub fn residual_field<F: TorusFunction + ?Sized>(f: &F, n: usize, exec: Exec) -> ResidualField {
    let h = TAU / n as f64;
    let lift: Vec<Complex<f64>> = map_indexed(exec, n * n, |k| {
        let a = ((k / n) as f64 + 0.5) * h;
        let b = ((k % n) as f64 + 0.5) * h;
        Complex::new(sign_sin(a) * sign_sin(b) * f.eval(2.0 * a, 2.0 * b), 0.0)
    });
    let cell = h * h;
    let energy: f64 = lift.iter().map(|z| z.re * z.re).sum::<f64>() * cell;
    let mut spec = lift;
    fft2(exec, &mut spec, n, false);
    for z in spec.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    fft2(exec, &mut spec, n, true);
    // Unnormalized inverse: C(s) = Σ_x Φ(x + s)Φ(x) · n².
    let scale = cell / (n * n) as f64;
    let values = spec.iter().map(|z| (2.0 * energy - 2.0 * z.re * scale).max(0.0).sqrt()).collect();
    ResidualField { n, values }
}

/// The same residual by direct quadrature on a torus grid.
pub fn direct_residual<F: TorusFunction + ?Sized>(f: &F, omega: f64, chi: f64, grid: TorusGrid, exec: Exec) -> f64 {
    let n = grid.n;
    let s = sum_indexed(exec, n * n, |k| {
        let (r, t) = (grid.node(k / n), grid.node(k % n));
        let d = dual_rotation_at(omega, chi, f, r, t) - f.eval(r, t);
        d * d
    });
    (s * grid.cell_area()).sqrt()
}

/// Change `δ` of the frame coordinate `u` under the shift `(ω, χ)`.
pub fn u_shift(case: OrientationCase, q: f64, omega: f64, chi: f64) -> f64 {
    let (dr, ds) = (2.0 * omega, 2.0 * chi);
    match case {
        OrientationCase::One => ds - q * dr,
        OrientationCase::Two => dr - q * ds,
        OrientationCase::Three => ds + q * dr,
        OrientationCase::Four => -dr - q * ds,
    }
}

/// Closed-form residual for the sine witness, `2√2 π |sin(A δ/2)|` with
/// `A = q0 N′/2`.
pub fn witness_residual(spec: &LittleGroupSpec, omega: f64, chi: f64) -> f64 {
    let a = 0.5 * (spec.q0() * spec.n_prime()) as f64;
    let d = u_shift(spec.case(), spec.q(), omega, chi);
    2.0 * SQRT_2 * PI * (0.5 * a * d).sin().abs()
}

/// Lipschitz constant of the witness residual in `(ω, χ)`:
/// `√2 π q0 N′ √(1 + q²)`.
pub fn witness_lipschitz(spec: &LittleGroupSpec) -> f64 {
    let q = spec.q();
    SQRT_2 * PI * (spec.q0() * spec.n_prime()) as f64 * (1.0 + q * q).sqrt()
}

/// Result of scanning the shift grid for pairs fixing the witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActualityScan {
    pub spec: LittleGroupSpec,
    pub n: usize,
    pub h: f64,
    /// Tolerance factor: `tol = c · L · h`.
    pub c: f64,
    pub tol: f64,
    /// Grid indices `(i, j)` with residual below `tol`.
    pub nodes: Vec<(usize, usize)>,
    /// Components of the fixed set (8-connected, periodic).
    pub components: usize,
    /// Components the family `{(R(aθ), R(bθ + 2πν/N))}` has on the torus.
    pub expected_components: usize,
    /// Largest distance from a returned node to the family, in units of `h`.
    pub soundness: f64,
    /// Largest distance from a family sample to the nearest returned node,
    /// in units of `h`.
    pub completeness: f64,
    /// Largest gap between the FFT residual and the closed form.
    pub closed_form_gap: f64,
}

impl ActualityScan {
    /// Matches the family within one grid cell and has no extra components.
    pub fn passes(&self) -> bool {
        self.soundness <= 1.0 && self.completeness <= 1.0 && self.components == self.expected_components
    }
}

fn count_components(mask: &[bool], n: usize) -> usize {
    let mut seen = vec![false; n * n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n * n {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = ((k / n) as isize, (k % n) as isize);
            for di in -1..=1isize {
                for dj in -1..=1isize {
                    let ii = (i + di).rem_euclid(n as isize) as usize;
                    let jj = (j + dj).rem_euclid(n as isize) as usize;
                    let kk = ii * n + jj;
                    if mask[kk] && !seen[kk] {
                        seen[kk] = true;
                        stack.push(kk);
                    }
                }
            }
        }
    }
    count
}

/// Scan `(ω, χ) ∈ [0, 2π)²` on an `n × n` grid for pairs that fix the
/// spec's witness fixed function.
pub fn actuality_scan(spec: &LittleGroupSpec, n: usize, c: f64, exec: Exec) -> Result<ActualityScan> {
    let phi = build_fixed_function(spec, &GeneratorFunction::witness(spec))?;
    let field = residual_field(&phi, n, exec);
    let h = field.h();
    let tol = c * witness_lipschitz(spec) * h;
    let mask: Vec<bool> = field.values.iter().map(|&r| r < tol).collect();
    let nodes: Vec<(usize, usize)> = (0..n * n).filter(|&k| mask[k]).map(|k| (k / n, k % n)).collect();
    let group = spec.group();

    let closed_form_gap = map_indexed(exec, n, |i| {
        (0..n)
            .map(|j| (field.at(i, j) - witness_residual(spec, i as f64 * h, j as f64 * h)).abs())
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max);

    let soundness = nodes
        .iter()
        .map(|&(i, j)| group.angle_distance(i as f64 * h, j as f64 * h) / h)
        .fold(0.0, f64::max);

    // Sample each family line densely and look for a node within h.
    let set: HashSet<(usize, usize)> = nodes.iter().copied().collect();
    let (a, b) = (group.q, group.p);
    let len = TAU * ((a * a + b * b) as f64).sqrt();
    let steps = (4.0 * len / h).ceil() as usize;
    let probe = |w: f64, x: f64| -> f64 {
        let (ci, cj) = ((w / h).round() as isize, (x / h).round() as isize);
        let mut best = f64::INFINITY;
        for di in -2..=2isize {
            for dj in -2..=2isize {
                let (ii, jj) = (ci + di, cj + dj);
                let key = (ii.rem_euclid(n as isize) as usize, jj.rem_euclid(n as isize) as usize);
                if set.contains(&key) {
                    best = best.min(((ii as f64 * h - w).powi(2) + (jj as f64 * h - x).powi(2)).sqrt());
                }
            }
        }
        best / h
    };
    let completeness = (0..spec.n() as i64)
        .flat_map(|nu| (0..steps).map(move |k| (nu, k)))
        .map(|(nu, k)| {
            let (w, x) = group.angles(TAU * k as f64 / steps as f64, nu);
            probe(w.rem_euclid(TAU), x.rem_euclid(TAU))
        })
        .fold(0.0, f64::max);

    // The family is the set `p ω − q χ ∈ (2π gcd(q′, N)/N)·Z`, `q′ = q/gcd(q, p)`.
    let qa = a / a.gcd(&b);
    let expected_components = (spec.n() as i64 / qa.gcd(&(spec.n() as i64))) as usize;

    Ok(ActualityScan {
        spec: *spec,
        n,
        h,
        c,
        tol,
        components: count_components(&mask, n),
        expected_components,
        nodes,
        soundness,
        completeness,
        closed_form_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_has_zero_residual() {
        let spec = LittleGroupSpec::new(3, 1, 3, OrientationCase::One).unwrap();
        let phi = build_fixed_function(&spec, &GeneratorFunction::witness(&spec)).unwrap();
        let f = residual_field(&phi, 64, Exec::default());
        assert!(f.at(0, 0) < 1e-6);
        assert_eq!(witness_residual(&spec, 0.0, 0.0), 0.0);
    }

    #[test]
    fn fft_agrees_with_direct_and_closed_form() {
        for case in OrientationCase::ALL {
            let spec = LittleGroupSpec::new(5, 1, 3, case).unwrap();
            let phi = build_fixed_function(&spec, &GeneratorFunction::witness(&spec)).unwrap();
            let f = residual_field(&phi, 128, Exec::default());
            let h = f.h();
            for &(i, j) in &[(3, 7), (40, 11), (100, 64), (0, 1)] {
                let (w, c) = (i as f64 * h, j as f64 * h);
                let closed = witness_residual(&spec, w, c);
                assert_abs_diff_eq!(f.at(i, j), closed, epsilon = 1e-6);
                let direct = direct_residual(&phi, w, c, TorusGrid::new(256), Exec::default());
                assert_abs_diff_eq!(direct, closed, epsilon = 2e-2);
            }
        }
    }

    #[test]
    fn unit_slope_scan_is_the_diagonal() {
        let spec = LittleGroupSpec::new(1, 1, 1, OrientationCase::One).unwrap();
        let s = actuality_scan(&spec, 128, 0.75, Exec::default()).unwrap();
        // The band admits the off-diagonal neighbours at distance h/√2.
        assert!(s.nodes.iter().all(|&(i, j)| matches!((j + 128 - i) % 128, 0 | 1 | 127)));
        assert!((0..128).all(|i| s.nodes.contains(&(i, i))));
        assert!(s.passes(), "{} {} {} {}", s.soundness, s.completeness, s.components, s.expected_components);
    }

    #[test]
    fn three_parallel_lines() {
        let spec = LittleGroupSpec::new(3, 1, 1, OrientationCase::One).unwrap();
        let s = actuality_scan(&spec, 192, 0.75, Exec::default()).unwrap();
        assert_eq!(s.components, 3);
        assert!(s.passes(), "{} {}", s.soundness, s.completeness);
        for &(i, j) in &s.nodes {
            assert!(matches!((j + 192 - i) % 64, 0 | 1 | 63));
        }
    }

    #[test]
    fn components_wrap() {
        let n = 8;
        let mut m = vec![false; n * n];
        m[0] = true;
        m[n * n - 1] = true;
        m[3 * n + 3] = true;
        assert_eq!(count_components(&m, n), 2);
    }
}
