//! Fixed-order product rules on the sphere (Gauss–Legendre in `cos θ`,
//! trapezoid in `φ`) and on the Gaussian-weighted plane (Gauss–Laguerre in
//! `|z|²`, trapezoid in `arg z`). All measures are normalized to total mass 1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::sphere::{PhiPeriod, SpherePoint};
use crate::Complex;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Nodes and weights of the `n`-point Gauss–Laguerre rule for `∫_0^∞ e^{-u} g(u) du`,
/// from the eigen-decomposition of the Jacobi matrix.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, k| {
        if i == k {
            (2 * i + 1) as f64
        } else if i.abs_diff(k) == 1 {
            i.max(k) as f64
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Compensated (Neumaier) accumulator for complex sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex,
    carry: Complex,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex) {
        fn step(s: &mut f64, c: &mut f64, x: f64) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
        step(&mut self.sum.re, &mut self.carry.re, x.re);
        step(&mut self.sum.im, &mut self.carry.im, x.im);
    }

    pub fn value(&self) -> Complex {
        self.sum + self.carry
    }
}

/// Product grid on the sphere or its doubled cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub phi_period: PhiPeriod,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize, phi_period: PhiPeriod) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return domain(format!("empty sphere grid {n_theta}x{n_phi}"));
        }
        Ok(SphereGrid {
            n_theta,
            n_phi,
            phi_period,
        })
    }

    /// A grid that integrates `Ȳ_{jμ} Y_{jν} Y_{ℓm}` exactly for `ℓ ≤ ell_max`,
    /// with a few nodes to spare.
    pub fn auto(two_j: u32, ell_max: u32) -> Self {
        let period = if two_j.is_multiple_of(2) {
            PhiPeriod::Single
        } else {
            PhiPeriod::Doubled
        };
        SphereGrid {
            n_theta: (two_j + ell_max + 4) as usize,
            n_phi: (2 * two_j + 2 * ell_max + 4) as usize,
            phi_period: period,
        }
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes with weights summing to 1, θ-major order.
    pub fn nodes(&self) -> Vec<(SpherePoint, f64)> {
        let (u, w) = gauss_legendre(self.n_theta);
        let dphi = self.phi_period.length() / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.len());
        for (ui, wi) in u.iter().zip(&w) {
            let theta = ui.clamp(-1.0, 1.0).acos();
            let weight = wi / 2.0 / self.n_phi as f64;
            for k in 0..self.n_phi {
                out.push((SpherePoint::new(theta, k as f64 * dphi), weight));
            }
        }
        out
    }
}

fn non_finite(index: usize, x: SpherePoint, value: Complex) -> Error {
    Error::NonFinite {
        index,
        theta: x.theta,
        phi: x.phi,
        value: value.to_string(),
    }
}

/// `∫ f dμ` under the normalized measure `sin θ dθ dφ / (period · 2)`.
pub fn integrate_sphere<F>(f: F, grid: &SphereGrid) -> Result<Complex>
where
    F: Fn(SpherePoint) -> Complex,
{
    let mut acc = CompensatedSum::default();
    for (index, (x, w)) in grid.nodes().into_iter().enumerate() {
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(non_finite(index, x, v));
        }
        acc.add(v * w);
    }
    Ok(acc.value())
}

/// Integrates a vector-valued function; `f` writes `len` components per node.
pub fn integrate_sphere_vec<F>(f: F, len: usize, grid: &SphereGrid) -> Result<Vec<Complex>>
where
    F: Fn(SpherePoint, &mut [Complex]),
{
    let mut acc = vec![CompensatedSum::default(); len];
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (index, (x, w)) in grid.nodes().into_iter().enumerate() {
        buf.iter_mut().for_each(|b| *b = Complex::new(0.0, 0.0));
        f(x, &mut buf);
        for (a, &v) in acc.iter_mut().zip(&buf) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(non_finite(index, x, v));
            }
            a.add(v * w);
        }
    }
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

/// Same result as [`integrate_sphere_vec`], bit for bit: node values are
/// computed in parallel, the reduction stays sequential in node order.
pub fn integrate_sphere_vec_par<F>(f: F, len: usize, grid: &SphereGrid) -> Result<Vec<Complex>>
where
    F: Fn(SpherePoint, &mut [Complex]) + Sync,
{
    let nodes = grid.nodes();
    let values: Vec<Vec<Complex>> = nodes
        .par_iter()
        .map(|(x, _)| {
            let mut buf = vec![Complex::new(0.0, 0.0); len];
            f(*x, &mut buf);
            buf
        })
        .collect();
    let mut acc = vec![CompensatedSum::default(); len];
    for (index, ((x, w), vals)) in nodes.iter().zip(&values).enumerate() {
        for (a, &v) in acc.iter_mut().zip(vals) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(non_finite(index, *x, v));
            }
            a.add(v * *w);
        }
    }
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

/// Product grid for the Gaussian measure `(1/π) e^{-|z|²} d²z` on ℂ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneGrid {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl PlaneGrid {
    pub fn new(n_radial: usize, n_angular: usize) -> Result<Self> {
        if n_radial == 0 || n_angular == 0 {
            return domain(format!("empty plane grid {n_radial}x{n_angular}"));
        }
        Ok(PlaneGrid {
            n_radial,
            n_angular,
        })
    }

    /// Nodes `z = √u e^{iθ}` with weights summing to 1.
    pub fn nodes(&self) -> Vec<(Complex, f64)> {
        let (u, w) = gauss_laguerre(self.n_radial);
        let dt = 2.0 * PI / self.n_angular as f64;
        let mut out = Vec::with_capacity(self.n_radial * self.n_angular);
        for (ui, wi) in u.iter().zip(&w) {
            for k in 0..self.n_angular {
                out.push((Complex::from_polar(ui.sqrt(), k as f64 * dt), wi / self.n_angular as f64));
            }
        }
        out
    }
}

pub fn integrate_plane<F>(f: F, grid: &PlaneGrid) -> Complex
where
    F: Fn(Complex) -> Complex,
{
    let mut acc = CompensatedSum::default();
    for (z, w) in grid.nodes() {
        acc.add(f(z) * w);
    }
    acc.value()
}
