//! Coherent states built from spin spherical harmonics and the quantization
//! map `f ↦ A_f = ∫ N(x) f(x) |x⟩⟨x| dΩ`, by quadrature and in closed form.
//! Also a small truncated-Fock check of the plane construction.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::algebra::HalfInt;
use crate::error::{domain, Error, Result};
use crate::operator::OperatorMatrix;
use crate::quad::{integrate_plane, integrate_sphere_vec_par, PlaneGrid, SphereGrid};
use crate::sphere::{PhiPeriod, SpherePoint};
use crate::ssh::{lambda_matrices, ssh_eval, ssh_values, SshParams};
use crate::wigner::{three_j, ThreeJKey};
use crate::Complex;

const FOUR_PI: f64 = 4.0 * PI;

/// `N(x) = (2j+1)/4π`, the same at every point.
pub fn cs_normalization(params: &SshParams) -> f64 {
    (params.two_j as f64 + 1.0) / FOUR_PI
}

/// `|x⟩` in the SSH basis: component `μ` is `σY_{jμ}(x)* / √N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    pub two_j: u32,
    pub two_sigma: i32,
    pub amplitudes: Vec<Complex>,
}

impl CoherentState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CoherentState) -> Complex {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨x|O|x⟩`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<Complex> {
        if op.dim() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: op.dim(),
            });
        }
        let m = op.entries();
        let mut acc = Complex::new(0.0, 0.0);
        for (r, a) in self.amplitudes.iter().enumerate() {
            for (c, b) in self.amplitudes.iter().enumerate() {
                acc += a.conj() * m[(r, c)] * b;
            }
        }
        Ok(acc)
    }
}

pub fn coherent_state(params: &SshParams, x: SpherePoint) -> CoherentState {
    let values = ssh_values(params, x);
    let n = cs_normalization(params);
    debug_assert!({
        let from_sum: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        (from_sum - n).abs() < 1e-10 * n
    });
    let scale = 1.0 / n.sqrt();
    CoherentState {
        two_j: params.two_j,
        two_sigma: params.two_sigma,
        amplitudes: values.iter().map(|v| v.conj() * scale).collect(),
    }
}

/// `K(x, x') = √(N(x) N(x')) ⟨x|x'⟩ = Σ_μ σY_{jμ}(x) σY_{jμ}(x')*`.
pub fn reproducing_kernel(params: &SshParams, x: SpherePoint, y: SpherePoint) -> Complex {
    let a = ssh_values(params, x);
    let b = ssh_values(params, y);
    a.iter().zip(&b).map(|(p, q)| p * q.conj()).sum()
}

fn check_grid(params: &SshParams, grid: &SphereGrid) -> Result<()> {
    if grid.phi_period != params.period() {
        return domain(format!(
            "grid period {:?} does not match spin j = {} (expected {:?})",
            grid.phi_period,
            params.j(),
            params.period()
        ));
    }
    Ok(())
}

/// `[A_f]_{μν} = ∫ f(x) σY_{jμ}(x)* σY_{jν}(x) dΩ`, by quadrature. Certified
/// Hermitian when `f` is real on every node and the residual is below 1e-12.
pub fn quantize_quadrature<F>(params: &SshParams, f: F, grid: &SphereGrid) -> Result<OperatorMatrix>
where
    F: Fn(SpherePoint) -> Complex + Sync,
{
    check_grid(params, grid)?;
    let d = params.dim();
    let sums = integrate_sphere_vec_par(
        |x, out| {
            let fx = f(x);
            let y = ssh_values(params, x);
            for r in 0..d {
                for c in 0..d {
                    out[r * d + c] = fx * y[r].conj() * y[c];
                }
            }
            out[d * d] = Complex::new(fx.im.abs(), 0.0);
        },
        d * d + 1,
        grid,
    )?;
    let entries = DMatrix::from_fn(d, d, |r, c| sums[r * d + c] * FOUR_PI);
    let op = OperatorMatrix::new(params.two_j, entries)?;
    Ok(if sums[d * d].re == 0.0 {
        op.certify_hermitian(1e-12)
    } else {
        op
    })
}

/// `A_f = ∫ N(x) f(x) |x⟩⟨x| dΩ` assembled from coherent-state projectors,
/// the defining form of the map with `f` as upper symbol.
pub fn quantize_via_projectors<F>(params: &SshParams, f: F, grid: &SphereGrid) -> Result<OperatorMatrix>
where
    F: Fn(SpherePoint) -> Complex + Sync,
{
    check_grid(params, grid)?;
    let d = params.dim();
    let n = cs_normalization(params);
    let sums = integrate_sphere_vec_par(
        |x, out| {
            let cs = coherent_state(params, x);
            let fx = f(x) * n;
            for r in 0..d {
                for c in 0..d {
                    out[r * d + c] = fx * cs.amplitudes[r] * cs.amplitudes[c].conj();
                }
            }
        },
        d * d,
        grid,
    )?;
    OperatorMatrix::new(params.two_j, DMatrix::from_fn(d, d, |r, c| sums[r * d + c] * FOUR_PI))
}

/// `Ỹ_{ℓm}` from the 3j closed form
/// `(-1)^{σ-μ} (2j+1) √((2ℓ+1)/4π) (j j ℓ; -μ ν m) (j j ℓ; -σ σ 0)`;
/// the zero matrix for `ℓ > 2j`.
pub fn quantize_ylm_closed(params: &SshParams, ell: u32, m: i32) -> Result<OperatorMatrix> {
    if m.unsigned_abs() > ell {
        return domain(format!("|m| = {} exceeds ℓ = {ell}", m.abs()));
    }
    if ell > params.two_j {
        return Ok(OperatorMatrix::zeros(params.two_j));
    }
    let (j, s) = (params.j(), params.sigma());
    let l = HalfInt::from_int(ell as i32);
    let mh = HalfInt::from_int(m);
    let reduced = three_j(&ThreeJKey::new([j, j, l], [-s, s, HalfInt::ZERO]))?.to_f64();
    let scale = (params.two_j as f64 + 1.0) * ((2.0 * ell as f64 + 1.0) / FOUR_PI).sqrt() * reduced;
    let mut err = None;
    let op = OperatorMatrix::from_fn(params.two_j, |mu, nu| {
        if mu != nu + mh || reduced == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let sign = match (s - mu).minus_one_pow() {
            Ok(v) => f64::from(v),
            Err(e) => {
                err = Some(e);
                0.0
            }
        };
        match three_j(&ThreeJKey::new([j, j, l], [-mu, nu, mh])) {
            Ok(v) => Complex::new(sign * scale * v.to_f64(), 0.0),
            Err(e) => {
                err = Some(e);
                Complex::new(0.0, 0.0)
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(op),
    }
}

/// Finite expansion `f = Σ f_{ℓm} Y_{ℓm}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HarmonicExpansion {
    terms: BTreeMap<(u32, i32), Complex>,
}

impl HarmonicExpansion {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff` to the `(ℓ, m)` coefficient.
    pub fn add(&mut self, ell: u32, m: i32, coeff: Complex) -> Result<()> {
        if m.unsigned_abs() > ell {
            return domain(format!("|m| = {} exceeds ℓ = {ell}", m.abs()));
        }
        *self.terms.entry((ell, m)).or_insert(Complex::new(0.0, 0.0)) += coeff;
        Ok(())
    }

    pub fn with(mut self, ell: u32, m: i32, coeff: Complex) -> Result<Self> {
        self.add(ell, m, coeff)?;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, i32), Complex)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise value, using `Y_{ℓm} = 0Y_{ℓm}`.
    pub fn eval(&self, x: SpherePoint) -> Complex {
        self.terms()
            .map(|((l, m), c)| {
                let p = SshParams::new(2 * l, 0).expect("integer spin");
                c * ssh_eval(&p, HalfInt::from_int(m), x).expect("valid projection")
            })
            .sum()
    }
}

impl FromStr for HarmonicExpansion {
    type Err = Error;

    /// Terms `l:m:re` or `l:m:re:im`, separated by commas or whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = HarmonicExpansion::new();
        for term in s.split([',', ' ', ';']).filter(|t| !t.is_empty()) {
            let parts: Vec<&str> = term.split(':').collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(Error::Parse(format!("term `{term}` is not l:m:re[:im]")));
            }
            let bad = |p: &str| Error::Parse(format!("bad number `{p}` in `{term}`"));
            let ell: u32 = parts[0].parse().map_err(|_| bad(parts[0]))?;
            let m: i32 = parts[1].parse().map_err(|_| bad(parts[1]))?;
            let re: f64 = parts[2].parse().map_err(|_| bad(parts[2]))?;
            let im: f64 = match parts.get(3) {
                Some(p) => p.parse().map_err(|_| bad(p))?,
                None => 0.0,
            };
            out.add(ell, m, Complex::new(re, im))?;
        }
        Ok(out)
    }
}

impl fmt::Display for HarmonicExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|((l, m), c)| format!("{l}:{m}:{}:{}", c.re, c.im))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Result of quantizing an expansion: the operator and the terms dropped
/// because `ℓ > 2j`.
#[derive(Clone, Debug)]
pub struct QuantizedExpansion {
    pub matrix: OperatorMatrix,
    pub truncated: Vec<((u32, i32), Complex)>,
}

pub fn quantize_expansion(params: &SshParams, f: &HarmonicExpansion) -> Result<QuantizedExpansion> {
    let mut entries = DMatrix::zeros(params.dim(), params.dim());
    let mut truncated = Vec::new();
    for ((l, m), c) in f.terms() {
        if l > params.two_j {
            truncated.push(((l, m), c));
            continue;
        }
        entries += quantize_ylm_closed(params, l, m)?.entries() * c;
    }
    Ok(QuantizedExpansion {
        matrix: OperatorMatrix::new(params.two_j, entries)?,
        truncated,
    })
}

/// The quadrature matrix of `νY_{kn}`; no closed form is used.
pub fn quantize_ssh_general(
    params: &SshParams,
    nu: HalfInt,
    k: HalfInt,
    n: HalfInt,
    grid: &SphereGrid,
) -> Result<OperatorMatrix> {
    if k < HalfInt::ZERO {
        return domain(format!("negative spin k = {k}"));
    }
    let inner = SshParams::new(k.twice() as u32, nu.twice())?;
    if !k.same_parity(n) || n.abs() > k {
        return domain(format!("n = {n} is not a projection of k = {k}"));
    }
    let doubled = !params.j().is_integer() || !k.is_integer();
    let expected = if doubled {
        PhiPeriod::Doubled
    } else {
        PhiPeriod::Single
    };
    if grid.phi_period != expected {
        return domain(format!("grid period {:?}, expected {expected:?}", grid.phi_period));
    }
    let f = |x: SpherePoint| ssh_eval(&inner, n, x).expect("validated projection");
    quantize_on(params, f, grid)
}

fn quantize_on<F>(params: &SshParams, f: F, grid: &SphereGrid) -> Result<OperatorMatrix>
where
    F: Fn(SpherePoint) -> Complex + Sync,
{
    let d = params.dim();
    let sums = integrate_sphere_vec_par(
        |x, out| {
            let fx = f(x);
            let y = ssh_values(params, x);
            for r in 0..d {
                for c in 0..d {
                    out[r * d + c] = fx * y[r].conj() * y[c];
                }
            }
        },
        d * d,
        grid,
    )?;
    OperatorMatrix::new(params.two_j, DMatrix::from_fn(d, d, |r, c| sums[r * d + c] * FOUR_PI))
}

/// `⟨x|O|x⟩`.
pub fn lower_symbol(params: &SshParams, op: &OperatorMatrix, x: SpherePoint) -> Result<Complex> {
    if op.two_j() != params.two_j {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: op.dim(),
        });
    }
    coherent_state(params, x).expectation(op)
}

/// `ℒ_a O = [Λ_a, O]`.
pub fn superop_action(params: &SshParams, axis: usize, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    if !(1..=3).contains(&axis) {
        return domain(format!("axis must be 1, 2 or 3, got {axis}"));
    }
    lambda_matrices(params).axis(axis).commutator(op)
}

/// `ℒ² O = Σ_a [Λ_a, [Λ_a, O]]`.
pub fn superop_casimir(params: &SshParams, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    let lam = lambda_matrices(params);
    let mut acc = OperatorMatrix::zeros(params.two_j);
    for a in lam.axes() {
        let inner = a.commutator(op)?;
        acc = acc.try_add(&a.commutator(&inner)?)?;
    }
    Ok(acc)
}

/// Truncated Fock space `span{|0⟩, …, |n_max⟩}` with its standard operators.
#[derive(Clone, Debug)]
pub struct FockDemoSpace {
    pub n_max: usize,
    pub a: DMatrix<Complex>,
    pub a_dag: DMatrix<Complex>,
    pub q: DMatrix<Complex>,
    pub p: DMatrix<Complex>,
    pub number: DMatrix<Complex>,
}

#[derive(Clone, Debug)]
pub struct FockReport {
    /// Largest `|(A_z)_{mn} - a_{mn}|` with `A_z` from plane quadrature.
    pub a_quadrature_deviation: f64,
    /// `[Q, P]` minus `i·Id` on the leading `n_max × n_max` block.
    pub commutator_block_deviation: f64,
    /// The `(n_max, n_max)` entry of `[Q, P]`.
    pub commutator_corner: Complex,
    /// Every entry of `a` equals `√n` on the superdiagonal, bit for bit.
    pub lowering_exact: bool,
    pub number_deviation: f64,
}

pub fn fock_demo(n_max: usize, grid: &PlaneGrid) -> Result<(FockDemoSpace, FockReport)> {
    if n_max < 2 {
        return domain(format!("n_max = {n_max} is below 2"));
    }
    let dim = n_max + 1;
    let a = DMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            Complex::new((c as f64).sqrt(), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let a_dag = a.adjoint();
    let root2 = std::f64::consts::SQRT_2;
    let q = (&a + &a_dag) / Complex::new(root2, 0.0);
    let p = (&a - &a_dag) / Complex::new(0.0, root2);
    let number = &a_dag * &a;

    // ⟨m|A_z|n⟩ = ∫ z · z^m z̄^n / √(m! n!) dμ
    let fact: Vec<f64> = (0..=dim).scan(1.0, |acc, k| {
        if k > 0 {
            *acc *= k as f64;
        }
        Some(*acc)
    })
    .collect();
    let mut az = DMatrix::zeros(dim, dim);
    for m in 0..dim {
        for n in 0..dim {
            let norm = (fact[m] * fact[n]).sqrt();
            az[(m, n)] = integrate_plane(
                |z| z.powu(m as u32 + 1) * z.conj().powu(n as u32) / norm,
                grid,
            );
        }
    }
    let a_quadrature_deviation = crate::operator::max_abs(&(&az - &a));

    let comm = &q * &p - &p * &q;
    let mut block = 0.0f64;
    for r in 0..n_max {
        for c in 0..n_max {
            let expect = if r == c {
                Complex::new(0.0, 1.0)
            } else {
                Complex::new(0.0, 0.0)
            };
            block = block.max((comm[(r, c)] - expect).norm());
        }
    }
    let lowering_exact = (1..dim).all(|n| a[(n - 1, n)] == Complex::new((n as f64).sqrt(), 0.0))
        && a.iter().filter(|z| **z != Complex::new(0.0, 0.0)).count() == n_max;
    let number_deviation = (0..dim)
        .map(|n| (number[(n, n)] - Complex::new(n as f64, 0.0)).norm())
        .fold(0.0, f64::max);
    let report = FockReport {
        a_quadrature_deviation,
        commutator_block_deviation: block,
        commutator_corner: comm[(n_max, n_max)],
        lowering_exact,
        number_deviation,
    };
    let space = FockDemoSpace {
        n_max,
        a,
        a_dag,
        q,
        p,
        number,
    };
    Ok((space, report))
}

/// A plane grid on which [`fock_demo`]'s quadrature is exact.
pub fn fock_grid(n_max: usize) -> PlaneGrid {
    PlaneGrid {
        n_radial: n_max + 2,
        n_angular: 2 * n_max + 4,
    }
}
