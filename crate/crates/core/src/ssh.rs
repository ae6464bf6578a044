//! Spin spherical harmonics `σY_{jμ}`, the spin angular momentum matrices
//! `Λ_a` in their span, and the rotation operator.
//!
//! `(-1)^μ` for half-integer `μ` is read as `e^{iπμ}`. With that reading the
//! Jacobi and binomial forms agree, and `Λ_±` act as ladder operators.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::algebra::{binomial_f64, factorial_f64, HalfInt};
use crate::error::{domain, Result};
use crate::operator::OperatorMatrix;
use crate::specfun::half_angle_jacobi;
use crate::sphere::{PhiPeriod, SpherePoint};
use crate::wigner::{wigner_d_matrix, Su2Element};
use crate::Complex;

/// Spin `j`, spin weight `σ` (both as twice-values) and the phase angle `ψ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SshParams {
    pub two_j: u32,
    pub two_sigma: i32,
    pub psi: f64,
}

impl SshParams {
    pub fn new(two_j: u32, two_sigma: i32) -> Result<Self> {
        if two_sigma.unsigned_abs() > two_j {
            return domain(format!("|2σ| = {} exceeds 2j = {two_j}", two_sigma.abs()));
        }
        if (two_j as i32 - two_sigma) % 2 != 0 {
            return domain(format!("2j = {two_j} and 2σ = {two_sigma} differ in parity"));
        }
        Ok(SshParams {
            two_j,
            two_sigma,
            psi: 0.0,
        })
    }

    pub fn with_psi(mut self, psi: f64) -> Self {
        self.psi = psi;
        self
    }

    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.two_j as i32)
    }

    pub fn sigma(&self) -> HalfInt {
        HalfInt::from_twice(self.two_sigma)
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn period(&self) -> PhiPeriod {
        PhiPeriod::for_spin(self.j())
    }

    /// The same spin with weight `-σ`.
    pub fn flipped(&self) -> Self {
        SshParams {
            two_sigma: -self.two_sigma,
            ..*self
        }
    }

    fn check_mu(&self, mu: HalfInt) -> Result<()> {
        if !self.j().same_parity(mu) || mu.abs() > self.j() {
            return domain(format!("μ = {mu} is not a projection of j = {}", self.j()));
        }
        Ok(())
    }

    fn prefactor(&self, mu: HalfInt) -> f64 {
        let (j, s) = (self.j(), self.sigma());
        let f = |h: HalfInt| factorial_f64(h.to_i32().expect("integer label") as u32);
        ((self.two_j as f64 + 1.0) / (4.0 * PI)).sqrt()
            * (f(j - mu) * f(j + mu) / (f(j - s) * f(j + s))).sqrt()
    }

    fn phase(&self, lead: HalfInt, mu: HalfInt, phi: f64) -> Complex {
        Complex::from_polar(
            1.0,
            PI * lead.to_f64() + self.sigma().to_f64() * self.psi + mu.to_f64() * phi,
        )
    }
}

/// `σY_{jμ}(θ, φ)` from the Jacobi form
/// `e^{iπμ} e^{iσψ} √((2j+1)/4π) √(...) sin^{μ-σ}(θ/2) cos^{μ+σ}(θ/2) P_{j-μ}^{(μ-σ, μ+σ)}(cos θ) e^{iμφ}`,
/// negative parameters going through the reflection identity.
pub fn ssh_eval(params: &SshParams, mu: HalfInt, x: SpherePoint) -> Result<Complex> {
    params.check_mu(mu)?;
    Ok(ssh_unchecked(params, mu, x))
}

fn ssh_unchecked(params: &SshParams, mu: HalfInt, x: SpherePoint) -> Complex {
    let int = |h: HalfInt| h.to_i32().expect("integer label");
    let (j, s) = (params.j(), params.sigma());
    let (u, v) = (x.theta / 2.0).sin_cos();
    let body = half_angle_jacobi(int(j - mu) as u32, int(mu - s), int(mu + s), u, v);
    params.phase(mu, mu, x.phi) * (params.prefactor(mu) * body)
}

/// All `σY_{jμ}(x)` in ascending `μ`.
pub fn ssh_values(params: &SshParams, x: SpherePoint) -> Vec<Complex> {
    params
        .j()
        .projections()
        .map(|mu| ssh_unchecked(params, mu, x))
        .collect()
}

/// `σY_{jμ}` from the binomial sum
/// `e^{iπσ} ... Σ_t (-1)^t C(j-σ, t) C(j+σ, t+σ-μ) sin^{2t+σ-μ}(θ/2) cos^{2j-2t-σ+μ}(θ/2)`.
pub fn ssh_eval_binomial_form(params: &SshParams, mu: HalfInt, x: SpherePoint) -> Result<Complex> {
    params.check_mu(mu)?;
    let int = |h: HalfInt| h.to_i32().expect("integer label");
    let (j, s) = (params.j(), params.sigma());
    let (u, v) = (x.theta / 2.0).sin_cos();
    let (a1, a2, shift) = (int(j - s), int(j + s), int(s - mu));
    let mut sum = 0.0;
    for t in 0..=a1 {
        let k2 = t + shift;
        if k2 < 0 || k2 > a2 {
            continue;
        }
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        let e_u = 2 * t + shift;
        let e_v = int(j + j) - 2 * t - shift;
        sum += sign
            * binomial_f64(i64::from(a1), i64::from(t))
            * binomial_f64(i64::from(a2), i64::from(k2))
            * u.powi(e_u)
            * v.powi(e_v);
    }
    Ok(params.phase(s, mu, x.phi) * (params.prefactor(mu) * sum))
}

/// `|σY_{jμ}*(x) - (-1)^{σ-μ} (-σ)Y_{j,-μ}(x)|` at `ψ = 0`.
pub fn ssh_conjugation_check(params: &SshParams, mu: HalfInt, x: SpherePoint) -> Result<f64> {
    let p = params.with_psi(0.0);
    let lhs = ssh_eval(&p, mu, x)?.conj();
    let rhs = ssh_eval(&p.flipped(), -mu, x)? * f64::from((params.sigma() - mu).minus_one_pow()?);
    Ok((lhs - rhs).norm())
}

/// `Λ₁, Λ₂, Λ₃` and the ladder matrices `Λ_± = Λ₁ ± iΛ₂` in the SSH basis.
#[derive(Clone, Debug)]
pub struct LambdaMatrices {
    pub l1: OperatorMatrix,
    pub l2: OperatorMatrix,
    pub l3: OperatorMatrix,
    pub raise: OperatorMatrix,
    pub lower: OperatorMatrix,
}

impl LambdaMatrices {
    pub fn for_spin(two_j: u32) -> Self {
        let raise = OperatorMatrix::from_fn(two_j, |mu, nu| {
            let j = HalfInt::from_twice(two_j as i32).to_f64();
            let n = nu.to_f64();
            if mu.twice() == nu.twice() + 2 {
                Complex::new(((j - n) * (j + n + 1.0)).sqrt(), 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let lower = raise.adjoint();
        let half = Complex::new(0.5, 0.0);
        let l1 = (&raise + &lower).scale(half).certify_hermitian(1e-15);
        let l2 = (&raise - &lower)
            .scale(Complex::new(0.0, -0.5))
            .certify_hermitian(1e-15);
        let l3 = OperatorMatrix::from_fn(two_j, |mu, nu| {
            if mu == nu {
                Complex::new(mu.to_f64(), 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .certify_hermitian(1e-15);
        LambdaMatrices {
            l1,
            l2,
            l3,
            raise,
            lower,
        }
    }

    /// `Λ_a` for `a ∈ {1, 2, 3}`.
    pub fn axis(&self, a: usize) -> &OperatorMatrix {
        match a {
            1 => &self.l1,
            2 => &self.l2,
            3 => &self.l3,
            _ => panic!("axis must be 1, 2 or 3, got {a}"),
        }
    }

    pub fn axes(&self) -> [&OperatorMatrix; 3] {
        [&self.l1, &self.l2, &self.l3]
    }
}

pub fn lambda_matrices(params: &SshParams) -> LambdaMatrices {
    LambdaMatrices::for_spin(params.two_j)
}

/// The matrix of the rotation operator in the SSH basis, `U_{νμ} = D^j_{νμ}(ξ)`.
pub fn rotation_operator(params: &SshParams, xi: &Su2Element) -> OperatorMatrix {
    OperatorMatrix::new(params.two_j, wigner_d_matrix(params.two_j, xi))
        .expect("D-matrix has dimension 2j+1")
}

/// Residuals of `σY_{jμ}(ᵗR x) = Σ_ν σY_{jν}(x) D^j_{νμ}(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceResidual {
    /// Largest entry of the plain difference.
    pub exact: f64,
    /// Largest entry after removing the best common unimodular phase.
    pub up_to_phase: f64,
}

/// Compares both sides of the transformation law at `x`. For `σ ≠ 0` the
/// sides differ by a `μ`-independent phase set by the choice of section
/// `ξ(R_x)`, so only `up_to_phase` is expected to vanish then.
pub fn covariance_residual(params: &SshParams, xi: &Su2Element, x: SpherePoint) -> CovarianceResidual {
    let r = xi.rotation_matrix();
    let v = r.transpose() * Vector3::from(x.cartesian());
    let y = SpherePoint::from_cartesian([v[0], v[1], v[2]]);
    let lhs = ssh_values(params, y);
    let base = ssh_values(params, x);
    let d = wigner_d_matrix(params.two_j, xi);
    let rhs: Vec<Complex> = (0..params.dim())
        .map(|m| (0..params.dim()).map(|n| base[n] * d[(n, m)]).sum())
        .collect();
    let overlap: Complex = rhs.iter().zip(&lhs).map(|(r, l)| r.conj() * l).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let worst = |k: Complex| {
        lhs.iter()
            .zip(&rhs)
            .map(|(l, r)| (l - r * k).norm())
            .fold(0.0, f64::max)
    };
    CovarianceResidual {
        exact: worst(Complex::new(1.0, 0.0)),
        up_to_phase: worst(phase),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::binomial;
    use crate::specfun::assoc_legendre;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn all_params(max_two_j: u32) -> Vec<SshParams> {
        let mut out = Vec::new();
        for tj in 0..=max_two_j {
            for ts in (-(tj as i32)..=tj as i32).step_by(2) {
                out.push(SshParams::new(tj, ts).unwrap());
            }
        }
        out
    }

    fn random_point(rng: &mut impl Rng, period: PhiPeriod) -> SpherePoint {
        SpherePoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..period.length()))
    }

    #[test]
    fn params_validation() {
        assert!(SshParams::new(2, 1).is_err());
        assert!(SshParams::new(1, 3).is_err());
        assert!(SshParams::new(3, -1).is_ok());
        let p = SshParams::new(2, 0).unwrap();
        assert!(ssh_eval(&p, h(1), SpherePoint::north()).is_err());
        assert!(ssh_eval(&p, h(4), SpherePoint::north()).is_err());
    }

    #[test]
    fn y10_closed_form() {
        let p = SshParams::new(2, 0).unwrap();
        for &t in &[0.0, 0.4, 1.9, PI] {
            let v = ssh_eval(&p, h(0), SpherePoint::new(t, 0.3)).unwrap();
            assert!((v - (3.0 / (4.0 * PI)).sqrt() * t.cos()).norm() < 1e-15);
        }
    }

    #[test]
    fn sigma_equals_j_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for two_j in 0..=6u32 {
            let p = SshParams::new(two_j, two_j as i32).unwrap().with_psi(0.7);
            let j = p.j().to_f64();
            for _ in 0..10 {
                let x = random_point(&mut rng, p.period());
                for mu in p.j().projections() {
                    let m = mu.to_f64();
                    let c = binomial(i64::from(two_j), ((p.j() + mu).to_i32().unwrap()).into())
                        .to_f64()
                        .unwrap();
                    let expect = Complex::from_polar(1.0, PI * j + j * p.psi + m * x.phi)
                        * ((2.0 * j + 1.0) / (4.0 * PI)).sqrt()
                        * c.sqrt()
                        * (x.theta / 2.0).cos().powf(j + m)
                        * (x.theta / 2.0).sin().powf(j - m);
                    let got = ssh_eval(&p, mu, x).unwrap();
                    assert!((got - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn north_pole_limit() {
        for p in all_params(6) {
            for mu in p.j().projections() {
                let v = ssh_eval(&p, mu, SpherePoint::new(0.0, 1.1)).unwrap();
                if mu != p.sigma() {
                    assert_eq!(v.norm(), 0.0, "{p:?} {mu}");
                } else {
                    assert!((v.norm() - ((p.two_j as f64 + 1.0) / (4.0 * PI)).sqrt()).abs() < 1e-14);
                }
                assert!(ssh_eval(&p, mu, SpherePoint::new(PI, 0.2)).unwrap().norm().is_finite());
            }
        }
    }

    #[test]
    fn forms_agree_and_sum_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in all_params(6) {
            let p = p.with_psi(0.4);
            let target = (p.two_j as f64 + 1.0) / (4.0 * PI);
            for _ in 0..20 {
                let x = random_point(&mut rng, p.period());
                let vals = ssh_values(&p, x);
                let total: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
                assert!((total - target).abs() < 1e-11);
                for (mu, v) in p.j().projections().zip(&vals) {
                    let b = ssh_eval_binomial_form(&p, mu, x).unwrap();
                    assert!((b - v).norm() < 1e-12, "{p:?} {mu}");
                }
            }
        }
    }

    #[test]
    fn conjugation_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in all_params(6) {
            for _ in 0..10 {
                let x = random_point(&mut rng, p.period());
                for mu in p.j().projections() {
                    assert!(ssh_conjugation_check(&p, mu, x).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn classical_harmonics_at_zero_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for l in 0..=5u32 {
            let p = SshParams::new(2 * l, 0).unwrap();
            for _ in 0..10 {
                let x = random_point(&mut rng, PhiPeriod::Single);
                for m in -(l as i32)..=l as i32 {
                    let norm = ((2.0 * l as f64 + 1.0) / (4.0 * PI)
                        * factorial_f64((l as i32 - m) as u32)
                        / factorial_f64((l as i32 + m) as u32))
                    .sqrt();
                    let expect = Complex::from_polar(norm * assoc_legendre(l, m, x.theta.cos()), m as f64 * x.phi);
                    let got = ssh_eval(&p, HalfInt::from_int(m), x).unwrap();
                    assert!((got - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lambda_structure() {
        let half = LambdaMatrices::for_spin(1);
        assert_eq!(half.l3.get(h(-1), h(-1)).re, -0.5);
        assert_eq!(half.raise.get(h(1), h(-1)).re, 1.0);
        let one = LambdaMatrices::for_spin(2);
        assert!((one.raise.get(h(2), h(0)).re - 2f64.sqrt()).abs() < 1e-15);
        assert!((one.raise.get(h(0), h(-2)).re - 2f64.sqrt()).abs() < 1e-15);
        for two_j in 0..=6 {
            let l = LambdaMatrices::for_spin(two_j);
            let c = l.raise.commutator(&l.lower).unwrap();
            assert!(c.max_abs_diff(&l.l3.scale(Complex::new(2.0, 0.0))) < 1e-14);
            for a in l.axes() {
                assert!(a.is_hermitian());
                assert_eq!(a.hermiticity_residual(), 0.0);
            }
        }
    }

    #[test]
    fn ladder_operators_match_lambda() {
        let step = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in all_params(4) {
            let lam = lambda_matrices(&p);
            let s = p.sigma().to_f64();
            for _ in 0..3 {
                let x = SpherePoint::new(rng.gen_range(0.3..2.8), rng.gen_range(0.0..2.0 * PI));
                for mu in p.j().projections() {
                    let f = |t: f64, ph: f64| ssh_eval(&p, mu, SpherePoint::new(t, ph)).unwrap();
                    let dth = (f(x.theta + step, x.phi) - f(x.theta - step, x.phi)) / (2.0 * step);
                    let dph = (f(x.theta, x.phi + step) - f(x.theta, x.phi - step)) / (2.0 * step);
                    let i = Complex::new(0.0, 1.0);
                    let (e_plus, e_minus) = (Complex::from_polar(1.0, x.phi), Complex::from_polar(1.0, -x.phi));
                    let cot = 1.0 / x.theta.tan();
                    let csc = 1.0 / x.theta.sin();
                    let val = f(x.theta, x.phi);
                    let up = e_plus * (dth + i * cot * dph) + s * csc * e_plus * val;
                    let down = -e_minus * (dth - i * cot * dph) + s * csc * e_minus * val;
                    let vals = ssh_values(&p, x);
                    let col = p.j().projections().position(|m| m == mu).unwrap();
                    let alg_up: Complex = (0..p.dim()).map(|r| lam.raise.entries()[(r, col)] * vals[r]).sum();
                    let alg_down: Complex = (0..p.dim()).map(|r| lam.lower.entries()[(r, col)] * vals[r]).sum();
                    assert!((up - alg_up).norm() < 1e-6, "{p:?} {mu}");
                    assert!((down - alg_down).norm() < 1e-6, "{p:?} {mu}");
                }
            }
        }
    }

    #[test]
    fn rotation_operator_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for p in all_params(4) {
            let id = rotation_operator(&p, &Su2Element::identity());
            assert!(id.max_abs_diff(&OperatorMatrix::identity(p.two_j)) < 1e-15);
            for _ in 0..5 {
                let xi = Su2Element::new(
                    rng.gen_range(0.0..PI / 2.0),
                    rng.gen_range(0.0..2.0 * PI),
                    rng.gen_range(0.0..2.0 * PI),
                );
                let u = rotation_operator(&p, &xi);
                let uu = &u * &u.adjoint();
                assert!(uu.max_abs_diff(&OperatorMatrix::identity(p.two_j)) < 1e-12);
                let x = random_point(&mut rng, PhiPeriod::Single);
                let r = covariance_residual(&p, &xi, x);
                assert!(r.up_to_phase < 1e-10, "{p:?} {r:?}");
                if p.two_sigma == 0 {
                    assert!(r.exact < 1e-10, "{p:?} {r:?}");
                }
            }
        }
    }
}
