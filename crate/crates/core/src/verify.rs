//! Named invariant checks grouped into suites. Every check reports a measured
//! residual against a tolerance; exact checks report a failure count with
//! tolerance 0.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::HalfInt;
use crate::csquant::{fock_demo, fock_grid, quantize_quadrature, quantize_ylm_closed, superop_action, superop_casimir};
use crate::error::{Error, Result};
use crate::fuzzy::{
    c_of_ell_closed, classical_limit_report, empirical_c, joint_eigenspace_dimension,
    symmetrization_commutator_check_axis, FuzzyParams,
};
use crate::operator::OperatorMatrix;
use crate::quad::{integrate_sphere_vec, SphereGrid};
use crate::sphere::SpherePoint;
use crate::ssh::{covariance_residual, lambda_matrices, ssh_conjugation_check, ssh_eval, ssh_eval_binomial_form, ssh_values, LambdaMatrices, SshParams};
use crate::wigner::{
    orthogonality_defect, orthogonality_order, three_j, three_j_uncached, wigner_d, wigner_d_jacobi, Su2Element,
    ThreeJKey,
};
use crate::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    ThreeJ,
    Ssh,
    Quant,
    Fuzzy,
    AppendixB,
    Fock,
    Limit,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["all", "threej", "ssh", "quant", "fuzzy", "appendix-b", "fock", "limit"];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "threej" => Suite::ThreeJ,
            "ssh" => Suite::Ssh,
            "quant" => Suite::Quant,
            "fuzzy" => Suite::Fuzzy,
            "appendix-b" => Suite::AppendixB,
            "fock" => Suite::Fock,
            "limit" => Suite::Limit,
            _ => return Err(Error::Parse(format!("unknown suite `{s}`; one of {}", Suite::NAMES.join(", ")))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} residual={:.3e} tol={:.1e} status={}",
            self.name,
            self.residual,
            self.tol,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Largest `2j` swept by the spin-dependent checks.
    pub max_two_j: u32,
    /// Overrides keyed by full check name or by a dotted prefix of it.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_two_j: 4,
            tolerances: BTreeMap::new(),
            seed: 20,
        }
    }
}

impl VerifyConfig {
    fn tol(&self, name: &str, default: f64) -> f64 {
        if let Some(t) = self.tolerances.get(name) {
            return *t;
        }
        self.tolerances
            .iter()
            .filter(|(k, _)| name.starts_with(&format!("{k}.")))
            .max_by_key(|(k, _)| k.len())
            .map(|(_, t)| *t)
            .unwrap_or(default)
    }
}

/// Parses `NAME=VALUE`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("tolerance `{s}` is not NAME=VALUE")))?;
    let v: f64 = v.parse().map_err(|_| Error::Parse(format!("bad tolerance value `{v}`")))?;
    if v.is_nan() || v < 0.0 {
        return Err(Error::Parse(format!("tolerance must be non-negative, got {v}")));
    }
    Ok((k.to_string(), v))
}

struct Report<'a> {
    config: &'a VerifyConfig,
    checks: Vec<Check>,
}

impl Report<'_> {
    fn push(&mut self, name: impl Into<String>, residual: f64, default_tol: f64) {
        let name = name.into();
        let tol = self.config.tol(&name, default_tol);
        // NaN never passes
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(Check { name, residual, tol });
    }
}

pub fn run(suite: Suite, config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut report = Report {
        config,
        checks: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::ThreeJ {
        threej_suite(&mut report)?;
    }
    if all || suite == Suite::Ssh {
        ssh_suite(&mut report)?;
    }
    if all || suite == Suite::Quant {
        quant_suite(&mut report)?;
    }
    if all || suite == Suite::Fuzzy {
        fuzzy_suite(&mut report)?;
    }
    if all || suite == Suite::AppendixB {
        appendix_b_suite(&mut report)?;
    }
    if all || suite == Suite::Fock {
        fock_suite(&mut report)?;
    }
    if all || suite == Suite::Limit {
        limit_suite(&mut report)?;
    }
    Ok(report.checks)
}

pub(crate) fn all_params(max_two_j: u32) -> Vec<SshParams> {
    let mut out = Vec::new();
    for tj in 0..=max_two_j {
        for ts in (-(tj as i32)..=tj as i32).step_by(2) {
            out.push(SshParams::new(tj, ts).expect("admissible by construction"));
        }
    }
    out
}

fn random_point(rng: &mut impl Rng, doubled: bool) -> SpherePoint {
    let period = if doubled { 4.0 * PI } else { 2.0 * PI };
    SpherePoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..period))
}

/// Number of sums `(2j₃+1) Σ_{m₁m₂} (j₁ j₂ j₃; m₁ m₂ m₃)²` that differ from 1,
/// over all admissible `2jᵢ ≤ max_two_j`. Exact rational arithmetic.
pub fn threej_orthogonality_failures(max_two_j: i32) -> Result<usize> {
    let mut failures = 0;
    for a in 0..=max_two_j {
        for b in 0..=max_two_j {
            for c in 0..=max_two_j {
                if (a + b + c) % 2 != 0 || c > a + b || c < (a - b).abs() {
                    continue;
                }
                for m3 in (-c..=c).step_by(2) {
                    let mut sum = BigRational::zero();
                    for m1 in (-a..=a).step_by(2) {
                        for m2 in (-b..=b).step_by(2) {
                            sum += three_j(&ThreeJKey::from_twice([a, b, c, m1, m2, m3]))?.square();
                        }
                    }
                    if sum * BigRational::from_integer(BigInt::from(c + 1)) != BigRational::one() {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// Number of keys with `2jᵢ ≤ max_two_j` whose symmetry variants are not
/// exactly `±` the original as predicted.
pub fn threej_symmetry_failures(max_two_j: i32) -> Result<usize> {
    let mut failures = 0;
    for a in 0..=max_two_j {
        for b in 0..=max_two_j {
            for c in 0..=max_two_j {
                for ma in (-a..=a).step_by(2) {
                    for mb in (-b..=b).step_by(2) {
                        for mc in (-c..=c).step_by(2) {
                            let key = ThreeJKey::from_twice([a, b, c, ma, mb, mc]);
                            let base = three_j_uncached(&key)?;
                            let total = key.j1 + key.j2 + key.j3;
                            let odd = total.is_integer() && total.minus_one_pow()? == -1;
                            for (variant, flips) in key.symmetry_variants() {
                                let expect = if flips && odd { -base.clone() } else { base.clone() };
                                if three_j_uncached(&variant)? != expect {
                                    failures += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

fn threej_suite(r: &mut Report) -> Result<()> {
    r.push("threej.orthogonality_exact", threej_orthogonality_failures(4)? as f64, 0.0);
    r.push("threej.symmetry_exact", threej_symmetry_failures(4)? as f64, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(r.config.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let xi = Su2Element::new(rng.gen_range(0.0..PI / 2.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        for tj in 0..=r.config.max_two_j {
            let j = HalfInt::from_twice(tj as i32);
            for m1 in j.projections() {
                for m2 in j.projections() {
                    worst = worst.max((wigner_d(j, m1, m2, &xi) - wigner_d_jacobi(j, m1, m2, &xi)).norm());
                }
            }
        }
    }
    r.push("threej.d_sum_vs_jacobi", worst, 1e-12);
    let mut worst: f64 = 0.0;
    for a in 0..=2 {
        for b in 0..=2 {
            worst = worst.max(orthogonality_defect(a, b, orthogonality_order(a, b)));
        }
    }
    r.push("threej.d_orthogonality", worst, 1e-10);
    Ok(())
}

fn ssh_suite(r: &mut Report) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.config.seed);
    let (mut sum_rule, mut forms, mut conj, mut cov) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut gram: f64 = 0.0;
    for p in all_params(r.config.max_two_j) {
        let doubled = p.two_j % 2 == 1;
        for _ in 0..20 {
            let x = random_point(&mut rng, doubled);
            let vals = ssh_values(&p, x);
            let total: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
            sum_rule = sum_rule.max((total - (p.two_j as f64 + 1.0) / (4.0 * PI)).abs());
            for mu in p.j().projections() {
                forms = forms.max((ssh_eval(&p, mu, x)? - ssh_eval_binomial_form(&p, mu, x)?).norm());
                conj = conj.max(ssh_conjugation_check(&p, mu, x)?);
            }
            let xi = Su2Element::new(rng.gen_range(0.0..PI / 2.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            let c = covariance_residual(&p, &xi, random_point(&mut rng, false));
            cov = cov.max(c.up_to_phase);
        }
        let grid = SphereGrid::auto(p.two_j, 0);
        let d = p.dim();
        let sums = integrate_sphere_vec(
            |x, out| {
                let y = ssh_values(&p, x);
                for a in 0..d {
                    for b in 0..d {
                        out[a * d + b] = y[a].conj() * y[b];
                    }
                }
            },
            d * d,
            &grid,
        )?;
        for a in 0..d {
            for b in 0..d {
                let expect = if a == b { 1.0 } else { 0.0 };
                gram = gram.max((sums[a * d + b] * (4.0 * PI) - expect).norm());
            }
        }
    }
    r.push("ssh.sum_rule", sum_rule, 1e-11);
    r.push("ssh.orthonormality", gram, 1e-11);
    r.push("ssh.jacobi_vs_binomial", forms, 1e-12);
    r.push("ssh.conjugation", conj, 1e-12);
    r.push("ssh.covariance_up_to_phase", cov, 1e-10);
    Ok(())
}

fn cartesian(a: usize) -> impl Fn(SpherePoint) -> Complex + Sync {
    move |x: SpherePoint| Complex::new(x.cartesian()[a], 0.0)
}

fn quant_suite(r: &mut Report) -> Result<()> {
    let (mut ident, mut cart, mut degen, mut closed, mut eig3, mut eig2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in all_params(r.config.max_two_j) {
        let one = quantize_quadrature(&p, |_| Complex::new(1.0, 0.0), &SphereGrid::auto(p.two_j, 0))?;
        ident = ident.max(one.max_abs_diff(&OperatorMatrix::identity(p.two_j)));
        if p.two_j > 0 {
            let grid = SphereGrid::auto(p.two_j, 1);
            let lam = lambda_matrices(&p);
            let jf = p.j().to_f64();
            let k = p.sigma().to_f64() / (jf * (jf + 1.0));
            for a in 0..3 {
                let q = quantize_quadrature(&p, cartesian(a), &grid)?;
                if p.two_sigma == 0 {
                    degen = degen.max(q.max_abs());
                } else {
                    cart = cart.max(q.max_abs_diff(&lam.axis(a + 1).scale(Complex::new(k, 0.0))));
                }
            }
        }
        for l in 0..=p.two_j {
            let grid = SphereGrid::auto(p.two_j, l);
            let yp = SshParams::new(2 * l, 0)?;
            for m in -(l as i32)..=l as i32 {
                let cl = quantize_ylm_closed(&p, l, m)?;
                let mh = HalfInt::from_int(m);
                let q = quantize_quadrature(&p, |x| ssh_eval(&yp, mh, x).expect("valid projection"), &grid)?;
                closed = closed.max(cl.max_abs_diff(&q));
                let s3 = superop_action(&p, 3, &cl)?;
                eig3 = eig3.max(s3.max_abs_diff(&cl.scale(Complex::new(f64::from(m), 0.0))));
                let s2 = superop_casimir(&p, &cl)?;
                eig2 = eig2.max(s2.max_abs_diff(&cl.scale(Complex::new(f64::from(l * (l + 1)), 0.0))));
            }
        }
    }
    r.push("quant.resolution_of_identity", ident, 1e-12);
    r.push("quant.cartesian", cart, 1e-11);
    r.push("quant.cartesian_sigma0_vanishes", degen, 1e-12);
    r.push("quant.closed_vs_quadrature", closed, 1e-10);
    r.push("quant.l3_eigen", eig3, 1e-9);
    r.push("quant.casimir_eigen", eig2, 1e-9);
    Ok(())
}

fn fuzzy_suite(r: &mut Report) -> Result<()> {
    let (mut spread, mut agree, mut comm) = (0.0f64, 0.0f64, 0.0f64);
    for p in all_params(r.config.max_two_j.min(5)) {
        if p.two_j == 0 || p.two_sigma == 0 {
            continue;
        }
        let fp = FuzzyParams::new(p.two_j, p.two_sigma, 1.0)?;
        for l in 0..=p.two_j {
            let e = empirical_c(&fp, l)?;
            spread = spread.max(e.spread);
            let closed = c_of_ell_closed(&fp, l)?;
            agree = agree.max((closed - e.mean).abs() / closed.abs().max(1.0));
        }
        let x = fp.coordinates();
        let lam = LambdaMatrices::for_spin(p.two_j);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lhs = x[a].commutator(&x[b])?;
            let rhs = lam.axis(c + 1).scale(Complex::new(0.0, fp.kappa * fp.kappa));
            comm = comm.max(lhs.max_abs_diff(&rhs));
        }
    }
    r.push("fuzzy.c_spread_over_m", spread, 1e-9);
    r.push("fuzzy.c_closed_vs_empirical", agree, 1e-8);
    r.push("fuzzy.commutation_relations", comm, 1e-13);
    let mut wrong = 0;
    for l in 0..=2u32 {
        for m in -(l as i32)..=l as i32 {
            if joint_eigenspace_dimension(2, l, m) != 1 {
                wrong += 1;
            }
        }
    }
    r.push("fuzzy.eigenspace_rank", f64::from(wrong), 0.0);
    Ok(())
}

fn appendix_b_suite(r: &mut Report) -> Result<()> {
    for two_j in [2u32, 3, 4] {
        for deg in 0..=5u32 {
            let mut worst: f64 = 0.0;
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    for axis in 1..=3 {
                        worst = worst.max(symmetrization_commutator_check_axis(two_j, [a, b, deg - a - b], axis)?);
                    }
                }
            }
            r.push(format!("appendix_b.two_j={two_j}.degree={deg}"), worst, 1e-12);
        }
    }
    Ok(())
}

fn fock_suite(r: &mut Report) -> Result<()> {
    let n_max = 8;
    let (_, rep) = fock_demo(n_max, &fock_grid(n_max))?;
    r.push("fock.a_vs_quadrature", rep.a_quadrature_deviation, 1e-8);
    r.push("fock.commutator_block", rep.commutator_block_deviation, 1e-12);
    r.push(
        "fock.commutator_corner",
        (rep.commutator_corner - Complex::new(0.0, -(n_max as f64))).norm(),
        1e-12,
    );
    r.push("fock.lowering_exact", if rep.lowering_exact { 0.0 } else { 1.0 }, 0.0);
    r.push("fock.number_operator", rep.number_deviation, 1e-12);
    Ok(())
}

fn limit_suite(r: &mut Report) -> Result<()> {
    let js: Vec<HalfInt> = (1..=8).map(HalfInt::from_int).collect();
    let rows = classical_limit_report(HalfInt::ZERO, &js, 1.0)?;
    let dev = rows
        .iter()
        .map(|row| (row.commutator_norm - row.expected_norm).abs())
        .fold(0.0, f64::max);
    r.push("limit.commutator_norm", dev, 1e-12);
    let rises = rows.windows(2).filter(|w| w[1].commutator_norm >= w[0].commutator_norm).count();
    r.push("limit.monotone_decrease", rises as f64, 0.0);
    r.push("limit.ratio_j4_j8", (rows[7].commutator_norm / rows[3].commutator_norm - 5.0 / 9.0).abs(), 1e-12);
    r.push(
        "limit.lower_symbol_sigma_eq_j",
        rows.iter().map(|row| row.lower_symbol_deviation).fold(0.0, f64::max),
        1e-12,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for n in Suite::NAMES {
            assert!(n.parse::<Suite>().is_ok());
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut c = VerifyConfig::default();
        assert_eq!(c.tol("quant.cartesian", 1e-11), 1e-11);
        c.tolerances.insert("quant".into(), 1.0);
        assert_eq!(c.tol("quant.cartesian", 1e-11), 1.0);
        c.tolerances.insert("quant.cartesian".into(), 2.0);
        assert_eq!(c.tol("quant.cartesian", 1e-11), 2.0);
        assert_eq!(c.tol("quantx.y", 3.0), 3.0);
        assert_eq!(parse_tolerance("a.b=1e-3").unwrap(), ("a.b".to_string(), 1e-3));
        assert!(parse_tolerance("a.b").is_err());
        assert!(parse_tolerance("a=-1").is_err());
    }

    #[test]
    fn fock_and_limit_pass() {
        let c = VerifyConfig::default();
        for suite in [Suite::Fock, Suite::Limit] {
            let checks = run(suite, &c).unwrap();
            assert!(!checks.is_empty());
            for ch in &checks {
                assert!(ch.passed(), "{ch}");
            }
        }
    }

    #[test]
    fn zero_tolerance_can_fail() {
        let mut c = VerifyConfig::default();
        c.tolerances.insert("fock.a_vs_quadrature".into(), 0.0);
        let checks = run(Suite::Fock, &c).unwrap();
        let line = checks.iter().find(|ch| ch.name == "fock.a_vs_quadrature").unwrap();
        assert_eq!(line.passed(), line.residual == 0.0);
        assert!(line.to_string().starts_with("check=fock.a_vs_quadrature residual="));
    }
}
