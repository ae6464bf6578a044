//! The fuzzy sphere on the same `(2j+1)`-dimensional space: coordinates
//! `x̂ᵃ = κΛ_a`, symmetrized monomials, the hat map on polynomials and the
//! constants relating hatted harmonics to the coherent-state ones.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::{binomial, factorial_f64, factorial_u, ExactRadical, HalfInt};
use crate::csquant::{lower_symbol, quantize_ylm_closed};
use crate::error::{domain, Error, Result};
use crate::operator::OperatorMatrix;
use crate::sphere::SpherePoint;
use crate::ssh::{LambdaMatrices, SshParams};
use crate::wigner::{three_j, ThreeJKey};
use crate::Complex;

/// `coeff · (x¹)^α (x²)^β (x³)^γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial3 {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub coeff: Complex,
}

impl Monomial3 {
    pub fn new(alpha: u32, beta: u32, gamma: u32, coeff: Complex) -> Self {
        Monomial3 {
            alpha,
            beta,
            gamma,
            coeff,
        }
    }

    pub fn degree(&self) -> u32 {
        self.alpha + self.beta + self.gamma
    }

    pub fn exponents(&self) -> [u32; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn eval(&self, x: [f64; 3]) -> Complex {
        self.coeff * x[0].powi(self.alpha as i32) * x[1].powi(self.beta as i32) * x[2].powi(self.gamma as i32)
    }
}

pub fn eval_polynomial(poly: &[Monomial3], x: [f64; 3]) -> Complex {
    poly.iter().map(|m| m.eval(x)).sum()
}

/// Merges equal exponent triples and drops zero coefficients.
pub fn simplify(poly: &[Monomial3]) -> Vec<Monomial3> {
    let mut map: BTreeMap<[u32; 3], Complex> = BTreeMap::new();
    for m in poly {
        *map.entry(m.exponents()).or_insert(Complex::new(0.0, 0.0)) += m.coeff;
    }
    map.into_iter()
        .filter(|(_, c)| *c != Complex::new(0.0, 0.0))
        .map(|([a, b, g], c)| Monomial3::new(a, b, g, c))
        .collect()
}

/// Radius `r` and the derived scale `κ = r/√(j(j+1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuzzyParams {
    pub two_j: u32,
    pub two_sigma: i32,
    pub r: f64,
    pub kappa: f64,
}

impl FuzzyParams {
    pub fn new(two_j: u32, two_sigma: i32, r: f64) -> Result<Self> {
        SshParams::new(two_j, two_sigma)?;
        if two_j == 0 {
            return domain("the fuzzy sphere needs j > 0");
        }
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("radius must be positive, got {r}"));
        }
        let j = f64::from(two_j) / 2.0;
        Ok(FuzzyParams {
            two_j,
            two_sigma,
            r,
            kappa: r / (j * (j + 1.0)).sqrt(),
        })
    }

    pub fn ssh(&self) -> SshParams {
        SshParams::new(self.two_j, self.two_sigma).expect("validated at construction")
    }

    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.two_j as i32)
    }

    /// `x̂ᵃ = κΛ_a`, `a = 1, 2, 3`.
    pub fn coordinates(&self) -> [OperatorMatrix; 3] {
        let lam = LambdaMatrices::for_spin(self.two_j);
        let k = Complex::new(self.kappa, 0.0);
        [lam.l1.scale(k), lam.l2.scale(k), lam.l3.scale(k)]
    }
}

/// All distinct words with `counts[i]` copies of letter `i`, in
/// lexicographic order; there are `l!/(α₁!α₂!α₃!)` of them.
pub fn distinct_sequences(counts: &[u32]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [u32], word: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                word.push(i);
                rec(counts, word, len, out);
                word.pop();
                counts[i] += 1;
            }
        }
    }
    let len = counts.iter().sum::<u32>() as usize;
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::with_capacity(len), len, &mut out);
    out
}

fn word_product(letters: &[&OperatorMatrix], word: &[usize], dim: usize) -> DMatrix<Complex> {
    let mut acc = DMatrix::identity(dim, dim);
    for &w in word {
        acc *= letters[w].entries();
    }
    acc
}

/// Symmetrized product of `letters[i]` repeated `counts[i]` times: the mean
/// over the distinct orderings, which equals the mean over all `l!`.
pub fn sym_monomial(two_j: u32, letters: &[&OperatorMatrix], counts: &[u32]) -> Result<OperatorMatrix> {
    for l in letters {
        if l.two_j() != two_j {
            return Err(Error::DimensionMismatch {
                expected: two_j as usize + 1,
                found: l.dim(),
            });
        }
    }
    let dim = two_j as usize + 1;
    let words = distinct_sequences(counts);
    let mut acc = DMatrix::zeros(dim, dim);
    for w in &words {
        acc += word_product(letters, w, dim);
    }
    OperatorMatrix::new(two_j, acc / Complex::new(words.len() as f64, 0.0))
}

/// `S(A₁ ⋯ A_l) = (1/l!) Σ_π A_{π(1)} ⋯ A_{π(l)}`, with identical factors
/// grouped so only distinct orderings are formed.
pub fn sym_product(operators: &[OperatorMatrix]) -> Result<OperatorMatrix> {
    let first = operators
        .first()
        .ok_or_else(|| Error::Domain("empty symmetrized product".into()))?;
    let mut letters: Vec<&OperatorMatrix> = Vec::new();
    let mut counts: Vec<u32> = Vec::new();
    for op in operators {
        first.check_same_dim(op)?;
        match letters.iter().position(|l| l.entries() == op.entries()) {
            Some(i) => counts[i] += 1,
            None => {
                letters.push(op);
                counts.push(1);
            }
        }
    }
    sym_monomial(first.two_j(), &letters, &counts)
}

/// Operator and the input terms dropped for having degree above `2j`.
#[derive(Clone, Debug)]
pub struct HatResult {
    pub matrix: OperatorMatrix,
    pub truncated: Vec<Monomial3>,
}

/// `Σ c · S((κΛ₁)^α (κΛ₂)^β (κΛ₃)^γ)`; monomials of degree `> 2j` are dropped
/// and logged.
pub fn hat_map(params: &FuzzyParams, poly: &[Monomial3]) -> Result<HatResult> {
    let coords = params.coordinates();
    hat_with(params.two_j, [&coords[0], &coords[1], &coords[2]], poly)
}

fn hat_with(two_j: u32, letters: [&OperatorMatrix; 3], poly: &[Monomial3]) -> Result<HatResult> {
    let dim = two_j as usize + 1;
    let mut acc = DMatrix::zeros(dim, dim);
    let mut truncated = Vec::new();
    for m in poly {
        if m.degree() > two_j {
            truncated.push(*m);
            continue;
        }
        let s = sym_monomial(two_j, &letters, &m.exponents())?;
        acc += s.entries() * m.coeff;
    }
    Ok(HatResult {
        matrix: OperatorMatrix::new(two_j, acc)?,
        truncated,
    })
}

/// `Y_{ℓm}` restricted from a homogeneous harmonic polynomial:
/// `Y_{ℓm}(x) = √(radicand) / √(4π) · Σ (re + i·im) x^α y^β z^γ`
/// with rational `re`, `im`.
#[derive(Clone, Debug, PartialEq)]
pub struct YlmPolynomial {
    pub ell: u32,
    pub m: i32,
    /// `√((2ℓ+1)(ℓ-|m|)!/(ℓ+|m|)!)`, exact.
    pub normalization: ExactRadical,
    pub terms: BTreeMap<[u32; 3], (BigRational, BigRational)>,
}

impl YlmPolynomial {
    pub fn to_monomials(&self) -> Vec<Monomial3> {
        let scale = self.normalization.to_f64() / (4.0 * PI).sqrt();
        self.terms
            .iter()
            .map(|(&[a, b, g], (re, im))| {
                let c = Complex::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN));
                Monomial3::new(a, b, g, c * scale)
            })
            .collect()
    }
}

/// Exact expansion of `Y_{ℓm}` in monomials of `(x¹, x², x³)`, from
/// `P_ℓ^{|m|}` written as `Σ_k c_k (x₁ ± i x₂)^{|m|} x₃^{ℓ-2k-|m|} |x|^{2k}`.
pub fn ylm_as_polynomial(ell: u32, m: i32) -> Result<YlmPolynomial> {
    if m.unsigned_abs() > ell {
        return domain(format!("|m| = {} exceeds ℓ = {ell}", m.abs()));
    }
    let am = m.unsigned_abs();
    let l = i64::from(ell);
    let rat = |n: BigInt| BigRational::from_integer(n);
    let normalization = ExactRadical::sqrt_of(
        rat(BigInt::from(2 * ell + 1)) * BigRational::new(factorial_u(u64::from(ell - am)), factorial_u(u64::from(ell + am))),
    )?;
    let cs_sign = if am.is_multiple_of(2) { 1 } else { -1 };
    // m < 0 picks up (-1)^{|m|} once more, cancelling the Condon–Shortley sign
    let overall = if m < 0 { 1 } else { cs_sign };
    let conj = if m < 0 { -1 } else { 1 };
    let two_pow = rat(BigInt::one() << ell);

    let mut terms: BTreeMap<[u32; 3], (BigRational, BigRational)> = BTreeMap::new();
    for k in 0..=((ell - am) / 2) {
        let ki = i64::from(k);
        let mut ck = rat(binomial(l, ki) * binomial(2 * l - 2 * ki, l)) / two_pow.clone()
            * BigRational::new(
                factorial_u((ell - 2 * k) as u64),
                factorial_u((ell - 2 * k - am) as u64),
            );
        if (k % 2 == 1) != (overall == -1) {
            ck = -ck;
        }
        let z_pow = ell - 2 * k - am;
        for p in 0..=am {
            // (x₁ + i·conj·x₂)^{|m|}: i^p conj^p
            let bin = rat(binomial(i64::from(am), i64::from(p)));
            let sgn = if conj == -1 && p % 2 == 1 { -1 } else { 1 };
            let (re_unit, im_unit) = match p % 4 {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            for a in 0..=k {
                for b in 0..=(k - a) {
                    let c = k - a - b;
                    let multi = rat(factorial_u(u64::from(k)))
                        / rat(factorial_u(u64::from(a)) * factorial_u(u64::from(b)) * factorial_u(u64::from(c)));
                    let mag = &ck * &bin * multi * rat(BigInt::from(sgn));
                    let key = [am - p + 2 * a, p + 2 * b, z_pow + 2 * c];
                    let entry = terms
                        .entry(key)
                        .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
                    entry.0 += &mag * rat(BigInt::from(re_unit));
                    entry.1 += &mag * rat(BigInt::from(im_unit));
                }
            }
        }
    }
    terms.retain(|_, (re, im)| !(re.is_zero() && im.is_zero()));
    Ok(YlmPolynomial {
        ell,
        m,
        normalization,
        terms,
    })
}

/// `Ŷ_{ℓm}`: the hat map of the polynomial form of `Y_{ℓm}`. For `ℓ > 2j`
/// the whole polynomial lands in the truncation log and the matrix is zero.
pub fn hat_ylm(params: &FuzzyParams, ell: u32, m: i32) -> Result<HatResult> {
    let poly = ylm_as_polynomial(ell, m)?.to_monomials();
    hat_map(params, &poly)
}

/// `a(ℓ) = √((2ℓ+1)!) / (2^{ℓ+1} √π ℓ!)`.
pub fn a_of_ell(ell: u32) -> f64 {
    factorial_f64(2 * ell + 1).sqrt() / (2f64.powi(ell as i32 + 1) * PI.sqrt() * factorial_f64(ell))
}

fn check_c_args(params: &FuzzyParams, ell: u32) -> Result<()> {
    if params.two_sigma == 0 {
        return domain(
            "σ = 0: the coherent-state quantization of the cartesian sector vanishes, \
             so Ỹ = C(ℓ)Ŷ is not a usable comparison; choose σ ≠ 0",
        );
    }
    if ell > params.two_j {
        return domain(format!("ℓ = {ell} exceeds 2j = {}", params.two_j));
    }
    Ok(())
}

/// The displayed closed form taken literally:
/// `2^ℓ (-1)^{j+σ} (2j+1)/κ^ℓ √((2j-ℓ)!/(2j+ℓ+1)!) (j j ℓ; -σ σ 0)`.
pub fn c_of_ell_printed(params: &FuzzyParams, ell: u32) -> Result<f64> {
    check_c_args(params, ell)?;
    let p = params.ssh();
    let (j, s) = (p.j(), p.sigma());
    let sign = f64::from((j + s).minus_one_pow()?);
    let tj = three_j(&ThreeJKey::new([j, j, HalfInt::from_int(ell as i32)], [-s, s, HalfInt::ZERO]))?;
    let root = ExactRadical::sqrt_of(BigRational::new(
        factorial_u(u64::from(params.two_j - ell)),
        factorial_u(u64::from(params.two_j + ell + 1)),
    ))?;
    Ok(2f64.powi(ell as i32) * sign * (params.two_j as f64 + 1.0) / params.kappa.powi(ell as i32)
        * (&root * &tj).to_f64())
}

/// `C(ℓ)` with the sign that the direct comparison `Ỹ_{ℓm} / Ŷ_{ℓm}`
/// produces: `(-1)^ℓ` times the displayed closed form.
pub fn c_of_ell_closed(params: &FuzzyParams, ell: u32) -> Result<f64> {
    let printed = c_of_ell_printed(params, ell)?;
    Ok(if ell.is_multiple_of(2) { printed } else { -printed })
}

/// Ratios `Ỹ_{ℓm} / Ŷ_{ℓm}` read off the largest entry of `Ŷ_{ℓm}`, per `m`.
#[derive(Clone, Debug)]
pub struct EmpiricalC {
    pub ell: u32,
    pub per_m: Vec<(i32, f64)>,
    pub mean: f64,
    /// `max - min` over `m`.
    pub spread: f64,
    /// Largest imaginary part met in the ratios.
    pub imag: f64,
}

pub fn empirical_c(params: &FuzzyParams, ell: u32) -> Result<EmpiricalC> {
    check_c_args(params, ell)?;
    let p = params.ssh();
    let mut per_m = Vec::new();
    let mut imag: f64 = 0.0;
    for m in -(ell as i32)..=ell as i32 {
        let tilde = quantize_ylm_closed(&p, ell, m)?;
        let hat = hat_ylm(params, ell, m)?.matrix;
        let (idx, _) = hat
            .entries()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("nonempty matrix");
        let ratio = tilde.entries()[idx] / hat.entries()[idx];
        imag = imag.max(ratio.im.abs());
        per_m.push((m, ratio.re));
    }
    let values: Vec<f64> = per_m.iter().map(|v| v.1).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EmpiricalC {
        ell,
        mean: values.iter().sum::<f64>() / values.len() as f64,
        spread: max - min,
        per_m,
        imag,
    })
}

/// Largest entrywise `|Ỹ_{ℓm} - C(ℓ) Ŷ_{ℓm}|` over `m`, using [`c_of_ell_closed`].
pub fn correspondence_residual(params: &FuzzyParams, ell: u32) -> Result<f64> {
    let c = c_of_ell_closed(params, ell)?;
    let p = params.ssh();
    let mut worst: f64 = 0.0;
    for m in -(ell as i32)..=ell as i32 {
        let tilde = quantize_ylm_closed(&p, ell, m)?;
        let hat = hat_ylm(params, ell, m)?.matrix.scale(Complex::new(c, 0.0));
        worst = worst.max(tilde.max_abs_diff(&hat));
    }
    Ok(worst)
}

/// `J_a` acting as a derivation on polynomials, `J_a x_b = i ε_{abc} x_c`;
/// matches `[Λ_a, ·]` on symmetrized monomials.
pub fn apply_j(axis: usize, poly: &[Monomial3]) -> Vec<Monomial3> {
    let i = Complex::new(0.0, 1.0);
    let mut out = Vec::new();
    for m in poly {
        let e = m.exponents();
        for b in 0..3 {
            if e[b] == 0 || b + 1 == axis {
                continue;
            }
            let (c, sign) = levi_civita(axis - 1, b);
            let mut next = e;
            next[b] -= 1;
            next[c] += 1;
            out.push(Monomial3::new(
                next[0],
                next[1],
                next[2],
                m.coeff * i * (sign * f64::from(e[b])),
            ));
        }
    }
    simplify(&out)
}

fn levi_civita(a: usize, b: usize) -> (usize, f64) {
    let c = 3 - a - b;
    let sign = if (a, b, c) == (0, 1, 2) || (a, b, c) == (1, 2, 0) || (a, b, c) == (2, 0, 1) {
        1.0
    } else {
        -1.0
    };
    (c, sign)
}

/// Frobenius norm of `S([Λ_a, X₁^α X₂^β X₃^γ]) - [Λ_a, S(X₁^α X₂^β X₃^γ)]`
/// with `X_b = Λ_b`.
pub fn symmetrization_commutator_check_axis(two_j: u32, exponents: [u32; 3], axis: usize) -> Result<f64> {
    if !(1..=3).contains(&axis) {
        return domain(format!("axis must be 1, 2 or 3, got {axis}"));
    }
    let lam = LambdaMatrices::for_spin(two_j);
    let letters = [&lam.l1, &lam.l2, &lam.l3];
    let mono = [Monomial3::new(exponents[0], exponents[1], exponents[2], Complex::new(1.0, 0.0))];
    let deg = exponents.iter().sum::<u32>();
    let lhs = hat_unbounded(two_j, letters, &apply_j(axis, &mono), deg)?;
    let rhs = lam.axis(axis).commutator(&hat_unbounded(two_j, letters, &mono, deg)?)?;
    Ok(lhs.try_sub(&rhs)?.frobenius_norm())
}

fn hat_unbounded(two_j: u32, letters: [&OperatorMatrix; 3], poly: &[Monomial3], _deg: u32) -> Result<OperatorMatrix> {
    let dim = two_j as usize + 1;
    let mut acc = DMatrix::zeros(dim, dim);
    for m in poly {
        acc += sym_monomial(two_j, &letters, &m.exponents())?.entries() * m.coeff;
    }
    OperatorMatrix::new(two_j, acc)
}

/// The lemma on the `Λ₃` axis.
pub fn symmetrization_commutator_check(j_rep: HalfInt, exponents: [u32; 3]) -> Result<f64> {
    if j_rep < HalfInt::ZERO {
        return domain(format!("negative spin {j_rep}"));
    }
    symmetrization_commutator_check_axis(j_rep.twice() as u32, exponents, 3)
}

/// `‖ℒ_a hat(f) - hat(J_a f)‖_F` for a polynomial of degree `≤ 2j`.
pub fn intertwining_residual(params: &FuzzyParams, axis: usize, poly: &[Monomial3]) -> Result<f64> {
    let lam = LambdaMatrices::for_spin(params.two_j);
    let hat = hat_map(params, poly)?.matrix;
    let lhs = lam.axis(axis).commutator(&hat)?;
    let rhs = hat_map(params, &apply_j(axis, poly))?.matrix;
    Ok(lhs.try_sub(&rhs)?.frobenius_norm())
}

/// Dimension of the joint eigenspace of `ℒ₃` (eigenvalue `m`) and `ℒ²`
/// (eigenvalue `ℓ(ℓ+1)`) on all `(2j+1)²` matrices, by SVD rank.
pub fn joint_eigenspace_dimension(two_j: u32, ell: u32, m: i32) -> usize {
    let d = two_j as usize + 1;
    let n = d * d;
    let lam = LambdaMatrices::for_spin(two_j);
    // superoperator X ↦ [A, X] on column-major vec(X)
    let ad = |a: &OperatorMatrix| {
        let id = DMatrix::<Complex>::identity(d, d);
        id.kronecker(a.entries()) - a.entries().transpose().kronecker(&id)
    };
    let l3 = ad(&lam.l3);
    let cas = lam
        .axes()
        .iter()
        .map(|a| {
            let s = ad(a);
            &s * &s
        })
        .fold(DMatrix::zeros(n, n), |acc, s| acc + s);
    let mut stacked = DMatrix::zeros(2 * n, n);
    let shift3 = l3 - DMatrix::identity(n, n) * Complex::new(f64::from(m), 0.0);
    let shift2 = cas - DMatrix::identity(n, n) * Complex::new(f64::from(ell * (ell + 1)), 0.0);
    stacked.view_mut((0, 0), (n, n)).copy_from(&shift3);
    stacked.view_mut((n, 0), (n, n)).copy_from(&shift2);
    let sv = stacked.svd(false, false).singular_values;
    sv.iter().filter(|s| **s < 1e-9).count()
}

/// One row of the classical-limit sweep.
#[derive(Clone, Debug)]
pub struct LimitRow {
    pub two_j: u32,
    pub two_sigma: i32,
    pub kappa: f64,
    /// `‖[x̂¹, x̂²]‖`.
    pub commutator_norm: f64,
    /// `r²/(j+1)`.
    pub expected_norm: f64,
    /// `max_x |⟨x|x̃³|x⟩ - (σ/(j+1)) cos θ|` over a fixed set of points.
    pub lower_symbol_deviation: f64,
    /// Commutator norm divided by the previous row's.
    pub ratio_to_previous: Option<f64>,
}

/// Commutator norms and lower-symbol deviations for `σ = j - sigma_offset`
/// over the given spins.
pub fn classical_limit_report(sigma_offset: HalfInt, j_list: &[HalfInt], r: f64) -> Result<Vec<LimitRow>> {
    if !sigma_offset.is_integer() {
        return domain(format!("σ offset {sigma_offset} must be an integer"));
    }
    let rows: Vec<Result<LimitRow>> = j_list
        .par_iter()
        .map(|&j| {
            let sigma = j - sigma_offset;
            if sigma == HalfInt::ZERO || sigma.abs() > j {
                return domain(format!("σ = {sigma} is not admissible for j = {j}"));
            }
            let fp = FuzzyParams::new(j.twice() as u32, sigma.twice(), r)?;
            let [x1, x2, _] = fp.coordinates();
            let commutator_norm = x1.commutator(&x2)?.operator_norm();
            let jf = j.to_f64();
            let p = fp.ssh();
            let x3 = quantize_ylm_closed(&p, 1, 0)?.scale(Complex::new((4.0 * PI / 3.0).sqrt(), 0.0));
            let mut deviation: f64 = 0.0;
            for k in 0..=32 {
                let x = SpherePoint::new(PI * f64::from(k) / 32.0, 0.37);
                let v = lower_symbol(&p, &x3, x)?;
                deviation = deviation.max((v - sigma.to_f64() / (jf + 1.0) * x.theta.cos()).norm());
            }
            Ok(LimitRow {
                two_j: fp.two_j,
                two_sigma: fp.two_sigma,
                kappa: fp.kappa,
                commutator_norm,
                expected_norm: r * r / (jf + 1.0),
                lower_symbol_deviation: deviation,
                ratio_to_previous: None,
            })
        })
        .collect();
    let mut out: Vec<LimitRow> = rows.into_iter().collect::<Result<_>>()?;
    for i in 1..out.len() {
        out[i].ratio_to_previous = Some(out[i].commutator_norm / out[i - 1].commutator_norm);
    }
    Ok(out)
}
