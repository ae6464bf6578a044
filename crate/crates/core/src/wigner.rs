//! SU(2) elements in bicomplex angles, exact 3j-symbols and the matrix
//! elements `D^j_{m₁m₂}(ξ)` of the irreducible representations.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{factorial_f64, factorial_u, ExactRadical, HalfInt};
use crate::error::{domain, Result};
use crate::quad::gauss_legendre;
use crate::specfun::half_angle_jacobi;
use crate::Complex;

/// `ξ ∈ SU(2)` with `ξ₀ + iξ₃ = cos ω e^{iψ₁}` and `ξ₁ + iξ₂ = sin ω e^{iψ₂}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Element {
    pub omega: f64,
    pub psi1: f64,
    pub psi2: f64,
}

impl Su2Element {
    pub fn new(omega: f64, psi1: f64, psi2: f64) -> Self {
        Su2Element { omega, psi1, psi2 }
    }

    pub fn identity() -> Self {
        Su2Element::new(0.0, 0.0, 0.0)
    }

    /// `(ξ₀, ξ₁, ξ₂, ξ₃)`.
    pub fn components(&self) -> [f64; 4] {
        let (s, c) = self.omega.sin_cos();
        [
            c * self.psi1.cos(),
            s * self.psi2.cos(),
            s * self.psi2.sin(),
            c * self.psi1.sin(),
        ]
    }

    /// Angles from components; the 4-vector is normalized first.
    pub fn from_components(xi: [f64; 4]) -> Self {
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [x0, x1, x2, x3] = xi.map(|x| x / norm);
        let omega = x1.hypot(x2).atan2(x0.hypot(x3));
        let psi1 = x3.atan2(x0).rem_euclid(2.0 * PI);
        let psi2 = x2.atan2(x1).rem_euclid(2.0 * PI);
        Su2Element::new(omega, psi1, psi2)
    }

    /// `[[ξ₀+iξ₃, -ξ₂+iξ₁], [ξ₂+iξ₁, ξ₀-iξ₃]]`.
    pub fn matrix(&self) -> Matrix2<Complex> {
        let [x0, x1, x2, x3] = self.components();
        Matrix2::new(
            Complex::new(x0, x3),
            Complex::new(-x2, x1),
            Complex::new(x2, x1),
            Complex::new(x0, -x3),
        )
    }

    pub fn from_matrix(m: &Matrix2<Complex>) -> Self {
        let z = m[(0, 0)];
        let w = m[(0, 1)] / Complex::new(0.0, 1.0);
        Su2Element::from_components([z.re, w.re, w.im, z.im])
    }

    pub fn mul(&self, other: &Su2Element) -> Su2Element {
        Su2Element::from_matrix(&(self.matrix() * other.matrix()))
    }

    pub fn inverse(&self) -> Su2Element {
        let [x0, x1, x2, x3] = self.components();
        Su2Element::from_components([x0, -x1, -x2, -x3])
    }

    /// The rotation `R` with `ξ X(r) ξ† = X(R r)`, where
    /// `X(r) = [[i x₃, -x₂+i x₁], [x₂+i x₁, -i x₃]]`.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        let m = self.matrix();
        let md = m.adjoint();
        let mut r = Matrix3::zeros();
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let y = m * embed(e) * md;
            let v = extract(&y);
            for i in 0..3 {
                r[(i, k)] = v[i];
            }
        }
        r
    }

    /// `R · x`.
    pub fn rotate(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.rotation_matrix() * Vector3::from(x);
        [v[0], v[1], v[2]]
    }
}

fn embed(x: [f64; 3]) -> Matrix2<Complex> {
    Matrix2::new(
        Complex::new(0.0, x[2]),
        Complex::new(-x[1], x[0]),
        Complex::new(x[1], x[0]),
        Complex::new(0.0, -x[2]),
    )
}

fn extract(y: &Matrix2<Complex>) -> [f64; 3] {
    [y[(1, 0)].im, y[(1, 0)].re, y[(0, 0)].im]
}

/// The preimage of the rotation by `angle` about the unit `axis`:
/// `ξ = (cos(α/2), sin(α/2) n)`, sign chosen so that `ξ₀ ≥ 0`, ties broken
/// toward `ξ₃ ≥ 0`, then `ξ₂ ≥ 0`, then `ξ₁ ≥ 0`.
pub fn su2_from_rotation(axis: [f64; 3], angle: f64) -> Result<Su2Element> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return domain(format!("rotation axis has norm {norm}, expected 1"));
    }
    let (s, c) = (angle / 2.0).sin_cos();
    let mut xi = [c, s * axis[0], s * axis[1], s * axis[2]];
    if xi[0].abs() <= 1e-15 {
        xi[0] = 0.0;
        let lead = [xi[3], xi[2], xi[1]]
            .into_iter()
            .find(|v| v.abs() > 1e-15)
            .unwrap_or(0.0);
        if lead < 0.0 {
            xi = xi.map(|v| -v);
        }
    } else if xi[0] < 0.0 {
        xi = xi.map(|v| -v);
    }
    Ok(Su2Element::from_components(xi))
}

/// Arguments of a 3j-symbol, as twice-values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThreeJKey {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j3: HalfInt,
    pub m1: HalfInt,
    pub m2: HalfInt,
    pub m3: HalfInt,
}

impl ThreeJKey {
    pub fn new(j: [HalfInt; 3], m: [HalfInt; 3]) -> Self {
        ThreeJKey {
            j1: j[0],
            j2: j[1],
            j3: j[2],
            m1: m[0],
            m2: m[1],
            m3: m[2],
        }
    }

    /// From twice-values `(2j₁, 2j₂, 2j₃, 2m₁, 2m₂, 2m₃)`.
    pub fn from_twice(t: [i32; 6]) -> Self {
        let h = t.map(HalfInt::from_twice);
        ThreeJKey::new([h[0], h[1], h[2]], [h[3], h[4], h[5]])
    }

    fn columns(&self) -> [(HalfInt, HalfInt); 3] {
        [(self.j1, self.m1), (self.j2, self.m2), (self.j3, self.m3)]
    }

    fn from_columns(c: [(HalfInt, HalfInt); 3]) -> Self {
        ThreeJKey::new([c[0].0, c[1].0, c[2].0], [c[0].1, c[1].1, c[2].1])
    }

    /// The twelve keys related by column permutations and `m → -m`, each
    /// with `true` when the symbol picks up `(-1)^{j₁+j₂+j₃}`.
    pub fn symmetry_variants(&self) -> Vec<(ThreeJKey, bool)> {
        const PERMS: [([usize; 3], bool); 6] = [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([1, 0, 2], true),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
        ];
        let cols = self.columns();
        let mut out = Vec::with_capacity(12);
        for (p, odd) in PERMS {
            let permuted = [cols[p[0]], cols[p[1]], cols[p[2]]];
            out.push((ThreeJKey::from_columns(permuted), odd));
            let flipped = permuted.map(|(j, m)| (j, -m));
            out.push((ThreeJKey::from_columns(flipped), !odd));
        }
        out
    }

    fn is_admissible(&self) -> bool {
        let cols = self.columns();
        let m_ok = cols
            .iter()
            .all(|&(j, m)| m.abs() <= j && (j - m).is_integer());
        let sum = self.j1 + self.j2 + self.j3;
        m_ok
            && (self.m1 + self.m2 + self.m3) == HalfInt::ZERO
            && sum.is_integer()
            && (self.j1 - self.j2).abs() <= self.j3
            && self.j3 <= self.j1 + self.j2
    }
}

fn fact(h: HalfInt) -> BigInt {
    factorial_u(h.to_i32().expect("integer factorial argument") as u64)
}

/// The 3j-symbol by direct evaluation of the Racah sum, without the cache.
pub fn three_j_uncached(key: &ThreeJKey) -> Result<ExactRadical> {
    let ThreeJKey {
        j1,
        j2,
        j3,
        m1,
        m2,
        m3,
    } = *key;
    if j1 < HalfInt::ZERO || j2 < HalfInt::ZERO || j3 < HalfInt::ZERO {
        return domain(format!("negative spin in 3j-symbol ({j1}, {j2}, {j3})"));
    }
    if !key.is_admissible() {
        return Ok(ExactRadical::zero());
    }
    let triangle = BigRational::new(
        fact(j1 + j2 - j3) * fact(j1 - j2 + j3) * fact(j2 + j3 - j1),
        fact(j1 + j2 + j3 + HalfInt::from_int(1)),
    );
    let projections = fact(j1 + m1)
        * fact(j1 - m1)
        * fact(j2 + m2)
        * fact(j2 - m2)
        * fact(j3 + m3)
        * fact(j3 - m3);
    let radicand = triangle * BigRational::from_integer(projections);

    // s runs over integers making every factorial argument nonnegative
    let lower = [HalfInt::ZERO, j2 - j3 - m1, j1 - j3 + m2]
        .into_iter()
        .max()
        .unwrap();
    let upper = [j2 + m2, j1 - m1, j1 + j2 - j3].into_iter().min().unwrap();
    let mut sum = BigRational::zero();
    let mut s = lower;
    while s <= upper {
        let denom = fact(s)
            * fact(j2 + m2 - s)
            * fact(j1 - m1 - s)
            * fact(j3 - j2 + m1 + s)
            * fact(j3 - j1 - m2 + s)
            * fact(j1 + j2 - j3 - s);
        let term = BigRational::new(BigInt::one(), denom);
        if s.minus_one_pow()? == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        s = s + HalfInt::from_int(1);
    }
    let sign = (j1 - j2 - m3).minus_one_pow()?;
    let coeff = if sign == 1 { sum } else { -sum };
    ExactRadical::new(coeff, radicand)
}

fn cache() -> &'static RwLock<HashMap<ThreeJKey, ExactRadical>> {
    static CACHE: OnceLock<RwLock<HashMap<ThreeJKey, ExactRadical>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Number of canonical keys currently memoized.
pub fn three_j_cache_len() -> usize {
    cache().read().map(|c| c.len()).unwrap_or(0)
}

/// The 3j-symbol, memoized under the smallest of its twelve symmetry-related
/// keys. Exact zero outside the selection and triangle rules.
pub fn three_j(key: &ThreeJKey) -> Result<ExactRadical> {
    if key.j1 < HalfInt::ZERO || key.j2 < HalfInt::ZERO || key.j3 < HalfInt::ZERO {
        return three_j_uncached(key);
    }
    if !key.is_admissible() {
        return Ok(ExactRadical::zero());
    }
    let (canonical, flips) = key
        .symmetry_variants()
        .into_iter()
        .min_by_key(|(k, _)| *k)
        .expect("twelve variants");
    let odd_total = (key.j1 + key.j2 + key.j3).minus_one_pow()? == -1;
    let negate = flips && odd_total;
    let adjust = |v: ExactRadical| if negate { -v } else { v };

    if let Some(v) = cache().read().ok().and_then(|c| c.get(&canonical).cloned()) {
        return Ok(adjust(v));
    }
    let v = three_j_uncached(&canonical)?;
    if let Ok(mut c) = cache().write() {
        c.insert(canonical, v.clone());
    }
    Ok(adjust(v))
}

/// Float value of a 3j-symbol from twice-values; zero on a domain error.
pub fn three_j_f64(t: [i32; 6]) -> f64 {
    three_j(&ThreeJKey::from_twice(t))
        .map(|v| v.to_f64())
        .unwrap_or(0.0)
}

fn cpow(z: Complex, k: i32) -> Complex {
    if k == 0 {
        Complex::new(1.0, 0.0)
    } else {
        z.powi(k)
    }
}

/// `D^j_{m₁m₂}(ξ)` from the finite sum in the components of `ξ`.
pub fn wigner_d(j: HalfInt, m1: HalfInt, m2: HalfInt, xi: &Su2Element) -> Complex {
    let zero = Complex::new(0.0, 0.0);
    if m1.abs() > j || m2.abs() > j || !(j - m1).is_integer() || !(j - m2).is_integer() {
        return zero;
    }
    let [x0, x1, x2, x3] = xi.components();
    let a = Complex::new(x0, x3);
    let b = Complex::new(x0, -x3);
    let c = Complex::new(-x2, x1);
    let d = Complex::new(x2, x1);
    let int = |h: HalfInt| h.to_i32().expect("integer exponent");
    let (e_a, e_b, e_c) = (int(j - m2), int(j + m1), int(m2 - m1));
    let f = |k: i32| factorial_f64(k as u32);
    let mut sum = zero;
    let t_lo = 0.max(-e_c);
    let t_hi = e_a.min(e_b);
    for t in t_lo..=t_hi {
        sum += cpow(a, e_a - t) / f(e_a - t) * cpow(b, e_b - t) / f(e_b - t) * cpow(c, t + e_c)
            / f(t + e_c)
            * cpow(d, t)
            / f(t);
    }
    let pre = (f(int(j + m1)) * f(int(j - m1)) * f(int(j + m2)) * f(int(j - m2))).sqrt();
    let sign = if int(m1 - m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sum * (sign * pre)
}

/// `D^j_{m₁m₂}(ξ)` from the Jacobi-polynomial form in the angles of `ξ`.
pub fn wigner_d_jacobi(j: HalfInt, m1: HalfInt, m2: HalfInt, xi: &Su2Element) -> Complex {
    if m1.abs() > j || m2.abs() > j || !(j - m1).is_integer() || !(j - m2).is_integer() {
        return Complex::new(0.0, 0.0);
    }
    let int = |h: HalfInt| h.to_i32().expect("integer label");
    let (m1f, m2f) = (m1.to_f64(), m2.to_f64());
    let phase = Complex::from_polar(
        1.0,
        -m1f * (xi.psi1 + xi.psi2) - m2f * (xi.psi1 - xi.psi2) + PI / 2.0 * (m2f - m1f),
    );
    let f = |h: HalfInt| factorial_f64(int(h) as u32);
    let norm = (f(j - m1) * f(j + m1) / (f(j - m2) * f(j + m2))).sqrt();
    let (s, c) = xi.omega.sin_cos();
    let n = int(j - m1) as u32;
    phase * (norm * half_angle_jacobi(n, int(m1 - m2), int(m1 + m2), s, c))
}

/// The full matrix `[D^j_{m₁m₂}(ξ)]`, rows and columns in ascending `m`.
pub fn wigner_d_matrix(two_j: u32, xi: &Su2Element) -> DMatrix<Complex> {
    let j = HalfInt::from_twice(two_j as i32);
    let labels: Vec<HalfInt> = j.projections().collect();
    DMatrix::from_fn(labels.len(), labels.len(), |r, c| {
        wigner_d(j, labels[r], labels[c], xi)
    })
}

/// Largest deviation of `∫ D^j_{m₁m₂} (D^{j'}_{m₁'m₂'})* dμ` from
/// `8π²/(2j+1) δ δ δ`, integrated with `order` Gauss nodes in `cos 2ω` and
/// `order` uniform nodes in each of `ψ₁`, `ψ₂`.
///
/// The density `sin 2ω dω dψ₁ dψ₂` over the stated ranges has total mass
/// `4π²`; it is doubled here so the group volume is `8π²`.
pub fn orthogonality_defect(two_j: u32, two_jp: u32, order: usize) -> f64 {
    let order = order.max(1);
    let (u, w) = gauss_legendre(order);
    let dpsi = 2.0 * PI / order as f64;
    let (d1, d2) = (two_j as usize + 1, two_jp as usize + 1);
    let mut acc = vec![Complex::new(0.0, 0.0); d1 * d1 * d2 * d2];
    for (ui, wi) in u.iter().zip(&w) {
        let omega = ui.clamp(-1.0, 1.0).acos() / 2.0;
        for a in 0..order {
            for b in 0..order {
                let xi = Su2Element::new(omega, a as f64 * dpsi, b as f64 * dpsi);
                let weight = 2.0 * (wi / 2.0) * dpsi * dpsi;
                let da = wigner_d_matrix(two_j, &xi);
                let db = wigner_d_matrix(two_jp, &xi);
                let mut idx = 0;
                for r in 0..d1 {
                    for c in 0..d1 {
                        for rp in 0..d2 {
                            for cp in 0..d2 {
                                acc[idx] += da[(r, c)] * db[(rp, cp)].conj() * weight;
                                idx += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let diag = 8.0 * PI * PI / (two_j as f64 + 1.0);
    let mut worst: f64 = 0.0;
    let mut idx = 0;
    for r in 0..d1 {
        for c in 0..d1 {
            for rp in 0..d2 {
                for cp in 0..d2 {
                    let expect = if two_j == two_jp && r == rp && c == cp {
                        diag
                    } else {
                        0.0
                    };
                    worst = worst.max((acc[idx] - expect).norm());
                    idx += 1;
                }
            }
        }
    }
    worst
}

/// An order at which [`orthogonality_defect`] is exact up to rounding.
pub fn orthogonality_order(two_j: u32, two_jp: u32) -> usize {
    (two_j + two_jp + 2) as usize
}
