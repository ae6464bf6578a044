//! Jacobi polynomials with integer (possibly negative) parameters and the
//! associated Legendre functions built from them.

use crate::algebra::{binomial_f64, factorial_f64};

/// Degree and integer parameters of `P_n^{(α,β)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JacobiParams {
    pub n: u32,
    pub alpha: i32,
    pub beta: i32,
}

impl JacobiParams {
    pub fn new(n: u32, alpha: i32, beta: i32) -> Self {
        JacobiParams { n, alpha, beta }
    }
}

/// `P_n^{(α,β)}(x)`.
///
/// A negative upper parameter `α = -l` with `l ≤ n` is reduced with
///
/// `P_n^{(-l,β)}(x) = C(n+β, l)/C(n, l) · ((x-1)/2)^l · P_{n-l}^{(l,β)}(x)`,
///
/// and a negative lower parameter goes through `P_n^{(α,β)}(x) = (-1)^n P_n^{(β,α)}(-x)`
/// first. Everything else is the explicit finite sum.
pub fn jacobi(params: JacobiParams, x: f64) -> f64 {
    let JacobiParams { n, alpha, beta } = params;
    if n == 0 {
        return 1.0;
    }
    if alpha <= -1 && (-alpha) as u32 <= n {
        let l = -alpha;
        let ratio = binomial_f64(i64::from(n) + i64::from(beta), i64::from(l))
            / binomial_f64(i64::from(n), i64::from(l));
        let rest = jacobi(JacobiParams::new(n - l as u32, l, beta), x);
        return ratio * ((x - 1.0) / 2.0).powi(l) * rest;
    }
    if beta <= -1 && (-beta) as u32 <= n {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * jacobi(JacobiParams::new(n, beta, alpha), -x);
    }
    jacobi_series(params, x)
}

/// `Σ_s C(n+α, n-s) C(n+β, s) ((x-1)/2)^s ((x+1)/2)^{n-s}` with generalized
/// binomials. Valid for every integer `α`, `β`.
pub fn jacobi_series(params: JacobiParams, x: f64) -> f64 {
    let n = i64::from(params.n);
    let (a, b) = (i64::from(params.alpha), i64::from(params.beta));
    let (lo, hi) = ((x - 1.0) / 2.0, (x + 1.0) / 2.0);
    let mut acc = 0.0;
    for s in 0..=n {
        let c = binomial_f64(n + a, n - s) * binomial_f64(n + b, s);
        if c != 0.0 {
            acc += c * lo.powi(s as i32) * hi.powi((n - s) as i32);
        }
    }
    acc
}

/// `P_n^{(α,β)}(x)` by the three-term recurrence, or `None` when a
/// recurrence denominator vanishes.
pub fn jacobi_recurrence(params: JacobiParams, x: f64) -> Option<f64> {
    let (a, b) = (f64::from(params.alpha), f64::from(params.beta));
    let mut prev = 1.0;
    if params.n == 0 {
        return Some(prev);
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 1..params.n {
        let k = f64::from(k);
        let s = 2.0 * k + a + b;
        let denom = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
        if denom == 0.0 {
            return None;
        }
        let next = ((s + 1.0) * ((s + 2.0) * s * x + a * a - b * b) * cur
            - 2.0 * (k + a) * (k + b) * (s + 2.0) * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// Residual of the three-term recurrence at degree `n ≥ 1`, taken on the
/// values produced by [`jacobi`] and scaled by the largest term.
pub fn jacobi_recurrence_residual(params: JacobiParams, x: f64) -> f64 {
    let JacobiParams { n, alpha, beta } = params;
    let (a, b) = (f64::from(alpha), f64::from(beta));
    let k = f64::from(n);
    let s = 2.0 * k + a + b;
    let p = |d: u32| jacobi(JacobiParams::new(d, alpha, beta), x);
    let lhs = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s * p(n + 1);
    let mid = (s + 1.0) * ((s + 2.0) * s * x + a * a - b * b) * p(n);
    let low = 2.0 * (k + a) * (k + b) * (s + 2.0) * p(n.saturating_sub(1));
    let scale = lhs.abs().max(mid.abs()).max(low.abs()).max(1.0);
    (lhs - mid + low).abs() / scale
}

/// `s^a c^b P_n^{(a,b)}(c² - s²)` for `s = sin ω`, `c = cos ω`, with negative
/// `a` or `b` absorbed by the reflection identity so that no negative power
/// is ever formed. This is the building block of the D-matrix and spin
/// harmonic Jacobi forms, and stays finite at `ω = 0, π/2`.
pub fn half_angle_jacobi(n: u32, a: i32, b: i32, s: f64, c: f64) -> f64 {
    if n > 0 && a <= -1 && (-a) as u32 <= n {
        let l = -a;
        let ratio = binomial_f64(i64::from(n) + i64::from(b), i64::from(l))
            / binomial_f64(i64::from(n), i64::from(l));
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        return sign * ratio * half_angle_jacobi(n - l as u32, l, b, s, c);
    }
    if n > 0 && b <= -1 && (-b) as u32 <= n {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * half_angle_jacobi(n, b, a, c, s);
    }
    let p = jacobi(JacobiParams::new(n, a, b), c * c - s * s);
    s.powi(a) * c.powi(b) * p
}

/// Associated Legendre function `P_j^m(z)` including the Condon–Shortley
/// sign, from `P_j^m = (-1)^m (j+m)!/(2^m j!) (1-z²)^{m/2} P_{j-m}^{(m,m)}`.
/// Negative `m` uses `P_j^{-m} = (-1)^m (j-m)!/(j+m)! P_j^m`.
pub fn assoc_legendre(j: u32, m: i32, z: f64) -> f64 {
    let mu = m.unsigned_abs();
    if mu > j {
        return 0.0;
    }
    let sign = if mu.is_multiple_of(2) { 1.0 } else { -1.0 };
    let positive = sign * factorial_f64(j + mu) / (2f64.powi(mu as i32) * factorial_f64(j))
        * (1.0 - z * z).max(0.0).powf(f64::from(mu) / 2.0)
        * jacobi(JacobiParams::new(j - mu, mu as i32, mu as i32), z);
    if m >= 0 {
        positive
    } else {
        sign * factorial_f64(j - mu) / factorial_f64(j + mu) * positive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn low_degrees() {
        for &(a, b) in &[(0, 0), (2, -1), (-3, 4), (-1, -1)] {
            assert_eq!(jacobi(JacobiParams::new(0, a, b), 0.37), 1.0);
        }
        for &x in &[-1.0, -0.2, 0.5, 1.0] {
            assert!(close(jacobi(JacobiParams::new(1, 0, 0), x), x, 1e-15));
        }
    }

    #[test]
    fn hypergeometric_oracle() {
        // P_n^{(α,β)}(x) = (α+1)_n/n! · 2F1(-n, n+α+β+1; α+1; (1-x)/2)
        fn oracle(n: i32, a: i32, b: i32, x: f64) -> f64 {
            let poch = |q: f64, k: i32| (0..k).map(|i| q + f64::from(i)).product::<f64>();
            let y = (1.0 - x) / 2.0;
            let mut sum = 0.0;
            for k in 0..=n {
                let term = poch(-f64::from(n), k) * poch(f64::from(n + a + b + 1), k)
                    / poch(f64::from(a + 1), k)
                    / poch(1.0, k)
                    * y.powi(k);
                sum += term;
            }
            poch(f64::from(a + 1), n) / poch(1.0, n) * sum
        }
        let got = jacobi(JacobiParams::new(3, 2, -1), 0.3);
        assert!(close(got, oracle(3, 2, -1, 0.3), 1e-13), "{got}");
        assert!(close(jacobi_series(JacobiParams::new(3, 2, -1), 0.3), got, 1e-14));
    }

    #[test]
    fn reflection_agrees_with_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8u32);
            let a = rng.gen_range(-(n as i32)..=-1);
            let b = rng.gen_range(-3..=4);
            let x = rng.gen_range(-1.0..1.0);
            let p = JacobiParams::new(n, a, b);
            assert!(close(jacobi(p, x), jacobi_series(p, x), 1e-10), "{p:?} {x}");
        }
    }

    #[test]
    fn recurrence_residual_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 100 {
            let n = rng.gen_range(1..=10u32);
            let a = rng.gen_range(-3..=3);
            let b = rng.gen_range(-3..=3);
            let k = f64::from(n);
            let s = 2.0 * k + f64::from(a + b);
            if s == 0.0 || k + f64::from(a + b) + 1.0 == 0.0 {
                continue;
            }
            let x = rng.gen_range(-0.999..0.999);
            let r = jacobi_recurrence_residual(JacobiParams::new(n, a, b), x);
            assert!(r < 1e-12, "n={n} a={a} b={b} x={x} r={r}");
            tested += 1;
        }
    }

    #[test]
    fn recurrence_oracle_positive_params() {
        for n in 0..10 {
            for &(a, b) in &[(0, 0), (1, 2), (3, 0), (2, 2)] {
                let p = JacobiParams::new(n, a, b);
                let r = jacobi_recurrence(p, 0.41).unwrap();
                assert!(close(jacobi(p, 0.41), r, 1e-12));
            }
        }
    }

    #[test]
    fn half_angle_form_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(0..=6u32);
            let a = rng.gen_range(-(n as i32)..=4);
            let b = rng.gen_range(-(n as i32)..=4);
            let w: f64 = rng.gen_range(0.1..1.4);
            let (s, c) = w.sin_cos();
            let direct = s.powi(a) * c.powi(b) * jacobi_series(JacobiParams::new(n, a, b), c * c - s * s);
            let got = half_angle_jacobi(n, a, b, s, c);
            assert!(close(got, direct, 1e-10 * direct.abs().max(1.0)), "{n} {a} {b} {w}");
        }
        // finite at the endpoint where s^a alone would blow up
        assert!(half_angle_jacobi(2, -2, 1, 0.0, 1.0).is_finite());
    }

    #[test]
    fn legendre_values() {
        for &z in &[-0.8, 0.0, 0.25, 0.9] {
            assert!(close(assoc_legendre(1, 0, z), z, 1e-15));
            let p21 = -3.0 * z * (1.0 - z * z).sqrt();
            assert!(close(assoc_legendre(2, 1, z), p21, 1e-14));
            assert!(close(assoc_legendre(2, -1, z), -p21 / 6.0, 1e-14));
        }
        assert!(close(assoc_legendre(1, 1, 0.0), -1.0, 1e-15));
    }

    #[test]
    fn legendre_jacobi_relation() {
        // P_{j-m}^{(m,m)}(z) = (-1)^m 2^m (1-z²)^{-m/2} j!/(j+m)! P_j^m(z)
        for j in 0..=5u32 {
            for m in 0..=j {
                for &z in &[-0.7, -0.1, 0.33, 0.8] {
                    let lhs = jacobi(JacobiParams::new(j - m, m as i32, m as i32), z);
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let rhs = sign * 2f64.powi(m as i32) * (1.0 - z * z).powf(-(m as f64) / 2.0)
                        * factorial_f64(j)
                        / factorial_f64(j + m)
                        * assoc_legendre(j, m as i32, z);
                    assert!(close(lhs, rhs, 1e-12 * lhs.abs().max(1.0)));
                }
            }
        }
    }
}
