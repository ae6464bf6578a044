use std::f64::consts::PI;

use crate::algebra::HalfInt;

/// Range of the azimuth: the ordinary sphere, or the 4π cover on which
/// half-integer harmonics are single valued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhiPeriod {
    Single,
    Doubled,
}

impl PhiPeriod {
    /// The period appropriate for spin `j`.
    pub fn for_spin(j: HalfInt) -> Self {
        if j.is_integer() {
            PhiPeriod::Single
        } else {
            PhiPeriod::Doubled
        }
    }

    pub fn length(self) -> f64 {
        match self {
            PhiPeriod::Single => 2.0 * PI,
            PhiPeriod::Doubled => 4.0 * PI,
        }
    }
}

/// A point `(θ, φ)` in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        SpherePoint { theta, phi }
    }

    pub fn north() -> Self {
        SpherePoint::new(0.0, 0.0)
    }

    /// The point with `φ` reduced into `[0, period)`.
    pub fn wrapped(self, period: PhiPeriod) -> Self {
        SpherePoint::new(self.theta, self.phi.rem_euclid(period.length()))
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Inverse of [`cartesian`](Self::cartesian) for a nonzero vector; `φ` in `[0, 2π)`.
    pub fn from_cartesian(x: [f64; 3]) -> Self {
        let rho = x[0].hypot(x[1]);
        let theta = rho.atan2(x[2]);
        let phi = if rho == 0.0 {
            0.0
        } else {
            x[1].atan2(x[0]).rem_euclid(2.0 * PI)
        };
        SpherePoint::new(theta, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_round_trip() {
        for &(t, p) in &[(0.3, 1.2), (2.9, 5.5), (1.0, 0.0), (PI / 2.0, PI)] {
            let x = SpherePoint::new(t, p);
            let y = SpherePoint::from_cartesian(x.cartesian());
            assert!((x.theta - y.theta).abs() < 1e-14);
            assert!((x.phi - y.phi).abs() < 1e-14);
        }
        let pole = SpherePoint::from_cartesian([0.0, 0.0, 2.0]);
        assert_eq!(pole.theta, 0.0);
    }

    #[test]
    fn wrapping() {
        let x = SpherePoint::new(1.0, -0.5).wrapped(PhiPeriod::Doubled);
        assert!((x.phi - (4.0 * PI - 0.5)).abs() < 1e-14);
        assert_eq!(PhiPeriod::for_spin(HalfInt::from_twice(3)), PhiPeriod::Doubled);
        assert_eq!(PhiPeriod::for_spin(HalfInt::from_twice(2)), PhiPeriod::Single);
    }
}
