use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::algebra::HalfInt;
use crate::error::{Error, Result};
use crate::Complex;

/// A dense `(2j+1)×(2j+1)` complex matrix whose rows and columns are labelled
/// by magnetic numbers in ascending order, row index `μ + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    two_j: u32,
    entries: DMatrix<Complex>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(two_j: u32, entries: DMatrix<Complex>) -> Result<Self> {
        let dim = two_j as usize + 1;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(OperatorMatrix {
            two_j,
            entries,
            hermitian: false,
        })
    }

    pub fn zeros(two_j: u32) -> Self {
        let d = two_j as usize + 1;
        OperatorMatrix {
            two_j,
            entries: DMatrix::zeros(d, d),
            hermitian: true,
        }
    }

    pub fn identity(two_j: u32) -> Self {
        let d = two_j as usize + 1;
        OperatorMatrix {
            two_j,
            entries: DMatrix::identity(d, d),
            hermitian: true,
        }
    }

    pub fn from_fn<F: FnMut(HalfInt, HalfInt) -> Complex>(two_j: u32, mut f: F) -> Self {
        let d = two_j as usize + 1;
        let label = |i: usize| HalfInt::from_twice(2 * i as i32 - two_j as i32);
        OperatorMatrix {
            two_j,
            entries: DMatrix::from_fn(d, d, |r, c| f(label(r), label(c))),
            hermitian: false,
        }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex> {
        self.entries
    }

    /// Row (or column) index of magnetic number `mu`.
    pub fn index_of(&self, mu: HalfInt) -> Option<usize> {
        let k = mu.twice() + self.two_j as i32;
        (k >= 0 && k % 2 == 0 && k / 2 < self.dim() as i32).then_some(k as usize / 2)
    }

    /// The element `⟨μ|A|ν⟩`; zero when a label is out of range.
    pub fn get(&self, mu: HalfInt, nu: HalfInt) -> Complex {
        match (self.index_of(mu), self.index_of(nu)) {
            (Some(r), Some(c)) => self.entries[(r, c)],
            _ => Complex::new(0.0, 0.0),
        }
    }

    /// Whether the matrix was built or certified as Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// Symmetrizes to `(A + A†)/2` and sets the Hermitian flag when the
    /// residual is below `tol`; otherwise returns the matrix unchanged.
    pub fn certify_hermitian(mut self, tol: f64) -> Self {
        if self.hermiticity_residual() < tol {
            self.entries = (&self.entries + self.entries.adjoint()) * Complex::new(0.5, 0.0);
            self.hermitian = true;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            two_j: self.two_j,
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, factor: Complex) -> Self {
        let real = factor.im == 0.0;
        OperatorMatrix {
            two_j: self.two_j,
            entries: &self.entries * factor,
            hermitian: self.hermitian && real,
        }
    }

    pub fn check_same_dim(&self, other: &OperatorMatrix) -> Result<()> {
        if self.two_j != other.two_j {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.raw(&self.entries * &other.entries))
    }

    pub fn try_add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.raw(&self.entries + &other.entries);
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    pub fn try_sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.raw(&self.entries - &other.entries);
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        Ok(self.raw(ab - ba))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// Largest entrywise `|A - B|`; infinite on a dimension mismatch.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        if self.two_j != other.two_j {
            return f64::INFINITY;
        }
        max_abs(&(&self.entries - &other.entries))
    }

    pub fn trace(&self) -> Complex {
        self.entries.trace()
    }

    fn raw(&self, entries: DMatrix<Complex>) -> Self {
        OperatorMatrix {
            two_j: self.two_j,
            entries,
            hermitian: false,
        }
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Panics on mismatched dimensions; use [`OperatorMatrix::try_mul`] for a checked product.
impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).expect("operator dimensions differ")
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_add(rhs).expect("operator dimensions differ")
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_sub(rhs).expect("operator dimensions differ")
    }
}
