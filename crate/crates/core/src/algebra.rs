//! Exact arithmetic substrate: half-integers stored as twice-values, big
//! factorials and binomials, and numbers of the form `c·√r` with rational `c`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// A spin or magnetic label `j ∈ ½ℤ`, stored as the integer `2j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// The value as an integer, if it is one.
    pub fn to_i32(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// `(-1)^self` for integer-valued labels.
    pub fn minus_one_pow(self) -> Result<i32> {
        match self.to_i32() {
            Some(n) if n.rem_euclid(2) == 0 => Ok(1),
            Some(_) => Ok(-1),
            None => domain(format!("(-1)^{self} is not a sign for half-integer exponent")),
        }
    }

    /// Same parity class (both integer or both half-integer).
    pub fn same_parity(self, other: HalfInt) -> bool {
        (self.0 - other.0).rem_euclid(2) == 0
    }

    /// The magnetic numbers `-j, -j+1, ..., j` in ascending order.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j = self.0;
        (-j..=j).step_by(2).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

const FACTORIAL_TABLE_LEN: usize = 256;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        let mut acc = BigInt::one();
        table.push(acc.clone());
        for k in 1..FACTORIAL_TABLE_LEN {
            acc *= k;
            table.push(acc.clone());
        }
        table
    })
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: i64) -> Result<BigInt> {
    if n < 0 {
        return domain(format!("factorial of negative number {n}"));
    }
    Ok(factorial_u(n as u64))
}

pub(crate) fn factorial_u(n: u64) -> BigInt {
    let table = factorial_table();
    if (n as usize) < table.len() {
        return table[n as usize].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for k in table.len() as u64..=n {
        acc *= k;
    }
    acc
}

/// `n!` in floating point; exact up to 22! and correctly rounded beyond.
pub fn factorial_f64(n: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        factorial_table()
            .iter()
            .take(171)
            .map(|f| f.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    });
    table.get(n as usize).copied().unwrap_or(f64::INFINITY)
}

/// Binomial coefficient, generalized to negative upper index through
/// `C(n, k) = (-1)^k C(k - n - 1, k)`. Zero for `k < 0`, and for `k > n`
/// when `n ≥ 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n >= 0 {
        if k > n {
            return BigInt::zero();
        }
        let k = k.min(n - k);
        let mut acc = BigInt::one();
        for i in 0..k {
            acc *= n - i;
            acc /= i + 1;
        }
        return acc;
    }
    let magnitude = binomial(k - n - 1, k);
    if k % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Generalized binomial `C(a, k)` for integer `a` of either sign, in floating point.
pub(crate) fn binomial_f64(a: i64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (a - i) as f64;
        acc /= (i + 1) as f64;
    }
    acc
}

/// A real number `coeff · √radicand` with rational `coeff` and squarefree
/// positive integer `radicand`. Zero is stored as `0 · √1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactRadical {
    coeff: BigRational,
    radicand: BigInt,
}

impl ExactRadical {
    /// `coeff · √radicand`, normalized. Fails on a negative radicand.
    pub fn new(coeff: BigRational, radicand: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return domain(format!("negative radicand {radicand}"));
        }
        if coeff.is_zero() || radicand.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/q) = √(p·q) / q
        let (p, q) = (radicand.numer().clone(), radicand.denom().clone());
        let (outside, inside) = split_square(&(p * &q));
        let coeff = coeff * BigRational::new(outside, q);
        Ok(ExactRadical {
            coeff,
            radicand: inside,
        })
    }

    /// `√r` for a nonnegative rational `r`.
    pub fn sqrt_of(radicand: BigRational) -> Result<Self> {
        Self::new(BigRational::one(), radicand)
    }

    pub fn from_rational(value: BigRational) -> Self {
        if value.is_zero() {
            return Self::zero();
        }
        ExactRadical {
            coeff: value,
            radicand: BigInt::one(),
        }
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        ExactRadical {
            coeff: BigRational::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    /// The square, `coeff² · radicand`, always nonnegative.
    pub fn square(&self) -> BigRational {
        &self.coeff * &self.coeff * BigRational::from_integer(self.radicand.clone())
    }

    /// `sign(x) · x²`, an exact encoding of `x` as a single rational.
    pub fn signed_square(&self) -> BigRational {
        let sq = self.square();
        if self.coeff.is_negative() {
            -sq
        } else {
            sq
        }
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        if self.radicand.is_one() {
            return c;
        }
        c * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Sum of two radicals when it is again a single radical (same radicand or
    /// one side zero).
    pub fn checked_add(&self, other: &ExactRadical) -> Option<ExactRadical> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.radicand != other.radicand {
            return None;
        }
        let coeff = &self.coeff + &other.coeff;
        if coeff.is_zero() {
            return Some(Self::zero());
        }
        Some(ExactRadical {
            coeff,
            radicand: self.radicand.clone(),
        })
    }

    pub fn scale(&self, factor: &BigRational) -> ExactRadical {
        if factor.is_zero() {
            return Self::zero();
        }
        ExactRadical {
            coeff: &self.coeff * factor,
            radicand: self.radicand.clone(),
        }
    }
}

/// Exact product; the radicand stays squarefree because
/// `a·b = gcd² · (a/gcd)(b/gcd)` for squarefree `a`, `b`.
pub fn radical_mul(a: &ExactRadical, b: &ExactRadical) -> ExactRadical {
    if a.is_zero() || b.is_zero() {
        return ExactRadical::zero();
    }
    let g = a.radicand.gcd(&b.radicand);
    let radicand = (&a.radicand / &g) * (&b.radicand / &g);
    let coeff = &a.coeff * &b.coeff * BigRational::from_integer(g);
    ExactRadical { coeff, radicand }
}

impl Mul for &ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: &ExactRadical) -> ExactRadical {
        radical_mul(self, rhs)
    }
}

impl Mul for ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: ExactRadical) -> ExactRadical {
        radical_mul(&self, &rhs)
    }
}

impl Neg for ExactRadical {
    type Output = ExactRadical;
    fn neg(self) -> ExactRadical {
        ExactRadical {
            coeff: -self.coeff,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for ExactRadical {
    /// `-(1/3)·√3`, `2·√5`, `√2`, `-1/4`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.coeff.is_negative() {
            write!(f, "-")?;
        }
        let c = self.coeff.abs();
        if self.radicand.is_one() {
            return if c.is_integer() {
                write!(f, "{}", c.numer())
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())
            };
        }
        if !c.is_one() {
            if c.is_integer() {
                write!(f, "{}·", c.numer())?;
            } else {
                write!(f, "({}/{})·", c.numer(), c.denom())?;
            }
        }
        write!(f, "√{}", self.radicand)
    }
}

/// Splits `n > 0` as `outside² · inside` with `inside` squarefree.
///
/// Trial division covers primes below 2²⁰; a leftover cofactor is folded
/// outside only when it is a perfect square. Everything reached from
/// factorial ratios is fully reduced.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    const TRIAL_LIMIT: u64 = 1 << 20;
    let mut rest = n.clone();
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT && BigInt::from(p * p) <= rest {
        let bp = BigInt::from(p);
        let mut exponent = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            exponent += 1;
        }
        if exponent > 0 {
            outside *= bp.pow(exponent / 2);
            if exponent % 2 == 1 {
                inside *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let root = rest.sqrt();
        if &root * &root == rest {
            outside *= root;
        } else {
            inside *= rest;
        }
    }
    (outside, inside)
}
