//! Exact truncated power series over rational-like coefficient rings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("truncation order {0} exceeds cap {MAX_ORDER}")]
    OrderCap(usize),
    #[error("fractional power of a series whose constant term is not 1")]
    NonUnitConstant,
}

/// Commutative ring with a rational scalar action.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, r: &BigRational) -> Self;
    fn is_zero_elem(&self) -> bool {
        *self == Self::zero_elem()
    }
    fn is_one_elem(&self) -> bool {
        *self == Self::one_elem()
    }
}

impl Ring for BigRational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Polynomial in one symbol with rational coefficients (index = power).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        Self(vec![c]).trimmed()
    }

    /// The symbol itself, times `c`.
    pub fn monomial(c: BigRational, power: usize) -> Self {
        let mut v = vec![BigRational::zero(); power + 1];
        v[power] = c;
        Self(v).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Multiplicity of the root at the origin.
    pub fn zero_multiplicity(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides out the factor `symbol^k` (must be exact).
    pub fn shift_down(&self, k: usize) -> Self {
        Self(self.0.iter().skip(k).cloned().collect()).trimmed()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Ring for Poly {
    fn zero_elem() -> Self {
        Self(Vec::new())
    }
    fn one_elem() -> Self {
        Self(vec![BigRational::one()])
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect()).trimmed()
    }
    fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect()).trimmed()
    }
    fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Self::zero_elem();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self(v).trimmed()
    }
    fn scale(&self, r: &BigRational) -> Self {
        Self(self.0.iter().map(|c| c * r).collect()).trimmed()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})*b"),
                _ => format!("({c})*b^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Power series Σ c_j y^j known through `y^order`.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<C: Ring> {
    coeffs: Vec<C>,
}

pub type RationalSeries = Series<BigRational>;

impl<C: Ring> Series<C> {
    /// Builds a series of the given truncation order, padding with zeros.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Result<Self, SeriesError> {
        if order > MAX_ORDER {
            return Err(SeriesError::OrderCap(order));
        }
        coeffs.resize(order + 1, C::zero_elem());
        Ok(Self { coeffs })
    }

    pub fn constant(c: C, order: usize) -> Result<Self, SeriesError> {
        Self::new(vec![c], order)
    }

    /// The series `y`.
    pub fn variable(order: usize) -> Result<Self, SeriesError> {
        Self::new(vec![C::zero_elem(), C::one_elem()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> C {
        self.coeffs.get(j).cloned().unwrap_or_else(C::zero_elem)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let k = self.order().min(o.order());
        Self { coeffs: (0..=k).map(|j| f(&self.coeffs[j], &o.coeffs[j])).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, C::add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, C::sub)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect() }
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let coeffs = (0..=k)
            .map(|j| (0..=j).fold(C::zero_elem(), |acc, i| acc.add(&self.coeffs[i].mul(&o.coeffs[j - i]))))
            .collect();
        Self { coeffs }
    }

    /// Multiplies by `y^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let coeffs = (0..n).map(|j| if j < k { C::zero_elem() } else { self.coeffs[j - k].clone() }).collect();
        Self { coeffs }
    }

    /// `k`-th derivative; each differentiation lowers the known order by one.
    pub fn diff(&self, k: usize) -> Self {
        if k > self.order() {
            return Self { coeffs: vec![C::zero_elem()] };
        }
        let coeffs = (0..=self.order() - k)
            .map(|j| {
                let falling: i64 = (0..k).map(|i| (j + k - i) as i64).product();
                self.coeffs[j + k].scale(&rat(falling, 1))
            })
            .collect();
        Self { coeffs }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = Self { coeffs: vec![C::zero_elem(); self.coeffs.len()] };
        out.coeffs[0] = C::one_elem();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `(1 + x)^α = Σ binom(α, k) x^k` with `x` the non-constant part; the
    /// constant term must be exactly 1.
    pub fn pow(&self, alpha: &BigRational) -> Result<Self, SeriesError> {
        if alpha.is_integer() && !alpha.is_negative() {
            let e: u32 = num_traits::ToPrimitive::to_u32(&alpha.to_integer()).ok_or(SeriesError::NonUnitConstant)?;
            return Ok(self.powi(e));
        }
        if !self.coeffs[0].is_one_elem() {
            return Err(SeriesError::NonUnitConstant);
        }
        let mut x = self.clone();
        x.coeffs[0] = C::zero_elem();
        let order = self.order();
        let mut out = Self { coeffs: vec![C::zero_elem(); order + 1] };
        out.coeffs[0] = C::one_elem();
        let mut term = out.clone();
        let mut binom = BigRational::one();
        for k in 1..=order {
            binom = binom * (alpha - BigRational::from_integer(BigInt::from(k - 1))) / BigRational::from_integer(BigInt::from(k));
            term = term.mul(&x);
            out = out.add(&term.scale(&binom));
        }
        Ok(out)
    }
}

/// Convenience constructors mirroring the operation names.
pub fn series_mul<C: Ring>(a: &Series<C>, b: &Series<C>) -> Series<C> {
    a.mul(b)
}

pub fn series_pow<C: Ring>(a: &Series<C>, alpha: &BigRational) -> Result<Series<C>, SeriesError> {
    a.pow(alpha)
}

pub fn series_diff<C: Ring>(a: &Series<C>, k: usize) -> Series<C> {
    a.diff(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(v: &[(i64, i64)], order: usize) -> RationalSeries {
        Series::new(v.iter().map(|&(p, q)| rat(p, q)).collect(), order).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = rs(&[(1, 1), (1, 1)], 4);
        let b = rs(&[(1, 1), (-1, 1)], 4);
        assert_eq!(a.mul(&b), rs(&[(1, 1), (0, 1), (-1, 1)], 4));
    }

    #[test]
    fn triple_derivative_of_quadratic() {
        let a = rs(&[(1, 1), (0, 1), (1, 2)], 2);
        assert!(a.diff(3).coeffs().iter().all(|c| c.is_zero_elem()));
    }

    #[test]
    fn half_power_squares_back() {
        let a = rs(&[(1, 1), (0, 1), (1, 3), (2, 7), (-1, 5)], 8);
        let s = a.pow(&rat(1, 2)).unwrap();
        assert_eq!(s.mul(&s), a);
    }

    #[test]
    fn fractional_power_needs_unit_constant() {
        let a = rs(&[(2, 1), (1, 1)], 3);
        assert_eq!(a.pow(&rat(1, 3)), Err(SeriesError::NonUnitConstant));
        assert!(a.pow(&rat(3, 1)).is_ok());
    }

    #[test]
    fn order_cap() {
        assert_eq!(RationalSeries::new(vec![], 17), Err(SeriesError::OrderCap(17)));
    }

    #[test]
    fn mixed_truncation() {
        let a = rs(&[(1, 1), (1, 1)], 6);
        let b = rs(&[(1, 1), (1, 1)], 3);
        assert_eq!(a.mul(&b).order(), 3);
    }

    #[test]
    fn poly_coefficients() {
        let b = Poly::monomial(rat(1, 1), 1);
        let f = Series::new(vec![Poly::one_elem(), Poly::zero_elem(), b.scale(&rat(1, 2))], 6).unwrap();
        let g = f.pow(&rat(1, 2)).unwrap();
        assert_eq!(g.coeff(2), Poly::monomial(rat(1, 4), 1));
        assert_eq!(g.coeff(4), Poly::monomial(rat(-1, 32), 2));
    }
}
