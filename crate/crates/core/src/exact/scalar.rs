use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use super::GaussianRational;

/// Commutative ring containing the imaginary unit.
///
/// Line-geometry formulas are written once against this trait and run over
/// exact Gaussian rationals, complex floats, and symbolic polynomials.
pub trait Ring:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Multiplication by `i`.
    fn mul_i(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    /// Multiplication by 1/2.
    fn half(&self) -> Self;
    /// The multiplicative unit of the ring `self` lives in.
    fn one_like(&self) -> Self;
}

impl Ring for GaussianRational {
    fn mul_i(&self) -> Self {
        GaussianRational::mul_i(self)
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn half(&self) -> Self {
        self * &GaussianRational::ratio(1, 2)
    }

    fn one_like(&self) -> Self {
        GaussianRational::from_int(1)
    }
}

impl Ring for Complex64 {
    fn mul_i(&self) -> Self {
        Complex64::new(-self.im, self.re)
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn half(&self) -> Self {
        self * 0.5
    }

    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
}
