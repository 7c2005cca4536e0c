//! Real scalar abstraction shared by the binary64 and extended precision paths.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex;
use num_traits::{Num, NumAssign, One, Zero};

pub type C64 = Complex<f64>;

pub trait Real:
    Clone + fmt::Debug + PartialOrd + Send + Sync + 'static + NumAssign + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    /// Unit roundoff of the current working precision.
    fn epsilon() -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

pub const DEFAULT_EXT_BITS: usize = 256;

thread_local! {
    // Working precision of `Ext` on this thread, in bits.
    static EXT_BITS: Cell<usize> = const { Cell::new(DEFAULT_EXT_BITS) };
}

pub fn ext_precision_bits() -> usize {
    EXT_BITS.with(|b| b.get())
}

/// Sets the precision used by subsequently created `Ext` values on this thread.
pub fn set_ext_precision_bits(bits: usize) {
    EXT_BITS.with(|b| b.set(bits.max(64)));
}

pub fn digits_to_bits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

/// Runs `f` with a temporarily changed `Ext` precision.
pub fn with_ext_bits<R>(bits: usize, f: impl FnOnce() -> R) -> R {
    let old = ext_precision_bits();
    set_ext_precision_bits(bits);
    let out = f();
    set_ext_precision_bits(old);
    out
}

type Big = FBig<HalfEven, 2>;

/// Arbitrary precision binary float.
#[derive(Clone, PartialEq, Eq)]
pub struct Ext(Big);

impl Ext {
    fn wrap(x: Big) -> Self {
        Ext(x)
    }

    pub fn from_big(x: Big) -> Self {
        Ext(x.with_precision(ext_precision_bits()).value())
    }

    pub fn inner(&self) -> &Big {
        &self.0
    }

    pub fn to_f64_value(&self) -> f64 {
        self.0.to_f64().value()
    }
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext({:e})", self.to_f64_value())
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dec = self
            .0
            .clone()
            .with_base_and_precision::<10>(ext_precision_bits() * 3 / 10)
            .value();
        write!(f, "{}", dec)
    }
}

/// Serialized as a decimal string carrying the full working precision.
impl serde::Serialize for Ext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.0.cmp(&other.0))
    }
}

macro_rules! ext_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr for Ext {
            type Output = Ext;
            fn $m(self, rhs: Ext) -> Ext {
                Ext::wrap(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Ext> for Ext {
            type Output = Ext;
            fn $m(self, rhs: &'a Ext) -> Ext {
                Ext::wrap(self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<&'a Ext> for &'a Ext {
            type Output = Ext;
            fn $m(self, rhs: &'a Ext) -> Ext {
                Ext::wrap(&self.0 $op &rhs.0)
            }
        }
        impl $atr for Ext {
            fn $am(&mut self, rhs: Ext) {
                let lhs = std::mem::replace(&mut self.0, Big::ZERO);
                self.0 = lhs $op rhs.0;
            }
        }
    };
}

ext_binop!(Add, add, AddAssign, add_assign, +);
ext_binop!(Sub, sub, SubAssign, sub_assign, -);
ext_binop!(Mul, mul, MulAssign, mul_assign, *);
ext_binop!(Div, div, DivAssign, div_assign, /);

impl Rem for Ext {
    type Output = Ext;
    fn rem(self, rhs: Ext) -> Ext {
        let q = (&self.0 / &rhs.0).trunc();
        Ext::wrap(self.0 - q * rhs.0)
    }
}

impl RemAssign for Ext {
    fn rem_assign(&mut self, rhs: Ext) {
        *self = self.clone() % rhs;
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext::wrap(-self.0)
    }
}

impl Zero for Ext {
    fn zero() -> Self {
        Ext::from_big(Big::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == Big::ZERO
    }
}

impl One for Ext {
    fn one() -> Self {
        Ext::from_big(Big::ONE)
    }
}

impl Num for Ext {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let dec: FBig<HalfEven, 10> = s.parse().map_err(|e| format!("{e:?}"))?;
        Ok(Ext::from_big(
            dec.with_base_and_precision::<2>(ext_precision_bits())
                .value(),
        ))
    }
}

impl Real for Ext {
    fn from_f64(x: f64) -> Self {
        Ext::from_big(Big::try_from(x).expect("finite f64"))
    }
    fn to_f64(&self) -> f64 {
        self.to_f64_value()
    }
    fn sqrt(&self) -> Self {
        if self.0 <= Big::ZERO {
            return Ext::zero();
        }
        Ext::wrap(self.0.sqrt())
    }
    fn epsilon() -> Self {
        let bits = ext_precision_bits() as isize;
        Ext::from_big(Big::from_parts(1.into(), -bits))
    }
    fn from_i64(n: i64) -> Self {
        Ext::from_big(Big::from(n))
    }
}

/// Converts a complex value between scalar types via binary64 when the source is f64.
pub fn cplx<T: Real>(z: C64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn cplx_to_f64<T: Real>(z: &Complex<T>) -> C64 {
    C64::new(z.re.to_f64(), z.im.to_f64())
}

pub fn norm_sqr<T: Real>(z: &Complex<T>) -> T {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    norm_sqr(z).sqrt()
}

pub fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Rational constant p/q in the working type.
pub fn ratio<T: Real>(p: i64, q: i64) -> T {
    T::from_i64(p) / T::from_i64(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_sqrt_two_has_many_digits() {
        let two = Ext::from_i64(2);
        let r = two.sqrt();
        let back = r.clone() * r - Ext::from_i64(2);
        assert!(back.abs() < Ext::from_f64(1e-70));
    }

    #[test]
    fn ext_roundtrips_f64() {
        for x in [0.0, 1.5, -3.25e-7, 1e300] {
            assert_eq!(Ext::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn precision_switch() {
        let d = with_ext_bits(digits_to_bits(40), || {
            let third = Ext::one() / Ext::from_i64(3);
            let e = third * Ext::from_i64(3) - Ext::one();
            e.abs().to_f64()
        });
        assert!(d < 1e-40);
        assert_eq!(ext_precision_bits(), DEFAULT_EXT_BITS);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = 1.1f64;
        assert!((Real::powi(&x, 7) - x.powi(7)).abs() < 1e-14);
    }

    #[test]
    fn parse_decimal() {
        let x: Ext = Num::from_str_radix("0.1", 10).unwrap();
        assert!((x.to_f64() - 0.1).abs() < 1e-17);
    }
}
