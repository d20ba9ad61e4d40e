//! Exact complex scalars with rational coordinates.
//!
//! All algebraic identities in this crate are checked exactly, so scalars are
//! complex numbers whose real and imaginary parts are arbitrary-precision
//! rationals. Floating-point inputs convert losslessly: every finite `f64` is
//! a dyadic rational.

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex scalar.
pub type Scalar = Complex<BigRational>;

/// Zero scalar.
pub fn sc_zero() -> Scalar {
    Scalar::new(BigRational::zero(), BigRational::zero())
}

/// One scalar.
pub fn sc_one() -> Scalar {
    Scalar::new(BigRational::one(), BigRational::zero())
}

/// Scalar from an integer.
pub fn sc_int(n: i64) -> Scalar {
    Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

/// Scalar from a rational numerator/denominator pair.
pub fn sc_ratio(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    Scalar::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

/// Scalar with rational real and imaginary parts.
pub fn sc_complex(re: BigRational, im: BigRational) -> Scalar {
    Scalar::new(re, im)
}

/// Exact conversion of a finite `f64` into a rational.
///
/// Panics on NaN or infinity; callers validate inputs first.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Exact conversion of a finite `f64` into a scalar.
pub fn sc_from_f64(x: f64) -> Scalar {
    Scalar::new(rat_from_f64(x), BigRational::zero())
}

/// Complex conjugate.
pub fn sc_conj(z: &Scalar) -> Scalar {
    Scalar::new(z.re.clone(), -z.im.clone())
}

/// Squared modulus as an exact rational.
pub fn sc_norm_sq(z: &Scalar) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

/// Approximate modulus, for reporting only.
pub fn sc_abs_f64(z: &Scalar) -> f64 {
    let re = z.re.to_f64().unwrap_or(f64::MAX);
    let im = z.im.to_f64().unwrap_or(f64::MAX);
    re.hypot(im)
}

/// Approximate rational value, for reporting only.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::MAX)
}

/// Renders a rational as `n` or `n/d`.
pub fn format_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a scalar in the expression-grammar form `a`, `bi`, or `a+bi`.
///
/// The output always reparses to the same value. Pure-real scalars omit the
/// imaginary part, pure-imaginary ones omit the real part.
pub fn format_scalar(z: &Scalar) -> String {
    if z.im.is_zero() {
        return format_rat(&z.re);
    }
    let im_abs = format_rat(&z.im.abs());
    let sign = if z.im.is_negative() { "-" } else { "+" };
    if z.re.is_zero() {
        if z.im.is_negative() {
            format!("-{im_abs}i")
        } else {
            format!("{im_abs}i")
        }
    } else {
        format!("{}{}{}i", format_rat(&z.re), sign, im_abs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_conversion_is_exact() {
        let r = rat_from_f64(0.5);
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(2)));
        let r = rat_from_f64(0.1);
        // 0.1 is not exactly 1/10 in binary; the conversion must preserve the bits.
        assert_eq!(r.to_f64().unwrap(), 0.1);
    }

    #[test]
    fn conjugation_is_involutive() {
        let z = sc_complex(
            BigRational::new(BigInt::from(3), BigInt::from(7)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        assert_eq!(sc_conj(&sc_conj(&z)), z);
    }

    #[test]
    fn norm_sq_matches_conj_product() {
        let z = sc_complex(
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            BigRational::new(BigInt::from(4), BigInt::from(9)),
        );
        let p = sc_conj(&z) * z.clone();
        assert_eq!(p.re, sc_norm_sq(&z));
        assert!(p.im.is_zero());
    }

    #[test]
    fn scalar_formatting() {
        assert_eq!(format_scalar(&sc_int(3)), "3");
        assert_eq!(format_scalar(&sc_ratio(-1, 2)), "-1/2");
        let i = sc_complex(BigRational::zero(), BigRational::one());
        assert_eq!(format_scalar(&i), "1i");
        let z = sc_complex(
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(-3), BigInt::from(4)),
        );
        assert_eq!(format_scalar(&z), "1/2-3/4i");
    }
}
