//! Floating-point shims so the crate builds without `std`.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn exp_m1(x: f64) -> f64 {
        x.exp_m1()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn cbrt(x: f64) -> f64 {
        x.cbrt()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn exp_m1(x: f64) -> f64 {
        libm::expm1(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn cbrt(x: f64) -> f64 {
        libm::cbrt(x)
    }
}

pub use imp::*;

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `base^gap` for `base` in `[0, 1)` and `gap >= 1`, given `ln(base)`.
///
/// A zero base yields zero for every positive gap.
#[inline]
pub(crate) fn pow_gap(base: f64, ln_base: f64, gap: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        exp(gap * ln_base)
    }
}

/// `1 - base^(2 gap)` without cancellation when `base` is close to one.
#[inline]
pub(crate) fn one_minus_pow2_gap(base: f64, ln_base: f64, gap: f64) -> f64 {
    if base == 0.0 {
        1.0
    } else {
        -exp_m1(2.0 * gap * ln_base)
    }
}
