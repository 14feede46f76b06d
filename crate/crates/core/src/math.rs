// Thin wrappers over libm so the core builds without std.

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

/// `x^e`, exact for the common `e == 1` case.
#[inline]
pub fn pow_exp(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else {
        powf(x, e)
    }
}
