//! Polygamma-type functions on the positive reals, for closed-form series tails.
//!
//! All functions shift the argument up by recurrence to `z >= 16` and then use
//! the asymptotic expansion, which is accurate to a few ulps there.

use crate::float;

pub const ZETA2: f64 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

const SHIFT: f64 = 16.0;

/// `psi_1(z) = sum_{k >= 0} 1/(z+k)^2`.
pub fn trigamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    trigamma_minus_recip(z) + 1.0 / z
}

/// `psi_1(z) - 1/z = sum_{k >= 0} 1/((z+k)^2 (z+k+1))`, without cancellation.
pub fn trigamma_minus_recip(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut acc = 0.0;
    while z < SHIFT {
        acc += 1.0 / (z * z * (z + 1.0));
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    let series = w
        * (0.5
            + (1.0 / z)
                * (1.0 / 6.0
                    + w * (-1.0 / 30.0 + w * (1.0 / 42.0 + w * (-1.0 / 30.0 + w * (5.0 / 66.0))))));
    acc + series
}

/// Hurwitz zeta `zeta(3, z) = sum_{k >= 0} 1/(z+k)^3`.
pub fn hurwitz_zeta3(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut acc = 0.0;
    while z < SHIFT {
        acc += 1.0 / (z * z * z);
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    let series = w
        * (0.5
            + (1.0 / z) * 0.5
            + w * (0.25
                + w * (-1.0 / 12.0 + w * (1.0 / 12.0 + w * (-3.0 / 20.0 + w * (5.0 / 12.0))))));
    acc + series
}

/// Digamma `psi(z)`.
pub fn digamma(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut acc = 0.0;
    while z < SHIFT {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    let series = float::ln(z)
        - 0.5 / z
        - w * (1.0 / 12.0
            - w * (1.0 / 120.0 - w * (1.0 / 252.0 - w * (1.0 / 240.0 - w * (1.0 / 132.0)))));
    acc + series
}
