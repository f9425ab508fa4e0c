//! Input-constraint decomposition `Sat(u) = s1·u + s2` and the valve
//! direction selector `s(u)`.
//!
//! Out of range, `s1 = 1/(|u|+1)` and `s2` places the applied value exactly
//! on the violated bound, so the applied value is the clamp of `u`. Inputs
//! on a bound count as interior (`s1 = 1`, `s2 = 0`).

use crate::error::{Error, Result};
use crate::types::SaturationLimits;

/// Gain/offset form of a saturated input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSplit {
    pub s1: f64,
    pub s2: f64,
    /// Applied input, always inside the limits.
    pub value: f64,
}

impl SaturationSplit {
    /// Pass-through split for an unconstrained input.
    pub fn identity(u: f64) -> Self {
        SaturationSplit {
            s1: 1.0,
            s2: 0.0,
            value: u,
        }
    }

    pub fn is_clipped(&self) -> bool {
        self.s1 != 1.0
    }
}

pub fn saturate(u: f64, limits: SaturationLimits) -> Result<SaturationSplit> {
    if !u.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let SaturationLimits { u_min, u_max } = limits;
    if (u_min..=u_max).contains(&u) {
        return Ok(SaturationSplit::identity(u));
    }
    let s1 = 1.0 / (u.abs() + 1.0);
    let bound = if u > u_max { u_max } else { u_min };
    let s2 = bound - s1 * u;
    Ok(SaturationSplit { s1, s2, value: bound })
}

/// Unit in the last place of `x`.
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return f64::from_bits(1);
    }
    if !x.is_finite() {
        return f64::NAN;
    }
    f64::from_bits(x.to_bits() + 1) - x
}

/// Rounding error of `s1·u + s2` against the applied value, in units of the
/// last place of the largest term involved.
pub fn decomposition_error_ulps(u: f64, split: &SaturationSplit) -> f64 {
    let product = split.s1 * u;
    let scale = product.abs().max(split.s2.abs()).max(split.value.abs());
    (product + split.s2 - split.value).abs() / ulp(scale)
}

/// `1` for `u >= 0`, `0` otherwise.
pub fn sign_select(u: f64) -> f64 {
    if u >= 0.0 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lim(a: f64, b: f64) -> SaturationLimits {
        SaturationLimits::new(a, b).unwrap()
    }

    #[test]
    fn interior_passes_through() {
        let s = saturate(0.5, lim(-1.0, 1.0)).unwrap();
        assert_eq!(
            s,
            SaturationSplit {
                s1: 1.0,
                s2: 0.0,
                value: 0.5
            }
        );
    }

    #[test]
    fn upper_branch() {
        let s = saturate(3.0, lim(-2.0, 2.0)).unwrap();
        assert_eq!(s.s1, 0.25);
        assert_eq!(s.s2, 1.25);
        assert_eq!(s.value, 2.0);
    }

    #[test]
    fn lower_branch() {
        let s = saturate(-5.0, lim(-2.0, 2.0)).unwrap();
        assert!((s.s1 - 1.0 / 6.0).abs() < 1e-15);
        assert!((s.s2 + 7.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.value, -2.0);
        assert!((s.s1 * -5.0 + s.s2 - s.value).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_interior() {
        let l = lim(-2.0, 2.0);
        assert_eq!(saturate(2.0, l).unwrap(), SaturationSplit::identity(2.0));
        assert_eq!(saturate(-2.0, l).unwrap(), SaturationSplit::identity(-2.0));
    }

    #[test]
    fn range_excluding_zero() {
        let s = saturate(0.0, lim(1.0, 3.0)).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.s1, 1.0 / (0.0 + 1.0));
        assert_eq!(s.s2, 1.0);
    }

    #[test]
    fn non_finite_rejected() {
        let l = lim(-1.0, 1.0);
        assert_eq!(saturate(f64::NAN, l), Err(Error::NonFiniteInput));
        assert_eq!(saturate(f64::INFINITY, l), Err(Error::NonFiniteInput));
        assert_eq!(Error::NonFiniteInput.to_string(), "non-finite control input");
    }

    #[test]
    fn continuous_at_bound() {
        let l = lim(-2.0, 2.0);
        let h = 1e-8;
        let above = saturate(2.0 + h, l).unwrap().value;
        let below = saturate(2.0 - h, l).unwrap().value;
        assert!((above - below).abs() <= 2.0 * h);
    }

    #[test]
    fn sign_selector() {
        assert_eq!(sign_select(0.0), 1.0);
        assert_eq!(sign_select(-0.3), 0.0);
        assert_eq!(sign_select(7.2), 1.0);
    }

    proptest! {
        #[test]
        fn clamp_equivalence(u in -1e9..1e9f64, a in -1e3..1e3f64, w in 1e-6..1e3f64) {
            let l = lim(a, a + w);
            let s = saturate(u, l).unwrap();
            prop_assert_eq!(s.value, u.max(l.u_min).min(l.u_max));
            prop_assert!(s.s1 > 0.0 && s.s1 <= 1.0);
            prop_assert_eq!(s.s1 == 1.0, l.contains(u));
            prop_assert!(decomposition_error_ulps(u, &s) <= 4.0);
        }

        #[test]
        fn selector_complement(u in -1e6..1e6f64) {
            prop_assume!(u != 0.0);
            prop_assert_eq!(sign_select(u) + sign_select(-u), 1.0);
        }
    }
}
