//! Angle helpers shared across the crate.

use std::f64::consts::PI;

/// Wraps an angle to (-pi, pi].
pub fn wrap(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Smallest signed difference `a - b`, wrapped to (-pi, pi].
pub fn diff(a: f64, b: f64) -> f64 {
    wrap(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_identity_inside_range() {
        assert_eq!(wrap(0.0), 0.0);
        assert_eq!(wrap(1.5), 1.5);
        assert_eq!(wrap(-3.0), -3.0);
        assert_eq!(wrap(PI), PI);
    }

    #[test]
    fn wrap_maps_negative_pi_to_positive() {
        assert_eq!(wrap(-PI), PI);
    }

    #[test]
    fn wrap_handles_multiple_turns() {
        assert!((wrap(5.0 * PI + 0.1) - (PI + 0.1 - 2.0 * PI)).abs() < 1e-12);
        assert!((wrap(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn diff_wraps_across_the_seam() {
        // -3.0 and 3.0 rad are only ~0.28 rad apart going the short way.
        let d = diff(-3.0, 3.0);
        assert!((d - (2.0 * PI - 6.0)).abs() < 1e-12, "got {d}");
    }
}
