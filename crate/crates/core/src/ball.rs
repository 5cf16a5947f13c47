//! Volumes of unit balls and spheres.

use std::f64::consts::PI;

/// Volume of the `j`-dimensional unit ball, `pi^{j/2} / Gamma(j/2 + 1)`.
///
/// Uses the two-step recurrence `vol(j) = vol(j - 2) * 2 pi / j`, which is the
/// closed form evaluated without a Gamma function.
pub fn unit_ball_volume(j: usize) -> f64 {
    match j {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(j - 2) * 2.0 * PI / j as f64,
    }
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}
