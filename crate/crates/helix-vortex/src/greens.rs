//! Periodic Green's function of -Laplace on R^2 x T (period 2 pi).
//!
//! Two independent representations are implemented and cross-checked:
//!
//! * a Fourier-Bessel series
//!   G(x) = (1/4 pi^2) log(1/|x'|)
//!        + (1/2 pi^2) sum_{n>=1} K0(n |x'|) cos(n x3),
//!   with K0(z) = int_0^infty cos(t) / sqrt(z^2 + t^2) dt, and
//!
//! * a mirror-image decomposition
//!   G(x) = 1/(4 pi |x|) + (gamma - log 4 pi)/(4 pi^2) + A(x),
//!   A(x) = (1/4 pi) sum_{m>=1} sum_{+,-}
//!          [ (|x'|^2 + (x3 -+ 2 pi m)^2)^{-1/2} - 1/(2 pi m) ],
//!
//! where x3 is reduced into [-pi, pi). The image sum is the primary
//! evaluator; truncation after M terms is repaired with the closed-form
//! midpoint integral of the tail, which keeps the computed value a finite
//! combination of exact harmonics and pushes the truncation error to
//! O(1/M^4). The series is retained for cross-validation at |x'| >= 0.3
//! where it converges geometrically.

use crate::error::{Error, Result};
use crate::geometry::{reduce_periodic, Point3};
use crate::numerics::{adaptive_gauss, integrate_panels, CompensatedSum};
use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Additive constant of the image decomposition: (gamma - log 4 pi)/(4 pi^2),
/// approximately -0.0494905.
pub fn greens_constant() -> f64 {
    (EULER_GAMMA - (4.0 * PI).ln()) / (4.0 * PI * PI)
}

/// Truncation and tolerance parameters for Green's function evaluation.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreensParams {
    /// Number of Fourier-Bessel terms kept in the series representation.
    pub bessel_terms: usize,
    /// Number of mirror images kept per side before the tail correction.
    pub image_count: usize,
    /// Early-termination tolerance for the series tail.
    pub tol: f64,
}

impl Default for GreensParams {
    fn default() -> Self {
        Self { bessel_terms: 32, image_count: 64, tol: 1e-10 }
    }
}

impl GreensParams {
    pub fn validate(&self) -> Result<()> {
        if self.bessel_terms < 1 {
            return Err(Error::Config("greens.bessel_terms must be at least 1".into()));
        }
        if self.image_count < 1 {
            return Err(Error::Config("greens.image_count must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("greens.tol must be positive".into()));
        }
        Ok(())
    }
}

/// Value of the image representation split into its three parts.
#[derive(Clone, Copy, Debug)]
pub struct GreensDecomposition {
    /// 1/(4 pi |x|) with x3 reduced.
    pub singular: f64,
    /// (gamma - log 4 pi)/(4 pi^2).
    pub constant: f64,
    /// Smooth image remainder A(x).
    pub remainder: f64,
}

impl GreensDecomposition {
    pub fn total(&self) -> f64 {
        self.singular + self.constant + self.remainder
    }
}

const K0_TAIL_START: f64 = 320.0;

/// Modified Bessel function K0 via its cosine integral representation.
///
/// The domain is split at t = 10 z: the head is integrated adaptively, the
/// oscillatory stretch is summed half-period by half-period up to t ~ 320,
/// and the remaining tail is replaced by its integration-by-parts expansion
/// (boundary terms through the fifth derivative, remainder below 1e-11).
/// Absolute accuracy is 1e-10 or better for z in [1e-3, 50].
pub fn bessel_k0(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_k0 requires z > 0, got {z}")));
    }
    let zz = z * z;
    let mut f = |t: f64| t.cos() / (zz + t * t).sqrt();
    let split = 10.0 * z;
    if split >= K0_TAIL_START {
        let head = adaptive_gauss(&mut f, 0.0, split, 5e-14);
        return Ok(head + k0_tail(z, split));
    }
    // Adaptive integration up to the split point, then on to a half-period
    // boundary past the first oscillations (the 1/t decay near the origin is
    // too sharp for fixed-order panels when z is small).
    let b = PI * (split.max(2.0 * PI) / PI).ceil();
    let head = adaptive_gauss(&mut f, 0.0, split, 5e-14) + adaptive_gauss(&mut f, split, b, 5e-14);
    let n = ((K0_TAIL_START - b) / PI).ceil().max(0.0) as usize;
    let edges: Vec<f64> = (0..=n).map(|k| b + k as f64 * PI).collect();
    let oscillatory = integrate_panels(&mut f, &edges, 12);
    Ok(head + oscillatory + k0_tail(z, edges[n]))
}

/// Integration-by-parts value of int_T^infty cos(t) (z^2 + t^2)^{-1/2} dt.
fn k0_tail(z: f64, t: f64) -> f64 {
    let u = z * z + t * t;
    let iu = 1.0 / u;
    let g0 = iu.sqrt();
    let g1 = -t * g0 * iu;
    let g2 = (3.0 * t * t * iu - 1.0) * g0 * iu;
    let g3 = (9.0 * t - 15.0 * t * t * t * iu) * g0 * iu * iu;
    let g4 = (9.0 - (90.0 - 105.0 * t * t * iu) * t * t * iu) * g0 * iu * iu;
    let g5 = (-225.0 + (1050.0 - 945.0 * t * t * iu) * t * t * iu) * t * g0 * iu * iu * iu;
    let (s, c) = t.sin_cos();
    -s * (g0 - g2 + g4) - c * (g1 - g3 + g5)
}

/// Fourier-Bessel series representation. Requires |x'| > 0.
///
/// The series is truncated at `bessel_terms`, or earlier once the geometric
/// tail bound K0(n s) / (1 - e^{-s}) falls below `tol`.
pub fn green_bessel(x: Point3, params: &GreensParams) -> Result<f64> {
    let s = x.planar().norm();
    if !(s > 0.0) {
        return Err(Error::Singular("green_bessel requires |x'| > 0".into()));
    }
    let z3 = reduce_periodic(x.x3);
    let tail_factor = 1.0 / (1.0 - (-s).exp());
    let cutoff = 0.5 * params.tol * 2.0 * PI * PI / tail_factor;
    let mut series = CompensatedSum::new();
    for n in 1..=params.bessel_terms {
        let arg = n as f64 * s;
        if arg > 80.0 {
            break;
        }
        let k0 = bessel_k0(arg)?;
        series.add(k0 * (n as f64 * z3).cos());
        if k0 < cutoff {
            break;
        }
    }
    Ok((1.0 / (4.0 * PI * PI)) * (1.0 / s).ln() + series.value() / (2.0 * PI * PI))
}

/// Image remainder A(x) at planar radius squared `s_sq` and reduced height
/// `z`, using `m` images per side plus the closed-form midpoint tail.
pub(crate) fn image_remainder(s_sq: f64, z: f64, m: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 1..=m {
        let c = 2.0 * PI * k as f64;
        let dm = z - c;
        let dp = z + c;
        acc.add(1.0 / (s_sq + dm * dm).sqrt() - 1.0 / c);
        acc.add(1.0 / (s_sq + dp * dp).sqrt() - 1.0 / c);
    }
    let a = m as f64 + 0.5;
    acc.add(image_tail(s_sq, 2.0 * PI * a - z, a));
    acc.add(image_tail(s_sq, 2.0 * PI * a + z, a));
    acc.value() / (4.0 * PI)
}

/// Closed form of int_a^infty [ (s^2 + (2 pi m -+ z)^2)^{-1/2} - 1/(2 pi m) ] dm
/// with v = 2 pi a -+ z.
fn image_tail(s_sq: f64, v: f64, a: f64) -> f64 {
    (4.0 * PI * a / (v + (v * v + s_sq).sqrt())).ln() / (2.0 * PI)
}

/// Gradient of the image remainder. Returns (radial, axial) where the planar
/// gradient is x' * radial and the axial component is axial.
pub(crate) fn image_remainder_grad(s_sq: f64, z: f64, m: usize) -> (f64, f64) {
    let mut radial = CompensatedSum::new();
    let mut axial = CompensatedSum::new();
    for k in 1..=m {
        let c = 2.0 * PI * k as f64;
        let dm = z - c;
        let dp = z + c;
        let qm = s_sq + dm * dm;
        let qp = s_sq + dp * dp;
        let im = 1.0 / (qm * qm.sqrt());
        let ip = 1.0 / (qp * qp.sqrt());
        radial.add(-(im + ip));
        axial.add(-(dm * im + dp * ip));
    }
    let a = m as f64 + 0.5;
    let v = 2.0 * PI * a - z;
    let w = 2.0 * PI * a + z;
    let rv = (v * v + s_sq).sqrt();
    let rw = (w * w + s_sq).sqrt();
    // d/ds of the tail, divided by s so the planar part stays finite on axis.
    radial.add(-1.0 / (2.0 * PI * rv * (v + rv)));
    radial.add(-1.0 / (2.0 * PI * rw * (w + rw)));
    // d/dz: the two branches enter with opposite signs.
    axial.add(1.0 / (2.0 * PI * rv));
    axial.add(-1.0 / (2.0 * PI * rw));
    (radial.value() / (4.0 * PI), axial.value() / (4.0 * PI))
}

/// Image representation split into singular, constant and remainder parts.
/// Requires |x| > 0 after reduction of x3.
pub fn green_image(x: Point3, params: &GreensParams) -> Result<GreensDecomposition> {
    let xr = x.reduced();
    let r = xr.norm();
    if !(r > 0.0) {
        return Err(Error::Singular("green_image requires |x| > 0 after reduction".into()));
    }
    Ok(GreensDecomposition {
        singular: 1.0 / (4.0 * PI * r),
        constant: greens_constant(),
        remainder: image_remainder(xr.planar().norm_sq(), xr.x3, params.image_count),
    })
}

/// Gradient of the image representation. Requires |x| > 0 after reduction.
/// The singular part is differentiated in closed form, the image sum and its
/// tail correction term by term.
pub fn grad_green(x: Point3, params: &GreensParams) -> Result<Point3> {
    let xr = x.reduced();
    let r_sq = xr.norm_sq();
    if !(r_sq > 0.0) {
        return Err(Error::Singular("grad_green requires |x| > 0 after reduction".into()));
    }
    let sing = -1.0 / (4.0 * PI * r_sq * r_sq.sqrt());
    let (radial, axial) = image_remainder_grad(xr.planar().norm_sq(), xr.x3, params.image_count);
    Ok(Point3::new(
        xr.x1 * (sing + radial),
        xr.x2 * (sing + radial),
        xr.x3 * sing + axial,
    ))
}

/// Regularized evaluation: the singular part is mollified to
/// 1/(4 pi sqrt(|x|^2 + delta^2)); constant and remainder are untouched.
/// With delta = 0 this coincides with `green_image().total()`.
pub fn green_regularized(x: Point3, delta: f64, params: &GreensParams) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    let xr = x.reduced();
    let r_sq = xr.norm_sq();
    if delta == 0.0 && !(r_sq > 0.0) {
        return Err(Error::Singular("green_regularized at x = 0 requires delta > 0".into()));
    }
    Ok(1.0 / (4.0 * PI * (r_sq + delta * delta).sqrt())
        + greens_constant()
        + image_remainder(xr.planar().norm_sq(), xr.x3, params.image_count))
}

/// Gradient of the regularized Green's function; the mollified singular part
/// is differentiated in closed form. Finite for all x when delta > 0.
pub fn grad_green_regularized(x: Point3, delta: f64, params: &GreensParams) -> Result<Point3> {
    if delta < 0.0 {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    let xr = x.reduced();
    let r_sq = xr.norm_sq();
    if delta == 0.0 && !(r_sq > 0.0) {
        return Err(Error::Singular("grad at x = 0 requires delta > 0".into()));
    }
    let q = r_sq + delta * delta;
    let sing = -1.0 / (4.0 * PI * q * q.sqrt());
    let (radial, axial) = image_remainder_grad(xr.planar().norm_sq(), xr.x3, params.image_count);
    Ok(Point3::new(
        xr.x1 * (sing + radial),
        xr.x2 * (sing + radial),
        xr.x3 * sing + axial,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn k0_matches_tabulated_values() {
        assert_abs_diff_eq!(bessel_k0(1.0).unwrap(), 0.42102443824070834, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_k0(5.0).unwrap(), 3.6911e-3, epsilon = 1e-7);
        assert_abs_diff_eq!(bessel_k0(2.0).unwrap(), 0.11389387274953344, epsilon = 1e-10);
    }

    #[test]
    fn k0_obeys_small_argument_law() {
        // K0(z) = log(2/z) - gamma + O(z^2 log z) for small z.
        let z: f64 = 0.01;
        let law = (2.0 / z).ln() - EULER_GAMMA;
        assert_abs_diff_eq!(bessel_k0(z).unwrap(), law, epsilon = 1e-3);
        let z: f64 = 1e-3;
        let law = (2.0 / z).ln() - EULER_GAMMA;
        assert_abs_diff_eq!(bessel_k0(z).unwrap(), law, epsilon = 1e-5);
    }

    #[test]
    fn k0_is_positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for z in [0.05, 0.3, 1.0, 3.0, 10.0, 30.0, 50.0] {
            let v = bessel_k0(z).unwrap();
            assert!(v > 0.0 && v < prev, "K0 not decreasing at z = {z}");
            prev = v;
        }
    }

    #[test]
    fn k0_rejects_nonpositive_argument() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
    }

    #[test]
    fn greens_constant_value() {
        assert_abs_diff_eq!(greens_constant(), -0.049491, epsilon = 1e-5);
    }

    #[test]
    fn bessel_series_truncation_is_geometric() {
        // At |x'| = 3 the terms decay like e^{-3n}: 10 vs 50 terms agree.
        let x = Point3::new(2.0, -2.236, 1.3);
        let p10 = GreensParams { bessel_terms: 10, ..Default::default() };
        let p50 = GreensParams { bessel_terms: 50, ..Default::default() };
        let g10 = green_bessel(x, &p10).unwrap();
        let g50 = green_bessel(x, &p50).unwrap();
        assert_abs_diff_eq!(g10, g50, epsilon = 1e-10);
    }

    #[test]
    fn bessel_rejects_on_axis_points() {
        let err = green_bessel(Point3::new(0.0, 0.0, 1.0), &GreensParams::default());
        assert!(matches!(err, Err(Error::Singular(_))));
    }

    #[test]
    fn representations_agree_off_axis() {
        let bessel = GreensParams { bessel_terms: 200, ..Default::default() };
        let image = GreensParams { image_count: 256, ..Default::default() };
        for (s, z) in [(0.3, 0.0), (0.5, 1.7), (1.0, -3.0), (2.2, 0.4), (3.0, 3.1)] {
            let x = Point3::new(s, 0.0, z);
            let gb = green_bessel(x, &bessel).unwrap();
            let gi = green_image(x, &image).unwrap().total();
            assert_abs_diff_eq!(gb, gi, epsilon = 1e-9);
        }
    }

    #[test]
    fn image_decomposition_recovers_constant_near_origin() {
        let x = Point3::new(1e-5, 0.0, 0.0);
        let d = green_image(x, &GreensParams::default()).unwrap();
        assert_abs_diff_eq!(d.total() - d.singular, greens_constant(), epsilon = 1e-4);
        assert_abs_diff_eq!(d.total(), d.singular + d.constant + d.remainder);
    }

    #[test]
    fn image_tail_correction_makes_truncation_negligible() {
        let x = Point3::new(1.0, 0.0, 1.0);
        let coarse = GreensParams { image_count: 64, ..Default::default() };
        let fine = GreensParams { image_count: 256, ..Default::default() };
        let a = green_image(x, &coarse).unwrap().total();
        let b = green_image(x, &fine).unwrap().total();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }

    #[test]
    fn greens_is_even_and_periodic() {
        let p = GreensParams::default();
        let x = Point3::new(0.7, -0.2, 1.1);
        let gx = green_image(x, &p).unwrap().total();
        let gnx = green_image(Point3::new(-0.7, 0.2, -1.1), &p).unwrap().total();
        assert_abs_diff_eq!(gx, gnx, epsilon = 1e-14);
        let shifted = green_image(Point3::new(0.7, -0.2, 1.1 + 2.0 * PI), &p).unwrap().total();
        assert_abs_diff_eq!(gx, shifted, epsilon = 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = GreensParams::default();
        let h = 1e-5;
        for x in [Point3::new(0.6, -0.3, 0.9), Point3::new(1.5, 0.2, -2.0), Point3::new(0.05, 0.02, 0.01)] {
            let g = grad_green(x, &p).unwrap();
            let fd = |dx: Point3| {
                let plus = green_image(Point3::new(x.x1 + dx.x1, x.x2 + dx.x2, x.x3 + dx.x3), &p)
                    .unwrap()
                    .total();
                let minus = green_image(Point3::new(x.x1 - dx.x1, x.x2 - dx.x2, x.x3 - dx.x3), &p)
                    .unwrap()
                    .total();
                (plus - minus) / (2.0 * h)
            };
            assert_abs_diff_eq!(g.x1, fd(Point3::new(h, 0.0, 0.0)), epsilon = 1e-6);
            assert_abs_diff_eq!(g.x2, fd(Point3::new(0.0, h, 0.0)), epsilon = 1e-6);
            assert_abs_diff_eq!(g.x3, fd(Point3::new(0.0, 0.0, h)), epsilon = 1e-6);
        }
    }

    #[test]
    fn gradient_axial_component_vanishes_on_symmetry_plane() {
        let g = grad_green(Point3::new(0.8, 0.3, 0.0), &GreensParams::default()).unwrap();
        assert_abs_diff_eq!(g.x3, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn computed_image_representation_is_harmonic() {
        // Every piece of the implementation (images, midpoint tail, constant)
        // is an exact harmonic function, so the 7-point Laplacian sees only
        // finite-difference truncation.
        let p = GreensParams::default();
        let x = Point3::new(0.6, 0.0, 0.8);
        let h = 1e-3;
        let g = |q: Point3| green_image(q, &p).unwrap().total();
        let mut lap = -6.0 * g(x);
        for (dx, dy, dz) in
            [(h, 0.0, 0.0), (-h, 0.0, 0.0), (0.0, h, 0.0), (0.0, -h, 0.0), (0.0, 0.0, h), (0.0, 0.0, -h)]
        {
            lap += g(Point3::new(x.x1 + dx, x.x2 + dy, x.x3 + dz));
        }
        assert_abs_diff_eq!(lap / (h * h), 0.0, epsilon = 1e-4);
    }

    #[test]
    fn regularized_value_at_origin_is_finite() {
        let p = GreensParams::default();
        let v = green_regularized(Point3::new(0.0, 0.0, 0.0), 0.1, &p).unwrap();
        assert_relative_eq!(v, 1.0 / (0.4 * PI) + greens_constant(), epsilon = 1e-12);
        assert!(green_regularized(Point3::new(0.0, 0.0, 0.0), 0.0, &p).is_err());
        assert!(green_regularized(Point3::new(1.0, 0.0, 0.0), -0.1, &p).is_err());
    }

    #[test]
    fn regularized_with_zero_delta_matches_image_total() {
        let p = GreensParams::default();
        let x = Point3::new(0.4, 0.1, -0.6);
        let a = green_regularized(x, 0.0, &p).unwrap();
        let b = green_image(x, &p).unwrap().total();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn regularization_only_softens_the_singular_part() {
        let p = GreensParams::default();
        let x = Point3::new(0.3, 0.0, 0.2);
        let delta = 0.05;
        let reg = green_regularized(x, delta, &p).unwrap();
        let dec = green_image(x, &p).unwrap();
        let r = x.norm();
        let expected =
            dec.total() - 1.0 / (4.0 * PI * r) + 1.0 / (4.0 * PI * (r * r + delta * delta).sqrt());
        assert_abs_diff_eq!(reg, expected, epsilon = 1e-15);
    }
}
