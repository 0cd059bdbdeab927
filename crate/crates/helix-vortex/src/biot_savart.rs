//! Induced velocity and auxiliary kernels of the helical Biot-Savart law.
//!
//! A unit-circulation particle at the planar point y stands for the helical
//! filament {(R_a y, a)}. The velocity it induces at (x, 0) is the pair
//! kernel
//!
//!   K(x, y) = int_{-pi}^{pi} grad G((x,0) - (R_a y, a)) x xi(R_a y, a) da,
//!
//! with G the periodic Green's function and xi(p) = (p2, -p1, 1) the helical
//! direction field; periodizing the Green's function over the axial period
//! makes this equal to the line integral of the classical Biot-Savart kernel
//! along the full helix. The planar velocity of a particle field is then
//!
//!   H w (x) = (U1, U2) + (-x2, x1) U3,   U = sum_j Gamma_j K(x, x_j).
//!
//! Blob regularization replaces the singular factor 1/(4 pi |d|) of G by
//! 1/(4 pi sqrt(|d|^2 + delta^2)) in the kernel; the smooth image remainder
//! is left untouched.
//!
//! The a-integrands peak where the two helices come closest, so every
//! quadrature below locates a* = argmin |(x,0) - (R_a y, a)| by golden-section
//! search and lays out Gauss panels geometrically refined toward a*.

use crate::error::{Error, Result};
use crate::geometry::{perp, Point2, Point3};
use crate::greens::{self, GreensParams};
use crate::numerics::{geometric_panels, CompensatedSum};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Quadrature and regularization parameters for kernel evaluation.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelParams {
    /// Green's function truncation used inside kernel quadrature.
    pub greens: GreensParams,
    /// Minimum number of panels for the angular integrals.
    pub quad_panels: usize,
    /// Gauss-Legendre order per panel (4..=32).
    pub quad_order: usize,
    /// Blob regularization width (0 disables regularization).
    pub delta: f64,
    /// Pair distance below which panel refinement bottoms out at delta
    /// rather than at the pair distance itself.
    pub near_threshold: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            // 16 images per side keep the remainder gradient below 1e-7
            // absolute, ample against kernel magnitudes, at half the cost of
            // the greens-module default.
            greens: GreensParams { bessel_terms: 32, image_count: 16, tol: 1e-10 },
            quad_panels: 4,
            quad_order: 8,
            delta: 0.0,
            near_threshold: 0.05,
        }
    }
}

impl KernelParams {
    /// Parameters for a blob of inter-particle spacing h: delta = 2h and
    /// near_threshold = 4 delta.
    pub fn for_spacing(h: f64) -> Self {
        let delta = 2.0 * h;
        Self { delta, near_threshold: 4.0 * delta, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.greens.validate()?;
        if self.quad_panels < 2 {
            return Err(Error::Config("kernel.quad_panels must be at least 2".into()));
        }
        if !(4..=32).contains(&self.quad_order) {
            return Err(Error::Config("kernel.quad_order must lie in 4..=32".into()));
        }
        if self.delta < 0.0 {
            return Err(Error::Config("kernel.delta must be nonnegative".into()));
        }
        if !(self.near_threshold > 0.0) {
            return Err(Error::Config("kernel.near_threshold must be positive".into()));
        }
        Ok(())
    }
}

/// Velocity contribution of one particle pair.
#[derive(Clone, Copy, Debug, Default)]
pub struct PairVelocity {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// Squared separation of the helices through x and y at offset angle a:
/// |x - R_a y|^2 + a^2 = |x|^2 + |y|^2 + a^2 - 2 A cos(a - phi).
struct PairGeometry {
    xx_yy: f64,
    amp: f64,
    phi: f64,
}

impl PairGeometry {
    fn new(x: Point2, y: Point2) -> Self {
        let dot = x.dot(y);
        let cross = perp(x).dot(y);
        Self { xx_yy: x.norm_sq() + y.norm_sq(), amp: dot.hypot(cross), phi: cross.atan2(dot) }
    }

    #[inline]
    fn dist_sq(&self, a: f64) -> f64 {
        self.xx_yy + a * a - 2.0 * self.amp * (a - self.phi).cos()
    }

    /// Golden-section minimizer of dist_sq over [lo, hi], seeded by a coarse
    /// scan so a competing local minimum cannot be missed.
    fn closest_offset(&self, lo: f64, hi: f64) -> f64 {
        // Scan spacing below pi/4 separates the wells of the cosine term.
        let n = 24.max(((hi - lo) / (PI / 4.0)).ceil() as usize);
        let step = (hi - lo) / n as f64;
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for k in 0..=n {
            let v = self.dist_sq(lo + k as f64 * step);
            if v < best_val {
                best_val = v;
                best = k;
            }
        }
        let mut a = lo + (best as f64 - 1.0).max(0.0) * step;
        let mut b = lo + (best as f64 + 1.0).min(n as f64) * step;
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = self.dist_sq(c);
        let mut fd = self.dist_sq(d);
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = self.dist_sq(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = self.dist_sq(d);
            }
            if b - a < 1e-12 {
                break;
            }
        }
        0.5 * (a + b)
    }
}

/// Panel layout for an angular integral over [lo, hi] peaked at a*.
fn kernel_panels(
    geo: &PairGeometry,
    lo: f64,
    hi: f64,
    params: &KernelParams,
    breaks: &[f64],
) -> (Vec<f64>, f64) {
    let a_star = geo.closest_offset(lo, hi);
    let d_min_sq = geo.dist_sq(a_star).max(0.0);
    let peak = (d_min_sq + params.delta * params.delta).sqrt();
    let w0 = peak.max(1e-12).min(0.25 * (hi - lo));
    (geometric_panels(lo, hi, a_star, w0, params.quad_panels, breaks), d_min_sq.sqrt())
}

/// Gradient of the delta-regularized Green's function at separation d
/// (axial component already in [-pi, pi]).
#[inline]
fn grad_green_delta(d1: f64, d2: f64, d3: f64, delta_sq: f64, images: usize) -> (f64, f64, f64) {
    let s_sq = d1 * d1 + d2 * d2;
    let q = s_sq + d3 * d3 + delta_sq;
    let sing = -1.0 / (4.0 * PI * q * q.sqrt());
    let (radial, axial) = greens::image_remainder_grad(s_sq, d3, images);
    (d1 * (sing + radial), d2 * (sing + radial), d3 * sing + axial)
}

/// Integrand of the pair kernel at offset angle a.
#[inline]
fn pair_integrand(a: f64, x: Point2, y: Point2, delta_sq: f64, images: usize) -> [f64; 3] {
    let (sin_a, cos_a) = a.sin_cos();
    let ry1 = cos_a * y.x1 + sin_a * y.x2;
    let ry2 = -sin_a * y.x1 + cos_a * y.x2;
    let (g1, g2, g3) = grad_green_delta(x.x1 - ry1, x.x2 - ry2, -a, delta_sq, images);
    // grad G x xi with xi = (ry2, -ry1, 1).
    [g2 + g3 * ry1, g3 * ry2 - g1, -g1 * ry1 - g2 * ry2]
}

fn integrate_pair(x: Point2, y: Point2, params: &KernelParams, edges: &[f64]) -> PairVelocity {
    let delta_sq = params.delta * params.delta;
    let images = params.greens.image_count;
    let (nodes, weights) = crate::numerics::gauss_legendre(params.quad_order);
    let mut acc = [CompensatedSum::new(); 3];
    for panel in edges.windows(2) {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[0] + panel[1]);
        for (t, w) in nodes.iter().zip(weights) {
            let v = pair_integrand(mid + half * t, x, y, delta_sq, images);
            let hw = half * w;
            acc[0].add(hw * v[0]);
            acc[1].add(hw * v[1]);
            acc[2].add(hw * v[2]);
        }
    }
    PairVelocity { u1: acc[0].value(), u2: acc[1].value(), u3: acc[2].value() }
}

/// Velocity induced at (x, 0) by a unit-circulation particle at y.
///
/// With delta = 0 the points must be distinct; regularization makes the
/// coincident case finite.
pub fn pair_kernel(x: Point2, y: Point2, params: &KernelParams) -> Result<PairVelocity> {
    params.validate()?;
    if params.delta == 0.0 && (x - y).norm_sq() == 0.0 {
        return Err(Error::Singular("pair_kernel at x = y requires delta > 0".into()));
    }
    let geo = PairGeometry::new(x, y);
    let (edges, _) = kernel_panels(&geo, -PI, PI, params, &[]);
    Ok(integrate_pair(x, y, params, &edges))
}

/// Planar transport velocity H w at a point, from all particles of a field.
///
/// Assembles (U1, U2) + perp(x) U3 with a fixed summation order and
/// compensated accumulation. A particle coinciding with x contributes only
/// its swirl channel U3 (its planar self-term is dropped by convention);
/// with delta = 0 coincident particles are skipped entirely.
pub fn velocity_h(
    positions: &[Point2],
    circulations: &[f64],
    x: Point2,
    params: &KernelParams,
) -> Result<Point2> {
    let mut u = [CompensatedSum::new(); 3];
    for (&y, &gamma) in positions.iter().zip(circulations) {
        let coincident = (x - y).norm_sq() == 0.0;
        if coincident && params.delta == 0.0 {
            continue;
        }
        let k = pair_kernel(x, y, params)?;
        if !coincident {
            u[0].add(gamma * k.u1);
            u[1].add(gamma * k.u2);
        }
        u[2].add(gamma * k.u3);
    }
    let swirl = perp(x) * u[2].value();
    Ok(Point2::new(u[0].value() + swirl.x1, u[1].value() + swirl.x2))
}

/// Velocities at all particle positions, evaluated in parallel over targets.
///
/// Each target is reduced sequentially in particle order, so the result is
/// bitwise independent of the worker count.
pub fn velocities(
    positions: &[Point2],
    circulations: &[f64],
    params: &KernelParams,
) -> Result<Vec<Point2>> {
    params.validate()?;
    positions
        .par_iter()
        .map(|&x| velocity_h(positions, circulations, x, params))
        .collect()
}

/// Transport pair kernel g(x, y) = (x', 0) . [grad G(x - y) x xi(y)] on
/// R^2 x T; antisymmetric under exchange of its arguments, which is the
/// mechanism behind conservation of the second moment.
pub fn g_transport(x: Point3, y: Point3, params: &KernelParams) -> Result<f64> {
    params.validate()?;
    let v = (x - y).reduced();
    if params.delta == 0.0 && !(v.norm_sq() > 0.0) {
        return Err(Error::Singular("g_transport at x = y requires delta > 0".into()));
    }
    let (g1, g2, g3) = grad_green_delta(
        v.x1,
        v.x2,
        v.x3,
        params.delta * params.delta,
        params.greens.image_count,
    );
    Ok(x.x1 * g2 - x.x2 * g1 + (x.x1 * y.x1 + x.x2 * y.x2) * g3)
}

/// Scalar angular integral with panels refined toward the closest approach.
fn angular_integral<F: FnMut(f64, f64) -> f64>(
    x: Point2,
    y: Point2,
    lo: f64,
    hi: f64,
    params: &KernelParams,
    breaks: &[f64],
    mut f: F,
) -> Result<f64> {
    params.validate()?;
    if (x - y).norm_sq() == 0.0 {
        return Err(Error::Singular("kernel requires distinct points".into()));
    }
    let geo = PairGeometry::new(x, y);
    let (edges, _) = kernel_panels(&geo, lo, hi, params, breaks);
    let (nodes, weights) = crate::numerics::gauss_legendre(params.quad_order);
    let mut acc = CompensatedSum::new();
    for panel in edges.windows(2) {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[0] + panel[1]);
        for (t, w) in nodes.iter().zip(weights) {
            let a = mid + half * t;
            acc.add(half * w * f(a, geo.dist_sq(a)));
        }
    }
    Ok(acc.value())
}

/// Symmetrized near-field kernel
/// K1(x, y) = (1/4 pi) int_{-2 pi}^{2 pi} (2 pi - |b|) (|x - R_b y|^2 + b^2)^{-1/2} db.
///
/// Grows like (1 + |x|^2)^{-1/2} log(1/|x - y|) on the diagonal and stays
/// bounded for separated pairs.
pub fn kernel_k1(x: Point2, y: Point2, params: &KernelParams) -> Result<f64> {
    angular_integral(x, y, -2.0 * PI, 2.0 * PI, params, &[0.0], |b, q| {
        (2.0 * PI - b.abs()) / q.sqrt()
    })
    .map(|v| v / (4.0 * PI))
}

/// K0*(x, y) = int_{-pi}^{pi} (|x - R_a y|^2 + a^2)^{-3/2} da, the
/// unweighted cubic-decay kernel; symmetric, bounded by
/// C (1 + (1 + min(|x|,|y|)) / |x - y|^2).
pub fn kernel_k0star(x: Point2, y: Point2, params: &KernelParams) -> Result<f64> {
    angular_integral(x, y, -PI, PI, params, &[], |_, q| 1.0 / (q * q.sqrt()))
}

/// K2(x, y) = int_{-pi}^{pi} a^2 (|x - R_a y|^2 + a^2)^{-3/2} da; grows like
/// (2 / (1 + |x|^2)^{3/2}) log(1/|x - y|) on the diagonal.
pub fn kernel_k2(x: Point2, y: Point2, params: &KernelParams) -> Result<f64> {
    angular_integral(x, y, -PI, PI, params, &[], |a, q| a * a / (q * q.sqrt()))
}

/// Energy pair kernel: the regularized Green's function paired with the
/// helical directions of both filaments,
/// int_{-pi}^{pi} G_delta((x,0) - (R_a y, a)) (1 + x . R_a y) da.
pub fn energy_pair_kernel(x: Point2, y: Point2, params: &KernelParams) -> Result<f64> {
    params.validate()?;
    if params.delta == 0.0 && (x - y).norm_sq() == 0.0 {
        return Err(Error::Singular("energy_pair_kernel at x = y requires delta > 0".into()));
    }
    let geo = PairGeometry::new(x, y);
    let (edges, _) = kernel_panels(&geo, -PI, PI, params, &[]);
    let (nodes, weights) = crate::numerics::gauss_legendre(params.quad_order);
    let delta_sq = params.delta * params.delta;
    let images = params.greens.image_count;
    let constant = greens::greens_constant();
    let mut acc = CompensatedSum::new();
    for panel in edges.windows(2) {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[0] + panel[1]);
        for (t, w) in nodes.iter().zip(weights) {
            let a = mid + half * t;
            let (sin_a, cos_a) = a.sin_cos();
            let ry1 = cos_a * y.x1 + sin_a * y.x2;
            let ry2 = -sin_a * y.x1 + cos_a * y.x2;
            let d1 = x.x1 - ry1;
            let d2 = x.x2 - ry2;
            let s_sq = d1 * d1 + d2 * d2;
            let g = 1.0 / (4.0 * PI * (s_sq + a * a + delta_sq).sqrt())
                + constant
                + greens::image_remainder(s_sq, -a, images);
            acc.add(half * w * g * (1.0 + x.x1 * ry1 + x.x2 * ry2));
        }
    }
    Ok(acc.value())
}

/// Momentum drift sum_i Gamma_i H w(x_i) of a particle field.
pub fn drift_functional(
    positions: &[Point2],
    circulations: &[f64],
    params: &KernelParams,
) -> Result<Point2> {
    let vel = velocities(positions, circulations, params)?;
    let mut d1 = CompensatedSum::new();
    let mut d2 = CompensatedSum::new();
    for (v, &gamma) in vel.iter().zip(circulations) {
        d1.add(gamma * v.x1);
        d2.add(gamma * v.x2);
    }
    Ok(Point2::new(d1.value(), d2.value()))
}

/// Leading-order drift: the explicit log-kernel double sum
///
///   -(1/4 pi) sum_{i,j} Gamma_i Gamma_j log(1/|x_i - x_j|) 1_{|x_i-x_j|<=1}
///       perp(x_i) / bracket(x_i),
///
/// with the i = j term carrying the regularized weight log(1/delta).
pub fn drift_leading_term(
    positions: &[Point2],
    circulations: &[f64],
    delta: f64,
) -> Result<Point2> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "drift_leading_term requires delta > 0, got {delta}"
        )));
    }
    let log_diag = (1.0 / delta).ln();
    let mut d1 = CompensatedSum::new();
    let mut d2 = CompensatedSum::new();
    for (i, (&xi_pos, &gi)) in positions.iter().zip(circulations).enumerate() {
        let mut weight = CompensatedSum::new();
        for (j, (&xj_pos, &gj)) in positions.iter().zip(circulations).enumerate() {
            if i == j {
                weight.add(gj * log_diag);
            } else {
                let r = (xi_pos - xj_pos).norm();
                if r <= 1.0 {
                    weight.add(gj * (1.0 / r).ln());
                }
            }
        }
        let dir = perp(xi_pos) * (gi * weight.value() / xi_pos.bracket());
        d1.add(dir.x1);
        d2.add(dir.x2);
    }
    Ok(Point2::new(-d1.value() / (4.0 * PI), -d2.value() / (4.0 * PI)))
}

/// Predicted rotation-law slope: -sqrt(2)/(8 pi).
pub fn predicted_slope() -> f64 {
    -std::f64::consts::SQRT_2 / (8.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rotate;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force line integral of the unperiodized Biot-Savart kernel along
    /// the full helix, truncated at |a| <= 200 pi (tail decays like 1/a^2).
    /// The near-pole core |a| <= 2 pi is integrated adaptively, the wings
    /// with fixed half-period panels.
    fn pair_kernel_line_oracle(x: Point2, y: Point2, delta: f64) -> PairVelocity {
        let delta_sq = delta * delta;
        let line_integrand = |a: f64| -> [f64; 3] {
            let (sin_a, cos_a) = a.sin_cos();
            let ry1 = cos_a * y.x1 + sin_a * y.x2;
            let ry2 = -sin_a * y.x1 + cos_a * y.x2;
            let d = Point3::new(x.x1 - ry1, x.x2 - ry2, -a);
            let q = d.norm_sq() + delta_sq;
            let scale = -1.0 / (4.0 * PI * q * q.sqrt());
            let grad = Point3::new(d.x1 * scale, d.x2 * scale, d.x3 * scale);
            let v = grad.cross(Point3::new(ry2, -ry1, 1.0));
            [v.x1, v.x2, v.x3]
        };
        let mut out = [0.0; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut acc = CompensatedSum::new();
            acc.add(crate::numerics::adaptive_gauss(
                &mut |a| line_integrand(a)[c],
                -2.0 * PI,
                2.0 * PI,
                1e-10,
            ));
            let (nodes, weights) = crate::numerics::gauss_legendre(10);
            for sign in [-1.0, 1.0] {
                for k in 4..400 {
                    let half = 0.25 * PI;
                    let mid = sign * (k as f64 * 0.5 * PI + half);
                    for (t, w) in nodes.iter().zip(weights) {
                        acc.add(half * w * line_integrand(mid + half * t)[c]);
                    }
                }
            }
            *slot = acc.value();
        }
        PairVelocity { u1: out[0], u2: out[1], u3: out[2] }
    }

    fn default_params(delta: f64) -> KernelParams {
        KernelParams { delta, ..Default::default() }
    }

    #[test]
    fn pair_kernel_matches_line_integral() {
        for (x, y, delta) in [
            (Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), 0.0),
            (Point2::new(0.8, 0.1), Point2::new(0.5, -0.3), 0.0),
            (Point2::new(1.0, 0.0), Point2::new(1.05, 0.0), 0.02),
        ] {
            let got = pair_kernel(x, y, &default_params(delta)).unwrap();
            let want = pair_kernel_line_oracle(x, y, delta);
            assert_abs_diff_eq!(got.u1, want.u1, epsilon = 1e-4);
            assert_abs_diff_eq!(got.u2, want.u2, epsilon = 1e-4);
            assert_abs_diff_eq!(got.u3, want.u3, epsilon = 1e-4);
        }
    }

    #[test]
    fn pair_kernel_reduces_to_plane_vortex_for_axial_source() {
        // A particle at the origin is a straight filament: planar velocity
        // perp(x) / (2 pi |x|^2), no swirl.
        // Full-accuracy image sum: the default trades ~5e-9 of remainder
        // truncation for speed, which this exactness check would see.
        let params = KernelParams {
            greens: GreensParams { image_count: 256, ..GreensParams::default() },
            quad_panels: 8,
            quad_order: 16,
            ..KernelParams::default()
        };
        for x in [Point2::new(0.7, 0.0), Point2::new(-0.3, 1.1), Point2::new(0.05, -0.02)] {
            let k = pair_kernel(x, Point2::new(0.0, 0.0), &params).unwrap();
            let expect = perp(x) * (1.0 / (2.0 * PI * x.norm_sq()));
            assert_relative_eq!(k.u1, expect.x1, max_relative = 1e-8, epsilon = 1e-12);
            assert_relative_eq!(k.u2, expect.x2, max_relative = 1e-8, epsilon = 1e-12);
            assert_abs_diff_eq!(k.u3, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pair_kernel_is_rotation_equivariant() {
        let x = Point2::new(1.1, -0.2);
        let y = Point2::new(0.6, 0.5);
        let p = default_params(0.01);
        let base = pair_kernel(x, y, &p).unwrap();
        for theta in [0.4, -2.3, 3.0] {
            let ang = crate::geometry::Angle(theta);
            let k = pair_kernel(rotate(ang, x), rotate(ang, y), &p).unwrap();
            let planar = rotate(ang, Point2::new(base.u1, base.u2));
            assert_abs_diff_eq!(k.u1, planar.x1, epsilon = 1e-10);
            assert_abs_diff_eq!(k.u2, planar.x2, epsilon = 1e-10);
            assert_abs_diff_eq!(k.u3, base.u3, epsilon = 1e-10);
        }
    }

    #[test]
    fn pair_kernel_rejects_unregularized_coincidence() {
        let x = Point2::new(1.0, 0.0);
        assert!(pair_kernel(x, x, &default_params(0.0)).is_err());
        assert!(pair_kernel(x, x, &default_params(0.05)).is_ok());
    }

    #[test]
    fn self_interaction_planar_part_is_azimuthal() {
        // The radial projection of the planar self-term cancels by the
        // reflection symmetry of the integrand; the azimuthal projection is
        // the finite self-rotation of the regularized filament.
        let x = Point2::new(1.0, 0.0);
        let k = pair_kernel(x, x, &default_params(0.05)).unwrap();
        let radial = k.u1 * x.x1 + k.u2 * x.x2;
        assert_abs_diff_eq!(radial, 0.0, epsilon = 1e-10);
        let oracle = pair_kernel_line_oracle(x, x, 0.05);
        assert_abs_diff_eq!(k.u1, oracle.u1, epsilon = 1e-4);
        assert_abs_diff_eq!(k.u2, oracle.u2, epsilon = 1e-4);
        assert_abs_diff_eq!(k.u3, oracle.u3, epsilon = 1e-4);
    }

    #[test]
    fn quadrature_is_stable_under_panel_refinement() {
        let x = Point2::new(1.0, 0.0);
        let y = Point2::new(0.8, 0.3);
        let coarse = pair_kernel(x, y, &default_params(0.0)).unwrap();
        let mut fine_params = default_params(0.0);
        fine_params.quad_panels *= 2;
        fine_params.quad_order = 12;
        let fine = pair_kernel(x, y, &fine_params).unwrap();
        assert_abs_diff_eq!(coarse.u1, fine.u1, epsilon = 1e-8);
        assert_abs_diff_eq!(coarse.u2, fine.u2, epsilon = 1e-8);
        assert_abs_diff_eq!(coarse.u3, fine.u3, epsilon = 1e-8);
    }

    #[test]
    fn velocity_of_single_particle_at_origin_vanishes() {
        let v = velocity_h(
            &[Point2::new(0.0, 0.0)],
            &[1.0],
            Point2::new(0.0, 0.0),
            &default_params(0.05),
        )
        .unwrap();
        assert_abs_diff_eq!(v.x1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.x2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn radially_symmetric_field_fixes_the_origin() {
        let n = 8;
        let positions: Vec<Point2> = (0..n)
            .map(|k| {
                let ang = 2.0 * PI * k as f64 / n as f64;
                Point2::new(0.7 * ang.cos(), 0.7 * ang.sin())
            })
            .collect();
        let circulations = vec![1.0 / n as f64; n];
        let v =
            velocity_h(&positions, &circulations, Point2::new(0.0, 0.0), &default_params(0.01))
                .unwrap();
        assert_abs_diff_eq!(v.x1, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.x2, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn velocity_is_equivariant_field_wide() {
        let positions =
            vec![Point2::new(0.9, 0.1), Point2::new(0.6, -0.4), Point2::new(1.2, 0.3)];
        let circulations = vec![0.5, 0.3, 0.2];
        let x = Point2::new(0.8, 0.2);
        let p = default_params(0.02);
        let base = velocity_h(&positions, &circulations, x, &p).unwrap();
        let ang = crate::geometry::Angle(1.1);
        let rotated: Vec<Point2> = positions.iter().map(|&q| rotate(ang, q)).collect();
        let v = velocity_h(&rotated, &circulations, rotate(ang, x), &p).unwrap();
        let expect = rotate(ang, base);
        assert_abs_diff_eq!(v.x1, expect.x1, epsilon = 1e-10);
        assert_abs_diff_eq!(v.x2, expect.x2, epsilon = 1e-10);
    }

    #[test]
    fn close_pair_near_field_carries_the_helical_tilt() {
        // The transported near field is the plane point-vortex rotation
        // scaled by bracket(y): the filament through y is tilted, so the
        // planar channel contributes 1/bracket(y) of the line-vortex field
        // and the swirl channel adds |y|^2/bracket(y) more.
        let x1 = Point2::new(1.0, 0.0);
        let x2 = Point2::new(1.0 + 1e-3, 0.0);
        let v = velocity_h(&[x1, x2], &[0.5, 0.5], x1, &default_params(0.0)).unwrap();
        let dx = x1 - x2;
        let expect = perp(dx) * (0.5 * x2.bracket() / (2.0 * PI * dx.norm_sq()));
        let rel = ((v - expect).norm()) / expect.norm();
        assert!(rel <= 0.05, "relative deviation {rel} from tilted plane rotation");
    }

    #[test]
    fn transport_kernel_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = default_params(0.0);
        for _ in 0..100 {
            let x = Point3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-PI..PI),
            );
            let mut y = x;
            while (x - y).reduced().norm() < 0.1 || (x - y).reduced().norm() > 3.0 {
                y = Point3::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-PI..PI),
                );
            }
            let sum = g_transport(x, y, &p).unwrap() + g_transport(y, x, &p).unwrap();
            assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn transport_kernel_rejects_coincident_points() {
        let x = Point3::new(0.3, 0.4, 0.5);
        assert!(g_transport(x, x, &default_params(0.0)).is_err());
    }

    #[test]
    fn k1_is_symmetric_and_logarithmic_on_the_diagonal() {
        let p = default_params(0.0);
        let x = Point2::new(1.0, 0.0);
        // Symmetry on scattered pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let a = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let b = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if (a - b).norm() < 1e-3 {
                continue;
            }
            assert_abs_diff_eq!(
                kernel_k1(a, b, &p).unwrap(),
                kernel_k1(b, a, &p).unwrap(),
                epsilon = 1e-10
            );
        }
        // K1 - log(1/r)/sqrt(2) stays in a narrow band as r -> 0 at x = (1,0).
        let mut band: Vec<f64> = Vec::new();
        for r in [1e-2, 1e-3, 1e-4] {
            let y = Point2::new(1.0 - r, 0.0);
            let k1 = kernel_k1(x, y, &p).unwrap();
            band.push(k1 - (1.0 / r).ln() / x.bracket());
        }
        let spread = band.iter().cloned().fold(f64::MIN, f64::max)
            - band.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 2.0, "K1 log-band spread {spread}, values {band:?}");
    }

    #[test]
    fn k2_matches_its_diagonal_coefficient_and_k0star_bound() {
        let p = default_params(0.0);
        let x = Point2::new(1.0, 0.0);
        let coeff = 2.0 / x.bracket().powi(3); // 2^{-1/2} at |x| = 1
        assert_relative_eq!(coeff, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let mut band: Vec<f64> = Vec::new();
        for r in [1e-2, 1e-3, 1e-4] {
            let y = Point2::new(1.0 - r, 0.0);
            band.push(kernel_k2(x, y, &p).unwrap() - coeff * (1.0 / r).ln());
        }
        let spread = band.iter().cloned().fold(f64::MIN, f64::max)
            - band.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 3.0, "K2 log-band spread {spread}, values {band:?}");

        // K2 <= pi^2 K0* pointwise and the K0* upper bound holds with a
        // modest constant on random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let b = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let r = (a - b).norm();
            if r < 1e-4 {
                continue;
            }
            let k0s = kernel_k0star(a, b, &p).unwrap();
            let k2 = kernel_k2(a, b, &p).unwrap();
            assert!(k2 <= PI * PI * k0s * (1.0 + 1e-12));
            let bound = 1.0 + (1.0 + a.norm().min(b.norm())) / (r * r);
            assert!(k0s <= 100.0 * bound, "K0* = {k0s} vs bound {bound} at r = {r}");
            if r >= 1.0 {
                assert!(k2 <= 50.0 * b.bracket(), "far-pair K2 = {k2} at r = {r}");
            }
        }
    }

    #[test]
    fn energy_kernel_is_symmetric_and_bounded_for_far_pairs() {
        let p = default_params(0.0);
        let x = Point2::new(3.0, 0.0);
        let y = Point2::new(-2.0, 0.0);
        let kxy = energy_pair_kernel(x, y, &p).unwrap();
        let kyx = energy_pair_kernel(y, x, &p).unwrap();
        assert_abs_diff_eq!(kxy, kyx, epsilon = 1e-10);
        assert!(kxy.abs() < 1.0, "far-pair energy kernel {kxy}");
    }

    #[test]
    fn energy_kernel_near_diagonal_log_growth() {
        // K_E(x, y) - (bracket(x)^2 / 4 pi) I(x, y), with I the plain
        // inverse-distance angular integral, stays bounded on the diagonal.
        let p = default_params(0.0);
        let x = Point2::new(1.0, 0.0);
        let mut band: Vec<f64> = Vec::new();
        for r in [1e-2, 1e-3, 1e-4] {
            let y = Point2::new(1.0 - r, 0.0);
            let ke = energy_pair_kernel(x, y, &p).unwrap();
            let i_single =
                angular_integral(x, y, -PI, PI, &p, &[], |_, q| 1.0 / q.sqrt()).unwrap();
            band.push(ke - x.bracket().powi(2) / (4.0 * PI) * i_single);
        }
        let spread = band.iter().cloned().fold(f64::MIN, f64::max)
            - band.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 2.0, "energy kernel band spread {spread}, values {band:?}");
    }

    #[test]
    fn drift_leading_term_matches_closed_form_for_two_atoms() {
        let x = Point2::new(1.0, 0.0);
        let y = Point2::new(1.0, 0.01);
        let drift = drift_leading_term(&[x, y], &[0.5, 0.5], 0.01).unwrap();
        // With |x - y| = delta = 0.01 every pair weight, diagonal included,
        // is log(100), so each atom contributes
        // -(1/4 pi) (1/2) log(100) perp / bracket.
        let factor = -(100.0f64).ln() / (8.0 * PI);
        let expect = (perp(x) * (1.0 / x.bracket()) + perp(y) * (1.0 / y.bracket())) * factor;
        assert_abs_diff_eq!(drift.x1, expect.x1, epsilon = 1e-10);
        assert_abs_diff_eq!(drift.x2, expect.x2, epsilon = 1e-10);
    }

    #[test]
    fn drift_of_radial_blob_at_origin_vanishes() {
        let config = crate::vortex_sim::SimConfig {
            epsilon: 0.05,
            sigma: Point2::new(0.0, 0.0),
            profile: crate::vortex_sim::InitProfile {
                core_resolution: 8,
                ..Default::default()
            },
            ..Default::default()
        };
        let field = crate::vortex_sim::init_blob(&config).unwrap();
        let params = field.kernel_params(&KernelParams::default());
        let drift = drift_functional(&field.positions, &field.circulations, &params).unwrap();
        assert_abs_diff_eq!(drift.x1, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(drift.x2, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn helical_blob_drifts_at_the_predicted_rotation_speed() {
        let config = crate::vortex_sim::SimConfig {
            epsilon: 0.05,
            sigma: Point2::new(1.0, 0.0),
            profile: crate::vortex_sim::InitProfile {
                core_resolution: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let field = crate::vortex_sim::init_blob(&config).unwrap();
        let params = field.kernel_params(&KernelParams::default());
        let drift = drift_functional(&field.positions, &field.circulations, &params).unwrap();
        let (_, _, _, p) = crate::diagnostics::momenta(&field);
        let v_eps = predicted_slope() * (1.0f64 / 0.05).ln(); // -0.1686
        let azimuthal = drift.dot(perp(p)) / p.norm_sq();
        // The rotation law carries a profile-dependent constant next to the
        // log term; for the compact bump it measures about -0.08 (the
        // profile's internal log-interaction energy), so the azimuthal speed
        // is V_eps shifted by an O(1) band, not V_eps itself.
        assert!(azimuthal < 0.0, "rotation must be clockwise, got {azimuthal}");
        assert!(
            (azimuthal - v_eps).abs() <= 0.12,
            "azimuthal drift {azimuthal} vs leading term {v_eps}"
        );
        // The drift is azimuthal to leading order: small radial component.
        let radial_ratio = (drift.dot(p) / drift.dot(perp(p))).abs();
        assert!(radial_ratio < 0.3, "radial/azimuthal ratio {radial_ratio}");
    }

    #[test]
    fn drift_leading_term_requires_positive_delta() {
        assert!(drift_leading_term(&[Point2::new(1.0, 0.0)], &[1.0], 0.0).is_err());
    }

    #[test]
    fn integrability_bound_along_the_helix() {
        // int_0^{200 pi} da / (|x - R_a y|^2 + a^2) <= C (1 + 1/|x - y|).
        let p = default_params(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let x = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let y = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let r = (x - y).norm();
            if r < 1e-3 {
                continue;
            }
            let integral =
                angular_integral(x, y, 0.0, 200.0 * PI, &p, &[], |_, q| 1.0 / q).unwrap();
            assert!(
                integral <= 50.0 * (1.0 + 1.0 / r),
                "integral {integral} vs bound at r = {r}"
            );
        }
    }
}
