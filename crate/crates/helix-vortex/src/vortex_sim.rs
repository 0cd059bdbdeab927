//! Discrete vorticity state and explicit time integration.
//!
//! The planar vorticity w is discretized as a sum of blobs: particles x_i
//! with nonnegative circulations Gamma_i summing to one, each standing for a
//! delta-regularized helical filament. Initial data places particles on a
//! regular grid across a radial profile of width epsilon centered at sigma,
//!
//!   w_0(x) = (1/eps^2) eta((x - sigma) / eps),
//!
//! then rescales circulations to unit mass and recenters so the discrete
//! center of gravity is exactly sigma. The dynamics is the particle system
//! dx_i/dt = H w(x_i) integrated by classical RK4; circulations are never
//! mutated because the transport equation conserves them exactly.

use crate::biot_savart::{velocities, KernelParams};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::numerics::CompensatedSum;

/// Discrete vorticity measure: blob particles with circulations.
#[derive(Clone, Debug)]
pub struct ParticleField {
    pub positions: Vec<Point2>,
    pub circulations: Vec<f64>,
    /// Blob core width used for regularized self-interaction.
    pub delta: f64,
    /// Filament thickness parameter of the run that built this field.
    pub epsilon: f64,
}

impl ParticleField {
    pub fn new(
        positions: Vec<Point2>,
        circulations: Vec<f64>,
        delta: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let field = Self { positions, circulations, delta, epsilon };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.circulations.len() {
            return Err(Error::Domain(format!(
                "{} positions vs {} circulations",
                self.positions.len(),
                self.circulations.len()
            )));
        }
        if !self.positions.iter().all(|p| p.is_finite()) {
            return Err(Error::Domain("non-finite particle position".into()));
        }
        if !self.circulations.iter().all(|g| g.is_finite() && *g >= 0.0) {
            return Err(Error::Domain("circulations must be finite and nonnegative".into()));
        }
        if !(self.delta >= 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::Domain("field requires delta >= 0 and epsilon > 0".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Total circulation (discrete mass).
    pub fn mass(&self) -> f64 {
        crate::numerics::sum_compensated(self.circulations.iter().copied())
    }

    /// Kernel parameters for evaluating this field's velocities: the
    /// configured parameters with delta = 0 resolved to the blob width.
    pub fn kernel_params(&self, configured: &KernelParams) -> KernelParams {
        let mut params = configured.clone();
        if params.delta == 0.0 {
            params.delta = self.delta;
            params.near_threshold = 4.0 * self.delta.max(1e-3);
        }
        params
    }
}

/// Initial radial profile of the blob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// C^infinity bump exp(-1/(1 - |z|^2)) supported on |z| < 1.
    CompactBump,
    /// exp(-|z|^2 / 2) truncated at |z| = 4.
    TruncatedGaussian,
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitProfile {
    pub kind: ProfileKind,
    /// Particles across the core diameter (at least 8).
    pub core_resolution: usize,
}

impl Default for InitProfile {
    fn default() -> Self {
        Self { kind: ProfileKind::CompactBump, core_resolution: 12 }
    }
}

impl InitProfile {
    pub fn validate(&self) -> Result<()> {
        if self.core_resolution < 8 {
            return Err(Error::Config("profile.core_resolution must be at least 8".into()));
        }
        Ok(())
    }

    /// Unnormalized weight at scaled radius^2 (normalization cancels in the
    /// global circulation rescale).
    fn weight(&self, z_sq: f64) -> f64 {
        match self.kind {
            ProfileKind::CompactBump => {
                if z_sq < 1.0 {
                    (-1.0 / (1.0 - z_sq)).exp()
                } else {
                    0.0
                }
            }
            ProfileKind::TruncatedGaussian => {
                if z_sq <= 16.0 {
                    (-0.5 * z_sq).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Grid half-width in index units for spacing h = 2 eps / core_resolution.
    fn index_radius(&self) -> usize {
        match self.kind {
            ProfileKind::CompactBump => self.core_resolution / 2 + 1,
            ProfileKind::TruncatedGaussian => 2 * self.core_resolution + 1,
        }
    }
}

/// One simulation run: blob geometry, time grid and kernel settings.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Filament thickness, in (0, 0.5).
    pub epsilon: f64,
    /// Blob center: (1, 0) for the helical case, (0, 0) for a straight
    /// filament on the axis.
    pub sigma: Point2,
    pub t_end: f64,
    /// Time step; 0 selects the default 0.2 epsilon^2 set by the blob's
    /// internal turnover time.
    pub dt: f64,
    pub profile: InitProfile,
    pub kernel: KernelParams,
    /// Diagnostics cadence in steps.
    pub record_every: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            sigma: Point2::new(1.0, 0.0),
            t_end: 0.2,
            dt: 0.0,
            profile: InitProfile::default(),
            kernel: KernelParams::default(),
            record_every: 20,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        if !self.sigma.is_finite() {
            return Err(Error::Config("sigma must be finite".into()));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::Config("t_end must be nonnegative".into()));
        }
        if !(self.dt >= 0.0) {
            return Err(Error::Config("dt must be nonnegative (0 = default)".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        self.profile.validate()?;
        self.kernel.validate()
    }

    /// Effective time step: explicit dt, or 0.2 epsilon^2.
    pub fn time_step(&self) -> f64 {
        if self.dt > 0.0 {
            self.dt
        } else {
            0.2 * self.epsilon * self.epsilon
        }
    }
}

/// Builds the initial blob: grid particles weighted by the profile, rescaled
/// to unit mass and recentered so the center of gravity is exactly sigma.
/// The field's blob width is delta = 2h for grid spacing h.
pub fn init_blob(config: &SimConfig) -> Result<ParticleField> {
    config.validate()?;
    let eps = config.epsilon;
    let h = 2.0 * eps / config.profile.core_resolution as f64;
    let n = config.profile.index_radius() as i64;
    let mut positions = Vec::new();
    let mut circulations = Vec::new();
    for j in -n..=n {
        for i in -n..=n {
            let offset = Point2::new(i as f64 * h, j as f64 * h);
            let z_sq = offset.norm_sq() / (eps * eps);
            let w = config.profile.weight(z_sq);
            if w > 0.0 {
                positions.push(config.sigma + offset);
                circulations.push(w * h * h);
            }
        }
    }
    let total = crate::numerics::sum_compensated(circulations.iter().copied());
    for g in &mut circulations {
        *g /= total;
    }
    let mut p1 = CompensatedSum::new();
    let mut p2 = CompensatedSum::new();
    for (x, g) in positions.iter().zip(&circulations) {
        p1.add(g * x.x1);
        p2.add(g * x.x2);
    }
    let shift = config.sigma - Point2::new(p1.value(), p2.value());
    for x in &mut positions {
        *x = *x + shift;
    }
    ParticleField::new(positions, circulations, 2.0 * h, eps)
}

/// One classical RK4 step of dx_i/dt = H w(x_i). Positions advance;
/// circulations and the blob width are untouched. Negative dt integrates
/// backward.
pub fn step_rk4(field: &ParticleField, dt: f64, params: &KernelParams) -> Result<ParticleField> {
    let stage = |base: &[Point2], k: &[Point2], scale: f64| -> Vec<Point2> {
        base.iter().zip(k).map(|(&x, &v)| x + v * scale).collect()
    };
    let x0 = &field.positions;
    let k1 = velocities(x0, &field.circulations, params)?;
    let k2 = velocities(&stage(x0, &k1, 0.5 * dt), &field.circulations, params)?;
    let k3 = velocities(&stage(x0, &k2, 0.5 * dt), &field.circulations, params)?;
    let k4 = velocities(&stage(x0, &k3, dt), &field.circulations, params)?;
    let sixth = dt / 6.0;
    let positions = x0
        .iter()
        .enumerate()
        .map(|(i, &x)| x + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * sixth)
        .collect();
    Ok(ParticleField {
        positions,
        circulations: field.circulations.clone(),
        delta: field.delta,
        epsilon: field.epsilon,
    })
}

/// Time-stamped copy of the particle state.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub field: ParticleField,
}

/// Result of a run: diagnostics series plus particle snapshots at the same
/// cadence.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
}

/// Runs init_blob then fixed-step RK4 to t_end, recording diagnostics at
/// step 0, every record_every steps, and at the final step. The horizon is
/// covered by whole steps of time_step(); when dt does not divide t_end the
/// last step overshoots rather than shrinking, so the step size named in
/// the config is the step size that actually ran.
///
/// A step that produces a non-finite particle position, or that moves a
/// particle farther than the system scale (one plus the initial extent) in
/// a single step, aborts with Error::Blowup carrying the 1-based step index.
/// The exact flow transports particles at speeds of order one on the blob's
/// scale, so a step-sized teleport means the discrete step diverged.
pub fn simulate(config: &SimConfig) -> Result<Trajectory> {
    let mut field = init_blob(config)?;
    let params = field.kernel_params(&config.kernel);
    let dt = config.time_step();
    let n_steps = if config.t_end > 0.0 {
        ((config.t_end / dt) - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    let extent = field.positions.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let max_step_move = 1.0 + extent;
    let mut trajectory = Trajectory { records: Vec::new(), snapshots: Vec::new() };
    let mut record = |t: f64, field: &ParticleField| -> Result<()> {
        trajectory.records.push(DiagnosticsRecord::compute(field, t, &params)?);
        trajectory.snapshots.push(Snapshot { t, field: field.clone() });
        Ok(())
    };
    record(0.0, &field)?;
    for step in 1..=n_steps {
        let next = step_rk4(&field, dt, &params)?;
        let diverged = next.positions.iter().zip(&field.positions).any(|(new, old)| {
            !new.is_finite() || (*new - *old).norm() > max_step_move
        });
        if diverged {
            return Err(Error::Blowup { step });
        }
        field = next;
        if step % config.record_every == 0 || step == n_steps {
            record(step as f64 * dt, &field)?;
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics;
    use crate::geometry::{rotate, Angle};
    use approx::assert_abs_diff_eq;

    fn blob_config(epsilon: f64, sigma: Point2, core_resolution: usize) -> SimConfig {
        SimConfig {
            epsilon,
            sigma,
            profile: InitProfile { core_resolution, ..InitProfile::default() },
            ..SimConfig::default()
        }
    }

    #[test]
    fn init_blob_is_normalized_and_centered() {
        for kind in [ProfileKind::CompactBump, ProfileKind::TruncatedGaussian] {
            let mut config = blob_config(0.05, Point2::new(1.0, 0.0), 8);
            config.profile.kind = kind;
            let field = init_blob(&config).unwrap();
            let (mass, m1, _, p) = diagnostics::momenta(&field);
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.x1, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.x2, 0.0, epsilon = 1e-12);
            assert!((m1 - 1.0).abs() < 5.0 * config.epsilon, "M1 = {m1} for {kind:?}");
            assert_abs_diff_eq!(field.delta, 2.0 * 2.0 * 0.05 / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn init_blob_support_stays_near_sigma() {
        let config = blob_config(0.05, Point2::new(1.0, 0.0), 10);
        let field = init_blob(&config).unwrap();
        assert!(field.len() > 50);
        for x in &field.positions {
            assert!((*x - config.sigma).norm() < config.epsilon * 1.01);
        }
    }

    #[test]
    fn config_validation_names_bad_fields() {
        let mut config = SimConfig::default();
        config.epsilon = 0.7;
        assert!(matches!(config.validate(), Err(crate::Error::Config(msg)) if msg.contains("epsilon")));
        let mut config = SimConfig::default();
        config.profile.core_resolution = 4;
        assert!(
            matches!(config.validate(), Err(crate::Error::Config(msg)) if msg.contains("core_resolution"))
        );
    }

    fn small_test_field() -> ParticleField {
        ParticleField::new(
            vec![Point2::new(0.9, 0.0), Point2::new(-0.4, 0.75), Point2::new(-0.5, -0.7)],
            vec![0.4, 0.35, 0.25],
            0.1,
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn zero_step_is_identity() {
        let field = small_test_field();
        let params = field.kernel_params(&KernelParams::default());
        let stepped = step_rk4(&field, 0.0, &params).unwrap();
        assert_eq!(stepped.positions, field.positions);
    }

    #[test]
    fn single_particle_at_origin_is_a_fixed_point() {
        let field =
            ParticleField::new(vec![Point2::new(0.0, 0.0)], vec![1.0], 0.05, 0.05).unwrap();
        let params = field.kernel_params(&KernelParams::default());
        let stepped = step_rk4(&field, 0.1, &params).unwrap();
        assert_abs_diff_eq!(stepped.positions[0].x1, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(stepped.positions[0].x2, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rk4_error_scales_as_dt_fourth() {
        // A tight triple rotating at omega ~ 20 makes the dt^4 truncation
        // error dominate the quadrature floor.
        let positions = (0..3)
            .map(|k| {
                let ang = std::f64::consts::TAU * k as f64 / 3.0;
                Point2::new(0.05 * ang.cos(), 0.05 * ang.sin())
            })
            .collect();
        let field = ParticleField::new(positions, vec![1.0 / 3.0; 3], 0.02, 0.05).unwrap();
        let params = KernelParams {
            quad_panels: 8,
            quad_order: 12,
            ..KernelParams::for_spacing(0.01)
        };
        let advance = |dt: f64, steps: usize| -> Vec<Point2> {
            let mut f = field.clone();
            for _ in 0..steps {
                f = step_rk4(&f, dt, &params).unwrap();
            }
            f.positions
        };
        let reference = advance(0.01 / 8.0, 32);
        let coarse = advance(0.01, 4);
        let fine = advance(0.005, 8);
        let err = |got: &[Point2]| -> f64 {
            got.iter().zip(&reference).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max)
        };
        let ratio = err(&coarse) / err(&fine);
        assert!(
            (8.0..=32.0).contains(&ratio),
            "halving dt gave error ratio {ratio}, expected ~16"
        );
    }

    #[test]
    fn forward_backward_integration_returns_to_start() {
        let field = small_test_field();
        let params = field.kernel_params(&KernelParams::default());
        let mut f = field.clone();
        for _ in 0..10 {
            f = step_rk4(&f, 0.01, &params).unwrap();
        }
        for _ in 0..10 {
            f = step_rk4(&f, -0.01, &params).unwrap();
        }
        for (a, b) in f.positions.iter().zip(&field.positions) {
            assert!((*a - *b).norm() < 1e-6);
        }
    }

    #[test]
    fn trajectory_is_rotation_covariant() {
        let field = small_test_field();
        let ang = Angle(0.9);
        let rotated = ParticleField {
            positions: field.positions.iter().map(|&x| rotate(ang, x)).collect(),
            ..field.clone()
        };
        let params = field.kernel_params(&KernelParams::default());
        let mut a = field.clone();
        let mut b = rotated;
        for _ in 0..3 {
            a = step_rk4(&a, 0.02, &params).unwrap();
            b = step_rk4(&b, 0.02, &params).unwrap();
        }
        for (xa, xb) in a.positions.iter().zip(&b.positions) {
            let expect = rotate(ang, *xa);
            assert!((expect - *xb).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_horizon_yields_single_record() {
        let mut config = blob_config(0.05, Point2::new(1.0, 0.0), 8);
        config.t_end = 0.0;
        let trajectory = simulate(&config).unwrap();
        assert_eq!(trajectory.records.len(), 1);
        assert_eq!(trajectory.records[0].t, 0.0);
        assert_abs_diff_eq!(trajectory.records[0].mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diverging_step_reports_blowup_index() {
        let field = ParticleField::new(
            vec![Point2::new(1.0, 0.0), Point2::new(1.01, 0.0)],
            vec![0.5, 0.5],
            0.01,
            0.05,
        )
        .unwrap();
        let params = field.kernel_params(&KernelParams::default());
        // A step this size scales positions past the float range inside the
        // RK4 stages, so the first step already produces non-finite output.
        let huge = step_rk4(&field, 1e308, &params).unwrap();
        assert!(huge.positions.iter().any(|p| !p.is_finite()));

        let mut config = blob_config(0.05, Point2::new(1.0, 0.0), 8);
        config.dt = 1e308;
        config.t_end = 1e308;
        match simulate(&config) {
            Err(crate::Error::Blowup { step }) => assert_eq!(step, 1),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn absurd_but_finite_step_is_reported_as_blowup() {
        // dt = 10 never overflows the float range (the far field grows the
        // positions roughly linearly), but the first step already teleports
        // particles far outside the system scale. The displacement check
        // turns that into a blowup instead of a silently garbage trajectory.
        let mut config = blob_config(0.05, Point2::new(0.0, 0.0), 8);
        config.dt = 10.0;
        config.t_end = 0.5;
        match simulate(&config) {
            Err(crate::Error::Blowup { step }) => assert_eq!(step, 1),
            other => panic!("expected blowup, got {other:?}"),
        }
    }
}
