//! A filament pinned to the axis (sigma = 0) reduces to a planar point
//! vortex: the blob must stay put instead of rotating. This example runs the
//! flow and reports how well the center and the circulation stay confined.

use helix_vortex::diagnostics::mass_outside;
use helix_vortex::geometry::Point2;
use helix_vortex::vortex_sim::{simulate, InitProfile, SimConfig};

fn main() -> helix_vortex::Result<()> {
    let config = SimConfig {
        epsilon: 0.05,
        sigma: Point2::new(0.0, 0.0),
        t_end: 0.25,
        record_every: 100,
        profile: InitProfile { core_resolution: 8, ..InitProfile::default() },
        ..SimConfig::default()
    };
    let radius = config.epsilon.sqrt();
    println!("straight filament, epsilon = {}, horizon {}", config.epsilon, config.t_end);

    let trajectory = simulate(&config)?;
    println!("  {:>6} {:>12} {:>14}", "t", "|center|", "mass outside");
    for (record, snapshot) in trajectory.records.iter().zip(&trajectory.snapshots) {
        let (outside, _) = mass_outside(&snapshot.field, Point2::new(0.0, 0.0), radius);
        println!("  {:>6.3} {:>12.3e} {:>14.3e}", record.t, record.p.norm(), outside);
    }

    let max_center = trajectory.records.iter().map(|r| r.p.norm()).fold(0.0, f64::max);
    let last = trajectory.snapshots.last().unwrap();
    let (outside, _) = mass_outside(&last.field, Point2::new(0.0, 0.0), radius);
    println!("max |center|        = {max_center:.3e}  (bound 5 eps = {:.2})", 5.0 * config.epsilon);
    println!(
        "final mass outside sqrt(eps) = {outside:.3e}  (bound 10 eps = {:.2})",
        10.0 * config.epsilon
    );
    Ok(())
}
