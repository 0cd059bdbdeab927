//! Measures the instantaneous angular speed of helical blobs across a range
//! of filament widths and fits the rotation law
//! omega(eps) = slope * log(1/eps) + const against the predicted slope
//! -sqrt(2) / (8 pi).

use helix_vortex::biot_savart::{predicted_slope, KernelParams};
use helix_vortex::diagnostics::fit_rotation;
use helix_vortex::geometry::Point2;
use helix_vortex::vortex_sim::{init_blob, InitProfile, SimConfig};

fn main() -> helix_vortex::Result<()> {
    let epsilons = [0.1, 0.05, 0.02, 0.01];
    let kernel = KernelParams::default();
    let fields = epsilons
        .iter()
        .map(|&epsilon| {
            init_blob(&SimConfig {
                epsilon,
                sigma: Point2::new(1.0, 0.0),
                profile: InitProfile { core_resolution: 12, ..InitProfile::default() },
                ..SimConfig::default()
            })
        })
        .collect::<helix_vortex::Result<Vec<_>>>()?;

    let fit = fit_rotation(&epsilons, &fields, &kernel)?;
    println!("  {:>8} {:>12} {:>12} {:>12}", "eps", "log(1/eps)", "omega", "slope*log");
    for (&epsilon, &omega) in fit.epsilons.iter().zip(&fit.omegas) {
        let log = (1.0 / epsilon).ln();
        println!(
            "  {epsilon:>8} {log:>12.6} {omega:>12.6} {:>12.6}",
            fit.predicted_slope * log
        );
    }
    println!("fitted slope    = {:.6}", fit.slope);
    println!("predicted slope = {:.6}  (-sqrt(2)/(8 pi))", predicted_slope());
    println!(
        "relative error  = {:.2}%",
        100.0 * (fit.slope - fit.predicted_slope).abs() / fit.predicted_slope.abs()
    );
    println!("intercept       = {:.6}  (profile-dependent O(1) constant)", fit.intercept);
    Ok(())
}
