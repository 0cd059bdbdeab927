//! Prints the log-asymptotics of the auxiliary kernels near the diagonal,
//! the K0* upper bound on random pairs, and the antisymmetry of the
//! transport coefficient.

use std::f64::consts::PI;

use helix_vortex::biot_savart::{self, KernelParams};
use helix_vortex::geometry::{Point2, Point3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> helix_vortex::Result<()> {
    let params = KernelParams::default();
    let x = Point2::new(1.0, 0.0);

    println!("log bands at x = (1, 0), y = x - (r, 0):");
    println!("  {:>8} {:>12} {:>12} {:>12} {:>12}", "r", "K1", "K1 band", "K2", "K2 band");
    for r in [1e-2, 1e-3, 1e-4] {
        let y = Point2::new(1.0 - r, 0.0);
        let log = (1.0 / r).ln();
        let k1 = biot_savart::kernel_k1(x, y, &params)?;
        let k2 = biot_savart::kernel_k2(x, y, &params)?;
        let b1 = k1 - log / x.bracket();
        let b2 = k2 - 2.0 * log / x.bracket().powi(3);
        println!("  {r:>8.0e} {k1:>12.6} {b1:>12.6} {k2:>12.6} {b2:>12.6}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut sample = || Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let mut max_ratio: f64 = 0.0;
    let mut taken = 0;
    while taken < 1000 {
        let a = sample();
        let b = sample();
        let r = (a - b).norm();
        if r < 1e-4 {
            continue;
        }
        let k0s = biot_savart::kernel_k0star(a, b, &params)?;
        let bound = 1.0 + (1.0 + a.norm().min(b.norm())) / (r * r);
        max_ratio = max_ratio.max(k0s / bound);
        taken += 1;
    }
    println!("K0* / (1 + (1 + min(|x|,|y|)) / r^2) on 1000 random pairs:");
    println!("  max ratio = {max_ratio:.4} (bounded by a modest constant)");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lift = |rng: &mut ChaCha8Rng| {
        Point3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-PI..PI),
        )
    };
    let mut max_residual: f64 = 0.0;
    let mut taken = 0;
    while taken < 100 {
        let a = lift(&mut rng);
        let b = lift(&mut rng);
        let r = (a - b).reduced().norm();
        if !(0.1..=3.0).contains(&r) {
            continue;
        }
        let fwd = biot_savart::g_transport(a, b, &params)?;
        let bwd = biot_savart::g_transport(b, a, &params)?;
        max_residual = max_residual.max((fwd + bwd).abs());
        taken += 1;
    }
    println!("transport coefficient antisymmetry on 100 lifted pairs:");
    println!("  max |g(x,y) + g(y,x)| = {max_residual:.3e}");
    Ok(())
}
