//! Cross-validates the two Green's function representations: the
//! Fourier-Bessel series against the image sum with its tail correction,
//! plus the singular-limit constant and two independent K0 evaluations.

use std::f64::consts::{PI, TAU};

use helix_vortex::geometry::Point3;
use helix_vortex::greens::{self, GreensParams};
use helix_vortex::numerics;

fn main() -> helix_vortex::Result<()> {
    let params = GreensParams { bessel_terms: 200, image_count: 256, tol: 1e-12 };

    println!("representation agreement on a 20 x 10 grid, |x'| in [0.3, 3]:");
    let mut max_err: f64 = 0.0;
    let mut worst = Point3::new(0.0, 0.0, 0.0);
    for i in 0..20 {
        let s = 0.3 + 2.7 * i as f64 / 19.0;
        for j in 0..10 {
            let z = -PI + TAU * j as f64 / 10.0;
            let x = Point3::new(s, 0.0, z);
            let g_bessel = greens::green_bessel(x, &params)?;
            let g_image = greens::green_image(x, &params)?.total();
            let err = (g_bessel - g_image).abs();
            if err > max_err {
                max_err = err;
                worst = x;
            }
        }
    }
    println!(
        "  max |series - images| = {max_err:.3e} at (|x'|, x3) = ({:.3}, {:+.3})",
        worst.x1, worst.x3
    );

    // Near the origin the image decomposition isolates the additive
    // constant (gamma - log 4 pi) / (4 pi^2) next to the 1/(4 pi |x|) pole.
    let probe = greens::green_image(Point3::new(1e-5, 0.0, 0.0), &params)?;
    let constant = probe.total() - probe.singular;
    println!("singular limit at |x| = 1e-5:");
    println!("  G - 1/(4 pi |x|)   = {constant:.8}");
    println!("  closed form        = {:.8}", greens::greens_constant());

    println!("K0 cosine-integral evaluator vs exp(-z cosh t) quadrature:");
    for z in [0.5, 1.0, 2.0, 5.0] {
        let fast = greens::bessel_k0(z)?;
        let t_max = (1500.0 / z).ln();
        let oracle =
            numerics::adaptive_gauss(&mut |t: f64| (-z * t.cosh()).exp(), 0.0, t_max, 1e-13);
        println!("  z = {z:.1}: K0 = {fast:.12}, |diff| = {:.2e}", (fast - oracle).abs());
    }
    Ok(())
}
