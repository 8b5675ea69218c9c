//! Bending against surface tension near a kink: the fillet radius at which
//! the two balance, compared with h^{3/2} sqrt(E/gamma).
//!
//! cargo run --release --example kink

use sheetlift::energy::{fillet_crossover, fillet_curve, kink_analysis_with, Configuration, KinkPhysics};

fn main() -> sheetlift::Result<()> {
    let turning = std::f64::consts::FRAC_PI_3;
    println!("       h    E  gamma     radius   h^1.5*sqrt(E/g)  ratio");
    for h in [1e-2, 3e-3, 1e-3] {
        for (e_mod, gamma) in [(1.0, 1.0), (10.0, 0.5)] {
            let phys = KinkPhysics { h, e_mod, gamma, rho_g: 1.0 };
            let x = fillet_crossover(&phys, turning)?;
            println!(
                "{h:>8} {e_mod:>4} {gamma:>6} {:>10.3e} {:>17.3e} {:>6.3}",
                x.radius, x.eps_star, x.ratio
            );
        }
    }

    let phys = KinkPhysics { h: 1e-2, e_mod: 1.0, gamma: 1.0, rho_g: 1.0 };
    let curve = fillet_curve(phys.kink_scale(), turning, 0.2, 0.5, 400)?;
    let anchor = curve.end();
    let rep = kink_analysis_with(&Configuration::new(curve, 0.5, anchor)?, &phys, 0.1)?;
    println!("\ngravity in the window minus 2 eps rho g y0^2 grows like eps^{:.3}", rep.gravity_exponent);
    Ok(())
}
