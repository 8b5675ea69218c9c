//! Laplace-Young menisci: critical height, profiles and the minimal
//! meniscus energy.
//!
//! cargo run --example meniscus

use sheetlift::laplace_young::{capillary_length, critical_height, phi, psi_derivative, shoot_graph, solve_graph, Side};

fn main() -> sheetlift::Result<()> {
    let (a, c) = (1.0, 1.0);
    let y_star = critical_height(a, c)?;
    println!("critical height y* = {y_star:.7}, capillary length {}", capillary_length(a, c));

    println!("\n    y0     phi+(0,y0)   dphi/dy0   x where y = y0/10");
    for k in 1..=7 {
        let y0 = y_star * k as f64 / 7.0;
        let prof = solve_graph(y0, a, c)?;
        let tenth = prof.samples.iter().find(|q| q[1] <= 0.1 * y0).map_or(f64::NAN, |q| q[0]);
        println!(
            "{y0:>6.3} {:>14.8} {:>10.6} {tenth:>12.4}",
            phi(Side::Plus, 0.0, y0, a, c)?,
            psi_derivative(y0, a, c)
        );
    }

    // the same profile by shooting on the second-order equation
    let y0 = 0.8;
    let quad = solve_graph(y0, a, c)?;
    let shot = shoot_graph(y0, a, c, 0.01)?;
    let gap = shot.xs.iter().zip(&shot.ys).map(|(x, y)| (quad.y_at(*x) - y).abs()).fold(0.0, f64::max);
    println!("\nshooting vs first integral at y0 = {y0}: {gap:.2e} over {} samples", shot.xs.len());
    println!("ODE residual {:.2e}", quad.ode_residual());
    Ok(())
}
