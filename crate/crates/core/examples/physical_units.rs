//! From laboratory numbers to the dimensionless constants, and a check that
//! a family of thicknesses sits in the thin-sheet scaling regime.
//!
//! cargo run --example physical_units

use sheetlift::model::{check_scaling_regime, dimensionless_anchor, nondimensionalize_with, PhysicalParams, DEFAULT_REGIME_TOL};
use sheetlift::solver::solve_limit_problem;

fn film(h: f64) -> PhysicalParams {
    // polymer film on water, SI units
    PhysicalParams {
        gamma_lg: 0.072,
        gamma_sg: 0.03,
        gamma_sl: 0.035,
        rho_l: 1000.0,
        rho_s: 1200.0,
        g: 9.81,
        e_mod: 3.0e6,
        h,
        l: 0.05,
        anchor_x: 0.0,
        anchor_y: 0.015,
    }
}

fn main() -> sheetlift::Result<()> {
    let alpha = 0.5;
    let p = nondimensionalize_with(&film(5e-5), alpha, 1.0)?;
    println!("{p:#?}");
    let lim = p.rescaled();
    let (ax, ay) = dimensionless_anchor(&film(5e-5));
    let sol = solve_limit_problem(&lim, [ax, ay])?;
    println!("regime {:?}, wet length {:.4} of the sheet", sol.regime, sol.l);

    // the surface constants scale like h^-1, not h^alpha, in a fixed material:
    // this family leaves the regime, which the check reports
    let seq: Vec<_> = [1e-4, 5e-5, 2.5e-5, 1.25e-5]
        .iter()
        .map(|&h| Ok((h / 0.05, nondimensionalize_with(&film(h), alpha, 1.0)?)))
        .collect::<sheetlift::Result<_>>()?;
    let rep = check_scaling_regime(&seq, alpha, 1.0, DEFAULT_REGIME_TOL)?;
    println!("scaling regime holds for every constant: {}", rep.all_ok());
    Ok(())
}
