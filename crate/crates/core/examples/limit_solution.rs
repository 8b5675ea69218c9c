//! Solve the limit problem for three anchors and print the contact geometry.
//!
//! cargo run --example limit_solution

use sheetlift::model::LimitConstants;
use sheetlift::solver::{contact_conditions, solve_limit_problem};

fn main() -> sheetlift::Result<()> {
    let lim = LimitConstants {
        a_lg_star: 1.0,
        a_sg_star: 0.3,
        a_sl_star: 0.3,
        b_star: 0.01,
        c_star: 1.0,
    };
    println!("tension A_LG - A_SG - A_SL = {}", lim.lambda_pred());

    for anchor in [[0.0, 0.0], [0.0, 0.5], [0.3, 0.8], [0.0, 1.6]] {
        let sol = solve_limit_problem(&lim, anchor)?;
        let contact = contact_conditions(&sol);
        println!("\nanchor ({}, {}): {:?}", anchor[0], anchor[1], sol.regime);
        println!("  free end      ({:.6}, {:.6})", sol.contact_left[0], sol.contact_left[1]);
        println!("  junction      ({:.6}, {:.6})", sol.contact_right[0], sol.contact_right[1]);
        println!("  wet length l  {:.6}", sol.l);
        println!("  contact angle {:.6} rad", sol.contact_angle);
        println!("  energy        {:.10}", sol.energy.total);
        println!("  symmetry      {:.2e}", sol.symmetry_residual()?);
        println!("  |length - 1|  {:.2e}", (sol.sheet_length(20_000)? - 1.0).abs());
        println!("  force balance {:.2e}", contact.max_residual());
    }
    Ok(())
}
