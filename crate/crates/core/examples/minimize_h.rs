//! Minimize the thickness-h energy from the smoothed limit solution.
//!
//! cargo run --release --example minimize_h -- 0.05 1.1

use sheetlift::gamma::PowerLaw;
use sheetlift::model::LimitConstants;
use sheetlift::solver::{
    lambda_estimate, minimize_energy_h, profile_distance, smoothed_start, solve_limit_problem, MinimizeOptions,
};

fn main() -> sheetlift::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let h = args.next().unwrap_or(0.05);
    let height = args.next().unwrap_or(0.5);

    let family = PowerLaw {
        limit: LimitConstants {
            a_lg_star: 1.0,
            a_sg_star: 0.3,
            a_sl_star: 0.3,
            b_star: 0.01,
            c_star: 1.0,
        },
        alpha: 0.5,
        eps_exp: 1.0,
    };
    let p = family.params(h);
    let sol = solve_limit_problem(&family.limit, [0.0, height])?;
    let init = smoothed_start(&sol, &p, 400)?;
    let (cfg, rep) = minimize_energy_h(&p, &init, &MinimizeOptions::default())?;

    println!("h = {h}, anchor height {height}, limit regime {:?}", sol.regime);
    println!("converged {} after {} Newton steps", rep.converged, rep.iterations);
    println!("energy {:.8} -> {:.8}", rep.initial_energy, rep.final_energy);
    println!("contact parameter {:.4} (limit {:.4})", cfg.l, sol.l);
    println!("sup strain {:.4}", rep.sup_strain);
    match lambda_estimate(&cfg, &p) {
        Some(l) => println!("tension from the dry part {l:.4} (limit {:.4})", family.limit.lambda_pred()),
        None => println!("no dry part to read the tension from"),
    }
    let reference = sol.sheet(1600)?;
    println!("distance to the limit profile {:.3e}", profile_distance(&cfg, &reference, &family.limit)?);
    Ok(())
}
