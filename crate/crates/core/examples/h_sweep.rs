//! Minimizers over decreasing thickness against the limit solution.
//!
//! cargo run --release --example h_sweep

use sheetlift::gamma::{gamma_convergence_experiment, PowerLaw, SweepOptions};
use sheetlift::model::LimitConstants;

fn main() -> sheetlift::Result<()> {
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
    let opts = SweepOptions {
        parallel: true,
        ..SweepOptions::default()
    };
    for anchor in [[0.0, 0.5], [0.0, 1.1]] {
        let rep = gamma_convergence_experiment(&family, anchor, &[0.2, 0.1, 0.05, 0.025], &opts)?;
        println!("anchor ({}, {}), limit energy {:.6}", anchor[0], anchor[1], rep.limit_energy);
        println!("       h   iters   distance        gap    strain   lambda");
        for r in &rep.rows {
            let lambda = r.lambda_estimate.map_or("-".to_string(), |l| format!("{l:.4}"));
            println!(
                "{:>8} {:>7} {:>10.3e} {:>10.3e} {:>9.4} {:>8}",
                r.h, r.iterations, r.distance, r.gap, r.sup_strain, lambda
            );
        }
        println!("distance ~ h^{:.2}, gap ~ h^{:.2}\n", rep.distance_rate, rep.gap_rate);
    }
    Ok(())
}
