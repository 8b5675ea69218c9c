//! Recovery sequence of the limit solution: mollify, isometrize, and watch
//! the energy gap close as the thickness goes to zero.
//!
//! cargo run --release --example recovery_sequence

use sheetlift::gamma::{recovery_sequence, PowerLaw, RecoveryOptions};
use sheetlift::model::LimitConstants;
use sheetlift::solver::solve_limit_problem;

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
    let sol = solve_limit_problem(&family.limit, [0.0, 0.5])?;
    let target = sol.sheet(2000)?;
    let hs = [0.05, 0.025, 0.0125, 0.00625, 0.003125];
    let seq = recovery_sequence(&target, &family, &hs, &RecoveryOptions::default())?;

    println!("limit energy {:.8}", seq.limit_energy);
    println!("        h  sigma    bending   1/sigma        gap   sup dist");
    for m in &seq.members {
        println!(
            "{:>9} {:>6} {:>10.3e} {:>9.3e} {:>10.3e} {:>10.3e}",
            m.h,
            m.sigma,
            m.bending,
            1.0 / m.sigma as f64,
            m.gap,
            m.sup_distance
        );
    }
    println!("thinning holds: {}, gap shrinking at the tail: {}", seq.thinning_holds(), seq.gap_decreasing_at_tail());
    Ok(())
}
