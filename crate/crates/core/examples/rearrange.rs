//! The two curve constructions behind the existence and recovery arguments:
//! monotone rearrangement of a meniscus competitor and isometrization of a
//! short curve.
//!
//! cargo run --example rearrange

use rand::SeedableRng;
use sheetlift::cli::{random_polyline, short_arc};
use sheetlift::curve::{isometrize, monotone_rearrange, ParamCurve};
use sheetlift::laplace_young::parametric_objective;

fn main() -> sheetlift::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    println!("objective before -> after rearrangement");
    for _ in 0..8 {
        let c = ParamCurve::by_chord_length(random_polyline(&mut rng, 10))?;
        let r = monotone_rearrange(&c)?;
        println!(
            "  {:>9.5} -> {:>9.5}   ({} -> {} nodes)",
            parametric_objective(c.points(), 1.0, 1.0),
            parametric_objective(r.points(), 1.0, 1.0),
            c.len(),
            r.len()
        );
    }

    let arc = short_arc(4000)?;
    println!("\nhalf circle of length {:.3}, isometrized:", arc.length());
    let mut last = f64::NAN;
    for n in [2, 4, 8, 16, 32, 64] {
        let out = isometrize(&arc, n)?;
        println!(
            "  n = {n:>2}: length {:.12}, sup error {:.4e}, ratio {:.3}, embedded {}",
            out.curve.length(),
            out.sup_error,
            out.sup_error / last,
            out.all_embedded()
        );
        last = out.sup_error;
    }
    Ok(())
}
