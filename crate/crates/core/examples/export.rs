//! Write the limit solution and a thickness-h minimizer as CSV, SVG and JSON.
//!
//! cargo run --release --example export -- out/export

use std::path::PathBuf;

use sheetlift::cli::{export_profiles, Format, Profiles, Scenario};
use sheetlift::solver::{minimize_energy_h, smoothed_start, solve_limit_problem, MinimizeOptions};

fn main() -> sheetlift::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/export".into()));
    std::fs::create_dir_all(&dir)?;
    let setup = Scenario::standard().setup()?;

    let sol = solve_limit_problem(&setup.family.limit, [0.3, 0.8])?;
    let limit = Profiles::from_limit(&sol, 400)?;
    let (cfg, _) = minimize_energy_h(&setup.params, &smoothed_start(&sol, &setup.params, 400)?, &MinimizeOptions::default())?;
    let thick = Profiles::from_configuration(&cfg, &setup.params)?;

    for (stem, prof) in [("limit", &limit), ("h005", &thick)] {
        for (fmt, ext) in [(Format::Csv, "csv"), (Format::Svg, "svg"), (Format::Json, "json")] {
            let path = dir.join(format!("{stem}.{ext}"));
            export_profiles(prof, fmt, &path)?;
            println!("wrote {}", path.display());
        }
        for (name, part) in prof.parts() {
            println!("  {name:<15} {} nodes", part.len());
        }
        println!("  energy {:.10}", prof.energy.total);
    }
    Ok(())
}
