//! Profile export: CSV with one row per node, a static SVG rendering and a
//! JSON document that carries the energy breakdown.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{fmt17, Point};
use crate::energy::{energy_h, Configuration, EnergyBreakdown};
use crate::laplace_young::solve_graph;
use crate::model::DimensionlessParams;
use crate::solver::LimitSolution;
use crate::{Error, Result};

/// Nodes used to sample a limit solution's sheet.
pub const LIMIT_EXPORT_NODES: usize = 400;

/// Menisci are thinned to at most this many samples.
pub const MENISCUS_EXPORT_SAMPLES: usize = 1000;

/// World window drawn by the SVG: `x ∈ [-4, 2]`, `y ∈ [-0.5, 2.5]`.
const VIEW: [f64; 4] = [-4.0, 2.0, -0.5, 2.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Json,
}

/// One curve of a profile: parameter values and points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub s: Vec<f64>,
    pub points: Vec<Point>,
}

impl Part {
    /// Every k-th sample of a dense curve, keeping both ends.
    pub fn thinned(s: &[f64], points: &[Point], max: usize) -> Self {
        let n = points.len();
        let step = n.div_ceil(max.max(2) - 1).max(1);
        let mut out = Part::default();
        for i in (0..n).step_by(step) {
            out.push(s[i], points[i]);
        }
        if n > 0 && (n - 1) % step != 0 {
            out.push(s[n - 1], points[n - 1]);
        }
        out
    }

    fn push(&mut self, s: f64, p: Point) {
        self.s.push(s);
        self.points.push(p);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sheet split at the contact parameter, the two menisci in world
/// coordinates and the energy of the whole configuration.
///
/// Sheet parts use the reference arclength `s`; menisci use their own
/// arclength from the contact point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    pub wet: Part,
    pub dry: Part,
    pub meniscus_left: Part,
    pub meniscus_right: Part,
    pub energy: EnergyBreakdown,
}

pub const PART_NAMES: [&str; 4] = ["wet", "dry", "meniscus_left", "meniscus_right"];

impl Profiles {
    pub fn parts(&self) -> [(&'static str, &Part); 4] {
        [
            (PART_NAMES[0], &self.wet),
            (PART_NAMES[1], &self.dry),
            (PART_NAMES[2], &self.meniscus_left),
            (PART_NAMES[3], &self.meniscus_right),
        ]
    }

    fn part_mut(&mut self, name: &str) -> Option<&mut Part> {
        match name {
            "wet" => Some(&mut self.wet),
            "dry" => Some(&mut self.dry),
            "meniscus_left" => Some(&mut self.meniscus_left),
            "meniscus_right" => Some(&mut self.meniscus_right),
            _ => None,
        }
    }

    /// Profiles of a limit solution, its sheet sampled with `n` intervals.
    pub fn from_limit(sol: &LimitSolution, n: usize) -> Result<Self> {
        let cfg = sol.sheet(n)?;
        let (wet, dry) = split_sheet(&cfg);
        let meniscus = |sigma: &[f64], pts: Vec<Point>| Part::thinned(sigma, &pts, MENISCUS_EXPORT_SAMPLES);
        Ok(Self {
            wet,
            dry,
            meniscus_left: meniscus(&sol.menisci[0].sigma, sol.left_meniscus_world()),
            meniscus_right: meniscus(&sol.menisci[1].sigma, sol.right_meniscus_world()),
            energy: sol.energy,
        })
    }

    /// Profiles of a thickness-`h` configuration. The menisci are the
    /// Laplace–Young graphs with the rescaled constants leaving the free end
    /// and the contact point.
    pub fn from_configuration(cfg: &Configuration, p: &DimensionlessParams) -> Result<Self> {
        let lim = p.rescaled();
        let (wet, dry) = split_sheet(cfg);
        let start = cfg.curve.start();
        let contact = cfg.contact_point();
        let graph = |at: Point, dir: f64| -> Result<Part> {
            let prof = solve_graph(at[1].max(0.0), lim.a_lg_star, lim.c_star)?;
            let pts: Vec<Point> = prof.samples.iter().map(|q| [at[0] + dir * q[0], q[1]]).collect();
            Ok(Part::thinned(&prof.sigma, &pts, MENISCUS_EXPORT_SAMPLES))
        };
        Ok(Self {
            wet,
            dry,
            meniscus_left: graph(start, -1.0)?,
            meniscus_right: graph(contact, 1.0)?,
            energy: energy_h(cfg, p)?,
        })
    }
}

/// Nodes with `s ≤ l` and `s ≥ l`, each closed by the contact point.
fn split_sheet(cfg: &Configuration) -> (Part, Part) {
    let (mut wet, mut dry) = (Part::default(), Part::default());
    let contact = cfg.contact_point();
    let l = cfg.l;
    for (&s, &p) in cfg.curve.s().iter().zip(cfg.curve.points()) {
        if s < l {
            wet.push(s, p);
        }
    }
    wet.push(l, contact);
    dry.push(l, contact);
    for (&s, &p) in cfg.curve.s().iter().zip(cfg.curve.points()) {
        if s > l {
            dry.push(s, p);
        }
    }
    (wet, dry)
}

/// Write `profiles` to `path` in the given format.
pub fn export_profiles(profiles: &Profiles, fmt: Format, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match fmt {
        Format::Csv => write_csv(profiles, &mut file)?,
        Format::Svg => file.write_all(render_svg(profiles).as_bytes())?,
        Format::Json => serde_json::to_writer_pretty(&mut file, profiles)?,
    }
    file.flush()?;
    Ok(())
}

/// Columns `part,s,x,y`, values with 17 significant digits.
pub fn write_csv<W: Write>(profiles: &Profiles, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["part", "s", "x", "y"])?;
    for (name, part) in profiles.parts() {
        for (s, p) in part.s.iter().zip(&part.points) {
            out.write_record([name.to_string(), fmt17(*s), fmt17(p[0]), fmt17(p[1])])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Read back the curves of a CSV export. The energy is not part of the
/// CSV and comes back as zero.
pub fn read_csv<R: std::io::Read>(r: R) -> Result<Profiles> {
    let mut out = Profiles {
        wet: Part::default(),
        dry: Part::default(),
        meniscus_left: Part::default(),
        meniscus_right: Part::default(),
        energy: EnergyBreakdown::default(),
    };
    let mut rdr = csv::Reader::from_reader(r);
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::InvalidCurve(format!("profile CSV row {}: {what}", row + 2));
        if rec.len() != 4 {
            return Err(bad("expected 4 columns"));
        }
        let num = |i: usize| rec[i].trim().parse::<f64>().map_err(|_| bad("unparsable number"));
        let (s, x, y) = (num(1)?, num(2)?, num(3)?);
        let part = out.part_mut(rec[0].trim()).ok_or_else(|| bad("unknown part"))?;
        part.push(s, [x, y]);
    }
    Ok(out)
}

pub fn read_json(path: &Path) -> Result<Profiles> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    Ok(serde_json::from_reader(file)?)
}

fn svg_coord(v: f64) -> String {
    // avoid "-0.000000" for values that round to zero
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

/// Static rendering in world units with `y` flipped; menisci are cut at the
/// edge of the drawing window.
pub fn render_svg(profiles: &Profiles) -> String {
    let [x0, x1, y0, y1] = VIEW;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="960" height="480">"#,
        x0,
        -y1,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        s,
        r##"<line class="waterline" x1="{x0}" y1="0" x2="{x1}" y2="0" stroke="#4a90d9" stroke-width="0.008"/>"##
    );
    let colours = ["#1f3a93", "#c0392b", "#2e8b57", "#2e8b57"];
    for ((name, part), colour) in profiles.parts().into_iter().zip(colours) {
        let pts: Vec<String> = part
            .points
            .iter()
            .filter(|p| p[0] >= x0 && p[0] <= x1)
            .map(|p| format!("{},{}", svg_coord(p[0]), svg_coord(-p[1])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{name}" points="{}" fill="none" stroke="{colour}" stroke-width="0.012"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
