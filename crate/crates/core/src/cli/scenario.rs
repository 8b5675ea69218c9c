//! Scenario files. TOML is the primary format; a `.json` extension selects
//! JSON with the same fields.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::Point;
use crate::gamma::PowerLaw;
use crate::model::{nondimensionalize_with, DimensionlessParams, LimitConstants, PhysicalParams};
use crate::solver::MinimizeOptions;
use crate::{Error, Result};

/// Seed used when a scenario does not set one.
pub const DEFAULT_SEED: u64 = 0x5EED_1EAF;

/// Smallest node count accepted for `E_h` solves.
pub const MIN_NODES: usize = 16;

/// The tasks a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SolveLimit,
    SolveH,
    Sweep,
    GammaCheck,
    Ly,
    Kink,
    RearrangeDemo,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::SolveLimit,
        Task::SolveH,
        Task::Sweep,
        Task::GammaCheck,
        Task::Ly,
        Task::Kink,
        Task::RearrangeDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::SolveLimit => "solve-limit",
            Task::SolveH => "solve-h",
            Task::Sweep => "sweep",
            Task::GammaCheck => "gamma-check",
            Task::Ly => "ly",
            Task::Kink => "kink",
            Task::RearrangeDemo => "rearrange-demo",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn working_h() -> f64 {
    0.05
}

/// Dimensional constants; the sheet length `l` sets the unit of length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub gamma_lg: f64,
    pub gamma_sg: f64,
    pub gamma_sl: f64,
    pub rho_l: f64,
    pub rho_s: f64,
    pub g: f64,
    pub e_mod: f64,
    pub h: f64,
    pub l: f64,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub eps_exp: f64,
}

/// Rescaled constants of the power-law family and the working thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessBlock {
    pub a_lg_star: f64,
    pub a_sg_star: f64,
    pub a_sl_star: f64,
    pub b_star: f64,
    pub c_star: f64,
    /// Thickness used by single `E_h` solves.
    #[serde(default = "working_h")]
    pub h: f64,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub eps_exp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub l_hops: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let m = MinimizeOptions::default();
        Self {
            nodes: 400,
            tol: m.tol,
            max_iter: m.max_iter,
            l_hops: m.l_hops,
        }
    }
}

impl SolverBlock {
    pub fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            l_hops: self.l_hops,
            ..MinimizeOptions::default()
        }
    }
}

/// Settings of the `kink` task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KinkBlock {
    /// Thicknesses at which the fillet crossover is located.
    pub h_values: Vec<f64>,
    /// Turning angle of the fillet, radians.
    pub turning: f64,
    pub e_mod: f64,
    pub gamma: f64,
    pub rho_g: f64,
    /// Height of the fillet's lowest point for the gravity expansion.
    pub y0: f64,
    /// Largest window half-width of the gravity fit.
    pub window: f64,
}

impl Default for KinkBlock {
    fn default() -> Self {
        Self {
            h_values: vec![1e-2, 1e-3],
            turning: std::f64::consts::FRAC_PI_3,
            e_mod: 1.0,
            gamma: 1.0,
            rho_g: 1.0,
            y0: 0.5,
            window: 0.1,
        }
    }
}

/// Settings of the `rearrange-demo` task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RearrangeBlock {
    /// Number of random piecewise-affine curves.
    pub curves: usize,
    /// Upper bound on the interior nodes of each curve.
    pub max_nodes: usize,
    /// Subdivision counts for the isometrization check.
    pub isometrize_n: Vec<usize>,
}

impl Default for RearrangeBlock {
    fn default() -> Self {
        Self {
            curves: 100,
            max_nodes: 12,
            isometrize_n: vec![4, 8, 16, 32],
        }
    }
}

fn default_sweep() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}

fn default_recovery() -> Vec<f64> {
    vec![0.05, 0.025, 0.0125, 0.00625]
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn all_tasks() -> Vec<Task> {
    Task::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionless: Option<DimensionlessBlock>,
    /// Anchor in units of the sheet length.
    pub anchor: Point,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default = "default_sweep")]
    pub h_sweep: Vec<f64>,
    #[serde(default = "default_recovery")]
    pub recovery_h: Vec<f64>,
    #[serde(default)]
    pub kink: KinkBlock,
    #[serde(default)]
    pub rearrange: RearrangeBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "all_tasks")]
    pub tasks: Vec<Task>,
}

/// What the tasks need from a scenario once its parameters are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub family: PowerLaw,
    /// Constants at the working thickness.
    pub params: DimensionlessParams,
    pub anchor: Point,
}

impl Scenario {
    /// `A_LG* = C* = 1`, `A_SG* = A_SL* = 0.3`, anchor `(0, 0.5)`.
    pub fn standard() -> Self {
        Self {
            name: "standard".into(),
            physical: None,
            dimensionless: Some(DimensionlessBlock {
                a_lg_star: 1.0,
                a_sg_star: 0.3,
                a_sl_star: 0.3,
                b_star: 0.01,
                c_star: 1.0,
                h: working_h(),
                alpha: half(),
                eps_exp: one(),
            }),
            anchor: [0.0, 0.5],
            solver: SolverBlock::default(),
            h_sweep: default_sweep(),
            recovery_h: default_recovery(),
            kink: KinkBlock::default(),
            rearrange: RearrangeBlock::default(),
            out: None,
            seed: DEFAULT_SEED,
            tasks: all_tasks(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Read a scenario; `.json` files are parsed as JSON, anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        };
        parsed.map_err(|e| match e {
            Error::Scenario(m) => Error::Scenario(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        match (&self.physical, &self.dimensionless) {
            (Some(_), Some(_)) => return bad("give exactly one of `physical` and `dimensionless`, not both".into()),
            (None, None) => return bad("missing parameter block: give `physical` or `dimensionless`".into()),
            _ => {}
        }
        if !self.anchor.iter().all(|v| v.is_finite()) {
            return bad("field `anchor` must be finite".into());
        }
        if self.solver.nodes < MIN_NODES {
            return bad(format!("field `solver.nodes` must be at least {MIN_NODES}, got {}", self.solver.nodes));
        }
        let in_unit = |v: &f64| *v > 0.0 && *v < 1.0;
        for (field, list) in [("h_sweep", &self.h_sweep), ("recovery_h", &self.recovery_h)] {
            if let Some(v) = list.iter().find(|v| !in_unit(v)) {
                return bad(format!("field `{field}` has {v} outside (0, 1)"));
            }
        }
        if let Some(d) = &self.dimensionless {
            if !in_unit(&d.h) {
                return bad(format!("field `dimensionless.h` is {} outside (0, 1)", d.h));
            }
        }
        if let Some(v) = self.kink.h_values.iter().find(|v| !in_unit(v)) {
            return bad(format!("field `kink.h_values` has {v} outside (0, 1)"));
        }
        self.setup().map(|_| ())
    }

    /// Resolve the parameter block into the power-law family and the
    /// constants at the working thickness.
    pub fn setup(&self) -> Result<Setup> {
        let (family, params) = if let Some(d) = &self.dimensionless {
            let limit = LimitConstants {
                a_lg_star: d.a_lg_star,
                a_sg_star: d.a_sg_star,
                a_sl_star: d.a_sl_star,
                b_star: d.b_star,
                c_star: d.c_star,
            };
            limit.validate()?;
            let family = PowerLaw {
                limit,
                alpha: d.alpha,
                eps_exp: d.eps_exp,
            };
            (family, family.params(d.h))
        } else if let Some(p) = &self.physical {
            let phys = PhysicalParams {
                gamma_lg: p.gamma_lg,
                gamma_sg: p.gamma_sg,
                gamma_sl: p.gamma_sl,
                rho_l: p.rho_l,
                rho_s: p.rho_s,
                g: p.g,
                e_mod: p.e_mod,
                h: p.h,
                l: p.l,
                anchor_x: self.anchor[0] * p.l,
                anchor_y: self.anchor[1] * p.l,
            };
            let params = nondimensionalize_with(&phys, p.alpha, p.eps_exp)?;
            let family = PowerLaw {
                limit: params.rescaled(),
                alpha: p.alpha,
                eps_exp: p.eps_exp,
            };
            (family, params)
        } else {
            return Err(Error::Scenario("missing parameter block".into()));
        };
        params.validate()?;
        Ok(Setup {
            family,
            params,
            anchor: self.anchor,
        })
    }
}
