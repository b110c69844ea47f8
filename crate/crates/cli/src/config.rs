//! Run configuration: the JSON schema, flag overrides and resolution into a
//! concrete [`Plan`] with every default filled in.

use std::path::{Path, PathBuf};

use dpsbp::analysis::experiments::{
    default_hv_order, lake_perturbed_t_end, EigenSetup, JetRun, Mms1dRun, Mms2dRun, VortexRun, DEFAULT_RAMP,
};
use dpsbp::analysis::mms::MmsFlux;
use dpsbp::operators::{parse_operator, shipped, Family};
use dpsbp::swe1d::BcKind;
use dpsbp::HvOrder;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Mms1d,
    Mms2d,
    LakeAtRest,
    LakePerturbed,
    DamBreak,
    MergingVortex,
    BarotropicJet,
    Eigenspectrum,
    OperatorReport,
    Convergence,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Mms1d,
        Experiment::Mms2d,
        Experiment::LakeAtRest,
        Experiment::LakePerturbed,
        Experiment::DamBreak,
        Experiment::MergingVortex,
        Experiment::BarotropicJet,
        Experiment::Eigenspectrum,
        Experiment::OperatorReport,
        Experiment::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Mms1d => "mms1d",
            Experiment::Mms2d => "mms2d",
            Experiment::LakeAtRest => "lake_at_rest",
            Experiment::LakePerturbed => "lake_perturbed",
            Experiment::DamBreak => "dam_break",
            Experiment::MergingVortex => "merging_vortex",
            Experiment::BarotropicJet => "barotropic_jet",
            Experiment::Eigenspectrum => "eigenspectrum",
            Experiment::OperatorReport => "operator_report",
            Experiment::Convergence => "convergence",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Mms1d => "1D manufactured solution with mass-flux boundaries; convergence table over grid.sizes",
            Experiment::Mms2d => "2D periodic manufactured solution; convergence table over grid.sizes",
            Experiment::LakeAtRest => "periodic lake at rest over a parabolic bump; velocity stays at round-off",
            Experiment::LakePerturbed => "perturbed lake with nonlinear transmissive boundaries; convergence to rest",
            Experiment::DamBreak => "wet dam break against the exact Riemann solution",
            Experiment::MergingVortex => "two co-rotating Gaussian vortices on a periodic square; invariant drift",
            Experiment::BarotropicJet => "perturbed double shear jet; invariant drift and kinetic-energy spectrum",
            Experiment::Eigenspectrum => "eigenvalues of the 1D semi-discrete evolution operator",
            Experiment::OperatorReport => "SBP invariant suite for one or all shipped operator pairs",
            Experiment::Convergence => "named convergence suite (table1: DP order 4, linear and nonlinear MMS)",
        }
    }

    /// The configurable keys; anything else supplied is rejected.
    fn allowed(self) -> &'static [&'static str] {
        match self {
            Experiment::Mms1d => &[
                "operator", "grid.n", "grid.sizes", "physics.g", "physics.U", "physics.H", "nonlinear",
                "hv.order", "hv.delta", "hv.ramp", "time.cfl", "time.t_end",
            ],
            Experiment::Mms2d => &[
                "operator", "grid.n", "grid.sizes", "physics.g", "physics.f_c", "hv.order", "hv.delta",
                "hv.ramp", "time.cfl", "time.t_end",
            ],
            Experiment::LakeAtRest => &["operator", "grid.n", "time.cfl", "time.t_end", "time.sample_stride"],
            Experiment::LakePerturbed => &["operator", "grid.n", "grid.sizes", "time.cfl", "time.t_end"],
            Experiment::DamBreak => &["operator", "grid.n", "hv.order", "hv.delta", "hv.ramp", "time.cfl", "time.n_steps"],
            Experiment::MergingVortex | Experiment::BarotropicJet => &[
                "operator", "grid.n", "physics.g", "physics.f_c", "physics.H", "hv.order", "hv.delta",
                "hv.ramp", "time.cfl", "time.t_end", "time.sample_stride",
            ],
            Experiment::Eigenspectrum => &[
                "operator", "grid.n", "grid.length", "physics.g", "physics.U", "physics.H", "bc", "nonlinear",
                "hv.order", "hv.delta", "hv.ramp",
            ],
            Experiment::OperatorReport => &["operator", "grid.n"],
            Experiment::Convergence => &["suite"],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub family: String,
    pub order: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Option<usize>,
    /// Refinement sequence for convergence runs; overrides `n`.
    pub sizes: Option<Vec<usize>>,
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    pub g: Option<f64>,
    pub f_c: Option<f64>,
    #[serde(rename = "U")]
    pub u_mean: Option<f64>,
    #[serde(rename = "H")]
    pub h_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvSpec {
    pub order: Option<usize>,
    pub delta: Option<f64>,
    pub ramp: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub n_steps: Option<usize>,
    pub sample_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub operator: Option<OperatorSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub physics: PhysicsSpec,
    /// Uniform boundary kind (eigenspectrum only).
    pub bc: Option<BcKind>,
    pub nonlinear: Option<bool>,
    #[serde(default)]
    pub hv: HvSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub suite: Option<String>,
    pub output_dir: Option<PathBuf>,
}

/// Why a configuration was rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigError {
    pub missing: Vec<String>,
    pub problems: Vec<String>,
}

impl ConfigError {
    pub fn problem(msg: impl Into<String>) -> Self {
        Self {
            missing: Vec::new(),
            problems: vec![msg.into()],
        }
    }

    pub fn message(&self) -> String {
        let mut parts = Vec::new();
        if !self.missing.is_empty() {
            parts.push(format!("missing fields: {}", self.missing.join(", ")));
        }
        parts.extend(self.problems.iter().cloned());
        parts.join("; ")
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::problem(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::problem(format!("config: {e}")))
    }

    /// Keys that were supplied, in `section.key` form.
    fn supplied(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut add = |present: bool, key: &'static str| {
            if present {
                v.push(key);
            }
        };
        add(self.operator.is_some(), "operator");
        add(self.grid.n.is_some(), "grid.n");
        add(self.grid.sizes.is_some(), "grid.sizes");
        add(self.grid.length.is_some(), "grid.length");
        add(self.physics.g.is_some(), "physics.g");
        add(self.physics.f_c.is_some(), "physics.f_c");
        add(self.physics.u_mean.is_some(), "physics.U");
        add(self.physics.h_mean.is_some(), "physics.H");
        add(self.bc.is_some(), "bc");
        add(self.nonlinear.is_some(), "nonlinear");
        add(self.hv.order.is_some(), "hv.order");
        add(self.hv.delta.is_some(), "hv.delta");
        add(self.hv.ramp.is_some(), "hv.ramp");
        add(self.time.cfl.is_some(), "time.cfl");
        add(self.time.t_end.is_some(), "time.t_end");
        add(self.time.n_steps.is_some(), "time.n_steps");
        add(self.time.sample_stride.is_some(), "time.sample_stride");
        add(self.suite.is_some(), "suite");
        v
    }
}

/// A fully resolved run; serialised verbatim into the run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Plan {
    Mms1d { run: Mms1dRun, sizes: Vec<usize> },
    Mms2d { run: Mms2dRun, sizes: Vec<usize> },
    LakeAtRest { family: Family, order: usize, n: usize, cfl: f64, t_end: f64, sample_stride: usize },
    LakePerturbed { family: Family, order: usize, sizes: Vec<usize>, cfl: f64, t_end: f64 },
    DamBreak { family: Family, order: usize, n: usize, delta: f64, cfl: f64, n_steps: usize },
    MergingVortex { run: VortexRun },
    BarotropicJet { run: JetRun },
    Eigenspectrum { setup: EigenSetup, nonlinear: bool, eps: f64 },
    OperatorReport { operators: Vec<(Family, usize, bool)>, n: usize },
    Convergence { suite: String, runs: Vec<(String, Mms1dRun)>, sizes: Vec<usize> },
}

impl Plan {
    pub fn experiment(&self) -> Experiment {
        match self {
            Plan::Mms1d { .. } => Experiment::Mms1d,
            Plan::Mms2d { .. } => Experiment::Mms2d,
            Plan::LakeAtRest { .. } => Experiment::LakeAtRest,
            Plan::LakePerturbed { .. } => Experiment::LakePerturbed,
            Plan::DamBreak { .. } => Experiment::DamBreak,
            Plan::MergingVortex { .. } => Experiment::MergingVortex,
            Plan::BarotropicJet { .. } => Experiment::BarotropicJet,
            Plan::Eigenspectrum { .. } => Experiment::Eigenspectrum,
            Plan::OperatorReport { .. } => Experiment::OperatorReport,
            Plan::Convergence { .. } => Experiment::Convergence,
        }
    }

    /// `dp6`-style label, or `all` / the suite name.
    pub fn operator_label(&self) -> String {
        let label = |f: &Family, o: &usize| format!("{}{o}", f.name());
        match self {
            Plan::Mms1d { run, .. } => label(&run.family, &run.order),
            Plan::Mms2d { run, .. } => label(&run.family, &run.order),
            Plan::LakeAtRest { family, order, .. }
            | Plan::LakePerturbed { family, order, .. }
            | Plan::DamBreak { family, order, .. } => label(family, order),
            Plan::MergingVortex { run } => label(&run.family, &run.order),
            Plan::BarotropicJet { run } => label(&run.family, &run.order),
            Plan::Eigenspectrum { setup, .. } => label(&setup.family, &setup.order),
            Plan::OperatorReport { operators, .. } if operators.len() == 2 => label(&operators[0].0, &operators[0].1),
            Plan::OperatorReport { .. } => "all".into(),
            Plan::Convergence { suite, .. } => suite.clone(),
        }
    }
}

/// Output directory: explicit value, else `$SWE_OUT_DIR/<experiment>`, else
/// `runs/<experiment>`.
pub fn output_dir(explicit: Option<&Path>, env_root: Option<&Path>, experiment: Experiment) -> PathBuf {
    match (explicit, env_root) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(root)) => root.join(experiment.name()),
        (None, None) => Path::new("runs").join(experiment.name()),
    }
}

struct Checker {
    err: ConfigError,
}

impl Checker {
    fn positive(&mut self, key: &str, v: Option<f64>) {
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                self.err.problems.push(format!("{key} must be positive and finite, got {x}"));
            }
        }
    }

    fn non_negative(&mut self, key: &str, v: Option<f64>) {
        if let Some(x) = v {
            if !(x >= 0.0 && x.is_finite()) {
                self.err.problems.push(format!("{key} must be >= 0 and finite, got {x}"));
            }
        }
    }
}

fn hv_order_value(o: HvOrder) -> usize {
    match o {
        HvOrder::Four => 4,
        HvOrder::Six => 6,
    }
}

/// Schema and precondition check; returns the plan without running anything.
pub fn resolve(cfg: &RunConfig) -> Result<Plan, ConfigError> {
    let mut c = Checker { err: ConfigError::default() };
    let Some(exp) = cfg.experiment else {
        c.err.missing.push("experiment".into());
        if cfg.operator.is_none() {
            c.err.missing.push("operator".into());
        }
        if cfg.grid.n.is_none() && cfg.grid.sizes.is_none() {
            c.err.missing.push("grid.n".into());
        }
        return Err(c.err);
    };

    for key in cfg.supplied() {
        if !exp.allowed().contains(&key) {
            c.err.problems.push(format!("{key} is not configurable for {}", exp.name()));
        }
    }

    // operator
    let needs_operator = !matches!(exp, Experiment::OperatorReport | Experiment::Convergence);
    let operator = match &cfg.operator {
        Some(spec) => match parse_operator(&format!("{}{}", spec.family, spec.order)) {
            Ok((f, o)) => {
                let periodic = matches!(
                    exp,
                    Experiment::LakeAtRest | Experiment::Mms2d | Experiment::MergingVortex | Experiment::BarotropicJet
                );
                if !shipped().contains(&(f, o, periodic)) {
                    c.err.problems.push(format!(
                        "operator {}{} is not shipped for {} grids",
                        spec.family,
                        spec.order,
                        if periodic { "periodic" } else { "bounded" }
                    ));
                }
                Some((f, o))
            }
            Err(e) => {
                c.err.problems.push(e.to_string());
                None
            }
        },
        None => {
            if needs_operator {
                c.err.missing.push("operator".into());
            }
            None
        }
    };

    // grid
    let sizes: Option<Vec<usize>> = cfg.grid.sizes.clone().or(cfg.grid.n.map(|n| vec![n]));
    let needs_grid = !matches!(exp, Experiment::OperatorReport | Experiment::Convergence);
    if needs_grid && sizes.is_none() {
        c.err.missing.push("grid.n".into());
    }
    if let Some(s) = &sizes {
        if s.is_empty() {
            c.err.problems.push("grid.sizes must not be empty".into());
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            c.err.problems.push("grid.sizes must be strictly increasing".into());
        }
        if s.iter().any(|&n| n < 8) {
            c.err.problems.push("grid sizes must be at least 8".into());
        }
    }
    if let Some(n) = cfg.grid.n {
        if n < 8 {
            c.err.problems.push(format!("grid.n must be at least 8, got {n}"));
        }
    }
    c.positive("grid.length", cfg.grid.length);

    // physics and time
    c.positive("physics.g", cfg.physics.g);
    c.positive("physics.H", cfg.physics.h_mean);
    c.non_negative("physics.f_c", cfg.physics.f_c);
    if let Some(u) = cfg.physics.u_mean {
        if !u.is_finite() {
            c.err.problems.push(format!("physics.U must be finite, got {u}"));
        }
    }
    c.positive("time.cfl", cfg.time.cfl);
    c.non_negative("time.t_end", cfg.time.t_end);
    if cfg.time.sample_stride == Some(0) {
        c.err.problems.push("time.sample_stride must be >= 1".into());
    }
    if cfg.time.n_steps == Some(0) {
        c.err.problems.push("time.n_steps must be >= 1".into());
    }

    // hyper-viscosity: only the order-matched operator and the default ramp
    c.non_negative("hv.delta", cfg.hv.delta);
    if let (Some(want), Some((_, o))) = (cfg.hv.order, operator) {
        let have = hv_order_value(default_hv_order(o));
        if want != have {
            c.err.problems.push(format!(
                "hv.order {want} is not available with an order-{o} operator (uses order {have})"
            ));
        }
    }
    if let Some(r) = cfg.hv.ramp {
        if r != DEFAULT_RAMP {
            c.err.problems.push(format!("hv.ramp must be {DEFAULT_RAMP}, got {r}"));
        }
    }

    let nonlinear = cfg.nonlinear.unwrap_or(true);
    if nonlinear && matches!(exp, Experiment::Mms1d) && (cfg.physics.u_mean.is_some() || cfg.physics.h_mean.is_some()) {
        c.err.problems.push("physics.U / physics.H set the linear flux; set \"nonlinear\": false".into());
    }

    if exp == Experiment::Eigenspectrum {
        if cfg.bc.is_none() {
            c.err.missing.push("bc".into());
        }
        if cfg.bc == Some(BcKind::Periodic) {
            c.err.problems.push("bc must be mass_flux, velocity_flux or transmissive".into());
        }
    }
    if exp == Experiment::Convergence {
        match cfg.suite.as_deref() {
            None => c.err.missing.push("suite".into()),
            Some("table1") => {}
            Some(s) => c.err.problems.push(format!("unknown suite '{s}' (available: table1)")),
        }
    }

    // subcritical precondition for the linear background
    let linear_means = match exp {
        Experiment::Mms1d if !nonlinear => Some((cfg.physics.g.unwrap_or(9.81), 0.0, 10.0)),
        Experiment::Eigenspectrum => Some((cfg.physics.g.unwrap_or(1.0), 0.0, 1.0)),
        _ => None,
    };
    if let Some((g, u0, h0)) = linear_means {
        let u = cfg.physics.u_mean.unwrap_or(u0);
        let h = cfg.physics.h_mean.unwrap_or(h0);
        let celerity = (g * h).sqrt();
        if u.abs() >= celerity {
            c.err.problems.push(format!(
                "the linear means must be subcritical, |U| < sqrt(gH): |U| = {}, sqrt(gH) = {celerity}",
                u.abs()
            ));
        }
    }

    if !c.err.missing.is_empty() || !c.err.problems.is_empty() {
        return Err(c.err);
    }

    let (family, order) = operator.unwrap_or((Family::DP, 4));
    let sizes = sizes.unwrap_or_default();
    let n = sizes.last().copied().unwrap_or(0);
    let t = &cfg.time;
    let plan = match exp {
        Experiment::Mms1d => {
            let mut run = Mms1dRun::new(family, order, n, nonlinear);
            if let Some(g) = cfg.physics.g {
                run.params.g = g;
                run.params.speed = (g * run.params.offset).sqrt();
            }
            if !nonlinear {
                run.flux = MmsFlux::Linear {
                    u_mean: cfg.physics.u_mean.unwrap_or(0.0),
                    h_mean: cfg.physics.h_mean.unwrap_or(run.params.offset),
                };
            }
            run.delta = cfg.hv.delta.unwrap_or(0.0);
            run.cfl = t.cfl.unwrap_or(run.cfl);
            run.t_end = t.t_end.unwrap_or(run.t_end);
            Plan::Mms1d { run, sizes }
        }
        Experiment::Mms2d => {
            let mut run = Mms2dRun::new(family, order, n);
            run.params.g = cfg.physics.g.unwrap_or(run.params.g);
            run.params.f_c = cfg.physics.f_c.unwrap_or(run.params.f_c);
            run.delta = cfg.hv.delta.unwrap_or(run.delta);
            run.cfl = t.cfl.unwrap_or(run.cfl);
            run.t_end = t.t_end.unwrap_or(run.t_end);
            Plan::Mms2d { run, sizes }
        }
        Experiment::LakeAtRest => Plan::LakeAtRest {
            family,
            order,
            n,
            cfl: t.cfl.unwrap_or(0.3),
            t_end: t.t_end.unwrap_or(5.0),
            sample_stride: t.sample_stride.unwrap_or(100),
        },
        Experiment::LakePerturbed => Plan::LakePerturbed {
            family,
            order,
            sizes,
            cfl: t.cfl.unwrap_or(0.3),
            t_end: t.t_end.unwrap_or_else(lake_perturbed_t_end),
        },
        Experiment::DamBreak => Plan::DamBreak {
            family,
            order,
            n,
            delta: cfg.hv.delta.unwrap_or(0.1),
            cfl: t.cfl.unwrap_or(0.15),
            n_steps: t.n_steps.unwrap_or(1000),
        },
        Experiment::MergingVortex => {
            let mut run = VortexRun::new(family, order, n, cfg.hv.delta.unwrap_or(0.5), t.t_end.unwrap_or(1.0));
            run.params.g = cfg.physics.g.unwrap_or(run.params.g);
            run.params.f_c = cfg.physics.f_c.unwrap_or(run.params.f_c);
            run.params.h_mean = cfg.physics.h_mean.unwrap_or(run.params.h_mean);
            run.cfl = t.cfl.unwrap_or(run.cfl);
            run.stride = t.sample_stride.unwrap_or(run.stride);
            Plan::MergingVortex { run }
        }
        Experiment::BarotropicJet => {
            let mut run = JetRun::new(family, order, n, t.t_end.unwrap_or(0.5 * 86400.0));
            run.params.g = cfg.physics.g.unwrap_or(run.params.g);
            run.params.f_c = cfg.physics.f_c.unwrap_or(run.params.f_c);
            run.params.h_mean = cfg.physics.h_mean.unwrap_or(run.params.h_mean);
            run.delta = cfg.hv.delta.unwrap_or(run.delta);
            run.cfl = t.cfl.unwrap_or(run.cfl);
            run.stride = t.sample_stride.unwrap_or(run.stride);
            Plan::BarotropicJet { run }
        }
        Experiment::Eigenspectrum => {
            let mut setup = EigenSetup::new(family, order, n, cfg.bc.unwrap_or(BcKind::MassFlux), cfg.hv.delta.unwrap_or(0.0));
            setup.length = cfg.grid.length.unwrap_or(setup.length);
            setup.g = cfg.physics.g.unwrap_or(setup.g);
            setup.u_mean = cfg.physics.u_mean.unwrap_or(setup.u_mean);
            setup.h_mean = cfg.physics.h_mean.unwrap_or(setup.h_mean);
            Plan::Eigenspectrum {
                setup,
                nonlinear: cfg.nonlinear.unwrap_or(false),
                eps: 1e-6,
            }
        }
        Experiment::OperatorReport => {
            let operators = match operator {
                Some((f, o)) => vec![(f, o, false), (f, o, true)],
                None => shipped(),
            };
            Plan::OperatorReport {
                operators,
                n: cfg.grid.n.unwrap_or(64),
            }
        }
        Experiment::Convergence => {
            let runs = vec![
                ("dp4_linear".to_string(), Mms1dRun::new(Family::DP, 4, 0, false)),
                ("dp4_nonlinear".to_string(), Mms1dRun::new(Family::DP, 4, 0, true)),
            ];
            Plan::Convergence {
                suite: "table1".into(),
                runs,
                sizes: vec![41, 81, 161, 321, 641],
            }
        }
    };
    Ok(plan)
}
