//! Experiment configuration: flat `key = value` files and named presets.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::ct::{default_rays, TomoGeometry};
use crate::engine::{EpsSchedule, InnerFailurePolicy, Mode, SolverConfig, ValidationInputs};
use crate::error::{Error, Result};
use crate::penalty::{Constraint, Penalty, PenaltyKind};

pub const PRESETS: [&str; 4] = ["ct-paper", "ct-desk", "pde-paper", "pde-desk"];

/// Every key accepted in a config file.
pub const KEYS: [&str; 40] = [
    "preset",
    "name",
    "problem",
    "ct.size",
    "ct.angles",
    "ct.angle_start",
    "ct.angle_span",
    "ct.rays",
    "ct.spacing",
    "pde.m",
    "linear.matrix",
    "linear.data",
    "linear.truth",
    "linear.rows",
    "linear.cols",
    "linear.delta",
    "penalty",
    "mu",
    "constraint",
    "box.lo",
    "box.hi",
    "p",
    "s",
    "beta0",
    "beta1",
    "sigma",
    "tau",
    "alpha",
    "eta0",
    "gap_exponent",
    "eps_floor",
    "n_max",
    "blocks",
    "inner_max_iter",
    "on_inner_failure",
    "mode",
    "noise_level",
    "seed",
    "metric_every",
    "gamma",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CtSpec {
    pub size: usize,
    pub angles: usize,
    pub angle_start: f64,
    pub angle_span: f64,
    pub rays: Option<usize>,
    pub spacing: f64,
}

impl CtSpec {
    pub fn geometry(&self) -> TomoGeometry {
        let mut g = TomoGeometry::evenly_spaced(self.size, self.angles, self.angle_start, self.angle_span);
        g.rays_per_angle = self.rays.unwrap_or_else(|| default_rays(self.size));
        g.detector_spacing = self.spacing;
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSpec {
    pub matrix: PathBuf,
    pub data: PathBuf,
    pub truth: Option<PathBuf>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    /// Noise level of the supplied data.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Ct(CtSpec),
    Pde { m: usize },
    CustomLinear(LinearSpec),
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::Ct(_) => "ct",
            ProblemSpec::Pde { .. } => "pde",
            ProblemSpec::CustomLinear(_) => "custom-linear",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub penalty: Penalty,
    pub solver: SolverConfig,
    pub mode: Mode,
    /// Relative noise added to synthesized data; 0 for exact data.
    pub noise_level: f64,
    pub seed: u64,
    /// Write every k-th record to metrics.csv (the last one always).
    pub metric_every: usize,
    /// Tangential cone constant for the admissibility report.
    pub gamma: Option<f64>,
}

fn ct_paper() -> ExperimentConfig {
    let mu = 1.0;
    ExperimentConfig {
        name: "ct-paper".into(),
        problem: ProblemSpec::Ct(CtSpec {
            size: 256,
            angles: 45,
            angle_start: 1.0,
            angle_span: 180.0,
            rays: Some(367),
            spacing: 1.0,
        }),
        penalty: Penalty::quadratic_tv(mu, Some(Constraint::NonNegative)),
        solver: SolverConfig {
            beta0: 0.1 / mu,
            beta1: 10.0,
            sigma: 0.001,
            tau: 1.01,
            alpha: 5.0,
            eps: EpsSchedule::new(2.2),
            ..SolverConfig::default()
        },
        mode: Mode::Plain,
        noise_level: 0.01,
        seed: 1,
        metric_every: 1,
        gamma: Some(0.0),
    }
}

fn pde_paper() -> ExperimentConfig {
    let mu = 20.0;
    ExperimentConfig {
        name: "pde-paper".into(),
        problem: ProblemSpec::Pde { m: 100 },
        penalty: Penalty::quadratic_tv(mu, None),
        solver: SolverConfig {
            beta0: 0.01 / mu,
            beta1: 2e4,
            sigma: 0.001,
            tau: 1.02,
            alpha: 5.0,
            eps: EpsSchedule::new(1.5),
            ..SolverConfig::default()
        },
        mode: Mode::Plain,
        noise_level: 0.46e-3,
        seed: 1,
        metric_every: 1,
        gamma: None,
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut cfg = match name {
        "ct-paper" => ct_paper(),
        "ct-desk" => {
            let mut c = ct_paper();
            c.problem = ProblemSpec::Ct(CtSpec {
                size: 64,
                angles: 30,
                angle_start: 0.0,
                angle_span: 180.0,
                rays: None,
                spacing: 1.0,
            });
            c
        }
        "pde-paper" => pde_paper(),
        "pde-desk" => {
            let mut c = pde_paper();
            c.problem = ProblemSpec::Pde { m: 40 };
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?} (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    cfg.name = name.to_string();
    Ok(cfg)
}

/// Defaults for a config file that names a problem but no preset.
fn base_for_problem(problem: &str) -> Result<ExperimentConfig> {
    match problem {
        "ct" => preset("ct-desk"),
        "pde" => preset("pde-desk"),
        "custom-linear" => {
            let mut c = preset("ct-desk")?;
            c.name = "custom-linear".into();
            c.penalty = Penalty::quadratic(1.0, None);
            c.noise_level = 0.0;
            c.problem = ProblemSpec::CustomLinear(LinearSpec {
                matrix: PathBuf::new(),
                data: PathBuf::new(),
                truth: None,
                rows: None,
                cols: None,
                delta: 0.0,
            });
            Ok(c)
        }
        other => Err(Error::Config(format!(
            "unknown problem {other:?} (expected ct, pde or custom-linear)"
        ))),
    }
}

/// Key/value pairs with line numbers, in file order.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    origin: PathBuf,
    entries: Vec<(String, String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries: Vec<(String, String, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line,
                message,
            };
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(format!("unknown key {k:?}")));
            }
            if v.is_empty() {
                return Err(err(format!("missing value for {k:?}")));
            }
            if let Some((_, _, first)) = entries.iter().find(|(key, _, _)| key == k) {
                return Err(err(format!("duplicate key {k:?} (first set on line {first})")));
            }
            entries.push((k.to_string(), v.to_string(), line));
        }
        Ok(RawConfig {
            origin: origin.to_path_buf(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str())
    }

    /// Build a config on top of `preset_override` (from the command line),
    /// the file's own `preset`, or the defaults for its `problem`.
    pub fn resolve(&self, preset_override: Option<&str>) -> Result<ExperimentConfig> {
        let mut cfg = match (preset_override, self.get("preset"), self.get("problem")) {
            (Some(p), _, _) | (None, Some(p), _) => preset(p)?,
            (None, None, Some(problem)) => base_for_problem(problem)?,
            (None, None, None) => preset("ct-desk")?,
        };
        if let Some(problem) = self.get("problem") {
            if problem != cfg.problem.kind() {
                cfg = ExperimentConfig {
                    problem: base_for_problem(problem)?.problem,
                    ..cfg
                };
            }
        }
        let base_dir = self.origin.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut box_lo = None;
        let mut box_hi = None;
        let mut constraint = None;
        for (key, value, line) in &self.entries {
            apply(&mut cfg, key, value, &base_dir, &mut box_lo, &mut box_hi, &mut constraint).map_err(|message| {
                Error::Parse {
                    path: self.origin.clone(),
                    line: *line,
                    message,
                }
            })?;
        }
        match constraint.as_deref() {
            None => {}
            Some("none") => cfg.penalty.constraint = None,
            Some("nonnegative") => cfg.penalty.constraint = Some(Constraint::NonNegative),
            Some("box") => {
                let lo = box_lo.ok_or_else(|| Error::Config("constraint = box needs box.lo".into()))?;
                let hi = box_hi.ok_or_else(|| Error::Config("constraint = box needs box.hi".into()))?;
                cfg.penalty.constraint = Some(
                    Constraint::new_box(lo, hi)
                        .ok_or_else(|| Error::Config(format!("box [{lo}, {hi}] must contain 0")))?,
                );
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown constraint {other:?} (expected none, nonnegative or box)"
                )))
            }
        }
        if constraint.as_deref() != Some("box") && (box_lo.is_some() || box_hi.is_some()) {
            return Err(Error::Config("box.lo/box.hi given without constraint = box".into()));
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key:?}"))
}

fn resolve_path(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

#[allow(clippy::too_many_arguments)]
fn apply(
    cfg: &mut ExperimentConfig,
    key: &str,
    value: &str,
    base_dir: &Path,
    box_lo: &mut Option<f64>,
    box_hi: &mut Option<f64>,
    constraint: &mut Option<String>,
) -> std::result::Result<(), String> {
    let kind = cfg.problem.kind();
    let wrong_problem = || format!("{key:?} does not apply to problem {kind}");
    match key {
        "preset" | "problem" => {}
        "name" => cfg.name = value.to_string(),
        k if k.starts_with("ct.") => {
            let ProblemSpec::Ct(ct) = &mut cfg.problem else {
                return Err(wrong_problem());
            };
            match k {
                "ct.size" => ct.size = num(k, value)?,
                "ct.angles" => ct.angles = num(k, value)?,
                "ct.angle_start" => ct.angle_start = num(k, value)?,
                "ct.angle_span" => ct.angle_span = num(k, value)?,
                "ct.rays" => ct.rays = Some(num(k, value)?),
                "ct.spacing" => ct.spacing = num(k, value)?,
                _ => unreachable!(),
            }
        }
        "pde.m" => {
            let ProblemSpec::Pde { m } = &mut cfg.problem else {
                return Err(wrong_problem());
            };
            *m = num(key, value)?;
        }
        k if k.starts_with("linear.") => {
            let ProblemSpec::CustomLinear(lin) = &mut cfg.problem else {
                return Err(wrong_problem());
            };
            match k {
                "linear.matrix" => lin.matrix = resolve_path(base_dir, value),
                "linear.data" => lin.data = resolve_path(base_dir, value),
                "linear.truth" => lin.truth = Some(resolve_path(base_dir, value)),
                "linear.rows" => lin.rows = Some(num(k, value)?),
                "linear.cols" => lin.cols = Some(num(k, value)?),
                "linear.delta" => lin.delta = num(k, value)?,
                _ => unreachable!(),
            }
        }
        "penalty" => {
            cfg.penalty.kind = match value {
                "quadratic" => PenaltyKind::Quadratic,
                "quadratic-tv" => PenaltyKind::QuadraticTv,
                _ => return Err(format!("unknown penalty {value:?} (expected quadratic or quadratic-tv)")),
            }
        }
        "mu" => cfg.penalty.mu = num(key, value)?,
        "constraint" => *constraint = Some(value.to_string()),
        "box.lo" => *box_lo = Some(num(key, value)?),
        "box.hi" => *box_hi = Some(num(key, value)?),
        "p" => cfg.solver.p = num(key, value)?,
        "s" => cfg.solver.s = num(key, value)?,
        "beta0" => cfg.solver.beta0 = num(key, value)?,
        "beta1" => cfg.solver.beta1 = num(key, value)?,
        "sigma" => cfg.solver.sigma = num(key, value)?,
        "tau" => cfg.solver.tau = num(key, value)?,
        "alpha" => cfg.solver.alpha = num(key, value)?,
        "eta0" => cfg.solver.eps.eta0 = num(key, value)?,
        "gap_exponent" => cfg.solver.eps.exponent = num(key, value)?,
        "eps_floor" => cfg.solver.eps.floor = num(key, value)?,
        "n_max" => cfg.solver.n_max = num(key, value)?,
        "blocks" => cfg.solver.blocks = num(key, value)?,
        "inner_max_iter" => cfg.solver.inner_max_iter = num(key, value)?,
        "on_inner_failure" => {
            cfg.solver.on_inner_failure = match value {
                "abort" => InnerFailurePolicy::Abort,
                "accept" => InnerFailurePolicy::Accept,
                _ => return Err(format!("unknown policy {value:?} (expected abort or accept)")),
            }
        }
        "mode" => {
            cfg.mode = match value {
                "plain" => Mode::Plain,
                "accelerated" => Mode::Accelerated,
                _ => return Err(format!("unknown mode {value:?} (expected plain or accelerated)")),
            }
        }
        "noise_level" => cfg.noise_level = num(key, value)?,
        "seed" => cfg.seed = num(key, value)?,
        "metric_every" => cfg.metric_every = num(key, value)?,
        "gamma" => cfg.gamma = Some(num(key, value)?),
        _ => return Err(format!("unknown key {key:?}")),
    }
    Ok(())
}

impl ExperimentConfig {
    /// Range checks beyond the solver's own.
    pub fn check(&self) -> Result<()> {
        self.solver.check()?;
        let bad = |m: String| Err(Error::Config(m));
        if !(self.penalty.mu > 0.0) || !self.penalty.mu.is_finite() {
            return bad("mu must be positive".into());
        }
        if self.penalty.p() != self.solver.p {
            return bad(format!("p = {} but the penalty is {}-convex", self.solver.p, self.penalty.p()));
        }
        if !(self.noise_level >= 0.0) || !self.noise_level.is_finite() {
            return bad("noise_level must be nonnegative".into());
        }
        if self.metric_every == 0 {
            return bad("metric_every must be positive".into());
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return bad("gamma must lie in [0, 1)".into());
            }
        }
        match &self.problem {
            ProblemSpec::Ct(ct) => {
                if ct.size < 8 {
                    return bad("ct.size must be at least 8".into());
                }
                ct.geometry()
                    .validate()
                    .map_err(|e| Error::Config(format!("ct geometry: {e}")))?;
                if self.solver.blocks > ct.angles {
                    return bad(format!("{} blocks but only {} angles", self.solver.blocks, ct.angles));
                }
            }
            ProblemSpec::Pde { m } => {
                if *m < 2 {
                    return bad("pde.m must be at least 2".into());
                }
                if self.solver.blocks != 1 {
                    return bad("the pde problem has a single block".into());
                }
            }
            ProblemSpec::CustomLinear(lin) => {
                if lin.matrix.as_os_str().is_empty() || lin.data.as_os_str().is_empty() {
                    return bad("custom-linear needs linear.matrix and linear.data".into());
                }
                if !(lin.delta >= 0.0) {
                    return bad("linear.delta must be nonnegative".into());
                }
            }
        }
        Ok(())
    }

    pub fn validation_inputs(&self) -> ValidationInputs {
        ValidationInputs {
            c0: Some(self.penalty.c0()),
            gamma: self.gamma,
            rho: None,
        }
    }

    /// Parameters as `key = value` lines that [`RawConfig`] reads back.
    pub fn to_key_values(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("name", self.name.clone());
        m.insert("problem", self.problem.kind().to_string());
        match &self.problem {
            ProblemSpec::Ct(ct) => {
                m.insert("ct.size", ct.size.to_string());
                m.insert("ct.angles", ct.angles.to_string());
                m.insert("ct.angle_start", ct.angle_start.to_string());
                m.insert("ct.angle_span", ct.angle_span.to_string());
                if let Some(r) = ct.rays {
                    m.insert("ct.rays", r.to_string());
                }
                m.insert("ct.spacing", ct.spacing.to_string());
            }
            ProblemSpec::Pde { m: side } => {
                m.insert("pde.m", side.to_string());
            }
            ProblemSpec::CustomLinear(lin) => {
                m.insert("linear.matrix", lin.matrix.display().to_string());
                m.insert("linear.data", lin.data.display().to_string());
                if let Some(t) = &lin.truth {
                    m.insert("linear.truth", t.display().to_string());
                }
                if let Some(r) = lin.rows {
                    m.insert("linear.rows", r.to_string());
                }
                if let Some(c) = lin.cols {
                    m.insert("linear.cols", c.to_string());
                }
                m.insert("linear.delta", lin.delta.to_string());
            }
        }
        m.insert(
            "penalty",
            match self.penalty.kind {
                PenaltyKind::Quadratic => "quadratic",
                PenaltyKind::QuadraticTv => "quadratic-tv",
            }
            .to_string(),
        );
        m.insert("mu", self.penalty.mu.to_string());
        match self.penalty.constraint {
            None => {
                m.insert("constraint", "none".into());
            }
            Some(Constraint::NonNegative) => {
                m.insert("constraint", "nonnegative".into());
            }
            Some(Constraint::Box { lo, hi }) => {
                m.insert("constraint", "box".into());
                m.insert("box.lo", lo.to_string());
                m.insert("box.hi", hi.to_string());
            }
        }
        let s = &self.solver;
        m.insert("p", s.p.to_string());
        m.insert("s", s.s.to_string());
        m.insert("beta0", s.beta0.to_string());
        m.insert("beta1", s.beta1.to_string());
        m.insert("sigma", s.sigma.to_string());
        m.insert("tau", s.tau.to_string());
        m.insert("alpha", s.alpha.to_string());
        m.insert("eta0", s.eps.eta0.to_string());
        m.insert("gap_exponent", s.eps.exponent.to_string());
        m.insert("eps_floor", s.eps.floor.to_string());
        m.insert("n_max", s.n_max.to_string());
        m.insert("blocks", s.blocks.to_string());
        m.insert("inner_max_iter", s.inner_max_iter.to_string());
        m.insert(
            "on_inner_failure",
            match s.on_inner_failure {
                InnerFailurePolicy::Abort => "abort",
                InnerFailurePolicy::Accept => "accept",
            }
            .to_string(),
        );
        m.insert(
            "mode",
            match self.mode {
                Mode::Plain => "plain",
                Mode::Accelerated => "accelerated",
            }
            .to_string(),
        );
        m.insert("noise_level", self.noise_level.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("metric_every", self.metric_every.to_string());
        if let Some(g) = self.gamma {
            m.insert("gamma", g.to_string());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        RawConfig::parse(text, Path::new("test.cfg"))?.resolve(None)
    }

    #[test]
    fn ct_paper_values() {
        let c = preset("ct-paper").unwrap();
        assert_eq!(c.penalty.mu, 1.0);
        assert_eq!(c.penalty.kind, PenaltyKind::QuadraticTv);
        assert_eq!(c.penalty.constraint, Some(Constraint::NonNegative));
        assert_eq!(c.solver.beta0, 0.1);
        assert_eq!(c.solver.beta1, 10.0);
        assert_eq!(c.solver.sigma, 0.001);
        assert_eq!(c.solver.tau, 1.01);
        assert_eq!(c.solver.alpha, 5.0);
        assert_eq!(c.solver.eps.exponent, 2.2);
        assert_eq!(c.noise_level, 0.01);
        let ProblemSpec::Ct(ct) = &c.problem else { panic!() };
        let g = ct.geometry();
        assert_eq!(g.num_rays(), 16515);
        assert_eq!(g.angles_deg[0], 1.0);
        assert_eq!(*g.angles_deg.last().unwrap(), 177.0);
    }

    #[test]
    fn pde_paper_values() {
        let c = preset("pde-paper").unwrap();
        assert_eq!(c.penalty.mu, 20.0);
        assert_eq!(c.penalty.constraint, None);
        assert_eq!(c.solver.beta0, 0.01 / 20.0);
        assert_eq!(c.solver.beta1, 2e4);
        assert_eq!(c.solver.sigma, 0.001);
        assert_eq!(c.solver.tau, 1.02);
        assert_eq!(c.solver.alpha, 5.0);
        assert_eq!(c.solver.eps.exponent, 1.5);
        assert_eq!(c.noise_level, 0.46e-3);
        assert_eq!(c.problem, ProblemSpec::Pde { m: 100 });
        assert_eq!(preset("pde-desk").unwrap().problem, ProblemSpec::Pde { m: 40 });
    }

    #[test]
    fn overrides_and_comments() {
        let c = parse("preset = ct-desk\n# comment\nmode = accelerated  # trailing\nct.size = 32\n\nseed=9\n").unwrap();
        assert_eq!(c.mode, Mode::Accelerated);
        assert_eq!(c.seed, 9);
        let ProblemSpec::Ct(ct) = &c.problem else { panic!() };
        assert_eq!(ct.size, 32);
    }

    #[test]
    fn problem_switch_takes_its_defaults() {
        let c = parse("problem = pde\npde.m = 12\n").unwrap();
        assert_eq!(c.problem, ProblemSpec::Pde { m: 12 });
        assert_eq!(c.penalty.mu, 20.0);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = parse("preset = ct-desk\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse("tau = 1.1\ntau = 1.2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse("tau 1.1\n").is_err());
        assert!(parse("tau = abc\n").is_err());
        assert!(parse("pde.m = 10\n").is_err());
        assert!(parse("preset = nope\n").is_err());
    }

    #[test]
    fn range_errors_are_config_errors() {
        assert!(matches!(parse("tau = 0.5\n"), Err(Error::Config(_))));
        assert!(matches!(parse("ct.size = 4\n"), Err(Error::Config(_))));
        assert!(matches!(parse("constraint = box\nbox.lo = 1\nbox.hi = 2\n"), Err(Error::Config(_))));
        let c = parse("constraint = box\nbox.lo = -1\nbox.hi = 2\n").unwrap();
        assert_eq!(c.penalty.constraint, Constraint::new_box(-1.0, 2.0));
        assert!(matches!(parse("problem = custom-linear\n"), Err(Error::Config(_))));
    }

    #[test]
    fn key_values_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let text: String = c
                .to_key_values()
                .iter()
                .map(|(k, v)| format!("{k} = {v}\n"))
                .collect();
            let back = parse(&text).unwrap();
            assert_eq!(back, c, "{name}");
        }
    }

    #[test]
    fn key_list_is_complete() {
        let c = preset("ct-desk").unwrap();
        for k in c.to_key_values().keys() {
            assert!(KEYS.contains(k), "{k}");
        }
    }
}
