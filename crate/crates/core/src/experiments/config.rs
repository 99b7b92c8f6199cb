//! Run configuration: TOML input with per-experiment defaults, resolved into a
//! fully explicit [`RunConfig`] that is echoed verbatim in the run manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hdg::{BcRegime, ProblemConfig, StabParams, TauF};
use crate::profiles::{PetviashviliConfig, SolitaryParams, MANUFACTURED_DOMAIN};
use crate::time_stepper::ThetaConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Convergence,
    Soliton,
    PeakonLimit,
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Soliton => "soliton",
            ExperimentKind::PeakonLimit => "peakon_limit",
            ExperimentKind::Custom => "custom",
        }
    }
}

/// Initial data of a `custom` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Manufactured solution with its source and boundary data (Dirichlet, `beta > 0`).
    Manufactured,
    /// `amplitude * sin(2 pi mode (x - x_left) / length)`.
    Sine { amplitude: f64, mode: u32 },
    /// Ostrovsky-Hunter peakon on the periodic unit interval.
    Peakon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabPreset {
    Standard,
    Conservative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub bc_regime: BcRegime,
    pub x_left: f64,
    pub x_right: f64,
    pub initial: InitialCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub theta: f64,
    pub dt: f64,
    /// When set, each resolution uses `dt = dt_scale * h^(k+1)` instead of `dt`.
    pub dt_scale: Option<f64>,
    pub t_final: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl TimeSection {
    /// Time-stepping parameters for mesh width `h` and degree `k`.
    pub fn theta_config(&self, h: f64, k: usize) -> Result<ThetaConfig> {
        let dt = match self.dt_scale {
            Some(c) => c * h.powi(k as i32 + 1),
            None => self.dt,
        };
        let cfg = ThetaConfig {
            theta: self.theta,
            dt,
            t_final: self.t_final,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub degrees: Vec<usize>,
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSection {
    pub c_w: f64,
    pub length: f64,
    pub grid_points: usize,
    /// Position of the crest in the initial data.
    pub x0: f64,
    pub petviashvili: PetviashviliConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakonSection {
    pub betas: Vec<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub problem: ProblemSection,
    pub stabilization: StabParams,
    pub time: TimeSection,
    pub mesh: MeshSection,
    pub output: OutputSection,
    pub soliton: SolitonSection,
    pub peakon: PeakonSection,
    /// Reserved; no experiment draws random numbers.
    pub seed: u64,
}

// ---- partially specified input ----

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    bc_regime: Option<BcRegime>,
    x_left: Option<f64>,
    x_right: Option<f64>,
    initial: Option<InitialCondition>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStab {
    preset: Option<StabPreset>,
    tau_pu: Option<f64>,
    tau_vq: Option<f64>,
    tau_qv: Option<f64>,
    tau_f: Option<TauF>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    theta: Option<f64>,
    dt: Option<f64>,
    dt_scale: Option<f64>,
    t_final: Option<f64>,
    newton_tol: Option<f64>,
    newton_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    degrees: Option<Vec<usize>>,
    elements: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    snapshot_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSoliton {
    c_w: Option<f64>,
    length: Option<f64>,
    grid_points: Option<usize>,
    x0: Option<f64>,
    petviashvili: Option<PetviashviliConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeakon {
    betas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: ExperimentKind,
    #[serde(default)]
    problem: RawProblem,
    #[serde(default)]
    stabilization: RawStab,
    #[serde(default)]
    time: RawTime,
    #[serde(default)]
    mesh: RawMesh,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    soliton: RawSoliton,
    #[serde(default)]
    peakon: RawPeakon,
    seed: Option<u64>,
}

/// Command-line overrides; `None` keeps the file value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub theta: Option<f64>,
    pub dt: Option<f64>,
    pub degree: Option<usize>,
    pub elements: Option<Vec<usize>>,
    pub beta: Option<Vec<f64>>,
}

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "OSTROVSKY_HDG_OUT";

struct Defaults {
    problem: ProblemSection,
    theta: f64,
    dt: f64,
    t_final: f64,
    degrees: Vec<usize>,
    elements: Vec<usize>,
    snapshots: Vec<f64>,
}

fn defaults(kind: ExperimentKind) -> Defaults {
    let sol = SolitaryParams::reference();
    match kind {
        ExperimentKind::Convergence => Defaults {
            problem: ProblemSection {
                alpha: 1.0,
                beta: 0.5,
                gamma: 1.0,
                bc_regime: BcRegime::DirichletBetaPos,
                x_left: MANUFACTURED_DOMAIN.0,
                x_right: MANUFACTURED_DOMAIN.1,
                initial: InitialCondition::Manufactured,
            },
            theta: 0.5,
            dt: 0.001,
            t_final: 0.5,
            degrees: vec![1, 2, 3],
            elements: vec![2, 4, 8, 16, 32],
            snapshots: vec![],
        },
        ExperimentKind::Soliton => Defaults {
            problem: ProblemSection {
                alpha: sol.alpha,
                beta: sol.beta,
                gamma: sol.gamma,
                bc_regime: BcRegime::Periodic,
                x_left: 0.0,
                x_right: sol.length,
                initial: InitialCondition::Sine { amplitude: 0.0, mode: 1 },
            },
            theta: 0.5,
            dt: 0.05,
            t_final: 20.0,
            degrees: vec![2],
            elements: vec![256],
            snapshots: vec![0.0, 5.0, 10.0, 15.0, 20.0],
        },
        ExperimentKind::PeakonLimit => Defaults {
            problem: ProblemSection {
                alpha: 1.0,
                beta: 0.0,
                gamma: 1.0,
                bc_regime: BcRegime::Periodic,
                x_left: 0.0,
                x_right: 1.0,
                initial: InitialCondition::Peakon,
            },
            theta: 0.5,
            dt: 0.005,
            t_final: 2.0,
            degrees: vec![2],
            elements: vec![32],
            snapshots: vec![0.0, 2.0],
        },
        ExperimentKind::Custom => Defaults {
            problem: ProblemSection {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
                bc_regime: BcRegime::Periodic,
                x_left: 0.0,
                x_right: 2.0 * std::f64::consts::PI,
                initial: InitialCondition::Sine { amplitude: 1.0, mode: 1 },
            },
            theta: 0.5,
            dt: 0.01,
            t_final: 1.0,
            degrees: vec![2],
            elements: vec![32],
            snapshots: vec![0.0, 1.0],
        },
    }
}

fn default_output_dir(kind: ExperimentKind) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("output"));
    root.join(kind.name())
}

impl RawConfig {
    fn resolve(self, ov: &Overrides) -> Result<RunConfig> {
        let kind = self.kind;
        let d = defaults(kind);
        let rp = self.problem;
        let mut problem = ProblemSection {
            alpha: rp.alpha.unwrap_or(d.problem.alpha),
            beta: rp.beta.unwrap_or(d.problem.beta),
            gamma: rp.gamma.unwrap_or(d.problem.gamma),
            bc_regime: rp.bc_regime.unwrap_or(d.problem.bc_regime),
            x_left: rp.x_left.unwrap_or(d.problem.x_left),
            x_right: rp.x_right.unwrap_or(d.problem.x_right),
            initial: rp.initial.unwrap_or(d.problem.initial),
        };
        let mut betas = self.peakon.betas.unwrap_or_else(|| vec![0.0, 1e-4, 1e-5, 1e-6]);
        if let Some(b) = &ov.beta {
            if kind == ExperimentKind::PeakonLimit {
                betas = b.clone();
            } else if let [single] = b.as_slice() {
                problem.beta = *single;
            } else {
                return Err(Error::config("--beta", "a list of betas is only meaningful for peakon-limit"));
            }
        }

        let rs = self.stabilization;
        let base = match rs.preset.unwrap_or(StabPreset::Standard) {
            StabPreset::Standard => StabParams::standard(problem.beta, problem.gamma),
            StabPreset::Conservative => StabParams::conservative(problem.beta, problem.gamma)?,
        };
        let stabilization = StabParams {
            tau_pu: rs.tau_pu.unwrap_or(base.tau_pu),
            tau_vq: rs.tau_vq.unwrap_or(base.tau_vq),
            tau_qv: rs.tau_qv.unwrap_or(base.tau_qv),
            tau_f: rs.tau_f.unwrap_or(base.tau_f),
        };

        let rt = self.time;
        let mut time = TimeSection {
            theta: rt.theta.unwrap_or(d.theta),
            dt: rt.dt.unwrap_or(d.dt),
            dt_scale: rt.dt_scale,
            t_final: rt.t_final.unwrap_or(d.t_final),
            newton_tol: rt.newton_tol.unwrap_or(1e-10),
            newton_max_iter: rt.newton_max_iter.unwrap_or(25),
        };
        if let Some(theta) = ov.theta {
            time.theta = theta;
        }
        if let Some(dt) = ov.dt {
            time.dt = dt;
            time.dt_scale = None;
        }

        let mut mesh = MeshSection {
            degrees: self.mesh.degrees.unwrap_or(d.degrees),
            elements: self.mesh.elements.unwrap_or(d.elements),
        };
        if let Some(k) = ov.degree {
            mesh.degrees = vec![k];
        }
        if let Some(e) = &ov.elements {
            mesh.elements = e.clone();
        }

        let output = OutputSection {
            dir: ov
                .out
                .clone()
                .or(self.output.dir)
                .unwrap_or_else(|| default_output_dir(kind)),
            snapshot_times: self.output.snapshot_times.unwrap_or(d.snapshots),
        };

        let sp = SolitaryParams::reference();
        let length = self.soliton.length.unwrap_or(sp.length);
        let soliton = SolitonSection {
            c_w: self.soliton.c_w.unwrap_or(sp.c_w),
            length,
            grid_points: self.soliton.grid_points.unwrap_or(sp.grid_points),
            x0: self.soliton.x0.unwrap_or(0.5 * length),
            petviashvili: self.soliton.petviashvili.unwrap_or_default(),
        };

        let cfg = RunConfig {
            kind,
            problem,
            stabilization,
            time,
            mesh,
            output,
            soliton,
            peakon: PeakonSection { betas },
            seed: self.seed.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    /// Defaults of `kind` with no file.
    pub fn default_for(kind: ExperimentKind, ov: &Overrides) -> Result<RunConfig> {
        RawConfig {
            kind,
            problem: RawProblem::default(),
            stabilization: RawStab::default(),
            time: RawTime::default(),
            mesh: RawMesh::default(),
            output: RawOutput::default(),
            soliton: RawSoliton::default(),
            peakon: RawPeakon::default(),
            seed: None,
        }
        .resolve(ov)
    }

    pub fn from_toml_str(text: &str, ov: &Overrides) -> Result<RunConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map(|s| format!("byte {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<file>".into());
            Error::config(key, e.message().to_string())
        })?;
        raw.resolve(ov)
    }

    /// Parses the `config` member of a run manifest.
    pub fn from_json_str(text: &str) -> Result<RunConfig> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::config("<manifest>", e.to_string()))?;
        raw.resolve(&Overrides::default())
    }

    /// Reads a TOML file, applying `ov` on top.
    pub fn load(path: &Path, ov: &Overrides) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, ov)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if !(p.x_right > p.x_left) {
            return Err(Error::config("problem.x_right", "must exceed problem.x_left"));
        }
        // peakon runs set beta per case
        if self.kind != ExperimentKind::PeakonLimit {
            self.problem_config(p.beta)?;
        }
        self.stabilization.validate()?;
        if self.mesh.degrees.is_empty() || self.mesh.degrees.iter().any(|&k| k == 0 || k > 10) {
            return Err(Error::config("mesh.degrees", "need at least one degree in 1..=10"));
        }
        if self.mesh.elements.is_empty() || self.mesh.elements.contains(&0) {
            return Err(Error::config("mesh.elements", "need at least one positive element count"));
        }
        let h = (p.x_right - p.x_left) / self.mesh.elements[0] as f64;
        self.time.theta_config(h, self.mesh.degrees[0])?;
        if let Some(c) = self.time.dt_scale {
            if !(c > 0.0) {
                return Err(Error::config("time.dt_scale", "must be positive"));
            }
        }
        for &t in &self.output.snapshot_times {
            if !(0.0..=self.time.t_final * (1.0 + 1e-12)).contains(&t) {
                return Err(Error::config("output.snapshot_times", "times must lie in [0, t_final]"));
            }
        }
        match self.kind {
            ExperimentKind::Convergence => {
                if self.mesh.elements.len() < 2 {
                    return Err(Error::config("mesh.elements", "a convergence study needs at least two resolutions"));
                }
                if p.initial != InitialCondition::Manufactured {
                    return Err(Error::config("problem.initial", "convergence runs use the manufactured case"));
                }
            }
            ExperimentKind::Soliton => {
                if p.bc_regime != BcRegime::Periodic {
                    return Err(Error::config("problem.bc_regime", "the soliton run is periodic"));
                }
                let s = &self.soliton;
                if (p.x_left).abs() > 0.0 || (p.x_right - s.length).abs() > 1e-12 * s.length {
                    return Err(Error::config("problem.x_right", "the mesh must cover (0, soliton.length)"));
                }
                if !s.grid_points.is_power_of_two() || s.grid_points < 4 {
                    return Err(Error::config("soliton.grid_points", "must be a power of two"));
                }
            }
            ExperimentKind::PeakonLimit => {
                if p.bc_regime != BcRegime::Periodic || p.x_left != 0.0 || p.x_right != 1.0 {
                    return Err(Error::config("problem", "the peakon lives on the periodic unit interval"));
                }
                if self.peakon.betas.is_empty() {
                    return Err(Error::config("peakon.betas", "need at least one beta"));
                }
                for &b in &self.peakon.betas {
                    self.problem_config(b)?;
                }
            }
            ExperimentKind::Custom => {
                let periodic = p.bc_regime == BcRegime::Periodic;
                match p.initial {
                    InitialCondition::Manufactured if p.bc_regime != BcRegime::DirichletBetaPos => {
                        return Err(Error::config("problem.initial", "the manufactured case needs dirichlet_beta_pos"));
                    }
                    InitialCondition::Peakon if !periodic || p.x_left != 0.0 || p.x_right != 1.0 => {
                        return Err(Error::config("problem.initial", "the peakon needs the periodic unit interval"));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Problem setup (without source or boundary data) at dispersion `beta`.
    pub fn problem_config(&self, beta: f64) -> Result<ProblemConfig> {
        let p = &self.problem;
        ProblemConfig::new(p.alpha, beta, p.gamma, p.bc_regime)
    }

    pub fn solitary_params(&self) -> SolitaryParams {
        SolitaryParams {
            alpha: self.problem.alpha,
            beta: self.problem.beta,
            gamma: self.problem.gamma,
            c_w: self.soliton.c_w,
            length: self.soliton.length,
            grid_points: self.soliton.grid_points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_convergence_fills_defaults() {
        let text = "kind = \"convergence\"\n[problem]\nx_left = 0.0\nx_right = 6.283185307179586\n[mesh]\ndegrees = [1]\nelements = [2, 4, 8]\n";
        let cfg = RunConfig::from_toml_str(text, &Overrides::default()).unwrap();
        assert_eq!(cfg.time.theta, 0.5);
        assert_eq!(cfg.time.dt, 0.001);
        assert_eq!(cfg.stabilization.tau_pu, 2.0);
        assert_eq!(cfg.stabilization.tau_f, TauF::Constant(2.0));
        assert_eq!(cfg.mesh.elements, vec![2, 4, 8]);
    }

    #[test]
    fn negative_beta_with_positive_regime_rejected() {
        let text = "kind = \"custom\"\n[problem]\nbeta = -1.0\nbc_regime = \"dirichlet_beta_pos\"\n";
        let err = RunConfig::from_toml_str(text, &Overrides::default()).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "problem.bc_regime"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in ["kind = \"custom\"\nbogus = 1\n", "kind = \"custom\"\n[time]\nthetaa = 0.5\n"] {
            assert!(matches!(
                RunConfig::from_toml_str(text, &Overrides::default()),
                Err(Error::Config { .. })
            ));
        }
    }

    #[test]
    fn invariants() {
        let one = Overrides {
            elements: Some(vec![8]),
            ..Default::default()
        };
        assert!(RunConfig::default_for(ExperimentKind::Convergence, &one).is_err());
        let none = Overrides {
            beta: Some(vec![]),
            ..Default::default()
        };
        assert!(RunConfig::default_for(ExperimentKind::PeakonLimit, &none).is_err());
        let neg = Overrides {
            beta: Some(vec![-1e-4]),
            ..Default::default()
        };
        assert!(RunConfig::default_for(ExperimentKind::PeakonLimit, &neg).is_err());
    }

    #[test]
    fn overrides_apply() {
        let ov = Overrides {
            theta: Some(1.0),
            dt: Some(0.01),
            degree: Some(3),
            elements: Some(vec![4, 8]),
            out: Some("x".into()),
            beta: Some(vec![0.25]),
        };
        let cfg = RunConfig::default_for(ExperimentKind::Convergence, &ov).unwrap();
        assert_eq!(cfg.time.theta, 1.0);
        assert_eq!(cfg.time.dt, 0.01);
        assert_eq!(cfg.mesh.degrees, vec![3]);
        assert_eq!(cfg.problem.beta, 0.25);
        assert_eq!(cfg.output.dir, PathBuf::from("x"));
    }

    #[test]
    fn json_round_trip_every_kind() {
        for kind in [
            ExperimentKind::Convergence,
            ExperimentKind::Soliton,
            ExperimentKind::PeakonLimit,
            ExperimentKind::Custom,
        ] {
            let cfg = RunConfig::default_for(kind, &Overrides::default()).unwrap();
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(RunConfig::from_json_str(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn dt_scale_uses_mesh_width() {
        let text = "kind = \"convergence\"\n[time]\ntheta = 1.0\ndt_scale = 0.01\n";
        let cfg = RunConfig::from_toml_str(text, &Overrides::default()).unwrap();
        let tc = cfg.time.theta_config(0.5, 3).unwrap();
        assert!((tc.dt - 0.01 * 0.0625).abs() < 1e-16);
    }
}
