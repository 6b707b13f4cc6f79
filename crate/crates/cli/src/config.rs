//! JSON run configuration. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use scatterlab_core::analysis::convergence::{ConvergenceSetup, DataSource};
use scatterlab_core::fields::MIN_CELLS;
use scatterlab_core::io::read_cauchy;
use scatterlab_core::{
    AngularConvention, Background, BlackHoleParams, CauchyData, GaussianPulse, ModeSpec, NullGrid, PulseKind, Stencil,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub mode: ModeConfig,
    pub grid: GridConfig,
    pub data: DataConfig,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub background: BackgroundKind,
    /// Boundary tables read by `goursat`; default to the forward outputs.
    #[serde(default)]
    pub boundary: Option<BoundaryConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(default)]
    pub r_fh: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    #[serde(default)]
    pub l: u32,
    pub nonlinear: bool,
    #[serde(default)]
    pub convention: Option<ConventionKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionKind {
    Spherical,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u_max: f64,
    pub v_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    #[default]
    Gaussian,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    #[default]
    TimeSymmetric,
    Outgoing,
    Ingoing,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub kind: DataKind,
    #[serde(rename = "A", default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub w: Option<f64>,
    #[serde(default)]
    pub profile: ProfileKind,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundKind {
    #[default]
    Schwarzschild,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub hplus: PathBuf,
    pub iplus: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// `T` values of the energy audit, in units of `M`.
    pub audit_times: Vec<f64>,
    pub late_time: f64,
    pub decay_window: [f64; 2],
    pub lipschitz_directions: usize,
    pub sobolev_profiles: usize,
    pub sobolev_cells: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            audit_times: (0..=8).map(|k| 10.0 * k as f64).collect(),
            late_time: 40.0,
            decay_window: [20.0, 80.0],
            lipschitz_directions: 20,
            sobolev_profiles: 100,
            sobolev_cells: 2000,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let config = config.relative_to(base);
        config.validate()?;
        Ok(config)
    }

    /// Resolve relative paths against the config file's directory.
    fn relative_to(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.outputs);
        if let Some(p) = self.data.path.as_mut() {
            fix(p);
        }
        if let Some(b) = self.boundary.as_mut() {
            fix(&mut b.hplus);
            fix(&mut b.iplus);
        }
        self
    }

    /// Check every precondition that does not need a computation.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.mode()?;
        let g = &self.grid;
        if g.n < MIN_CELLS {
            return Err(CliError::Config(format!("grid.n must be >= {MIN_CELLS}, got {}", g.n)));
        }
        if !(g.u_max.is_finite() && g.v_max.is_finite() && g.u_max > -g.v_max) {
            return Err(CliError::Config(format!(
                "grid needs finite u_max > -v_max, got u_max={}, v_max={}",
                g.u_max, g.v_max
            )));
        }
        match self.data.kind {
            DataKind::Gaussian => {
                self.pulse()?;
            }
            DataKind::File => {
                if self.data.path.is_none() {
                    return Err(CliError::Config("data.kind = file needs data.path".into()));
                }
            }
        }
        let a = &self.analysis;
        if a.audit_times.is_empty() || a.audit_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("analysis.audit_times must be non-empty and increasing".into()));
        }
        if !(a.decay_window[1] > a.decay_window[0] && a.decay_window[0] >= 0.0) {
            return Err(CliError::Config("analysis.decay_window needs 0 <= lo < hi".into()));
        }
        if a.lipschitz_directions == 0 || a.sobolev_cells < 2 {
            return Err(CliError::Config(
                "analysis.lipschitz_directions must be >= 1 and sobolev_cells >= 2".into(),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<BlackHoleParams, CliError> {
        let m = self.params.mass;
        Ok(BlackHoleParams::new(m, self.params.r_fh.unwrap_or(10.0 * m))?)
    }

    pub fn mode(&self) -> Result<ModeSpec, CliError> {
        let convention = match self.mode.convention {
            Some(ConventionKind::Normalized) => AngularConvention::NormalizedHarmonic,
            Some(ConventionKind::Spherical) => AngularConvention::SphericallySymmetric,
            None if self.mode.l == 0 => AngularConvention::SphericallySymmetric,
            None => AngularConvention::NormalizedHarmonic,
        };
        Ok(ModeSpec::new(self.mode.l, self.mode.nonlinear, convention)?)
    }

    pub fn background(&self) -> Result<Background, CliError> {
        let params = self.params()?;
        Ok(match self.background {
            BackgroundKind::Schwarzschild => Background::schwarzschild(params),
            BackgroundKind::Flat => Background::flat(params),
        })
    }

    pub fn pulse(&self) -> Result<GaussianPulse, CliError> {
        let d = &self.data;
        let (Some(a), Some(c), Some(w)) = (d.amplitude, d.c, d.w) else {
            return Err(CliError::Config("gaussian data needs A, c and w".into()));
        };
        let kind = match d.profile {
            ProfileKind::TimeSymmetric => PulseKind::TimeSymmetric,
            ProfileKind::Outgoing => PulseKind::Outgoing,
            ProfileKind::Ingoing => PulseKind::Ingoing,
        };
        Ok(GaussianPulse::new(a, c, w, kind)?)
    }

    pub fn grid_with(&self, n: usize) -> Result<NullGrid, CliError> {
        Ok(NullGrid::new(self.grid.u_max, self.grid.v_max, n, self.background()?, self.mode()?)?)
    }

    pub fn grid(&self) -> Result<NullGrid, CliError> {
        self.grid_with(self.grid.n)
    }

    pub fn data_source(&self) -> Result<DataSource, CliError> {
        Ok(match self.data.kind {
            DataKind::Gaussian => DataSource::Pulse(self.pulse()?),
            DataKind::File => {
                let path = self.data.path.as_ref().expect("validated");
                DataSource::Samples(read_cauchy(path, self.mode()?)?)
            }
        })
    }

    pub fn cauchy_data(&self, grid: &NullGrid) -> Result<CauchyData, CliError> {
        Ok(match self.data_source()? {
            DataSource::Pulse(p) => p.sample_on_grid(grid)?,
            DataSource::Samples(d) => d,
        })
    }

    pub fn convergence_setup(&self) -> Result<ConvergenceSetup, CliError> {
        Ok(ConvergenceSetup {
            background: self.background()?,
            mode: self.mode()?,
            u_max: self.grid.u_max,
            v_max: self.grid.v_max,
            data: self.data_source()?,
            stencil: Stencil::Standard,
            audit_time: *self.analysis.audit_times.last().expect("validated"),
        })
    }

    /// Times in units of `M` scaled to coordinates.
    pub fn audit_times(&self) -> Vec<f64> {
        self.analysis.audit_times.iter().map(|t| t * self.params.mass).collect()
    }
}
