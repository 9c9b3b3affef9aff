//! Run configuration read from a sectioned TOML file.
//!
//! Every block is validated against the constraints of the stage that uses
//! it before any computation starts.
//!
//! ```toml
//! output = "out"
//!
//! [phantom]
//! kind = "uniform"          # uniform | bilinear | disk | polynomial
//!
//! [grids]
//! angles = 256
//! offsets = 1024
//! margin = 1.1
//! layout = "open-half"      # open-half | half | full
//!
//! [mollifier]               # optional
//! kernel = "bump"
//! epsilon = 0.05
//!
//! [noise]                   # optional
//! sigma = 0.0
//! seed = 7
//!
//! [moments]
//! order = 4
//! angles = "auto"           # or a list of radians in (0, π)
//!
//! [recon]
//! path = "moments"          # moments | fbp
//! m = 2
//! n = 2
//! resolution = 32
//!
//! [filter]                  # optional
//! kind = "riesz"
//! cutoff = 0.8              # fraction of the offset Nyquist frequency
//! reg_floor = 3.989e-7
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::density_recon::DEFAULT_STABILITY_CAP;
use crate::error::{Error, Result};
use crate::mollifier::{KernelKind, MollifierSpec};
use crate::moment_recovery::{default_angles, snap_to_grid};
use crate::numerics::linalg::DEFAULT_MAX_ORDER;
use crate::numerics::quadrature::Grid1D;
use crate::phantoms::{Density, Disk, Monomial};
use crate::projector::{full_circle, offset_grid, open_half_circle};
use crate::spectral_inversion::{FilterKind, FilterSpec, DEFAULT_CUTOFF_FRACTION, DEFAULT_REG_FLOOR};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub phantom: PhantomConfig,
    pub grids: GridConfig,
    #[serde(default)]
    pub projector: ProjectorConfig,
    pub mollifier: Option<MollifierConfig>,
    pub noise: Option<NoiseConfig>,
    pub moments: MomentConfig,
    pub recon: ReconConfig,
    pub filter: Option<FilterConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhantomConfig {
    pub kind: String,
    /// Disk centre; defaults to the centre of the square.
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    /// Disk height; defaults to unit mass.
    pub amplitude: Option<f64>,
    /// Polynomial terms `[coeff, a, b]` for `coeff·x₁^a x₂^b`.
    pub terms: Option<Vec<(f64, u32, u32)>>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AngleLayout {
    /// `π(j+1)/(n+1)`, strictly inside `(0, π)`.
    OpenHalf,
    /// `πj/n` on `[0, π)`.
    Half,
    /// `2πj/n` on `[0, 2π)`.
    Full,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub angles: usize,
    pub offsets: usize,
    /// Offsets span `[−√2·margin, √2·margin]`.
    pub margin: f64,
    #[serde(default = "default_layout")]
    pub layout: AngleLayout,
}

fn default_layout() -> AngleLayout {
    AngleLayout::OpenHalf
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProjectorConfig {
    /// Line-integral step as a fraction of the offset spacing.
    pub line_step: f64,
    /// Gauss–Legendre nodes per detector bin; 0 gives point samples.
    pub bin_nodes: usize,
}

impl Default for ProjectorConfig {
    fn default() -> Self {
        ProjectorConfig {
            line_step: 0.5,
            bin_nodes: 8,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub kernel: String,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AngleChoice {
    Auto(String),
    List(Vec<f64>),
}

impl Default for AngleChoice {
    fn default() -> Self {
        AngleChoice::Auto("auto".into())
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MomentConfig {
    pub order: usize,
    #[serde(default)]
    pub angles: AngleChoice,
    /// Largest order the Vandermonde solver accepts.
    #[serde(default = "default_order_cap")]
    pub order_cap: usize,
}

fn default_order_cap() -> usize {
    DEFAULT_MAX_ORDER
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ReconPath {
    Moments,
    Fbp,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReconConfig {
    #[serde(default = "default_path")]
    pub path: ReconPath,
    pub m: usize,
    pub n: usize,
    pub resolution: usize,
    #[serde(default = "default_stability_cap")]
    pub stability_cap: usize,
}

fn default_path() -> ReconPath {
    ReconPath::Moments
}

fn default_stability_cap() -> usize {
    DEFAULT_STABILITY_CAP
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub kind: Option<String>,
    /// Band limit as a fraction of the offset Nyquist frequency.
    pub cutoff: Option<f64>,
    pub reg_floor: Option<f64>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    /// Parses without cross-block validation; call [`RunConfig::validate`]
    /// after applying any overrides.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg = Self::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a file without validating it.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds every derived object once so that errors surface before any work.
    pub fn validate(&self) -> Result<()> {
        self.density()?;
        self.angle_grid()?;
        self.offset_grid()?;
        self.mollifier()?;
        self.moment_angles()?;
        if !(self.projector.line_step > 0.0 && self.projector.line_step <= 1.0) {
            return Err(config_err(format!(
                "projector.line_step must lie in (0, 1], got {}",
                self.projector.line_step
            )));
        }
        if let Some(noise) = &self.noise {
            if !(noise.sigma >= 0.0) || !noise.sigma.is_finite() {
                return Err(config_err(format!("noise.sigma must be non-negative, got {}", noise.sigma)));
            }
        }
        if self.moments.order > self.moments.order_cap {
            return Err(config_err(format!(
                "moments.order {} exceeds moments.order_cap {}",
                self.moments.order, self.moments.order_cap
            )));
        }
        let r = &self.recon;
        if r.m == 0 || r.n == 0 || r.resolution == 0 {
            return Err(config_err("recon.m, recon.n and recon.resolution must be positive"));
        }
        if r.path == ReconPath::Moments && (r.m > r.stability_cap || r.n > r.stability_cap) {
            return Err(config_err(format!(
                "recon orders m={}, n={} exceed recon.stability_cap {}",
                r.m, r.n, r.stability_cap
            )));
        }
        self.filter()?;
        Ok(())
    }

    pub fn density(&self) -> Result<Density> {
        let p = &self.phantom;
        let only = |allowed: &[&str]| -> Result<()> {
            let given = [
                ("center", p.center.is_some()),
                ("radius", p.radius.is_some()),
                ("amplitude", p.amplitude.is_some()),
                ("terms", p.terms.is_some()),
            ];
            for (name, present) in given {
                if present && !allowed.contains(&name) {
                    return Err(config_err(format!("phantom.{name} does not apply to kind '{}'", p.kind)));
                }
            }
            Ok(())
        };
        let wrap = |e: Error| config_err(format!("phantom: {e}"));
        match p.kind.as_str() {
            "uniform" => {
                only(&[])?;
                Ok(Density::uniform())
            }
            "bilinear" => {
                only(&[])?;
                Ok(Density::bilinear())
            }
            "disk" => {
                only(&["center", "radius", "amplitude"])?;
                if p.center.is_none() && p.radius.is_none() && p.amplitude.is_none() {
                    return Ok(Density::reference_disk());
                }
                let center = p.center.unwrap_or([0.5, 0.5]);
                let radius = p.radius.unwrap_or(0.25);
                let disk = match p.amplitude {
                    Some(a) => Disk::new(center, radius, a),
                    None => Disk::unit_mass(center, radius),
                }
                .map_err(wrap)?;
                Ok(Density::disk(disk))
            }
            "polynomial" => {
                only(&["terms"])?;
                let terms = p
                    .terms
                    .as_ref()
                    .ok_or_else(|| config_err("phantom.terms is required for a polynomial"))?
                    .iter()
                    .map(|&(coeff, a, b)| Monomial { coeff, a, b })
                    .collect();
                Density::polynomial(terms).map_err(wrap)
            }
            other => Err(config_err(format!(
                "unknown phantom kind '{other}' (expected uniform, bilinear, disk or polynomial)"
            ))),
        }
    }

    pub fn angle_grid(&self) -> Result<Grid1D> {
        let n = self.grids.angles;
        if n < 2 {
            return Err(config_err(format!("grids.angles must be at least 2, got {n}")));
        }
        let grid = match self.grids.layout {
            AngleLayout::OpenHalf => open_half_circle(n),
            AngleLayout::Half => Grid1D::from_spacing(0.0, PI / n as f64, n),
            AngleLayout::Full => full_circle(n),
        };
        grid.map_err(|e| config_err(format!("grids: {e}")))
    }

    /// Too small a margin is not rejected here; the projector reports it as
    /// a coverage failure.
    pub fn offset_grid(&self) -> Result<Grid1D> {
        if self.grids.offsets < 2 {
            return Err(config_err(format!("grids.offsets must be at least 2, got {}", self.grids.offsets)));
        }
        offset_grid(self.grids.margin, self.grids.offsets).map_err(|e| config_err(format!("grids: {e}")))
    }

    pub fn mollifier(&self) -> Result<Option<MollifierSpec>> {
        let Some(mc) = &self.mollifier else {
            return Ok(None);
        };
        let kind = KernelKind::parse(&mc.kernel)?;
        MollifierSpec::with_order_cap(kind, mc.epsilon, self.moments.order, self.moments.order_cap)
            .map(Some)
            .map_err(|e| config_err(format!("mollifier: {e}")))
    }

    /// The `K + 1` moment angles, snapped to the angle grid.
    pub fn moment_angles(&self) -> Result<Vec<f64>> {
        let k = self.moments.order;
        let requested = match &self.moments.angles {
            AngleChoice::Auto(word) if word == "auto" => default_angles(k),
            AngleChoice::Auto(word) => {
                return Err(config_err(format!("moments.angles must be \"auto\" or a list, got '{word}'")))
            }
            AngleChoice::List(list) => {
                if list.len() != k + 1 {
                    return Err(config_err(format!(
                        "moments.angles lists {} angles; order {k} needs {}",
                        list.len(),
                        k + 1
                    )));
                }
                if list.iter().any(|&a| !(a > 0.0 && a < PI)) {
                    return Err(config_err("moments.angles must lie strictly inside (0, π)"));
                }
                if list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(config_err("moments.angles must be strictly increasing"));
                }
                list.clone()
            }
        };
        let snapped = snap_to_grid(&requested, &self.angle_grid()?).map_err(|e| config_err(e.to_string()))?;
        if snapped.iter().any(|&a| !(a > 0.0 && a < PI)) {
            return Err(config_err("moment angles snap onto 0 or π; use a finer or open angle grid"));
        }
        Ok(snapped)
    }

    pub fn noise(&self) -> (f64, u64) {
        self.noise.as_ref().map_or((0.0, 0), |n| (n.sigma, n.seed))
    }

    /// Riesz for raw data, modified Riesz when a mollifier is configured,
    /// unless the filter block says otherwise.
    pub fn filter(&self) -> Result<FilterSpec> {
        let offsets = self.offset_grid()?;
        let fc = self.filter.clone().unwrap_or(FilterConfig {
            kind: None,
            cutoff: None,
            reg_floor: None,
        });
        let kind = match &fc.kind {
            Some(k) => FilterKind::parse(k)?,
            None if self.mollifier.is_some() => FilterKind::ModifiedRiesz,
            None => FilterKind::Riesz,
        };
        let fraction = fc.cutoff.unwrap_or(DEFAULT_CUTOFF_FRACTION);
        if !(0.0..=1.0).contains(&fraction) {
            return Err(config_err(format!("filter.cutoff must lie in [0, 1], got {fraction}")));
        }
        FilterSpec::new(kind, fraction * offsets.nyquist(), fc.reg_floor.unwrap_or(DEFAULT_REG_FLOOR))
            .map_err(|e| config_err(format!("filter: {e}")))
    }
}
