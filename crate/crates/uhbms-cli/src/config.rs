//! Campaign configuration: one TOML file holding the specs, grids, sample
//! counts, tolerances and seed for every command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use uhbms::little_groups::{LittleGroupSpec, OrientationCase, SubgroupSampler, WindingGroup};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub specs: Vec<LittleGroupSpec>,
    pub invariance: InvarianceConfig,
    pub vanishing: VanishingConfig,
    pub actuality: ActualityConfig,
    pub regions: RegionsConfig,
    pub induced: InducedConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 1,
            out: PathBuf::from("uhbms-out"),
            specs: vec![LittleGroupSpec::new(1, 1, 1, OrientationCase::One).expect("valid")],
            invariance: InvarianceConfig::default(),
            vanishing: VanishingConfig::default(),
            actuality: ActualityConfig::default(),
            regions: RegionsConfig::default(),
            induced: InducedConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvarianceConfig {
    /// Side of the midpoint grid of sample points.
    pub grid: usize,
    pub elements: usize,
    pub random_generators: usize,
    pub harmonics: usize,
    pub tolerance: f64,
    /// Quadrature grid for the region-versus-arc norm identity.
    pub norm_grid: usize,
    pub norm_tolerance: f64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        InvarianceConfig {
            grid: 16,
            elements: 1000,
            random_generators: 3,
            harmonics: 3,
            tolerance: 1e-8,
            norm_grid: 256,
            norm_tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Torus,
    CircleCyclic { n: u32 },
    CyclicCircle { n: u32 },
    Winding { n: u32, q: i64, p: i64 },
}

impl FamilyConfig {
    pub fn sampler(&self) -> Result<SubgroupSampler, CliError> {
        Ok(match *self {
            FamilyConfig::Torus => SubgroupSampler::Torus,
            FamilyConfig::CircleCyclic { n } => SubgroupSampler::CircleCyclic { n: positive(n, "circle-cyclic n")? },
            FamilyConfig::CyclicCircle { n } => SubgroupSampler::CyclicCircle { n: positive(n, "cyclic-circle n")? },
            FamilyConfig::Winding { n, q, p } => {
                SubgroupSampler::Winding(WindingGroup::new(n, q, p).map_err(|e| CliError::Config(format!("vanishing family: {e}")))?)
            }
        })
    }
}

fn positive(n: u32, what: &str) -> Result<u32, CliError> {
    if n == 0 {
        Err(CliError::Config(format!("{what} must be positive")))
    } else {
        Ok(n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VanishingConfig {
    pub grid: usize,
    pub checkpoints: Vec<usize>,
    /// Largest allowed norm ratio at the last checkpoint.
    pub threshold: f64,
    pub harmonics: usize,
    pub families: Vec<FamilyConfig>,
    /// Samples for averaging a spec's own fixed function over its group.
    pub reproduction_samples: usize,
    pub reproduction_tolerance: f64,
}

impl Default for VanishingConfig {
    fn default() -> Self {
        VanishingConfig {
            grid: 256,
            checkpoints: vec![128, 256, 512, 1024],
            threshold: 0.05,
            harmonics: 6,
            families: vec![
                FamilyConfig::Torus,
                FamilyConfig::CircleCyclic { n: 3 },
                FamilyConfig::CyclicCircle { n: 3 },
                FamilyConfig::Winding { n: 3, q: 2, p: 3 },
            ],
            reproduction_samples: 32,
            reproduction_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActualityConfig {
    pub grid: usize,
    /// Scan tolerance factor `C` in `tol = C · L · h`.
    pub c: f64,
}

impl Default for ActualityConfig {
    fn default() -> Self {
        ActualityConfig { grid: 512, c: 0.75 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionsConfig {
    /// Pixels per π in the SVG output.
    pub scale: f64,
    /// Points on each sample orbit polyline.
    pub orbit_points: usize,
}

impl Default for RegionsConfig {
    fn default() -> Self {
        RegionsConfig { scale: 60.0, orbit_points: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InducedConfig {
    pub lattice: usize,
    pub radius: f64,
    pub modes: usize,
    /// `(ν, n)` pairs; when empty every spec uses its first well-defined
    /// character with `n ≠ 0`.
    pub characters: Vec<(i64, i64)>,
    pub adjoint_samples: usize,
    pub adjoint_tolerance: f64,
    pub character_samples: usize,
    pub character_tolerance: f64,
    pub mc_samples: usize,
    pub z_max: f64,
    pub norm_tolerance: f64,
    pub boundary_tolerance: f64,
    pub composition_tolerance: f64,
}

impl Default for InducedConfig {
    fn default() -> Self {
        InducedConfig {
            lattice: 21,
            radius: 2.5,
            modes: 16,
            characters: Vec::new(),
            adjoint_samples: 1000,
            adjoint_tolerance: 1e-10,
            character_samples: 10_000,
            character_tolerance: 1e-12,
            mc_samples: 200_000,
            z_max: 3.0,
            norm_tolerance: 0.02,
            boundary_tolerance: 0.005,
            composition_tolerance: 0.05,
        }
    }
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tolerances = [
            ("invariance.tolerance", self.invariance.tolerance),
            ("invariance.norm_tolerance", self.invariance.norm_tolerance),
            ("vanishing.threshold", self.vanishing.threshold),
            ("vanishing.reproduction_tolerance", self.vanishing.reproduction_tolerance),
            ("actuality.c", self.actuality.c),
            ("regions.scale", self.regions.scale),
            ("induced.radius", self.induced.radius),
            ("induced.adjoint_tolerance", self.induced.adjoint_tolerance),
            ("induced.character_tolerance", self.induced.character_tolerance),
            ("induced.z_max", self.induced.z_max),
            ("induced.norm_tolerance", self.induced.norm_tolerance),
            ("induced.boundary_tolerance", self.induced.boundary_tolerance),
            ("induced.composition_tolerance", self.induced.composition_tolerance),
        ];
        for (name, v) in tolerances {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("invariance.grid", self.invariance.grid),
            ("invariance.elements", self.invariance.elements),
            ("invariance.harmonics", self.invariance.harmonics),
            ("invariance.norm_grid", self.invariance.norm_grid),
            ("vanishing.grid", self.vanishing.grid),
            ("vanishing.reproduction_samples", self.vanishing.reproduction_samples),
            ("actuality.grid", self.actuality.grid),
            ("regions.orbit_points", self.regions.orbit_points),
            ("induced.lattice", self.induced.lattice),
            ("induced.adjoint_samples", self.induced.adjoint_samples),
            ("induced.character_samples", self.induced.character_samples),
            ("induced.mc_samples", self.induced.mc_samples),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        let grids = [
            ("invariance.grid", self.invariance.grid),
            ("invariance.norm_grid", self.invariance.norm_grid),
            ("vanishing.grid", self.vanishing.grid),
            ("actuality.grid", self.actuality.grid),
        ];
        for (name, v) in grids {
            if v < 16 {
                return Err(CliError::Config(format!("{name} must be at least 16, got {v}")));
            }
        }
        let cps = &self.vanishing.checkpoints;
        if cps.is_empty() || cps[0] == 0 || cps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("vanishing.checkpoints must be positive and strictly increasing".into()));
        }
        if self.vanishing.harmonics == 0 {
            return Err(CliError::Config("vanishing.harmonics must be positive".into()));
        }
        // The reference state carries frequencies up to 2.
        if self.induced.modes < 6 {
            return Err(CliError::Config("induced.modes must be at least 6".into()));
        }
        if self.induced.lattice < 5 {
            return Err(CliError::Config("induced.lattice must be at least 5".into()));
        }
        for f in &self.vanishing.families {
            f.sampler()?;
        }
        Ok(())
    }
}
