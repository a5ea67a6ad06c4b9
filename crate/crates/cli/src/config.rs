use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use tropical_ca::ca::{CARule, CAState};
use tropical_ca::network::{random_parameters, NetworkFile, NetworkSpec, TimingParameters};
use tropical_ca::semiring::{MaxPlusVector, RawScalar, Scalar};

pub const DEFAULT_XI_RANGE: (i64, i64) = (1, 30);
pub const DEFAULT_TAU_RANGE: (i64, i64) = (1, 10);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Int,
    Rational,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Int => "int",
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

/// Network given as a path (relative to the config file) or inline.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    Path(PathBuf),
    Inline(NetworkFile),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub xi_range: Option<(i64, i64)>,
    #[serde(default)]
    pub tau_range: Option<(i64, i64)>,
}

fn default_n() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialTimes {
    Named(String),
    Values(Vec<RawScalar>),
}

/// Experiment description as read from disk.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: Option<NetworkSource>,
    pub generator: Option<Generator>,
    pub rule: Option<CARule>,
    pub s0: Option<CAState>,
    pub x0: Option<InitialTimes>,
    pub k_max: Option<usize>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub time_scale: Option<f64>,
    /// Search limit for the synchronous orbit.
    pub orbit_cap: Option<usize>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub xi_range: Option<(i64, i64)>,
    pub tau_range: Option<(i64, i64)>,
}

/// Where the network came from, for metadata.
#[derive(Clone, Debug)]
pub enum Origin {
    File(PathBuf),
    Inline,
    Generated {
        seed: u64,
        xi_range: (i64, i64),
        tau_range: (i64, i64),
    },
}

/// A fully validated experiment, independent of arithmetic mode.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: NetworkSpec,
    network: NetworkFile,
    pub origin: Origin,
    pub rule: CARule,
    pub s0: CAState,
    x0: Option<Vec<RawScalar>>,
    pub k_max: usize,
    pub mode: Mode,
    pub tol: f64,
    pub out: PathBuf,
    pub time_scale: f64,
    pub orbit_cap: usize,
}

impl Experiment {
    pub fn resolve(cfg: ExperimentConfig, ov: Overrides) -> Result<Self> {
        let (network, origin) = match (cfg.network, cfg.generator) {
            (Some(_), Some(_)) => bail!("config gives both \"network\" and \"generator\""),
            (Some(NetworkSource::Path(p)), None) => {
                let path = cfg.base_dir.join(p);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading network {}", path.display()))?;
                let file: NetworkFile = serde_json::from_str(&text)
                    .with_context(|| format!("parsing network {}", path.display()))?;
                (file, Origin::File(path))
            }
            (Some(NetworkSource::Inline(file)), None) => (file, Origin::Inline),
            (None, generator) => {
                let g = generator.unwrap_or(Generator {
                    size: 10,
                    n: 3,
                    seed: None,
                    xi_range: None,
                    tau_range: None,
                });
                let seed = ov.seed.or(g.seed).unwrap_or(0);
                let xi_range = ov.xi_range.or(g.xi_range).unwrap_or(DEFAULT_XI_RANGE);
                let tau_range = ov.tau_range.or(g.tau_range).unwrap_or(DEFAULT_TAU_RANGE);
                let spec = NetworkSpec::regular_ring(g.size, g.n)?;
                let params = random_parameters(&spec, seed, xi_range, tau_range)?;
                (
                    NetworkFile::from_parts(&spec, &params),
                    Origin::Generated {
                        seed,
                        xi_range,
                        tau_range,
                    },
                )
            }
        };
        if !matches!(origin, Origin::Generated { .. })
            && (ov.seed.is_some() || ov.xi_range.is_some() || ov.tau_range.is_some())
        {
            bail!("--seed, --xi-range and --tau-range only apply to generated networks");
        }
        let mode = ov.mode.or(cfg.mode).unwrap_or(Mode::Int);
        let tol = cfg.tol.unwrap_or(tropical_ca::semiring::DEFAULT_TOLERANCE);
        if !(tol.is_finite() && tol >= 0.0) {
            bail!("tol must be a non-negative number");
        }

        // Parse the network once in the chosen mode so errors surface here.
        let spec = match mode {
            Mode::Int => network.clone().into_parts::<i64>()?.0,
            Mode::Rational => {
                network
                    .clone()
                    .into_parts::<tropical_ca::semiring::Rational>()?
                    .0
            }
            Mode::Float => {
                network
                    .clone()
                    .into_parts::<tropical_ca::semiring::Real>()?
                    .0
            }
        };
        let size = spec.size();
        let rule = cfg.rule.unwrap_or(if spec.is_eca_lattice() {
            CARule::EcaTable(150)
        } else {
            CARule::Parity
        });
        tropical_ca::ca::rule_inputs(rule, &spec)?;
        let s0 = cfg
            .s0
            .unwrap_or_else(|| CAState::single(size, (size - 1) / 2));
        if s0.len() != size {
            bail!("s0 has {} cells but the network has {size}", s0.len());
        }
        let x0 = match cfg.x0 {
            None => None,
            Some(InitialTimes::Named(name)) if name == "unit" => None,
            Some(InitialTimes::Named(name)) => bail!("x0 must be \"unit\" or a list, got {name:?}"),
            Some(InitialTimes::Values(v)) => {
                if v.len() != size {
                    bail!("x0 has {} entries but the network has {size}", v.len());
                }
                Some(v)
            }
        };
        let time_scale = cfg.time_scale.unwrap_or(2.0);
        if !(time_scale.is_finite() && time_scale > 0.0) {
            bail!("time_scale must be positive");
        }
        let exp = Experiment {
            spec,
            network,
            origin,
            rule,
            s0,
            x0,
            k_max: cfg.k_max.unwrap_or(40),
            mode,
            tol,
            out: ov.out.or(cfg.out).unwrap_or_else(|| PathBuf::from("out")),
            time_scale,
            orbit_cap: cfg.orbit_cap.unwrap_or(1 << 20),
        };
        match mode {
            Mode::Int => drop(exp.timing::<i64>()?),
            Mode::Rational => drop(exp.timing::<tropical_ca::semiring::Rational>()?),
            Mode::Float => drop(exp.timing::<tropical_ca::semiring::Real>()?),
        }
        Ok(exp)
    }

    /// Timing parameters and initial times in arithmetic `T`.
    pub fn timing<T: Scalar>(&self) -> Result<(TimingParameters<T>, MaxPlusVector<T>)> {
        let (_, params) = self.network.clone().into_parts::<T>()?;
        let x0 = match &self.x0 {
            None => MaxPlusVector::unit(self.spec.size()),
            Some(raw) => {
                let mut values = Vec::with_capacity(raw.len());
                for (idx, r) in raw.iter().enumerate() {
                    let v = T::from_raw(r).with_context(|| format!("x0[{idx}]"))?;
                    values.push(v);
                }
                MaxPlusVector::from_finite(values)
            }
        };
        Ok((params, x0))
    }

    /// `key=value` lines embedded in every output file.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut meta = vec![
            ("mode".to_string(), self.mode.name().to_string()),
            ("rule".to_string(), self.rule.to_string()),
            ("s0".to_string(), self.s0.to_string()),
            ("k_max".to_string(), self.k_max.to_string()),
        ];
        match &self.origin {
            Origin::File(p) => meta.push(("network_file".into(), p.display().to_string())),
            Origin::Inline => {}
            Origin::Generated {
                seed,
                xi_range,
                tau_range,
            } => {
                meta.push(("seed".into(), seed.to_string()));
                meta.push((
                    "xi_range".into(),
                    format!("[{},{}]", xi_range.0, xi_range.1),
                ));
                meta.push((
                    "tau_range".into(),
                    format!("[{},{}]", tau_range.0, tau_range.1),
                ));
            }
        }
        meta.push((
            "network".into(),
            serde_json::to_string(&self.network).unwrap_or_default(),
        ));
        meta
    }

    pub fn network_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.network)? + "\n")
    }
}

/// `"lo,hi"` or `"lo..hi"`.
pub fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let lo = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}
