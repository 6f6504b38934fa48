use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use schatten_core::datagen::{AdversaryStrategy, Family};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    PackingLp,
    PackingSdp,
    Boxed,
    FilterPca,
    FastPca,
    Sweep,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::PackingLp => "packing-lp",
            Task::PackingSdp => "packing-sdp",
            Task::Boxed => "boxed",
            Task::FilterPca => "filter-pca",
            Task::FastPca => "fast-pca",
            Task::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .with_context(|| format!("unknown task {s:?}"))
    }

    pub fn is_pca(self) -> bool {
        matches!(self, Task::FilterPca | Task::FastPca)
    }
}

/// A norm order written as a number or `"inf"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Number(f64),
    Text(String),
}

impl OrderSpec {
    pub fn value(&self) -> Result<f64> {
        match self {
            OrderSpec::Number(p) => Ok(*p),
            OrderSpec::Text(s) => parse_order(s),
        }
    }
}

pub fn parse_order(s: &str) -> Result<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().with_context(|| format!("order {s:?} is neither a number nor \"inf\"")),
    }
}

pub fn order_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    RandomLp {
        n: usize,
        d: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    RandomSdp {
        n: usize,
        d: usize,
        #[serde(default = "one_usize")]
        rank: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Spiked {
        n: usize,
        d: usize,
        top: f64,
        rest: f64,
        #[serde(default = "one_usize")]
        rank: usize,
        #[serde(default = "gaussian")]
        family: Family,
        #[serde(default = "no_adversary")]
        adversary: AdversaryStrategy,
    },
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn gaussian() -> Family {
    Family::Gaussian
}

fn no_adversary() -> AdversaryStrategy {
    AdversaryStrategy::None
}

impl GeneratorSpec {
    pub fn default_for(task: Task) -> Self {
        match task {
            Task::PackingLp => GeneratorSpec::RandomLp { n: 10, d: 10, scale: 1.0 },
            Task::PackingSdp | Task::Boxed => GeneratorSpec::RandomSdp {
                n: 10,
                d: 6,
                rank: 1,
                scale: 1.0,
            },
            _ => {
                let d = 5;
                let mut e2 = vec![0.0; d];
                e2[1] = 1.0;
                GeneratorSpec::Spiked {
                    n: 200,
                    d,
                    top: 10.0,
                    rest: 1.0,
                    rank: 1,
                    family: Family::Gaussian,
                    adversary: AdversaryStrategy::DirectionSpike {
                        direction: e2,
                        magnitude: 12.0,
                    },
                }
            }
        }
    }
}

/// Unspecified absolute constants of the robust PCA algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub c_prime: f64,
    pub c_filter: f64,
    pub c_tail: f64,
    pub c_iter: f64,
    pub c_star: f64,
    pub c_box: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c_prime: 1.0,
            c_filter: 5.0,
            c_tail: 20.0,
            c_iter: 10.0,
            c_star: 1.0,
            c_box: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub task: Option<Task>,
    pub eps: Option<Vec<f64>>,
}

/// The JSON config file; every field is optional and command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<Task>,
    pub instance: Option<InstanceSource>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub p: Option<OrderSpec>,
    pub alpha: Option<f64>,
    pub t: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub output: Option<PathBuf>,
    pub trace: Option<bool>,
    pub naive_baseline: Option<bool>,
    pub sketched: Option<bool>,
    pub constants: Option<Constants>,
    pub sweep: Option<SweepSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub instance: Option<PathBuf>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub p: Option<String>,
    pub alpha: Option<f64>,
    pub t: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub out: Option<PathBuf>,
    pub trace: bool,
    pub naive: bool,
    pub sketched: bool,
    pub sweep_task: Option<String>,
    pub eps_list: Option<Vec<f64>>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub task: Task,
    /// Task run per grid point when `task` is `Sweep`.
    pub sweep_task: Option<Task>,
    pub instance: InstanceSource,
    pub eps: f64,
    /// Grid of `eps` values swept; a single entry outside sweeps.
    pub eps_grid: Vec<f64>,
    pub delta: f64,
    #[serde(serialize_with = "serialize_order")]
    pub p: f64,
    pub alpha: f64,
    pub t: usize,
    pub seed: u64,
    pub seeds: usize,
    pub output: PathBuf,
    pub trace: bool,
    pub naive_baseline: bool,
    pub sketched: bool,
    pub constants: Constants,
}

fn serialize_order<S: serde::Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&order_label(*p))
}

impl ExperimentConfig {
    /// Merges flags over the file over built-in defaults. `env_seed` is used
    /// only when neither flags nor file set a seed.
    pub fn resolve(task: Task, file: FileConfig, flags: Overrides, env_seed: Option<u64>) -> Result<Self> {
        if let Some(t) = file.task {
            if t != task {
                bail!("config field `task`: file says {:?} but the subcommand runs {:?}", t.name(), task.name());
            }
        }
        let sweep = file.sweep.unwrap_or_default();
        let sweep_task = match (&flags.sweep_task, sweep.task) {
            (Some(s), _) => Some(Task::parse(s)?),
            (None, t) => t,
        };
        let sweep_task = if task == Task::Sweep {
            let t = sweep_task.unwrap_or(Task::FastPca);
            if t == Task::Sweep {
                bail!("config field `sweep.task`: a sweep cannot sweep sweeps");
            }
            Some(t)
        } else {
            None
        };
        let inner = sweep_task.unwrap_or(task);

        let instance = match flags.instance {
            Some(path) => InstanceSource::File(path),
            None => file
                .instance
                .unwrap_or_else(|| InstanceSource::Generator(GeneratorSpec::default_for(inner))),
        };
        let eps = flags.eps.or(file.eps).unwrap_or(0.1);
        let eps_grid = if task == Task::Sweep {
            flags.eps_list.or(sweep.eps).unwrap_or_else(|| vec![eps])
        } else {
            vec![eps]
        };
        let p = match (flags.p, file.p) {
            (Some(s), _) => parse_order(&s).context("flag --p")?,
            (None, Some(spec)) => spec.value().context("config field `p`")?,
            (None, None) => 3.0,
        };
        let cfg = Self {
            task,
            sweep_task,
            instance,
            eps,
            eps_grid,
            delta: flags.delta.or(file.delta).unwrap_or(0.1),
            p,
            alpha: flags.alpha.or(file.alpha).unwrap_or(eps),
            t: flags.t.or(file.t).unwrap_or(1),
            seed: flags.seed.or(file.seed).or(env_seed).unwrap_or(0),
            seeds: flags.seeds.or(file.seeds).unwrap_or(1),
            output: flags.out.or(file.output).unwrap_or_else(|| PathBuf::from("results")),
            trace: flags.trace || file.trace.unwrap_or(false),
            naive_baseline: flags.naive || file.naive_baseline.unwrap_or(false),
            sketched: flags.sketched || file.sketched.unwrap_or(false),
            constants: file.constants.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The task actually executed per run.
    pub fn inner_task(&self) -> Task {
        self.sweep_task.unwrap_or(self.task)
    }

    fn validate(&self) -> Result<()> {
        let inner = self.inner_task();
        for &eps in &self.eps_grid {
            let ok = if inner.is_pca() { eps > 0.0 && eps < 0.5 } else { eps > 0.0 && eps <= 0.5 };
            if !ok {
                bail!("config field `eps`: {eps} is outside the range accepted by {}", inner.name());
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!("config field `delta`: {} must lie in (0, 1)", self.delta);
        }
        if self.seeds == 0 {
            bail!("config field `seeds`: must be at least 1");
        }
        if !(self.p >= 1.0) {
            bail!("config field `p`: {} must be at least 1", self.p);
        }
        if self.t == 0 {
            bail!("config field `t`: must be at least 1");
        }
        if let InstanceSource::File(path) = &self.instance {
            if !path.exists() {
                bail!("config field `instance.file`: {} does not exist", path.display());
            }
        }
        match (&self.instance, inner) {
            (InstanceSource::Generator(GeneratorSpec::RandomLp { .. }), Task::PackingLp)
            | (InstanceSource::Generator(GeneratorSpec::RandomSdp { .. }), Task::PackingSdp | Task::Boxed)
            | (InstanceSource::Generator(GeneratorSpec::Spiked { .. }), Task::FilterPca | Task::FastPca)
            | (InstanceSource::File(_), _) => Ok(()),
            (InstanceSource::Generator(g), t) => {
                bail!("config field `instance.generator`: {g:?} cannot feed task {}", t.name())
            }
        }
    }
}
