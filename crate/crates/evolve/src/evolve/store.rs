use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{EvolutionConfig, EvolveError, GenerationStats, Individual};

/// Everything needed to continue a run after generation `generation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionState {
    pub generation: usize,
    pub next_id: u64,
    pub population: Vec<Individual>,
    pub best_ever: Individual,
    pub stats: Vec<GenerationStats>,
}

/// Output directory of one run:
/// - `config.json`: the configuration snapshot
/// - `gen_XXXX.json`: state after each completed generation
/// - `stats.csv`: one row per completed generation
/// - `best.dsl`: the best program so far
#[derive(Debug, Clone)]
pub struct RunStore {
    dir: PathBuf,
}

const CONFIG_FILE: &str = "config.json";
const STATS_FILE: &str = "stats.csv";
const BEST_FILE: &str = "best.dsl";

impl RunStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn generation_path(&self, t: usize) -> PathBuf {
        self.dir.join(format!("gen_{t:04}.json"))
    }

    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> EvolveError + '_ {
        move |source| EvolveError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Writes through a temporary file so an interrupted run never leaves
    /// a truncated file behind.
    fn write(&self, name: &str, bytes: &[u8]) -> Result<(), EvolveError> {
        fs::create_dir_all(&self.dir).map_err(Self::io(&self.dir))?;
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).map_err(Self::io(&tmp))?;
        fs::rename(&tmp, &path).map_err(Self::io(&path))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), EvolveError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| EvolveError::Json {
            path: self.dir.join(name),
            source,
        })?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, EvolveError> {
        let bytes = fs::read(path).map_err(Self::io(path))?;
        serde_json::from_slice(&bytes).map_err(|source| EvolveError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn save_config(&self, config: &EvolutionConfig) -> Result<(), EvolveError> {
        self.write_json(CONFIG_FILE, config)
    }

    pub fn load_config(&self) -> Result<Option<EvolutionConfig>, EvolveError> {
        let path = self.dir.join(CONFIG_FILE);
        if !path.exists() {
            return Ok(None);
        }
        Self::read_json(&path).map(Some)
    }

    pub fn save_generation(&self, state: &EvolutionState) -> Result<(), EvolveError> {
        let name = format!("gen_{:04}.json", state.generation);
        self.write_json(&name, state)?;

        let mut csv = csv::Writer::from_writer(Vec::new());
        for row in &state.stats {
            csv.serialize(row).expect("writing to memory");
        }
        let bytes = csv.into_inner().expect("writing to memory");
        self.write(STATS_FILE, &bytes)?;

        let best = &state.best_ever;
        let mut text = format!(
            "# fitness {} (id {}, born in generation {})\n",
            best.fitness.unwrap_or(0.0),
            best.id,
            best.birth_generation
        );
        let description = best.description.split_whitespace().collect::<Vec<_>>().join(" ");
        if !description.is_empty() {
            text.push_str(&format!("# {description}\n"));
        }
        text.push_str(&best.program.to_string());
        self.write(BEST_FILE, text.as_bytes())
    }

    pub fn load_generation(&self, t: usize) -> Result<EvolutionState, EvolveError> {
        Self::read_json(&self.generation_path(t))
    }

    /// Highest completed generation on disk, if any.
    pub fn latest_generation(&self) -> Result<Option<usize>, EvolveError> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Self::io(&self.dir)(e)),
        };
        let mut latest = None;
        for entry in entries {
            let name = entry.map_err(Self::io(&self.dir))?.file_name();
            let t = name
                .to_str()
                .and_then(|n| n.strip_prefix("gen_"))
                .and_then(|n| n.strip_suffix(".json"))
                .and_then(|n| n.parse::<usize>().ok());
            if let Some(t) = t {
                latest = latest.max(Some(t));
            }
        }
        Ok(latest)
    }
}
