//! Dataset generation into the on-disk layout, loading, candidate files and baseline bots.
//!
//! ```text
//! out_dir/meta.json
//! out_dir/{train,val,test}/images/NNNNNN.png
//! out_dir/{train,val,test}/worlds.jsonl
//! out_dir/{train,val}/captions.jsonl      {"id","caption"}
//! out_dir/test/references.jsonl           {"id","captions":[...]}
//! ```

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grammar::{generate_caption, GenerateError};
use crate::metrics::MetricsError;
use crate::renderer::{self, COLOR_TABLE, DEFAULT_CANVAS, MIN_CANVAS};
use crate::worldmodel::{sample_world, Task, WorldModel, WorldSpec};

mod baseline;
mod candidates;
mod load;

pub use baseline::{make_baseline, Bot};
pub use candidates::{align_candidates, read_candidates, write_candidates};
pub use load::{build_run_input, Dataset, Instance, InstanceIter};

pub const FORMAT_VERSION: u32 = 1;
/// Worlds resampled per instance when no true caption can be generated for them.
pub const MAX_WORLD_ATTEMPTS: usize = 100;
const CHUNK: usize = 4096;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("corrupt dataset: {0}")]
    Corrupt(String),
    #[error("dataset {field} is {found}, this build expects {expected}; regenerate the dataset")]
    VersionMismatch {
        field: &'static str,
        expected: String,
        found: String,
    },
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("duplicate candidate id {0}")]
    DuplicateId(String),
    #[error("missing candidate ids ({} total): {}", .0.len(), .0.join(", "))]
    MissingIds(Vec<String>),
    #[error("candidate ids not in the test split: {}", .0.join(", "))]
    ExtraIds(Vec<String>),
    #[error("bot {bot} cannot run on task {task}")]
    BotTaskMismatch { bot: Bot, task: Task },
    #[error("unknown instance id {0}")]
    UnknownId(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn from_name(name: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Globally unique instance id, e.g. `test-000042`.
    pub fn instance_id(self, index: usize) -> String {
        format!("{}-{index:06}", self.name())
    }

    pub fn image_name(index: usize) -> String {
        format!("{index:06}.png")
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Splits an id like `val-000007` into its split and index.
pub fn parse_instance_id(id: &str) -> Option<(Split, usize)> {
    let (split, index) = id.split_once('-')?;
    if index.len() < 6 || !index.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((Split::from_name(split)?, index.parse().ok()?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub task: Task,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub n_refs: usize,
    pub master_seed: u64,
    pub canvas_size: u32,
    /// Seeded per-entity brightness jitter in the rendered images.
    pub jitter: bool,
}

impl DatasetSpec {
    pub fn new(task: Task) -> DatasetSpec {
        DatasetSpec {
            task,
            n_train: 200_000,
            n_val: 4096,
            n_test: 4096,
            n_refs: 10,
            master_seed: 0,
            canvas_size: DEFAULT_CANVAS,
            jitter: false,
        }
    }

    pub fn count(&self, split: Split) -> usize {
        match split {
            Split::Train => self.n_train,
            Split::Val => self.n_val,
            Split::Test => self.n_test,
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        for split in Split::ALL {
            if self.count(split) == 0 {
                return Err(DatasetError::InvalidSpec(format!(
                    "{split} count must be >= 1"
                )));
            }
        }
        if self.n_refs == 0 {
            return Err(DatasetError::InvalidSpec("refs must be >= 1".into()));
        }
        if self.canvas_size < MIN_CANVAS {
            return Err(DatasetError::InvalidSpec(format!(
                "canvas must be at least {MIN_CANVAS} px"
            )));
        }
        Ok(())
    }
}

/// Contents of `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub grammar_version: String,
    pub color_table_hash: String,
    pub task: Task,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub n_refs: usize,
    pub master_seed: u64,
    pub canvas_size: u32,
    pub jitter: bool,
    /// Files holding ground truth that evaluated models must not see.
    pub evaluation_only: Vec<String>,
}

impl Manifest {
    pub fn count(&self, split: Split) -> usize {
        match split {
            Split::Train => self.n_train,
            Split::Val => self.n_val,
            Split::Test => self.n_test,
        }
    }

    pub fn captions_per_instance(&self, split: Split) -> usize {
        match split {
            Split::Test => self.n_refs,
            _ => 1,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of everything that determines the caption language.
pub fn grammar_version() -> String {
    use crate::grammar::{Fraction, Frame, Relation, GRAMMAR_REVISION, NUMBER_WORDS};
    use crate::worldmodel::{Color, Shape};
    let mut sig = format!("revision={GRAMMAR_REVISION};");
    for s in Shape::ALL {
        sig += &format!("shape={},{};", s.word(), s.plural());
    }
    for c in Color::ALL {
        sig += &format!("color={};", c.word());
    }
    for r in Relation::ALL {
        sig += &format!("relation={};", r.words().join(" "));
    }
    for f in Fraction::ALL {
        for p in f.phrases() {
            sig += &format!("fraction={f}:{};", p.join(" "));
        }
    }
    sig += &format!("numbers={};", NUMBER_WORDS.join(","));
    for f in Frame::ALL {
        sig += &format!("frame={};", f.code());
    }
    sha256_hex(sig.as_bytes())
}

pub fn color_table_hash() -> String {
    let mut bytes = Vec::new();
    for (color, rgb) in COLOR_TABLE {
        bytes.extend_from_slice(color.word().as_bytes());
        bytes.extend_from_slice(&rgb);
    }
    sha256_hex(&bytes)
}

fn derive_seed(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Stable per-instance seed, so any instance can be regenerated in isolation.
pub fn instance_seed(master_seed: u64, split: Split, index: usize) -> u64 {
    derive_seed(&[
        &master_seed.to_le_bytes(),
        split.name().as_bytes(),
        &(index as u64).to_le_bytes(),
    ])
}

fn reference_seed(instance_seed: u64, attempt: usize, reference: usize) -> u64 {
    derive_seed(&[
        &instance_seed.to_le_bytes(),
        b"reference",
        &(attempt as u64).to_le_bytes(),
        &(reference as u64).to_le_bytes(),
    ])
}

/// A fully generated instance, prior to writing.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub index: usize,
    pub world: WorldModel,
    pub captions: Vec<String>,
    pub png: Vec<u8>,
}

/// Generates instance `index` of `split` from its derived seed alone.
pub fn generate_instance(
    spec: &DatasetSpec,
    split: Split,
    index: usize,
) -> Result<GeneratedInstance, DatasetError> {
    let seed = instance_seed(spec.master_seed, split, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let world_spec = WorldSpec::for_task(spec.task);
    let id = split.instance_id(index);
    let n_captions = match split {
        Split::Test => spec.n_refs,
        _ => 1,
    };

    for attempt in 0..MAX_WORLD_ATTEMPTS {
        let world = sample_world(&world_spec, id.clone(), &mut rng)
            .map_err(|e| DatasetError::Generation(e.to_string()))?;
        let captions: Result<Vec<String>, GenerateError> = if split == Split::Test {
            (0..n_captions)
                .map(|k| {
                    let mut ref_rng = ChaCha8Rng::seed_from_u64(reference_seed(seed, attempt, k));
                    generate_caption(&world, spec.task, &mut ref_rng).map(|(c, _)| c)
                })
                .collect()
        } else {
            generate_caption(&world, spec.task, &mut rng).map(|(c, _)| vec![c])
        };
        let captions = match captions {
            Ok(c) => c,
            Err(GenerateError::Exhausted { .. }) => continue,
            Err(e) => return Err(DatasetError::Generation(e.to_string())),
        };
        let bitmap = if spec.jitter {
            let mut jitter_rng =
                ChaCha8Rng::seed_from_u64(derive_seed(&[&seed.to_le_bytes(), b"jitter"]));
            renderer::render(&world, spec.canvas_size, Some(&mut jitter_rng))
        } else {
            renderer::render_plain(&world, spec.canvas_size)
        };
        let png = bitmap
            .to_png_bytes()
            .map_err(|e| DatasetError::Generation(e.to_string()))?;
        return Ok(GeneratedInstance {
            index,
            world,
            captions,
            png,
        });
    }
    Err(DatasetError::Generation(format!(
        "no usable world for {id} after {MAX_WORLD_ATTEMPTS} attempts"
    )))
}

#[derive(Serialize)]
struct CaptionRecord<'a> {
    id: &'a str,
    caption: &'a str,
}

#[derive(Serialize)]
struct ReferenceRecord<'a> {
    id: &'a str,
    captions: &'a [String],
}

fn create(path: &Path) -> Result<BufWriter<File>, DatasetError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_line(out: &mut impl Write, path: &Path, line: &str) -> Result<(), DatasetError> {
    out.write_all(line.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(io_err(path))
}

fn write_split(spec: &DatasetSpec, split: Split, out_dir: &Path) -> Result<(), DatasetError> {
    let dir = out_dir.join(split.name());
    let images = dir.join("images");
    fs::create_dir_all(&images).map_err(io_err(&images))?;
    let worlds_path = dir.join("worlds.jsonl");
    let captions_path = dir.join(match split {
        Split::Test => "references.jsonl",
        _ => "captions.jsonl",
    });
    let mut worlds = create(&worlds_path)?;
    let mut captions = create(&captions_path)?;

    let n = spec.count(split);
    for start in (0..n).step_by(CHUNK) {
        let chunk = (start..(start + CHUNK).min(n))
            .into_par_iter()
            .map(|i| generate_instance(spec, split, i))
            .collect::<Result<Vec<_>, _>>()?;
        for inst in chunk {
            let id = inst.world.id.as_str();
            write_line(&mut worlds, &worlds_path, &inst.world.to_json_line())?;
            let line = match split {
                Split::Test => serde_json::to_string(&ReferenceRecord {
                    id,
                    captions: &inst.captions,
                }),
                _ => serde_json::to_string(&CaptionRecord {
                    id,
                    caption: &inst.captions[0],
                }),
            }
            .expect("caption records serialize");
            write_line(&mut captions, &captions_path, &line)?;
            let image_path = images.join(Split::image_name(inst.index));
            fs::write(&image_path, &inst.png).map_err(io_err(&image_path))?;
        }
    }
    worlds.flush().map_err(io_err(&worlds_path))?;
    captions.flush().map_err(io_err(&captions_path))?;
    Ok(())
}

/// Writes the full dataset layout under `out_dir` and returns the manifest.
pub fn generate_dataset(spec: &DatasetSpec, out_dir: &Path) -> Result<Manifest, DatasetError> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    for split in Split::ALL {
        write_split(spec, split, out_dir)?;
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        grammar_version: grammar_version(),
        color_table_hash: color_table_hash(),
        task: spec.task,
        n_train: spec.n_train,
        n_val: spec.n_val,
        n_test: spec.n_test,
        n_refs: spec.n_refs,
        master_seed: spec.master_seed,
        canvas_size: spec.canvas_size,
        jitter: spec.jitter,
        evaluation_only: vec!["test/worlds.jsonl".into()],
    };
    let meta_path = out_dir.join("meta.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&meta_path, json).map_err(io_err(&meta_path))?;
    Ok(manifest)
}
