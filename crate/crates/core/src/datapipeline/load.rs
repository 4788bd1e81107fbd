use std::fs::{self, File};
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    color_table_hash, grammar_version, io_err, DatasetError, Manifest, Split, FORMAT_VERSION,
};
use crate::metrics::{Candidate, RunInput, RunInstance};
use crate::worldmodel::WorldModel;

/// One stored instance. Images are referenced by path, not loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub split: Split,
    pub index: usize,
    pub world: WorldModel,
    pub image: PathBuf,
    /// One caption for train/val, the references for test.
    pub captions: Vec<String>,
}

/// A generated dataset on disk, validated against this build's grammar and color table.
#[derive(Debug, Clone)]
pub struct Dataset {
    root: PathBuf,
    meta: Manifest,
}

#[derive(Deserialize)]
struct CaptionLine {
    id: String,
    caption: String,
}

#[derive(Deserialize)]
struct ReferenceLine {
    id: String,
    captions: Vec<String>,
}

impl Dataset {
    pub fn open(dir: &Path) -> Result<Dataset, DatasetError> {
        let meta_path = dir.join("meta.json");
        let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let meta: Manifest = serde_json::from_str(&text).map_err(|e| DatasetError::Malformed {
            path: meta_path.clone(),
            line: e.line(),
            reason: e.to_string(),
        })?;
        let checks = [
            (
                "format version",
                FORMAT_VERSION.to_string(),
                meta.format_version.to_string(),
            ),
            (
                "grammar version",
                grammar_version(),
                meta.grammar_version.clone(),
            ),
            (
                "color table hash",
                color_table_hash(),
                meta.color_table_hash.clone(),
            ),
        ];
        for (field, expected, found) in checks {
            if expected != found {
                return Err(DatasetError::VersionMismatch {
                    field,
                    expected,
                    found,
                });
            }
        }
        Ok(Dataset {
            root: dir.to_path_buf(),
            meta,
        })
    }

    pub fn meta(&self) -> &Manifest {
        &self.meta
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn len(&self, split: Split) -> usize {
        self.meta.count(split)
    }

    pub fn is_empty(&self, split: Split) -> bool {
        self.len(split) == 0
    }

    fn captions_path(&self, split: Split) -> PathBuf {
        self.root.join(split.name()).join(match split {
            Split::Test => "references.jsonl",
            _ => "captions.jsonl",
        })
    }

    /// Streams the instances of a split in index order.
    pub fn instances(&self, split: Split) -> Result<InstanceIter, DatasetError> {
        let dir = self.root.join(split.name());
        let worlds_path = dir.join("worlds.jsonl");
        let captions_path = self.captions_path(split);
        let open = |p: &Path| -> Result<Lines<BufReader<File>>, DatasetError> {
            Ok(BufReader::new(File::open(p).map_err(io_err(p))?).lines())
        };
        Ok(InstanceIter {
            split,
            expected: self.meta.count(split),
            captions_per_instance: self.meta.captions_per_instance(split),
            images: dir.join("images"),
            worlds: open(&worlds_path)?,
            captions: open(&captions_path)?,
            worlds_path,
            captions_path,
            index: 0,
            done: false,
        })
    }

    pub fn load_split(&self, split: Split) -> Result<Vec<Instance>, DatasetError> {
        self.instances(split)?.collect()
    }

    /// Looks up one instance by its id (e.g. `train-000003`).
    pub fn instance(&self, id: &str) -> Result<Instance, DatasetError> {
        let (split, index) =
            super::parse_instance_id(id).ok_or_else(|| DatasetError::UnknownId(id.into()))?;
        if index >= self.len(split) {
            return Err(DatasetError::UnknownId(id.into()));
        }
        self.instances(split)?
            .nth(index)
            .unwrap_or_else(|| Err(DatasetError::UnknownId(id.into())))
    }
}

pub struct InstanceIter {
    split: Split,
    expected: usize,
    captions_per_instance: usize,
    images: PathBuf,
    worlds: Lines<BufReader<File>>,
    captions: Lines<BufReader<File>>,
    worlds_path: PathBuf,
    captions_path: PathBuf,
    index: usize,
    done: bool,
}

impl InstanceIter {
    fn malformed(&self, path: &Path, reason: impl Into<String>) -> DatasetError {
        DatasetError::Malformed {
            path: path.to_path_buf(),
            line: self.index + 1,
            reason: reason.into(),
        }
    }

    fn read_next(&mut self) -> Result<Option<Instance>, DatasetError> {
        let world_line = self
            .worlds
            .next()
            .transpose()
            .map_err(io_err(&self.worlds_path))?;
        let caption_line = self
            .captions
            .next()
            .transpose()
            .map_err(io_err(&self.captions_path))?;
        let (world_line, caption_line) = match (world_line, caption_line) {
            (None, None) if self.index == self.expected => return Ok(None),
            (None, None) => {
                return Err(DatasetError::Corrupt(format!(
                    "{} split ends after {} instances, manifest says {}",
                    self.split, self.index, self.expected
                )))
            }
            (Some(_), None) => {
                return Err(DatasetError::Corrupt(format!(
                    "{} is truncated at line {}",
                    self.captions_path.display(),
                    self.index + 1
                )))
            }
            (None, Some(_)) => {
                return Err(DatasetError::Corrupt(format!(
                    "{} is truncated at line {}",
                    self.worlds_path.display(),
                    self.index + 1
                )))
            }
            (Some(w), Some(c)) => (w, c),
        };
        if self.index >= self.expected {
            return Err(DatasetError::Corrupt(format!(
                "{} split has more than the {} instances in the manifest",
                self.split, self.expected
            )));
        }

        let world: WorldModel = serde_json::from_str(&world_line)
            .map_err(|e| self.malformed(&self.worlds_path, e.to_string()))?;
        let (caption_id, captions) = if self.split == Split::Test {
            let r: ReferenceLine = serde_json::from_str(&caption_line)
                .map_err(|e| self.malformed(&self.captions_path, e.to_string()))?;
            (r.id, r.captions)
        } else {
            let c: CaptionLine = serde_json::from_str(&caption_line)
                .map_err(|e| self.malformed(&self.captions_path, e.to_string()))?;
            (c.id, vec![c.caption])
        };

        let id = self.split.instance_id(self.index);
        if world.id != id || caption_id != id {
            return Err(DatasetError::Corrupt(format!(
                "line {} of the {} split holds ids {}/{}, expected {id}",
                self.index + 1,
                self.split,
                world.id,
                caption_id
            )));
        }
        if captions.len() != self.captions_per_instance {
            return Err(self.malformed(
                &self.captions_path,
                format!(
                    "{} captions, expected {}",
                    captions.len(),
                    self.captions_per_instance
                ),
            ));
        }
        let instance = Instance {
            id,
            split: self.split,
            index: self.index,
            world,
            image: self.images.join(Split::image_name(self.index)),
            captions,
        };
        self.index += 1;
        Ok(Some(instance))
    }
}

impl Iterator for InstanceIter {
    type Item = Result<Instance, DatasetError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_next() {
            Ok(Some(inst)) => Some(Ok(inst)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Joins the test split with candidates that have already been aligned by id.
pub fn build_run_input(
    dataset: &Dataset,
    candidates: &[Candidate],
) -> Result<RunInput, DatasetError> {
    let by_id: std::collections::HashMap<&str, &str> = candidates
        .iter()
        .map(|c| (c.id.as_str(), c.caption.as_str()))
        .collect();
    let mut instances = Vec::with_capacity(dataset.len(Split::Test));
    for inst in dataset.instances(Split::Test)? {
        let inst = inst?;
        let candidate = by_id
            .get(inst.id.as_str())
            .ok_or_else(|| DatasetError::MissingIds(vec![inst.id.clone()]))?;
        instances.push(RunInstance {
            id: inst.id,
            world: inst.world,
            references: inst.captions,
            candidate: candidate.to_string(),
        });
    }
    Ok(RunInput {
        task: dataset.meta().task,
        instances,
    })
}
