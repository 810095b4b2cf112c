//! Dataset loading: line-delimited JSON manifests plus per-instance maps.
//!
//! A manifest line looks like
//!
//! ```text
//! {"id":"f30k-0","map_path":"maps/f30k-0.npy","boxes":[[10,12,80,90]],"prompt":"his daughter",
//!  "dataset":"flickr30k_entities","split":"test","setting":"phrase","model":"albef_amc"}
//! ```
//!
//! `map_path` is relative to the manifest's directory. Maps are `.npy`
//! (2-D float32/float64) or a text grid: a `H W` line followed by `H` rows of
//! `W` numbers.

pub mod npy;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActivationMap, BoundingBox, GroundTruth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Phrase,
    Referring,
    /// Whole subject-relation-object clause, scored against the subject's boxes.
    Triplet,
    Subject,
    Object,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Phrase => "phrase",
            Setting::Referring => "referring",
            Setting::Triplet => "triplet",
            Setting::Subject => "subject",
            Setting::Object => "object",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::InvalidParameter(format!("unknown setting `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingInstance {
    pub id: String,
    pub map_path: PathBuf,
    pub boxes: Vec<BoundingBox>,
    #[serde(default)]
    pub prompt: String,
    pub dataset: String,
    pub split: String,
    pub setting: Setting,
    pub model: String,
}

const REQUIRED_FIELDS: [&str; 7] = ["id", "map_path", "boxes", "dataset", "split", "setting", "model"];

fn parse_line(line: &str, lineno: usize) -> Result<GroundingInstance> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: lineno,
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| Error::Parse {
        line: lineno,
        message: "record is not a JSON object".into(),
    })?;
    if let Some(field) = REQUIRED_FIELDS.iter().find(|f| !obj.contains_key(**f)) {
        return Err(Error::MissingField {
            line: lineno,
            field: (*field).to_owned(),
        });
    }
    serde_json::from_value(value).map_err(|e| Error::Parse {
        line: lineno,
        message: e.to_string(),
    })
}

/// Streams instances from a manifest, one per non-blank line.
///
/// Map paths are resolved against `base_dir`. Duplicate ids are not detected
/// here; see [`load_manifest`].
pub struct ManifestReader<R> {
    lines: std::io::Lines<R>,
    lineno: usize,
    base_dir: PathBuf,
}

impl<R: BufRead> ManifestReader<R> {
    pub fn new(reader: R, base_dir: impl Into<PathBuf>) -> Self {
        ManifestReader {
            lines: reader.lines(),
            lineno: 0,
            base_dir: base_dir.into(),
        }
    }
}

impl<R: BufRead> Iterator for ManifestReader<R> {
    type Item = Result<(usize, GroundingInstance)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.lineno += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(parse_line(&line, self.lineno).map(|mut inst| {
                inst.map_path = self.base_dir.join(&inst.map_path);
                (self.lineno, inst)
            }));
        }
    }
}

/// Reads a whole manifest in file order, rejecting duplicate ids.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<GroundingInstance>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::Open {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for item in ManifestReader::new(BufReader::new(file), base) {
        let (line, inst) = item?;
        if !seen.insert(inst.id.clone()) {
            return Err(Error::DuplicateId { line, id: inst.id });
        }
        out.push(inst);
    }
    Ok(out)
}

/// Writes instances as manifest lines; `map_path` values are written verbatim.
pub fn write_manifest<W: Write>(mut writer: W, instances: &[GroundingInstance]) -> Result<()> {
    for inst in instances {
        serde_json::to_writer(&mut writer, inst)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Parses the text grid format.
pub fn parse_text_grid(text: &str) -> Result<ActivationMap> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, dims) = lines.next().ok_or_else(|| Error::UnsupportedFormat("empty text grid".into()))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::UnsupportedFormat(format!("bad grid header `{dims}`")))?;
    let [h, w] = dims[..] else {
        return Err(Error::UnsupportedFormat("grid header must be `H W`".into()));
    };
    let mut values = Vec::with_capacity(h * w);
    let mut rows = 0;
    for (idx, line) in lines {
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("`{tok}` is not a number"),
            })?;
            values.push(v);
        }
        if values.len() - before != w {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {w} values, found {}", values.len() - before),
            });
        }
        rows += 1;
    }
    if rows != h {
        return Err(Error::UnsupportedFormat(format!("grid header says {h} rows, found {rows}")));
    }
    ActivationMap::new(h, w, values)
}

pub fn format_text_grid(map: &ActivationMap) -> String {
    let mut out = format!("{} {}\n", map.height(), map.width());
    for i in 0..map.height() {
        let row: Vec<String> = map.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Loads and validates a map, detecting `.npy` by its magic bytes.
pub fn load_map(path: impl AsRef<Path>) -> Result<ActivationMap> {
    let bytes = fs::read(path)?;
    decode_map(&bytes)
}

pub fn decode_map(bytes: &[u8]) -> Result<ActivationMap> {
    if bytes.starts_with(npy::MAGIC) {
        return npy::decode(bytes);
    }
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_text_grid(text),
        Err(_) => Err(Error::UnsupportedFormat("neither npy nor a text grid".into())),
    }
}

fn map_load_error(path: &Path, e: Error) -> Error {
    Error::MapLoad {
        path: path.to_path_buf(),
        source: Box::new(e),
    }
}

/// Loads the instance's map and builds its ground truth on the map's grid.
pub fn load_instance(inst: &GroundingInstance) -> Result<(ActivationMap, GroundTruth)> {
    if inst.boxes.is_empty() {
        return Err(Error::EmptyBoxList);
    }
    let map = load_map(&inst.map_path).map_err(|e| map_load_error(&inst.map_path, e))?;
    let gt = GroundTruth::new(inst.boxes.clone(), map.height(), map.width())?;
    Ok((map, gt))
}

pub fn validate_instance(inst: &GroundingInstance) -> Result<()> {
    load_instance(inst).map(|_| ())
}
