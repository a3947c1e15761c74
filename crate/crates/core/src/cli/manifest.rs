//! Input manifests (TSV) and reproduction manifests (JSON lines).

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{augment_with_controls, MovingState};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::mls::{ControlPointSet, DeformationMode, Point2};
use crate::warp::FillRule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRow {
    pub image: PathBuf,
    pub text: String,
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out
}

/// Parses `image_path<TAB>text` rows. `#` lines and blank lines are skipped.
/// Relative image paths are resolved against `base`.
pub fn parse_manifest(content: &str, source: &Path, base: &Path) -> Result<Vec<ManifestRow>> {
    let mut rows = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Manifest {
            path: source.to_path_buf(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let (path, text) = line
            .split_once('\t')
            .ok_or_else(|| err("expected <path>\\t<text>"))?;
        if path.is_empty() {
            return Err(err("empty image path"));
        }
        if text.contains('\t') {
            return Err(err("unescaped tab in text"));
        }
        let path = Path::new(path);
        rows.push(ManifestRow {
            image: if path.is_absolute() {
                path.to_path_buf()
            } else {
                base.join(path)
            },
            text: unescape(text),
        });
    }
    Ok(rows)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let content = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&content, path, base)
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in rows {
        writeln!(f, "{}\t{}", row.image.display(), escape(&row.text))?;
    }
    f.flush()?;
    Ok(())
}

/// Everything needed to re-create one augmented output bit-exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub output: PathBuf,
    pub source: PathBuf,
    pub ground_truth: String,
    pub copy: usize,
    /// Seed of the random sub-stream that produced this output.
    pub stream_seed: u64,
    pub rng: String,
    pub mode: DeformationMode,
    pub step: usize,
    pub fill: FillRule,
    pub radius: f64,
    pub alpha: f64,
    pub state: MovingState,
    pub p: Vec<Point2>,
    pub q: Vec<Point2>,
}

impl ReplayRecord {
    pub fn control_points(&self) -> Result<ControlPointSet> {
        ControlPointSet::with_alpha(self.p.clone(), self.q.clone(), self.alpha)
    }

    /// Re-applies the recorded deformation to `source`.
    pub fn replay(&self, source: &Image) -> Result<Image> {
        augment_with_controls(
            source,
            &self.control_points()?,
            self.mode,
            self.step,
            self.fill,
        )
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }
}

pub fn write_replay(path: &Path, records: &[ReplayRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        writeln!(f, "{}", r.to_json_line()?)?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_replay(path: &Path) -> Result<Vec<ReplayRecord>> {
    let f = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(ReplayRecord::from_json_line(&line)?);
        }
    }
    Ok(out)
}
