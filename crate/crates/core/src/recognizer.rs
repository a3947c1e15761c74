//! Recognizer contract and a bundled glyph task for desk-scale experiments.
//!
//! The glyph task renders words from fixed binary templates and reads them
//! back with a fixed-cell template matcher. The matcher is deliberately weak:
//! geometric augmentation visibly changes its output, which is what the
//! agent needs to learn from.

use std::collections::HashMap;
use std::sync::Arc;

use crate::augment::MovingState;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::metrics::Transcript;

/// Something that reads text from an image.
pub trait Recognizer {
    /// Must be deterministic for a given image and recognizer state.
    fn recognize(&mut self, img: &Image) -> Result<Transcript>;

    /// Training hook invoked with the agent-augmented sample on every joint
    /// step. Non-learning recognizers ignore it.
    fn observe_training_example(&mut self, _img: &Image, _gt: &Transcript) -> Result<()> {
        Ok(())
    }

    /// Test-only channel: the joint step announces the moving state that
    /// produced the next image before recognizing it. Real recognizers must
    /// ignore it.
    fn announce_state(&mut self, _state: &MovingState) {}
}

/// Embedded block-digit templates.
pub const DIGITS_TABLE: &str = include_str!("../glyphs/digits.txt");

const SUPERSAMPLE: usize = 4;

/// Alphabet, binary templates, and rendering parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphTask {
    alphabet: Vec<char>,
    rows: usize,
    cols: usize,
    /// One row-major bitmap per alphabet entry.
    templates: Vec<Vec<bool>>,
    /// Blank rows above and below the glyphs, in output pixels.
    margin: usize,
}

impl GlyphTask {
    /// Parses a glyph table: `[c]` headers followed by equal-length rows of
    /// `0`/`1`. Lines starting with `#` and blank lines are ignored.
    pub fn parse(table: &str, margin: usize) -> Result<Self> {
        let mut alphabet: Vec<char> = Vec::new();
        let mut templates: Vec<Vec<bool>> = Vec::new();
        let mut heights: Vec<usize> = Vec::new();
        let mut cols = None;

        for (lineno, line) in table.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let mut chars = inner.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(Error::GlyphTable(format!(
                        "line {lineno}: bad header {line:?}"
                    )));
                };
                if alphabet.contains(&c) {
                    return Err(Error::GlyphTable(format!(
                        "line {lineno}: duplicate glyph {c:?}"
                    )));
                }
                alphabet.push(c);
                templates.push(Vec::new());
                heights.push(0);
                continue;
            }
            let (Some(bitmap), Some(height)) = (templates.last_mut(), heights.last_mut()) else {
                return Err(Error::GlyphTable(format!(
                    "line {lineno}: bitmap row before header"
                )));
            };
            let width = *cols.get_or_insert(line.len());
            if line.len() != width {
                return Err(Error::GlyphTable(format!(
                    "line {lineno}: expected {width} columns"
                )));
            }
            for ch in line.chars() {
                bitmap.push(match ch {
                    '0' => false,
                    '1' => true,
                    other => {
                        return Err(Error::GlyphTable(format!(
                            "line {lineno}: unexpected {other:?}"
                        )))
                    }
                });
            }
            *height += 1;
        }
        let Some(&rows) = heights.first() else {
            return Err(Error::GlyphTable("no glyphs".into()));
        };
        if rows == 0 || heights.iter().any(|&h| h != rows) {
            return Err(Error::GlyphTable(
                "all glyphs must have the same non-zero height".into(),
            ));
        }
        Ok(Self {
            alphabet,
            rows,
            cols: cols.unwrap_or(0),
            templates,
            margin,
        })
    }

    /// Digits 0-9 as 7-segment-style block templates.
    pub fn digits() -> Self {
        Self::parse(DIGITS_TABLE, 3).expect("embedded digit table is valid")
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn template_size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn template(&self, c: char) -> Option<&[bool]> {
        let i = self.alphabet.iter().position(|&a| a == c)?;
        Some(&self.templates[i])
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Fraction of pixels that differ between two templates.
    pub fn template_difference(&self, a: char, b: char) -> Option<f64> {
        let (ta, tb) = (self.template(a)?, self.template(b)?);
        let diff = ta.iter().zip(tb).filter(|(x, y)| x != y).count();
        Some(diff as f64 / ta.len() as f64)
    }

    /// Uniform template-to-pixel scale for a given image height.
    fn scale(&self, height: usize) -> f64 {
        height.saturating_sub(2 * self.margin) as f64 / self.rows as f64
    }

    /// Longest word that fits a `width x height` image.
    pub fn max_chars(&self, width: usize, height: usize) -> usize {
        let glyph_w = self.cols as f64 * self.scale(height);
        if glyph_w <= 0.0 {
            return 0;
        }
        let mut n = (width as f64 / glyph_w).floor() as usize;
        while n > 0 && ((width / n) as f64) < glyph_w {
            n -= 1;
        }
        n
    }

    /// Renders glyph `index` centered in a `cell_w x height` patch.
    fn render_cell(&self, index: usize, cell_w: usize, height: usize) -> Vec<u8> {
        let s = self.scale(height);
        let left = (cell_w as f64 - self.cols as f64 * s) / 2.0;
        let top = self.margin as f64;
        let bitmap = &self.templates[index];
        let mut out = vec![255u8; cell_w * height];
        let n = (SUPERSAMPLE * SUPERSAMPLE) as u32;
        for y in 0..height {
            for x in 0..cell_w {
                let mut ink = 0u32;
                for j in 0..SUPERSAMPLE {
                    let ty = ((y as f64 + (j as f64 + 0.5) / SUPERSAMPLE as f64) - top) / s;
                    if ty < 0.0 || ty >= self.rows as f64 {
                        continue;
                    }
                    for i in 0..SUPERSAMPLE {
                        let tx = ((x as f64 + (i as f64 + 0.5) / SUPERSAMPLE as f64) - left) / s;
                        if tx < 0.0 || tx >= self.cols as f64 {
                            continue;
                        }
                        ink += u32::from(bitmap[ty as usize * self.cols + tx as usize]);
                    }
                }
                out[y * cell_w + x] = (255 - (255 * ink + n / 2) / n) as u8;
            }
        }
        out
    }
}

/// Column boundaries of `n` equal-width cells across `width` pixels.
fn cell_bounds(width: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |k| (k * width / n, (k + 1) * width / n))
}

/// Renders `text` as dark glyphs on a white background, one equal-width cell
/// per character.
pub fn render_word(task: &GlyphTask, text: &str, width: usize, height: usize) -> Result<Image> {
    let chars: Vec<char> = text.chars().collect();
    let indices = chars
        .iter()
        .map(|&c| {
            task.alphabet
                .iter()
                .position(|&a| a == c)
                .ok_or(Error::UnknownCharacter(c))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut img = Image::filled(width, height, 1, 255)?;
    if chars.is_empty() {
        return Ok(img);
    }
    if task.max_chars(width, height) < chars.len() {
        return Err(Error::DoesNotFit {
            chars: chars.len(),
            width,
            height,
        });
    }
    for (&idx, (x0, x1)) in indices.iter().zip(cell_bounds(width, chars.len())) {
        let cell = task.render_cell(idx, x1 - x0, height);
        for y in 0..height {
            for x in x0..x1 {
                img.pixel_mut(x, y)[0] = cell[y * (x1 - x0) + (x - x0)];
            }
        }
    }
    Ok(img)
}

/// Reads `n_chars` characters by matching each equal-width cell against every
/// rendered template (mean absolute difference, first best wins).
pub fn template_recognize(task: &GlyphTask, img: &Image, n_chars: usize) -> Transcript {
    let mut cache = HashMap::new();
    recognize_cells(task, img, n_chars, &mut cache)
}

type CellCache = HashMap<(usize, usize), Arc<Vec<Vec<u8>>>>;

fn recognize_cells(
    task: &GlyphTask,
    img: &Image,
    n_chars: usize,
    cache: &mut CellCache,
) -> Transcript {
    let n_chars = n_chars.max(1);
    let (w, h) = (img.width(), img.height());
    let mut text = String::with_capacity(n_chars);
    for (x0, x1) in cell_bounds(w, n_chars) {
        let cell_w = x1 - x0;
        if cell_w == 0 {
            text.push(task.alphabet[0]);
            continue;
        }
        let rendered = cache
            .entry((cell_w, h))
            .or_insert_with(|| {
                Arc::new(
                    (0..task.alphabet.len())
                        .map(|i| task.render_cell(i, cell_w, h))
                        .collect(),
                )
            })
            .clone();
        let mut best = (u64::MAX, 0);
        for (i, tmpl) in rendered.iter().enumerate() {
            let mut sad = 0u64;
            for y in 0..h {
                for x in 0..cell_w {
                    sad += img.gray_at(x0 + x, y).abs_diff(tmpl[y * cell_w + x]) as u64;
                }
            }
            if sad < best.0 {
                best = (sad, i);
            }
        }
        text.push(task.alphabet[best.1]);
    }
    Transcript::new(text).expect("alphabet characters are valid")
}

/// [`Recognizer`] over a [`GlyphTask`] for words of a fixed length.
#[derive(Clone, Debug)]
pub struct TemplateRecognizer {
    task: Arc<GlyphTask>,
    n_chars: usize,
    cache: CellCache,
}

impl TemplateRecognizer {
    pub fn new(task: Arc<GlyphTask>, n_chars: usize) -> Self {
        Self {
            task,
            n_chars: n_chars.max(1),
            cache: HashMap::new(),
        }
    }

    pub fn task(&self) -> &GlyphTask {
        &self.task
    }

    pub fn n_chars(&self) -> usize {
        self.n_chars
    }

    pub fn set_n_chars(&mut self, n_chars: usize) {
        self.n_chars = n_chars.max(1);
    }
}

impl Recognizer for TemplateRecognizer {
    fn recognize(&mut self, img: &Image) -> Result<Transcript> {
        Ok(recognize_cells(
            &self.task,
            img,
            self.n_chars,
            &mut self.cache,
        ))
    }
}

/// Recognizer that always returns the same text.
#[derive(Clone, Debug)]
pub struct ConstantRecognizer(pub Transcript);

impl Recognizer for ConstantRecognizer {
    fn recognize(&mut self, _img: &Image) -> Result<Transcript> {
        Ok(self.0.clone())
    }
}
