use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Dataset, Source};
use crate::error::{Error, Result};
use crate::posterior::{Label, LabeledExample};

/// Options for reading LIBSVM text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    /// Read label `0` as `-1`.
    pub zero_is_negative: bool,
    /// Force the dimension; otherwise the largest index seen.
    pub dim: Option<usize>,
    pub normalize: bool,
    /// Keep only the first `n` examples.
    pub max_examples: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            zero_is_negative: true,
            dim: None,
            normalize: false,
            max_examples: None,
        }
    }
}

fn parse_label(tok: &str, line: usize, opts: &ParseOptions) -> Result<Label> {
    let err = |m: String| Error::Parse { line, message: m };
    let v: f64 = tok.parse().map_err(|_| err(format!("bad label `{tok}`")))?;
    if v == 1.0 {
        Ok(Label::Pos)
    } else if v == -1.0 || (v == 0.0 && opts.zero_is_negative) {
        Ok(Label::Neg)
    } else {
        Err(err(format!("non-binary label `{tok}`")))
    }
}

/// Parses `label idx:val ...` lines with 1-based indices. Blank lines and
/// `#` comments are skipped; a trailing `# ...` on a data line is ignored.
pub fn parse_libsvm<I, S>(lines: I, opts: &ParseOptions) -> Result<Dataset>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut sparse: Vec<(Label, Vec<(usize, f64)>)> = Vec::new();
    let mut max_idx = 0usize;
    for (i, raw) in lines.into_iter().enumerate() {
        if opts.max_examples.is_some_and(|m| sparse.len() >= m) {
            break;
        }
        let line_no = i + 1;
        let line = raw.as_ref();
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let label = parse_label(toks.next().expect("nonempty line"), line_no, opts)?;
        let mut feats = Vec::new();
        let mut last = 0usize;
        for tok in toks {
            let err = || Error::Parse {
                line: line_no,
                message: format!("malformed feature `{tok}`"),
            };
            let (idx, val) = tok.split_once(':').ok_or_else(err)?;
            let idx: usize = idx.parse().map_err(|_| err())?;
            let val: f64 = val.parse().map_err(|_| err())?;
            if idx == 0 || idx <= last || !val.is_finite() {
                return Err(err());
            }
            last = idx;
            if opts.dim.is_some_and(|d| idx > d) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("index {idx} exceeds dimension"),
                });
            }
            max_idx = max_idx.max(idx);
            feats.push((idx, val));
        }
        sparse.push((label, feats));
    }
    let dim = opts.dim.unwrap_or(max_idx).max(1);
    let examples = sparse
        .into_iter()
        .map(|(y, feats)| {
            let mut x = vec![0.0; dim];
            for (i, v) in feats {
                x[i - 1] = v;
            }
            LabeledExample::new(x, y)
        })
        .collect();
    let ds = Dataset::new(examples, dim, Source::LibsvmFile)?;
    Ok(if opts.normalize { ds.normalized() } else { ds })
}

pub fn read_libsvm(path: &Path, opts: &ParseOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let lines: Vec<String> = BufReader::new(file).lines().collect::<std::io::Result<_>>()?;
    parse_libsvm(lines, opts)
}

/// Canonical text: `+1`/`-1`, nonzero features only, values in Rust's
/// shortest round-trip formatting, one space between tokens.
pub fn serialize_libsvm(data: &Dataset) -> Vec<String> {
    data.examples()
        .iter()
        .map(|e| {
            let mut s = String::from(match e.y {
                Label::Pos => "+1",
                Label::Neg => "-1",
            });
            for (i, v) in e.x.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                write!(s, " {}:{}", i + 1, v).expect("writing to a String");
            }
            s
        })
        .collect()
}

pub fn write_libsvm(data: &Dataset, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in serialize_libsvm(data) {
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    Ok(())
}
