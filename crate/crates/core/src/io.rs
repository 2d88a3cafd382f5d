//! JSON and CSV formats.
//!
//! A frame file is `{"dim": d, "vectors": [...], "subspace": [...]}` where
//! each vector is a list of entries, an entry being a real number or a
//! `[re, im]` pair, and the optional `subspace` lists spanning vectors of the
//! ambient subspace (the span of the frame when absent). A pair file is
//! `{"F": frame, "G": frame}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{FiniteFrame, Subspace};
use crate::linalg::CVector;

/// `v` rounded to 15 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// `v` printed with at most 15 significant digits.
pub fn fmt_sig(v: f64) -> String {
    let r = round_sig(v);
    if r == 0.0 {
        return "0".to_string();
    }
    let a = r.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(round_sig(z.re))
        } else {
            Entry::Complex([round_sig(z.re), round_sig(z.im)])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub dim: usize,
    pub vectors: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct PairJson {
    pub F: FrameJson,
    pub G: FrameJson,
}

fn to_vectors(dim: usize, rows: &[Vec<Entry>]) -> Result<Vec<CVector>> {
    rows.iter()
        .map(|row| {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            Ok(CVector::from_iterator(dim, row.iter().map(|&e| Complex64::from(e))))
        })
        .collect()
}

impl FrameJson {
    /// The frame and its ambient subspace.
    pub fn parse(&self) -> Result<(FiniteFrame, Subspace)> {
        let vectors = to_vectors(self.dim, &self.vectors)?;
        if vectors.is_empty() {
            return Err(Error::InvalidInput("frame has no vectors".into()));
        }
        let frame = FiniteFrame::from_vectors(&vectors)?;
        let subspace = match &self.subspace {
            Some(rows) => Subspace::from_spanning_vectors(&to_vectors(self.dim, rows)?)?,
            None => frame.span()?,
        };
        Ok((frame, subspace))
    }

    pub fn from_frame(frame: &FiniteFrame, subspace: Option<&Subspace>) -> Self {
        let rows = |vs: Vec<CVector>| -> Vec<Vec<Entry>> {
            vs.into_iter().map(|v| v.iter().map(|&z| Entry::from(z)).collect()).collect()
        };
        Self {
            dim: frame.dim(),
            vectors: rows(frame.vectors()),
            subspace: subspace.map(|s| rows(s.basis().column_iter().map(|c| c.into_owned()).collect())),
        }
    }
}

/// A parsed pair `F ⊂ W`, `G ⊂ V`.
#[derive(Clone, Debug)]
pub struct Pair {
    pub f: FiniteFrame,
    pub g: FiniteFrame,
    pub w: Subspace,
    pub v: Subspace,
}

impl PairJson {
    pub fn parse(&self) -> Result<Pair> {
        if self.F.dim != self.G.dim {
            return Err(Error::DimensionMismatch { expected: self.F.dim, found: self.G.dim });
        }
        let (f, w) = self.F.parse()?;
        let (g, v) = self.G.parse()?;
        Ok(Pair { f, g, w, v })
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

pub fn read_pair(path: &Path) -> Result<Pair> {
    read_json::<PairJson>(path)?.parse()
}

/// Opens `path` for writing, or stdout when `None`.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

pub fn write_json<T: Serialize, W: Write>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes a header and rows of numbers.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_sig(x)))?;
    }
    w.flush()?;
    Ok(())
}
