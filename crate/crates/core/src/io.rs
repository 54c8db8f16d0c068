//! File formats: the JSON algebra description and curve CSV tables.
//!
//! Rationals are written as `"p/q"` strings. Bracket entries list each pair
//! `i < j` once; the reverse order follows by antisymmetry.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::GradedLieAlgebra;
use crate::dynamics::CurvePath;
use crate::error::{Error, Result};
use crate::prolongation::{Action, StratumBasis};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub k: i64,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: i64,
    pub j: i64,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub degree: i32,
    #[serde(default)]
    pub action: Action,
    pub elements: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub rank: usize,
    pub step: i32,
    /// Degrees of `X_{min_id}..X_dim`.
    pub degrees: Vec<i32>,
    pub brackets: Vec<BracketEntry>,
    /// Lowest index when nonpositive indices are included.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_id: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prolongation_basis: Vec<BasisEntry>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &GradedLieAlgebra) -> AlgebraFile {
        let mut brackets = Vec::new();
        for i in alg.ids() {
            for j in i + 1..=alg.n() as i64 {
                let b = alg.bracket_basis(i, j).expect("stored index");
                if !b.is_empty() {
                    let terms = b.iter().map(|(k, c)| Term { k: *k, c: rational::format(c) }).collect();
                    brackets.push(BracketEntry { i, j, terms });
                }
            }
        }
        AlgebraFile {
            dim: alg.n(),
            rank: alg.rank(),
            step: alg.step(),
            degrees: alg.slot_degrees().to_vec(),
            brackets,
            min_id: (alg.min_id() < 1).then_some(alg.min_id()),
            prolongation_basis: Vec::new(),
        }
    }

    /// Builds the algebra and checks the header fields against it.
    pub fn to_algebra(&self) -> Result<GradedLieAlgebra> {
        let min_id = self.min_id.unwrap_or(1);
        if self.degrees.len() as i64 != self.dim as i64 + 1 - min_id {
            return Err(Error::Parse(format!(
                "\"degrees\" has {} entries, expected {}",
                self.degrees.len(),
                self.dim as i64 + 1 - min_id
            )));
        }
        let mut entries = Vec::new();
        for (e, b) in self.brackets.iter().enumerate() {
            for t in &b.terms {
                let c = rational::parse(&t.c).map_err(|err| Error::Parse(format!("brackets[{e}] ({}, {}): {err}", b.i, b.j)))?;
                entries.push((b.i, b.j, t.k, c));
            }
        }
        let alg = GradedLieAlgebra::with_prolongation(min_id, self.degrees.clone(), entries, None)?;
        if alg.rank() != self.rank {
            return Err(Error::Parse(format!("\"rank\" is {} but {} indices have degree 1", self.rank, alg.rank())));
        }
        if alg.step() != self.step {
            return Err(Error::Parse(format!("\"step\" is {} but the largest degree is {}", self.step, alg.step())));
        }
        Ok(alg)
    }

    pub fn stratum_bases(&self) -> Result<Vec<StratumBasis>> {
        self.prolongation_basis
            .iter()
            .map(|b| {
                let elements = b
                    .elements
                    .iter()
                    .map(|m| m.iter().map(|row| row.iter().map(|c| rational::parse(c)).collect()).collect())
                    .collect::<Result<_>>()?;
                Ok(StratumBasis { degree: b.degree, action: b.action, elements })
            })
            .collect()
    }

    pub fn with_bases(mut self, bases: &[StratumBasis]) -> AlgebraFile {
        self.prolongation_basis = bases
            .iter()
            .map(|b| BasisEntry {
                degree: b.degree,
                action: b.action,
                elements: b
                    .elements
                    .iter()
                    .map(|m| m.iter().map(|row| row.iter().map(rational::format).collect()).collect())
                    .collect(),
            })
            .collect();
        self
    }

    /// Parse errors carry line and column.
    pub fn parse(text: &str) -> Result<AlgebraFile> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e.to_string()))))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<AlgebraFile> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn strip_position(msg: &str) -> &str {
    msg.rsplit_once(" at line ").map(|(m, _)| m).unwrap_or(msg)
}

/// A numeric table with a leading `t` column. A first row that does not
/// parse as numbers is taken as a header.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub header: Option<Vec<String>>,
    rows: Vec<(u64, Vec<String>)>,
}

impl CurveTable {
    pub fn parse(text: &str) -> Result<CurveTable> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut header = None;
        let mut rows = Vec::new();
        let mut width = None;
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("csv: {e}")))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
            let fields: Vec<String> = rec.iter().map(str::to_string).collect();
            if fields.iter().all(|f| f.is_empty()) {
                continue;
            }
            if idx == 0 && rational::parse(&fields[0]).is_err() {
                width = Some(fields.len());
                header = Some(fields);
                continue;
            }
            match width {
                Some(w) if w != fields.len() => {
                    return Err(Error::Parse(format!("line {line}: expected {w} columns, found {}", fields.len())))
                }
                _ => width = Some(fields.len()),
            }
            rows.push((line, fields));
        }
        if rows.is_empty() {
            return Err(Error::Parse("curve table has no rows".into()));
        }
        if width == Some(1) {
            return Err(Error::Parse("curve table needs a t column and at least one coordinate".into()));
        }
        Ok(CurveTable { header, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of coordinate columns after `t`.
    pub fn width(&self) -> usize {
        self.rows[0].1.len() - 1
    }

    fn cells<T>(&self, f: impl Fn(&str) -> Result<T>) -> Result<Vec<(u64, Vec<T>)>> {
        self.rows
            .iter()
            .map(|(line, row)| {
                let vals = row
                    .iter()
                    .enumerate()
                    .map(|(col, s)| f(s).map_err(|e| Error::Parse(format!("line {line}, column {}: {e}", col + 1))))
                    .collect::<Result<Vec<T>>>()?;
                Ok((*line, vals))
            })
            .collect()
    }

    fn split<T: PartialOrd + Clone>(rows: Vec<(u64, Vec<T>)>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let mut times: Vec<T> = Vec::with_capacity(rows.len());
        let mut xs = Vec::with_capacity(rows.len());
        for (line, mut r) in rows {
            let x = r.split_off(1);
            let t = r.pop().expect("t column");
            if times.last().is_some_and(|p| *p >= t) {
                return Err(Error::Parse(format!("line {line}: t is not strictly increasing")));
            }
            times.push(t);
            xs.push(x);
        }
        Ok((times, xs))
    }

    pub fn to_f64(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let rows = self.cells(|s| {
            s.parse::<f64>()
                .ok()
                .or_else(|| rational::parse(s).ok().map(|r| rational::to_f64(&r)))
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("not a finite number: {s:?}")))
        })?;
        Self::split(rows)
    }

    /// Cells read as exact rationals (`p/q` or decimals).
    pub fn to_exact(&self) -> Result<(Vec<Rational>, Vec<Vec<Rational>>)> {
        Self::split(self.cells(rational::parse)?)
    }
}

/// `t,x1..xn[,l1..ln]`, one row per node.
pub fn write_curve_csv(curve: &CurvePath) -> String {
    let n = curve.gamma.first().map(Vec::len).unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    if curve.lambda.is_some() {
        header.extend((1..=n).map(|i| format!("l{i}")));
    }
    w.write_record(&header).expect("in-memory write");
    for (k, t) in curve.times.iter().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(curve.gamma[k].iter().map(f64::to_string));
        if let Some(l) = &curve.lambda {
            rec.extend(l[k].iter().map(f64::to_string));
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::FreeLie;

    #[test]
    fn free_round_trip() {
        let f = FreeLie::build(2, 4).unwrap();
        let file = AlgebraFile::from_algebra(&f.algebra);
        assert_eq!((file.dim, file.rank, file.step), (8, 2, 4));
        let back = AlgebraFile::parse(&file.to_json()).unwrap().to_algebra().unwrap();
        assert_eq!(back.raw_table(), f.algebra.raw_table());
        assert_eq!(back.slot_degrees(), f.algebra.slot_degrees());
    }

    #[test]
    fn parse_error_has_position() {
        let err = AlgebraFile::parse("{\n  \"dim\": 3,\n  \"rank\": x\n}").unwrap_err().to_string();
        assert!(err.contains("line 3, column"), "{err}");
    }

    #[test]
    fn header_mismatch_rejected() {
        let mut f = AlgebraFile::from_algebra(&GradedLieAlgebra::heisenberg());
        f.step = 3;
        assert!(f.to_algebra().is_err());
        let mut f = AlgebraFile::from_algebra(&GradedLieAlgebra::heisenberg());
        f.brackets[0].terms[0].c = "1/0".into();
        assert!(f.to_algebra().unwrap_err().to_string().contains("brackets[0]"));
    }

    #[test]
    fn csv_tables() {
        let t = CurveTable::parse("t,x1,x2\n0,0,0\n0.5,1/2,-1\n").unwrap();
        assert_eq!(t.width(), 2);
        let (ts, xs) = t.to_exact().unwrap();
        assert_eq!(ts[1], rational::frac(1, 2));
        assert_eq!(xs[1][1], rational::int(-1));
        let err = CurveTable::parse("0,1\n1,2,3\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = CurveTable::parse("0,1\n0,2\n").unwrap().to_f64().unwrap_err().to_string();
        assert!(err.contains("increasing"), "{err}");
        let err = CurveTable::parse("0,1\n1,abc\n").unwrap().to_f64().unwrap_err().to_string();
        assert!(err.contains("line 2, column 2"), "{err}");
    }

    #[test]
    fn curve_csv_header() {
        let c = CurvePath { times: vec![0.0, 0.5], gamma: vec![vec![0.0, 1.0], vec![0.25, 1.5]], lambda: Some(vec![vec![1.0, 0.0]; 2]) };
        let s = write_curve_csv(&c);
        assert!(s.starts_with("t,x1,x2,l1,l2\n0,0,1,1,0\n0.5,0.25,1.5,1,0\n"), "{s}");
        let back = CurveTable::parse(&s).unwrap().to_f64().unwrap();
        assert_eq!(back.0, c.times);
    }
}
