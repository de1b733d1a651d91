//! Empirical histograms and CCDF tables shared by the degree, activity, and
//! cascade-metric distributions.

use std::collections::BTreeMap;
use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected header \"value,count,ccdf\", found \"{found}\"")]
    Header { line: u64, found: String },
    #[error("line {line}: malformed distribution row: {message}")]
    MalformedRow { line: u64, message: String },
}

/// Histogram over non-negative integer values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: u64) {
        self.add_count(value, 1);
    }

    pub fn add_count(&mut self, value: u64, count: u64) {
        *self.counts.entry(value).or_insert(0) += count;
    }

    /// Count recorded for `value`.
    pub fn count(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// (value, count) pairs in increasing value order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }

    pub fn ccdf(&self) -> CcdfTable {
        CcdfTable::from_counts(self.iter().map(|(v, c)| (v as f64, c)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcdfRow {
    pub value: f64,
    pub count: u64,
    pub ccdf: f64,
}

/// Empirical distribution as `value,count,ccdf` rows sorted by value,
/// where `ccdf(v) = P(X >= v)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CcdfTable {
    pub rows: Vec<CcdfRow>,
}

impl CcdfTable {
    /// Builds a table from (value, count) pairs that are already sorted by
    /// value with no repeats.
    fn from_counts(pairs: impl Iterator<Item = (f64, u64)>) -> Self {
        let pairs: Vec<(f64, u64)> = pairs.collect();
        let total: u64 = pairs.iter().map(|&(_, c)| c).sum();
        let mut remaining = total;
        let mut rows = Vec::with_capacity(pairs.len());
        for (value, count) in pairs {
            rows.push(CcdfRow {
                value,
                count,
                ccdf: remaining as f64 / total as f64,
            });
            remaining -= count;
        }
        Self { rows }
    }

    /// Builds a table from raw samples; equal values are grouped.
    pub fn from_samples(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut pairs: Vec<(f64, u64)> = Vec::new();
        for &s in &sorted {
            match pairs.last_mut() {
                Some((v, c)) if *v == s => *c += 1,
                _ => pairs.push((s, 1)),
            }
        }
        Self::from_counts(pairs.into_iter())
    }

    /// Total sample count.
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    /// Reconstructs the sample list, each value repeated by its count.
    pub fn expand_samples(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for row in &self.rows {
            out.extend(std::iter::repeat(row.value).take(row.count as usize));
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "value,count,ccdf")?;
        for row in &self.rows {
            writeln!(w, "{},{},{}", row.value, row.count, row.ccdf)?;
        }
        Ok(())
    }

    pub fn read_csv<R: io::BufRead>(r: R) -> Result<Self, DistError> {
        let mut rows = Vec::new();
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Ok(Self { rows }),
        };
        if header.trim() != "value,count,ccdf" {
            return Err(DistError::Header {
                line: 1,
                found: header,
            });
        }
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i as u64 + 2;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut field = |name: &str| {
                fields.next().ok_or_else(|| DistError::MalformedRow {
                    line: lineno,
                    message: format!("missing {name}"),
                })
            };
            let value: f64 = field("value")?
                .trim()
                .parse()
                .map_err(|e| DistError::MalformedRow {
                    line: lineno,
                    message: format!("bad value: {e}"),
                })?;
            let count: u64 = field("count")?
                .trim()
                .parse()
                .map_err(|e| DistError::MalformedRow {
                    line: lineno,
                    message: format!("bad count: {e}"),
                })?;
            let ccdf: f64 = field("ccdf")?
                .trim()
                .parse()
                .map_err(|e| DistError::MalformedRow {
                    line: lineno,
                    message: format!("bad ccdf: {e}"),
                })?;
            rows.push(CcdfRow { value, count, ccdf });
        }
        Ok(Self { rows })
    }
}
