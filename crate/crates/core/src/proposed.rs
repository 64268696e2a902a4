//! Per-frequency KS test of the power spectrum against χ²₂.
//!
//! For `m` sequences of length `n`, every bin `j = 1..n/2` collects the `m`
//! values `z_j = (2/n)|S_j|²` and is tested against the χ²₂ CDF with a
//! two-sided KS test, giving `n/2 - 1` P-values. Bin 0 is never collected.
//!
//! Samples are stored bin-major. Small matrices live in memory; once the
//! matrix would exceed [`ProposedOptions::spill_threshold_bytes`] it is
//! written to an anonymous temporary file instead.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::{to_signed, SequenceSet, SignedSequence};
use crate::error::{Error, Result};
use crate::spectrum::SpectrumPlan;
use crate::statfn::{chi2_2_cdf, ks_pvalue, ks_statistic_sorted};

/// Default lower bound on `m` for trusting the asymptotic KS law.
pub const MIN_SEQUENCES: usize = 50;

/// Sequences transformed per parallel batch.
const CHUNK: usize = 512;

/// Bins read back from a spill file per parallel batch.
const BIN_BATCH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposedOptions {
    pub min_sequences: usize,
    pub spill_threshold_bytes: usize,
}

impl Default for ProposedOptions {
    fn default() -> Self {
        Self {
            min_sequences: MIN_SEQUENCES,
            spill_threshold_bytes: 256 << 20,
        }
    }
}

enum Columns {
    Memory(Vec<f64>),
    Spill(File),
}

/// `z_j` samples for every bin `j = 1..n/2` across `m` sequences.
pub struct BinSampleMatrix {
    n: usize,
    m: usize,
    columns: Columns,
}

impl std::fmt::Debug for BinSampleMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BinSampleMatrix")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("spilled", &self.is_spilled())
            .finish()
    }
}

impl BinSampleMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bins(&self) -> usize {
        self.n / 2 - 1
    }

    pub fn is_spilled(&self) -> bool {
        matches!(self.columns, Columns::Spill(_))
    }

    /// The `m` samples of bin `j`, in sequence order.
    pub fn bin(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 || j > self.bins() {
            return Err(Error::BadBin {
                j,
                n: self.n,
                half: self.n / 2,
            });
        }
        let col = j - 1;
        match &self.columns {
            Columns::Memory(data) => Ok(data[col * self.m..(col + 1) * self.m].to_vec()),
            Columns::Spill(file) => read_column(file, col, self.m),
        }
    }
}

fn read_column(mut file: &File, col: usize, m: usize) -> Result<Vec<f64>> {
    file.seek(SeekFrom::Start((col * m * 8) as u64))?;
    let mut reader = BufReader::new(file).take((m * 8) as u64);
    let mut raw = vec![0u8; m * 8];
    reader.read_exact(&mut raw)?;
    Ok(raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect())
}

/// Incrementally builds a [`BinSampleMatrix`] from sequences of one length.
pub struct BinCollector {
    plan: SpectrumPlan,
    m: usize,
    filled: usize,
    pending: Vec<SignedSequence>,
    columns: Columns,
}

impl BinCollector {
    pub fn new(n: usize, m: usize, opts: &ProposedOptions) -> Result<Self> {
        let plan = SpectrumPlan::new(n)?;
        if n < 4 {
            return Err(Error::Config(format!("n = {n} leaves no bins in 1..n/2")));
        }
        if m == 0 {
            return Err(Error::EmptySet);
        }
        let bins = n / 2 - 1;
        let bytes = bins.saturating_mul(m).saturating_mul(8);
        let columns = if bytes > opts.spill_threshold_bytes {
            let file = tempfile::tempfile()?;
            file.set_len(bytes as u64)?;
            Columns::Spill(file)
        } else {
            Columns::Memory(vec![0.0; bins * m])
        };
        Ok(Self {
            plan,
            m,
            filled: 0,
            pending: Vec::with_capacity(CHUNK),
            columns,
        })
    }

    pub fn push(&mut self, x: SignedSequence) -> Result<()> {
        if x.len() != self.plan.n() {
            return Err(Error::Config(format!(
                "collector expects length {} but got {}",
                self.plan.n(),
                x.len()
            )));
        }
        if self.filled + self.pending.len() >= self.m {
            return Err(Error::Config(format!("collector already holds {} sequences", self.m)));
        }
        self.pending.push(x);
        if self.pending.len() == CHUNK {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let n = self.plan.n();
        let half = n / 2;
        let plan = &self.plan;
        let rows: Vec<Vec<f64>> = self
            .pending
            .par_iter()
            .map_init(
                || plan.workspace(),
                |ws, x| -> Result<Vec<f64>> {
                    let mut z = vec![0.0; half];
                    plan.power_into(x, ws, &mut z)?;
                    z.remove(0);
                    Ok(z)
                },
            )
            .collect::<Result<_>>()?;
        let start = self.filled;
        let m = self.m;
        match &mut self.columns {
            Columns::Memory(data) => {
                for (offset, row) in rows.iter().enumerate() {
                    for (col, &z) in row.iter().enumerate() {
                        data[col * m + start + offset] = z;
                    }
                }
            }
            Columns::Spill(file) => {
                let mut writer = BufWriter::new(&*file);
                let mut buf = Vec::with_capacity(rows.len() * 8);
                for col in 0..half - 1 {
                    buf.clear();
                    for row in &rows {
                        buf.extend_from_slice(&row[col].to_le_bytes());
                    }
                    writer.seek(SeekFrom::Start(((col * m + start) * 8) as u64))?;
                    writer.write_all(&buf)?;
                }
                writer.flush()?;
            }
        }
        self.filled += rows.len();
        self.pending.clear();
        Ok(())
    }

    pub fn finish(mut self) -> Result<BinSampleMatrix> {
        self.flush()?;
        if self.filled != self.m {
            return Err(Error::Config(format!(
                "collector expected {} sequences, received {}",
                self.m, self.filled
            )));
        }
        Ok(BinSampleMatrix {
            n: self.plan.n(),
            m: self.m,
            columns: self.columns,
        })
    }
}

pub fn collect_bins(set: &SequenceSet) -> Result<BinSampleMatrix> {
    collect_bins_with(set, &ProposedOptions::default())
}

pub fn collect_bins_with(set: &SequenceSet, opts: &ProposedOptions) -> Result<BinSampleMatrix> {
    let mut collector = BinCollector::new(set.n(), set.m(), opts)?;
    for bits in set.sequences() {
        collector.push(to_signed(bits))?;
    }
    collector.finish()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposedResult {
    pub n: usize,
    pub m: usize,
    /// `D_m^j` for `j = 1..n/2`, index `j - 1`.
    pub statistics: Vec<f64>,
    /// `p_j = 1 - K(D_m^j)`, same indexing.
    pub pvalues: Vec<f64>,
}

fn ks_bin(mut samples: Vec<f64>) -> Result<(f64, f64)> {
    samples.sort_by(f64::total_cmp);
    let d = ks_statistic_sorted(&samples, chi2_2_cdf)?;
    Ok((d, ks_pvalue(d)))
}

/// KS tests over every bin of an already collected matrix.
pub fn test_bins(matrix: &BinSampleMatrix, opts: &ProposedOptions) -> Result<ProposedResult> {
    if matrix.m() < opts.min_sequences {
        return Err(Error::TooFewSequences {
            got: matrix.m(),
            min: opts.min_sequences,
        });
    }
    let bins = matrix.bins();
    let outcomes: Vec<(f64, f64)> = match &matrix.columns {
        Columns::Memory(data) => data
            .par_chunks(matrix.m())
            .map(|col| ks_bin(col.to_vec()))
            .collect::<Result<_>>()?,
        Columns::Spill(file) => {
            let mut out = Vec::with_capacity(bins);
            for first in (0..bins).step_by(BIN_BATCH) {
                let last = (first + BIN_BATCH).min(bins);
                let batch = (first..last)
                    .map(|col| read_column(file, col, matrix.m()))
                    .collect::<Result<Vec<_>>>()?;
                let tested: Vec<(f64, f64)> = batch.into_par_iter().map(ks_bin).collect::<Result<_>>()?;
                out.extend(tested);
            }
            out
        }
    };
    let (statistics, pvalues) = outcomes.into_iter().unzip();
    Ok(ProposedResult {
        n: matrix.n(),
        m: matrix.m(),
        statistics,
        pvalues,
    })
}

pub fn run_proposed(set: &SequenceSet) -> Result<ProposedResult> {
    run_proposed_with(set, &ProposedOptions::default())
}

pub fn run_proposed_with(set: &SequenceSet, opts: &ProposedOptions) -> Result<ProposedResult> {
    if set.m() < opts.min_sequences {
        return Err(Error::TooFewSequences {
            got: set.m(),
            min: opts.min_sequences,
        });
    }
    let matrix = collect_bins_with(set, opts)?;
    test_bins(&matrix, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstream::BitSequence;

    #[test]
    fn single_square_wave() {
        let set = SequenceSet::new(vec![BitSequence::from_bits(&[1, 1, 0, 0])]).unwrap();
        let matrix = collect_bins(&set).unwrap();
        assert_eq!(matrix.bins(), 1);
        let bin = matrix.bin(1).unwrap();
        assert_eq!(bin.len(), 1);
        assert!((bin[0] - 4.0).abs() < 1e-12);
        assert!(matches!(matrix.bin(0), Err(Error::BadBin { j: 0, .. })));
        assert!(matrix.bin(2).is_err());
    }

    #[test]
    fn matrix_shape() {
        let seqs = (0..100u32)
            .map(|i| (0..8).map(|k| (i >> (k % 5)) & 1 == 1).collect())
            .collect();
        let set = SequenceSet::new(seqs).unwrap();
        let matrix = collect_bins(&set).unwrap();
        assert_eq!((matrix.bins(), matrix.m()), (3, 100));
    }

    #[test]
    fn too_few_sequences() {
        let seqs = vec![BitSequence::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0]); 10];
        let set = SequenceSet::new(seqs).unwrap();
        assert!(matches!(
            run_proposed(&set),
            Err(Error::TooFewSequences { got: 10, min: 50 })
        ));
    }

    #[test]
    fn degenerate_bins_reject() {
        // all-ones sequences have nothing outside bin 0
        let seqs = vec![BitSequence::from_bits(&[1; 16]); 60];
        let set = SequenceSet::new(seqs).unwrap();
        let result = run_proposed(&set).unwrap();
        assert_eq!(result.pvalues.len(), 7);
        for (&d, &p) in result.statistics.iter().zip(&result.pvalues) {
            assert!((d - 60f64.sqrt()).abs() < 1e-9);
            assert!(p < 1e-30);
        }
    }
}
