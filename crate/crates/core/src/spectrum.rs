//! Fourier coefficients and the normalized power spectrum of a ±1 sequence.
//!
//! For a sequence `x` of even length `n` and `j = 0..n/2`,
//!
//! ```text
//! c_j = Σ_k x_k cos(2πkj/n)      s_j = Σ_k x_k sin(2πkj/n)
//! z_j = (2/n)(c_j² + s_j²)
//! ```
//!
//! Two transform paths are provided. [`naive_coefficients`] evaluates the sums
//! directly in O(n²) and is the reference. [`SpectrumPlan`] runs a mixed-radix
//! FFT of arbitrary even length and is what the tests use in bulk.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::bitstream::SignedSequence;
use crate::error::{Error, Result};

/// Real parts `c_j` and sine sums `s_j` for `j = 0..n/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoefficients {
    pub n: usize,
    pub c: Vec<f64>,
    pub s: Vec<f64>,
}

/// `z_j = (2/n)|S_j|²` for `j = 0..n/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum {
    pub n: usize,
    pub z: Vec<f64>,
}

fn check_len(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if n == 0 {
        return Err(Error::Config("spectrum of an empty sequence".into()));
    }
    Ok(())
}

/// Direct O(n²) evaluation of the coefficient sums.
///
/// Angles are reduced as `(k·j) mod n` before the trigonometric lookup, so the
/// only rounding is in the table entries and the accumulation.
pub fn naive_coefficients(x: &SignedSequence) -> Result<FourierCoefficients> {
    let n = x.len();
    check_len(n)?;
    let half = n / 2;
    let (cos_table, sin_table): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|r| {
            let angle = TAU * r as f64 / n as f64;
            (angle.cos(), angle.sin())
        })
        .unzip();
    let mut c = vec![0.0; half];
    let mut s = vec![0.0; half];
    for j in 0..half {
        let (mut cj, mut sj) = (0.0, 0.0);
        let mut r = 0usize;
        for &v in x.values() {
            let v = f64::from(v);
            cj += v * cos_table[r];
            sj += v * sin_table[r];
            r += j;
            if r >= n {
                r -= n;
            }
        }
        c[j] = cj;
        s[j] = sj;
    }
    // sin(0) is exactly zero, but keep s_0 bit-exact regardless of table rounding
    s[0] = 0.0;
    Ok(FourierCoefficients { n, c, s })
}

/// A reusable FFT plan for sequences of one length.
#[derive(Clone)]
pub struct SpectrumPlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

/// Per-worker buffers for [`SpectrumPlan`].
pub struct Workspace {
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl SpectrumPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_len(n)?;
        let fft = FftPlanner::new().plan_fft_forward(n);
        Ok(Self { n, fft })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            buf: vec![Complex::default(); self.n],
            scratch: vec![Complex::default(); self.fft.get_inplace_scratch_len()],
        }
    }

    fn transform(&self, x: &SignedSequence, ws: &mut Workspace) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Config(format!(
                "plan built for n = {} but sequence has length {}",
                self.n,
                x.len()
            )));
        }
        for (slot, &v) in ws.buf.iter_mut().zip(x.values()) {
            *slot = Complex::new(f64::from(v), 0.0);
        }
        self.fft.process_with_scratch(&mut ws.buf, &mut ws.scratch);
        Ok(())
    }

    pub fn coefficients(&self, x: &SignedSequence, ws: &mut Workspace) -> Result<FourierCoefficients> {
        self.transform(x, ws)?;
        let half = self.n / 2;
        // forward FFT gives Σ x_k e^{-2πikj/n} = c_j - i·s_j
        let c = ws.buf[..half].iter().map(|v| v.re).collect();
        let mut s: Vec<f64> = ws.buf[..half].iter().map(|v| -v.im).collect();
        s[0] = 0.0;
        Ok(FourierCoefficients { n: self.n, c, s })
    }

    /// Writes `z_j` for `j = 0..n/2` into `out`.
    pub fn power_into(&self, x: &SignedSequence, ws: &mut Workspace, out: &mut [f64]) -> Result<()> {
        self.transform(x, ws)?;
        let scale = 2.0 / self.n as f64;
        for (z, v) in out.iter_mut().zip(&ws.buf[..self.n / 2]) {
            *z = scale * v.norm_sqr();
        }
        Ok(())
    }

    pub fn power(&self, x: &SignedSequence, ws: &mut Workspace) -> Result<PowerSpectrum> {
        let mut z = vec![0.0; self.n / 2];
        self.power_into(x, ws, &mut z)?;
        Ok(PowerSpectrum { n: self.n, z })
    }
}

/// Fast-path coefficients for a single sequence.
pub fn dft_coefficients(x: &SignedSequence) -> Result<FourierCoefficients> {
    let plan = SpectrumPlan::new(x.len())?;
    let mut ws = plan.workspace();
    plan.coefficients(x, &mut ws)
}

pub fn power_spectrum(coeffs: &FourierCoefficients) -> PowerSpectrum {
    let scale = 2.0 / coeffs.n as f64;
    let z = coeffs
        .c
        .iter()
        .zip(&coeffs.s)
        .map(|(c, s)| scale * (c * c + s * s))
        .collect();
    PowerSpectrum { n: coeffs.n, z }
}

/// `|S_j| = sqrt(c_j² + s_j²)`.
pub fn magnitudes(coeffs: &FourierCoefficients) -> Vec<f64> {
    coeffs.c.iter().zip(&coeffs.s).map(|(c, s)| c.hypot(*s)).collect()
}
