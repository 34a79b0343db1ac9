//! Two-index frequency grid: reduced frequency `ω` in the base band
//! `[-Δ/2, Δ/2)` times ladder rung `s ∈ [-S, S]`. The physical frequency of
//! cell `(i, s)` is `ω_i + sΔ`, so together the cells tile
//! `[-(S+½)Δ, (S+½)Δ)` uniformly with spacing `Δ/N_ω`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ProbePulseSpec;

/// Minimum number of base-band samples across the spectral width `1/τ`.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 8.0;

/// Envelope half-extent, in units of `1/τ`, that must lie on the grid
/// (`exp(-36)` below the peak).
pub const ENVELOPE_MARGIN: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetGrid {
    /// Ladder spacing `Δ`.
    pub delta: f64,
    /// Base-band samples `N_ω`.
    pub n_omega: usize,
    /// Ladder half-width `S`.
    pub ladder: usize,
}

impl FloquetGrid {
    pub fn new(delta: f64, n_omega: usize, ladder: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "ladder spacing must be > 0".into(),
            });
        }
        if n_omega == 0 {
            return Err(Error::InvalidParameter {
                name: "n_omega",
                reason: "need at least one base-band sample".into(),
            });
        }
        Ok(FloquetGrid { delta, n_omega, ladder })
    }

    /// Rungs per column, `2S + 1`.
    pub fn rungs(&self) -> usize {
        2 * self.ladder + 1
    }

    pub fn d_omega(&self) -> f64 {
        self.delta / self.n_omega as f64
    }

    pub fn base_freq(&self, i: usize) -> f64 {
        -0.5 * self.delta + i as f64 * self.d_omega()
    }

    pub fn base_freqs(&self) -> Vec<f64> {
        (0..self.n_omega).map(|i| self.base_freq(i)).collect()
    }

    pub fn rung(&self, k: usize) -> i64 {
        k as i64 - self.ladder as i64
    }

    pub fn physical_frequency(&self, i: usize, s: i64) -> f64 {
        self.base_freq(i) + s as f64 * self.delta
    }

    pub fn cells(&self) -> usize {
        self.n_omega * self.rungs()
    }

    /// Cell holding physical frequency index `k` of the flattened, ascending
    /// frequency list.
    pub fn cell_of_flat(&self, k: usize) -> (usize, i64) {
        (k % self.n_omega, (k / self.n_omega) as i64 - self.ladder as i64)
    }

    pub fn flat_frequency(&self, k: usize) -> f64 {
        let (i, s) = self.cell_of_flat(k);
        self.physical_frequency(i, s)
    }

    /// Checks the grid can carry `pulse`: the base band resolves `1/τ` and the
    /// ladder covers the chirp side peaks plus the envelope tails.
    pub fn check_resolves(&self, pulse: &ProbePulseSpec) -> Result<()> {
        let width = 1.0 / pulse.tau;
        let samples = width / self.d_omega();
        if samples < MIN_SAMPLES_PER_WIDTH {
            return Err(Error::UnderResolved(format!(
                "{samples:.2} base-band samples across 1/tau, need {MIN_SAMPLES_PER_WIDTH}"
            )));
        }
        let side = if pulse.chirp_depth != 0.0 {
            (pulse.chirp_depth.abs().ceil() + 8.0) * pulse.chirp_frequency.abs()
        } else {
            0.0
        };
        let extent = side + ENVELOPE_MARGIN * width;
        let band = (self.ladder as f64 + 0.5) * self.delta;
        if extent > band {
            return Err(Error::UnderResolved(format!(
                "pulse spectrum extends to {extent:.3e} beyond the grid band {band:.3e}"
            )));
        }
        Ok(())
    }
}

/// Complex probe amplitudes on a [`FloquetGrid`].
///
/// Stored column-major by base-band index: the `2S+1` rungs of one `ω` are
/// contiguous, which is the layout the per-column solvers want.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSpectrum {
    grid: FloquetGrid,
    amplitudes: Vec<Complex64>,
}

impl FloquetSpectrum {
    pub fn zeros(grid: FloquetGrid) -> Self {
        FloquetSpectrum {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.cells()],
        }
    }

    /// Samples `f(ν)` at every physical frequency.
    pub fn from_fn(grid: FloquetGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let mut spec = Self::zeros(grid);
        for i in 0..grid.n_omega {
            for k in 0..grid.rungs() {
                spec.amplitudes[i * grid.rungs() + k] = f(grid.physical_frequency(i, grid.rung(k)));
            }
        }
        spec
    }

    pub(crate) fn from_columns(grid: FloquetGrid, columns: Vec<Vec<Complex64>>) -> Self {
        debug_assert_eq!(columns.len(), grid.n_omega);
        let amplitudes: Vec<Complex64> = columns.into_iter().flatten().collect();
        debug_assert_eq!(amplitudes.len(), grid.cells());
        FloquetSpectrum { grid, amplitudes }
    }

    pub fn grid(&self) -> &FloquetGrid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.grid.delta
    }

    pub fn base_freqs(&self) -> Vec<f64> {
        self.grid.base_freqs()
    }

    pub fn get(&self, i: usize, s: i64) -> Complex64 {
        self.amplitudes[self.index(i, s)]
    }

    pub fn set(&mut self, i: usize, s: i64, value: Complex64) {
        let idx = self.index(i, s);
        self.amplitudes[idx] = value;
    }

    fn index(&self, i: usize, s: i64) -> usize {
        let k = s + self.grid.ladder as i64;
        assert!(
            i < self.grid.n_omega && (0..self.grid.rungs() as i64).contains(&k),
            "cell ({i}, {s}) outside grid"
        );
        i * self.grid.rungs() + k as usize
    }

    /// Rungs `-S..=S` at base-band index `i`.
    pub fn column(&self, i: usize) -> &[Complex64] {
        let r = self.grid.rungs();
        &self.amplitudes[i * r..(i + 1) * r]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `(ν, Ω(ν))` in ascending physical frequency.
    pub fn physical(&self) -> Vec<(f64, Complex64)> {
        (0..self.grid.cells())
            .map(|k| {
                let (i, s) = self.grid.cell_of_flat(k);
                (self.grid.physical_frequency(i, s), self.get(i, s))
            })
            .collect()
    }

    /// Amplitudes in ascending physical frequency.
    pub fn flat(&self) -> Vec<Complex64> {
        (0..self.grid.cells())
            .map(|k| {
                let (i, s) = self.grid.cell_of_flat(k);
                self.get(i, s)
            })
            .collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.flat().iter().map(|a| a.norm()).collect()
    }

    /// `Σ |Ω|² dω`, equal to `2π ∫|Ω(t)|² dt` for a resolved spectrum.
    pub fn spectral_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.d_omega()
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FloquetSpectrum {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + factor · other` on the same grid.
    pub fn add_scaled(&self, other: &FloquetSpectrum, factor: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("spectra live on different grids".into()));
        }
        Ok(FloquetSpectrum {
            grid: self.grid,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    /// Value at the cell nearest to physical frequency `nu`, if on the grid.
    pub fn at_frequency(&self, nu: f64) -> Option<Complex64> {
        let band = (self.grid.ladder as f64 + 0.5) * self.grid.delta;
        let k = ((nu + band) / self.grid.d_omega()).round();
        (k >= 0.0 && (k as usize) < self.grid.cells()).then(|| {
            let (i, s) = self.grid.cell_of_flat(k as usize);
            self.get(i, s)
        })
    }
}

/// Samples the analytic incoming spectrum
/// `Ω₁(0, ω+sΔ) = Ω₁₀ Σ_n J_n(g′) √π τ exp[-(ω+sΔ+nΔ′)²τ²/4]` on `grid`.
///
/// Chirps whose frequency differs from the ladder spacing are evaluated
/// directly at each cell; nothing is snapped onto ladder offsets.
pub fn incoming_spectrum(pulse: &ProbePulseSpec, grid: &FloquetGrid) -> Result<FloquetSpectrum> {
    pulse.validate()?;
    grid.check_resolves(pulse)?;
    Ok(FloquetSpectrum::from_fn(*grid, |nu| pulse.spectrum_at(nu)))
}

/// `2π ∫|Ω₁(0,t)|² dt` for an unchirped Gaussian, `2π |Ω₁₀|² τ √(π/2)`.
pub fn gaussian_time_power(pulse: &ProbePulseSpec) -> f64 {
    2.0 * PI * pulse.omega10.norm_sqr() * pulse.tau * (PI / 2.0).sqrt()
}
