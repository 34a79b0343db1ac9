//! Floquet-ladder propagation engine.
//!
//! For a reduced frequency `ω` the probe coherences on the ladder
//! `ω + sΔ`, `|s| <= S`, satisfy `A σ = -Ω` with
//!
//! ```text
//! A[s,s'] = (ω+sΔ+δ₁+iγ_ab) δ_{ss'} - |Ω₂|² Σ_n c_n c*_{n-(s'-s)} / (ω+(s+n)Δ+δ₁-δ₂+iγ_cb)
//! ```
//!
//! after eliminating the Raman coherence. The field then obeys
//! `c ∂_z Ω = i (ω + N) Ω` with `N = diag(sΔ) - κ² A⁻¹`, so
//! `Ω(z) = U exp[i z/c (ω + N^d)] U⁻¹ Ω(0)`. Columns are independent and
//! are solved in parallel; results are collected in base-band order so the
//! output never depends on scheduling.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::{chirp_coefficients, ControlFieldSpec, MediumParams, ProbePulseSpec, BESSEL_PAD};
use crate::spectrum::{incoming_spectrum, FloquetGrid, FloquetSpectrum};
use crate::units::C_AU;

/// `‖U N^d U⁻¹ - N‖_max / ‖N‖_max` above which the eigen route is abandoned.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-8;
/// Eigenvector-matrix condition number above which the eigen route is abandoned.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;
/// Coupling matrices worse than this are treated as singular.
pub const MAX_COUPLING_CONDITION: f64 = 1e12;
/// With `γ_cb = 0`, Raman denominators closer than this (times `Δ`) to zero
/// are poles.
pub const POLE_GUARD: f64 = 1e-3;
/// Relative output-spectrum change accepted as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;

/// Exponents below this underflow to an exactly absorbed mode.
const UNDERFLOW_EXPONENT: f64 = -745.0;
const OVERFLOW_EXPONENT: f64 = 709.0;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// The ω-independent part of the coupling: chirp coefficients arranged as
/// `B[s, m] = c_{m-s}` so that `A = diag(...) - |Ω₂|² B diag(1/D_m) B^H`,
/// with `m` running over the Raman rungs `[-S-n_max, S+n_max]`.
#[derive(Debug, Clone)]
pub struct LadderCoupling {
    medium: MediumParams,
    delta: f64,
    ladder: usize,
    n_max: usize,
    rabi2: f64,
    mixing: CMat,
}

impl LadderCoupling {
    pub fn new(medium: &MediumParams, control: &ControlFieldSpec, ladder: usize) -> Result<Self> {
        medium.validate()?;
        control.validate()?;
        let n_max = (ladder as f64).max(control.phase.spread().ceil()) as usize + BESSEL_PAD;
        let coeffs = chirp_coefficients(control, n_max)?;
        let n_max = coeffs.n_max();
        let rungs = 2 * ladder + 1;
        let raman = 2 * (ladder + n_max) + 1;
        let mixing = CMat::from_fn(rungs, raman, |row, col| {
            let s = row as i64 - ladder as i64;
            let m = col as i64 - (ladder + n_max) as i64;
            coeffs.get(m - s)
        });
        Ok(LadderCoupling {
            medium: *medium,
            delta: control.delta(),
            ladder,
            n_max,
            rabi2: control.omega2.norm_sqr(),
            mixing,
        })
    }

    pub fn ladder(&self) -> usize {
        self.ladder
    }

    /// Coupling matrix at reduced frequency `omega` (any real value; the
    /// engine only asks for base-band ones).
    pub fn matrix(&self, omega: f64) -> Result<CouplingMatrix> {
        let med = &self.medium;
        let reach = (self.ladder + self.n_max) as i64;
        let inv_denoms: Vec<Complex64> = (-reach..=reach)
            .map(|m| {
                let d = Complex64::new(omega + m as f64 * self.delta + med.delta1 - med.delta2, med.gamma_cb);
                if med.gamma_cb == 0.0 && d.norm() < POLE_GUARD * self.delta {
                    Err(Error::TwoPhotonPole { omega })
                } else {
                    Ok(d.inv())
                }
            })
            .collect::<Result<_>>()?;

        let mut entries = if self.rabi2 == 0.0 {
            CMat::zeros(self.mixing.nrows(), self.mixing.nrows())
        } else {
            let mut weighted = self.mixing.clone();
            for (mut col, w) in weighted.column_iter_mut().zip(&inv_denoms) {
                col *= *w;
            }
            weighted * self.mixing.adjoint() * Complex64::new(-self.rabi2, 0.0)
        };
        for k in 0..entries.nrows() {
            let s = k as f64 - self.ladder as f64;
            entries[(k, k)] += Complex64::new(omega + s * self.delta + med.delta1, med.gamma_ab);
        }
        Ok(CouplingMatrix {
            omega,
            delta: self.delta,
            ladder: self.ladder,
            entries,
        })
    }
}

/// `A(ω)` in absolute ladder indexing, rows and columns `s = -S..=S`.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub omega: f64,
    pub delta: f64,
    pub ladder: usize,
    entries: CMat,
}

impl CouplingMatrix {
    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn get(&self, s: i64, s_prime: i64) -> Complex64 {
        let l = self.ladder as i64;
        self.entries[((s + l) as usize, (s_prime + l) as usize)]
    }
}

pub fn build_coupling_matrix(
    omega: f64,
    medium: &MediumParams,
    control: &ControlFieldSpec,
    ladder: usize,
) -> Result<CouplingMatrix> {
    LadderCoupling::new(medium, control, ladder)?.matrix(omega)
}

fn checked_inverse(a: &CouplingMatrix) -> Result<CMat> {
    let singular = |condition| Error::Singular {
        omega: a.omega,
        condition,
    };
    let inv = linalg::inverse(&a.entries).ok_or_else(|| singular(f64::INFINITY))?;
    let condition = linalg::norm1(&a.entries) * linalg::norm1(&inv);
    if condition.is_nan() || condition >= MAX_COUPLING_CONDITION {
        return Err(singular(condition));
    }
    Ok(inv)
}

/// Probe coherence on the ladder, `σ_ab = -A⁻¹ Ω`.
pub fn solve_coherence(input: &[Complex64], a: &CouplingMatrix) -> Result<Vec<Complex64>> {
    if input.len() != a.entries.nrows() {
        return Err(Error::GridMismatch(format!(
            "column has {} rungs, coupling matrix {}",
            input.len(),
            a.entries.nrows()
        )));
    }
    let inv = checked_inverse(a)?;
    let sigma = -(inv * CVec::from_column_slice(input));
    Ok(sigma.iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationPath {
    Eigen,
    MatrixExponential,
}

/// `N(ω)` with its eigendecomposition, or the record of why it is not used.
#[derive(Debug, Clone)]
pub struct PropagationMatrix {
    pub omega: f64,
    n: CMat,
    eigenvalues: Vec<Complex64>,
    u: CMat,
    u_inv: CMat,
    condition_number: f64,
    reconstruction_residual: f64,
    path: PropagationPath,
}

pub fn build_propagation_matrix(a: &CouplingMatrix, kappa2: f64) -> Result<PropagationMatrix> {
    let inv = checked_inverse(a)?;
    let mut n = inv * Complex64::new(-kappa2, 0.0);
    for k in 0..n.nrows() {
        n[(k, k)] += (k as f64 - a.ladder as f64) * a.delta;
    }

    let fallback = |n: CMat, eigenvalues, u, u_inv, condition_number, reconstruction_residual| {
        log::debug!("omega={:e}: eigen route rejected, using matrix exponential", a.omega);
        PropagationMatrix {
            omega: a.omega,
            n,
            eigenvalues,
            u,
            u_inv,
            condition_number,
            reconstruction_residual,
            path: PropagationPath::MatrixExponential,
        }
    };

    let Some(eig) = linalg::eigen(&n) else {
        return Ok(fallback(
            n,
            Vec::new(),
            CMat::zeros(0, 0),
            CMat::zeros(0, 0),
            f64::INFINITY,
            f64::INFINITY,
        ));
    };
    let Some(u_inv) = linalg::inverse(&eig.vectors) else {
        return Ok(fallback(
            n,
            eig.values,
            eig.vectors,
            CMat::zeros(0, 0),
            f64::INFINITY,
            f64::INFINITY,
        ));
    };
    let condition_number = linalg::norm1(&eig.vectors) * linalg::norm1(&u_inv);
    let diag = CMat::from_diagonal(&DVector::from_column_slice(&eig.values));
    let rebuilt = &eig.vectors * diag * &u_inv;
    let scale = linalg::max_abs(&n);
    let reconstruction_residual = if scale > 0.0 {
        linalg::max_abs(&(rebuilt - &n)) / scale
    } else {
        0.0
    };

    let accepted = reconstruction_residual < RECONSTRUCTION_TOLERANCE && condition_number <= MAX_EIGENVECTOR_CONDITION;
    if !accepted {
        return Ok(fallback(
            n,
            eig.values,
            eig.vectors,
            u_inv,
            condition_number,
            reconstruction_residual,
        ));
    }
    Ok(PropagationMatrix {
        omega: a.omega,
        n,
        eigenvalues: eig.values,
        u: eig.vectors,
        u_inv,
        condition_number,
        reconstruction_residual,
        path: PropagationPath::Eigen,
    })
}

/// Per-call bookkeeping of the exponentials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagationDiagnostics {
    /// Columns that went through the matrix exponential.
    pub expm_columns: usize,
    /// Modes whose attenuation underflowed to exactly zero.
    pub absorbed_modes: usize,
    /// Modes with a growing exponent too large to represent, clamped to zero.
    pub overflowed_modes: usize,
}

impl PropagationDiagnostics {
    fn merge(mut self, other: PropagationDiagnostics) -> Self {
        self.expm_columns += other.expm_columns;
        self.absorbed_modes += other.absorbed_modes;
        self.overflowed_modes += other.overflowed_modes;
        self
    }

    pub fn fully_absorbed(&self) -> bool {
        self.absorbed_modes + self.overflowed_modes > 0
    }
}

impl PropagationMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.n
    }

    /// Mode susceptibilities `N^d_kk`, in no particular order.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMat {
        &self.u
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn reconstruction_residual(&self) -> f64 {
        self.reconstruction_residual
    }

    pub fn path(&self) -> PropagationPath {
        self.path
    }

    /// Whether the eigen route is usable at all (it may still have been
    /// rejected on tolerance grounds).
    pub fn has_eigendecomposition(&self) -> bool {
        self.u_inv.nrows() == self.n.nrows()
    }

    /// `‖N U - U N^d‖_max / ‖N‖_max`.
    pub fn eigen_residual(&self) -> f64 {
        if self.u.nrows() != self.n.nrows() {
            return f64::INFINITY;
        }
        let diag = CMat::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        let scale = linalg::max_abs(&self.n);
        if scale == 0.0 {
            return 0.0;
        }
        linalg::max_abs(&(&self.n * &self.u - &self.u * diag)) / scale
    }

    /// `i (z/c) (ωI + N)`.
    pub fn generator(&self, z: f64) -> CMat {
        let mut g = self.n.clone();
        for k in 0..g.nrows() {
            g[(k, k)] += self.omega;
        }
        g * Complex64::new(0.0, z / C_AU)
    }

    /// Modal amplitudes `U⁻¹ Ω`.
    fn modal(&self, input: &[Complex64]) -> Vec<Complex64> {
        (&self.u_inv * CVec::from_column_slice(input)).iter().copied().collect()
    }

    fn reconstruct(&self, modal: &[Complex64], z: f64) -> (Vec<Complex64>, PropagationDiagnostics) {
        let mut diag = PropagationDiagnostics::default();
        let scale = z / C_AU;
        let weighted: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .zip(modal)
            .map(|(lambda, amp)| {
                let exponent = Complex64::new(0.0, scale) * (self.omega + lambda);
                if exponent.re < UNDERFLOW_EXPONENT {
                    diag.absorbed_modes += 1;
                    czero()
                } else if exponent.re > OVERFLOW_EXPONENT {
                    diag.overflowed_modes += 1;
                    czero()
                } else {
                    amp * exponent.exp()
                }
            })
            .collect();
        let out = &self.u * CVec::from_vec(weighted);
        (out.iter().copied().collect(), diag)
    }

    fn via_expm(&self, input: &[Complex64], z: f64) -> Vec<Complex64> {
        if z == 0.0 {
            return input.to_vec();
        }
        let out = linalg::expm(&self.generator(z)) * CVec::from_column_slice(input);
        out.iter()
            .map(|v| {
                if v.re.is_finite() && v.im.is_finite() {
                    *v
                } else {
                    czero()
                }
            })
            .collect()
    }

    /// Carries one column from the entrance to depth `z` along the
    /// recommended route.
    pub fn propagate_column(&self, input: &[Complex64], z: f64) -> (Vec<Complex64>, PropagationDiagnostics) {
        self.propagate_column_via(input, z, self.path)
            .expect("recommended path is always available")
    }

    /// Same, forcing a route. The eigen route is refused only when no
    /// decomposition exists.
    pub fn propagate_column_via(
        &self,
        input: &[Complex64],
        z: f64,
        path: PropagationPath,
    ) -> Option<(Vec<Complex64>, PropagationDiagnostics)> {
        if z == 0.0 {
            return Some((input.to_vec(), PropagationDiagnostics::default()));
        }
        match path {
            PropagationPath::Eigen => {
                if !self.has_eigendecomposition() {
                    return None;
                }
                Some(self.reconstruct(&self.modal(input), z))
            }
            PropagationPath::MatrixExponential => Some((
                self.via_expm(input, z),
                PropagationDiagnostics {
                    expm_columns: 1,
                    ..Default::default()
                },
            )),
        }
    }
}

/// Incoming field already projected onto the modes of each column, so that
/// repeated propagation to many depths costs one matrix-vector product per
/// column.
#[derive(Debug, Clone)]
pub struct PreparedInput {
    grid: FloquetGrid,
    columns: Vec<Vec<Complex64>>,
}

/// Engine over a whole [`FloquetGrid`]: one [`PropagationMatrix`] per
/// base-band sample.
#[derive(Debug, Clone)]
pub struct FloquetEngine {
    grid: FloquetGrid,
    medium: MediumParams,
    control: ControlFieldSpec,
    kappa2: f64,
    columns: Vec<PropagationMatrix>,
}

impl FloquetEngine {
    pub fn new(medium: &MediumParams, control: &ControlFieldSpec, grid: FloquetGrid) -> Result<Self> {
        let delta = control.delta();
        if ((grid.delta - delta) / delta).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "grid spacing {:e} differs from chirp frequency {:e}",
                grid.delta, delta
            )));
        }
        let coupling = LadderCoupling::new(medium, control, grid.ladder)?;
        let kappa2 = medium.kappa2();
        let columns = (0..grid.n_omega)
            .into_par_iter()
            .map(|i| {
                let a = coupling.matrix(grid.base_freq(i))?;
                build_propagation_matrix(&a, kappa2)
            })
            .collect::<Result<Vec<_>>>()?;
        let fallback = columns
            .iter()
            .filter(|c| c.path == PropagationPath::MatrixExponential)
            .count();
        if fallback > 0 {
            log::info!("{fallback} of {} columns use the matrix exponential", grid.n_omega);
        }
        Ok(FloquetEngine {
            grid,
            medium: *medium,
            control: control.clone(),
            kappa2,
            columns,
        })
    }

    pub fn grid(&self) -> &FloquetGrid {
        &self.grid
    }

    pub fn medium(&self) -> &MediumParams {
        &self.medium
    }

    pub fn control(&self) -> &ControlFieldSpec {
        &self.control
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn columns(&self) -> &[PropagationMatrix] {
        &self.columns
    }

    /// Samples `pulse` on the engine grid.
    pub fn incoming(&self, pulse: &ProbePulseSpec) -> Result<FloquetSpectrum> {
        incoming_spectrum(pulse, &self.grid)
    }

    fn check_grid(&self, input: &FloquetSpectrum) -> Result<()> {
        if input.grid() != &self.grid {
            return Err(Error::GridMismatch(format!(
                "input grid {:?} does not match engine grid {:?}",
                input.grid(),
                self.grid
            )));
        }
        Ok(())
    }

    pub fn propagate(&self, input: &FloquetSpectrum, z: f64) -> Result<FloquetSpectrum> {
        self.propagate_with_diagnostics(input, z).map(|(s, _)| s)
    }

    pub fn propagate_with_diagnostics(
        &self,
        input: &FloquetSpectrum,
        z: f64,
    ) -> Result<(FloquetSpectrum, PropagationDiagnostics)> {
        self.check_grid(input)?;
        let results: Vec<_> = self
            .columns
            .par_iter()
            .enumerate()
            .map(|(i, col)| col.propagate_column(input.column(i), z))
            .collect();
        Ok(self.assemble(results))
    }

    /// Forces one route on every column; errors if the eigen route is asked
    /// for where no decomposition exists.
    pub fn propagate_via(&self, input: &FloquetSpectrum, z: f64, path: PropagationPath) -> Result<FloquetSpectrum> {
        self.check_grid(input)?;
        let results = self
            .columns
            .par_iter()
            .enumerate()
            .map(|(i, col)| {
                col.propagate_column_via(input.column(i), z, path)
                    .ok_or_else(|| Error::Unsupported(format!("no eigendecomposition at omega={:e}", col.omega)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(results).0)
    }

    fn assemble(
        &self,
        results: Vec<(Vec<Complex64>, PropagationDiagnostics)>,
    ) -> (FloquetSpectrum, PropagationDiagnostics) {
        let mut diag = PropagationDiagnostics::default();
        let mut columns = Vec::with_capacity(results.len());
        for (col, d) in results {
            diag = diag.merge(d);
            columns.push(col);
        }
        if diag.overflowed_modes > 0 {
            log::warn!("{} growing modes clamped to zero", diag.overflowed_modes);
        }
        (FloquetSpectrum::from_columns(self.grid, columns), diag)
    }

    pub fn prepare(&self, input: &FloquetSpectrum) -> Result<PreparedInput> {
        self.check_grid(input)?;
        let columns = self
            .columns
            .par_iter()
            .enumerate()
            .map(|(i, col)| match col.path {
                PropagationPath::Eigen => col.modal(input.column(i)),
                PropagationPath::MatrixExponential => input.column(i).to_vec(),
            })
            .collect();
        Ok(PreparedInput {
            grid: self.grid,
            columns,
        })
    }

    pub fn propagate_prepared(&self, prepared: &PreparedInput, z: f64) -> Result<FloquetSpectrum> {
        if prepared.grid != self.grid {
            return Err(Error::GridMismatch("prepared input from another engine".into()));
        }
        let results: Vec<_> = self
            .columns
            .par_iter()
            .zip(&prepared.columns)
            .map(|(col, amp)| match col.path {
                PropagationPath::Eigen => {
                    if z == 0.0 {
                        let out = &col.u * CVec::from_column_slice(amp);
                        (out.iter().copied().collect(), PropagationDiagnostics::default())
                    } else {
                        col.reconstruct(amp, z)
                    }
                }
                PropagationPath::MatrixExponential => col.propagate_column(amp, z),
            })
            .collect();
        Ok(self.assemble(results).0)
    }

    /// Spatial snapshot `Ω₁(z, t)` at fixed `t` over `positions`.
    pub fn snapshot(&self, input: &FloquetSpectrum, t: f64, positions: &[f64]) -> Result<Vec<Complex64>> {
        let prepared = self.prepare(input)?;
        positions
            .iter()
            .map(|&z| {
                let spec = self.propagate_prepared(&prepared, z)?;
                Ok(reconstruct_time(&spec, &[t])[0])
            })
            .collect()
    }
}

/// `Ω₁(t) = (1/2π) Σ_cells Ω₁(ν) e^{-iνt} dω` over every physical frequency
/// of the grid.
pub fn reconstruct_time(spectrum: &FloquetSpectrum, times: &[f64]) -> Vec<Complex64> {
    let grid = *spectrum.grid();
    let flat = spectrum.flat();
    let nu0 = grid.flat_frequency(0);
    let dw = grid.d_omega();
    let weight = dw / (2.0 * PI);
    times
        .par_iter()
        .map(|&t| {
            // Horner in w = e^{-i dω t}; |w| = 1 keeps it stable.
            let w = Complex64::from_polar(1.0, -dw * t);
            let sum = flat.iter().rev().fold(czero(), |acc, a| acc * w + a);
            sum * Complex64::from_polar(weight, -nu0 * t)
        })
        .collect()
}

/// Unchirped susceptibility
/// `χ(ω) = -(𝖭|d_ab|²/ε₀ħ) / (ω+δ₁+iγ_ab - |Ω₂|²/(ω+δ₁-δ₂+iγ_cb))`.
///
/// A vanishing Raman denominator is the perfect-transparency limit `χ = 0`.
pub fn susceptibility(omega: f64, medium: &MediumParams, omega2: Complex64) -> Result<Complex64> {
    let raman = Complex64::new(omega + medium.delta1 - medium.delta2, medium.gamma_cb);
    let rabi2 = omega2.norm_sqr();
    if raman.norm() == 0.0 && rabi2 > 0.0 {
        return Ok(czero());
    }
    let mut denom = Complex64::new(omega + medium.delta1, medium.gamma_ab);
    if rabi2 > 0.0 {
        denom -= rabi2 / raman;
    }
    if denom.norm() == 0.0 || !denom.re.is_finite() || !denom.im.is_finite() {
        return Err(Error::SusceptibilityPole { omega });
    }
    Ok(-medium.susceptibility_scale() / denom)
}

/// Single-channel propagation `Ω(z,ν) = Ω(0,ν) exp[i z/c (ν + ω₁χ(ν)/2)]`,
/// the exact result for an unchirped control field.
pub fn scalar_propagation_factor(nu: f64, z: f64, medium: &MediumParams, omega2: Complex64) -> Result<Complex64> {
    let chi = susceptibility(nu, medium, omega2)?;
    let k = Complex64::new(nu, 0.0) + 0.5 * medium.omega1 * chi;
    Ok((Complex64::new(0.0, z / C_AU) * k).exp())
}

/// Grid resolution for one convergence run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub ladder: usize,
    pub n_omega: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub coarse: Truncation,
    pub fine: Truncation,
    pub compared_cells: usize,
    pub max_abs_difference: f64,
    /// `max|Δ| / max|Ω_fine|` over the shared cells.
    pub relative_difference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub z: f64,
    pub tolerance: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Runs the same propagation at successive truncations and compares output
/// spectra on the physical frequencies both grids share.
pub fn convergence_report(
    medium: &MediumParams,
    control: &ControlFieldSpec,
    probe: &ProbePulseSpec,
    z: f64,
    settings: &[Truncation],
) -> Result<ConvergenceReport> {
    if settings.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "truncations",
            reason: "need at least two settings to compare".into(),
        });
    }
    let outputs = settings
        .iter()
        .map(|t| {
            let grid = FloquetGrid::new(control.delta(), t.n_omega, t.ladder)?;
            let engine = FloquetEngine::new(medium, control, grid)?;
            engine.propagate(&engine.incoming(probe)?, z)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = settings
        .windows(2)
        .zip(outputs.windows(2))
        .map(|(t, out)| compare_outputs(t[0], t[1], &out[0], &out[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        z,
        tolerance: CONVERGENCE_TOLERANCE,
        rows,
    })
}

fn compare_outputs(
    coarse: Truncation,
    fine: Truncation,
    a: &FloquetSpectrum,
    b: &FloquetSpectrum,
) -> Result<ConvergenceRow> {
    let ladder = coarse.ladder.min(fine.ladder) as i64;
    let (na, nb) = (coarse.n_omega, fine.n_omega);
    let mut max_diff: f64 = 0.0;
    let mut max_ref: f64 = 0.0;
    let mut compared = 0;
    for i in 0..na {
        // Base-band sample i of grid a sits at index i·nb/na of grid b.
        if (i * nb) % na != 0 {
            continue;
        }
        let j = i * nb / na;
        for s in -ladder..=ladder {
            let (va, vb) = (a.get(i, s), b.get(j, s));
            max_diff = max_diff.max((va - vb).norm());
            max_ref = max_ref.max(vb.norm());
            compared += 1;
        }
    }
    if compared == 0 {
        return Err(Error::GridMismatch(format!(
            "grids with {na} and {nb} base-band samples share no frequencies"
        )));
    }
    let relative_difference = if max_ref > 0.0 { max_diff / max_ref } else { max_diff };
    Ok(ConvergenceRow {
        coarse,
        fine,
        compared_cells: compared,
        max_abs_difference: max_diff,
        relative_difference,
        pass: relative_difference < CONVERGENCE_TOLERANCE,
    })
}
