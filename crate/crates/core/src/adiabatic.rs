//! Closed-form adiabatic (absorptionless) propagation.
//!
//! For a resonant, relaxation-free medium with a sinusoidally modulated
//! control phase `φ(t) = g sin Δt`, the dark-state combination propagates
//! rigidly at `v_g = c cos²θ`, which gives
//!
//! ```text
//! Ω₁(z,t) = Ω₁(0, t - z/v_g) exp[-iα(t - z/v_g)] exp[iα(t)],   α(t) = g sin²θ sin Δt.
//! ```
//!
//! Everything here is valid only while the spectrum stays inside the
//! unchirped transparency window; it serves as a predictor for the full
//! engine and as an oracle in its tests.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{mixing_angle, ControlFieldSpec, MediumParams, MixingAngle, PhaseModulation, ProbePulseSpec};
use crate::specfun::{bessel_row, BesselRow};
use crate::spectrum::{FloquetGrid, FloquetSpectrum};
use crate::units::C_AU;

/// Bessel orders kept beyond `ceil(depth)`.
const ORDER_PAD: i64 = 15;

fn order_bound(depth: f64) -> i64 {
    depth.abs().ceil() as i64 + ORDER_PAD
}

fn row(depth: f64) -> BesselRow {
    bessel_row(order_bound(depth) as usize, depth).expect("bound exceeds |depth| + 8")
}

/// Adiabatic solution for one incoming pulse and one sinusoidal control.
#[derive(Debug, Clone)]
pub struct AdiabaticSolution {
    pulse: ProbePulseSpec,
    control: ControlFieldSpec,
    theta: MixingAngle,
    depth: f64,
    delta: f64,
    effective: BesselRow,
}

impl AdiabaticSolution {
    pub fn new(pulse: &ProbePulseSpec, control: &ControlFieldSpec, medium: &MediumParams) -> Result<Self> {
        pulse.validate()?;
        control.validate()?;
        medium.validate()?;
        let (depth, delta) = match control.phase {
            PhaseModulation::Sinusoidal { depth, frequency } => (depth, frequency),
            PhaseModulation::GeneralPeriodic { .. } => {
                return Err(Error::Unsupported(
                    "adiabatic model needs a sinusoidal control phase".into(),
                ))
            }
        };
        if medium.delta1 != 0.0 || medium.delta2 != 0.0 {
            log::warn!("adiabatic model assumes resonant fields; detunings are ignored");
        }
        let theta = mixing_angle(medium.kappa2(), control.omega2)?;
        let effective = row(depth * theta.sin2);
        Ok(AdiabaticSolution {
            pulse: *pulse,
            control: control.clone(),
            theta,
            depth,
            delta,
            effective,
        })
    }

    pub fn pulse(&self) -> &ProbePulseSpec {
        &self.pulse
    }

    pub fn control(&self) -> &ControlFieldSpec {
        &self.control
    }

    pub fn theta(&self) -> &MixingAngle {
        &self.theta
    }

    pub fn group_velocity(&self) -> f64 {
        self.theta.group_velocity
    }

    /// `g sin²θ`.
    pub fn effective_depth(&self) -> f64 {
        self.depth * self.theta.sin2
    }

    pub fn alpha(&self, t: f64) -> f64 {
        self.effective_depth() * (self.delta * t).sin()
    }

    pub fn time_solution(&self, z: f64, t: f64) -> Complex64 {
        let retarded = t - z / self.group_velocity();
        self.pulse.envelope_at(retarded) * Complex64::from_polar(1.0, self.alpha(t) - self.alpha(retarded))
    }

    /// Spectrum at depth `z`:
    /// `Σ_p J_p(gs) e^{i(ν+pΔ)z/v_g} G(ν+pΔ)` with `G(x) = Σ_m J_m(gs) Ω₁(0, x-mΔ)`
    /// and `gs = g sin²θ`.
    pub fn spectrum_at(&self, z: f64, nu: f64) -> Complex64 {
        let bound = self.effective.n_max() as i64;
        let g_of = |x: f64| -> Complex64 {
            (-bound..=bound)
                .map(|m| self.effective.get(m) * self.pulse.spectrum_at(x - m as f64 * self.delta))
                .sum()
        };
        (-bound..=bound)
            .map(|p| {
                let x = nu + p as f64 * self.delta;
                self.effective.get(p) * self.phase(z, x) * g_of(x)
            })
            .sum()
    }

    fn phase(&self, z: f64, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, x * z / self.group_velocity())
    }

    /// [`spectrum_at`](Self::spectrum_at) over a whole grid, sharing the
    /// incoming-spectrum samples between rungs of one column.
    pub fn spectrum(&self, z: f64, grid: &FloquetGrid) -> Result<FloquetSpectrum> {
        if ((grid.delta - self.delta) / self.delta).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "grid spacing {:e} differs from chirp frequency {:e}",
                grid.delta, self.delta
            )));
        }
        let bound = self.effective.n_max() as i64;
        let ladder = grid.ladder as i64;
        let columns = (0..grid.n_omega)
            .map(|i| {
                let w = grid.base_freq(i);
                let at = |r: i64| w + r as f64 * self.delta;
                // Ω₁(0) on rungs r ∈ [-S-2P, S+2P], G on [-S-P, S+P].
                let reach0 = ladder + 2 * bound;
                let incoming: Vec<Complex64> = (-reach0..=reach0).map(|r| self.pulse.spectrum_at(at(r))).collect();
                let reach1 = ladder + bound;
                let g: Vec<Complex64> = (-reach1..=reach1)
                    .map(|r| {
                        (-bound..=bound)
                            .map(|m| self.effective.get(m) * incoming[(r - m + reach0) as usize])
                            .sum()
                    })
                    .collect();
                (-ladder..=ladder)
                    .map(|s| {
                        (-bound..=bound)
                            .map(|p| {
                                let r = s + p;
                                self.effective.get(p) * self.phase(z, at(r)) * g[(r + reach1) as usize]
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(FloquetSpectrum::from_columns(*grid, columns))
    }

    /// The pulse whose chirp matches the transparency window: same envelope,
    /// depth `g sin²θ`, frequency `Δ`.
    pub fn optimal_pulse(&self) -> ProbePulseSpec {
        ProbePulseSpec {
            chirp_depth: self.effective_depth(),
            chirp_frequency: self.delta,
            ..self.pulse
        }
    }

    /// Period in `z` of the interference between ladder components.
    pub fn oscillation_period(&self) -> f64 {
        2.0 * PI * C_AU * self.theta.cos2 / self.delta
    }
}

/// `2π c cos²θ / Δ`.
pub fn oscillation_period(medium: &MediumParams, control: &ControlFieldSpec) -> Result<f64> {
    medium.validate()?;
    control.validate()?;
    let theta = mixing_angle(medium.kappa2(), control.omega2)?;
    Ok(2.0 * PI * C_AU * theta.cos2 / control.delta())
}

/// Closed-form spectrum of a matched-chirp Gaussian (depth `gs`, frequency
/// `Δ`, centred at `t = 0`) after propagating a distance `z` at `v_g`:
/// `Ω₁₀ Σ_n J_n(gs) e^{i(ω+nΔ)z/v_g} √π τ e^{-(ω+nΔ)²τ²/4}`.
pub fn matched_spectrum(omega10: Complex64, tau: f64, gs: f64, delta: f64, v_g: f64, z: f64, omega: f64) -> Complex64 {
    let r = row(gs);
    let bound = r.n_max() as i64;
    (-bound..=bound)
        .map(|n| {
            let x = omega + n as f64 * delta;
            let gauss = PI.sqrt() * tau * (-0.25 * x * x * tau * tau).exp();
            omega10 * r.get(n) * Complex64::from_polar(gauss, x * z / v_g)
        })
        .sum()
}

/// Closed-form spectrum of an unchirped Gaussian under the same evolution:
/// `Ω₁₀ Σ_{n,j} J_n(gs) J_{n-j}(gs) e^{i(ω+nΔ)z/v_g} √π τ e^{-(ω+jΔ)²τ²/4}`.
pub fn gaussian_input_spectrum(
    omega10: Complex64,
    tau: f64,
    gs: f64,
    delta: f64,
    v_g: f64,
    z: f64,
    omega: f64,
) -> Complex64 {
    let r = row(gs);
    let bound = r.n_max() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    for n in -bound..=bound {
        let phase = Complex64::from_polar(1.0, (omega + n as f64 * delta) * z / v_g);
        for j in (n - bound)..=(n + bound) {
            let x = omega + j as f64 * delta;
            let gauss = PI.sqrt() * tau * (-0.25 * x * x * tau * tau).exp();
            total += omega10 * r.get(n) * r.get(n - j) * phase * gauss;
        }
    }
    total
}

/// Normalised overlap `⟨p₁|p₂⟩ / (‖p₁‖ ‖p₂‖)` of two chirped Gaussians,
/// conjugating the first. Exact Gaussian integrals per Bessel pair:
/// `√(2/(πτ₁τ₂)) √(π/a) Σ_{n,s} J_n(g₁) J_s(g₂) exp(B²/4a + C)`.
pub fn overlap(p1: &ProbePulseSpec, p2: &ProbePulseSpec) -> Result<Complex64> {
    p1.validate()?;
    p2.validate()?;
    if p1.omega10.norm() == 0.0 || p2.omega10.norm() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "omega10",
            reason: "overlap of a zero pulse is undefined".into(),
        });
    }
    let (r1, r2) = (row(p1.chirp_depth), row(p2.chirp_depth));
    let (b1, b2) = (r1.n_max() as i64, r2.n_max() as i64);
    let (w1, w2) = (1.0 / (p1.tau * p1.tau), 1.0 / (p2.tau * p2.tau));
    let a = w1 + w2;
    let b_real = 2.0 * (p1.center_time * w1 + p2.center_time * w2);
    let c = -(p1.center_time * p1.center_time * w1 + p2.center_time * p2.center_time * w2);

    let mut sum = Complex64::new(0.0, 0.0);
    for n in -b1..=b1 {
        let jn = r1.get(n);
        if jn == 0.0 {
            continue;
        }
        for s in -b2..=b2 {
            let js = r2.get(s);
            let b = Complex64::new(b_real, s as f64 * p2.chirp_frequency - n as f64 * p1.chirp_frequency);
            sum += jn * js * (b * b / (4.0 * a) + c).exp();
        }
    }
    let carrier = p1.omega10.conj() * p2.omega10 / (p1.omega10.norm() * p2.omega10.norm());
    let norm = (2.0 / (PI * p1.tau * p2.tau)).sqrt() * (PI / a).sqrt();
    Ok(carrier * norm * sum)
}

/// Decomposition of an incoming pulse into its component along the optimal
/// (window-matched) pulse and an orthogonal remainder.
#[derive(Debug, Clone)]
pub struct Projection {
    /// `⟨optimal|pulse⟩` with both normalised.
    pub coefficient: Complex64,
    pub optimal: ProbePulseSpec,
    /// `√(1 - |V|²)`, the normalised norm of the remainder.
    pub residual: f64,
    solution: AdiabaticSolution,
}

impl Projection {
    /// Transmitted spectrum predicted for the surviving component,
    /// `V × adiabatic(optimal)`.
    pub fn predicted_spectrum(&self, z: f64, grid: &FloquetGrid) -> Result<FloquetSpectrum> {
        Ok(self.solution.spectrum(z, grid)?.scaled(self.coefficient))
    }

    pub fn predicted_spectrum_at(&self, z: f64, nu: f64) -> Complex64 {
        self.coefficient * self.solution.spectrum_at(z, nu)
    }
}

pub fn project_onto_optimal(
    pulse: &ProbePulseSpec,
    control: &ControlFieldSpec,
    medium: &MediumParams,
) -> Result<Projection> {
    let base = AdiabaticSolution::new(pulse, control, medium)?;
    // Same envelope, so both pulses have the same norm |Ω₁₀|²τ√(π/2).
    let optimal = base.optimal_pulse();
    let coefficient = overlap(&optimal, pulse)?;
    let residual = (1.0 - coefficient.norm_sqr()).max(0.0).sqrt();
    let solution = AdiabaticSolution::new(&optimal, control, medium)?;
    Ok(Projection {
        coefficient,
        optimal,
        residual,
        solution,
    })
}

/// Tridiagonal ladder matrix `N′` of the adiabatic limit and its Bessel
/// eigensystem, checked against a numerical eigensolve.
#[derive(Debug, Clone)]
pub struct NPrimeSystem {
    pub ladder: usize,
    pub delta: f64,
    pub g_eff: f64,
    pub matrix: DMatrix<f64>,
    /// `kΔ`, `k = -S..=S`.
    pub eigenvalues: Vec<f64>,
    /// `U′[s,k] = J_{s-k}(-g_eff)`.
    pub eigenvectors: DMatrix<f64>,
    /// Ascending numerical eigenvalues of `matrix`.
    pub numeric_eigenvalues: Vec<f64>,
    /// Eigenpairs `|k| <= interior` are unaffected by truncation.
    pub interior: usize,
    /// `max_k |λ_numeric - kΔ|` over the interior, nearest numeric value.
    pub max_eigenvalue_deviation: f64,
    /// `max |U′ᵀU′ - I|` over the interior block.
    pub orthogonality_error: f64,
    /// `max |N′U′ - U′ diag(kΔ)|` over rows `|s| < S` and interior columns.
    pub eigenvector_residual: f64,
}

impl NPrimeSystem {
    pub fn interior_modes(&self) -> std::ops::RangeInclusive<i64> {
        -(self.interior as i64)..=self.interior as i64
    }
}

pub fn nprime_eigensystem(g_eff: f64, delta: f64, ladder: usize) -> Result<NPrimeSystem> {
    if !(g_eff.is_finite() && delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "nprime",
            reason: "depth must be finite and delta > 0".into(),
        });
    }
    if (ladder as f64) < g_eff.abs() + 12.0 {
        return Err(Error::Truncation(format!(
            "ladder {ladder} too short for effective depth {g_eff}; need >= |g| + 12"
        )));
    }
    let size = 2 * ladder + 1;
    let l = ladder as i64;
    let idx = |s: i64| (s + l) as usize;
    let off = delta * g_eff / 2.0;
    let matrix = DMatrix::from_fn(size, size, |r, c| {
        let (s, k) = (r as i64 - l, c as i64 - l);
        if s == k {
            s as f64 * delta
        } else if (s - k).abs() == 1 {
            off
        } else {
            0.0
        }
    });
    let bessel = bessel_row(2 * ladder + 8, -g_eff).expect("row covers depth");
    let eigenvectors = DMatrix::from_fn(size, size, |r, c| bessel.get(r as i64 - c as i64));
    let eigenvalues: Vec<f64> = (-l..=l).map(|k| k as f64 * delta).collect();

    let mut numeric_eigenvalues: Vec<f64> = SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    numeric_eigenvalues.sort_by(f64::total_cmp);

    let interior = (l - g_eff.abs().ceil() as i64 - 8).max(0);
    let max_eigenvalue_deviation = (-interior..=interior)
        .map(|k| {
            let target = k as f64 * delta;
            numeric_eigenvalues
                .iter()
                .map(|v| (v - target).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);

    let gram = eigenvectors.transpose() * &eigenvectors;
    let applied = &matrix * &eigenvectors;
    let mut orthogonality_error: f64 = 0.0;
    let mut eigenvector_residual: f64 = 0.0;
    for k in -interior..=interior {
        for j in -interior..=interior {
            let target = if j == k { 1.0 } else { 0.0 };
            orthogonality_error = orthogonality_error.max((gram[(idx(j), idx(k))] - target).abs());
        }
        for s in (-l + 1)..l {
            let want = k as f64 * delta * eigenvectors[(idx(s), idx(k))];
            eigenvector_residual = eigenvector_residual.max((applied[(idx(s), idx(k))] - want).abs());
        }
    }

    Ok(NPrimeSystem {
        ladder,
        delta,
        g_eff,
        matrix,
        eigenvalues,
        eigenvectors,
        numeric_eigenvalues,
        interior: interior as usize,
        max_eigenvalue_deviation,
        orthogonality_error,
        eigenvector_residual,
    })
}
