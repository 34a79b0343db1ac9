//! Medium, control and probe descriptions plus the derived couplings.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::bessel_row;
use crate::units::ATOMIC_UNITS;

/// Tolerance on `Σ_n c_n* c_{n+k} = δ_{k0}` beyond which a coefficient list
/// is rejected.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Extra Bessel orders kept beyond the chirp depth.
pub const BESSEL_PAD: usize = 8;

/// Atomic and medium constants, atomic units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub atom_density: f64,
    pub dipole_ab: f64,
    /// Probe carrier frequency.
    pub omega1: f64,
    pub gamma_ab: f64,
    pub gamma_cb: f64,
    /// Probe detuning.
    pub delta1: f64,
    /// Control detuning.
    pub delta2: f64,
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.atom_density,
            self.dipole_ab,
            self.omega1,
            self.gamma_ab,
            self.gamma_cb,
            self.delta1,
            self.delta2,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("medium", "all parameters must be finite"));
        }
        if self.atom_density < 0.0 {
            return Err(invalid("atom_density", "must be >= 0"));
        }
        if self.gamma_ab < 0.0 {
            return Err(invalid("gamma_ab", "must be >= 0"));
        }
        if self.gamma_cb < 0.0 {
            return Err(invalid("gamma_cb", "must be >= 0"));
        }
        if self.omega1 <= 0.0 {
            return Err(invalid("omega1", "must be > 0"));
        }
        Ok(())
    }

    /// Propagation coupling `κ²`; see [`derive_kappa2`].
    pub fn kappa2(&self) -> f64 {
        derive_kappa2(self)
    }

    /// Prefactor `𝖭|d_ab|²/(ε₀ħ)` of the susceptibility.
    pub fn susceptibility_scale(&self) -> f64 {
        self.atom_density * self.dipole_ab * self.dipole_ab / (ATOMIC_UNITS.eps0 * ATOMIC_UNITS.hbar)
    }
}

/// `κ² = 𝖭|d_ab|²ω₁/(2ε₀ħ)`.
pub fn derive_kappa2(medium: &MediumParams) -> f64 {
    0.5 * medium.susceptibility_scale() * medium.omega1
}

/// Periodic phase `φ(t)` of the control field.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseModulation {
    /// `φ(t) = depth · sin(frequency · t)`.
    Sinusoidal { depth: f64, frequency: f64 },
    /// `exp(iφ(t)) = Σ_n c_n exp(inΔt)`, coefficients listed for
    /// `n = -n_max ..= n_max`.
    GeneralPeriodic {
        frequency: f64,
        coefficients: Vec<Complex64>,
    },
}

impl PhaseModulation {
    pub fn frequency(&self) -> f64 {
        match self {
            PhaseModulation::Sinusoidal { frequency, .. } => *frequency,
            PhaseModulation::GeneralPeriodic { frequency, .. } => *frequency,
        }
    }

    /// Rough spread of the coefficient list in ladder steps, used to pick
    /// truncations.
    pub fn spread(&self) -> f64 {
        match self {
            PhaseModulation::Sinusoidal { depth, .. } => depth.abs(),
            PhaseModulation::GeneralPeriodic { coefficients, .. } => (coefficients.len().saturating_sub(1) / 2) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlFieldSpec {
    /// Rabi amplitude `Ω₂`.
    pub omega2: Complex64,
    pub phase: PhaseModulation,
}

impl ControlFieldSpec {
    pub fn sinusoidal(omega2: f64, depth: f64, frequency: f64) -> Self {
        ControlFieldSpec {
            omega2: Complex64::new(omega2, 0.0),
            phase: PhaseModulation::Sinusoidal { depth, frequency },
        }
    }

    /// Chirp (ladder) frequency `Δ`.
    pub fn delta(&self) -> f64 {
        self.phase.frequency()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega2.re.is_finite() && self.omega2.im.is_finite()) {
            return Err(invalid("omega2", "must be finite"));
        }
        let delta = self.delta();
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", "chirp frequency must be > 0"));
        }
        match &self.phase {
            PhaseModulation::Sinusoidal { depth, .. } => {
                if !depth.is_finite() {
                    return Err(invalid("depth", "must be finite"));
                }
            }
            PhaseModulation::GeneralPeriodic { coefficients, .. } => {
                check_unitarity(coefficients)?;
            }
        }
        Ok(())
    }
}

/// Incoming probe: Gaussian envelope times an optional sinusoidal chirp,
/// `Ω₁(0,t) = Ω₁₀ exp(-(t-t₀)²/τ²) exp(i g′ sin Δ′t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePulseSpec {
    pub omega10: Complex64,
    pub tau: f64,
    pub chirp_depth: f64,
    pub chirp_frequency: f64,
    pub center_time: f64,
}

impl ProbePulseSpec {
    pub fn gaussian(omega10: f64, tau: f64) -> Self {
        ProbePulseSpec {
            omega10: Complex64::new(omega10, 0.0),
            tau,
            chirp_depth: 0.0,
            chirp_frequency: 0.0,
            center_time: 0.0,
        }
    }

    pub fn chirped(omega10: f64, tau: f64, depth: f64, frequency: f64) -> Self {
        ProbePulseSpec {
            chirp_depth: depth,
            chirp_frequency: frequency,
            ..ProbePulseSpec::gaussian(omega10, tau)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(invalid("tau", "must be > 0"));
        }
        if !(self.chirp_depth.is_finite() && self.chirp_frequency.is_finite() && self.center_time.is_finite()) {
            return Err(invalid("probe", "chirp and centre time must be finite"));
        }
        if self.chirp_depth != 0.0 && self.chirp_frequency <= 0.0 {
            return Err(invalid("chirp_frequency", "must be > 0 for a chirped probe"));
        }
        Ok(())
    }

    /// Warning text when the probe is not weak compared with the control.
    pub fn weak_probe_warning(&self, control: &ControlFieldSpec) -> Option<String> {
        let ratio = self.omega10.norm() / control.omega2.norm();
        (ratio > 0.1).then(|| format!("probe is not weak: |omega10|/|omega2| = {ratio:.3e} > 0.1"))
    }

    /// `Ω₁₀√π τ`, the peak of the unchirped spectrum.
    pub fn spectral_peak(&self) -> f64 {
        self.omega10.norm() * PI.sqrt() * self.tau
    }

    /// Chirp orders that matter: `|n| <= ceil(g′) + 15`.
    pub(crate) fn chirp_order_bound(&self) -> i64 {
        if self.chirp_depth == 0.0 {
            0
        } else {
            self.chirp_depth.abs().ceil() as i64 + 15
        }
    }

    /// Time-domain field at the entrance.
    pub fn envelope_at(&self, t: f64) -> Complex64 {
        let s = (t - self.center_time) / self.tau;
        let phase = self.chirp_depth * (self.chirp_frequency * t).sin();
        self.omega10 * (-s * s).exp() * Complex64::from_polar(1.0, phase)
    }

    /// Closed-form spectrum with `F(ω) = ∫dt e^{iωt} f(t)`:
    /// `Ω₁₀ Σ_n J_n(g′) √π τ exp(i(ω+nΔ′)t₀) exp(-(ω+nΔ′)²τ²/4)`.
    pub fn spectrum_at(&self, omega: f64) -> Complex64 {
        let bound = self.chirp_order_bound();
        if bound == 0 {
            return self.gaussian_term(omega);
        }
        let row = bessel_row(bound as usize, self.chirp_depth).expect("row covers depth");
        (-bound..=bound)
            .map(|n| {
                let shifted = omega + n as f64 * self.chirp_frequency;
                row.get(n) * self.gaussian_term(shifted)
            })
            .sum()
    }

    pub(crate) fn gaussian_term(&self, omega: f64) -> Complex64 {
        let arg = 0.25 * omega * omega * self.tau * self.tau;
        if arg > 745.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = Complex64::from_polar(1.0, omega * self.center_time);
        self.omega10 * phase * (PI.sqrt() * self.tau * (-arg).exp())
    }
}

/// Mixing angle record, `tan θ = κ/|Ω₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub tan2: f64,
    pub sin2: f64,
    pub cos2: f64,
    /// `v_g = c cos²θ`.
    pub group_velocity: f64,
}

pub fn mixing_angle(kappa2: f64, omega2: Complex64) -> Result<MixingAngle> {
    let rabi2 = omega2.norm_sqr();
    if rabi2 == 0.0 || !rabi2.is_finite() {
        return Err(Error::UndefinedMixingAngle);
    }
    let tan2 = kappa2 / rabi2;
    let cos2 = 1.0 / (1.0 + tan2);
    Ok(MixingAngle {
        tan2,
        sin2: tan2 * cos2,
        cos2,
        group_velocity: ATOMIC_UNITS.c * cos2,
    })
}

/// Fourier coefficients `c_n`, `n = -n_max ..= n_max`, of `exp(iφ(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpCoefficients {
    n_max: usize,
    values: Vec<Complex64>,
}

impl ChirpCoefficients {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_n`, zero outside the stored range.
    pub fn get(&self, n: i64) -> Complex64 {
        let idx = n + self.n_max as i64;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    /// `Σ_n c_n* c_{n+k}`.
    pub fn autocorrelation(&self, k: i64) -> Complex64 {
        autocorrelation(&self.values, k)
    }
}

/// Expansion coefficients of the control phase factor.
///
/// Sinusoidal chirps give `c_n = J_n(g)` and need `n_max >= ceil(g) + 8`;
/// general lists are validated for unitarity and zero-padded to `n_max`.
pub fn chirp_coefficients(spec: &ControlFieldSpec, n_max: usize) -> Result<ChirpCoefficients> {
    match &spec.phase {
        PhaseModulation::Sinusoidal { depth, .. } => {
            let needed = depth.abs().ceil() as usize + BESSEL_PAD;
            if n_max < needed {
                return Err(Error::Truncation(format!(
                    "n_max = {n_max} < ceil(g) + {BESSEL_PAD} = {needed}"
                )));
            }
            let row = bessel_row(n_max, *depth)?;
            let values = (-(n_max as i64)..=n_max as i64)
                .map(|n| Complex64::new(row.get(n), 0.0))
                .collect();
            Ok(ChirpCoefficients { n_max, values })
        }
        PhaseModulation::GeneralPeriodic { coefficients, .. } => {
            check_unitarity(coefficients)?;
            let given = coefficients.len() / 2;
            let n_max = n_max.max(given);
            let mut values = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
            let offset = n_max - given;
            values[offset..offset + coefficients.len()].copy_from_slice(coefficients);
            Ok(ChirpCoefficients { n_max, values })
        }
    }
}

fn autocorrelation(values: &[Complex64], k: i64) -> Complex64 {
    let len = values.len() as i64;
    (0..len)
        .filter_map(|i| {
            let j = i + k;
            (0..len)
                .contains(&j)
                .then(|| values[i as usize].conj() * values[j as usize])
        })
        .sum()
}

fn check_unitarity(coefficients: &[Complex64]) -> Result<()> {
    if coefficients.len().is_multiple_of(2) {
        return Err(invalid(
            "coefficients",
            "need an odd-length list indexed -n_max..=n_max",
        ));
    }
    let span = coefficients.len() as i64 - 1;
    let mut worst = (0, 0.0);
    for k in -span..=span {
        let target = if k == 0 { 1.0 } else { 0.0 };
        let dev = (autocorrelation(coefficients, k) - target).norm();
        if dev > worst.1 {
            worst = (k, dev);
        }
    }
    if worst.1 > UNITARITY_TOLERANCE {
        return Err(Error::NonRealPhase {
            shift: worst.0,
            deviation: worst.1,
        });
    }
    if worst.1 > 1e-10 {
        log::warn!("chirp coefficients unitary only to {:.2e}", worst.1);
    }
    Ok(())
}

/// Ladder half-width `ceil(max(g, g′)) + 10`.
pub fn default_ladder(control: &ControlFieldSpec, probe: &ProbePulseSpec) -> usize {
    control.phase.spread().max(probe.chirp_depth.abs()).ceil() as usize + 10
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_medium() -> MediumParams {
        MediumParams {
            atom_density: 2e-13,
            dipole_ab: 1.0,
            omega1: 0.1,
            gamma_ab: 1e-9,
            gamma_cb: 1e-14,
            delta1: 0.0,
            delta2: 0.0,
        }
    }

    #[test]
    fn kappa2_values() {
        let mut m = fig2_medium();
        let k = derive_kappa2(&m);
        // 𝖭 d² ω₁ / (2 ε₀) with ε₀ = 1/(4π): 2π · 2e-14.
        assert!((k - 2.0 * PI * 2e-14).abs() < 1e-27);
        assert!((k - 1.2566e-13).abs() < 1e-17);
        m.atom_density *= 2.0;
        assert!((derive_kappa2(&m) - 2.0 * k).abs() < 1e-27);
        m.atom_density = 0.0;
        assert_eq!(derive_kappa2(&m), 0.0);
    }

    #[test]
    fn mixing_angle_fig2_and_fig8() {
        let k = derive_kappa2(&fig2_medium());
        let a = mixing_angle(k, Complex64::new(1e-8, 0.0)).unwrap();
        assert!((a.sin2 - 0.9992).abs() < 1e-4);
        let b = mixing_angle(k, Complex64::new(3e-8, 0.0)).unwrap();
        assert!((b.cos2 - 7.11e-3).abs() < 1e-5);
        let z0 = 2.0 * PI * ATOMIC_UNITS.c * b.cos2 / 2e-9;
        assert!((z0 / 3.06e9 - 1.0).abs() < 0.01);
    }

    #[test]
    fn mixing_angle_vacuum_and_zero_control() {
        let a = mixing_angle(0.0, Complex64::new(1e-8, 0.0)).unwrap();
        assert_eq!(a.sin2, 0.0);
        assert_eq!(a.group_velocity, ATOMIC_UNITS.c);
        assert_eq!(
            mixing_angle(1e-13, Complex64::new(0.0, 0.0)),
            Err(Error::UndefinedMixingAngle)
        );
    }

    #[test]
    fn chirp_coefficients_sinusoidal() {
        let spec = ControlFieldSpec::sinusoidal(1e-8, 0.0, 2e-9);
        let c = chirp_coefficients(&spec, 8).unwrap();
        assert_eq!(c.get(0), Complex64::new(1.0, 0.0));
        assert!((-8..=8).filter(|&n| n != 0).all(|n| c.get(n).norm() == 0.0));

        let spec = ControlFieldSpec::sinusoidal(1e-8, 5.0, 2e-9);
        let c = chirp_coefficients(&spec, 20).unwrap();
        assert!((c.get(0).re - -0.177_596_771_314_338_3).abs() < 1e-14);
        for k in -6..=6 {
            let target = if k == 0 { 1.0 } else { 0.0 };
            assert!((c.autocorrelation(k) - target).norm() < 1e-10, "k={k}");
        }
        assert!(matches!(chirp_coefficients(&spec, 12), Err(Error::Truncation(_))));
    }

    #[test]
    fn general_periodic_passthrough_and_rejection() {
        // exp(iφ) = i·e^{iΔt}: a pure frequency shift, trivially unitary.
        let ok = ControlFieldSpec {
            omega2: Complex64::new(1e-8, 0.0),
            phase: PhaseModulation::GeneralPeriodic {
                frequency: 2e-9,
                coefficients: vec![
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 1.0),
                ],
            },
        };
        let c = chirp_coefficients(&ok, 4).unwrap();
        assert_eq!(c.n_max(), 4);
        assert_eq!(c.get(1), Complex64::new(0.0, 1.0));
        assert_eq!(c.get(0), Complex64::new(0.0, 0.0));

        let bad = ControlFieldSpec {
            phase: PhaseModulation::GeneralPeriodic {
                frequency: 2e-9,
                coefficients: vec![
                    Complex64::new(0.5, 0.0),
                    Complex64::new(0.5, 0.0),
                    Complex64::new(0.5, 0.0),
                ],
            },
            ..ok
        };
        assert!(matches!(chirp_coefficients(&bad, 4), Err(Error::NonRealPhase { .. })));
    }

    #[test]
    fn probe_spectrum_peak() {
        let p = ProbePulseSpec::gaussian(1e-10, 8e9);
        assert!((p.spectral_peak() - 1.418).abs() < 1e-3);
        assert!((p.spectrum_at(0.0).re - p.spectral_peak()).abs() < 1e-14);
    }

    #[test]
    fn weak_probe_flag() {
        let control = ControlFieldSpec::sinusoidal(1e-8, 5.0, 2e-9);
        assert!(ProbePulseSpec::gaussian(1e-10, 8e9)
            .weak_probe_warning(&control)
            .is_none());
        assert!(ProbePulseSpec::gaussian(5e-9, 8e9)
            .weak_probe_warning(&control)
            .is_some());
    }

    #[test]
    fn medium_validation() {
        assert!(fig2_medium().validate().is_ok());
        let mut m = fig2_medium();
        m.gamma_cb = -1.0;
        assert!(m.validate().is_err());
        let mut m = fig2_medium();
        m.omega1 = 0.0;
        assert!(m.validate().is_err());
    }
}
