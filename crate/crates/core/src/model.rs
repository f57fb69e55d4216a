//! Physical parameters, initial atomic states, thermal photon statistics and
//! the basis conventions shared by every other module.
//!
//! Frequencies are expressed in units of the atom-field coupling `g` and
//! times as the dimensionless product `gt`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Two-atom basis order used for every 4x4 atomic matrix:
/// `|++>, |+->, |-+>, |-->` where the first label is atom 1 (inside the
/// cavity) and the second is atom 2.
pub mod basis {
    pub const EXCITED_EXCITED: usize = 0;
    pub const EXCITED_GROUND: usize = 1;
    pub const GROUND_EXCITED: usize = 2;
    pub const GROUND_GROUND: usize = 3;

    /// Human-readable ket labels, indexed like the atomic basis.
    pub const LABELS: [&str; 4] = ["|++>", "|+->", "|-+>", "|-->"];

    /// Split an atomic index into `(atom1, atom2)` levels, 0 = excited, 1 = ground.
    #[inline]
    pub fn levels(index: usize) -> (usize, usize) {
        (index / 2, index % 2)
    }

    #[inline]
    pub fn index(atom1: usize, atom2: usize) -> usize {
        2 * atom1 + atom2
    }
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Physical parameters of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Atom-field coupling. Sets the time unit; all other frequencies are
    /// given relative to it.
    pub coupling_g: f64,
    /// Dipole-dipole coupling in units of `g` (`J / g`).
    pub alpha: f64,
    /// Shared atomic and cavity frequency in units of `g`.
    pub omega: f64,
    /// Mean thermal photon number of the cavity mode.
    pub nbar: f64,
    /// Upper bound on the discarded thermal probability mass.
    pub tail_tolerance: f64,
}

impl SystemConfig {
    pub fn new(nbar: f64, alpha: f64) -> Result<Self> {
        let config = Self {
            coupling_g: 1.0,
            alpha,
            omega: 0.0,
            nbar,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_tail_tolerance(mut self, tail_tolerance: f64) -> Result<Self> {
        self.tail_tolerance = tail_tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return Err(Error::InvalidMeanPhotonNumber(self.nbar));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::InvalidTailTolerance(self.tail_tolerance));
        }
        if !(self.coupling_g.is_finite() && self.coupling_g > 0.0) {
            return Err(Error::InvalidFrequency(self.coupling_g));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidFrequency(self.omega));
        }
        Ok(())
    }

    pub fn thermal(&self) -> Result<ThermalDistribution> {
        ThermalDistribution::new(self.nbar, self.tail_tolerance)
    }
}

/// Product of two single-atom superpositions
/// `cos(theta) |+> + e^{i phi} sin(theta) |->`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicProductState {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    amplitudes: [C64; 4],
}

/// Single-atom level, used to build basis product states by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Excited,
    Ground,
}

impl AtomicProductState {
    pub fn new(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Self {
        product_amplitudes(theta1, theta2, phi1, phi2)
    }

    pub fn from_levels(atom1: Level, atom2: Level) -> Self {
        let angle = |level| match level {
            Level::Excited => 0.0,
            Level::Ground => std::f64::consts::FRAC_PI_2,
        };
        Self::new(angle(atom1), angle(atom2), 0.0, 0.0)
    }

    /// Both atoms in `(|+> + |->) / sqrt(2)`.
    pub fn symmetric_coherent() -> Self {
        let q = std::f64::consts::FRAC_PI_4;
        Self::new(q, q, 0.0, 0.0)
    }

    /// Amplitudes `(a, b, c, d)` on `|++>, |+->, |-+>, |-->`.
    pub fn amplitudes(&self) -> [C64; 4] {
        self.amplitudes
    }

    pub fn a(&self) -> C64 {
        self.amplitudes[basis::EXCITED_EXCITED]
    }

    pub fn b(&self) -> C64 {
        self.amplitudes[basis::EXCITED_GROUND]
    }

    pub fn c(&self) -> C64 {
        self.amplitudes[basis::GROUND_EXCITED]
    }

    pub fn d(&self) -> C64 {
        self.amplitudes[basis::GROUND_GROUND]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn product_amplitudes(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> AtomicProductState {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let amplitudes = [
        C64::new(c1 * c2, 0.0),
        C64::from_polar(c1 * s2, phi2),
        C64::from_polar(c2 * s1, phi1),
        C64::from_polar(s1 * s2, phi1 + phi2),
    ];
    AtomicProductState {
        theta1,
        theta2,
        phi1,
        phi2,
        amplitudes,
    }
}

/// Geometric photon-number distribution of a thermal mode, truncated at a
/// certified cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalDistribution {
    pub nbar: f64,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl ThermalDistribution {
    /// Keeps the smallest cutoff `N` whose discarded mass
    /// `(nbar / (1 + nbar))^(N + 1)` is below `tail_tolerance`.
    pub fn new(nbar: f64, tail_tolerance: f64) -> Result<Self> {
        validate_nbar(nbar)?;
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(Error::InvalidTailTolerance(tail_tolerance));
        }
        let ratio = nbar / (1.0 + nbar);
        let mut cutoff = if ratio == 0.0 {
            0
        } else {
            // first guess from logarithms, corrected below against the exact tail
            ((tail_tolerance.ln() / ratio.ln()).ceil() as usize).saturating_sub(1)
        };
        while cutoff > 0 && geometric_tail(ratio, cutoff - 1) < tail_tolerance {
            cutoff -= 1;
        }
        while geometric_tail(ratio, cutoff) >= tail_tolerance {
            cutoff += 1;
        }
        Ok(Self::with_cutoff_unchecked(nbar, cutoff))
    }

    /// Retains exactly `cutoff + 1` weights regardless of tail mass.
    pub fn with_cutoff(nbar: f64, cutoff: usize) -> Result<Self> {
        validate_nbar(nbar)?;
        Ok(Self::with_cutoff_unchecked(nbar, cutoff))
    }

    fn with_cutoff_unchecked(nbar: f64, cutoff: usize) -> Self {
        let ratio = nbar / (1.0 + nbar);
        let norm = 1.0 / (1.0 + nbar);
        let mut weights = Vec::with_capacity(cutoff + 1);
        let mut power = 1.0;
        for _ in 0..=cutoff {
            weights.push(power * norm);
            power *= ratio;
        }
        Self {
            nbar,
            weights,
            tail_mass: geometric_tail(ratio, cutoff),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `p_n`, zero beyond the cutoff.
    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(0.0)
    }
}

fn validate_nbar(nbar: f64) -> Result<()> {
    if nbar.is_finite() && nbar >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMeanPhotonNumber(nbar))
    }
}

/// `sum_{n > cutoff} p_n`
fn geometric_tail(ratio: f64, cutoff: usize) -> f64 {
    ratio.powi(cutoff as i32 + 1)
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Bose-Einstein occupation of a mode with angular frequency `omega` (rad/s)
/// at `temperature` (K).
pub fn mean_photon_from_temperature(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidFrequency(omega));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidTemperature(temperature));
    }
    Ok(bose_einstein(HBAR * omega / (BOLTZMANN * temperature)))
}

/// `1 / (e^x - 1)` for the reduced energy `x = hbar omega / k_B T`.
pub fn bose_einstein(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn amplitudes_of_named_states() {
        let ee = product_amplitudes(0.0, 0.0, 0.0, 0.0);
        assert_eq!(ee.a(), C64::new(1.0, 0.0));
        assert_eq!(ee.b().norm() + ee.c().norm() + ee.d().norm(), 0.0);

        let gg = product_amplitudes(FRAC_PI_2, FRAC_PI_2, 0.0, 0.0);
        assert_abs_diff_eq!(gg.d().re, 1.0, epsilon = 1e-15);
        for z in [gg.a(), gg.b(), gg.c()] {
            assert!(z.norm() < 1e-15);
        }

        let coherent = product_amplitudes(FRAC_PI_4, FRAC_PI_4, 0.0, 0.0);
        for z in coherent.amplitudes() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        assert_eq!(coherent, AtomicProductState::symmetric_coherent());
    }

    #[test]
    fn vacuum_keeps_single_weight() {
        let dist = ThermalDistribution::new(0.0, 1e-10).unwrap();
        assert_eq!(dist.weights(), &[1.0]);
        assert_eq!(dist.cutoff(), 0);
        assert_eq!(dist.tail_mass(), 0.0);
    }

    #[test]
    fn unit_mean_photon_weights() {
        let dist = ThermalDistribution::new(1.0, 1e-3).unwrap();
        assert_eq!(&dist.weights()[..3], &[0.5, 0.25, 0.125]);
    }

    #[test]
    fn cutoff_for_two_photons() {
        let dist = ThermalDistribution::new(2.0, 1e-10).unwrap();
        // Direct summation of the discarded weights n > N, independent of the
        // closed-form tail used in the implementation.
        let direct_tail = |cutoff: usize| -> f64 {
            let mut p = 1.0 / 3.0;
            let mut tail = 0.0;
            for n in 0..cutoff + 2000 {
                if n > cutoff {
                    tail += p;
                }
                p *= 2.0 / 3.0;
            }
            tail
        };
        assert!(direct_tail(56) < 1e-10);
        assert!(direct_tail(55) >= 1e-10);
        assert_eq!(dist.cutoff(), 56);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            ThermalDistribution::new(-0.1, 1e-10),
            Err(Error::InvalidMeanPhotonNumber(_))
        ));
        assert!(matches!(
            ThermalDistribution::new(1.0, 0.0),
            Err(Error::InvalidTailTolerance(_))
        ));
        assert!(matches!(
            ThermalDistribution::new(1.0, 1.0),
            Err(Error::InvalidTailTolerance(_))
        ));
        assert!(SystemConfig::new(0.1, -1.0).is_err());
        assert!(SystemConfig::new(f64::NAN, 0.5).is_err());
        assert!(mean_photon_from_temperature(1.0, 0.0).is_err());
        assert!(mean_photon_from_temperature(-1.0, 300.0).is_err());
    }

    #[test]
    fn bose_einstein_occupation() {
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let temperature_for = |x: f64| HBAR * omega / (BOLTZMANN * x);
        let n1 = mean_photon_from_temperature(omega, temperature_for(2f64.ln())).unwrap();
        assert_abs_diff_eq!(n1, 1.0, epsilon = 1e-12);
        let n2 = mean_photon_from_temperature(omega, temperature_for(1.5f64.ln())).unwrap();
        assert_abs_diff_eq!(n2, 2.0, epsilon = 1e-12);
        let cold = mean_photon_from_temperature(omega, 1e-6).unwrap();
        assert!((0.0..1e-100).contains(&cold));
    }

    #[test]
    fn ground_level_names() {
        let s = AtomicProductState::from_levels(Level::Excited, Level::Ground);
        assert_abs_diff_eq!(s.b().re, 1.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn product_state_is_normalized_and_rank_one(
            t1 in -10.0f64..10.0, t2 in -10.0f64..10.0,
            p1 in -10.0f64..10.0, p2 in -10.0f64..10.0,
        ) {
            let s = product_amplitudes(t1, t2, p1, p2);
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-14);
            prop_assert!((s.a() * s.d() - s.b() * s.c()).norm() <= 1e-14);
        }

        #[test]
        fn phase_shift_on_atom_one(
            t1 in -4.0f64..4.0, t2 in -4.0f64..4.0,
            p1 in -4.0f64..4.0, p2 in -4.0f64..4.0, delta in -4.0f64..4.0,
        ) {
            let s = product_amplitudes(t1, t2, p1, p2);
            let shifted = product_amplitudes(t1, t2, p1 + delta, p2);
            let phase = C64::from_polar(1.0, delta);
            prop_assert!((shifted.a() - s.a()).norm() <= 1e-14);
            prop_assert!((shifted.b() - s.b()).norm() <= 1e-14);
            prop_assert!((shifted.c() - s.c() * phase).norm() <= 1e-14);
            prop_assert!((shifted.d() - s.d() * phase).norm() <= 1e-14);
        }

        #[test]
        fn thermal_mass_is_complete(nbar in 0.0f64..5.0, log_tol in -14.0f64..-1.0) {
            let tol = 10f64.powf(log_tol);
            let dist = ThermalDistribution::new(nbar, tol).unwrap();
            let kept: f64 = dist.weights().iter().sum();
            prop_assert!((kept + dist.tail_mass() - 1.0).abs() <= 1e-12);
            prop_assert!(dist.tail_mass() < tol);
            prop_assert!(dist.weights().iter().all(|&p| p >= 0.0));
            if nbar < 1.0 {
                prop_assert!(dist.weights().windows(2).all(|w| w[1] < w[0]));
            }
        }
    }
}
