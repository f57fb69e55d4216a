//! Built-in verification suites run by `cavity-entangle selfcheck`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use crate::error::Result;
use crate::model::{AtomicProductState, SystemConfig, ThermalDistribution};
use crate::oracle::Oracle;
use crate::reduced::ReducedStateSolver;
use crate::sector::{closed_form_eigensystem, sector_propagator, Discriminant, ExcitationSector, SectorEigensystem};

pub const ORACLE_THRESHOLD: f64 = 1e-9;
pub const EIGENVALUE_THRESHOLD: f64 = 1e-10;
pub const UNITARITY_THRESHOLD: f64 = 1e-12;
pub const STATE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelfcheckOptions {
    /// Discriminant used by the closed-form eigenvalue suite.
    pub discriminant: Discriminant,
    /// Run the truncation suite with half the certified Fock cutoff.
    pub halve_cutoff: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub max_error: f64,
    pub threshold: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.threshold
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} {}  max_error={:.3e}  threshold={:.1e}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.max_error,
            self.threshold
        )
    }
}

/// (nbar, alpha, theta1, theta2, phi1, phi2, gt)
const PARAMETER_MATRIX: [(f64, f64, f64, f64, f64, f64, f64); 8] = [
    (0.01, 0.5, 0.0, FRAC_PI_2, 0.0, 0.0, 7.3),
    (0.01, 0.5, 0.0, 0.0, 0.0, 0.0, 12.9),
    (0.5, 0.1, FRAC_PI_4, FRAC_PI_4, 0.0, 0.0, 3.1),
    (1.0, 1.0, 0.31, 2.2, 1.4, -0.6, 18.2),
    (2.0, 0.5, 1.1, 0.4, 2.9, 0.3, 24.5),
    (0.0, 2.0, 0.9, 1.3, -1.0, 2.0, 5.5),
    (1.7, 0.0, 2.6, 0.05, 0.2, 4.4, 9.9),
    (0.25, 1.6, FRAC_PI_2, FRAC_PI_2, 0.0, 0.0, 15.0),
];

const ALPHAS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

pub fn run(options: &SelfcheckOptions) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        oracle_suite()?,
        eigenvalue_suite(options.discriminant),
        unitarity_suite(),
        state_validity_suite()?,
        truncation_suite(options.halve_cutoff)?,
    ])
}

fn cases() -> impl Iterator<Item = (SystemConfig, AtomicProductState, f64)> {
    PARAMETER_MATRIX.into_iter().map(|(nbar, alpha, t1, t2, p1, p2, gt)| {
        let config = SystemConfig::new(nbar, alpha).expect("fixed parameters are valid");
        (config, AtomicProductState::new(t1, t2, p1, p2), gt)
    })
}

fn oracle_suite() -> Result<SuiteResult> {
    let mut max_error: f64 = 0.0;
    for (config, state, gt) in cases() {
        let fast = ReducedStateSolver::new(config)?.reduced_density(&state, gt);
        let slow = Oracle::new(&config)?.reduced_density(&state, gt);
        let err = (fast.matrix - slow.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
        max_error = max_error.max(err);
    }
    Ok(SuiteResult {
        name: "oracle-equivalence",
        max_error,
        threshold: ORACLE_THRESHOLD,
    })
}

/// Closed-form dressed frequencies against numeric diagonalization.
pub fn eigenvalue_suite(discriminant: Discriminant) -> SuiteResult {
    let mut max_error: f64 = 0.0;
    for alpha in ALPHAS {
        for n in 0..=30 {
            let numeric = SectorEigensystem::for_sector(ExcitationSector::Main(n), alpha);
            let closed = closed_form_eigensystem(n, alpha, discriminant);
            let err = (numeric.eigenvalues - closed.eigensystem.eigenvalues).amax();
            max_error = max_error.max(err);
        }
    }
    SuiteResult {
        name: "eigenvalues",
        max_error,
        threshold: EIGENVALUE_THRESHOLD,
    }
}

fn unitarity_suite() -> SuiteResult {
    let mut max_error: f64 = 0.0;
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let mut sectors = vec![ExcitationSector::Ground, ExcitationSector::Low];
        sectors.extend((0..=60).step_by(5).map(ExcitationSector::Main));
        for sector in sectors {
            let eig = SectorEigensystem::for_sector(sector, alpha);
            for gt in [0.1, 1.0, 5.0, 20.0, 50.0] {
                max_error = max_error.max(sector_propagator(&eig, 0.0, gt).unitarity_error());
            }
        }
    }
    SuiteResult {
        name: "unitarity",
        max_error,
        threshold: UNITARITY_THRESHOLD,
    }
}

/// Trace, Hermiticity, positivity and negativity range along short
/// trajectories of every case.
fn state_validity_suite() -> Result<SuiteResult> {
    let mut max_error: f64 = 0.0;
    for (config, state, _) in cases() {
        let solver = ReducedStateSolver::new(config)?;
        for i in 0..=50 {
            let rho = solver.reduced_density(&state, i as f64 * 0.5);
            let eps = rho.negativity()?;
            let range_violation = (-eps).max(eps - 1.0).max(0.0);
            max_error = max_error
                .max((rho.trace() - 1.0).abs())
                .max(rho.hermiticity_error())
                .max((-rho.min_eigenvalue()).max(0.0))
                .max(range_violation);
        }
    }
    Ok(SuiteResult {
        name: "state-validity",
        max_error,
        threshold: STATE_THRESHOLD,
    })
}

/// Discarded thermal mass relative to the requested tail tolerance; a value
/// above 1 means the cutoff does not certify the tolerance.
fn truncation_suite(halve_cutoff: bool) -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    for (config, _, _) in cases() {
        let certified = config.thermal()?;
        let used = if halve_cutoff {
            ThermalDistribution::with_cutoff(config.nbar, certified.cutoff() / 2)?
        } else {
            certified
        };
        worst = worst.max(used.tail_mass() / config.tail_tolerance);
    }
    Ok(SuiteResult {
        name: "truncation",
        max_error: worst,
        threshold: 1.0,
    })
}
