//! Thermally averaged reduced state of the two atoms.
//!
//! Each Fock component `|psi_A> (x) |n>` of the initial state is split across
//! the excitation sectors it touches, propagated exactly, and the field is
//! traced out. Amplitudes from different sectors that end on the same photon
//! number interfere in the reduced state.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::entanglement;
use crate::error::{Error, Result};
use crate::model::{AtomicProductState, SystemConfig, ThermalDistribution};
use crate::sector::{sector_propagator, ExcitationSector, SectorEigensystem};

/// 4x4 reduced state of the atoms in the basis `|++>, |+->, |-+>, |-->`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDensityMatrix {
    pub gt: f64,
    pub matrix: Matrix4<C64>,
}

impl AtomicDensityMatrix {
    pub fn pure(state: &AtomicProductState, gt: f64) -> Self {
        let v = Vector4::from(state.amplitudes());
        Self {
            gt,
            matrix: v * v.adjoint(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        entanglement::hermiticity_error(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.symmetric_eigenvalues().min()
    }

    pub fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }

    pub fn negativity(&self) -> Result<f64> {
        entanglement::negativity(&self.matrix)
    }

    /// `rho_ij` with 1-based indices, matching the usual printed layout.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i - 1, j - 1)]
    }
}

/// Joint atom-field amplitudes, indexed by photon number then atomic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitudes {
    per_fock: Vec<[C64; 4]>,
}

impl JointAmplitudes {
    fn zeros(fock_len: usize) -> Self {
        Self {
            per_fock: vec![[C64::new(0.0, 0.0); 4]; fock_len],
        }
    }

    pub fn get(&self, atomic: usize, photons: usize) -> C64 {
        self.per_fock.get(photons).map_or(C64::new(0.0, 0.0), |row| row[atomic])
    }

    /// Largest photon number that can carry amplitude.
    pub fn max_photons(&self) -> usize {
        self.per_fock.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.per_fock.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr_field |psi><psi|`
    pub fn partial_trace(&self) -> Matrix4<C64> {
        let mut rho = Matrix4::zeros();
        for row in &self.per_fock {
            let v = Vector4::from(*row);
            rho += v * v.adjoint();
        }
        rho
    }
}

/// Exact sector propagators for every sector reachable from the retained
/// thermal components, all evaluated at one time.
#[derive(Debug, Clone)]
pub struct PropagatorSet {
    pub gt: f64,
    ground: DMatrix<C64>,
    low: DMatrix<C64>,
    main: Vec<DMatrix<C64>>,
}

impl PropagatorSet {
    pub fn sector(&self, sector: ExcitationSector) -> &DMatrix<C64> {
        match sector {
            ExcitationSector::Ground => &self.ground,
            ExcitationSector::Low => &self.low,
            ExcitationSector::Main(n) => &self.main[n],
        }
    }
}

/// Precomputed sector eigensystems for one configuration; evaluates reduced
/// states at arbitrary times.
#[derive(Debug, Clone)]
pub struct ReducedStateSolver {
    config: SystemConfig,
    thermal: ThermalDistribution,
    ground: SectorEigensystem,
    low: SectorEigensystem,
    main: Vec<SectorEigensystem>,
}

impl ReducedStateSolver {
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let thermal = config.thermal()?;
        Self::with_thermal(config, thermal)
    }

    /// Uses the supplied photon distribution instead of the one implied by
    /// `config.tail_tolerance`.
    pub fn with_thermal(config: SystemConfig, thermal: ThermalDistribution) -> Result<Self> {
        config.validate()?;
        let alpha = config.alpha;
        let main = (0..=thermal.cutoff())
            .map(|n| SectorEigensystem::for_sector(ExcitationSector::Main(n), alpha))
            .collect();
        Ok(Self {
            config,
            ground: SectorEigensystem::for_sector(ExcitationSector::Ground, alpha),
            low: SectorEigensystem::for_sector(ExcitationSector::Low, alpha),
            main,
            thermal,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn thermal(&self) -> &ThermalDistribution {
        &self.thermal
    }

    pub fn propagators(&self, gt: f64) -> PropagatorSet {
        let omega = self.config.omega;
        let build = |eig: &SectorEigensystem| sector_propagator(eig, eig.sector.free_offset(omega), gt).matrix;
        PropagatorSet {
            gt,
            ground: build(&self.ground),
            low: build(&self.low),
            main: self.main.iter().map(build).collect(),
        }
    }

    /// Evolve `|state> (x) |photons>` with precomputed propagators.
    pub fn evolve_component(
        &self,
        state: &AtomicProductState,
        photons: usize,
        props: &PropagatorSet,
    ) -> JointAmplitudes {
        let mut out = JointAmplitudes::zeros(photons + 3);
        for (atomic, amp) in state.amplitudes().into_iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let (sector, column) = ExcitationSector::locate(atomic, photons);
            let u = props.sector(sector);
            for (row, (a, m)) in sector.basis().into_iter().enumerate() {
                out.per_fock[m][a] += u[(row, column)] * amp;
            }
        }
        out
    }

    pub fn reduced_density(&self, state: &AtomicProductState, gt: f64) -> AtomicDensityMatrix {
        let props = self.propagators(gt);
        let mut acc = [[CompensatedSum::default(); 4]; 4];
        for (n, &p) in self.thermal.weights().iter().enumerate() {
            let rho_n = self.evolve_component(state, n, &props).partial_trace();
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j].add(rho_n[(i, j)] * p);
                }
            }
        }
        AtomicDensityMatrix {
            gt,
            matrix: Matrix4::from_fn(|i, j| acc[i][j].value()),
        }
    }

    pub fn negativity_series(&self, state: &AtomicProductState, grid: &[f64]) -> Result<NegativitySeries> {
        validate_grid(grid)?;
        let negativity = grid
            .par_iter()
            .map(|&gt| self.reduced_density(state, gt).negativity())
            .collect::<Result<Vec<_>>>()?;
        Ok(NegativitySeries {
            gt: grid.to_vec(),
            negativity,
            alpha: self.config.alpha,
            nbar: self.config.nbar,
            theta: (state.theta1, state.theta2),
            phi: (state.phi1, state.phi2),
        })
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// Negativity sampled on a `gt` grid, with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativitySeries {
    pub gt: Vec<f64>,
    pub negativity: Vec<f64>,
    pub alpha: f64,
    pub nbar: f64,
    pub theta: (f64, f64),
    pub phi: (f64, f64),
}

impl NegativitySeries {
    /// `(max negativity, gt at which it first occurs)`
    pub fn peak(&self) -> (f64, f64) {
        self.negativity.iter().zip(&self.gt).fold(
            (f64::NEG_INFINITY, f64::NAN),
            |best, (&e, &t)| if e > best.0 { (e, t) } else { best },
        )
    }
}

/// Neumaier summation of complex terms.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn neumaier((sum, comp): &mut (f64, f64), x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

pub fn evolve_joint_component(
    state: &AtomicProductState,
    photons: usize,
    gt: f64,
    config: &SystemConfig,
) -> Result<JointAmplitudes> {
    let thermal = ThermalDistribution::with_cutoff(config.nbar, photons)?;
    let solver = ReducedStateSolver::with_thermal(*config, thermal)?;
    Ok(solver.evolve_component(state, photons, &solver.propagators(gt)))
}

pub fn reduced_density(state: &AtomicProductState, config: &SystemConfig, gt: f64) -> Result<AtomicDensityMatrix> {
    Ok(ReducedStateSolver::new(*config)?.reduced_density(state, gt))
}

pub fn negativity_series(state: &AtomicProductState, config: &SystemConfig, grid: &[f64]) -> Result<NegativitySeries> {
    ReducedStateSolver::new(*config)?.negativity_series(state, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{basis, Level};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn config(nbar: f64, alpha: f64) -> SystemConfig {
        SystemConfig::new(nbar, alpha).unwrap()
    }

    #[test]
    fn ground_vacuum_is_an_eigenstate() {
        let gg = AtomicProductState::from_levels(Level::Ground, Level::Ground);
        for gt in [0.0, 1.0, 13.7] {
            let psi = evolve_joint_component(&gg, 0, gt, &config(0.0, 0.5).with_omega(2.0)).unwrap();
            assert_abs_diff_eq!(psi.get(basis::GROUND_GROUND, 0).norm(), 1.0, epsilon = 1e-15);
            let rho = reduced_density(&gg, &config(0.0, 0.5), gt).unwrap();
            let mut expected = Matrix4::zeros();
            expected[(3, 3)] = C64::from(1.0);
            assert_abs_diff_eq!((rho.matrix - expected).camax(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn excited_ground_vacuum_follows_low_sector() {
        let alpha: f64 = 0.5;
        let omega = (1.0 + alpha * alpha).sqrt();
        let pm = AtomicProductState::from_levels(Level::Excited, Level::Ground);
        for gt in [0.4, 2.0, 7.5] {
            let psi = evolve_joint_component(&pm, 0, gt, &config(0.01, alpha)).unwrap();
            let (s, c) = (omega * gt).sin_cos();
            let i = C64::i();
            assert!((psi.get(basis::GROUND_GROUND, 1) - (-i * s / omega)).norm() < 1e-12);
            assert!((psi.get(basis::EXCITED_GROUND, 0) - c).norm() < 1e-12);
            assert!((psi.get(basis::GROUND_EXCITED, 0) - (-i * alpha * s / omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn amplitude_norm_is_preserved() {
        let s = AtomicProductState::symmetric_coherent();
        for gt in [0.0, 0.5, 3.0, 25.0] {
            let psi = evolve_joint_component(&s, 2, gt, &config(1.0, 0.5)).unwrap();
            assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-13);
            assert_eq!(psi.max_photons(), 4);
        }
    }

    #[test]
    fn initial_reduced_state_is_pure_product() {
        let s = AtomicProductState::new(0.3, 1.1, 0.7, -2.0);
        let rho = reduced_density(&s, &config(0.8, 1.3), 0.0).unwrap();
        let pure = AtomicDensityMatrix::pure(&s, 0.0);
        // truncated thermal mass shows up as a uniform trace deficit
        assert_abs_diff_eq!((rho.matrix - pure.matrix).camax(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn vacuum_purity_is_one_when_atoms_do_not_couple_to_field() {
        let gg = AtomicProductState::from_levels(Level::Ground, Level::Ground);
        let rho = reduced_density(&gg, &config(0.0, 0.5), 3.0).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn excited_pair_becomes_entangled() {
        let ee = AtomicProductState::from_levels(Level::Excited, Level::Excited);
        let grid: Vec<f64> = (0..=250).map(|i| i as f64 * 0.1).collect();
        let series = negativity_series(&ee, &config(0.01, 0.5), &grid).unwrap();
        assert_eq!(series.negativity[0], 0.0);
        assert!(series.peak().0 > 0.0);
    }

    #[test]
    fn ground_vacuum_series_is_flat() {
        let gg = AtomicProductState::from_levels(Level::Ground, Level::Ground);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let series = negativity_series(&gg, &config(0.0, 0.7), &grid).unwrap();
        assert!(series.negativity.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn grid_validation() {
        let s = AtomicProductState::symmetric_coherent();
        assert!(matches!(
            negativity_series(&s, &config(0.1, 0.5), &[]),
            Err(Error::InvalidGrid)
        ));
        assert!(matches!(
            negativity_series(&s, &config(0.1, 0.5), &[1.0, 0.5]),
            Err(Error::InvalidGrid)
        ));
        assert!(negativity_series(&s, &config(0.1, 0.5), &[0.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::default();
        acc.add(C64::new(1.0, -1.0));
        for _ in 0..1000 {
            acc.add(C64::new(1e-17, 1e-17));
        }
        acc.add(C64::new(-1.0, 1.0));
        assert_abs_diff_eq!(acc.value().re, 1e-14, epsilon = 1e-20);
        assert_abs_diff_eq!(acc.value().im, 1e-14, epsilon = 1e-20);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn reduced_state_is_physical(
            nbar in 0.0f64..2.0, alpha in 0.0f64..2.0,
            t1 in 0.0f64..3.2, t2 in 0.0f64..3.2, p1 in 0.0f64..6.3, p2 in 0.0f64..6.3,
            gt in 0.0f64..25.0,
        ) {
            let s = AtomicProductState::new(t1, t2, p1, p2);
            let rho = reduced_density(&s, &config(nbar, alpha), gt).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-10);
            prop_assert!(rho.hermiticity_error() <= 1e-12);
            prop_assert!(rho.min_eigenvalue() >= -1e-10);
            prop_assert!(rho.purity() <= 1.0 + 1e-10);
            let eps = rho.negativity().unwrap();
            prop_assert!((0.0..=1.0).contains(&eps));
        }

        #[test]
        fn negativity_ignores_free_frequency(
            nbar in 0.0f64..2.0, alpha in 0.0f64..2.0,
            t1 in 0.0f64..3.2, t2 in 0.0f64..3.2, p1 in 0.0f64..6.3, p2 in 0.0f64..6.3,
            gt in 0.0f64..25.0,
        ) {
            let s = AtomicProductState::new(t1, t2, p1, p2);
            let at_rest = reduced_density(&s, &config(nbar, alpha), gt).unwrap().negativity().unwrap();
            let fast = reduced_density(&s, &config(nbar, alpha).with_omega(10.0), gt).unwrap().negativity().unwrap();
            prop_assert!((at_rest - fast).abs() <= 1e-10);
        }
    }
}
