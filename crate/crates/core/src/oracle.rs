//! Brute-force reference dynamics on the full truncated space
//! `atom1 (x) atom2 (x) Fock(0..=cutoff)`.
//!
//! Nothing here uses the sector decomposition: the Hamiltonian is assembled
//! from its operator definition, diagonalized once, and every state is
//! propagated through the full spectrum.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{basis, AtomicProductState, SystemConfig, ThermalDistribution};
use crate::reduced::AtomicDensityMatrix;

/// Photon numbers kept beyond the thermal cutoff. `Main(n)` reaches `n + 2`.
pub const ORACLE_MARGIN: usize = 4;
const REQUIRED_MARGIN: usize = 2;

/// Full Hamiltonian in units of `g`. Basis index is
/// `(2 * atom1 + atom2) * (cutoff + 1) + photons`, levels 0 = excited.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHamiltonian {
    pub cutoff: usize,
    pub matrix: DMatrix<f64>,
}

impl FullHamiltonian {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, atomic: usize, photons: usize) -> usize {
        atomic * (self.cutoff + 1) + photons
    }

    /// Diagonal of `a^dag a + (sz1 + sz2) / 2 + 1`, the conserved excitation count.
    pub fn excitation_number(&self) -> DMatrix<f64> {
        let dim = self.dimension();
        let mut n = DMatrix::zeros(dim, dim);
        for atomic in 0..4 {
            let (l1, l2) = basis::levels(atomic);
            let excited = (1 - l1) + (1 - l2);
            for m in 0..=self.cutoff {
                let i = self.index(atomic, m);
                n[(i, i)] = (m + excited) as f64;
            }
        }
        n
    }
}

/// Hamiltonian without reference to a thermal distribution; the caller picks
/// the cutoff.
pub fn assemble_full_hamiltonian(alpha: f64, omega: f64, cutoff: usize) -> FullHamiltonian {
    let dim = 4 * (cutoff + 1);
    let mut h = DMatrix::zeros(dim, dim);
    let idx = |atomic: usize, m: usize| atomic * (cutoff + 1) + m;
    let half_inversion = |level: usize| if level == 0 { 0.5 } else { -0.5 };
    for atomic in 0..4 {
        let (l1, l2) = basis::levels(atomic);
        for m in 0..=cutoff {
            let i = idx(atomic, m);
            h[(i, i)] = omega * (half_inversion(l1) + half_inversion(l2) + m as f64);
        }
    }
    // sigma1^+ a + h.c.: |+, v2, m> <-> |-, v2, m+1>
    for l2 in 0..2 {
        for m in 0..cutoff {
            let up = idx(basis::index(0, l2), m);
            let down = idx(basis::index(1, l2), m + 1);
            let g = (m as f64 + 1.0).sqrt();
            h[(up, down)] = g;
            h[(down, up)] = g;
        }
    }
    // J (sigma1^+ sigma2^- + h.c.): |+,-,m> <-> |-,+,m>
    for m in 0..=cutoff {
        let pm = idx(basis::EXCITED_GROUND, m);
        let mp = idx(basis::GROUND_EXCITED, m);
        h[(pm, mp)] = alpha;
        h[(mp, pm)] = alpha;
    }
    FullHamiltonian { cutoff, matrix: h }
}

/// Requires `cutoff >= thermal cutoff + 2` so no retained component is
/// truncated.
pub fn build_full_hamiltonian(config: &SystemConfig, cutoff: usize) -> Result<FullHamiltonian> {
    config.validate()?;
    let required = config.thermal()?.cutoff() + REQUIRED_MARGIN;
    if cutoff < required {
        return Err(Error::OracleCutoffTooSmall { cutoff, required });
    }
    Ok(assemble_full_hamiltonian(config.alpha, config.omega, cutoff))
}

/// Spectral propagator `exp(-i H t)` for a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub struct FullPropagator {
    pub hamiltonian: FullHamiltonian,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl FullPropagator {
    pub fn new(hamiltonian: FullHamiltonian) -> Self {
        let SymmetricEigen {
            eigenvalues,
            eigenvectors,
        } = hamiltonian.matrix.clone().symmetric_eigen();
        Self {
            hamiltonian,
            eigenvalues,
            eigenvectors: eigenvectors.map(C64::from),
        }
    }

    pub fn propagate(&self, initial: &DVector<C64>, gt: f64) -> DVector<C64> {
        if gt == 0.0 {
            return initial.clone();
        }
        let mut coeffs = self.eigenvectors.ad_mul(initial);
        for (c, &e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= C64::from_polar(1.0, -e * gt);
        }
        &self.eigenvectors * coeffs
    }

    pub fn energy(&self, psi: &DVector<C64>) -> f64 {
        let h = self.hamiltonian.matrix.map(C64::from);
        psi.dotc(&(h * psi)).re
    }
}

pub fn propagate_full(hamiltonian: &FullHamiltonian, initial: &DVector<C64>, gt: f64) -> DVector<C64> {
    FullPropagator::new(hamiltonian.clone()).propagate(initial, gt)
}

/// Reference reduced-state evaluator for one configuration.
#[derive(Debug, Clone)]
pub struct Oracle {
    thermal: ThermalDistribution,
    propagator: FullPropagator,
}

impl Oracle {
    /// Fock cutoff of the thermal distribution plus [`ORACLE_MARGIN`].
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let thermal = config.thermal()?;
        Self::with_thermal(config, thermal)
    }

    pub fn with_thermal(config: &SystemConfig, thermal: ThermalDistribution) -> Result<Self> {
        config.validate()?;
        let hamiltonian = assemble_full_hamiltonian(config.alpha, config.omega, thermal.cutoff() + ORACLE_MARGIN);
        Ok(Self {
            thermal,
            propagator: FullPropagator::new(hamiltonian),
        })
    }

    pub fn propagator(&self) -> &FullPropagator {
        &self.propagator
    }

    pub fn initial_vector(&self, state: &AtomicProductState, photons: usize) -> DVector<C64> {
        let h = &self.propagator.hamiltonian;
        let mut v = DVector::zeros(h.dimension());
        for (atomic, amp) in state.amplitudes().into_iter().enumerate() {
            v[h.index(atomic, photons)] = amp;
        }
        v
    }

    /// `Tr_field |psi><psi|` on the full space.
    pub fn partial_trace(&self, psi: &DVector<C64>) -> Matrix4<C64> {
        let h = &self.propagator.hamiltonian;
        Matrix4::from_fn(|i, j| {
            (0..=h.cutoff)
                .map(|m| psi[h.index(i, m)] * psi[h.index(j, m)].conj())
                .sum()
        })
    }

    pub fn reduced_density(&self, state: &AtomicProductState, gt: f64) -> AtomicDensityMatrix {
        let mut rho = Matrix4::zeros();
        for (n, &p) in self.thermal.weights().iter().enumerate() {
            let psi = self.propagator.propagate(&self.initial_vector(state, n), gt);
            rho += self.partial_trace(&psi) * C64::from(p);
        }
        AtomicDensityMatrix { gt, matrix: rho }
    }
}

pub fn oracle_reduced_density(
    state: &AtomicProductState,
    config: &SystemConfig,
    gt: f64,
) -> Result<AtomicDensityMatrix> {
    Ok(Oracle::new(config)?.reduced_density(state, gt))
}
