//! Block Hamiltonians of the excitation manifolds and their exact propagators.
//!
//! The rotating-wave Hamiltonian conserves `a^dag a + (sz1 + sz2) / 2`, so the
//! joint space splits into a one-dimensional ground sector, a
//! three-dimensional low sector and a family of four-dimensional sectors
//! `Main(n)`. Inside each sector the free part is a multiple of the identity
//! and only the interaction matrix (in units of `g`) needs diagonalizing.
//!
//! The numeric eigensystem is the ground truth used for propagation. The
//! closed-form dressed-state expressions are kept as an independent check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::model::basis::{EXCITED_EXCITED, EXCITED_GROUND, GROUND_EXCITED, GROUND_GROUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcitationSector {
    /// `|-,-,0>`
    Ground,
    /// `|-,-,1>, |+,-,0>, |-,+,0>`
    Low,
    /// `|-,-,n+2>, |+,-,n+1>, |-,+,n+1>, |+,+,n>`
    Main(usize),
}

impl ExcitationSector {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Ground => 1,
            Self::Low => 3,
            Self::Main(_) => 4,
        }
    }

    /// Energy of the free Hamiltonian on this sector, in units of `g`.
    pub fn free_offset(&self, omega: f64) -> f64 {
        match self {
            Self::Ground => -omega,
            Self::Low => 0.0,
            Self::Main(n) => (*n as f64 + 1.0) * omega,
        }
    }

    /// `(atomic index, photon number)` of each sector basis vector, in order.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        match *self {
            Self::Ground => vec![(GROUND_GROUND, 0)],
            Self::Low => vec![(GROUND_GROUND, 1), (EXCITED_GROUND, 0), (GROUND_EXCITED, 0)],
            Self::Main(n) => vec![
                (GROUND_GROUND, n + 2),
                (EXCITED_GROUND, n + 1),
                (GROUND_EXCITED, n + 1),
                (EXCITED_EXCITED, n),
            ],
        }
    }

    /// Sector containing the joint basis state `|atomic, photons>` and its
    /// position in [`ExcitationSector::basis`].
    pub fn locate(atomic: usize, photons: usize) -> (Self, usize) {
        match (atomic, photons) {
            (EXCITED_EXCITED, n) => (Self::Main(n), 3),
            (EXCITED_GROUND, 0) => (Self::Low, 1),
            (GROUND_EXCITED, 0) => (Self::Low, 2),
            (EXCITED_GROUND, m) => (Self::Main(m - 1), 1),
            (GROUND_EXCITED, m) => (Self::Main(m - 1), 2),
            (GROUND_GROUND, 0) => (Self::Ground, 0),
            (GROUND_GROUND, 1) => (Self::Low, 0),
            (GROUND_GROUND, m) => (Self::Main(m - 2), 0),
            _ => panic!("atomic index {atomic} out of range"),
        }
    }
}

/// Interaction part of the Hamiltonian restricted to `sector`, in units of `g`.
pub fn sector_hamiltonian(sector: ExcitationSector, alpha: f64) -> DMatrix<f64> {
    let off_diagonal: Vec<f64> = match sector {
        ExcitationSector::Ground => Vec::new(),
        ExcitationSector::Low => vec![1.0, alpha],
        ExcitationSector::Main(n) => {
            let n = n as f64;
            vec![(n + 2.0).sqrt(), alpha, (n + 1.0).sqrt()]
        }
    };
    let dim = sector.dimension();
    let mut h = DMatrix::zeros(dim, dim);
    for (i, &v) in off_diagonal.iter().enumerate() {
        h[(i, i + 1)] = v;
        h[(i + 1, i)] = v;
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorEigensystem {
    pub sector: ExcitationSector,
    /// Interaction eigenvalues in units of `g`, descending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, first nonzero entry positive.
    pub eigenvectors: DMatrix<f64>,
}

impl SectorEigensystem {
    pub fn for_sector(sector: ExcitationSector, alpha: f64) -> Self {
        sector_eigensystem(sector, &sector_hamiltonian(sector, alpha))
    }

    /// Coefficients `<k|j>` of basis vector `j` on eigenvector `k`; the
    /// transpose of the eigenvector matrix since everything is real.
    pub fn dual(&self) -> DMatrix<f64> {
        self.eigenvectors.transpose()
    }

    /// `max |V^T V - I|`
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let id = DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
        (gram - id).amax()
    }
}

/// Diagonalize a real symmetric sector matrix.
pub fn sector_eigensystem(sector: ExcitationSector, hamiltonian: &DMatrix<f64>) -> SectorEigensystem {
    let eig = hamiltonian.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    fix_column_signs(&mut eigenvectors);
    SectorEigensystem {
        sector,
        eigenvalues,
        eigenvectors,
    }
}

fn fix_column_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let scale = col.amax();
        if let Some(&first) = col.iter().find(|v| v.abs() > 1e-12 * scale) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Which discriminant to use in the dressed frequencies `A_n`, `B_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discriminant {
    /// `V_n = 2 sqrt(4(n+1) alpha^2 + (alpha^2 + 1)^2)`, the value implied by
    /// the characteristic polynomial.
    #[default]
    Corrected,
    /// `V_n = 2 sqrt(4(n+1) alpha^2 + (alpha^2 + 1))`. Wrong for every
    /// `alpha > 0`; kept to demonstrate that the difference matters.
    Misprinted,
}

/// `W_n = 4n + 6 + 2 alpha^2`
pub fn dressed_w(n: usize, alpha: f64) -> f64 {
    4.0 * n as f64 + 6.0 + 2.0 * alpha * alpha
}

pub fn dressed_v(n: usize, alpha: f64, form: Discriminant) -> f64 {
    let a2 = alpha * alpha;
    let last = match form {
        Discriminant::Corrected => (a2 + 1.0) * (a2 + 1.0),
        Discriminant::Misprinted => a2 + 1.0,
    };
    2.0 * (4.0 * (n as f64 + 1.0) * a2 + last).sqrt()
}

/// Dressed frequencies `(A_n, B_n)` with `A_n >= B_n >= 0`.
pub fn dressed_frequencies(n: usize, alpha: f64, form: Discriminant) -> (f64, f64) {
    let w = dressed_w(n, alpha);
    let v = dressed_v(n, alpha, form);
    let a = (w + v).sqrt() / 2.0;
    // W^2 - V^2 = 16 (n+1)(n+2) for the corrected form; dividing avoids the
    // cancellation in sqrt(W - V) when alpha is large.
    let b = match form {
        Discriminant::Corrected => ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt() / a,
        Discriminant::Misprinted => (w - v).max(0.0).sqrt() / 2.0,
    };
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormBranch {
    /// Dressed-state expressions with `alpha > 0`.
    Dressed,
    /// `alpha == 0`: the dressed expressions divide by `alpha`, so the two
    /// uncoupled Jaynes-Cummings doublets are returned instead.
    DecoupledJaynesCummings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEigensystem {
    pub eigensystem: SectorEigensystem,
    pub branch: ClosedFormBranch,
}

/// Analytic eigensystem of `Main(n)`, normalized and ordered like
/// [`sector_eigensystem`].
pub fn closed_form_eigensystem(n: usize, alpha: f64, form: Discriminant) -> ClosedFormEigensystem {
    let sector = ExcitationSector::Main(n);
    let s1 = (n as f64 + 1.0).sqrt();
    let s2 = (n as f64 + 2.0).sqrt();

    if alpha == 0.0 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let eigenvalues = DVector::from_vec(vec![s2, s1, -s1, -s2]);
        #[rustfmt::skip]
        let eigenvectors = DMatrix::from_row_slice(4, 4, &[
            h,   0.0, 0.0,  h,
            h,   0.0, 0.0, -h,
            0.0, h,   h,    0.0,
            0.0, h,  -h,    0.0,
        ]);
        return ClosedFormEigensystem {
            eigensystem: SectorEigensystem {
                sector,
                eigenvalues,
                eigenvectors,
            },
            branch: ClosedFormBranch::DecoupledJaynesCummings,
        };
    }

    let (big, small) = dressed_frequencies(n, alpha, form);
    let a2 = alpha * alpha;
    let n2 = n as f64 + 2.0;
    let vector = |lambda: f64| {
        let l2 = lambda * lambda;
        let x = DVector::from_vec(vec![
            1.0,
            lambda / s2,
            (l2 - n2) / (s2 * alpha),
            lambda * (l2 - n2 - a2) / (s1 * s2 * alpha),
        ]);
        x.normalize()
    };
    let eigenvalues = [big, small, -small, -big];
    let columns: Vec<DVector<f64>> = eigenvalues.iter().map(|&l| vector(l)).collect();
    let mut eigenvectors = DMatrix::from_columns(&columns);
    fix_column_signs(&mut eigenvectors);
    ClosedFormEigensystem {
        eigensystem: SectorEigensystem {
            sector,
            eigenvalues: DVector::from_row_slice(&eigenvalues),
            eigenvectors,
        },
        branch: ClosedFormBranch::Dressed,
    }
}

/// Analytic eigensystem of the low sector: eigenvalues `Omega, 0, -Omega`
/// with `Omega = sqrt(1 + alpha^2)`.
pub fn low_closed_form_eigensystem(alpha: f64) -> SectorEigensystem {
    let omega = (1.0 + alpha * alpha).sqrt();
    let r = 1.0 / (std::f64::consts::SQRT_2 * omega);
    let dark_sign = if alpha > 0.0 { 1.0 } else { -1.0 };
    #[rustfmt::skip]
    let eigenvectors = DMatrix::from_row_slice(3, 3, &[
        r,          dark_sign * alpha / omega,  r,
        omega * r,  0.0,                       -omega * r,
        alpha * r, -dark_sign / omega,          alpha * r,
    ]);
    SectorEigensystem {
        sector: ExcitationSector::Low,
        eigenvalues: DVector::from_vec(vec![omega, 0.0, -omega]),
        eigenvectors,
    }
}

/// Evolution operator of one sector; column `j` holds the amplitudes at time
/// `t` of a state that started on basis vector `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorCoefficients {
    pub sector: ExcitationSector,
    pub matrix: DMatrix<C64>,
}

impl PropagatorCoefficients {
    /// `max |U^dag U - I|`
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(prod.nrows(), prod.ncols());
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `U(t) = sum_k exp(-i (offset + lambda_k) t) |v_k><v_k|`
pub fn sector_propagator(eigensystem: &SectorEigensystem, free_offset: f64, t: f64) -> PropagatorCoefficients {
    let vecs = &eigensystem.eigenvectors;
    let dim = vecs.nrows();
    let phases: Vec<C64> = eigensystem
        .eigenvalues
        .iter()
        .map(|&l| C64::from_polar(1.0, -(free_offset + l) * t))
        .collect();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        phases
            .iter()
            .enumerate()
            .map(|(k, &p)| p * (vecs[(i, k)] * vecs[(j, k)]))
            .sum()
    });
    PropagatorCoefficients {
        sector: eigensystem.sector,
        matrix,
    }
}
