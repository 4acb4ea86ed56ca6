//! Exact diagonalization of the spin-1/2 triangle with Heisenberg exchange and
//! Dzyaloshinskii–Moriya (DM) coupling.
//!
//! Basis states are `|s1 s2 s3>` with site 1 as the most significant bit and
//! `up = 0`, `down = 1`, so index 4 is `|down up up>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DIM: usize = 8;

/// Relative tolerance (in units of the largest coupling) used to group levels
/// into degenerate multiplets.
pub const DEGENERACY_TOL: f64 = 1e-9;

const ONE_DOWN_STATES: [usize; 3] = [0b100, 0b010, 0b001];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MicroscopicError {
    #[error("non-finite coupling in trimer parameters")]
    NonFinite,
    #[error("chirality projection of H0 is not diagonal (|off-diagonal| = {0:e})")]
    NotDiagonal(f64),
}

/// Couplings of the three bonds (1,2), (2,3), (3,1).
#[derive(Debug, Clone, PartialEq)]
pub struct TrimerParams {
    pub exchange: [f64; 3],
    pub dm_vectors: [[f64; 3]; 3],
}

impl TrimerParams {
    /// Equal exchange `j` on every bond and DM vector `(0, 0, d)`.
    pub fn isotropic(j: f64, d: f64) -> Self {
        Self {
            exchange: [j; 3],
            dm_vectors: [[0.0, 0.0, d]; 3],
        }
    }

    /// Isotropic trimer with exchange `j` and `D/J = ratio`.
    pub fn from_ratio(j: f64, ratio: f64) -> Self {
        Self::isotropic(j, ratio * j)
    }

    /// `D_z / J` of the first bond; the figure parameter for isotropic trimers.
    pub fn d_over_j(&self) -> f64 {
        self.dm_vectors[0][2] / self.exchange[0]
    }

    fn energy_scale(&self) -> f64 {
        let j = self.exchange.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d = self
            .dm_vectors
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        j.max(d)
    }

    fn validate(&self) -> Result<(), MicroscopicError> {
        let finite = self.exchange.iter().all(|v| v.is_finite())
            && self.dm_vectors.iter().flatten().all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(MicroscopicError::NonFinite)
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-site spin-1/2 operators `[s^x, s^y, s^z]`.
fn site_ops() -> [CMatrix; 3] {
    let sx = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
    let sy = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]);
    let sz = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
    [sx, sy, sz]
}

/// Spin operator `s_site^axis` on the 8-dimensional product space.
pub fn spin(site: usize, axis: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let op = site_ops()[axis].clone();
    let factors: Vec<&CMatrix> = (0..3).map(|k| if k == site { &op } else { &id }).collect();
    factors[0].kronecker(factors[1]).kronecker(factors[2])
}

fn spins() -> [[CMatrix; 3]; 3] {
    std::array::from_fn(|site| std::array::from_fn(|axis| spin(site, axis)))
}

fn dot(a: &[CMatrix; 3], b: &[CMatrix; 3]) -> CMatrix {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn cross(a: &[CMatrix; 3], b: &[CMatrix; 3]) -> [CMatrix; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn total_sz() -> CMatrix {
    spin(0, 2) + spin(1, 2) + spin(2, 2)
}

pub fn total_spin_squared() -> CMatrix {
    let s = spins();
    let total: [CMatrix; 3] = std::array::from_fn(|a| &s[0][a] + &s[1][a] + &s[2][a]);
    dot(&total, &total)
}

/// `H0 = sum_i J_{i,i+1} s_i . s_{i+1} + sum_i D_{i,i+1} . (s_i x s_{i+1})`.
pub fn build_trimer_hamiltonian(params: &TrimerParams) -> CMatrix {
    let s = spins();
    let mut h = CMatrix::zeros(DIM, DIM);
    for bond in 0..3 {
        let (i, j) = (bond, (bond + 1) % 3);
        h += dot(&s[i], &s[j]) * c(params.exchange[bond], 0.0);
        let x = cross(&s[i], &s[j]);
        for (axis, comp) in x.iter().enumerate() {
            h += comp * c(params.dm_vectors[bond][axis], 0.0);
        }
    }
    h
}

/// `C_z = (4 / sqrt 3) s1 . (s2 x s3)`.
pub fn chirality_operator_z() -> CMatrix {
    let s = spins();
    dot(&s[0], &cross(&s[1], &s[2])) * c(4.0 / 3f64.sqrt(), 0.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Spectrum of `H0` with the ground multiplet identified.
#[derive(Debug, Clone)]
pub struct TrimerSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
    pub ground_multiplet: [usize; 4],
    pub omega_so: f64,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted ascending.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

pub fn diagonalize(params: &TrimerParams) -> Result<TrimerSpectrum, MicroscopicError> {
    let effective = derive_effective(params)?;
    let h = build_trimer_hamiltonian(params);
    let (eigenvalues, eigenvectors) = hermitian_eigen(&h);
    Ok(TrimerSpectrum {
        eigenvalues,
        eigenvectors,
        ground_multiplet: [0, 1, 2, 3],
        omega_so: effective.omega_so,
    })
}

/// Groups sorted eigenvalues into multiplets; returns the multiplicities.
pub fn multiplicities(eigenvalues: &[f64], scale: f64) -> Vec<usize> {
    let tol = DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=eigenvalues.len() {
        if k == eigenvalues.len() || (eigenvalues[k] - eigenvalues[start]).abs() > tol {
            out.push(k - start);
            start = k;
        }
    }
    out
}

/// Result of projecting `H0` onto the `S_z = +1/2` chirality doublet.
#[derive(Debug, Clone)]
pub struct EffectiveSplitting {
    /// Signed splitting `E(chi+) - E(chi-)`.
    pub omega_so: f64,
    /// Mean energy of the doublet (dropped from the effective Hamiltonian).
    pub offset: f64,
    /// `|chi+, 1/2>` and `|chi-, 1/2>`.
    pub chiral_basis: [CVector; 2],
    /// Set when the two chirality levels coincide within the degeneracy tolerance.
    pub degenerate: bool,
    /// Largest off-diagonal element of the projected Hamiltonian.
    pub off_diagonal: f64,
}

/// Chirality eigenstates `|chi+-, S_z = +1/2>`, with the `|down up up>`
/// amplitude real and positive.
pub fn chirality_basis() -> [CVector; 2] {
    let cz = chirality_operator_z();
    let block = DMatrix::from_fn(3, 3, |a, b| cz[(ONE_DOWN_STATES[a], ONE_DOWN_STATES[b])]);
    let (values, vectors) = hermitian_eigen(&block);
    // Eigenvalues -1, 0, +1 ascending.
    debug_assert!((values[0] + 1.0).abs() < 1e-12 && (values[2] - 1.0).abs() < 1e-12);
    let embed = |col: usize| {
        let v = vectors.column(col);
        let phase = v[0] / v[0].norm();
        let mut out = CVector::zeros(DIM);
        for (k, &idx) in ONE_DOWN_STATES.iter().enumerate() {
            out[idx] = v[k] / phase;
        }
        out
    };
    [embed(2), embed(0)]
}

pub fn derive_effective(params: &TrimerParams) -> Result<EffectiveSplitting, MicroscopicError> {
    params.validate()?;
    let h = build_trimer_hamiltonian(params);
    let basis = chirality_basis();
    let proj = |a: &CVector, b: &CVector| (a.adjoint() * &h * b)[(0, 0)];
    let h_pp = proj(&basis[0], &basis[0]).re;
    let h_mm = proj(&basis[1], &basis[1]).re;
    let off_diagonal = proj(&basis[0], &basis[1]).norm();
    if off_diagonal > 1e-10 * params.energy_scale().max(1.0) {
        return Err(MicroscopicError::NotDiagonal(off_diagonal));
    }
    let omega_so = h_pp - h_mm;
    let degenerate = omega_so.abs() <= DEGENERACY_TOL * params.energy_scale();
    Ok(EffectiveSplitting {
        omega_so: if degenerate { 0.0 } else { omega_so },
        offset: 0.5 * (h_pp + h_mm),
        chiral_basis: basis,
        degenerate,
        off_diagonal,
    })
}
