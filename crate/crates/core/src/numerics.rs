//! Dense complex linear algebra: Hermitian eigendecomposition by cyclic
//! Jacobi rotations, trace norm, matrix square roots, and the seeded random
//! source shared by every sampling routine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Largest tolerated `|A - A^dagger|` entry for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Negative eigenvalues above this are round-off and get clamped to zero.
pub const PSD_CLAMP_TOL: f64 = 1e-9;
/// Negative eigenvalues below this are a genuine non-PSD input.
pub const PSD_REJECT_TOL: f64 = 1e-6;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            for j in 0..n {
                let vjk = v[(j, k)].conj() * fl;
                for i in 0..n {
                    out[(i, j)] += v[(i, k)] * vjk;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Max-norm distance between two matrices of equal shape.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// `|v><v|`.
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// `<v| A |v>`, real part only; exact for Hermitian `A`.
pub fn expectation(a: &ComplexMatrix, v: &ComplexVector) -> f64 {
    let n = v.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += a[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// `Re Tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn check_hermitian(a: &ComplexMatrix) -> Result<usize> {
    let n = check_square(a)?;
    let deviation = hermitian_deviation(a);
    if !(deviation <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(n)
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Each rotation removes the phase of the pivot `a_pq` and then applies the
/// real symmetric Jacobi rotation, so the pivot is annihilated exactly.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = check_hermitian(a)?;
    let mut m = (a + a.adjoint()).scale(0.5);
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = identity(n);
    let threshold = JACOBI_OFF_TOL * m.norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let abs = g.norm();
                if abs == 0.0 {
                    continue;
                }
                let phase_conj = (g / abs).conj();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(s, 0.0);
                let j_qp = phase_conj * (-s);
                let j_qq = phase_conj * c;

                for r in 0..n {
                    let mrp = m[(r, p)];
                    let mrq = m[(r, q)];
                    m[(r, p)] = mrp * j_pp + mrq * j_qp;
                    m[(r, q)] = mrp * j_pq + mrq * j_qq;
                }
                for col in 0..n {
                    let mpc = m[(p, col)];
                    let mqc = m[(q, col)];
                    m[(p, col)] = j_pp.conj() * mpc + j_qp.conj() * mqc;
                    m[(q, col)] = j_pq.conj() * mpc + j_qq.conj() * mqc;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * j_pp + vrq * j_qp;
                    v[(r, q)] = vrp * j_pq + vrq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `Tr|A|`, the sum of absolute eigenvalues.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(a)?.eigenvalues.iter().map(|l| l.abs()).sum())
}

fn psd_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let eig = hermitian_eigen(a)?;
    let min = eig.min_eigenvalue();
    if min < -PSD_REJECT_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix; small negative eigenvalues are clamped.
pub fn matrix_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Inverse square root on the support of `a`; eigenvalues at or below
/// `rank_tolerance` map to zero.
pub fn pinv_sqrt(a: &ComplexMatrix, rank_tolerance: f64) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.map_eigenvalues(|l| if l > rank_tolerance { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Orthogonal projector onto the eigenvectors with eigenvalue above `rank_tolerance`.
pub fn support_projector(a: &ComplexMatrix, rank_tolerance: f64) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.map_eigenvalues(|l| if l > rank_tolerance { 1.0 } else { 0.0 }))
}

/// Seeded ChaCha8 stream. `substream(seed, i)` selects an independent ChaCha
/// stream under the same key, so per-trial draws do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self {
            seed,
            stream: index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Draws a fresh key for a family of substreams owned by a sub-computation.
    pub fn fork_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        let p = p.clamp(0.0, 1.0);
        Binomial::new(n, p)
            .expect("probability clamped to [0, 1]")
            .sample(&mut self.rng)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        self.rng.random_range(0..n)
    }

    /// Samples an index from a discrete distribution given by non-negative weights.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.uniform() * total;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.rng.random_range(0..=i);
            items.swap(i, j);
        }
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
