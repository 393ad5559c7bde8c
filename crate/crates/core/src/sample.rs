//! Seeded random draws used by the verification suites.
//!
//! All randomness in the crate flows through a ChaCha8 generator seeded from
//! an explicit u64, so identical seeds reproduce identical matrices on every
//! platform. Rejection loops are deterministic for a fixed seed.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, CMatrix, CVector, RMatrix, RVector};

/// Seed used when neither the CLI nor the scenario supplies one.
pub const DEFAULT_SEED: u64 = 20240917;

const REJECTION_CAP: usize = 1024;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..1.0)
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(uniform(rng), uniform(rng)))
}

/// Hermitian matrix with entries of order one: `(M + M^dagger) / 2`.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let m = random_matrix(n, rng);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian draw re-rolled until the real part is comfortably nonsingular,
/// as required by the decoupled realified form.
pub fn random_hermitian_nonsingular_real_part<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    for _ in 0..REJECTION_CAP {
        let h = random_hermitian(n, rng);
        let re = linalg::complexify(&linalg::real_part(&h));
        if linalg::rcond(&re) >= 1e-3 {
            return h;
        }
    }
    unreachable!("rejection cap hit drawing a Hermitian matrix with nonsingular real part");
}

pub fn random_real_symmetric<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    let m = RMatrix::from_fn(n, n, |_, _| uniform(rng));
    (&m + m.transpose()) * 0.5
}

/// Real-symmetric draw whose square has a strictly positive diagonal and a
/// nonsingular matrix, suitable for the default frequency-assignment policy.
pub fn random_real_symmetric_invertible<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    for _ in 0..REJECTION_CAP {
        let m = random_real_symmetric(n, rng);
        let c = linalg::complexify(&m);
        if linalg::rcond(&c) >= 1e-3 {
            return m;
        }
    }
    unreachable!("rejection cap hit drawing an invertible real-symmetric matrix");
}

/// Normalized random state.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| Complex64::new(uniform(rng), uniform(rng)));
        let norm = v.norm();
        if norm > 1e-3 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// Unitary matrix from the QR factorization of a random draw.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    for _ in 0..REJECTION_CAP {
        let m = random_matrix(n, rng);
        if linalg::rcond(&m) >= 1e-3 {
            return m.qr().q();
        }
    }
    unreachable!("rejection cap hit drawing a unitary matrix");
}

/// Well-conditioned (rcond >= 1e-2) but otherwise arbitrary invertible matrix.
pub fn random_well_conditioned<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    for _ in 0..REJECTION_CAP {
        let m = random_matrix(n, rng);
        if linalg::rcond(&m) >= 1e-2 {
            return m;
        }
    }
    unreachable!("rejection cap hit drawing a well-conditioned matrix");
}

/// Weighted-Laplacian-plus-positive-diagonal draw: off-diagonal entries are
/// nonpositive and every row sum is strictly positive. Systems built from
/// such matrices synthesize into netlists with no negative-element
/// diagnostics (positive branch and shunt values).
pub fn random_passive_stiffness<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    let mut m = RMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let w = rng.gen_range(0.0..1.0);
            m[(j, k)] = -w;
            m[(k, j)] = -w;
        }
    }
    for j in 0..n {
        let off: f64 = (0..n).filter(|k| *k != j).map(|k| m[(j, k)]).sum();
        m[(j, j)] = -off + rng.gen_range(0.1..1.1);
    }
    m
}

/// Like `random_passive_stiffness` but row sums may be exactly zero
/// (conductance-only coupling with no shunt at some ports).
pub fn random_passive_damping<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    let mut m = RMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let w = rng.gen_range(0.0..0.5);
            m[(j, k)] = -w;
            m[(k, j)] = -w;
        }
    }
    for j in 0..n {
        let off: f64 = (0..n).filter(|k| *k != j).map(|k| m[(j, k)]).sum();
        let shunt = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.5) } else { 0.0 };
        m[(j, j)] = -off + shunt;
    }
    m
}

/// Entrywise positive vector in `[0.5, 2)`, e.g. for capacitance draws.
pub fn positive_vector<R: Rng>(n: usize, rng: &mut R) -> RVector {
    RVector::from_fn(n, |_, _| rng.gen_range(0.5..2.0))
}
