//! Dense complex/real matrix helpers shared across the crate.
//!
//! Everything here targets desk scale (n <= 16, realified 2n <= 32), so the
//! nalgebra dense kernels are used directly; no sparse or blocked paths.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Relative singular-value floor: a matrix counts as numerically singular
/// when `smin <= RCOND_FLOOR * smax`, i.e. the condition number exceeds 1e10.
pub const RCOND_FLOOR: f64 = 1e-10;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Entrywise max modulus, `max_ij |m_ij|`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_rvec(v: &RVector) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// `max_ij |m - m^dagger|`; zero iff the matrix is Hermitian.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `max_ij |m^dagger m - I|`; zero iff the matrix is unitary.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - identity(n)))
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn all_finite_real(m: &RMatrix) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn all_finite_rvec(v: &RVector) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Smallest and largest singular values.
pub fn singular_value_extremes(m: &CMatrix) -> (f64, f64) {
    let sv = m.singular_values();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for s in sv.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    (lo, hi)
}

/// Ratio `smin/smax` in [0,1]; 0 for the zero matrix.
pub fn rcond(m: &CMatrix) -> f64 {
    let (lo, hi) = singular_value_extremes(m);
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

pub fn is_nonsingular(m: &CMatrix) -> bool {
    rcond(m) > RCOND_FLOOR
}

/// Inverse guarded by the singular-value ratio threshold.
pub fn try_inverse(m: &CMatrix, context: &str) -> Result<CMatrix> {
    let rc = rcond(m);
    if rc <= RCOND_FLOOR {
        return Err(Error::Singular {
            context: context.to_string(),
            rcond: rc,
        });
    }
    m.clone().try_inverse().ok_or_else(|| Error::Singular {
        context: context.to_string(),
        rcond: rc,
    })
}

pub fn try_inverse_real(m: &RMatrix, context: &str) -> Result<RMatrix> {
    let c = complexify(m);
    let rc = rcond(&c);
    if rc <= RCOND_FLOOR {
        return Err(Error::Singular {
            context: context.to_string(),
            rcond: rc,
        });
    }
    m.clone().try_inverse().ok_or_else(|| Error::Singular {
        context: context.to_string(),
        rcond: rc,
    })
}

/// Matrix exponential via nalgebra's scaling-and-squaring Pade approximant.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Assembles `re + i*im` entrywise.
pub fn from_parts(re: &RMatrix, im: &RMatrix) -> CMatrix {
    assert_eq!(re.shape(), im.shape());
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}
