//! Fixed-step classical RK4 on uniform grids.
//!
//! One driver serves every integration in the crate (complex states, complex
//! matrix ODEs, realified first-order systems, and the second-order companion
//! form), which keeps the trajectories reproducible and lets the circuit and
//! the decoupled realified paths share bit-identical arithmetic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{RMatrix, RVector};

pub trait OdeState: Clone {
    /// `self += c * other`.
    fn scaled_add(&mut self, c: f64, other: &Self);
    fn is_finite(&self) -> bool;
}

impl OdeState for DVector<Complex64> {
    fn scaled_add(&mut self, c: f64, other: &Self) {
        self.axpy(Complex64::new(c, 0.0), other, Complex64::new(1.0, 0.0));
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for DMatrix<Complex64> {
    fn scaled_add(&mut self, c: f64, other: &Self) {
        *self += other * Complex64::new(c, 0.0);
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for DVector<f64> {
    fn scaled_add(&mut self, c: f64, other: &Self) {
        self.axpy(c, other, 1.0);
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

/// Integrates `y' = rhs(t, y)` across the grid, returning the state at every
/// node (`steps + 1` entries, starting with `y0`).
pub fn rk4_path<S, F>(y0: S, grid: &TimeGrid, context: &str, rhs: F) -> Result<Vec<S>>
where
    S: OdeState,
    F: Fn(f64, &S) -> Result<S>,
{
    let h = grid.h();
    let mut out = Vec::with_capacity(grid.num_nodes());
    if !y0.is_finite() {
        return Err(Error::NonFinite(context.to_string()));
    }
    out.push(y0.clone());
    let mut y = y0;
    for j in 0..grid.steps() {
        let t = grid.node(j);

        let k1 = rhs(t, &y)?;
        let mut y2 = y.clone();
        y2.scaled_add(0.5 * h, &k1);
        let k2 = rhs(t + 0.5 * h, &y2)?;
        let mut y3 = y.clone();
        y3.scaled_add(0.5 * h, &k2);
        let k3 = rhs(t + 0.5 * h, &y3)?;
        let mut y4 = y.clone();
        y4.scaled_add(h, &k3);
        let k4 = rhs(t + h, &y4)?;

        y.scaled_add(h / 6.0, &k1);
        y.scaled_add(h / 3.0, &k2);
        y.scaled_add(h / 3.0, &k3);
        y.scaled_add(h / 6.0, &k4);

        if !y.is_finite() {
            return Err(Error::NonFinite(context.to_string()));
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Integrates `x'' + A x' + B x = 0` on the companion first-order form with
/// state `(x, x')`. Both the decoupled realified evolution and the network
/// transient simulation call this exact function, so identical `(A, B, x0,
/// v0, grid)` inputs produce bit-identical trajectories.
pub fn rk4_second_order(
    a: &RMatrix,
    b: &RMatrix,
    x0: &RVector,
    v0: &RVector,
    grid: &TimeGrid,
    context: &str,
) -> Result<Vec<(RVector, RVector)>> {
    let n = x0.len();
    if a.nrows() != n || a.ncols() != n || b.nrows() != n || b.ncols() != n || v0.len() != n {
        return Err(Error::Dimension(format!(
            "second-order system wants square {n}x{n} coefficients and length-{n} initial data"
        )));
    }
    let mut y0 = RVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(x0);
    y0.rows_mut(n, n).copy_from(v0);

    let path = rk4_path(y0, grid, context, |_t, y: &RVector| {
        let x = y.rows(0, n);
        let v = y.rows(n, n);
        let mut dy = RVector::zeros(2 * n);
        dy.rows_mut(0, n).copy_from(&v);
        dy.rows_mut(n, n).copy_from(&(-(a * v) - b * x));
        Ok(dy)
    })?;

    Ok(path
        .into_iter()
        .map(|y| (y.rows(0, n).into_owned(), y.rows(n, n).into_owned()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_rvec;

    #[test]
    fn scalar_decay_matches_closed_form() {
        let grid = TimeGrid::new(0.0, 2.0, 200).unwrap();
        let path = rk4_path(
            RVector::from_vec(vec![1.0]),
            &grid,
            "decay",
            |_t, y: &RVector| Ok(-y),
        )
        .unwrap();
        for (j, y) in path.iter().enumerate() {
            let want = (-grid.node(j)).exp();
            assert!((y[0] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn fourth_order_convergence_on_oscillator() {
        // x'' + x = 0, x(0)=1 -> x = cos t; halving h shrinks error ~16x.
        let a = RMatrix::zeros(1, 1);
        let b = RMatrix::identity(1, 1);
        let x0 = RVector::from_vec(vec![1.0]);
        let v0 = RVector::zeros(1);
        let err = |steps: usize| {
            let grid = TimeGrid::new(0.0, 6.0, steps).unwrap();
            let path = rk4_second_order(&a, &b, &x0, &v0, &grid, "osc").unwrap();
            path.iter()
                .enumerate()
                .map(|(j, (x, _))| (x[0] - grid.node(j).cos()).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(100);
        let e2 = err(200);
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn critical_damping_closed_form() {
        // x'' + 2x' + x = 0, x(0)=1, x'(0)=0 -> x = (1+t) e^{-t}.
        let a = RMatrix::identity(1, 1) * 2.0;
        let b = RMatrix::identity(1, 1);
        let grid = TimeGrid::new(0.0, 5.0, 1000).unwrap();
        let path = rk4_second_order(
            &a,
            &b,
            &RVector::from_vec(vec![1.0]),
            &RVector::zeros(1),
            &grid,
            "damped",
        )
        .unwrap();
        for (j, (x, _)) in path.iter().enumerate() {
            let t = grid.node(j);
            assert!((x[0] - (1.0 + t) * (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn divergence_is_reported_not_propagated() {
        // y' = y^2 from y(0)=1 blows up at t=1; RK4 overflows into the error.
        let grid = TimeGrid::new(0.0, 2.0, 20).unwrap();
        let res = rk4_path(
            RVector::from_vec(vec![1.0]),
            &grid,
            "blowup",
            |_t, y: &RVector| Ok(RVector::from_vec(vec![y[0] * y[0]])),
        );
        assert!(matches!(res, Err(Error::NonFinite(_))));
    }

    #[test]
    fn zero_rhs_is_bit_exact() {
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let y0 = RVector::from_vec(vec![0.1, -0.7]);
        let path = rk4_path(y0.clone(), &grid, "frozen", |_t, _y: &RVector| {
            Ok(RVector::zeros(2))
        })
        .unwrap();
        for y in &path {
            assert_eq!(max_abs_rvec(&(y - &y0)), 0.0);
        }
    }
}
