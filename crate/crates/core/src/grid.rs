use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid on `[t0, t1]` with `steps` intervals (`steps + 1` nodes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::Config(format!("grid endpoints must be finite, got [{t0}, {t1}]")));
        }
        if t0 >= t1 {
            return Err(Error::Config(format!("grid requires t0 < t1, got [{t0}, {t1}]")));
        }
        if steps == 0 {
            return Err(Error::Config("grid requires at least one step".into()));
        }
        Ok(TimeGrid { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_nodes(&self) -> usize {
        self.steps + 1
    }

    /// Step size `(t1 - t0) / steps`.
    pub fn h(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// Node `t_j = t0 + j*h`; all callers use this form so stamps agree bitwise.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.steps);
        self.t0 + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.node(j)).collect()
    }

    /// Grid covering nodes `j0..=j1` of `self` with the same spacing.
    pub fn subgrid(&self, j0: usize, j1: usize) -> Result<TimeGrid> {
        if j0 >= j1 || j1 > self.steps {
            return Err(Error::Config(format!(
                "subgrid indices ({j0}, {j1}) out of order or past {} steps",
                self.steps
            )));
        }
        TimeGrid::new(self.node(j0), self.node(j1), j1 - j0)
    }

    /// Same span with `factor` times as many steps.
    pub fn refine(&self, factor: usize) -> Result<TimeGrid> {
        if factor == 0 {
            return Err(Error::Config("refinement factor must be positive".into()));
        }
        TimeGrid::new(self.t0, self.t1, self.steps * factor)
    }

    pub fn same_layout(&self, other: &TimeGrid) -> bool {
        self.steps == other.steps && self.t0 == other.t0 && self.t1 == other.t1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_uniform_and_increasing() {
        let g = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 11);
        assert_eq!(nodes[0], 0.0);
        let h = g.h();
        for w in nodes.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - w[0] - h).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(2.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn subgrid_keeps_spacing() {
        let g = TimeGrid::new(0.0, 2.0, 8).unwrap();
        let s = g.subgrid(2, 6).unwrap();
        assert_eq!(s.steps(), 4);
        assert!((s.h() - g.h()).abs() < 1e-15);
        assert_eq!(s.t0(), g.node(2));
        assert!(g.subgrid(6, 2).is_err());
        assert!(g.subgrid(0, 9).is_err());
    }

    #[test]
    fn refine_halves_the_step() {
        let g = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let r = g.refine(2).unwrap();
        assert_eq!(r.steps(), 200);
        assert!((r.h() - g.h() / 2.0).abs() < 1e-18);
    }
}
