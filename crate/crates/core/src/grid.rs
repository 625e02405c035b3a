//! Sampled solution values on a rectilinear space-time grid.
//!
//! [`GridField`] is the common currency of the audits, the viscous solver
//! and the command-line tool. Values are stored row-major over
//! `(t, x_1, ..., x_n)` with the last space axis varying fastest.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::riemann::WaveSolution;

/// Where a field's values came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Sampled from a constructed [`WaveSolution`].
    Constructed,
    /// Produced by the viscous finite-difference solver.
    Viscous,
    /// Sampled from a closed-form solution.
    Oracle,
}

/// Dense values `u[t, x_1, ..., x_n]` on strictly increasing axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    t_axis: Vec<f64>,
    space_axes: Vec<Vec<f64>>,
    values: Vec<f64>,
    provenance: Provenance,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::AxesMismatch(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::AxesMismatch(format!("{name} axis has a non-finite entry")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::AxesMismatch(format!("{name} axis is not strictly increasing")));
    }
    Ok(())
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64) / ((count - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Trapezoid weights for a strictly increasing axis.
pub fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { axis[i] - axis[i - 1] };
            let right = if i + 1 == n { 0.0 } else { axis[i + 1] - axis[i] };
            0.5 * (left + right)
        })
        .collect()
}

impl GridField {
    /// Wraps existing values after validating axes and finiteness.
    pub fn new(t_axis: Vec<f64>, space_axes: Vec<Vec<f64>>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        check_axis("t", &t_axis)?;
        if space_axes.is_empty() {
            return Err(Error::AxesMismatch("at least one space axis is required".into()));
        }
        for (i, a) in space_axes.iter().enumerate() {
            check_axis(&format!("x{}", i + 1), a)?;
        }
        let expected = t_axis.len() * space_axes.iter().map(Vec::len).product::<usize>();
        if values.len() != expected {
            return Err(Error::AxesMismatch(format!(
                "expected {expected} values for the axes, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field value",
                at: pos as f64,
            });
        }
        Ok(Self {
            t_axis,
            space_axes,
            values,
            provenance,
        })
    }

    /// Samples `f(t, x)` on the axes. Rows (fixed `t`) are filled in
    /// parallel when the `parallel` feature is on.
    pub fn sample<F>(t_axis: Vec<f64>, space_axes: Vec<Vec<f64>>, provenance: Provenance, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Result<f64> + Sync,
    {
        Self::sample_by_time(t_axis, space_axes, provenance, |t| {
            let f = &f;
            Ok(move |x: &[f64]| f(t, x))
        })
    }

    /// Samples with a per-time setup step: `prepare(t)` returns the spatial
    /// evaluator for that time, so work shared by a time level is done once.
    pub fn sample_by_time<P, E>(
        t_axis: Vec<f64>,
        space_axes: Vec<Vec<f64>>,
        provenance: Provenance,
        prepare: P,
    ) -> Result<Self>
    where
        P: Fn(f64) -> Result<E>,
        E: Fn(&[f64]) -> Result<f64> + Sync,
    {
        check_axis("t", &t_axis)?;
        for (i, a) in space_axes.iter().enumerate() {
            check_axis(&format!("x{}", i + 1), a)?;
        }
        let per_t: usize = space_axes.iter().map(Vec::len).product();
        let mut values = vec![0.0; t_axis.len() * per_t];
        for (it, &t) in t_axis.iter().enumerate() {
            let eval = prepare(t)?;
            let row = &mut values[it * per_t..(it + 1) * per_t];
            fill_row(row, &space_axes, &eval)?;
        }
        Self::new(t_axis, space_axes, values, provenance)
    }

    /// Samples a constructed solution, computing each time slice once.
    pub fn from_solution(sol: &WaveSolution, t_axis: Vec<f64>, space_axes: Vec<Vec<f64>>) -> Result<Self> {
        if space_axes.len() != sol.problem().fluxes.dim() {
            return Err(Error::AxesMismatch(format!(
                "solution has dimension {}, grid has {} space axes",
                sol.problem().fluxes.dim(),
                space_axes.len()
            )));
        }
        Self::sample_by_time(t_axis, space_axes, Provenance::Constructed, |t| {
            let slice = sol.at(t)?.with_fan_table(65)?;
            Ok(move |x: &[f64]| slice.evaluate(x))
        })
    }

    /// Time axis.
    pub fn t_axis(&self) -> &[f64] {
        &self.t_axis
    }

    /// Space axes.
    pub fn space_axes(&self) -> &[Vec<f64>] {
        &self.space_axes
    }

    /// All values, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Provenance tag.
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Number of space dimensions.
    pub fn dim(&self) -> usize {
        self.space_axes.len()
    }

    /// Number of points in one time level.
    pub fn points_per_time(&self) -> usize {
        self.space_axes.iter().map(Vec::len).product()
    }

    /// Values of time level `it`.
    pub fn time_level(&self, it: usize) -> &[f64] {
        let m = self.points_per_time();
        &self.values[it * m..(it + 1) * m]
    }

    /// Value at time index `it` and space multi-index `idx`.
    pub fn value(&self, it: usize, idx: &[usize]) -> f64 {
        self.values[it * self.points_per_time() + self.flat_space_index(idx)]
    }

    /// Flat offset of a space multi-index within a time level.
    pub fn flat_space_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.space_axes[k].len() + i;
        }
        flat
    }

    /// Space multi-index of a flat offset.
    pub fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for k in (0..self.dim()).rev() {
            let len = self.space_axes[k].len();
            idx[k] = flat % len;
            flat /= len;
        }
    }

    /// Index of the time level equal to `t` up to a relative `1e-9`.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let scale = 1.0 + t.abs();
        self.t_axis
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * scale)
            .ok_or_else(|| Error::InvalidArgument(format!("time {t} is not on the field's time axis")))
    }

    /// Whether both fields share the same axes exactly.
    pub fn same_axes(&self, other: &GridField) -> bool {
        self.t_axis == other.t_axis && self.space_axes == other.space_axes
    }

    /// Smallest and largest value.
    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Largest spacing over all axes, time included.
    pub fn max_spacing(&self) -> f64 {
        core::iter::once(&self.t_axis)
            .chain(self.space_axes.iter())
            .flat_map(|a| a.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max)
    }
}

fn fill_row<E>(row: &mut [f64], axes: &[Vec<f64>], eval: &E) -> Result<()>
where
    E: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = axes.len();
    let last = axes[n - 1].len();
    let fill_line = |line: usize, out: &mut [f64]| -> Result<()> {
        let mut x = vec![0.0; n];
        let mut rest = line;
        for k in (0..n - 1).rev() {
            let len = axes[k].len();
            x[k] = axes[k][rest % len];
            rest /= len;
        }
        for (j, o) in out.iter_mut().enumerate() {
            x[n - 1] = axes[n - 1][j];
            *o = eval(&x)?;
        }
        Ok(())
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        row.par_chunks_mut(last)
            .enumerate()
            .try_for_each(|(line, out)| fill_line(line, out))
    }
    #[cfg(not(feature = "parallel"))]
    {
        row.chunks_mut(last)
            .enumerate()
            .try_for_each(|(line, out)| fill_line(line, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_orders_rows_with_last_axis_fastest() {
        let f = GridField::sample(
            vec![0.0, 1.0],
            vec![vec![0.0, 1.0, 2.0], vec![10.0, 20.0]],
            Provenance::Oracle,
            |t, x| Ok(100.0 * t + x[0] + x[1]),
        )
        .unwrap();
        assert_eq!(f.values().len(), 12);
        assert_eq!(f.value(0, &[1, 0]), 11.0);
        assert_eq!(f.value(1, &[2, 1]), 122.0);
        let mut idx = [0usize; 2];
        f.unflatten(f.flat_space_index(&[2, 1]), &mut idx);
        assert_eq!(idx, [2, 1]);
    }

    #[test]
    fn rejects_bad_axes_and_values() {
        assert!(GridField::new(vec![0.0, 0.0], vec![vec![0.0]], vec![0.0, 0.0], Provenance::Oracle).is_err());
        assert!(GridField::new(vec![0.0], vec![vec![0.0, 1.0]], vec![0.0], Provenance::Oracle).is_err());
        assert!(GridField::new(vec![0.0], vec![vec![0.0]], vec![f64::NAN], Provenance::Oracle).is_err());
    }

    #[test]
    fn trapezoid_weights_integrate_linear_functions_exactly() {
        let axis = [0.0, 0.1, 0.5, 0.6, 2.0];
        let w = trapezoid_weights(&axis);
        let integral: f64 = axis.iter().zip(&w).map(|(x, w)| (3.0 * x + 1.0) * w).sum();
        assert!((integral - (1.5 * 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn linspace_hits_both_ends() {
        let a = linspace(-1.5, 1.5, 7);
        assert_eq!(a[0], -1.5);
        assert_eq!(a[6], 1.5);
        assert!((a[3]).abs() < 1e-15);
    }
}
