//! Grid search over the filter centre and width against a fixed table.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QgfError, Result};
use crate::filter::{evaluate, gaussian_coefficients, FilterParams, DEFAULT_DENOMINATOR_FLOOR};
use crate::overlap::{OverlapProblem, OverlapTable, TableMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    mu_values: Vec<f64>,
    inv_sigma_sq_values: Vec<f64>,
}

impl ScanGrid {
    pub fn new(mu_values: Vec<f64>, inv_sigma_sq_values: Vec<f64>) -> Result<Self> {
        if mu_values.is_empty() || inv_sigma_sq_values.is_empty() {
            return Err(QgfError::invalid("scan grid axes must be non-empty"));
        }
        if mu_values.iter().any(|m| !m.is_finite()) {
            return Err(QgfError::invalid("mu values must be finite"));
        }
        if inv_sigma_sq_values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(QgfError::invalid("1/sigma^2 values must be positive"));
        }
        Ok(Self { mu_values, inv_sigma_sq_values })
    }

    /// Axes sampled from `from` to `to` (either order) with spacing `step`,
    /// both ends included.
    pub fn from_ranges(mu: (f64, f64, f64), inv_sigma_sq: (f64, f64, f64)) -> Result<Self> {
        Self::new(axis(mu)?, axis(inv_sigma_sq)?)
    }

    pub fn mu_values(&self) -> &[f64] {
        &self.mu_values
    }

    pub fn inv_sigma_sq_values(&self) -> &[f64] {
        &self.inv_sigma_sq_values
    }

    pub fn len(&self) -> usize {
        self.mu_values.len() * self.inv_sigma_sq_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    // Row-major: μ outer, 1/σ² inner.
    fn point(&self, i: usize) -> (f64, f64) {
        let w = self.inv_sigma_sq_values.len();
        (self.mu_values[i / w], self.inv_sigma_sq_values[i % w])
    }
}

/// Evenly spaced values from `from` towards `to`; `to` itself is included
/// when it lies on the lattice (to within rounding).
pub fn axis((from, to, step): (f64, f64, f64)) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(QgfError::invalid("axis bounds must be finite"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(QgfError::invalid("axis step must be positive"));
    }
    let span = to - from;
    let count = (span.abs() / step + 1e-9).floor() as usize;
    let dir = if span < 0.0 { -1.0 } else { 1.0 };
    Ok((0..=count).map(|i| from + dir * step * i as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointStatus {
    Ok,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub mu: f64,
    pub inv_sigma_sq: f64,
    /// NaN when the point is degenerate.
    pub energy: f64,
    #[serde(rename = "denom_magnitude")]
    pub denominator_magnitude: f64,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub best: ScanPoint,
}

impl ScanResult {
    /// One row per grid point with a header line.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(p).map_err(|e| QgfError::Io(std::io::Error::other(e)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn point(&self, mu: f64, inv_sigma_sq: f64) -> Option<&ScanPoint> {
        self.points.iter().find(|p| p.mu == mu && p.inv_sigma_sq == inv_sigma_sq)
    }
}

/// Evaluates the filtered energy at every grid point, using the table's
/// full cutoff. Degenerate points are kept in the output but never chosen
/// as best; among equal energies the first in grid order wins.
pub fn grid_scan(t: &OverlapTable, grid: &ScanGrid) -> Result<ScanResult> {
    let points: Vec<ScanPoint> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (mu, inv) = grid.point(i);
            let params = FilterParams::new(mu, inv, t.delta_y, t.m_y)?;
            let c = gaussian_coefficients(&params)?;
            Ok(match evaluate(t, &c, DEFAULT_DENOMINATOR_FLOOR) {
                Ok(e) => ScanPoint {
                    mu,
                    inv_sigma_sq: inv,
                    energy: e.value,
                    denominator_magnitude: e.denominator.norm(),
                    status: PointStatus::Ok,
                },
                Err(QgfError::DegenerateDenominator { magnitude, .. }) => ScanPoint {
                    mu,
                    inv_sigma_sq: inv,
                    energy: f64::NAN,
                    denominator_magnitude: magnitude,
                    status: PointStatus::Degenerate,
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut best: Option<ScanPoint> = None;
    for p in &points {
        if p.status == PointStatus::Ok && !p.energy.is_nan() && best.is_none_or(|b| p.energy < b.energy) {
            best = Some(*p);
        }
    }
    let best = best.ok_or(QgfError::AllDegenerate)?;
    Ok(ScanResult { points, best })
}

/// Best scan result at one cutoff of an iterative run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub m_y: usize,
    pub phi_m: f64,
    pub mu: f64,
    pub inv_sigma_sq: f64,
    pub energy: f64,
}

/// Scans at each cutoff of `schedule`, extending one table between stages.
/// Returns the per-stage records and the final table.
pub fn iterative_deepen(
    problem: &OverlapProblem,
    delta_y: f64,
    schedule: &[usize],
    grid: &ScanGrid,
    mode: &TableMode,
) -> Result<(Vec<StageRecord>, OverlapTable)> {
    iterative_deepen_with(problem, delta_y, schedule, grid, mode, |_, _, _| Ok(()))
}

/// As [`iterative_deepen`], calling `on_stage` with every stage's table and
/// scan before moving on.
pub fn iterative_deepen_with<F>(
    problem: &OverlapProblem,
    delta_y: f64,
    schedule: &[usize],
    grid: &ScanGrid,
    mode: &TableMode,
    mut on_stage: F,
) -> Result<(Vec<StageRecord>, OverlapTable)>
where
    F: FnMut(usize, &OverlapTable, &ScanResult) -> Result<()>,
{
    let first = *schedule.first().ok_or_else(|| QgfError::invalid("empty cutoff schedule"))?;
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QgfError::invalid("cutoff schedule must be strictly increasing"));
    }
    let mut table = problem.compute(delta_y, first, mode)?;
    let mut records = Vec::with_capacity(schedule.len());
    for (i, &m) in schedule.iter().enumerate() {
        table = problem.extend(&table, m)?;
        let scan = grid_scan(&table, grid)?;
        on_stage(i, &table, &scan)?;
        records.push(StageRecord {
            m_y: m,
            phi_m: m as f64 * delta_y,
            mu: scan.best.mu,
            inv_sigma_sq: scan.best.inv_sigma_sq,
            energy: scan.best.energy,
        });
    }
    Ok((records, table))
}
