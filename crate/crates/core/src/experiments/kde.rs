//! Branch detection on final diffusion depths.
//!
//! Depths are scaled to `[0, 1]` by the node count and smoothed with a
//! Gaussian kernel whose bandwidth follows Silverman's rule of thumb. The
//! estimate is evaluated on a fixed grid over `[0, 1]` and normalized there,
//! so kernel mass falling outside the unit interval is redistributed
//! proportionally.

use crate::error::{Error, Result};

pub const LOWER_BRANCH: f64 = 0.2;
pub const UPPER_BRANCH: f64 = 0.8;
/// Local maxima below this share of the global maximum are not modes.
pub const MODE_FLOOR: f64 = 0.05;
pub const GRID_POINTS: usize = 1001;
/// Smallest bandwidth, two grid spacings.
pub const MIN_BANDWIDTH: f64 = 2.0 / (GRID_POINTS - 1) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Depth as a fraction of the node count.
    pub location: f64,
    /// Probability mass of the mode's basin.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchStats {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
    /// Ordered by location.
    pub modes: Vec<Mode>,
    /// Share of samples with depth above `UPPER_BRANCH · n`.
    pub upper_fraction: f64,
    /// Share of samples with depth below `LOWER_BRANCH · n`.
    pub lower_fraction: f64,
}

impl BranchStats {
    /// Trapezoidal integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.density, 0, self.grid.len() - 1)
    }
}

pub fn branch_stats(final_depths: &[usize], n: usize) -> Result<BranchStats> {
    if final_depths.len() < 2 {
        return Err(Error::Usage(format!(
            "branch statistics need at least 2 samples, got {}",
            final_depths.len()
        )));
    }
    if n == 0 {
        return Err(Error::Usage("node count must be positive".into()));
    }
    let mut xs: Vec<f64> = final_depths.iter().map(|&d| d as f64 / n as f64).collect();
    // Sorting makes the kernel sum, and hence the modes, independent of input order.
    xs.sort_by(f64::total_cmp);
    let bandwidth = silverman_bandwidth(&xs).max(MIN_BANDWIDTH);

    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&g| {
            xs.iter()
                .map(|&x| (-0.5 * ((g - x) / bandwidth).powi(2)).exp())
                .sum::<f64>()
        })
        .collect();
    let total = trapezoid(&grid, &density, 0, GRID_POINTS - 1);
    density.iter_mut().for_each(|d| *d /= total);

    let modes = find_modes(&grid, &density);
    let count = xs.len() as f64;
    Ok(BranchStats {
        upper_fraction: xs.iter().filter(|&&x| x > UPPER_BRANCH).count() as f64 / count,
        lower_fraction: xs.iter().filter(|&&x| x < LOWER_BRANCH).count() as f64 / count,
        grid,
        density,
        bandwidth,
        modes,
    })
}

/// `0.9 · min(sd, IQR / 1.34) · N^(-1/5)`, falling back to whichever spread
/// measure is nonzero. `xs` must be sorted.
pub fn silverman_bandwidth(xs: &[f64]) -> f64 {
    let count = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / count;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt();
    let iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => 0.0,
    };
    0.9 * spread * count.powf(-0.2)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn trapezoid(grid: &[f64], y: &[f64], from: usize, to: usize) -> f64 {
    (from..to)
        .map(|i| 0.5 * (y[i] + y[i + 1]) * (grid[i + 1] - grid[i]))
        .sum()
}

fn find_modes(grid: &[f64], density: &[f64]) -> Vec<Mode> {
    let last = density.len() - 1;
    let peak = density.iter().cloned().fold(0.0, f64::max);
    let peaks: Vec<usize> = (0..=last)
        .filter(|&i| {
            let rises = i == 0 || density[i] > density[i - 1];
            let holds = i == last || density[i] >= density[i + 1];
            rises && holds && density[i] > MODE_FLOOR * peak
        })
        .collect();
    // Basins are split at the lowest point between neighboring modes.
    let mut bounds = vec![0];
    for w in peaks.windows(2) {
        let split = (w[0]..=w[1])
            .min_by(|&a, &b| density[a].total_cmp(&density[b]))
            .unwrap();
        bounds.push(split);
    }
    bounds.push(last);
    peaks
        .iter()
        .enumerate()
        .map(|(k, &i)| Mode {
            location: grid[i],
            mass: trapezoid(grid, density, bounds[k], bounds[k + 1]),
        })
        .collect()
}
