use super::SpectrumResult;
use crate::error::{Error, Result};

/// Minimum number of grid points a resolved peak must span at half maximum.
pub const MIN_POINTS_PER_PEAK: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    /// Minimum prominence, as a fraction of the global maximum.
    pub prominence: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions { prominence: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Full width at half of `height`. `None` when one side never drops to
    /// half maximum before meeting a taller feature or the grid edge.
    pub fwhm: Option<f64>,
    pub prominence: f64,
}

pub fn peak_analysis(spec: &SpectrumResult) -> Result<Vec<Peak>> {
    peak_analysis_with(&spec.grid, &spec.values, PeakOptions::default())
}

/// Local maxima with parabolic sub-grid refinement and linearly interpolated
/// half-maximum crossings.
pub fn peak_analysis_with(grid: &[f64], values: &[f64], opts: PeakOptions) -> Result<Vec<Peak>> {
    assert_eq!(grid.len(), values.len());
    let n = values.len();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if n < 3 || !(max > 0.0) {
        return Ok(Vec::new());
    }
    let threshold = opts.prominence * max;

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        // first sample of a plateau counts, the rest of it does not
        if !(values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            continue;
        }
        let prominence = prominence(values, i);
        if prominence < threshold {
            continue;
        }
        let (position, height) = refine(grid, values, i);
        let fwhm = half_width_crossings(grid, values, i, height).map(|(l, r)| r - l);
        if let Some(w) = fwhm {
            let step = 0.5 * (grid[i + 1] - grid[i - 1]);
            if w / step < MIN_POINTS_PER_PEAK {
                return Err(Error::Resolution {
                    position,
                    points: w / step,
                });
            }
        }
        peaks.push(Peak {
            position,
            height,
            fwhm,
            prominence,
        });
    }
    Ok(peaks)
}

fn prominence(values: &[f64], i: usize) -> f64 {
    let top = values[i];
    let mut left_min = top;
    for &v in values[..i].iter().rev() {
        if v > top {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = top;
    for &v in &values[i + 1..] {
        if v > top {
            break;
        }
        right_min = right_min.min(v);
    }
    top - left_min.max(right_min)
}

/// Vertex of the parabola through the sample and its two neighbours.
fn refine(grid: &[f64], values: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 {
        return (x1, y1);
    }
    // y = y1 + b (x − x1) + curvature (x − x1)²,  b from the divided differences
    let b = d01 + curvature * (x1 - x0);
    let shift = -b / (2.0 * curvature);
    let shift = shift.clamp(x0 - x1, x2 - x1);
    (x1 + shift, y1 + b * shift + curvature * shift * shift)
}

fn half_width_crossings(grid: &[f64], values: &[f64], i: usize, height: f64) -> Option<(f64, f64)> {
    let half = 0.5 * height;
    let cross = |a: usize, b: usize| {
        let t = (half - values[a]) / (values[b] - values[a]);
        grid[a] + t * (grid[b] - grid[a])
    };

    let mut left = None;
    for j in (0..i).rev() {
        if values[j] > height {
            break;
        }
        if values[j] < half {
            left = Some(cross(j, j + 1));
            break;
        }
    }
    let mut right = None;
    for j in i + 1..values.len() {
        if values[j] > height {
            break;
        }
        if values[j] < half {
            right = Some(cross(j - 1, j));
            break;
        }
    }
    Some((left?, right?))
}
