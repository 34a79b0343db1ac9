//! Peak bookkeeping on sampled real curves.

/// A local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub position: f64,
    pub height: f64,
    /// Height above the higher of the two surrounding minima.
    pub prominence: f64,
}

/// Strict local maxima (plateaus count once, at their left edge), with
/// topographic prominence.
pub fn local_maxima(x: &[f64], y: &[f64]) -> Vec<Peak> {
    assert_eq!(x.len(), y.len(), "local_maxima: length mismatch");
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        // Extent of the plateau starting at i.
        let mut j = i;
        while j + 1 < n && y[j + 1] == y[i] {
            j += 1;
        }
        let rises = i == 0 || y[i - 1] < y[i];
        let falls = j + 1 == n || y[j + 1] < y[i];
        if rises && falls && n > 1 && !(i == 0 && j + 1 == n) {
            peaks.push(Peak {
                index: i,
                position: x[i],
                height: y[i],
                prominence: prominence(y, i, j),
            });
        }
        i = j + 1;
    }
    peaks
}

fn prominence(y: &[f64], left: usize, right: usize) -> f64 {
    // A side with no samples does not constrain the base.
    let h = y[left];
    let lmin = y[..left]
        .iter()
        .rev()
        .take_while(|&&v| v <= h)
        .copied()
        .reduce(f64::min);
    let rmin = y[right + 1..].iter().take_while(|&&v| v <= h).copied().reduce(f64::min);
    let base = match (lmin, rmin) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => h,
    };
    h - base
}

/// Peaks whose prominence is at least `fraction` of the global maximum.
pub fn significant_peaks(x: &[f64], y: &[f64], fraction: f64) -> Vec<Peak> {
    let top = y.iter().copied().fold(0.0, f64::max);
    local_maxima(x, y)
        .into_iter()
        .filter(|p| p.prominence >= fraction * top)
        .collect()
}

/// Full width at half maximum of the peak at `index`, linearly
/// interpolated; `None` if the curve never drops to half height on a side.
pub fn fwhm(x: &[f64], y: &[f64], index: usize) -> Option<f64> {
    let half = 0.5 * y[index];
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let left = (0..index).rev().find(|&k| y[k] <= half).map(|k| cross(k, k + 1))?;
    let right = (index + 1..y.len()).find(|&k| y[k] <= half).map(|k| cross(k - 1, k))?;
    Some(right - left)
}

/// Index of the global maximum, first one on ties.
pub fn argmax(y: &[f64]) -> Option<usize> {
    (0..y.len()).reduce(|best, k| if y[k] > y[best] { k } else { best })
}
