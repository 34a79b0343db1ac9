//! Integer-order Bessel functions of the first kind for real arguments.
//!
//! Rows `J_0(x) ... J_N(x)` come from Miller's backward recurrence, started
//! well above both `N` and `|x|` and normalised with
//! `J_0 + 2 Σ_{k≥1} J_{2k} = 1`. Negative orders and arguments follow from
//! `J_{-n}(x) = (-1)^n J_n(x)` and `J_n(-x) = (-1)^n J_n(x)`.

use crate::error::{Error, Result};

/// Above this magnitude the recurrence is rescaled.
const RESCALE_THRESHOLD: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;

/// `J_0(x) ..= J_{n_max}(x)` for a single argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRow {
    x: f64,
    values: Vec<f64>,
}

impl BesselRow {
    pub fn argument(&self) -> f64 {
        self.x
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Non-negative orders `0..=n_max`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `J_n(x)` for `|n| <= n_max`, zero beyond the row.
    pub fn get(&self, n: i64) -> f64 {
        let m = n.unsigned_abs() as usize;
        match self.values.get(m) {
            Some(&v) if n < 0 && m % 2 == 1 => -v,
            Some(&v) => v,
            None => 0.0,
        }
    }

    /// `Σ_{n=-N}^{N} J_n(x)²`, which tends to one as `N` grows past `|x|`.
    pub fn normalization_sum(&self) -> f64 {
        let tail: f64 = self.values[1..].iter().map(|v| v * v).sum();
        self.values[0] * self.values[0] + 2.0 * tail
    }
}

/// `J_n(x)` for any integer order.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let n_max = m.max(min_row_len(x));
    let row = unchecked_row(n_max, x);
    row.get(n)
}

/// Batch evaluation of `J_0(x) ..= J_{n_max}(x)`.
///
/// Requires `n_max >= |x| + 8`; shorter rows would leave the normalisation
/// sum visibly truncated.
pub fn bessel_row(n_max: usize, x: f64) -> Result<BesselRow> {
    if !x.is_finite() || (n_max as f64) < x.abs() + 8.0 {
        return Err(Error::RecurrenceUnstable { n_max, x });
    }
    Ok(unchecked_row(n_max, x))
}

fn min_row_len(x: f64) -> usize {
    (x.abs() + 8.0).ceil() as usize
}

fn unchecked_row(n_max: usize, x: f64) -> BesselRow {
    if x == 0.0 {
        let mut values = vec![0.0; n_max + 1];
        values[0] = 1.0;
        return BesselRow { x, values };
    }
    let mut values = miller(n_max, x.abs());
    if x < 0.0 {
        for (n, v) in values.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    BesselRow { x, values }
}

/// Backward recurrence for `x > 0`.
fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let start = n_max + (10.0 + 1.5 * x).ceil() as usize;
    let mut values = vec![0.0; n_max + 1];

    let mut above = 0.0; // f_{k+1}
    let mut current = 1e-30; // f_k
    let mut even_sum = 0.0; // Σ f_{2j}, j >= 1
    let mut k = start;
    loop {
        if k <= n_max {
            values[k] = current;
        }
        if k == 0 {
            break;
        }
        if k.is_multiple_of(2) {
            even_sum += current;
        }
        let below = (2.0 * k as f64 / x) * current - above;
        above = current;
        current = below;
        k -= 1;

        if current.abs() > RESCALE_THRESHOLD {
            current *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            even_sum *= RESCALE_FACTOR;
            let stored = (k + 1).min(values.len());
            for v in &mut values[stored..] {
                *v *= RESCALE_FACTOR;
            }
        }
    }

    let norm = values[0] + 2.0 * even_sum;
    for v in &mut values {
        *v /= norm;
    }
    values
}
