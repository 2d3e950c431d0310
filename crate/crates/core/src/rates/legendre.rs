use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solve::golden_max;

/// Numeric convex conjugate sup_x {ξx − f(x)} of a convex `f` sampled on
/// `grid` (sorted ascending).
///
/// The best grid point is refined by golden section on the two adjacent
/// grid cells, so `f` must be callable between grid points. Non-finite
/// samples are skipped.
pub fn legendre_transform<T, F>(f: F, grid: &[T], xi: T, opt_tol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if grid.is_empty() {
        return Err(Error::usage("legendre transform needs a non-empty grid"));
    }
    let mut best: Option<(usize, T)> = None;
    for (i, &x) in grid.iter().enumerate() {
        let fx = f(x);
        if !fx.is_finite() {
            continue;
        }
        let v = xi * x - fx;
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (idx, value) =
        best.ok_or_else(|| Error::usage("legendre transform: f is not finite anywhere on the grid"))?;
    if grid.len() == 1 {
        return Ok(value);
    }
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    let refined = golden_max(
        |x| {
            let fx = f(x);
            if fx.is_finite() {
                xi * x - fx
            } else {
                T::neg_infinity()
            }
        },
        lo,
        hi,
        opt_tol,
        max_iter,
    );
    Ok(value.max(refined.value))
}

/// `count` evenly spaced points covering [lo, hi].
pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::lit((count - 1) as f64);
            (0..count)
                .map(|k| if k + 1 == count { hi } else { lo + step * T::lit(k as f64) })
                .collect()
        }
    }
}
