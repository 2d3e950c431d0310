//! Scalar root finding and 1-d minimization on bounded intervals.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub residual: T,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub x: T,
    pub value: T,
    pub iterations: usize,
}

fn converged<T: Real>(lo: T, hi: T, x: T, xtol: T) -> bool {
    let scale = x.abs().max(T::min_positive_value());
    hi - lo <= (xtol * scale).max(T::lit(4.0) * T::epsilon() * scale)
}

/// Safeguarded Newton iteration on a sign-change bracket.
///
/// `f` returns the pair (value, derivative). The bracket `[lo, hi]` must
/// satisfy `f(lo) * f(hi) <= 0`; Newton steps that leave the current
/// bracket, or that are not at most half the previous step, are replaced by bisection. The
/// tolerance `xtol` is relative to the root.
pub fn newton_bisect<T, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == T::zero() {
        return Ok(Root { x: lo, residual: T::zero(), iterations: 0 });
    }
    if fhi == T::zero() {
        return Ok(Root { x: hi, residual: T::zero(), iterations: 0 });
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::numeric(
            format!("no sign change on [{lo}, {hi}]"),
            flo.abs().min(fhi.abs()).as_f64(),
            0,
        ));
    }
    // orient so that f(lo) < 0 < f(hi)
    let increasing = flo < T::zero();
    let two = T::lit(2.0);
    let mut x = lo + (hi - lo) / two;
    let mut step_before = hi - lo;
    let mut best = T::infinity();
    for iter in 1..=max_iter {
        let (fx, dfx) = f(x);
        best = best.min(fx.abs());
        if fx == T::zero() {
            return Ok(Root { x, residual: T::zero(), iterations: iter });
        }
        let below = (fx < T::zero()) == increasing;
        if below {
            lo = x;
        } else {
            hi = x;
        }
        if converged(lo, hi, x, xtol) {
            return Ok(Root { x, residual: fx.abs(), iterations: iter });
        }
        let newton = x - fx / dfx;
        let width = hi - lo;
        let use_newton = newton.is_finite()
            && newton > lo
            && newton < hi
            && (newton - x).abs() * two <= step_before.abs();
        let next = if use_newton { newton } else { lo + width / two };
        step_before = next - x;
        if next <= lo || next >= hi {
            // bracket exhausted at representable precision
            return Ok(Root { x, residual: fx.abs(), iterations: iter });
        }
        if use_newton && (next - x).abs() <= xtol * x.abs().max(T::min_positive_value()) {
            let (fnext, _) = f(next);
            return Ok(Root { x: next, residual: fnext.abs(), iterations: iter + 1 });
        }
        x = next;
    }
    Err(Error::numeric("newton/bisection did not converge", best.as_f64(), max_iter))
}

/// Plain bisection for functions without a cheap derivative.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    newton_bisect(|x| (f(x), T::nan()), lo, hi, xtol, max_iter)
}

/// Finds a point of `(lo, anchor)` close to `lo` where `pred` holds.
///
/// Starts at `lo + margin` (capped at half the interval) and moves toward
/// `lo` geometrically until `pred` holds or the offset is no longer
/// representable.
pub fn probe_toward_lower<T, P>(lo: T, anchor: T, margin: T, mut pred: P) -> Option<T>
where
    T: Real,
    P: FnMut(T) -> bool,
{
    let half = (anchor - lo) / T::lit(2.0);
    let mut offset = margin.min(half);
    let shrink = T::lit(1.0 / 16.0);
    loop {
        let x = lo + offset;
        if x <= lo || offset <= T::zero() {
            return None;
        }
        if pred(x) {
            return Some(x);
        }
        offset = offset * shrink;
    }
}

/// Mirror image of [`probe_toward_lower`] for the upper endpoint.
pub fn probe_toward_upper<T, P>(anchor: T, hi: T, margin: T, mut pred: P) -> Option<T>
where
    T: Real,
    P: FnMut(T) -> bool,
{
    let half = (hi - anchor) / T::lit(2.0);
    let mut offset = margin.min(half);
    let shrink = T::lit(1.0 / 16.0);
    loop {
        let x = hi - offset;
        if x >= hi || offset <= T::zero() {
            return None;
        }
        if pred(x) {
            return Some(x);
        }
        offset = offset * shrink;
    }
}

/// Golden-section minimization on `[lo, hi]`; the endpoints themselves are
/// also evaluated so that boundary minima of convex functions are found.
pub fn golden_min<T, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Extremum<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let flo = f(a);
    let fhi = f(b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    let tol = xtol * (T::one() + a.abs().max(b.abs()));
    while b - a > tol && iterations < max_iter {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    if flo < value {
        x = lo.min(hi);
        value = flo;
    }
    if fhi < value {
        x = lo.max(hi);
        value = fhi;
    }
    Extremum { x, value, iterations }
}

/// Golden-section maximization; see [`golden_min`].
pub fn golden_max<T, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Extremum<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let m = golden_min(|x| -f(x), lo, hi, xtol, max_iter);
    Extremum { x: m.x, value: -m.value, iterations: m.iterations }
}
