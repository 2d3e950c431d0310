//! Log-space dynamic programming for point-to-point and point-to-line
//! partition functions.

use crate::error::{Error, Result};
use crate::lattice::{logsumexp, logsumexp2, EnvironmentGrid};
use crate::scalar::Real;

/// lz[i][j] = log Z_{(0,0),(i,j)}, with the origin weight excluded unless
/// `square` is set (then every weight of the rectangle is included).
#[derive(Debug, Clone, PartialEq)]
pub struct LogZField<T> {
    m: usize,
    n: usize,
    lz: Vec<T>,
    square: bool,
}

impl<T: Real> LogZField<T> {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.lz[i * (self.n + 1) + j]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_square(&self) -> bool {
        self.square
    }

    /// log Z at (m, n).
    pub fn corner(&self) -> T {
        self.get(self.m, self.n)
    }

    pub fn values(&self) -> &[T] {
        &self.lz
    }
}

/// Full table of log Z_{(0,0),(i,j)} (origin weight excluded).
pub fn dp_log_z<T: Real>(env: &EnvironmentGrid<T>) -> LogZField<T> {
    let (m, n) = (env.m(), env.n());
    let cols = n + 1;
    let mut lz = vec![T::zero(); (m + 1) * cols];
    for j in 1..=n {
        lz[j] = lz[j - 1] + env.logw(0, j);
    }
    for i in 1..=m {
        let row = i * cols;
        lz[row] = lz[row - cols] + env.logw(i, 0);
        for j in 1..=n {
            lz[row + j] = env.logw(i, j) + logsumexp2(lz[row - cols + j], lz[row + j - 1]);
        }
    }
    LogZField { m, n, lz, square: false }
}

/// Z^□ convention: lz^□ = logw[0][0] + lz.
pub fn dp_log_z_square<T: Real>(env: &EnvironmentGrid<T>) -> LogZField<T> {
    let mut field = dp_log_z(env);
    let w0 = env.logw(0, 0);
    for v in field.lz.iter_mut() {
        *v = *v + w0;
    }
    field.square = true;
    field
}

/// log Z_{(0,0),(m,n)} keeping a single row in memory.
pub fn dp_log_z_corner<T: Real>(env: &EnvironmentGrid<T>) -> T {
    let n = env.n();
    let mut row = vec![T::zero(); n + 1];
    for j in 1..=n {
        row[j] = row[j - 1] + env.logw(0, j);
    }
    for i in 1..=env.m() {
        row[0] = row[0] + env.logw(i, 0);
        for j in 1..=n {
            row[j] = env.logw(i, j) + logsumexp2(row[j], row[j - 1]);
        }
    }
    row[n]
}

/// log of the point-to-line partition function Σ_{|u|₁ = level} Z_{0,u}.
pub fn log_z_line<T: Real>(env: &EnvironmentGrid<T>, level: usize) -> Result<T> {
    if level > env.m() || level > env.n() {
        return Err(Error::usage(format!(
            "a {}x{} environment does not cover the line |u| = {level}",
            env.m(),
            env.n()
        )));
    }
    // row[j] holds lz[i][j] for the current i, restricted to i + j <= level
    let mut row = vec![T::zero(); level + 1];
    for j in 1..=level {
        row[j] = row[j - 1] + env.logw(0, j);
    }
    let mut ends = Vec::with_capacity(level + 1);
    ends.push(row[level]);
    for i in 1..=level {
        row[0] = row[0] + env.logw(i, 0);
        for j in 1..=level - i {
            row[j] = env.logw(i, j) + logsumexp2(row[j], row[j - 1]);
        }
        ends.push(row[level - i]);
    }
    Ok(logsumexp(&ends))
}

/// Endpoint u of a d-dimensional directed path from the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPathSpec {
    u: Vec<usize>,
}

impl DPathSpec {
    pub const MAX_DIM: usize = 4;
    pub const MAX_POINTS: usize = 10_000_000;

    pub fn new(u: Vec<usize>) -> Result<Self> {
        let d = u.len();
        if !(2..=Self::MAX_DIM).contains(&d) {
            return Err(Error::usage(format!("dimension must be in 2..=4, got {d}")));
        }
        let mut points = 1usize;
        for &k in &u {
            points = points
                .checked_mul(k + 1)
                .filter(|&p| p <= Self::MAX_POINTS)
                .ok_or_else(|| Error::usage(format!("lattice {u:?} exceeds {} points", Self::MAX_POINTS)))?;
        }
        Ok(DPathSpec { u })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn endpoint(&self) -> &[usize] {
        &self.u
    }

    /// Number of lattice points of the box [0, u].
    pub fn points(&self) -> usize {
        self.u.iter().map(|k| k + 1).product()
    }

    /// Row-major strides of the box.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.u.len()];
        for k in (0..self.u.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (self.u[k + 1] + 1);
        }
        strides
    }
}

/// log Z_{0,u} over paths with unit steps +e_k, origin weight excluded.
/// `logw` is the flat row-major array over the box [0, u].
pub fn dp_log_z_ddim<T: Real>(spec: &DPathSpec, logw: &[T]) -> Result<T> {
    let total = spec.points();
    if logw.len() != total {
        return Err(Error::usage(format!("expected {total} weights, got {}", logw.len())));
    }
    let d = spec.dim();
    let strides = spec.strides();
    let mut lz = vec![T::zero(); total];
    let mut idx = vec![0usize; d];
    let mut preds = [T::zero(); DPathSpec::MAX_DIM];
    for flat in 1..total {
        // advance the multi-index in row-major order
        let mut k = d - 1;
        loop {
            idx[k] += 1;
            if idx[k] <= spec.u[k] {
                break;
            }
            idx[k] = 0;
            k -= 1;
        }
        let mut count = 0;
        for k in 0..d {
            if idx[k] > 0 {
                preds[count] = lz[flat - strides[k]];
                count += 1;
            }
        }
        lz[flat] = logw[flat] + logsumexp(&preds[..count]);
    }
    Ok(lz[total - 1])
}
