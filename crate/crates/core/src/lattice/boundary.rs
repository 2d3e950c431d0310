//! Ratio variables and exit-point decomposition of the stationary model.

use crate::error::{Error, Result};
use crate::lattice::{logsumexp, logsumexp2, EnvironmentGrid, LogZField};
use crate::scalar::Real;

/// log U_{i,j} = lz[i][j] − lz[i−1][j] (i ≥ 1) and
/// log V_{i,j} = lz[i][j] − lz[i][j−1] (j ≥ 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BurkeRatios<T> {
    m: usize,
    n: usize,
    // m rows (i = 1..=m) of n+1 entries
    log_u: Vec<T>,
    // m+1 rows of n entries (j = 1..=n)
    log_v: Vec<T>,
}

impl<T: Real> BurkeRatios<T> {
    pub fn log_u(&self, i: usize, j: usize) -> T {
        assert!(i >= 1 && i <= self.m && j <= self.n, "U_{{{i},{j}}} out of range");
        self.log_u[(i - 1) * (self.n + 1) + j]
    }

    pub fn log_v(&self, i: usize, j: usize) -> T {
        assert!(j >= 1 && i <= self.m && j <= self.n, "V_{{{i},{j}}} out of range");
        self.log_v[i * self.n + (j - 1)]
    }

    /// log U_{i,n} for i = 1..=m: the top row.
    pub fn top_row_u(&self) -> Vec<T> {
        (1..=self.m).map(|i| self.log_u(i, self.n)).collect()
    }

    /// log V_{m,j} for j = 1..=n: the right column.
    pub fn right_column_v(&self) -> Vec<T> {
        (1..=self.n).map(|j| self.log_v(self.m, j)).collect()
    }
}

/// Ratio variables of a stationary environment from its full field.
pub fn burke_ratios<T: Real>(env: &EnvironmentGrid<T>, field: &LogZField<T>) -> Result<BurkeRatios<T>> {
    env.require_stationary("burke_ratios")?;
    let (m, n) = (env.m(), env.n());
    if field.m() != m || field.n() != n || field.is_square() {
        return Err(Error::usage("field does not belong to this environment"));
    }
    let mut log_u = Vec::with_capacity(m * (n + 1));
    for i in 1..=m {
        for j in 0..=n {
            log_u.push(field.get(i, j) - field.get(i - 1, j));
        }
    }
    let mut log_v = Vec::with_capacity((m + 1) * n);
    for i in 0..=m {
        for j in 1..=n {
            log_v.push(field.get(i, j) - field.get(i, j - 1));
        }
    }
    Ok(BurkeRatios { m, n, log_u, log_v })
}

/// Split of log Z^θ_{m,n} by the point where the path leaves the axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitDecomposition<T> {
    /// Entry k−1: paths leaving the i-axis at (k, 0), k = 1..=m.
    pub hor_terms: Vec<T>,
    /// Entry l−1: paths leaving the j-axis at (0, l), l = 1..=n.
    pub ver_terms: Vec<T>,
    pub log_hor: T,
    pub log_ver: T,
}

impl<T: Real> ExitDecomposition<T> {
    pub fn total(&self) -> T {
        logsumexp2(self.log_hor, self.log_ver)
    }
}

/// Exit-point terms Π_{i≤k} U_{i,0} · Z^□_{(k,1),(m,n)} and their vertical
/// counterparts, for m, n ≥ 1.
pub fn exit_decomposition<T: Real>(env: &EnvironmentGrid<T>) -> Result<ExitDecomposition<T>> {
    env.require_stationary("exit_decomposition")?;
    let (m, n) = (env.m(), env.n());
    if m == 0 || n == 0 {
        return Err(Error::usage("exit decomposition needs m, n >= 1"));
    }
    // back[i][j] = log Z^□_{(i,j),(m,n)} on [1, m] × [1, n], stored 0-based
    let cols = n;
    let mut back = vec![T::zero(); m * n];
    for i in (1..=m).rev() {
        for j in (1..=n).rev() {
            let here = (i - 1) * cols + (j - 1);
            let w = env.logw(i, j);
            back[here] = match (i == m, j == n) {
                (true, true) => w,
                (true, false) => w + back[here + 1],
                (false, true) => w + back[here + cols],
                (false, false) => w + logsumexp2(back[here + cols], back[here + 1]),
            };
        }
    }
    let mut hor_terms = Vec::with_capacity(m);
    let mut axis = T::zero();
    for k in 1..=m {
        axis = axis + env.logw(k, 0);
        hor_terms.push(axis + back[(k - 1) * cols]);
    }
    let mut ver_terms = Vec::with_capacity(n);
    let mut axis = T::zero();
    for l in 1..=n {
        axis = axis + env.logw(0, l);
        ver_terms.push(axis + back[l - 1]);
    }
    let log_hor = logsumexp(&hor_terms);
    let log_ver = logsumexp(&ver_terms);
    Ok(ExitDecomposition { hor_terms, ver_terms, log_hor, log_ver })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_env, dp_log_z, Variant};

    fn stationary(m: usize, n: usize, seed: u64) -> EnvironmentGrid<f64> {
        build_env(m, n, Variant::stationary(2.0, 0.7).unwrap(), seed, 0, 0).unwrap()
    }

    #[test]
    fn ratios_on_the_boundary_are_weights() {
        let env = stationary(6, 5, 1);
        let b = burke_ratios(&env, &dp_log_z(&env)).unwrap();
        for i in 1..=6 {
            assert!((b.log_u(i, 0) - env.logw(i, 0)).abs() < 1e-12);
        }
        for j in 1..=5 {
            assert!((b.log_v(0, j) - env.logw(0, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_identity_and_telescoping() {
        let env = stationary(8, 7, 2);
        let field = dp_log_z(&env);
        let b = burke_ratios(&env, &field).unwrap();
        for i in 1..=8 {
            for j in 1..=7 {
                let lhs = field.get(i, j) - field.get(i - 1, j - 1);
                let via_right_up = b.log_v(i, j) + b.log_u(i, j - 1);
                let via_up_right = b.log_u(i, j) + b.log_v(i - 1, j);
                assert!((lhs - via_right_up).abs() < 1e-12);
                assert!((lhs - via_up_right).abs() < 1e-12);
            }
        }
        let tele: f64 = (1..=7).map(|j| b.log_v(0, j)).sum::<f64>() + b.top_row_u().iter().sum::<f64>();
        assert!((tele - field.corner()).abs() < 1e-10);
        assert_eq!(b.right_column_v().len(), 7);
    }

    #[test]
    fn iid_environment_is_rejected() {
        let env = build_env(3, 3, Variant::iid(2.0f64).unwrap(), 1, 0, 0).unwrap();
        assert!(matches!(burke_ratios(&env, &dp_log_z(&env)), Err(Error::Usage(_))));
        assert!(matches!(exit_decomposition(&env), Err(Error::Usage(_))));
    }

    #[test]
    fn exit_terms_resum_to_the_partition_function() {
        for seed in 0..10 {
            let env = stationary(9, 6, seed);
            let dec = exit_decomposition(&env).unwrap();
            assert!((dec.total() - dp_log_z(&env).corner()).abs() < 1e-10);
            let all: Vec<f64> = dec.hor_terms.iter().chain(&dec.ver_terms).copied().collect();
            assert!((logsumexp(&all) - dec.total()).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_square_single_horizontal_path() {
        let env = stationary(1, 1, 3);
        let dec = exit_decomposition(&env).unwrap();
        assert!((dec.log_hor - (env.logw(1, 0) + env.logw(1, 1))).abs() < 1e-15);
        assert!((dec.log_ver - (env.logw(0, 1) + env.logw(1, 1))).abs() < 1e-15);
        assert!(exit_decomposition(&stationary(0, 3, 1)).is_err());
    }
}
