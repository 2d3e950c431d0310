use crate::error::{Error, Result};
use crate::lattice::{logsumexp2, LogZField, RngStream};
use crate::scalar::Real;

/// Draws a path from the quenched polymer measure on (0,0) → (m,n),
/// walking backward from (m,n). Returned in forward order.
pub fn sample_quenched_path<T: Real>(field: &LogZField<T>, rng: &mut RngStream) -> Result<Vec<(usize, usize)>> {
    if field.is_square() {
        return Err(Error::usage("path sampling expects the origin-excluded field"));
    }
    let (mut i, mut j) = (field.m(), field.n());
    let mut path = Vec::with_capacity(i + j + 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        let step_back_i = if i == 0 {
            false
        } else if j == 0 {
            true
        } else {
            let a = field.get(i - 1, j);
            let b = field.get(i, j - 1);
            let p = (a - logsumexp2(a, b)).exp();
            rng.open01::<T>() < p
        };
        if step_back_i {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_env, dp_log_z, Variant};

    #[test]
    fn paths_are_valid() {
        let env = build_env(7, 4, Variant::iid(2.0f64).unwrap(), 1, 0, 0).unwrap();
        let field = dp_log_z(&env);
        let mut rng = RngStream::new(1, 9, 0);
        for _ in 0..100 {
            let path = sample_quenched_path(&field, &mut rng).unwrap();
            assert_eq!(path.first(), Some(&(0, 0)));
            assert_eq!(path.last(), Some(&(7, 4)));
            for w in path.windows(2) {
                let (a, b) = (w[0], w[1]);
                assert!((b.0 == a.0 + 1 && b.1 == a.1) || (b.0 == a.0 && b.1 == a.1 + 1));
            }
        }
    }

    #[test]
    fn unit_square_first_step_law() {
        let env = build_env(1, 1, Variant::iid(1.0f64).unwrap(), 4, 0, 0).unwrap();
        let field = dp_log_z(&env);
        let (a, b) = (env.logw(1, 0).exp(), env.logw(0, 1).exp());
        let p = a / (a + b);
        let mut rng = RngStream::new(2, 0, 0);
        let draws = 40_000;
        let hits = (0..draws)
            .filter(|_| sample_quenched_path(&field, &mut rng).unwrap()[1] == (1, 0))
            .count();
        let freq = hits as f64 / draws as f64;
        let sd = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sd, "{freq} vs {p}");
    }
}
