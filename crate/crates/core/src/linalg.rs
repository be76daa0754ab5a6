//! Direct solver for cyclic block-tridiagonal systems with 2x2 blocks.
//!
//! Row `i` reads `L x_{i-1} + D_i x_i + U x_{i+1} = b_i` with indices taken
//! modulo `n`. The two corner blocks are split off as a rank-2 update
//! `W V^T` so the remaining block-tridiagonal system is solved by block
//! elimination, and the update is folded back with the Woodbury identity.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix2x3, Vector2};

use crate::error::{Error, Result};

/// Inverse of a 2x2 block, rejecting blocks whose determinant is negligible
/// against the block magnitude.
fn invert(block: &Matrix2<f64>, index: usize) -> Result<Matrix2<f64>> {
    let det = block.determinant();
    let scale = block.abs().max();
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale || scale == 0.0 {
        return Err(Error::SingularJacobian(index));
    }
    Ok(Matrix2::new(block[(1, 1)], -block[(0, 1)], -block[(1, 0)], block[(0, 0)]) / det)
}

pub(crate) fn solve_block_cyclic(
    diag: &[Matrix2<f64>],
    lower: &Matrix2<f64>,
    upper: &Matrix2<f64>,
    rhs: &[Vector2<f64>],
) -> Result<Vec<Vector2<f64>>> {
    let n = diag.len();
    assert_eq!(n, rhs.len(), "block system size mismatch");
    let x = if n < 3 { solve_dense(diag, lower, upper, rhs)? } else { solve_woodbury(diag, lower, upper, rhs)? };
    debug_assert!({
        let ax = apply(diag, lower, upper, &x);
        let err = ax.iter().zip(rhs).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        let scale = rhs.iter().map(|b| b.amax()).fold(0.0, f64::max)
            + diag.iter().map(|d| d.amax()).fold(lower.amax() + upper.amax(), f64::max)
                * x.iter().map(|v| v.amax()).fold(0.0, f64::max);
        err <= 1e-12 * scale.max(f64::MIN_POSITIVE)
    });
    Ok(x)
}

/// `A x` for the cyclic block matrix.
pub(crate) fn apply(
    diag: &[Matrix2<f64>],
    lower: &Matrix2<f64>,
    upper: &Matrix2<f64>,
    x: &[Vector2<f64>],
) -> Vec<Vector2<f64>> {
    let n = diag.len();
    (0..n).map(|i| diag[i] * x[i] + lower * x[(i + n - 1) % n] + upper * x[(i + 1) % n]).collect()
}

fn solve_woodbury(
    diag: &[Matrix2<f64>],
    lower: &Matrix2<f64>,
    upper: &Matrix2<f64>,
    rhs: &[Vector2<f64>],
) -> Result<Vec<Vector2<f64>>> {
    let n = diag.len();
    let gamma = -diag[0];
    let gamma_inv_lower = invert(&gamma, 0)? * lower;

    // T' = A - W V^T with W = [gamma; 0; ...; upper], V^T = [I, 0, ..., gamma^-1 lower].
    let mut modified = diag.to_vec();
    modified[0] = diag[0] - gamma;
    modified[n - 1] = diag[n - 1] - upper * gamma_inv_lower;

    // Columns: b, then the two columns of W.
    let mut columns: Vec<Matrix2x3<f64>> = rhs.iter().map(|b| Matrix2x3::from_columns(&[*b, Vector2::zeros(), Vector2::zeros()])).collect();
    columns[0].fixed_view_mut::<2, 2>(0, 1).copy_from(&gamma);
    columns[n - 1].fixed_view_mut::<2, 2>(0, 1).copy_from(upper);

    let solved = block_thomas(&modified, lower, upper, columns)?;

    let y = |i: usize| solved[i].column(0).into_owned();
    let z = |i: usize| solved[i].fixed_view::<2, 2>(0, 1).into_owned();
    let vty = y(0) + gamma_inv_lower * y(n - 1);
    let capacitance = Matrix2::identity() + z(0) + gamma_inv_lower * z(n - 1);
    let shift = invert(&capacitance, n)? * vty;
    Ok((0..n).map(|i| y(i) - z(i) * shift).collect())
}

/// Block Thomas elimination for the non-cyclic block-tridiagonal system.
fn block_thomas(
    diag: &[Matrix2<f64>],
    lower: &Matrix2<f64>,
    upper: &Matrix2<f64>,
    mut rhs: Vec<Matrix2x3<f64>>,
) -> Result<Vec<Matrix2x3<f64>>> {
    let n = diag.len();
    let mut sweep = vec![Matrix2::zeros(); n];
    let pivot = invert(&diag[0], 0)?;
    sweep[0] = pivot * upper;
    rhs[0] = pivot * rhs[0];
    for i in 1..n {
        let pivot = invert(&(diag[i] - lower * sweep[i - 1]), i)?;
        sweep[i] = pivot * upper;
        rhs[i] = pivot * (rhs[i] - lower * rhs[i - 1]);
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - sweep[i] * rhs[i + 1];
    }
    Ok(rhs)
}

fn solve_dense(
    diag: &[Matrix2<f64>],
    lower: &Matrix2<f64>,
    upper: &Matrix2<f64>,
    rhs: &[Vector2<f64>],
) -> Result<Vec<Vector2<f64>>> {
    let n = diag.len();
    let mut dense = DMatrix::zeros(2 * n, 2 * n);
    for (i, d) in diag.iter().enumerate() {
        let mut add = |j: usize, block: &Matrix2<f64>| {
            let mut view = dense.view_mut((2 * i, 2 * j), (2, 2));
            view += block;
        };
        add(i, d);
        add((i + n - 1) % n, lower);
        add((i + 1) % n, upper);
    }
    let b = DVector::from_iterator(2 * n, rhs.iter().flat_map(|v| [v[0], v[1]]));
    let x = dense.lu().solve(&b).ok_or(Error::SingularJacobian(0))?;
    Ok((0..n).map(|i| Vector2::new(x[2 * i], x[2 * i + 1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Matrix2<f64>>, Matrix2<f64>, Matrix2<f64>, Vec<Vector2<f64>>) {
        let mut block = || Matrix2::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let lower = block();
        let upper = block();
        let diag = (0..n).map(|_| block() + Matrix2::new(6.0, 1.0, -1.0, -6.0)).collect();
        let rhs = (0..n).map(|_| Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        (diag, lower, upper, rhs)
    }

    #[test]
    fn woodbury_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 4, 9, 40] {
            let (diag, lower, upper, rhs) = random_system(&mut rng, n);
            let x = solve_block_cyclic(&diag, &lower, &upper, &rhs).unwrap();
            let dense = solve_dense(&diag, &lower, &upper, &rhs).unwrap();
            for (a, b) in x.iter().zip(&dense) {
                assert!((a - b).amax() < 1e-12, "n = {n}");
            }
            let norm_b = rhs.iter().map(|v| v.amax()).fold(0.0, f64::max);
            let ax = apply(&diag, &lower, &upper, &x);
            let err = ax.iter().zip(&rhs).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
            assert!(err <= 1e-12 * norm_b);
        }
    }

    #[test]
    fn singular_blocks_are_reported() {
        let n = 5;
        let diag = vec![Matrix2::zeros(); n];
        let rhs = vec![Vector2::new(1.0, 0.0); n];
        let zero = Matrix2::zeros();
        assert!(matches!(solve_block_cyclic(&diag, &zero, &zero, &rhs), Err(Error::SingularJacobian(_))));
    }
}
