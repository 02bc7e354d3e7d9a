//! Seeded sampling of initial states and of points inside polytopes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stc_core::{HPolytope, Vector};

use crate::error::{CliError, CliResult};

/// Rejections allowed per draw before giving up.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Independent stream `index` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from `{x : lo < Ψ(x) <= hi}` by rejection on the box `[min, max]`.
pub fn sample_shell<R: Rng>(
    rng: &mut R,
    p0: &HPolytope,
    lo: f64,
    hi: f64,
    bounds: (&Vector, &Vector),
) -> CliResult<Vector> {
    let (min, max) = bounds;
    for _ in 0..MAX_REJECTIONS {
        let x = Vector::from_fn(min.len(), |i, _| rng.random_range(min[i]..=max[i]));
        let g = p0.gauge(&x)?;
        if g > lo && g <= hi {
            return Ok(x);
        }
    }
    Err(CliError::Usage(format!(
        "no sample found in the shell {lo} < gauge <= {hi} after {MAX_REJECTIONS} draws"
    )))
}

/// Random convex combination of `points` (exponential weights).
pub fn sample_hull<R: Rng>(rng: &mut R, points: &[Vector]) -> Vector {
    let weights: Vec<f64> = points.iter().map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut x = Vector::zeros(points[0].len());
    for (w, p) in weights.iter().zip(points) {
        x += p * (w / total);
    }
    x
}
