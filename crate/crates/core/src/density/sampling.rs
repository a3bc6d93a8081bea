use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::params::{FluctuationParams, PhasePoint};

/// Independent draws from the (uncorrelated) Gaussian fluctuation law.
/// The stream depends only on `seed`; `x` and `p` are drawn alternately.
pub fn sample(params: &FluctuationParams, count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sx, sp) = (params.sd_x(), params.sd_p());
    (0..count)
        .map(|_| {
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zp: f64 = StandardNormal.sample(&mut rng);
            PhasePoint::new(params.mean_x() + sx * zx, params.mean_p() + sp * zp)
        })
        .collect()
}
