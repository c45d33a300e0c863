//! Counter-derived per-path randomness.
//!
//! Path `i` draws from ChaCha8 stream `i` of the run seed, so its normals do
//! not depend on which worker generates it or in what order. With antithetic
//! pairing, paths `2k` and `2k + 1` share stream `k` and the odd path uses the
//! negated draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct NormalSource {
    rng: ChaCha8Rng,
    sign: f64,
}

impl NormalSource {
    pub fn for_path(seed: u64, path_id: u64, antithetic: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (stream, sign) = if antithetic {
            (path_id / 2, if path_id % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (path_id, 1.0)
        };
        rng.set_stream(stream);
        Self { rng, sign }
    }

    #[inline]
    pub fn draw(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.sign * z
    }
}
