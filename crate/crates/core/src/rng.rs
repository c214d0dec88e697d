//! Counter-based random streams.
//!
//! Every Monte Carlo sample `i` draws from its own ChaCha8 stream: the key
//! comes from the master seed and the stream id is `i`. A sample therefore
//! sees the same numbers no matter which worker thread evaluates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

/// Independent stream for sample `index` under `master_seed`.
pub fn sample_stream(master_seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
