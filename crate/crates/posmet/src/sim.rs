//! Multi-threaded shot sampling. Shot i always reads the same slice of
//! the seeded stream, so the thread count never changes the bits.

use std::thread;

use posmet_core::hardware::{ShotPlan, ShotRecord};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent seed for sub-run `stream` of a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

pub fn simulate_parallel(plan: &ShotPlan, n_shots: u64, seed: u64, threads: usize) -> ShotRecord {
    let threads = threads.clamp(1, n_shots.max(1) as usize) as u64;
    let chunk = n_shots.div_ceil(threads);
    let outcomes = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (lo, hi) = ((t * chunk).min(n_shots), ((t + 1) * chunk).min(n_shots));
                s.spawn(move || plan.sample(seed, lo..hi))
            })
            .collect();
        let mut all = Vec::with_capacity(n_shots as usize);
        for h in handles {
            all.extend(h.join().expect("sampler thread panicked"));
        }
        all
    });
    ShotRecord { seed, n_shots, outcomes }
}
