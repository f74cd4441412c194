//! Deterministic indexed parallel map with an optional thread cap from `CR_THREADS`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn thread_cap() -> Option<usize> {
    std::env::var("CR_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&k| k > 0)
}

/// `(0..count).map(f)` evaluated in parallel; output order is the index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match thread_cap() {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

/// Independent RNG stream for work item `index`, so results do not depend on scheduling.
pub fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}
