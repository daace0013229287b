//! Thread pool used for per-element assembly.
//!
//! `HODGEKIT_THREADS` caps the number of worker threads; when unset the
//! global rayon pool is used.

use std::sync::OnceLock;

static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();

fn pool() -> Option<&'static rayon::ThreadPool> {
    POOL.get_or_init(|| {
        let threads = std::env::var("HODGEKIT_THREADS").ok()?.trim().parse::<usize>().ok()?;
        if threads == 0 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()
    })
    .as_ref()
}

/// Runs `f` inside the capped pool if one is configured.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match pool() {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Number of threads assembly will use.
pub fn current_threads() -> usize {
    match pool() {
        Some(p) => p.current_num_threads(),
        None => rayon::current_num_threads(),
    }
}
