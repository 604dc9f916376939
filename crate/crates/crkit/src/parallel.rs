//! Rayon-backed [`Executor`].

use crkit_core::{Executor, C64};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "CRKIT_THREADS";

pub struct Rayon {
    pool: ThreadPool,
}

impl Rayon {
    pub fn new(threads: Option<usize>) -> Self {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = threads.filter(|&n| n > 0) {
            b = b.num_threads(n);
        }
        Self { pool: b.build().expect("thread pool") }
    }

    /// Pool sized by `CRKIT_THREADS` when set to a positive integer,
    /// otherwise by rayon's default.
    pub fn from_env() -> Self {
        Self::new(std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse().ok()))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Rayon {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> C64 + Sync)) -> Vec<C64> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
