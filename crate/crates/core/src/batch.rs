//! Parallel evaluation with results in input order.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs per-item work on a dedicated pool of `workers` threads.
///
/// Output order always matches input order and the first failing item (by
/// position) determines the returned error, so results do not depend on the
/// worker count.
#[derive(Debug, Clone, Copy)]
pub struct BatchEvaluator {
    workers: usize,
}

impl BatchEvaluator {
    /// `workers == 0` picks rayon's default thread count.
    pub fn new(workers: usize) -> Self {
        let workers = if workers == 0 { rayon::current_num_threads() } else { workers };
        BatchEvaluator { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync,
    {
        let results: Vec<Result<R>> = self.pool()?.install(|| items.par_iter().map(&f).collect());
        results.into_iter().collect()
    }

    /// Like [`BatchEvaluator::map`] over the indices `0..n`.
    pub fn map_indexed<R, F>(&self, n: usize, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(usize) -> Result<R> + Sync,
    {
        let results: Vec<Result<R>> = self.pool()?.install(|| (0..n).into_par_iter().map(&f).collect());
        results.into_iter().collect()
    }
}
