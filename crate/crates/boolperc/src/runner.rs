use boolperc_core::Replicator;
use rayon::prelude::*;

/// Replicator backed by a dedicated rayon pool. Results are collected in
/// replication-index order, so reductions are independent of the pool size.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Replicator for Parallel {
    fn run<T, F>(&self, reps: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..reps).into_par_iter().map(&f).collect())
    }
}
