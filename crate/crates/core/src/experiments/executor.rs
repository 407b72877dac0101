//! Ordered map over sample indices, parallel when the `parallel` feature is
//! enabled and more than one job is requested.

use crate::error::Result;

/// Indices handed to the workers per round; results of a round are consumed
/// in index order before the next round starts.
const DEFAULT_CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Executor {
    jobs: usize,
    chunk: usize,
}

impl Executor {
    pub fn sequential() -> Self {
        Self {
            jobs: 1,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn new(jobs: usize) -> Self {
        Self {
            jobs: jobs.max(1),
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn with_chunk(mut self, chunk: usize) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    /// Evaluates `f(i)` for `i < count` and feeds the results to `sink` in
    /// increasing `i`. Stops at the first error in index order.
    pub fn run<T, F, S>(&self, count: usize, f: F, mut sink: S) -> Result<()>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync,
        S: FnMut(usize, T) -> Result<()>,
    {
        #[cfg(feature = "parallel")]
        if self.jobs > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.jobs)
                .build()
                .expect("thread pool");
            let chunk = self.chunk * self.jobs;
            let mut start = 0;
            while start < count {
                let end = (start + chunk).min(count);
                let results: Vec<Result<T>> =
                    pool.install(|| (start..end).into_par_iter().map(&f).collect());
                for (i, r) in (start..end).zip(results) {
                    sink(i, r?)?;
                }
                start = end;
            }
            return Ok(());
        }
        for i in 0..count {
            sink(i, f(i)?)?;
        }
        Ok(())
    }
}
