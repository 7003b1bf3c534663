//! Execution policy for embarrassingly parallel loops (trajectory ensembles,
//! parameter sweeps). Results always come back in index order, so reductions
//! over them are independent of the worker count.
//!
//! Without the `parallel` feature every policy runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Execution {
    Sequential,
    /// `None` uses all available cores.
    Parallel(Option<usize>),
    #[default]
    Auto,
}

impl Execution {
    pub fn workers(workers: usize) -> Self {
        if workers <= 1 {
            Self::Sequential
        } else {
            Self::Parallel(Some(workers))
        }
    }

    /// Number of threads that will actually be used.
    pub fn thread_count(&self) -> usize {
        match self {
            Self::Sequential => 1,
            _ if !cfg!(feature = "parallel") => 1,
            Self::Parallel(Some(n)) => (*n).max(1),
            Self::Parallel(None) | Self::Auto => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }

    /// `f(0), …, f(n−1)` collected in index order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.thread_count() <= 1 {
            return (0..n).map(f).collect();
        }
        par_map(self.thread_count(), n, f)
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(threads: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(_threads: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
