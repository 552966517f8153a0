//! Execution strategy for data-parallel sweeps.
//!
//! Grid scans, sample sweeps and level-set tables are embarrassingly
//! parallel.  `run_grid` maps a function over a slice either sequentially or
//! on the rayon pool; results always come back in input order, so reports
//! are byte-identical regardless of the strategy.  Without the `parallel`
//! feature the crate builds with no rayon dependency and `Parallel` degrades
//! to the sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Exec {
    /// Parallel when the feature is compiled in, sequential otherwise.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

pub fn run_grid<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Exec::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => items.iter().map(f).collect(),
    }
}

/// Run `f` on a pool with `jobs` worker threads (1 = strictly sequential).
/// Only a hint without the `parallel` feature.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce(Exec) -> R + Send) -> R {
    if jobs <= 1 {
        return f(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("rayon pool");
        pool.install(|| f(Exec::Parallel))
    }
    #[cfg(not(feature = "parallel"))]
    {
        f(Exec::Sequential)
    }
}
