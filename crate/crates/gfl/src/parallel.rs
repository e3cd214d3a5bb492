use rayon::prelude::*;
use rayon::ThreadPool;

use gfl_core::{Error, Result};

/// `threads = None` uses rayon's default worker count.
pub fn pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Argument("--threads must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Argument(format!("thread pool: {e}")))
}

/// Order-preserving parallel map; results come back in input order.
pub fn par_map<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    pool.install(|| items.par_iter().map(f).collect())
}

/// [`par_map`] stopping at the first error in input order.
pub fn try_par_map<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    par_map(pool, items, f).into_iter().collect()
}
