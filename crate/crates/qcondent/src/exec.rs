//! Internal execution helper: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (the default) the work is spread over the
//! rayon pool; without it, or when `sequential` is requested, the same
//! closures run on the calling thread. Results come back in index order
//! either way, so downstream reductions are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn run_indexed<U, F>(n: usize, sequential: bool, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !sequential {
        return (0..n).into_par_iter().map(&f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = sequential;
    (0..n).map(f).collect()
}
