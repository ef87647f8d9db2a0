//! Data-parallel helpers.
//!
//! With the `parallel` feature the helpers run on the rayon pool; without it
//! they fall back to plain sequential iteration. Reductions are only used
//! with associative and commutative combiners (exact integer sums, merges of
//! per-class tallies), so results do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps every index in `0..len` and folds the results with `combine`.
pub fn map_reduce<R, M, C>(len: usize, identity: R, map: M, combine: C) -> R
where
    R: Send + Sync + Clone,
    M: Fn(usize) -> R + Sync + Send,
    C: Fn(R, R) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len)
            .into_par_iter()
            .map(map)
            .reduce(|| identity.clone(), combine)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(map).fold(identity, combine)
    }
}

/// Maps every item, preserving order.
pub fn map_collect<T, R, M>(items: &[T], map: M) -> Vec<R>
where
    T: Sync,
    R: Send,
    M: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(map).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(map).collect()
    }
}

/// Number of worker threads the helpers will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` with at most `threads` workers. Sequential builds ignore the
/// argument.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
