//! Thin facade over rayon so every sweep has a sequential fallback.
//!
//! With the `parallel` feature enabled (the default) the parallel entry
//! points fan out over rayon's global pool; without it they degrade to the
//! sequential loop. Callers that need a sequential run regardless of
//! features (benchmark baselines, determinism checks) pass `parallel: false`.

/// Maps `f` over `0..count`, preserving order. `min_len` caps how finely
/// rayon may split the range: 1 for heavyweight items (experiment trials),
/// larger for cheap inner loops where task overhead would dominate.
pub(crate) fn map_indexed<T, F>(count: usize, parallel: bool, min_len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return (0..count)
                .into_par_iter()
                .with_min_len(min_len.max(1))
                .map(f)
                .collect();
        }
    }
    let _ = (parallel, min_len);
    (0..count).map(f).collect()
}

/// True when the crate was built with rayon support.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
