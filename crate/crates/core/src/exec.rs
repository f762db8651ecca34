//! Batch evaluation strategy for the sample loops in `sensitivity`.
//!
//! Work items must be pure functions of their index, so the parallel and
//! sequential strategies produce identical vectors: stochastic analyses
//! derive a per-sample RNG substream from (seed, index) instead of sharing
//! one generator.

/// Evaluate `f` over `0..n` sequentially.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Evaluate `f` over `0..n` with the crate's default strategy: rayon when
/// the `parallel` feature is enabled, otherwise sequential.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}
