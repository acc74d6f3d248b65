//! Thin dispatch layer between rayon and plain iteration.
//!
//! Everything in this crate is a pure function of immutable inputs, so the
//! data-parallel loops (per-root sweeps, Monte Carlo batches, sweep grids)
//! go through these helpers. With the `parallel` feature (default) they run
//! on the rayon pool; without it they degrade to sequential loops with
//! identical results. The serial bodies stay available under either build so
//! the bench suite can compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over an index range, collecting results in input order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_serial(n, f)
    }
}

/// Sequential twin of [`map_indexed`]; always available for comparison.
pub fn map_indexed_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Map over a slice, collecting results in input order.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fold an index range to the maximum of a per-index score.
pub fn max_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(f)
            .fold(|| f64::NEG_INFINITY, f64::max)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}
