//! Grid mapping helpers for embarrassingly parallel scans.
//!
//! With the `parallel` feature (default) grid points are evaluated on the
//! rayon pool; without it, evaluation is sequential. Output order always
//! follows the input grid regardless of completion order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over grid points, in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map over grid points, in parallel when the `parallel` feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path; kept unconditionally for benchmarking the
/// parallel speedup.
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
