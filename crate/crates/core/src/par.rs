//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the default entry points run on the rayon
//! global pool; without it they are plain iterator loops. The explicit
//! `*_sequential` / `*_parallel` variants exist so both paths can be
//! benchmarked side by side.

/// Maps `f` over `0..n` and collects results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indexed_parallel(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_sequential(n, f)
    }
}

pub fn map_indexed_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indexed_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Counts the indices in `0..n` for which `pred` holds.
pub fn count_indexed<F>(n: usize, pred: F) -> u64
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        count_indexed_parallel(n, pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        count_indexed_sequential(n, pred)
    }
}

pub fn count_indexed_sequential<F>(n: usize, pred: F) -> u64
where
    F: Fn(usize) -> bool,
{
    (0..n).filter(|&i| pred(i)).count() as u64
}

#[cfg(feature = "parallel")]
pub fn count_indexed_parallel<F>(n: usize, pred: F) -> u64
where
    F: Fn(usize) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().filter(|&i| pred(i)).count() as u64
}
