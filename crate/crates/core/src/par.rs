//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool (sized by `RAYON_NUM_THREADS`); without it every helper is a
//! plain sequential loop. Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    F: Fn(&T) -> Result<R, E>,
{
    items.iter().map(f).collect()
}

/// Map over `0..n`.
#[cfg(feature = "parallel")]
pub(crate) fn try_map_range<R, E, F>(n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_range<R, E, F>(n: usize, f: F) -> Result<Vec<R>, E>
where
    F: Fn(usize) -> Result<R, E>,
{
    (0..n).map(f).collect()
}
