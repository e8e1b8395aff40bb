//! Order-preserving data-parallel map with a sequential fallback.
//!
//! All parallel work in the crate funnels through `map_collect`: the work
//! units are indexed, the results come back in index order, and any
//! reduction happens sequentially over that ordered vector. Outputs are
//! therefore identical with and without the `parallel` feature and for
//! any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
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
        (0..n).map(f).collect()
    }
}
