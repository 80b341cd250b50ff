//! Data-parallel helpers with a sequential fallback.
//!
//! The scan-heavy operations (lattice sweeps, envelope grids, random-point
//! suites) parallelize over items; building without the `parallel` feature
//! compiles the same call sites down to plain iteration.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Map over items, in parallel when requested and available.
pub fn map<T, U, F>(mode: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

/// Fold with max semantics over f64 values produced from items.
pub fn max_f64<T, F>(mode: Parallelism, items: Vec<T>, f: F) -> Option<f64>
where
    T: Send,
    F: Fn(T) -> f64 + Sync + Send,
{
    let vals = map(mode, items, f);
    vals.into_iter().fold(None, |acc, v| match acc {
        None => Some(v),
        Some(a) => Some(a.max(v)),
    })
}
