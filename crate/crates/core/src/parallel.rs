//! Index-ordered parallel map with a serial fallback.
//!
//! Results always come back in index order, so aggregate output does not
//! depend on the number of workers. Without the `parallel` feature every
//! mode runs serially.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    Serial,
    /// Rayon's global pool.
    #[default]
    Auto,
    /// A dedicated pool with this many workers.
    Threads(usize),
}

impl Parallelism {
    /// `0` selects [`Parallelism::Auto`], `1` [`Parallelism::Serial`].
    pub fn from_workers(workers: usize) -> Self {
        match workers {
            0 => Parallelism::Auto,
            1 => Parallelism::Serial,
            k => Parallelism::Threads(k),
        }
    }
}

pub fn map_indexed<T, F>(n: usize, mode: Parallelism, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match mode {
        Parallelism::Serial => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Auto => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Parallelism::Threads(k) => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        _ => (0..n).map(f).collect(),
    }
}
