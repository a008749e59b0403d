//! Order-preserving data-parallel helpers.
//!
//! Every sweep in this crate maps a pure function over independent points.
//! With the `parallel` feature the map runs on a rayon pool; without it, or
//! with [`Parallelism::Sequential`], it runs in a plain loop. Results are
//! collected in input order either way, so output never depends on the
//! thread count.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// Worker threads; 0 lets rayon pick.
    Threads(usize),
}

impl Parallelism {
    /// Parallel when the feature is compiled in, otherwise sequential.
    pub fn available() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Threads(0)
        } else {
            Parallelism::Sequential
        }
    }

    /// CLI mapping: `1` means sequential, `0` all cores, `n` that many threads.
    pub fn from_thread_count(n: usize) -> Self {
        match n {
            1 => Parallelism::Sequential,
            n => Parallelism::Threads(n),
        }
    }
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

pub fn map<T, R, F>(items: &[T], par: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match par {
        Parallelism::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Threads(n) => {
            use rayon::prelude::*;
            with_pool(n, || items.par_iter().map(f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Threads(_) => items.iter().map(f).collect(),
    }
}

/// Runs two closures, concurrently when allowed.
pub fn join<A, B, RA, RB>(par: Parallelism, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    match par {
        Parallelism::Sequential => (a(), b()),
        #[cfg(feature = "parallel")]
        Parallelism::Threads(n) => with_pool(n, || rayon::join(a, b)),
        #[cfg(not(feature = "parallel"))]
        Parallelism::Threads(_) => (a(), b()),
    }
}
