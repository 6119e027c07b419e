//! Data-parallel prime sweeps.
//!
//! Every per-prime computation in this crate is a pure function of the prime,
//! so sweeps distribute trivially. With the `parallel` feature (default) the
//! work runs on rayon's global pool; without it, `map_primes` degrades to the
//! sequential loop. Output order is ascending in p in both cases, so reductions
//! downstream are reproducible bit for bit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `primes`, in parallel when the `parallel` feature is enabled.
/// The result vector is ordered like the input.
#[cfg(feature = "parallel")]
pub fn map_primes<T, F>(primes: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    primes.par_iter().map(|&p| f(p)).collect()
}

/// Sequential fallback used when built with `--no-default-features`.
#[cfg(not(feature = "parallel"))]
pub fn map_primes<T, F>(primes: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_primes_seq(primes, f)
}

/// Always-sequential sweep, kept available for single-threaded baselines
/// and benchmark comparisons.
pub fn map_primes_seq<T, F>(primes: &[u64], f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    primes.iter().map(|&p| f(p)).collect()
}
