//! Tiny data-parallel layer.
//!
//! All hot loops are "map an independent function over an index range and
//! keep the results in order". With the `parallel` feature the maps run on
//! the rayon pool; without it they run sequentially. Reductions are always
//! performed sequentially over the ordered results, so floating-point output
//! is bit-identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    /// Use rayon when the `parallel` feature is compiled in.
    Auto,
    /// Force the sequential path (used by the benches for comparison).
    Sequential,
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::Auto
    }
}

/// Configure the global rayon pool size (no-op without the `parallel`
/// feature). Fails if the pool was already initialized.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> std::result::Result<(), String> {
    Ok(())
}

/// Ordered map over `0..n`.
pub fn map_indexed<T, F>(n: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        Parallelism::Sequential => (0..n).map(f).collect(),
        Parallelism::Auto => map_auto(n, f),
    }
}

#[cfg(feature = "parallel")]
fn map_auto<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_auto<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Ordered map over a slice.
pub fn map_slice<I, T, F>(items: &[I], mode: Parallelism, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    map_indexed(items.len(), mode, |i| f(&items[i]))
}

/// Sequential sum of an ordered map; the reduction order is fixed.
pub fn sum_indexed<F>(n: usize, mode: Parallelism, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indexed(n, mode, f).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.1).sin() / (1.0 + i as f64);
        let a = map_indexed(1000, Parallelism::Auto, f);
        let b = map_indexed(1000, Parallelism::Sequential, f);
        assert_eq!(a, b);
        let sa = sum_indexed(1000, Parallelism::Auto, f);
        let sb = sum_indexed(1000, Parallelism::Sequential, f);
        assert_eq!(sa.to_bits(), sb.to_bits());
    }
}
