//! Pluggable evaluation strategy for the embarrassingly parallel loops
//! (transform quadrature, residual sweeps).

use alloc::vec::Vec;

use crate::C64;

/// Evaluates `f(0..n)` and collects the results in index order.
pub trait Executor {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> C64 + Sync)) -> Vec<C64>;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> C64 + Sync)) -> Vec<C64> {
        (0..n).map(f).collect()
    }
}
