//! Execution helpers: data-parallel map/for-each over independent work
//! items, falling back to plain iteration when the `parallel` feature is
//! off.
//!
//! Results are deterministic in both modes: output order follows input
//! order and each item's computation is self-contained (no cross-item
//! floating-point reduction).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Apply `f` to every index-identified chunk of `buf`, in parallel when
/// enabled. `chunk` is the stride in elements; `f` receives the chunk
/// index and a mutable slice.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk_mut<T, F>(buf: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    buf.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk_mut<T, F>(buf: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    for (i, c) in buf.chunks_mut(chunk).enumerate() {
        f(i, c);
    }
}
