//! Data-parallel helpers. With the `parallel` feature they run on the rayon
//! pool; without it they fall back to plain iteration. [`sequential`] forces
//! the fallback at runtime. Results always come back in input order.

use std::cell::Cell;
use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper on this thread taking the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    struct Restore(bool);
    impl Drop for Restore {
        fn drop(&mut self) {
            FORCE_SEQUENTIAL.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(FORCE_SEQUENTIAL.with(|c| c.replace(true)));
    f()
}

/// Whether helpers called from this thread run on the rayon pool.
pub fn active() -> bool {
    enabled() && !FORCE_SEQUENTIAL.with(Cell::get)
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if active() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if active() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Splits `range` into consecutive pieces of at most `chunk` indices and maps
/// `f` over them, preserving order.
pub fn map_ranges<R, F>(range: Range<usize>, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let pieces = range.len().div_ceil(chunk);
    map_range(pieces, |i| {
        let a = range.start + i * chunk;
        f(a..(a + chunk).min(range.end))
    })
}

/// Whether the parallel path is compiled in.
pub const fn enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let xs: Vec<u32> = (0..1000).collect();
        assert_eq!(map(&xs, |x| x * 2), xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(map_range(5, |i| i), vec![0, 1, 2, 3, 4]);
        assert_eq!(map_ranges(3..10, 3, |r| r), vec![3..6, 6..9, 9..10]);
        assert!(map_ranges(4..4, 3, |r| r).is_empty());
    }

    #[test]
    fn sequential_override_is_scoped() {
        assert_eq!(active(), enabled());
        let inner = sequential(|| {
            assert!(!active());
            sequential(|| assert!(!active()));
            assert!(!active());
            map(&[1, 2, 3], |x| x + 1)
        });
        assert_eq!(inner, vec![2, 3, 4]);
        assert_eq!(active(), enabled());
    }
}
