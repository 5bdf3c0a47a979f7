//! Data-parallel map helpers.
//!
//! With the `parallel` feature the default entry points run on the rayon
//! pool; without it they fall back to the sequential versions in [`seq`].
//! Both paths return results in index order, so outputs are identical.

pub mod seq {
    pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }

    pub fn map_mut<S, T, F>(items: &mut [S], f: F) -> Vec<T>
    where
        F: Fn(usize, &mut S) -> T,
    {
        items.iter_mut().enumerate().map(|(i, s)| f(i, s)).collect()
    }
}

#[cfg(feature = "parallel")]
pub mod rayon_impl {
    use rayon::prelude::*;

    pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }

    pub fn map_mut<S, T, F>(items: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync + Send,
    {
        items
            .par_iter_mut()
            .enumerate()
            .map(|(i, s)| f(i, s))
            .collect()
    }
}

#[cfg(feature = "parallel")]
pub use rayon_impl::{map_mut, map_range};

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    seq::map_range(n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map_mut<S, T, F>(items: &mut [S], f: F) -> Vec<T>
where
    S: Send,
    T: Send,
    F: Fn(usize, &mut S) -> T + Sync + Send,
{
    seq::map_mut(items, f)
}

/// True when the rayon-backed path is compiled in.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let a = map_range(1000, |i| (i as f64).sqrt());
        let b = seq::map_range(1000, |i| (i as f64).sqrt());
        assert_eq!(a, b);

        let mut xs: Vec<u64> = (0..100).collect();
        let mut ys = xs.clone();
        let ra = map_mut(&mut xs, |i, v| {
            *v += 1;
            *v * i as u64
        });
        let rb = seq::map_mut(&mut ys, |i, v| {
            *v += 1;
            *v * i as u64
        });
        assert_eq!(ra, rb);
        assert_eq!(xs, ys);
    }
}
