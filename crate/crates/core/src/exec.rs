//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs on
//! the rayon global pool; without it every policy runs sequentially. Results
//! are always returned in input order, so the choice of policy never changes
//! an output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with rayon support.
    pub fn best_available() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `items.iter().map(f).collect()`, possibly in parallel.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Writes `f(&items[i])` into `out[i]`, possibly in parallel.
    pub fn map_into<T, U, F>(self, items: &[T], out: &mut [U], f: F)
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        self.map_into_with(items, out, || (), |_, t| f(t));
    }

    /// Like [`map_into`](Self::map_into) with a scratch value created by
    /// `init` once per worker rather than once per item.
    pub fn map_into_with<T, U, S, I, F>(self, items: &[T], out: &mut [U], init: I, f: F)
    where
        T: Sync,
        U: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, &T) -> U + Sync + Send,
    {
        assert_eq!(items.len(), out.len());
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            out.par_iter_mut()
                .zip(items.par_iter())
                .with_min_len(256)
                .for_each_init(init, |s, (o, t)| *o = f(s, t));
            return;
        }
        let mut scratch = init();
        for (o, t) in out.iter_mut().zip(items) {
            *o = f(&mut scratch, t);
        }
    }
}
