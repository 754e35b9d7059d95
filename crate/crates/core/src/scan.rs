//! Order-independent max reductions over grid slices.
//!
//! Every supremum in the crate goes through [`try_max`]. The reduction keeps
//! the largest value and, among equal values, the smallest index, so the
//! result does not depend on how the slice is split between workers. When
//! several items fail, the error of the smallest index is reported.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on the rayon
//! pool; without it, it falls back to the serial loop.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Serial,
    #[default]
    Parallel,
}

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgMax {
    pub index: usize,
    pub value: f64,
}

impl ArgMax {
    fn better(self, other: ArgMax) -> ArgMax {
        match self.value.total_cmp(&other.value) {
            Ordering::Greater => self,
            Ordering::Less => other,
            Ordering::Equal => {
                if self.index <= other.index {
                    self
                } else {
                    other
                }
            }
        }
    }
}

type Partial<E> = Option<Result<ArgMax, (usize, E)>>;

fn combine<E>(lhs: Partial<E>, rhs: Partial<E>) -> Partial<E> {
    match (lhs, rhs) {
        (None, r) => r,
        (l, None) => l,
        (Some(Err((i, e))), Some(Err((j, f)))) => {
            Some(if i <= j { Err((i, e)) } else { Err((j, f)) })
        }
        (Some(Err(e)), Some(Ok(_))) | (Some(Ok(_)), Some(Err(e))) => Some(Err(e)),
        (Some(Ok(a)), Some(Ok(b))) => Some(Ok(a.better(b))),
    }
}

/// Maximum of `f` over `items`. `Ok(None)` for an empty slice.
pub fn try_max<T, E, F>(exec: Exec, items: &[T], f: F) -> Result<Option<ArgMax>, E>
where
    T: Sync,
    E: Send,
    F: Fn(&T) -> Result<f64, E> + Sync + Send,
{
    let lift = |(index, item): (usize, &T)| -> Partial<E> {
        Some(
            f(item)
                .map(|value| ArgMax { index, value })
                .map_err(|e| (index, e)),
        )
    };
    let out = match exec {
        Exec::Serial => serial(items, lift),
        Exec::Parallel => parallel(items, lift),
    };
    match out {
        None => Ok(None),
        Some(Ok(m)) => Ok(Some(m)),
        Some(Err((_, e))) => Err(e),
    }
}

/// Infallible variant of [`try_max`].
pub fn max<T, F>(exec: Exec, items: &[T], f: F) -> Option<ArgMax>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    match try_max::<T, std::convert::Infallible, _>(exec, items, |t| Ok(f(t))) {
        Ok(m) => m,
        Err(never) => match never {},
    }
}

fn serial<T, E, L>(items: &[T], lift: L) -> Partial<E>
where
    L: Fn((usize, &T)) -> Partial<E>,
{
    items.iter().enumerate().map(lift).fold(None, combine)
}

#[cfg(feature = "parallel")]
fn parallel<T, E, L>(items: &[T], lift: L) -> Partial<E>
where
    T: Sync,
    E: Send,
    L: Fn((usize, &T)) -> Partial<E> + Sync + Send,
{
    use rayon::prelude::*;
    items
        .par_iter()
        .enumerate()
        .map(lift)
        .reduce(|| None, combine)
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, E, L>(items: &[T], lift: L) -> Partial<E>
where
    L: Fn((usize, &T)) -> Partial<E>,
{
    serial(items, lift)
}

/// Evaluates `f` on every item, preserving order.
pub fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Exec::Serial => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => items.iter().map(f).collect(),
    }
}
