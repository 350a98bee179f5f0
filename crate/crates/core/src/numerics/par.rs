//! Parallel maps that stop early on hard failures.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Maps `f` over `0..len` in parallel.
///
/// Errors for which `soft` holds are kept in place. After any other error at
/// index `i`, work above `i` is skipped and the first such error in index
/// order is returned, whatever the thread count.
pub fn par_map_until<T, F, S>(len: usize, soft: S, f: F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
    S: Fn(&Error) -> bool + Sync,
{
    let first_hard = AtomicUsize::new(usize::MAX);
    let out: Vec<Option<Result<T>>> = (0..len)
        .into_par_iter()
        .map(|i| {
            if i > first_hard.load(Ordering::Relaxed) {
                return None;
            }
            let r = f(i);
            if matches!(&r, Err(e) if !soft(e)) {
                first_hard.fetch_min(i, Ordering::Relaxed);
            }
            Some(r)
        })
        .collect();
    let stop = first_hard.into_inner();
    let mut done = Vec::with_capacity(len);
    for (i, r) in out.into_iter().enumerate() {
        let r = r.expect("indices below the first hard failure are computed");
        if i == stop {
            return Err(r.err().expect("hard failure recorded"));
        }
        done.push(r);
    }
    Ok(done)
}

/// [`par_map_until`] with every error hard.
pub fn par_try_map<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    par_map_until(len, |_| false, f)?.into_iter().collect()
}
