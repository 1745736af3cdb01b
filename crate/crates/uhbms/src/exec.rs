//! Execution policy for the data-parallel kernels.
//!
//! Reductions are tiled: every tile is summed sequentially and the tile sums
//! are folded in index order, so both policies give bit-identical results.

/// How a kernel distributes its work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


const TILE: usize = 1024;

/// Sum `f(i)` over `0..n` with a deterministic tiled reduction.
pub fn sum_indexed<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let tiles = n.div_ceil(TILE);
    let tile_sum = |t: usize| {
        let end = ((t + 1) * TILE).min(n);
        (t * TILE..end).map(&f).sum::<f64>()
    };
    let partial: Vec<f64> = map_indexed(exec, tiles, tile_sum);
    partial.iter().sum()
}

/// Evaluate `f(i)` for `i` in `0..n`, preserving order.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Exec::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Run `f(chunk_index, chunk)` over consecutive mutable chunks of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(chunk > 0, "chunk size must be positive");
    match exec {
        Exec::Sequential => data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = sum_indexed(Exec::Sequential, 100_003, f);
        let b = sum_indexed(Exec::default(), 100_003, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn empty_range_sums_to_zero() {
        assert_eq!(sum_indexed(Exec::Sequential, 0, |_| 1.0), 0.0);
    }

    #[test]
    fn chunks_cover_everything() {
        let mut v = vec![0usize; 1000];
        for_each_chunk_mut(Exec::default(), &mut v, 64, |ci, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x = ci * 64 + j;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| i == x));
    }
}
