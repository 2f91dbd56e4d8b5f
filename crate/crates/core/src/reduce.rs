//! Chunked sums over quadrature nodes.
//!
//! Work is split into fixed-size chunks whose partial results are merged in
//! chunk order, so the floating-point result does not depend on the thread
//! count or on whether the `parallel` feature is enabled.

const CHUNK: usize = 16;

pub(crate) fn ordered_fold<T, Z, F, M>(count: usize, zero: Z, body: F, mut merge: M) -> T
where
    T: Send,
    Z: Fn() -> T + Sync,
    F: Fn(usize, &mut T) + Sync,
    M: FnMut(&mut T, T),
{
    let chunks = count.div_ceil(CHUNK);
    let run = |c: usize| {
        let mut acc = zero();
        for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
            body(i, &mut acc);
        }
        acc
    };

    #[cfg(feature = "parallel")]
    let partials: Vec<T> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<T> = (0..chunks).map(run).collect();

    let mut total = zero();
    for p in partials {
        merge(&mut total, p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_sum() {
        let got = ordered_fold(1000, || 0.0_f64, |i, acc| *acc += (i as f64).sqrt(), |a, b| *a += b);
        let want: f64 = (0..1000).map(|i| (i as f64).sqrt()).sum();
        assert!((got - want).abs() < 1e-9);
        let again = ordered_fold(1000, || 0.0_f64, |i, acc| *acc += (i as f64).sqrt(), |a, b| *a += b);
        assert_eq!(got.to_bits(), again.to_bits());
    }

    #[test]
    fn empty_range() {
        assert_eq!(ordered_fold(0, || 1.5_f64, |_, _| {}, |a, b| *a += b), 1.5);
    }
}
