//! Small numerical helpers shared by the channel modules.

/// Pairwise (cascade) summation with a fixed split tree, so the result
/// depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(i)` over `0..n` without materializing the terms.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: &F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= 32 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, f)
}

/// Like [`pairwise_sum_by`], but leaves of `2^12` terms are evaluated in
/// parallel. The split tree is fixed, so the value does not depend on the
/// number of worker threads.
pub fn par_pairwise_sum_by<F: Fn(usize) -> f64 + Sync>(n: usize, f: &F) -> f64 {
    const CHUNK: usize = 1 << 12;
    if n <= CHUNK {
        return pairwise_sum_by(n, f);
    }
    let chunks = n.div_ceil(CHUNK);
    let partial = par_map(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        pairwise_sum_by(hi - lo, &|j| f(lo + j))
    });
    pairwise_sum(&partial)
}

/// Evaluates `f` over `0..n`, in parallel when the `parallel` feature is on.
pub fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. The endpoints are always evaluated as well, so a
/// maximum sitting on the boundary is found exactly.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// `x log2 x` with the convention `0 log 0 = 0`.
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// In-place unnormalized fast Walsh–Hadamard transform; `data.len()` must be
/// a power of two.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        fwht_stage(data, h);
        h <<= 1;
    }
}

fn fwht_stage(data: &mut [f64], h: usize) {
    let butterfly = |block: &mut [f64]| {
        let (lo, hi) = block.split_at_mut(h);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = a + b;
            *y = a - b;
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if data.len() >= 1 << 16 {
            data.par_chunks_mut(2 * h).for_each(butterfly);
            return;
        }
    }
    data.chunks_mut(2 * h).for_each(butterfly);
}
