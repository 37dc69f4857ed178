//! Small numerical helpers shared across modules.

/// Sum with a fixed pairwise tree. The result only depends on the slice
/// contents and order, never on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Evaluate `sum_k coeffs[k] T_k(x)` by Clenshaw's recurrence.
pub fn chebyshev_eval(coeffs: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => x * b1 - b2 + c0,
        None => 0.0,
    }
}

/// Chebyshev polynomials T_0(x), ..., T_{count-1}(x).
pub fn chebyshev_row(x: f64, count: usize, out: &mut [f64]) {
    debug_assert!(out.len() >= count);
    if count == 0 {
        return;
    }
    out[0] = 1.0;
    if count == 1 {
        return;
    }
    out[1] = x;
    for k in 2..count {
        out[k] = 2.0 * x * out[k - 1] - out[k - 2];
    }
}

/// Ordinary least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
