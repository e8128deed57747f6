use statrs::function::factorial::ln_binomial;

/// Smallest `u` with `P(X > u) <= alpha` for `X ~ Binomial(trials, p)`.
///
/// Equivalently the smallest `u` whose CDF reaches `1 - alpha`. The upper
/// tail is summed from the top in log space to avoid cancellation.
pub fn upper_quantile(trials: u64, p: f64, alpha: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let pmf = |k: u64| (ln_binomial(trials, k) + k as f64 * lp + (trials - k) as f64 * lq).exp();
    // tail = P(X > u)
    let mut tail = 0.0;
    let mut u = trials;
    while u > 0 {
        let next = tail + pmf(u);
        if next > alpha {
            break;
        }
        tail = next;
        u -= 1;
    }
    u
}
