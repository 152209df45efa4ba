//! Confluent divided differences of the exponential function.
//!
//! The naive recursive table loses all precision when nodes cluster: the
//! numerator difference cancels while the denominator goes to zero. The
//! standard fix, used here, is a hybrid: any table entry whose node span is
//! below [`CLUSTER_DIAMETER`] is evaluated by a truncated series in the
//! complete homogeneous symmetric polynomials of the (re-centered) nodes,
//! and only well-separated entries use the recurrence, whose denominator is
//! then bounded below. For exponentials with sorted real nodes the
//! recurrence subtracts a strictly smaller positive value from a larger one,
//! so no further cancellation occurs.

use super::EvalError;

/// Entries spanning less than this go through the series expansion.
const CLUSTER_DIAMETER: f64 = 0.5;
/// Series order: with nodes re-centered so |w| <= 0.25, term m is bounded by
/// 0.25^m / m! relative to the leading term, which is below 1e-17 from
/// m = 13 on.
const SERIES_ORDER: usize = 14;

/// The divided difference exp[y_0, ..., y_k]. Repeated nodes are allowed and
/// take their confluent meaning (derivative limits). Always positive.
///
/// The largest node is factored out first, so precision is uniform in the
/// node location; the result itself may overflow to infinity once
/// `max(ys)` exceeds roughly 709 (the caller sees the mathematically
/// correct magnitude either way).
pub fn divided_diff_exp(ys: &[f64]) -> Result<f64, EvalError> {
    if ys.is_empty() || ys.iter().any(|y| !y.is_finite()) {
        return Err(EvalError::NonFiniteInput);
    }
    let y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = ys.iter().map(|y| y - y_max).collect();
    Ok(y_max.exp() * dd_exp_shifted(&shifted))
}

/// Divided difference of exp over nodes with max(zs) == 0 (or at least
/// bounded above by a small constant, so that no intermediate overflows).
/// This is the kernel the evaluator calls after its own log-space shift.
pub(crate) fn dd_exp_shifted(zs: &[f64]) -> f64 {
    debug_assert!(zs.iter().all(|z| *z <= 1e-9), "nodes not shifted below 0");
    let k = zs.len() - 1;
    if k == 0 {
        return zs[0].exp();
    }
    let mut sorted = zs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    if sorted[k] - sorted[0] < CLUSTER_DIAMETER {
        return series_cluster(&sorted);
    }
    // Column-by-column table over sorted nodes; entry (i, j) spans
    // sorted[i..=i+j].
    let mut prev: Vec<f64> = sorted.iter().map(|z| z.exp()).collect();
    for j in 1..=k {
        let mut cur = Vec::with_capacity(k + 1 - j);
        for i in 0..=(k - j) {
            let span = sorted[i + j] - sorted[i];
            if span < CLUSTER_DIAMETER {
                cur.push(series_cluster(&sorted[i..=i + j]));
            } else {
                cur.push((prev[i + 1] - prev[i]) / span);
            }
        }
        prev = cur;
    }
    prev[0]
}

/// Series evaluation for a cluster of nodes with small diameter:
/// exp[w_0..w_k] = sum_m h_m(w) / (k + m)! where h_m is the complete
/// homogeneous symmetric polynomial of degree m. Nodes are re-centered at
/// the cluster midpoint so |w| <= diameter / 2 and the series converges to
/// machine precision within [`SERIES_ORDER`] terms.
fn series_cluster(nodes: &[f64]) -> f64 {
    let k = nodes.len() - 1;
    let mid = 0.5 * (nodes[0] + nodes[k]);
    // h_m via the prefix recurrence h_m(w_0..w_i) = h_m(..w_{i-1}) + w_i h_{m-1}(..w_i).
    let mut h = [0.0f64; SERIES_ORDER + 1];
    h[0] = 1.0;
    for z in nodes {
        let w = z - mid;
        for m in 1..=SERIES_ORDER {
            h[m] += w * h[m - 1];
        }
    }
    let mut sum = 0.0;
    let mut denom = factorial_f64(k);
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            denom *= (k + m) as f64;
        }
        sum += hm / denom;
    }
    mid.exp() * sum
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
