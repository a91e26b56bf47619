//! The analytic zero-rate hashing bound for biased Pauli channels.
//!
//! A random stabilizer code achieves rate R = 1 - H over the four-outcome
//! distribution (1-p, p*r_x, p*r_y, p*r_z); the physical error probability
//! where R crosses zero benchmarks code-capacity thresholds.
//!
//! The entropy here includes the identity outcome. The three-outcome form
//! cannot reproduce the standard depolarizing crossing near 18.93%, which
//! pins the four-outcome convention.

use crate::noise::{BiasVector, ChannelSpec};

const BISECTION_TOL: f64 = 1e-12;

fn xlog2x(q: f64) -> f64 {
    if q <= 0.0 {
        0.0
    } else {
        q * q.log2()
    }
}

/// Shannon entropy in bits of the four-outcome channel distribution.
pub fn channel_entropy(spec: &ChannelSpec) -> f64 {
    -spec.single_qubit_prior().iter().map(|&q| xlog2x(q)).sum::<f64>()
}

/// Entropy of the bias vector alone, -sum(r log2 r).
pub fn bias_entropy(bias: &BiasVector) -> f64 {
    -bias.components().iter().map(|&r| xlog2x(r)).sum::<f64>()
}

/// Achievable random-coding rate R = 1 - H; negative past the bound.
pub fn hashing_rate(spec: &ChannelSpec) -> f64 {
    1.0 - channel_entropy(spec)
}

/// The p maximizing the channel entropy for a fixed bias. Writing
/// H(p) = h2(p) + p * H(bias), the derivative vanishes at
/// (1-p)/p = 2^(-H(bias)).
pub fn entropy_peak(bias: &BiasVector) -> f64 {
    let hr = bias_entropy(bias);
    1.0 / (1.0 + (-hr).exp2())
}

/// The zero-rate hashing point: the smallest p with hashing_rate = 0, found
/// by bisection on the rising branch of H(p). For a pure one-Pauli channel
/// this is exactly 1/2 (the root sits at the entropy peak).
pub fn zero_rate_point(bias: &BiasVector) -> f64 {
    let peak = entropy_peak(bias);
    let entropy_at = |p: f64| channel_entropy(&ChannelSpec { p, bias: *bias });
    let mut lo = 0.0;
    let mut hi = peak;
    debug_assert!(entropy_at(hi) >= 1.0 - 1e-12, "entropy peak below 1 bit");
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if entropy_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
