//! Monte Carlo logical error rates, threshold extraction from layer-crossing
//! curves, and bias sweeps.
//!
//! Shots are parallelized over a worker pool; every shot derives its own RNG
//! stream from (seed, shot index), so results are byte-identical for any
//! thread count. Sweep runs append one JSON record per completed data point
//! and can resume by reusing matching records.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{decode_oracle, DecodeError, Decoder};
use crate::hashing;
use crate::noise::{Axis, BiasVector, ChannelSpec};

/// Cap on the syndrome-space exponent for [`exact_failure_probability`].
pub const EXACT_FAILURE_CAP: usize = 20;

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("threshold estimation needs at least two layer curves")]
    TooFewCurves,
    #[error("layer curves share no overlapping grid points")]
    NoOverlap,
    #[error("exact failure enumeration refused: 2^{0} syndromes (cap 2^{EXACT_FAILURE_CAP})")]
    TooLarge(usize),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("records file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("records file malformed: {0}")]
    Json(#[from] serde_json::Error),
}

/// One completed Monte Carlo data point. `wall_ms` is diagnostic only and
/// carries no reproducibility guarantee; everything else is a pure function
/// of (code, layers, bias, p, shots, seed).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: u32,
    pub code: String,
    pub layers: u32,
    pub bias: BiasVector,
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub seed: u64,
    pub wall_ms: u64,
}

pub const RECORD_SCHEMA: u32 = 1;

/// Monte Carlo estimate with a Wilson 95% interval.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub ci95: (f64, f64),
    pub failures: u64,
    pub shots: u64,
}

impl RateEstimate {
    pub fn from_counts(failures: u64, shots: u64) -> Self {
        let rate = failures as f64 / shots as f64;
        Self { rate, ci95: wilson_interval(failures, shots), failures, shots }
    }

    /// One-sigma width implied by the Wilson interval.
    pub fn sigma(&self) -> f64 {
        (self.ci95.1 - self.ci95.0) / (2.0 * Z95)
    }
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Derive a child seed from a master seed and an index path (splitmix64).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
    let mut s = splitmix64(master);
    for &v in path {
        s = splitmix64(s ^ v.wrapping_mul(0xD6E8FEB86659FD93));
    }
    s
}

/// Monte Carlo logical error rate: sample, decode, count misidentified
/// logical classes. Shot i draws from ChaCha stream i of `seed`, so the
/// result does not depend on the worker count.
pub fn logical_error_rate(
    decoder: &Decoder,
    spec: &ChannelSpec,
    shots: u64,
    seed: u64,
) -> RateEstimate {
    assert!(shots >= 1, "at least one shot required");
    let n = decoder.code().n();
    let failures: u64 = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let e = spec.sample_error(n, &mut rng);
            u64::from(!decoder.shot_succeeds(&e, spec))
        })
        .sum();
    RateEstimate::from_counts(failures, shots)
}

/// Deterministic failure probability of the maximum-likelihood decoder,
/// summing the non-chosen coset mass over every syndrome by oracle
/// enumeration. Refuses codes with more than [`EXACT_FAILURE_CAP`]
/// stabilizers.
pub fn exact_failure_probability(
    code: &crate::pauli::StabilizerCode,
    spec: &ChannelSpec,
) -> Result<f64, ThresholdError> {
    let m = code.stabilizers().len();
    if m > EXACT_FAILURE_CAP {
        return Err(ThresholdError::TooLarge(m));
    }
    let mut failure = 0.0;
    for pattern in 0..1u64 << m {
        let syndrome: Vec<bool> = (0..m).map(|i| pattern >> i & 1 == 1).collect();
        let dist = decode_oracle(code, &syndrome, spec)?;
        if dist.log_total_mass.is_finite() {
            let total = dist.log_total_mass.exp();
            failure += total * (1.0 - dist.weights[dist.chosen as usize]);
        }
    }
    Ok(failure)
}

/// A logical-error-rate curve for one layer count.
#[derive(Clone, Debug)]
pub struct LayerCurve {
    pub layers: u32,
    /// (p, rate, one-sigma error) triples on an ascending grid.
    pub points: Vec<(f64, f64, f64)>,
}

/// A located threshold crossing.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdEstimate {
    pub p_th: f64,
    pub sigma: f64,
    /// The pairwise layer crossings averaged into `p_th`.
    pub crossings: Vec<f64>,
}

/// Crossing search outcome; curves that never cross are a recordable result,
/// not an error.
#[derive(Clone, Debug, Serialize)]
pub enum ThresholdOutcome {
    Crossing(ThresholdEstimate),
    NoCrossing,
}

/// Locate the threshold from per-layer curves: for each consecutive layer
/// pair, linearly interpolate the first sign change of rate_L - rate_L',
/// then average the crossings. `sigma` combines the spread of the crossings
/// with the propagated binomial errors.
pub fn estimate_threshold(curves: &[LayerCurve]) -> Result<ThresholdOutcome, ThresholdError> {
    if curves.len() < 2 {
        return Err(ThresholdError::TooFewCurves);
    }
    let mut sorted: Vec<&LayerCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.layers);
    let mut crossings = Vec::new();
    let mut propagated = Vec::new();
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let common: Vec<((f64, f64, f64), (f64, f64, f64))> = a
            .points
            .iter()
            .filter_map(|&pa| {
                b.points
                    .iter()
                    .find(|&&pb| (pb.0 - pa.0).abs() < 1e-12)
                    .map(|&pb| (pa, pb))
            })
            .collect();
        if common.is_empty() {
            return Err(ThresholdError::NoOverlap);
        }
        for w in common.windows(2) {
            let ((p1, ra1, sa1), (_, rb1, sb1)) = w[0];
            let ((p2, ra2, sa2), (_, rb2, sb2)) = w[1];
            let d1 = ra1 - rb1;
            let d2 = ra2 - rb2;
            // Below threshold more layers decode better (d > 0); the
            // crossing is the first transition to d < 0.
            if d1 >= 0.0 && d2 < 0.0 {
                let cross = if d1 == d2 { p1 } else { p1 + d1 / (d1 - d2) * (p2 - p1) };
                let slope = (d2 - d1) / (p2 - p1);
                let sd1 = (sa1 * sa1 + sb1 * sb1).sqrt();
                let sd2 = (sa2 * sa2 + sb2 * sb2).sqrt();
                let sigma_d = 0.5 * (sd1 + sd2);
                let sigma_cross = if slope == 0.0 {
                    0.5 * (p2 - p1)
                } else {
                    (sigma_d / slope.abs()).min(p2 - p1)
                };
                crossings.push(cross);
                propagated.push(sigma_cross.max(f64::MIN_POSITIVE));
                break;
            }
        }
    }
    if crossings.is_empty() {
        return Ok(ThresholdOutcome::NoCrossing);
    }
    let m = crossings.len() as f64;
    let p_th = crossings.iter().sum::<f64>() / m;
    let spread2 = crossings.iter().map(|c| (c - p_th) * (c - p_th)).sum::<f64>() / m;
    let prop = propagated.iter().sum::<f64>() / m;
    let sigma = (spread2 + prop * prop).sqrt().max(f64::MIN_POSITIVE);
    Ok(ThresholdOutcome::Crossing(ThresholdEstimate { p_th, sigma, crossings }))
}

/// How a sweep chooses its p grid per bias point.
#[derive(Clone, Debug)]
pub enum GridPolicy {
    /// A fixed grid used for every bias.
    Explicit(Vec<f64>),
    /// Center the grid on the zero-rate hashing point of each bias:
    /// `points_each_side` steps of `step` on both sides.
    HashingCentered { points_each_side: usize, step: f64 },
}

/// Build an ascending grid of probabilities in micro-unit precision so the
/// values print cleanly and reproduce exactly.
pub fn decimal_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let to_u = |x: f64| (x * 1e6).round() as i64;
    let (start_u, stop_u, step_u) = (to_u(start), to_u(stop), to_u(step));
    assert!(step_u > 0, "grid step must be positive");
    let mut grid = Vec::new();
    let mut p = start_u;
    while p <= stop_u {
        grid.push(p as f64 / 1e6);
        p += step_u;
    }
    grid
}

impl GridPolicy {
    pub fn grid_for(&self, bias: &BiasVector) -> Vec<f64> {
        match self {
            GridPolicy::Explicit(grid) => grid.clone(),
            GridPolicy::HashingCentered { points_each_side, step } => {
                let center = hashing::zero_rate_point(bias);
                let to_u = |x: f64| (x * 1e6).round() as i64;
                let (center_u, step_u) = (to_u(center), to_u(*step));
                (-(*points_each_side as i64)..=*points_each_side as i64)
                    .map(|j| (center_u + j * step_u) as f64 / 1e6)
                    .filter(|&p| p > 0.0 && p < 1.0)
                    .collect()
            }
        }
    }
}

/// One bias point of a sweep, with eta metadata when it came from an eta
/// parametrization.
#[derive(Clone, Copy, Debug)]
pub struct BiasPoint {
    pub bias: BiasVector,
    pub eta: Option<f64>,
    pub axis: Option<Axis>,
}

/// Result row of a sweep: the located threshold (if any) and the analytic
/// hashing point for the same bias.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub code: String,
    pub layers: Vec<u32>,
    pub bias: BiasVector,
    pub eta: Option<f64>,
    pub axis: Option<Axis>,
    pub outcome: ThresholdOutcome,
    pub hashing_p_star: f64,
}

/// Append-only JSONL store of run records, keyed for resumption.
pub struct RecordStore {
    file: Option<File>,
    existing: HashMap<RecordKey, u64>,
}

#[derive(Hash, PartialEq, Eq)]
struct RecordKey {
    code: String,
    layers: u32,
    bias_bits: [u64; 3],
    p_bits: u64,
    shots: u64,
    seed: u64,
}

impl RecordKey {
    fn of(r: &RunRecord) -> Self {
        Self {
            code: r.code.clone(),
            layers: r.layers,
            bias_bits: [r.bias.r_x.to_bits(), r.bias.r_y.to_bits(), r.bias.r_z.to_bits()],
            p_bits: r.p.to_bits(),
            shots: r.shots,
            seed: r.seed,
        }
    }
}

impl RecordStore {
    /// In-memory store that persists nothing.
    pub fn ephemeral() -> Self {
        Self { file: None, existing: HashMap::new() }
    }

    /// Open (or create) a JSONL record file and index its completed points.
    pub fn open(path: &Path) -> Result<Self, ThresholdError> {
        let mut existing = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: RunRecord = serde_json::from_str(&line)?;
                existing.insert(RecordKey::of(&record), record.failures);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file: Some(file), existing })
    }

    /// Fetch a completed point or run `compute`, persisting the new record.
    fn failures_or_run(
        &mut self,
        template: RunRecord,
        compute: impl FnOnce() -> u64,
    ) -> Result<u64, ThresholdError> {
        let key = RecordKey::of(&template);
        if let Some(&failures) = self.existing.get(&key) {
            return Ok(failures);
        }
        let start = Instant::now();
        let failures = compute();
        let record = RunRecord {
            failures,
            wall_ms: start.elapsed().as_millis() as u64,
            ..template
        };
        if let Some(file) = &mut self.file {
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        self.existing.insert(key, failures);
        Ok(failures)
    }
}

/// Run the full threshold pipeline for one bias: per-layer curves on the
/// grid, then crossing extraction. Point seeds derive from
/// (master_seed, bias_index, layer, p_index).
#[allow(clippy::too_many_arguments)]
pub fn threshold_for_bias(
    code_id: &str,
    decoders: &[(u32, Decoder)],
    bias: &BiasVector,
    grid: &[f64],
    shots: u64,
    master_seed: u64,
    bias_index: u64,
    store: &mut RecordStore,
) -> Result<ThresholdOutcome, ThresholdError> {
    let mut curves = Vec::new();
    for &(layers, ref decoder) in decoders {
        let mut points = Vec::new();
        for (p_idx, &p) in grid.iter().enumerate() {
            let spec = ChannelSpec::new(p, *bias).expect("grid probabilities are valid");
            let seed = derive_seed(master_seed, &[bias_index, u64::from(layers), p_idx as u64]);
            let template = RunRecord {
                schema: RECORD_SCHEMA,
                code: code_id.to_string(),
                layers,
                bias: *bias,
                p,
                shots,
                failures: 0,
                seed,
                wall_ms: 0,
            };
            let failures =
                store.failures_or_run(template, || {
                    logical_error_rate(decoder, &spec, shots, seed).failures
                })?;
            let est = RateEstimate::from_counts(failures, shots);
            points.push((p, est.rate, est.sigma()));
        }
        curves.push(LayerCurve { layers, points });
    }
    estimate_threshold(&curves)
}

/// Sweep a list of bias points: estimate the threshold at each and pair it
/// with the analytic hashing point. Per-bias failures become `NoCrossing`
/// rows; the sweep continues.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    code_id: &str,
    decoders: &[(u32, Decoder)],
    points: &[BiasPoint],
    policy: &GridPolicy,
    shots: u64,
    master_seed: u64,
    store: &mut RecordStore,
) -> Result<Vec<SweepRow>, ThresholdError> {
    let layers: Vec<u32> = decoders.iter().map(|&(l, _)| l).collect();
    let mut rows = Vec::new();
    for (bias_index, point) in points.iter().enumerate() {
        let grid = policy.grid_for(&point.bias);
        let outcome = threshold_for_bias(
            code_id,
            decoders,
            &point.bias,
            &grid,
            shots,
            master_seed,
            bias_index as u64,
            store,
        )?;
        rows.push(SweepRow {
            code: code_id.to_string(),
            layers: layers.clone(),
            bias: point.bias,
            eta: point.eta,
            axis: point.axis,
            outcome,
            hashing_p_star: hashing::zero_rate_point(&point.bias),
        });
    }
    Ok(rows)
}

/// Render sweep rows as the plot-ready CSV. Missing crossings leave p_th and
/// sigma empty; eta falls back to the Z-axis ratio of the bias.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("code,layers_used,r_x,r_y,r_z,eta,axis,p_th,sigma,hashing_p_star\n");
    for row in rows {
        let layers = row
            .layers
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let eta = row.eta.unwrap_or_else(|| row.bias.eta(Axis::Z));
        let eta_str = if eta.is_infinite() { "inf".to_string() } else { format!("{eta}") };
        let axis = row.axis.map_or("-".to_string(), |a| a.to_string());
        let (p_th, sigma) = match &row.outcome {
            ThresholdOutcome::Crossing(est) => (format!("{}", est.p_th), format!("{}", est.sigma)),
            ThresholdOutcome::NoCrossing => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.code,
            layers,
            row.bias.r_x,
            row.bias.r_y,
            row.bias.r_z,
            eta_str,
            axis,
            p_th,
            sigma,
            row.hashing_p_star
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DEFAULT_FRONTIER_CAP;
    use crate::lego::{build_code, inflate, seed_library, InflationRule};
    use crate::noise::BiasVector;

    fn happy_decoder() -> Decoder {
        let lib = seed_library();
        let tiling = inflate(&lib["happy"], 0, &InflationRule::default()).unwrap();
        let hcode = build_code(&tiling, &lib).unwrap();
        Decoder::new(&hcode, &lib, DEFAULT_FRONTIER_CAP).unwrap()
    }

    #[test]
    fn rate_zero_at_p_zero() {
        let dec = happy_decoder();
        let spec = ChannelSpec::new(0.0, BiasVector::depolarizing()).unwrap();
        let est = logical_error_rate(&dec, &spec, 64, 11);
        assert_eq!(est.failures, 0);
        assert_eq!(est.rate, 0.0);
    }

    #[test]
    fn exact_failure_limits() {
        let dec = happy_decoder();
        let silent = ChannelSpec::new(0.0, BiasVector::depolarizing()).unwrap();
        assert_eq!(exact_failure_probability(dec.code(), &silent).unwrap(), 0.0);
        // Pure-Z noise at p = 1 always produces the full Z string, whose
        // class the decoder identifies exactly.
        let loud = ChannelSpec::new(1.0, BiasVector::pure(Axis::Z)).unwrap();
        let fail = exact_failure_probability(dec.code(), &loud).unwrap();
        assert!(fail.abs() < 1e-12, "failure probability {fail}");
    }

    #[test]
    fn monte_carlo_matches_exact_on_seed() {
        let dec = happy_decoder();
        let spec = ChannelSpec::new(0.05, BiasVector::depolarizing()).unwrap();
        let exact = exact_failure_probability(dec.code(), &spec).unwrap();
        let est = logical_error_rate(&dec, &spec, 4000, 1234);
        let sigma = est.sigma().max(1e-4);
        assert!(
            (est.rate - exact).abs() < 4.0 * sigma,
            "MC rate {} vs exact {exact}",
            est.rate
        );
    }

    #[test]
    fn rate_is_thread_count_independent() {
        let dec = happy_decoder();
        let spec = ChannelSpec::new(0.1, BiasVector::depolarizing()).unwrap();
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| logical_error_rate(&dec, &spec, 500, 99));
        let b = pool4.install(|| logical_error_rate(&dec, &spec, 500, 99));
        assert_eq!(a.failures, b.failures);
    }

    #[test]
    fn synthetic_crossing_recovered_exactly() {
        // rate_L(p) = a_L (p - 0.2) + 0.1 with steeper slope for larger L.
        let grid: Vec<f64> = decimal_grid(0.1, 0.3, 0.02);
        let mk = |a: f64, layers: u32| LayerCurve {
            layers,
            points: grid.iter().map(|&p| (p, a * (p - 0.2) + 0.1, 1e-3)).collect(),
        };
        let curves = vec![mk(0.5, 1), mk(1.0, 2), mk(2.0, 3)];
        match estimate_threshold(&curves).unwrap() {
            ThresholdOutcome::Crossing(est) => {
                assert!((est.p_th - 0.2).abs() < 1e-12, "p_th {}", est.p_th);
                assert_eq!(est.crossings.len(), 2);
                assert!(est.sigma > 0.0);
            }
            ThresholdOutcome::NoCrossing => panic!("crossing expected"),
        }
    }

    #[test]
    fn parallel_curves_never_cross() {
        let grid: Vec<f64> = decimal_grid(0.1, 0.3, 0.05);
        let mk = |off: f64, layers: u32| LayerCurve {
            layers,
            points: grid.iter().map(|&p| (p, off + p, 1e-3)).collect(),
        };
        let curves = vec![mk(0.0, 1), mk(0.1, 2)];
        assert!(matches!(
            estimate_threshold(&curves).unwrap(),
            ThresholdOutcome::NoCrossing
        ));
    }

    #[test]
    fn single_curve_is_an_error() {
        let curves = vec![LayerCurve { layers: 1, points: vec![(0.1, 0.2, 0.01)] }];
        assert!(matches!(
            estimate_threshold(&curves),
            Err(ThresholdError::TooFewCurves)
        ));
    }

    #[test]
    fn decimal_grids_are_clean() {
        let grid = decimal_grid(0.14, 0.22, 0.01);
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[0], 0.14);
        assert_eq!(grid[3], 0.17);
        assert_eq!(grid[8], 0.22);
    }

    #[test]
    fn derive_seed_is_stable_and_path_sensitive() {
        let a = derive_seed(7, &[1, 2, 3]);
        assert_eq!(a, derive_seed(7, &[1, 2, 3]));
        assert_ne!(a, derive_seed(7, &[1, 3, 2]));
        assert_ne!(a, derive_seed(8, &[1, 2, 3]));
    }
}
