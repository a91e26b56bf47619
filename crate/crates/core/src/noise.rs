//! Biased IID single-qubit Pauli channels.
//!
//! A channel is a total error probability `p` together with a bias vector of
//! relative probabilities (r_x, r_y, r_z) summing to one. A qubit is left
//! alone with probability 1-p and hit by X, Y or Z with probabilities
//! p*r_x, p*r_y, p*r_z.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliOp};

const BIAS_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("bias eta must be nonnegative, got {0}")]
    NegativeEta(f64),
    #[error("invalid bias vector ({0}, {1}, {2}): components must be in [0, 1] and sum to 1")]
    InvalidBias(f64, f64, f64),
    #[error("error probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cannot parse bias {0:?}: expected AXIS:ETA, a bare eta, or rx,ry,rz")]
    ParseBias(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "X"),
            Axis::Y => write!(f, "Y"),
            Axis::Z => write!(f, "Z"),
        }
    }
}

impl FromStr for Axis {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(NoiseError::ParseBias(other.to_string())),
        }
    }
}

/// Relative error probabilities (r_x, r_y, r_z), summing to one.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasVector {
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BiasVector {
    pub fn new(r_x: f64, r_y: f64, r_z: f64) -> Result<Self, NoiseError> {
        let ok = |r: f64| (0.0..=1.0).contains(&r);
        if !(ok(r_x) && ok(r_y) && ok(r_z)) || (r_x + r_y + r_z - 1.0).abs() > BIAS_SUM_TOL {
            return Err(NoiseError::InvalidBias(r_x, r_y, r_z));
        }
        Ok(Self { r_x, r_y, r_z })
    }

    pub fn depolarizing() -> Self {
        Self { r_x: 1.0 / 3.0, r_y: 1.0 / 3.0, r_z: 1.0 / 3.0 }
    }

    /// The pure single-Pauli channel on `axis` (eta = infinity).
    pub fn pure(axis: Axis) -> Self {
        Self::from_eta(axis, f64::INFINITY).expect("infinite eta is valid")
    }

    /// The pure two-Pauli channel excluding `axis` (eta = 0).
    pub fn two_pauli(axis: Axis) -> Self {
        Self::from_eta(axis, 0.0).expect("zero eta is valid")
    }

    /// Bias from a single bias parameter eta = r_axis / (sum of the other
    /// two), with the two off-axis components equal. eta = 1/2 is
    /// depolarizing; eta = 0 and eta = +inf are handled exactly as the pure
    /// two-Pauli and one-Pauli channels.
    pub fn from_eta(axis: Axis, eta: f64) -> Result<Self, NoiseError> {
        if eta.is_nan() || eta < 0.0 {
            return Err(NoiseError::NegativeEta(eta));
        }
        let (on, off) = if eta.is_infinite() {
            (1.0, 0.0)
        } else {
            let s = 1.0 + eta;
            (eta / s, 0.5 / s)
        };
        Ok(match axis {
            Axis::X => Self { r_x: on, r_y: off, r_z: off },
            Axis::Y => Self { r_x: off, r_y: on, r_z: off },
            Axis::Z => Self { r_x: off, r_y: off, r_z: on },
        })
    }

    /// eta with respect to `axis`: r_axis / (sum of the other two).
    /// Infinite for a pure channel on that axis.
    pub fn eta(&self, axis: Axis) -> f64 {
        let (on, off) = match axis {
            Axis::X => (self.r_x, self.r_y + self.r_z),
            Axis::Y => (self.r_y, self.r_x + self.r_z),
            Axis::Z => (self.r_z, self.r_x + self.r_y),
        };
        if off == 0.0 {
            f64::INFINITY
        } else {
            on / off
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.r_x, self.r_y, self.r_z]
    }

    pub fn approx_eq(&self, other: &BiasVector, tol: f64) -> bool {
        (self.r_x - other.r_x).abs() <= tol
            && (self.r_y - other.r_y).abs() <= tol
            && (self.r_z - other.r_z).abs() <= tol
    }
}

impl fmt::Display for BiasVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r_x, self.r_y, self.r_z)
    }
}

/// A biased Pauli channel: total error probability plus bias.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub p: f64,
    pub bias: BiasVector,
}

impl ChannelSpec {
    pub fn new(p: f64, bias: BiasVector) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NoiseError::InvalidProbability(p));
        }
        Ok(Self { p, bias })
    }

    /// Per-qubit outcome probabilities in the order (I, X, Y, Z).
    pub fn single_qubit_prior(&self) -> [f64; 4] {
        [
            1.0 - self.p,
            self.p * self.bias.r_x,
            self.p * self.bias.r_y,
            self.p * self.bias.r_z,
        ]
    }

    /// Draw an n-qubit error with each qubit sampled independently from the
    /// single-qubit prior. Deterministic for a fixed generator state.
    pub fn sample_error<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliOp {
        let [pi, px, py, _] = self.single_qubit_prior();
        let c0 = pi;
        let c1 = pi + px;
        let c2 = pi + px + py;
        let mut e = PauliOp::identity(n);
        for q in 0..n {
            let u: f64 = rng.random();
            let p = if u < c0 {
                continue;
            } else if u < c1 {
                Pauli::X
            } else if u < c2 {
                Pauli::Y
            } else {
                Pauli::Z
            };
            e.set(q, p);
        }
        e
    }
}

/// The named bias points always included in surveys: three pure-Pauli
/// vertices, three two-Pauli edge midpoints, and the depolarizing center.
pub fn special_bias_points() -> Vec<BiasVector> {
    let mut pts: Vec<BiasVector> = Axis::ALL.iter().map(|&a| BiasVector::pure(a)).collect();
    pts.extend(Axis::ALL.iter().map(|&a| BiasVector::two_pauli(a)));
    pts.push(BiasVector::depolarizing());
    pts
}

/// All simplex points (i/m, j/m, k/m) with i+j+k = m, plus deduplicated
/// extras. Points are ordered with r_x descending, then r_y.
pub fn ternary_grid(resolution: usize, extras: &[BiasVector]) -> Vec<BiasVector> {
    assert!(resolution >= 1, "ternary grid resolution must be at least 1");
    let m = resolution;
    let mut grid = Vec::new();
    for i in (0..=m).rev() {
        for j in (0..=m - i).rev() {
            let k = m - i - j;
            grid.push(BiasVector {
                r_x: i as f64 / m as f64,
                r_y: j as f64 / m as f64,
                r_z: k as f64 / m as f64,
            });
        }
    }
    for extra in extras {
        if !grid.iter().any(|b| b.approx_eq(extra, BIAS_SUM_TOL)) {
            grid.push(*extra);
        }
    }
    grid
}

/// The eta values swept in the hashing-bound comparison, from pure two-Pauli
/// (eta = 0) to pure one-Pauli (eta = +inf).
pub fn eta_sweep_values() -> Vec<f64> {
    vec![
        0.0,
        1.0 / 1000.0,
        33.0 / 10000.0,
        99.0 / 10000.0,
        33.0 / 1000.0,
        1.0 / 10.0,
        1.0 / 3.0,
        1.0 / 2.0,
        1.0,
        3.0,
        10.0,
        30.0,
        100.0,
        300.0,
        1000.0,
        f64::INFINITY,
    ]
}

/// A bias given on the command line, keeping the eta/axis form when that is
/// how it was specified. Accepted forms: `Z:10`, `Z:1/3`, `Z:inf`, a bare
/// eta (Z axis), or an explicit `rx,ry,rz` triple.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BiasArg {
    pub bias: BiasVector,
    pub eta: Option<f64>,
    pub axis: Option<Axis>,
}

impl BiasArg {
    pub fn from_eta(axis: Axis, eta: f64) -> Result<Self, NoiseError> {
        Ok(Self { bias: BiasVector::from_eta(axis, eta)?, eta: Some(eta), axis: Some(axis) })
    }

    pub fn from_bias(bias: BiasVector) -> Self {
        Self { bias, eta: None, axis: None }
    }
}

/// Parse an eta value: a float, a rational like `33/10000`, or `inf`.
pub fn parse_eta(s: &str) -> Result<f64, NoiseError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| NoiseError::ParseBias(s.to_string()))?;
        let den: f64 = den.trim().parse().map_err(|_| NoiseError::ParseBias(s.to_string()))?;
        if den == 0.0 {
            return Err(NoiseError::ParseBias(s.to_string()));
        }
        return Ok(num / den);
    }
    s.parse().map_err(|_| NoiseError::ParseBias(s.to_string()))
}

impl FromStr for BiasArg {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((axis, eta)) = s.split_once(':') {
            let axis: Axis = axis.trim().parse()?;
            return BiasArg::from_eta(axis, parse_eta(eta)?);
        }
        if s.contains(',') {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 3 {
                return Err(NoiseError::ParseBias(s.to_string()));
            }
            let mut r = [0.0; 3];
            for (slot, part) in r.iter_mut().zip(&parts) {
                *slot = parse_eta(part)?;
            }
            return Ok(BiasArg::from_bias(BiasVector::new(r[0], r[1], r[2])?));
        }
        BiasArg::from_eta(Axis::Z, parse_eta(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eta_half_is_depolarizing() {
        let b = BiasVector::from_eta(Axis::Z, 0.5).unwrap();
        assert!(b.approx_eq(&BiasVector::depolarizing(), 1e-15));
    }

    #[test]
    fn eta_limits_are_exact() {
        let inf = BiasVector::from_eta(Axis::Z, f64::INFINITY).unwrap();
        assert_eq!(inf.components(), [0.0, 0.0, 1.0]);
        let zero = BiasVector::from_eta(Axis::Z, 0.0).unwrap();
        assert_eq!(zero.components(), [0.5, 0.5, 0.0]);
    }

    #[test]
    fn eta_ten() {
        let b = BiasVector::from_eta(Axis::Z, 10.0).unwrap();
        assert!((b.r_x - 1.0 / 22.0).abs() < 1e-15);
        assert!((b.r_y - 1.0 / 22.0).abs() < 1e-15);
        assert!((b.r_z - 10.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn eta_round_trip() {
        for &eta in &[0.0, 0.001, 0.0033, 1.0 / 3.0, 1.0, 30.0, 1000.0] {
            for &axis in &Axis::ALL {
                let b = BiasVector::from_eta(axis, eta).unwrap();
                assert!((b.eta(axis) - eta).abs() <= 1e-12, "axis {axis} eta {eta}");
            }
        }
    }

    #[test]
    fn axis_symmetry() {
        let x = BiasVector::from_eta(Axis::X, 7.0).unwrap();
        let z = BiasVector::from_eta(Axis::Z, 7.0).unwrap();
        assert_eq!(x.r_x, z.r_z);
        assert_eq!(x.r_y, z.r_x);
    }

    #[test]
    fn negative_eta_rejected() {
        assert!(BiasVector::from_eta(Axis::Z, -1.0).is_err());
    }

    #[test]
    fn priors() {
        let depol = BiasVector::depolarizing();
        let spec = ChannelSpec::new(0.0, depol).unwrap();
        assert_eq!(spec.single_qubit_prior(), [1.0, 0.0, 0.0, 0.0]);
        let spec = ChannelSpec::new(0.3, depol).unwrap();
        let prior = spec.single_qubit_prior();
        assert!((prior[0] - 0.7).abs() < 1e-15);
        for q in &prior[1..] {
            assert!((q - 0.1).abs() < 1e-15);
        }
        let spec = ChannelSpec::new(0.5, BiasVector::pure(Axis::Z)).unwrap();
        assert_eq!(spec.single_qubit_prior(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn sampling_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let silent = ChannelSpec::new(0.0, BiasVector::depolarizing()).unwrap();
        assert!(silent.sample_error(8, &mut rng).is_identity());
        let loud = ChannelSpec::new(1.0, BiasVector::pure(Axis::Z)).unwrap();
        let e = loud.sample_error(5, &mut rng);
        assert_eq!(e.weight(), 5);
        assert!(e.paulis().all(|p| p == Pauli::Z));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ChannelSpec::new(0.2, BiasVector::from_eta(Axis::Z, 3.0).unwrap()).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..32 {
            assert_eq!(spec.sample_error(17, &mut a), spec.sample_error(17, &mut b));
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(ternary_grid(1, &[]).len(), 3);
        assert_eq!(ternary_grid(2, &[]).len(), 6);
        assert_eq!(ternary_grid(4, &[]).len(), 15);
    }

    #[test]
    fn default_grid_contains_named_points() {
        let grid = ternary_grid(4, &special_bias_points());
        let quarter = BiasVector::new(0.25, 0.25, 0.5).unwrap();
        assert!(grid.iter().any(|b| b.approx_eq(&quarter, 1e-12)));
        assert!(grid.iter().any(|b| b.approx_eq(&BiasVector::depolarizing(), 1e-12)));
        // Extras already on the grid are not duplicated.
        let pure_count = grid
            .iter()
            .filter(|b| b.approx_eq(&BiasVector::pure(Axis::Z), 1e-12))
            .count();
        assert_eq!(pure_count, 1);
    }

    #[test]
    fn eta_list_matches_sweep() {
        let etas = eta_sweep_values();
        assert_eq!(etas.len(), 16);
        assert_eq!(etas[0], 0.0);
        assert_eq!(etas[6], 1.0 / 3.0);
        assert!(etas[15].is_infinite());
    }

    #[test]
    fn bias_arg_parsing() {
        let arg: BiasArg = "Z:10".parse().unwrap();
        assert_eq!(arg.axis, Some(Axis::Z));
        assert_eq!(arg.eta, Some(10.0));
        let arg: BiasArg = "inf".parse().unwrap();
        assert!(arg.eta.unwrap().is_infinite());
        assert_eq!(arg.bias.components(), [0.0, 0.0, 1.0]);
        let arg: BiasArg = "0.25,0.25,0.5".parse().unwrap();
        assert_eq!(arg.bias.components(), [0.25, 0.25, 0.5]);
        let arg: BiasArg = "X:33/10000".parse().unwrap();
        assert!((arg.eta.unwrap() - 0.0033).abs() < 1e-18);
        let arg: BiasArg = "1/3,1/3,1/3".parse().unwrap();
        assert!(arg.bias.approx_eq(&BiasVector::depolarizing(), 1e-15));
        assert!("W:3".parse::<BiasArg>().is_err());
        assert!("0.5,0.5".parse::<BiasArg>().is_err());
        assert!("0.9,0.9,0.9".parse::<BiasArg>().is_err());
    }
}
