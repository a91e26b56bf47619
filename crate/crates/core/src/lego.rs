//! Holographic code construction from seed tensors on hyperbolic tilings.
//!
//! A seed tensor is a q-leg stabilizer state whose generator rows carry the
//! stabilizers of a \[\[q-1, 1\]\] code on the first q-1 legs and the logical
//! action on the last leg. Copies of the seed are laid out on a layered
//! hyperbolic tiling and contracted pairwise; the surviving group on the
//! uncontracted legs, split on the central logical leg, is the boundary code.
//!
//! Leg identification uses the Bell state stabilized by XX and ZZ, so two
//! contracted legs must carry equal phaseless Paulis.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{self, Pauli, PauliOp, StabilizerCode};
use crate::pauli::PauliError;

pub type LegId = u32;

#[derive(Debug, Error)]
pub enum LegoError {
    #[error("unknown seed {0:?} (available: happy, steane, 613, scf)")]
    UnknownSeed(String),
    #[error("invalid seed tensor {name}: {reason}")]
    InvalidSeed { name: String, reason: String },
    #[error("inflation refused at layer {layer}: {needed} legs would exceed the budget of {budget} (raise the budget to proceed)")]
    BudgetExceeded { layer: u32, needed: usize, budget: usize },
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("contraction produced no {0} logical representative: rank defect, the tiling does not define a k = 1 code")]
    RankDefect(&'static str),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("code file I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("code file is malformed: {0}")]
    Json(#[from] serde_json::Error),
}

/// A q-leg seed tensor: the stabilizer state whose rows are the Appendix-table
/// generators, with the logical ("bar") entry as the last leg.
#[derive(Clone, Debug)]
pub struct SeedTensor {
    name: String,
    q: usize,
    generators: Vec<PauliOp>,
    code: StabilizerCode,
}

impl SeedTensor {
    /// Build a seed from (planar row, bar entry) pairs. The generator set
    /// must be abelian and of full rank q, i.e. a valid \[\[q, 0\]\] state.
    pub fn new(name: &str, rows: &[(&str, char)]) -> Result<Self, LegoError> {
        let invalid = |reason: String| LegoError::InvalidSeed { name: name.into(), reason };
        let planar_len = rows.first().map_or(0, |(s, _)| s.len());
        let q = planar_len + 1;
        let mut generators = Vec::with_capacity(rows.len());
        let mut stabilizers = Vec::new();
        let mut logical_x = Vec::new();
        let mut logical_z = Vec::new();
        for &(planar, bar) in rows {
            if planar.len() != planar_len {
                return Err(invalid("rows have mixed leg counts".into()));
            }
            let planar_op: PauliOp = planar.parse()?;
            let bar = Pauli::from_char(bar)?;
            let mut gen = PauliOp::identity(q);
            for (i, p) in planar_op.paulis().enumerate() {
                gen.set(i, p);
            }
            gen.set(q - 1, bar);
            generators.push(gen);
            match bar {
                Pauli::I => stabilizers.push(planar_op),
                Pauli::X => logical_x.push(planar_op),
                Pauli::Z => logical_z.push(planar_op),
                Pauli::Y => return Err(invalid("bar entry Y is not supported".into())),
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators.iter().skip(i + 1) {
                if !a.commutes_with(b) {
                    return Err(invalid(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        let (_, rank) = pauli::rref(&generators);
        if rank != q {
            return Err(invalid(format!("generators have rank {rank}, expected {q}")));
        }
        let code = StabilizerCode::new(q - 1, stabilizers, logical_x, logical_z)?;
        Ok(Self { name: name.into(), q, generators, code })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Total leg count, including the logical leg.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Index of the logical leg (always the last).
    pub fn logical_leg(&self) -> usize {
        self.q - 1
    }

    /// Generator rows on all q legs.
    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    /// The \[\[q-1, 1\]\] code obtained by splitting off the logical leg.
    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }
}

/// The four seed tensors, keyed by name.
pub fn seed_library() -> BTreeMap<String, SeedTensor> {
    let specs: [(&str, &[(&str, char)]); 4] = [
        (
            "happy",
            &[
                ("XZZXI", 'I'),
                ("IXZZX", 'I'),
                ("XIXZZ", 'I'),
                ("ZXIXZ", 'I'),
                ("ZZZZZ", 'Z'),
                ("XXXXX", 'X'),
            ],
        ),
        (
            "steane",
            &[
                ("XXIIIXX", 'I'),
                ("IXXXIIX", 'I'),
                ("IIIXXXX", 'I'),
                ("ZZIIIZZ", 'I'),
                ("IZZZIIZ", 'I'),
                ("IIIZZZZ", 'I'),
                ("ZZZZZZZ", 'Z'),
                ("XXXXXXX", 'X'),
            ],
        ),
        (
            "613",
            &[
                ("ZIZIII", 'I'),
                ("XZYYXI", 'I'),
                ("XXXXZI", 'I'),
                ("IZZXIX", 'I'),
                ("XYXYIZ", 'I'),
                ("XZXZII", 'X'),
                ("XYYXII", 'Z'),
            ],
        ),
        (
            "scf",
            &[
                ("XXIXI", 'I'),
                ("IIXXX", 'I'),
                ("ZIZZI", 'I'),
                ("IZIZZ", 'I'),
                ("XIXII", 'X'),
                ("IIZIZ", 'Z'),
            ],
        ),
    ];
    specs
        .into_iter()
        .map(|(name, rows)| {
            let seed = SeedTensor::new(name, rows).expect("built-in seed tables are valid");
            (name.to_string(), seed)
        })
        .collect()
}

/// One tile: a named seed copy with its legs mapped to global leg ids.
/// `legs[j]` is the global id carried by seed leg j, so reordering this list
/// reorders how the seed attaches to its neighbors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub seed: String,
    pub legs: Vec<LegId>,
}

/// A contraction layout: tiles, interior leg pairings, the ordered boundary,
/// and the central logical leg.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tiling {
    pub seed: String,
    pub layers: u32,
    pub tiles: Vec<Tile>,
    pub contractions: Vec<(LegId, LegId)>,
    pub boundary_legs: Vec<LegId>,
    pub logical_leg: LegId,
}

impl Tiling {
    pub fn num_boundary(&self) -> usize {
        self.boundary_legs.len()
    }

    pub fn total_legs(&self) -> usize {
        self.tiles.iter().map(|t| t.legs.len()).sum()
    }

    /// Check the structural invariants: every leg belongs to exactly one
    /// tile, interior legs are matched exactly once, matched/boundary/logical
    /// legs partition the leg set, and the contraction graph is connected.
    pub fn validate(&self, library: &BTreeMap<String, SeedTensor>) -> Result<(), LegoError> {
        let bad = |msg: String| Err(LegoError::InvalidTiling(msg));
        if self.tiles.is_empty() {
            return bad("tiling has no tiles".into());
        }
        let mut owner: HashMap<LegId, usize> = HashMap::new();
        for (t, tile) in self.tiles.iter().enumerate() {
            let seed = library
                .get(&tile.seed)
                .ok_or_else(|| LegoError::UnknownSeed(tile.seed.clone()))?;
            if tile.legs.len() != seed.q() {
                return bad(format!(
                    "tile {t} has {} legs but seed {:?} has {}",
                    tile.legs.len(),
                    tile.seed,
                    seed.q()
                ));
            }
            for &leg in &tile.legs {
                if owner.insert(leg, t).is_some() {
                    return bad(format!("leg {leg} appears in more than one tile"));
                }
            }
        }
        let mut seen: HashSet<LegId> = HashSet::new();
        let mark = |leg: LegId, seen: &mut HashSet<LegId>| -> Result<(), LegoError> {
            if !owner.contains_key(&leg) {
                return Err(LegoError::InvalidTiling(format!("leg {leg} belongs to no tile")));
            }
            if !seen.insert(leg) {
                return Err(LegoError::InvalidTiling(format!("leg {leg} used more than once")));
            }
            Ok(())
        };
        for &(a, b) in &self.contractions {
            if a == b {
                return bad(format!("contraction pairs leg {a} with itself"));
            }
            mark(a, &mut seen)?;
            mark(b, &mut seen)?;
        }
        for &leg in &self.boundary_legs {
            mark(leg, &mut seen)?;
        }
        mark(self.logical_leg, &mut seen)?;
        if seen.len() != owner.len() {
            return bad(format!(
                "{} legs are neither contracted, boundary, nor logical",
                owner.len() - seen.len()
            ));
        }
        // Connectivity of the contraction graph over tiles.
        let n = self.tiles.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(a, b) in &self.contractions {
            let (ra, rb) = (find(&mut parent, owner[&a]), find(&mut parent, owner[&b]));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        for t in 1..n {
            if find(&mut parent, t) != root {
                return bad("contraction graph is disconnected".into());
            }
        }
        Ok(())
    }
}

/// Growth parameters for [`inflate`]. The attachment rule itself is fixed:
/// every free leg of the current boundary is consumed each layer, by an
/// edge-child (one inward leg) or, where two neighboring tiles meet, by a
/// vertex-child (two inward legs).
#[derive(Copy, Clone, Debug)]
pub struct InflationRule {
    /// Refuse to grow past this many total legs.
    pub max_total_legs: usize,
}

impl Default for InflationRule {
    fn default() -> Self {
        Self { max_total_legs: 200_000 }
    }
}

/// Grow `layers` layers of edge inflation around a central copy of `seed`.
///
/// The central tile exposes its q-1 planar legs; each layer walks the
/// boundary in planar order and attaches a vertex-child across every vertex
/// where two different tiles meet (consuming the two flanking legs) and an
/// edge-child on every remaining leg. New tiles take their inward legs on
/// the seed's first leg positions and expose the rest in planar order.
pub fn inflate(seed: &SeedTensor, layers: u32, rule: &InflationRule) -> Result<Tiling, LegoError> {
    let q = seed.q();
    let central_planar = q - 1;
    let mut tiles = vec![Tile { seed: seed.name().into(), legs: (0..q as LegId).collect() }];
    let logical_leg = central_planar as LegId;
    let mut next_leg = q as LegId;
    let mut contractions: Vec<(LegId, LegId)> = Vec::new();
    // The boundary walk: (tile index, global leg id) in cyclic planar order.
    // Central planar legs are 0..q-1, skipping the logical leg id q-1.
    let mut walk: Vec<(usize, LegId)> = (0..central_planar as LegId).map(|l| (0, l)).collect();

    for layer in 1..=layers {
        let len = walk.len();
        // Pair the two legs flanking each vertex shared by two different
        // tiles. Tile segments on the walk are at least two legs long, so
        // greedy matching never sees conflicting adjacent pairs.
        let mut used = vec![false; len];
        let mut pair_at = vec![false; len]; // pair (i, i+1 mod len)
        let mut i = 0;
        while i + 1 < len {
            if walk[i].0 != walk[i + 1].0 && !used[i] {
                pair_at[i] = true;
                used[i] = true;
                used[i + 1] = true;
                i += 2;
            } else {
                i += 1;
            }
        }
        if len >= 2 && !used[len - 1] && !used[0] && walk[len - 1].0 != walk[0].0 {
            pair_at[len - 1] = true;
            used[len - 1] = true;
            used[0] = true;
        }
        let wrap_pair = pair_at[len.saturating_sub(1)] && len >= 2;

        let n_children = walk.iter().zip(&pair_at).filter(|&(_, &p)| p).count()
            + used.iter().filter(|&&u| !u).count();
        let needed = tiles.iter().map(|t| t.legs.len()).sum::<usize>() + n_children * q;
        if needed > rule.max_total_legs {
            return Err(LegoError::BudgetExceeded { layer, needed, budget: rule.max_total_legs });
        }

        let mut new_walk: Vec<(usize, LegId)> = Vec::new();
        let mut attach = |inward: &[(usize, LegId)],
                          tiles: &mut Vec<Tile>,
                          contractions: &mut Vec<(LegId, LegId)>,
                          new_walk: &mut Vec<(usize, LegId)>| {
            let tile_index = tiles.len();
            let legs: Vec<LegId> = (next_leg..next_leg + q as LegId).collect();
            next_leg += q as LegId;
            for (j, &(_, outer_leg)) in inward.iter().enumerate() {
                contractions.push((outer_leg, legs[j]));
            }
            for &leg in &legs[inward.len()..] {
                new_walk.push((tile_index, leg));
            }
            tiles.push(Tile { seed: seed.name().into(), legs });
        };

        let mut i = 0;
        while i < len {
            if wrap_pair && i == 0 {
                i = 1; // walk[0] is consumed by the wrap pair, emitted last
                continue;
            }
            if pair_at[i] && i + 1 < len {
                attach(&[walk[i], walk[i + 1]], &mut tiles, &mut contractions, &mut new_walk);
                i += 2;
            } else if pair_at[i] {
                break; // wrap pair handled below
            } else {
                attach(&[walk[i]], &mut tiles, &mut contractions, &mut new_walk);
                i += 1;
            }
        }
        if wrap_pair {
            attach(&[walk[len - 1], walk[0]], &mut tiles, &mut contractions, &mut new_walk);
        }
        walk = new_walk;
    }

    let tiling = Tiling {
        seed: seed.name().into(),
        layers,
        tiles,
        contractions,
        boundary_legs: walk.into_iter().map(|(_, leg)| leg).collect(),
        logical_leg,
    };
    debug_assert!(tiling.validate(&seed_library()).is_ok());
    Ok(tiling)
}

/// Result of tracing legs out of a generator set.
#[derive(Clone, Debug)]
pub struct TraceOutcome {
    /// Independent basis of the surviving group on the remaining legs.
    pub rows: Vec<PauliOp>,
    /// Rank of the absorbed kernel: traced elements restricting to the
    /// identity. Each unit contributes a factor 2 to tensor-network counts.
    pub kernel_rank: usize,
}

/// Contract legs `a` and `b` of a generator set: restrict the group to
/// elements acting identically on both legs, then delete the two columns
/// (remaining legs keep their order).
pub fn self_trace(rows: &[PauliOp], a: usize, b: usize) -> TraceOutcome {
    let m = rows.first().map_or(0, |r| r.num_qubits());
    assert!(a < m && b < m, "trace legs out of range");
    assert_ne!(a, b, "cannot trace a leg with itself");
    let mut work: Vec<PauliOp> = rows.to_vec();
    eliminate_matching_signature(&mut work, a, b);
    let keep: Vec<usize> = (0..m).filter(|&c| c != a && c != b).collect();
    let projected: Vec<PauliOp> = work.iter().map(|r| r.project(&keep)).collect();
    let survivors = projected.len();
    let (basis, rank) = pauli::rref(&projected);
    TraceOutcome { rows: basis, kernel_rank: survivors - rank }
}

/// Row-reduce on the two matching constraints x_a + x_b and z_a + z_b,
/// removing the pivot rows. Survivors span the matching subgroup.
fn eliminate_matching_signature(rows: &mut Vec<PauliOp>, a: usize, b: usize) {
    for extract in [
        (|p: Pauli| p.to_bits() & 1) as fn(Pauli) -> u8, // x component
        (|p: Pauli| p.to_bits() >> 1) as fn(Pauli) -> u8, // z component
    ] {
        let sig = |r: &PauliOp| extract(r.get(a)) ^ extract(r.get(b));
        let Some(pivot_idx) = rows.iter().position(|r| sig(r) == 1) else {
            continue;
        };
        let pivot = rows.remove(pivot_idx);
        for r in rows.iter_mut() {
            if sig(r) == 1 {
                r.multiply_assign(&pivot);
            }
        }
    }
}

/// A boundary stabilizer code together with the tiling it came from.
#[derive(Clone, Debug)]
pub struct HolographicCode {
    pub tiling: Tiling,
    pub code: StabilizerCode,
    /// Total kernel rank absorbed during contraction; the tensor-network
    /// decoder overcounts every coset sum by exactly 2^multiplicity_rank.
    pub multiplicity_rank: usize,
}

/// Contract a tiling into its boundary code: take the disjoint union of all
/// tile generators, impose the matching constraints of every contraction
/// pair, and split the surviving group on the logical leg.
pub fn build_code(
    tiling: &Tiling,
    library: &BTreeMap<String, SeedTensor>,
) -> Result<HolographicCode, LegoError> {
    tiling.validate(library)?;
    // Column layout of the disjoint union: tiles in order, legs in tile order.
    let mut col_of: HashMap<LegId, usize> = HashMap::new();
    for tile in &tiling.tiles {
        for &leg in &tile.legs {
            let next = col_of.len();
            col_of.insert(leg, next);
        }
    }
    let total = col_of.len();
    let mut rows: Vec<PauliOp> = Vec::new();
    for tile in &tiling.tiles {
        let seed = &library[&tile.seed];
        for gen in seed.generators() {
            let mut row = PauliOp::identity(total);
            for (j, p) in gen.paulis().enumerate() {
                row.set(col_of[&tile.legs[j]], p);
            }
            rows.push(row);
        }
    }
    // Impose all matching constraints. Kernel rows (elements that become
    // trivial on the surviving legs) stay in the list as dependent rows and
    // are counted by the final row reduction.
    for &(a, b) in &tiling.contractions {
        eliminate_matching_signature(&mut rows, col_of[&a], col_of[&b]);
    }
    let survivors = rows.len();
    // Project onto the open legs: boundary order first, logical leg last.
    let mut keep: Vec<usize> = tiling.boundary_legs.iter().map(|l| col_of[l]).collect();
    keep.push(col_of[&tiling.logical_leg]);
    let projected: Vec<PauliOp> = rows.iter().map(|r| r.project(&keep)).collect();
    let (basis, rank) = pauli::rref(&projected);
    let multiplicity_rank = survivors - rank;

    let n = tiling.boundary_legs.len();
    if rank != n + 1 {
        return Err(LegoError::InvalidTiling(format!(
            "contracted group has rank {rank} on {n} boundary legs + logical, expected {}",
            n + 1
        )));
    }
    let (stabilizers, logical_x, logical_z) = split_on_logical_leg(basis, n)?;
    let code = StabilizerCode::new(n, stabilizers, vec![logical_x], vec![logical_z])?;
    Ok(HolographicCode { tiling: tiling.clone(), code, multiplicity_rank })
}

/// Split a basis on the last leg: reduce so exactly one row carries X-bar and
/// one carries Z-bar there; everything else restricts to a stabilizer.
fn split_on_logical_leg(
    mut basis: Vec<PauliOp>,
    n: usize,
) -> Result<(Vec<PauliOp>, PauliOp, PauliOp), LegoError> {
    let bar = n; // logical leg column
    let bar_x = |r: &PauliOp| r.get(bar).to_bits() & 1 == 1;
    let bar_z = |r: &PauliOp| r.get(bar).to_bits() >> 1 == 1;
    let Some(xi) = basis.iter().position(bar_x) else {
        return Err(LegoError::RankDefect("X"));
    };
    let x_row = basis.remove(xi);
    for r in basis.iter_mut() {
        if bar_x(r) {
            r.multiply_assign(&x_row);
        }
    }
    let Some(zi) = basis.iter().position(bar_z) else {
        return Err(LegoError::RankDefect("Z"));
    };
    let z_row = basis.remove(zi);
    for r in basis.iter_mut() {
        if bar_z(r) {
            r.multiply_assign(&z_row);
        }
    }
    let x_row = if bar_z(&x_row) { x_row.multiply(&z_row) } else { x_row };
    debug_assert!(basis.iter().all(|r| r.get(bar) == Pauli::I));
    let keep: Vec<usize> = (0..n).collect();
    let stabilizers = basis.iter().map(|r| r.project(&keep)).collect();
    Ok((stabilizers, x_row.project(&keep), z_row.project(&keep)))
}

/// On-disk format: the tiling plus the derived code, all Pauli rows as text.
#[derive(Serialize, Deserialize)]
struct CodeFile {
    format_version: u32,
    tiling: Tiling,
    n: usize,
    k: usize,
    multiplicity_rank: usize,
    stabilizers: Vec<PauliOp>,
    logical_x: Vec<PauliOp>,
    logical_z: Vec<PauliOp>,
    destabilizers: Vec<PauliOp>,
}

const CODE_FORMAT_VERSION: u32 = 1;

impl HolographicCode {
    pub fn to_json(&self) -> String {
        let file = CodeFile {
            format_version: CODE_FORMAT_VERSION,
            tiling: self.tiling.clone(),
            n: self.code.n(),
            k: self.code.k(),
            multiplicity_rank: self.multiplicity_rank,
            stabilizers: self.code.stabilizers().to_vec(),
            logical_x: self.code.logical_x().to_vec(),
            logical_z: self.code.logical_z().to_vec(),
            destabilizers: self.code.destabilizers().to_vec(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("code file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str, library: &BTreeMap<String, SeedTensor>) -> Result<Self, LegoError> {
        let file: CodeFile = serde_json::from_str(json)?;
        if file.format_version != CODE_FORMAT_VERSION {
            return Err(LegoError::InvalidTiling(format!(
                "unsupported code file version {}",
                file.format_version
            )));
        }
        file.tiling.validate(library)?;
        if file.tiling.boundary_legs.len() != file.n || file.k != 1 {
            return Err(LegoError::InvalidTiling(
                "code dimensions disagree with the tiling boundary".into(),
            ));
        }
        let code = StabilizerCode::from_parts(
            file.n,
            file.stabilizers,
            file.logical_x,
            file.logical_z,
            file.destabilizers,
        )?;
        Ok(Self { tiling: file.tiling, code, multiplicity_rank: file.multiplicity_rank })
    }

    pub fn save(&self, path: &Path) -> Result<(), LegoError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path, library: &BTreeMap<String, SeedTensor>) -> Result<Self, LegoError> {
        Self::from_json(&fs::read_to_string(path)?, library)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn library_contents() {
        let lib = seed_library();
        assert_eq!(lib.len(), 4);
        let happy = &lib["happy"];
        assert_eq!(happy.q(), 6);
        assert_eq!(happy.generators()[0], op("XZZXII"));
        let s613 = &lib["613"];
        assert_eq!(s613.q(), 7);
        assert_eq!(s613.generators()[5], op("XZXZIIX"));
        assert_eq!(lib["steane"].q(), 8);
        assert_eq!(lib["scf"].q(), 6);
        for seed in lib.values() {
            let (_, rank) = pauli::rref(seed.generators());
            assert_eq!(rank, seed.q(), "seed {} not full rank", seed.name());
            seed.code().validate().unwrap();
        }
    }

    #[test]
    fn seed_distances() {
        let lib = seed_library();
        assert_eq!(lib["happy"].code().min_distance().unwrap(), 3);
        assert_eq!(lib["steane"].code().min_distance().unwrap(), 3);
        assert_eq!(lib["613"].code().min_distance().unwrap(), 3);
        assert_eq!(lib["scf"].code().min_distance().unwrap(), 2);
    }

    #[test]
    fn rejects_anticommuting_seed() {
        let result = SeedTensor::new("bad", &[("XX", 'I'), ("ZI", 'I'), ("IZ", 'X')]);
        assert!(matches!(result, Err(LegoError::InvalidSeed { .. })));
    }

    #[test]
    fn inflate_layer_zero() {
        let lib = seed_library();
        let tiling = inflate(&lib["happy"], 0, &InflationRule::default()).unwrap();
        assert_eq!(tiling.tiles.len(), 1);
        assert_eq!(tiling.boundary_legs.len(), 5);
        assert!(tiling.contractions.is_empty());
        assert_eq!(tiling.logical_leg, 5);
        tiling.validate(&lib).unwrap();
    }

    /// Independent recount of the inflation combinatorics: per layer, every
    /// vertex between two boundary tiles takes a vertex-child (two legs) and
    /// each remaining leg an edge-child.
    fn recount(q: usize, layers: u32) -> (usize, usize) {
        let c = q - 1;
        let mut tiles = 1usize;
        let mut edge_children = 0usize; // current boundary composition
        let mut vertex_children = 0usize;
        let mut boundary = c;
        for layer in 1..=layers {
            let gaps = if layer == 1 { 0 } else { edge_children + vertex_children };
            let vc = gaps;
            let ec = boundary - 2 * vc;
            tiles += vc + ec;
            edge_children = ec;
            vertex_children = vc;
            boundary = ec * (q - 1) + vc * (q - 2);
        }
        (tiles, boundary)
    }

    #[test]
    fn inflation_matches_recount() {
        let lib = seed_library();
        for seed in lib.values() {
            for layers in 0..=3 {
                let tiling = inflate(seed, layers, &InflationRule::default()).unwrap();
                let (tiles, boundary) = recount(seed.q(), layers);
                assert_eq!(tiling.tiles.len(), tiles, "{} L{layers}", seed.name());
                assert_eq!(tiling.boundary_legs.len(), boundary, "{} L{layers}", seed.name());
                tiling.validate(&lib).unwrap();
            }
        }
    }

    #[test]
    fn happy_layer_counts() {
        let lib = seed_library();
        for (layers, tiles, boundary) in [(0, 1, 5), (1, 6, 25), (2, 26, 95), (3, 101, 355)] {
            let tiling = inflate(&lib["happy"], layers, &InflationRule::default()).unwrap();
            assert_eq!(tiling.tiles.len(), tiles);
            assert_eq!(tiling.boundary_legs.len(), boundary);
        }
    }

    #[test]
    fn budget_refusal() {
        let lib = seed_library();
        let rule = InflationRule { max_total_legs: 30 };
        assert!(matches!(
            inflate(&lib["happy"], 2, &rule),
            Err(LegoError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ghz_trace() {
        // Tracing two legs of the GHZ group leaves the plus state on leg 1.
        let rows = vec![op("ZZI"), op("IZZ"), op("XXX")];
        let out = self_trace(&rows, 1, 2);
        assert_eq!(out.rows, vec![op("X")]);
        assert_eq!(out.kernel_rank, 1);
    }

    #[test]
    fn bell_trace_absorbs_full_kernel() {
        let rows = vec![op("XX"), op("ZZ")];
        let out = self_trace(&rows, 0, 1);
        assert!(out.rows.is_empty());
        assert_eq!(out.kernel_rank, 2);
    }

    #[test]
    fn trace_preserves_commutation() {
        let lib = seed_library();
        let gens = lib["happy"].generators();
        // Join two HaPPY tiles on one leg and check the traced rows commute.
        let mut rows = Vec::new();
        for (block, _) in [(0, ()), (1, ())] {
            for g in gens {
                let mut row = PauliOp::identity(12);
                for (j, p) in g.paulis().enumerate() {
                    row.set(block * 6 + j, p);
                }
                rows.push(row);
            }
        }
        let out = self_trace(&rows, 0, 6);
        assert_eq!(out.rows.len(), 10);
        for (i, a) in out.rows.iter().enumerate() {
            for b in out.rows.iter().skip(i + 1) {
                assert!(a.commutes_with(b));
            }
        }
    }

    #[test]
    fn build_layer_zero_recovers_seed_codes() {
        let lib = seed_library();
        for seed in lib.values() {
            let tiling = inflate(seed, 0, &InflationRule::default()).unwrap();
            let built = build_code(&tiling, &lib).unwrap();
            assert_eq!(built.code.n(), seed.q() - 1);
            assert_eq!(built.code.k(), 1);
            assert_eq!(built.multiplicity_rank, 0);
            // Same stabilizer group and same logical cosets as the seed code.
            assert!(pauli::span_eq(built.code.stabilizers(), seed.code().stabilizers()));
            let mut norm_a = built.code.stabilizers().to_vec();
            norm_a.push(built.code.logical_x()[0].clone());
            let mut norm_b = seed.code().stabilizers().to_vec();
            norm_b.push(seed.code().logical_x()[0].clone());
            assert!(pauli::span_eq(&norm_a, &norm_b));
        }
    }

    #[test]
    fn build_happy_layer_one() {
        let lib = seed_library();
        let tiling = inflate(&lib["happy"], 1, &InflationRule::default()).unwrap();
        let built = build_code(&tiling, &lib).unwrap();
        assert_eq!(built.code.n(), 25);
        assert_eq!(built.code.k(), 1);
        built.code.validate().unwrap();
        // Bounded-weight search: no logical representative of weight < 3.
        let code = &built.code;
        for q in 0..code.n() {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let e = PauliOp::single(code.n(), q, p);
                let zero_syndrome = code.syndrome(&e).iter().all(|&b| !b);
                assert!(!zero_syndrome || code.logical_class(&e) == Pauli::I);
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let lib = seed_library();
        let tiling = inflate(&lib["happy"], 1, &InflationRule::default()).unwrap();
        let built = build_code(&tiling, &lib).unwrap();
        let json = built.to_json();
        let loaded = HolographicCode::from_json(&json, &lib).unwrap();
        assert_eq!(loaded.to_json(), json);
        assert_eq!(loaded.tiling, built.tiling);
    }
}
