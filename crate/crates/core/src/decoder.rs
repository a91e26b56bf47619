//! Exact maximum-likelihood decoding of holographic codes.
//!
//! The coset probability of each logical class factorizes over tiles: every
//! tile contributes a 0/1 indicator tensor of its generator group, interior
//! leg pairs are contracted against each other, boundary legs against the
//! error-prior vector twisted by the pure error, and the central logical leg
//! stays open. Reading the four entries of the fully contracted network
//! gives the class weights, up to the uniform factor 2^multiplicity_rank
//! absorbed from interior kernel elements.
//!
//! [`decode_oracle`] computes the same coset sums by explicit enumeration of
//! the boundary stabilizer group and exists purely to cross-check the
//! network contraction; it shares no code path with it.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::lego::{HolographicCode, LegId, LegoError, SeedTensor, Tiling};
use crate::noise::ChannelSpec;
use crate::pauli::{self, Pauli, PauliOp, StabilizerCode};

/// Open-leg cap for dense tensors: 4^12 doubles is 128 MiB.
pub const DEFAULT_FRONTIER_CAP: usize = 12;

/// Cap on the stabilizer group exponent enumerated by [`decode_oracle`].
pub const ORACLE_GROUP_CAP: usize = 26;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("contraction step {step} would hold {open} open legs, over the cap of {cap}; raise the frontier cap to proceed")]
    FrontierExceeded { step: usize, open: usize, cap: usize },
    #[error("dense tensor on {0} legs refused (cap {1} legs)")]
    TensorTooLarge(usize, usize),
    #[error("oracle enumeration of 2^{0} stabilizer elements refused (cap 2^{ORACLE_GROUP_CAP})")]
    OracleTooLarge(usize),
    #[error(transparent)]
    Lego(#[from] LegoError),
}

/// Map an (I, X, Y, Z)-ordered 4-vector onto two-bit symplectic codes.
#[inline]
fn by_bits(v: [f64; 4]) -> [f64; 4] {
    // bit codes: 0 = I, 1 = X, 2 = Z, 3 = Y
    [v[0], v[1], v[3], v[2]]
}

/// A dense nonnegative tensor with one 4-valued Pauli index per leg.
/// Leg `legs[j]` has stride 4^j in `data`.
#[derive(Clone, Debug)]
pub struct TileTensor {
    legs: Vec<LegId>,
    data: Vec<f64>,
    log_scale: f64,
}

impl TileTensor {
    pub fn legs(&self) -> &[LegId] {
        &self.legs
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Entry at the given per-leg Pauli assignment (in `legs` order).
    pub fn entry(&self, assignment: &[Pauli]) -> f64 {
        assert_eq!(assignment.len(), self.legs.len());
        let idx = assignment
            .iter()
            .enumerate()
            .map(|(j, p)| (p.to_bits() as usize) << (2 * j))
            .sum::<usize>();
        self.data[idx]
    }

    #[cfg(test)]
    fn scalar(&self) -> f64 {
        debug_assert_eq!(self.legs.len(), 0);
        self.data[0]
    }

    /// Divide out the maximum entry into `log_scale`.
    fn rescale(&mut self) {
        let max = self.data.iter().cloned().fold(0.0f64, f64::max);
        if max > 0.0 && max != 1.0 {
            let inv = 1.0 / max;
            for d in &mut self.data {
                *d *= inv;
            }
            self.log_scale += max.ln();
        }
    }

    /// Reorder legs to `order` (a permutation of the current legs).
    fn permute(&self, order: &[LegId]) -> TileTensor {
        if order == self.legs {
            return self.clone();
        }
        let m = self.legs.len();
        debug_assert_eq!(order.len(), m);
        // old position of each new leg
        let old_pos: Vec<usize> = order
            .iter()
            .map(|l| self.legs.iter().position(|x| x == l).expect("permute: unknown leg"))
            .collect();
        let mut data = vec![0.0; self.data.len()];
        for (new_idx, slot) in data.iter_mut().enumerate() {
            let mut old_idx = 0;
            let mut rest = new_idx;
            for &p in &old_pos {
                old_idx += (rest & 3) << (2 * p);
                rest >>= 2;
            }
            *slot = self.data[old_idx];
        }
        TileTensor { legs: order.to_vec(), data, log_scale: self.log_scale }
    }
}

/// Indicator tensor of a generator span: entry 1 exactly on the group
/// elements, indexed by per-leg Pauli codes. Enumerates the 2^rank elements
/// rather than all 4^legs index tuples.
pub fn tile_tensor(generators: &[PauliOp], legs: &[LegId]) -> Result<TileTensor, DecodeError> {
    let m = legs.len();
    if m > DEFAULT_FRONTIER_CAP {
        return Err(DecodeError::TensorTooLarge(m, DEFAULT_FRONTIER_CAP));
    }
    assert!(generators.iter().all(|g| g.num_qubits() == m), "generator/leg count mismatch");
    let (basis, rank) = pauli::rref(generators);
    let mut data = vec![0.0; 1 << (2 * m)];
    let mut cur = PauliOp::identity(m);
    let index_of = |op: &PauliOp| -> usize {
        (0..m).map(|j| (op.get(j).to_bits() as usize) << (2 * j)).sum()
    };
    data[index_of(&cur)] = 1.0;
    for t in 1u64..1 << rank {
        cur.multiply_assign(&basis[t.trailing_zeros() as usize]);
        data[index_of(&cur)] = 1.0;
    }
    Ok(TileTensor { legs: legs.to_vec(), data, log_scale: 0.0 })
}

/// Contract one leg against a prior 4-vector given in (I, X, Y, Z) order.
pub fn attach_boundary_prior(t: &TileTensor, leg: LegId, v: [f64; 4]) -> TileTensor {
    let j = t.legs.iter().position(|&l| l == leg).expect("attach: leg not open in tensor");
    let vb = by_bits(v);
    let lo_size = 1usize << (2 * j);
    let hi_size = t.data.len() >> (2 * (j + 1));
    let mut data = vec![0.0; t.data.len() / 4];
    for hi in 0..hi_size {
        for (c, &w) in vb.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let src = &t.data[(hi * 4 + c) * lo_size..(hi * 4 + c + 1) * lo_size];
            let dst = &mut data[hi * lo_size..(hi + 1) * lo_size];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    let mut legs = t.legs.clone();
    legs.remove(j);
    TileTensor { legs, data, log_scale: t.log_scale }
}

/// Contract all pair legs between two tensors: `pairs[i]` joins a leg of `a`
/// to a leg of `b`. Remaining legs keep order (a's open, then b's open).
fn merge(a: &TileTensor, b: &TileTensor, pairs: &[(LegId, LegId)]) -> TileTensor {
    let a_shared: Vec<LegId> = pairs.iter().map(|&(x, _)| x).collect();
    let b_shared: Vec<LegId> = pairs.iter().map(|&(_, y)| y).collect();
    let mut a_order: Vec<LegId> =
        a.legs.iter().copied().filter(|l| !a_shared.contains(l)).collect();
    let a_open = a_order.len();
    a_order.extend(&a_shared);
    let mut b_order = b_shared.clone();
    b_order.extend(b.legs.iter().copied().filter(|l| !b_shared.contains(l)));
    let b_open = b_order.len() - b_shared.len();
    let pa = a.permute(&a_order);
    let pb = b.permute(&b_order);

    let m = 1usize << (2 * a_open);
    let k = 1usize << (2 * pairs.len());
    let n = 1usize << (2 * b_open);
    let mut data = vec![0.0; m * n];
    for col in 0..n {
        let out_col = &mut data[col * m..(col + 1) * m];
        for kk in 0..k {
            let w = pb.data[kk + k * col];
            if w == 0.0 {
                continue;
            }
            let a_col = &pa.data[kk * m..(kk + 1) * m];
            for (o, &av) in out_col.iter_mut().zip(a_col) {
                *o += w * av;
            }
        }
    }
    let mut legs = a_order[..a_open].to_vec();
    legs.extend(&b_order[pairs.len()..]);
    TileTensor { legs, data, log_scale: pa.log_scale + pb.log_scale }
}

/// One pairwise merge in a contraction plan.
#[derive(Clone, Debug)]
pub struct MergeStep {
    pub into: usize,
    pub from: usize,
    pub pairs: Vec<(LegId, LegId)>,
    pub result_open: usize,
}

/// An ordered merge schedule with its achieved frontier.
#[derive(Clone, Debug)]
pub struct ContractionPlan {
    pub steps: Vec<MergeStep>,
    pub max_frontier: usize,
}

/// Greedy outside-in contraction order: merge the adjacent cluster pair that
/// minimizes the resulting open-leg count, preferring outer-layer clusters
/// on ties. Fails if any intermediate would exceed `frontier_cap` open legs.
pub fn plan_contraction(tiling: &Tiling, frontier_cap: usize) -> Result<ContractionPlan, DecodeError> {
    let ntiles = tiling.tiles.len();
    let mut owner: BTreeMap<LegId, usize> = BTreeMap::new();
    for (t, tile) in tiling.tiles.iter().enumerate() {
        for &leg in &tile.legs {
            owner.insert(leg, t);
        }
    }
    let boundary: std::collections::HashSet<LegId> = tiling.boundary_legs.iter().copied().collect();
    // Open legs of each leaf after boundary priors fold in: interior legs
    // plus the logical leg; intra-tile pairs are traced at leaf build.
    let mut open: Vec<usize> = tiling
        .tiles
        .iter()
        .map(|tile| tile.legs.iter().filter(|l| !boundary.contains(l)).count())
        .collect();
    let mut edges: BTreeMap<(usize, usize), Vec<(LegId, LegId)>> = BTreeMap::new();
    for &(a, b) in &tiling.contractions {
        let (ta, tb) = (owner[&a], owner[&b]);
        if ta == tb {
            open[ta] -= 2;
            continue;
        }
        let (key, pair) = if ta < tb { ((ta, tb), (a, b)) } else { ((tb, ta), (b, a)) };
        edges.entry(key).or_default().push(pair);
    }
    // Tile depth: hops from the central tile along contractions, matching
    // construction layers for inflated tilings.
    let center = owner[&tiling.logical_leg];
    let mut depth = vec![usize::MAX; ntiles];
    depth[center] = 0;
    let mut queue = std::collections::VecDeque::from([center]);
    while let Some(t) = queue.pop_front() {
        for (&(x, y), _) in edges.iter() {
            for (u, w) in [(x, y), (y, x)] {
                if u == t && depth[w] == usize::MAX {
                    depth[w] = depth[t] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    if let Some(&o) = open.iter().find(|&&o| o > frontier_cap) {
        return Err(DecodeError::FrontierExceeded { step: 0, open: o, cap: frontier_cap });
    }

    let mut steps = Vec::new();
    let mut max_frontier = open.iter().copied().max().unwrap_or(0);
    while !edges.is_empty() {
        let step_index = steps.len();
        let (&(i, j), _) = edges
            .iter()
            .min_by_key(|(&(i, j), pairs)| {
                let result = open[i] + open[j] - 2 * pairs.len();
                let outer = depth[i].max(depth[j]);
                (result, usize::MAX - outer, i, j)
            })
            .expect("nonempty edge set");
        let pairs = edges.remove(&(i, j)).unwrap();
        let result_open = open[i] + open[j] - 2 * pairs.len();
        if result_open > frontier_cap {
            return Err(DecodeError::FrontierExceeded {
                step: step_index,
                open: result_open,
                cap: frontier_cap,
            });
        }
        max_frontier = max_frontier.max(result_open);
        open[i] = result_open;
        depth[i] = depth[i].min(depth[j]);
        // Reroute j's edges to i.
        let moved: Vec<((usize, usize), Vec<(LegId, LegId)>)> = edges
            .iter()
            .filter(|(&(x, y), _)| x == j || y == j)
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        for (key, pairs) in moved {
            edges.remove(&key);
            let (other, oriented): (usize, Vec<(LegId, LegId)>) = if key.0 == j {
                (key.1, pairs.iter().map(|&(a, b)| (b, a)).collect())
            } else {
                (key.0, pairs)
            };
            let (new_key, reoriented) = if i < other {
                ((i, other), oriented)
            } else {
                ((other, i), oriented.iter().map(|&(a, b)| (b, a)).collect())
            };
            edges.entry(new_key).or_default().extend(reoriented);
        }
        steps.push(MergeStep { into: i, from: j, pairs, result_open });
    }
    Ok(ContractionPlan { steps, max_frontier })
}

/// Weights of the four logical classes with the argmax choice.
/// Ties break deterministically in the order I < X < Y < Z.
#[derive(Clone, Debug, Serialize)]
pub struct ClassDistribution {
    /// Normalized weights in the order (I, X, Y, Z); all zero when the
    /// syndrome carries no probability mass at all.
    pub weights: [f64; 4],
    pub chosen: Pauli,
    /// ln of the unnormalized total coset mass.
    pub log_total_mass: f64,
}

impl ClassDistribution {
    fn from_raw(raw: [f64; 4], log_scale: f64) -> Self {
        let total: f64 = raw.iter().sum();
        let (weights, log_total_mass) = if total > 0.0 {
            (raw.map(|w| w / total), total.ln() + log_scale)
        } else {
            ([0.0; 4], f64::NEG_INFINITY)
        };
        let mut chosen = Pauli::I;
        let mut best = weights[0];
        for (i, &w) in weights.iter().enumerate().skip(1) {
            if w > best {
                best = w;
                chosen = Pauli::ALL[i];
            }
        }
        Self { weights, chosen, log_total_mass }
    }

    /// ln of the unnormalized mass of one class.
    pub fn log_mass(&self, class: Pauli) -> f64 {
        let w = self.weights[class as usize];
        if w > 0.0 {
            self.log_total_mass + w.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Per-tile tables precomputed for fast leaf-tensor builds: every group
/// element's open-leg index and its Pauli codes on the tile's boundary legs.
struct TilePrep {
    open_legs: Vec<LegId>,
    boundary_qubits: Vec<u32>,
    elem_open_idx: Vec<u32>,
    elem_codes: Vec<u8>,
}

/// A reusable maximum-likelihood decoder for one holographic code:
/// contraction plan plus per-tile group tables, shareable across threads.
pub struct Decoder {
    code: StabilizerCode,
    multiplicity_rank: usize,
    prep: Vec<TilePrep>,
    plan: ContractionPlan,
    nslots: usize,
    logical_leg: LegId,
}

impl Decoder {
    pub fn new(
        hcode: &HolographicCode,
        library: &BTreeMap<String, SeedTensor>,
        frontier_cap: usize,
    ) -> Result<Self, DecodeError> {
        let tiling = &hcode.tiling;
        tiling.validate(library)?;
        let plan = plan_contraction(tiling, frontier_cap)?;
        let qubit_of: BTreeMap<LegId, u32> = tiling
            .boundary_legs
            .iter()
            .enumerate()
            .map(|(q, &l)| (l, q as u32))
            .collect();
        let mut partner: BTreeMap<LegId, LegId> = BTreeMap::new();
        for &(a, b) in &tiling.contractions {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        let mut prep = Vec::with_capacity(tiling.tiles.len());
        for tile in &tiling.tiles {
            let seed = &library[&tile.seed];
            let q = seed.q();
            let legset: std::collections::HashSet<LegId> = tile.legs.iter().copied().collect();
            // Positions: boundary legs, intra-tile traced pairs, open legs.
            let mut boundary_pos = Vec::new();
            let mut open_pos = Vec::new();
            let mut trace_pairs: Vec<(usize, usize)> = Vec::new();
            for (j, &leg) in tile.legs.iter().enumerate() {
                if let Some(&qb) = qubit_of.get(&leg) {
                    boundary_pos.push((j, qb));
                } else if let Some(&p) = partner.get(&leg) {
                    if legset.contains(&p) {
                        let pj = tile.legs.iter().position(|&l| l == p).unwrap();
                        if j < pj {
                            trace_pairs.push((j, pj));
                        }
                    } else {
                        open_pos.push(j);
                    }
                } else {
                    // logical leg
                    open_pos.push(j);
                }
            }
            let open_legs: Vec<LegId> = open_pos.iter().map(|&j| tile.legs[j]).collect();
            if open_legs.len() > frontier_cap {
                return Err(DecodeError::TensorTooLarge(open_legs.len(), frontier_cap));
            }
            let mut elem_open_idx = Vec::new();
            let mut elem_codes = Vec::new();
            let mut push_element = |op: &PauliOp| {
                if !trace_pairs.iter().all(|&(a, b)| op.get(a) == op.get(b)) {
                    return;
                }
                let idx: u32 = open_pos
                    .iter()
                    .enumerate()
                    .map(|(slot, &j)| u32::from(op.get(j).to_bits()) << (2 * slot))
                    .sum();
                elem_open_idx.push(idx);
                for &(j, _) in &boundary_pos {
                    elem_codes.push(op.get(j).to_bits());
                }
            };
            let mut cur = PauliOp::identity(q);
            push_element(&cur);
            for t in 1u64..1 << seed.generators().len() {
                cur.multiply_assign(&seed.generators()[t.trailing_zeros() as usize]);
                push_element(&cur);
            }
            prep.push(TilePrep {
                open_legs,
                boundary_qubits: boundary_pos.iter().map(|&(_, q)| q).collect(),
                elem_open_idx,
                elem_codes,
            });
        }
        Ok(Self {
            code: hcode.code.clone(),
            multiplicity_rank: hcode.multiplicity_rank,
            prep,
            plan,
            nslots: tiling.tiles.len(),
            logical_leg: tiling.logical_leg,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn multiplicity_rank(&self) -> usize {
        self.multiplicity_rank
    }

    pub fn plan(&self) -> &ContractionPlan {
        &self.plan
    }

    /// Exact maximum-likelihood class weights for a syndrome: contracts the
    /// tile network with boundary priors twisted by the pure error.
    pub fn decode_ml(&self, syndrome: &[bool], spec: &ChannelSpec) -> ClassDistribution {
        let f = self.code.pure_error(syndrome);
        self.decode_given_pure_error(&f, spec)
    }

    fn decode_given_pure_error(&self, f: &PauliOp, spec: &ChannelSpec) -> ClassDistribution {
        let prior = by_bits(spec.single_qubit_prior());
        // lut[q][c] = prior(f_q * pauli(c))
        let luts: Vec<[f64; 4]> = (0..self.code.n())
            .map(|q| {
                let fb = f.get(q).to_bits() as usize;
                [prior[fb], prior[1 ^ fb], prior[2 ^ fb], prior[3 ^ fb]]
            })
            .collect();
        let mut slots: Vec<Option<TileTensor>> = Vec::with_capacity(self.nslots);
        for tp in &self.prep {
            let mut data = vec![0.0; 1usize << (2 * tp.open_legs.len())];
            let nb = tp.boundary_qubits.len();
            for (e, &idx) in tp.elem_open_idx.iter().enumerate() {
                let mut val = 1.0;
                for (slot, &q) in tp.boundary_qubits.iter().enumerate() {
                    val *= luts[q as usize][tp.elem_codes[e * nb + slot] as usize];
                }
                data[idx as usize] += val;
            }
            let mut t = TileTensor { legs: tp.open_legs.clone(), data, log_scale: 0.0 };
            t.rescale();
            slots.push(Some(t));
        }
        for step in &self.plan.steps {
            let b = slots[step.from].take().expect("plan uses each slot once");
            let a = slots[step.into].take().expect("plan target is live");
            let mut merged = merge(&a, &b, &step.pairs);
            merged.rescale();
            slots[step.into] = Some(merged);
        }
        let last = slots
            .into_iter()
            .flatten()
            .next()
            .expect("contraction leaves one tensor");
        debug_assert_eq!(last.legs, vec![self.logical_leg]);
        let d = &last.data;
        // bit codes back to (I, X, Y, Z) order
        ClassDistribution::from_raw([d[0], d[1], d[3], d[2]], last.log_scale)
    }

    /// Run one Monte Carlo shot: decode the syndrome of `e` and report
    /// whether the chosen class matches the actual class of e times the
    /// pure error.
    pub fn shot_succeeds(&self, e: &PauliOp, spec: &ChannelSpec) -> bool {
        let syndrome = self.code.syndrome(e);
        let f = self.code.pure_error(&syndrome);
        let dist = self.decode_given_pure_error(&f, spec);
        let actual = self.code.logical_class(&e.multiply(&f));
        dist.chosen == actual
    }
}

/// Independent maximum-likelihood oracle: sums the prior mass of all four
/// cosets by explicit enumeration of the full stabilizer group. Refuses
/// above 2^[`ORACLE_GROUP_CAP`] elements.
pub fn decode_oracle(
    code: &StabilizerCode,
    syndrome: &[bool],
    spec: &ChannelSpec,
) -> Result<ClassDistribution, DecodeError> {
    let r = code.stabilizers().len();
    if r > ORACLE_GROUP_CAP {
        return Err(DecodeError::OracleTooLarge(r));
    }
    let n = code.n();
    assert!(n <= 64, "oracle fast path requires at most 64 qubits");
    assert_eq!(code.k(), 1, "oracle decodes one logical qubit");
    let f = code.pure_error(syndrome);
    let prior = by_bits(spec.single_qubit_prior());
    let gens: Vec<(u64, u64)> = code
        .stabilizers()
        .iter()
        .map(|s| (s.x_words()[0], s.z_words()[0]))
        .collect();
    let lx = &code.logical_x()[0];
    let lz = &code.logical_z()[0];
    let reps = [
        PauliOp::identity(n),
        lx.clone(),
        lx.multiply(lz),
        lz.clone(),
    ];
    let mut raw = [0.0; 4];
    for (class, rep) in reps.iter().enumerate() {
        let base = f.multiply(rep);
        let (bx, bz) = (base.x_words()[0], base.z_words()[0]);
        raw[class] = if r < 14 {
            // Small group: evaluate the n-qubit product per element.
            let mut total = 0.0f64;
            let add = |gx: u64, gz: u64, total: &mut f64| {
                let (ex, ez) = (gx ^ bx, gz ^ bz);
                let mut val = 1.0;
                for q in 0..n {
                    val *= prior[((ex >> q & 1) | ((ez >> q & 1) << 1)) as usize];
                }
                *total += val;
            };
            enumerate_group(&gens, r, |gx, gz| add(gx, gz, &mut total));
            total
        } else {
            // Large group: fold the representative into per-8-qubit-block
            // lookup tables over (x byte | z byte << 8) patterns, then the
            // per-element cost is one lookup per block.
            let nblocks = n.div_ceil(8);
            let mut luts = vec![vec![0.0f64; 1 << 16]; nblocks];
            for (b, lut) in luts.iter_mut().enumerate() {
                let width = (n - 8 * b).min(8);
                for (pattern, slot) in lut.iter_mut().enumerate() {
                    let (xb, zb) = (pattern & 0xff, pattern >> 8);
                    let mut val = 1.0;
                    for i in 0..width {
                        let code_bits = ((xb >> i & 1) | ((zb >> i & 1) << 1)) as u8;
                        let qb = 8 * b + i;
                        let folded = code_bits ^ base.get(qb).to_bits();
                        val *= prior[folded as usize];
                    }
                    // Patterns with bits past qubit n never occur.
                    *slot = val;
                }
            }
            let mut total = 0.0f64;
            enumerate_group(&gens, r, |gx, gz| {
                let mut val = 1.0;
                for (b, lut) in luts.iter().enumerate() {
                    let idx = ((gx >> (8 * b)) & 0xff) | (((gz >> (8 * b)) & 0xff) << 8);
                    val *= lut[idx as usize];
                }
                total += val;
            });
            total
        };
    }
    Ok(ClassDistribution::from_raw(raw, 0.0))
}

/// Visit all 2^r span elements of `gens` in Gray-code order.
fn enumerate_group(gens: &[(u64, u64)], r: usize, mut visit: impl FnMut(u64, u64)) {
    let (mut gx, mut gz) = (0u64, 0u64);
    visit(gx, gz);
    for t in 1u64..1 << r {
        let j = t.trailing_zeros() as usize;
        gx ^= gens[j].0;
        gz ^= gens[j].1;
        visit(gx, gz);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lego::{build_code, inflate, seed_library, InflationRule};
    use crate::noise::{Axis, BiasVector};

    fn op(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn depol(p: f64) -> ChannelSpec {
        ChannelSpec::new(p, BiasVector::depolarizing()).unwrap()
    }

    #[test]
    fn single_qubit_indicator() {
        let t = tile_tensor(&[op("Z")], &[0]).unwrap();
        assert_eq!(t.entry(&[Pauli::I]), 1.0);
        assert_eq!(t.entry(&[Pauli::Z]), 1.0);
        assert_eq!(t.entry(&[Pauli::X]), 0.0);
        assert_eq!(t.entry(&[Pauli::Y]), 0.0);
    }

    #[test]
    fn happy_tile_has_group_size_support() {
        let lib = seed_library();
        let legs: Vec<LegId> = (0..6).collect();
        let t = tile_tensor(lib["happy"].generators(), &legs).unwrap();
        let nonzero = t.data().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(nonzero, 64);
        assert_eq!(t.entry(&[Pauli::I; 6]), 1.0);
    }

    #[test]
    fn uniform_prior_contraction() {
        // Single-leg tile <Z>: full contraction with the uniform prior gives
        // (group size) / 4 = 1/2.
        let t = tile_tensor(&[op("Z")], &[0]).unwrap();
        let s = attach_boundary_prior(&t, 0, [0.25; 4]);
        assert_eq!(s.scalar(), 0.5);
        // Identity prior selects the identity slice.
        let t2 = tile_tensor(&[op("ZZ"), op("XX")], &[0, 1]).unwrap();
        let s2 = attach_boundary_prior(&t2, 1, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s2.entry(&[Pauli::I]), 1.0);
        assert_eq!(s2.entry(&[Pauli::X]), 0.0);
    }

    #[test]
    fn uniform_prior_full_contraction_matches_direct_sum() {
        let lib = seed_library();
        let legs: Vec<LegId> = (0..6).collect();
        let t = tile_tensor(lib["happy"].generators(), &legs).unwrap();
        // Direct sum over all entries with weight (1/4)^6.
        let direct: f64 = t.data().iter().sum::<f64>() / 4f64.powi(6);
        let mut cur = t.clone();
        for leg in 0..6 {
            cur = attach_boundary_prior(&cur, leg, [0.25; 4]);
            assert!(cur.data().iter().all(|&v| v >= 0.0));
        }
        assert!((cur.scalar() - direct).abs() < 1e-15);
        assert!((direct - 64.0 / 4096.0).abs() < 1e-15);
    }

    #[test]
    fn plans() {
        let lib = seed_library();
        let single = inflate(&lib["happy"], 0, &InflationRule::default()).unwrap();
        let plan = plan_contraction(&single, DEFAULT_FRONTIER_CAP).unwrap();
        assert!(plan.steps.is_empty());
        assert_eq!(plan.max_frontier, 1);

        let l1 = inflate(&lib["happy"], 1, &InflationRule::default()).unwrap();
        let plan = plan_contraction(&l1, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(plan.steps.len(), 5);

        let l2 = inflate(&lib["happy"], 2, &InflationRule::default()).unwrap();
        let plan = plan_contraction(&l2, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(plan.steps.len(), 25);
        assert!(plan.max_frontier <= 12, "achieved frontier {}", plan.max_frontier);

        assert!(matches!(
            plan_contraction(&l2, 2),
            Err(DecodeError::FrontierExceeded { .. })
        ));
    }

    #[test]
    fn decode_trivial_syndrome_noiseless() {
        let lib = seed_library();
        let tiling = inflate(&lib["happy"], 0, &InflationRule::default()).unwrap();
        let hcode = build_code(&tiling, &lib).unwrap();
        let dec = Decoder::new(&hcode, &lib, DEFAULT_FRONTIER_CAP).unwrap();
        let dist = dec.decode_ml(&vec![false; 4], &depol(0.0));
        assert_eq!(dist.chosen, Pauli::I);
        assert_eq!(dist.weights, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn oracle_identity_dominates_at_low_p() {
        let lib = seed_library();
        let code = lib["happy"].code();
        let dist = decode_oracle(code, &[false; 4], &depol(0.1)).unwrap();
        assert_eq!(dist.chosen, Pauli::I);
        for c in 1..4 {
            assert!(dist.weights[0] > dist.weights[c]);
        }
    }

    #[test]
    fn oracle_total_probability_partition() {
        let lib = seed_library();
        for seed in ["happy", "scf"] {
            let code = lib[seed].code();
            let spec = ChannelSpec::new(0.23, BiasVector::from_eta(Axis::Z, 3.0).unwrap()).unwrap();
            let m = code.stabilizers().len();
            let mut total = 0.0;
            for pattern in 0..1u32 << m {
                let s: Vec<bool> = (0..m).map(|i| pattern >> i & 1 == 1).collect();
                let dist = decode_oracle(code, &s, &spec).unwrap();
                total += dist.log_total_mass.exp();
            }
            assert!((total - 1.0).abs() < 1e-12, "{seed}: total {total}");
        }
    }

    #[test]
    fn ml_matches_oracle_on_seeds() {
        let lib = seed_library();
        for name in ["happy", "steane", "613", "scf"] {
            let tiling = inflate(&lib[name], 0, &InflationRule::default()).unwrap();
            let hcode = build_code(&tiling, &lib).unwrap();
            let dec = Decoder::new(&hcode, &lib, DEFAULT_FRONTIER_CAP).unwrap();
            let spec = ChannelSpec::new(0.15, BiasVector::from_eta(Axis::Y, 2.0).unwrap()).unwrap();
            let m = hcode.code.stabilizers().len();
            for pattern in [0u32, 1, 3, (1 << m) - 1] {
                let s: Vec<bool> = (0..m).map(|i| pattern >> i & 1 == 1).collect();
                let ml = dec.decode_ml(&s, &spec);
                let or = decode_oracle(&hcode.code, &s, &spec).unwrap();
                assert_eq!(ml.chosen, or.chosen, "{name} syndrome {pattern}");
                for c in 0..4 {
                    assert!(
                        (ml.weights[c] - or.weights[c]).abs() < 1e-12,
                        "{name} class {c}: {} vs {}",
                        ml.weights[c],
                        or.weights[c]
                    );
                }
            }
        }
    }

    #[test]
    fn tie_breaking_prefers_identity_order() {
        let dist = ClassDistribution::from_raw([0.3, 0.3, 0.3, 0.3], 0.0);
        assert_eq!(dist.chosen, Pauli::I);
        let dist = ClassDistribution::from_raw([0.1, 0.4, 0.4, 0.1], 0.0);
        assert_eq!(dist.chosen, Pauli::X);
    }

    #[test]
    fn zero_mass_syndrome() {
        // Pure-Z noise cannot produce an X-type pure error on the repetition
        // fragment; weights collapse to zero.
        let dist = ClassDistribution::from_raw([0.0; 4], 0.0);
        assert_eq!(dist.chosen, Pauli::I);
        assert!(dist.log_total_mass.is_infinite());
    }
}
