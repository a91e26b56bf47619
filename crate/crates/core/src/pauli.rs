//! Phaseless Pauli operators and stabilizer codes over GF(2).
//!
//! Everything here lives in the quotient of the n-qubit Pauli group by its
//! phase subgroup {±1, ±i}: an operator is the pair of n-bit vectors (x, z)
//! with Y on qubit i encoded as x\[i\] = z\[i\] = 1. Decoding success and
//! coset membership depend only on these phaseless classes, so signs are
//! never tracked.
//!
//! Text format used everywhere (files, CLI): one character per qubit from
//! {I, X, Y, Z}, leading qubit first, e.g. `"XZZXI"`.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2::{self, BitMatrix, Word, WORD_BITS};

/// Qubit count above which [`StabilizerCode::min_distance`] refuses to run.
pub const DISTANCE_SEARCH_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("invalid Pauli character {0:?} (expected one of I, X, Y, Z)")]
    InvalidCharacter(char),
    #[error("invalid stabilizer code: {0}")]
    InvalidCode(String),
    #[error("distance search refused: {0} qubits exceeds the cap of {DISTANCE_SEARCH_CAP}")]
    DistanceTooLarge(usize),
}

/// Single-qubit Pauli, in the fixed order used for priors, class weights and
/// argmax tie-breaking.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Two-bit symplectic code: bit 0 = X component, bit 1 = Z component.
    #[inline]
    pub fn to_bits(self) -> u8 {
        match self {
            Pauli::I => 0b00,
            Pauli::X => 0b01,
            Pauli::Y => 0b11,
            Pauli::Z => 0b10,
        }
    }

    #[inline]
    pub fn from_bits(bits: u8) -> Pauli {
        match bits & 3 {
            0b00 => Pauli::I,
            0b01 => Pauli::X,
            0b11 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Pauli, PauliError> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::InvalidCharacter(other)),
        }
    }

    /// Phaseless product of two single-qubit Paulis.
    #[inline]
    pub fn times(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.to_bits() ^ other.to_bits())
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A phaseless n-qubit Pauli operator as a pair of packed bit vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<Word>,
    z: Vec<Word>,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        let w = gf2::words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w] }
    }

    /// The operator acting as `p` on `qubit` and trivially elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, p);
        op
    }

    pub fn from_paulis<I: IntoIterator<Item = Pauli>>(paulis: I) -> Self {
        let paulis: Vec<Pauli> = paulis.into_iter().collect();
        let mut op = Self::identity(paulis.len());
        for (i, p) in paulis.into_iter().enumerate() {
            op.set(i, p);
        }
        op
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let bits = (self.x[w] >> b & 1) | ((self.z[w] >> b & 1) << 1);
        Pauli::from_bits(bits as u8)
    }

    #[inline]
    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let bits = p.to_bits();
        self.x[w] = self.x[w] & !(1 << b) | (Word::from(bits & 1) << b);
        self.z[w] = self.z[w] & !(1 << b) | (Word::from(bits >> 1) << b);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Phaseless product: componentwise XOR of the x and z parts.
    ///
    /// Panics on a qubit-count mismatch.
    pub fn multiply(&self, other: &PauliOp) -> PauliOp {
        let mut out = self.clone();
        out.multiply_assign(other);
        out
    }

    #[inline]
    pub fn multiply_assign(&mut self, other: &PauliOp) {
        assert_eq!(self.n, other.n, "dimension mismatch in Pauli product");
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Symplectic product: 0 iff the operators commute.
    ///
    /// Panics on a qubit-count mismatch.
    #[inline]
    pub fn symplectic_product(&self, other: &PauliOp) -> u8 {
        assert_eq!(self.n, other.n, "dimension mismatch in symplectic product");
        let mut acc: u32 = 0;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]).count_ones();
            acc ^= (self.z[i] & other.x[i]).count_ones();
        }
        (acc & 1) as u8
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        self.symplectic_product(other) == 0
    }

    /// Keep only the listed qubits, in the listed order.
    pub fn project(&self, keep: &[usize]) -> PauliOp {
        let mut out = PauliOp::identity(keep.len());
        for (j, &q) in keep.iter().enumerate() {
            out.set(j, self.get(q));
        }
        out
    }

    pub fn paulis(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(|i| self.get(i))
    }

    pub(crate) fn x_words(&self) -> &[Word] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[Word] {
        &self.z
    }

    /// Flatten into a 2n-bit row: x block then z block.
    fn to_row(&self, ncols: usize) -> Vec<Word> {
        debug_assert_eq!(ncols, 2 * self.n);
        let mut row = vec![0; gf2::words_for(ncols)];
        for q in 0..self.n {
            if self.x[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1 {
                row[q / WORD_BITS] |= 1 << (q % WORD_BITS);
            }
            let c = self.n + q;
            if self.z[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1 {
                row[c / WORD_BITS] |= 1 << (c % WORD_BITS);
            }
        }
        row
    }

    fn from_row(n: usize, row: &[Word]) -> PauliOp {
        let mut op = PauliOp::identity(n);
        for q in 0..n {
            let x = row[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1;
            let c = n + q;
            let z = row[c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1;
            op.set(q, Pauli::from_bits((u8::from(x)) | (u8::from(z) << 1)));
        }
        op
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.paulis() {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let paulis: Result<Vec<Pauli>, PauliError> = s.chars().map(Pauli::from_char).collect();
        Ok(PauliOp::from_paulis(paulis?))
    }
}

impl Serialize for PauliOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

fn assert_uniform(rows: &[PauliOp]) -> usize {
    let n = rows.first().map_or(0, |r| r.n);
    assert!(rows.iter().all(|r| r.n == n), "mixed qubit counts in row set");
    n
}

/// Row-reduce a set of operators over GF(2); returns an independent basis of
/// their span and its rank.
pub fn rref(rows: &[PauliOp]) -> (Vec<PauliOp>, usize) {
    let n = assert_uniform(rows);
    let mut m = BitMatrix::new(2 * n);
    for r in rows {
        m.push_row(r.to_row(2 * n));
    }
    let pivots = m.rref();
    let rank = pivots.len();
    let basis = (0..rank).map(|r| PauliOp::from_row(n, m.row(r))).collect();
    (basis, rank)
}

/// True iff `op` lies in the GF(2) span of `group_basis` (i.e. in the
/// phaseless group it generates).
pub fn contains(group_basis: &[PauliOp], op: &PauliOp) -> bool {
    let n = assert_uniform(group_basis);
    assert_eq!(op.n, n, "dimension mismatch in group membership test");
    let mut m = BitMatrix::new(2 * n);
    for r in group_basis {
        m.push_row(r.to_row(2 * n));
    }
    let pivots = m.rref();
    let rem = m.reduce(op.to_row(2 * n), &pivots);
    rem.iter().all(|&w| w == 0)
}

/// True iff two row sets span the same group.
pub fn span_eq(a: &[PauliOp], b: &[PauliOp]) -> bool {
    let (basis_a, rank_a) = rref(a);
    let (basis_b, rank_b) = rref(b);
    rank_a == rank_b && basis_a == basis_b
}

/// An \[\[n, k\]\] stabilizer code with explicit logical and destabilizer
/// generators. Immutable after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    stabilizers: Vec<PauliOp>,
    logical_x: Vec<PauliOp>,
    logical_z: Vec<PauliOp>,
    destabilizers: Vec<PauliOp>,
}

impl StabilizerCode {
    /// Build a code from stabilizer and logical generators, solving for a
    /// destabilizer basis and checking every group-structure invariant.
    pub fn new(
        n: usize,
        stabilizers: Vec<PauliOp>,
        logical_x: Vec<PauliOp>,
        logical_z: Vec<PauliOp>,
    ) -> Result<Self, PauliError> {
        let k = logical_x.len();
        if logical_z.len() != k {
            return Err(PauliError::InvalidCode(format!(
                "{} logical X generators but {} logical Z",
                k,
                logical_z.len()
            )));
        }
        if stabilizers.len() + k != n {
            return Err(PauliError::InvalidCode(format!(
                "{} stabilizers with k = {k} does not match n = {n}",
                stabilizers.len()
            )));
        }
        let destabilizers = solve_destabilizers(n, &stabilizers, &logical_x, &logical_z)?;
        let code = Self { n, k, stabilizers, logical_x, logical_z, destabilizers };
        code.validate()?;
        Ok(code)
    }

    /// Reassemble a code from previously computed generators (e.g. a loaded
    /// file), validating every invariant but keeping the destabilizers
    /// exactly as given.
    pub fn from_parts(
        n: usize,
        stabilizers: Vec<PauliOp>,
        logical_x: Vec<PauliOp>,
        logical_z: Vec<PauliOp>,
        destabilizers: Vec<PauliOp>,
    ) -> Result<Self, PauliError> {
        let k = logical_x.len();
        let code = Self { n, k, stabilizers, logical_x, logical_z, destabilizers };
        code.validate()?;
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stabilizers(&self) -> &[PauliOp] {
        &self.stabilizers
    }

    pub fn logical_x(&self) -> &[PauliOp] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOp] {
        &self.logical_z
    }

    pub fn destabilizers(&self) -> &[PauliOp] {
        &self.destabilizers
    }

    /// Check every invariant of the generator sets; used by the `verify`
    /// command and after deserializing code files.
    pub fn validate(&self) -> Result<(), PauliError> {
        let fail = |msg: String| Err(PauliError::InvalidCode(msg));
        if self.stabilizers.len() + self.k != self.n
            || self.logical_x.len() != self.k
            || self.logical_z.len() != self.k
            || self.destabilizers.len() != self.stabilizers.len()
        {
            return fail("generator counts inconsistent with (n, k)".into());
        }
        let all = |ops: &[PauliOp]| ops.iter().all(|p| p.n == self.n);
        if !(all(&self.stabilizers) && all(&self.logical_x) && all(&self.logical_z) && all(&self.destabilizers)) {
            return fail("generator qubit count differs from n".into());
        }
        for (i, a) in self.stabilizers.iter().enumerate() {
            for b in self.stabilizers.iter().skip(i + 1) {
                if !a.commutes_with(b) {
                    return fail(format!("stabilizers {a} and {b} anticommute"));
                }
            }
        }
        for (j, lx) in self.logical_x.iter().enumerate() {
            for (m, lz) in self.logical_z.iter().enumerate() {
                let want = u8::from(j == m);
                if lx.symplectic_product(lz) != want {
                    return fail(format!("logical pair ({j}, {m}) has wrong commutation"));
                }
            }
            for (m, lx2) in self.logical_x.iter().enumerate() {
                if m > j && !lx.commutes_with(lx2) {
                    return fail(format!("logical X {j} and {m} anticommute"));
                }
            }
        }
        for (j, lz) in self.logical_z.iter().enumerate() {
            for (m, lz2) in self.logical_z.iter().enumerate() {
                if m > j && !lz.commutes_with(lz2) {
                    return fail(format!("logical Z {j} and {m} anticommute"));
                }
            }
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            for s in &self.stabilizers {
                if !l.commutes_with(s) {
                    return fail(format!("logical {l} anticommutes with stabilizer {s}"));
                }
            }
        }
        for (i, d) in self.destabilizers.iter().enumerate() {
            for (j, s) in self.stabilizers.iter().enumerate() {
                let want = u8::from(i == j);
                if d.symplectic_product(s) != want {
                    return fail(format!("destabilizer {i} has wrong pairing with stabilizer {j}"));
                }
            }
            for l in self.logical_x.iter().chain(&self.logical_z) {
                if !d.commutes_with(l) {
                    return fail(format!("destabilizer {i} anticommutes with a logical"));
                }
            }
        }
        let mut gens: Vec<PauliOp> = self.stabilizers.clone();
        gens.extend(self.logical_x.iter().cloned());
        gens.extend(self.logical_z.iter().cloned());
        let (_, rank) = rref(&gens);
        if rank != self.n + self.k {
            return fail(format!("generators have rank {rank}, expected {}", self.n + self.k));
        }
        Ok(())
    }

    /// Syndrome bit i is the symplectic product of stabilizer i with `e`.
    pub fn syndrome(&self, e: &PauliOp) -> Vec<bool> {
        assert_eq!(e.n, self.n, "dimension mismatch in syndrome extraction");
        self.stabilizers.iter().map(|s| s.symplectic_product(e) == 1).collect()
    }

    /// The canonical pure error for syndrome `s`: the product of the
    /// destabilizers selected by the syndrome bits. Satisfies
    /// `syndrome(pure_error(s)) == s`.
    pub fn pure_error(&self, s: &[bool]) -> PauliOp {
        assert_eq!(s.len(), self.stabilizers.len(), "syndrome length mismatch");
        let mut f = PauliOp::identity(self.n);
        for (d, &bit) in self.destabilizers.iter().zip(s) {
            if bit {
                f.multiply_assign(d);
            }
        }
        f
    }

    /// Logical coset of a zero-syndrome operator (k = 1 only): which of
    /// {identity, X-bar, Y-bar, Z-bar} it multiplies the stabilizer group by.
    pub fn logical_class(&self, r: &PauliOp) -> Pauli {
        assert_eq!(self.k, 1, "logical_class requires exactly one logical qubit");
        debug_assert!(
            self.syndrome(r).iter().all(|&b| !b),
            "logical_class precondition violated: nonzero syndrome"
        );
        let anti_z = r.symplectic_product(&self.logical_z[0]);
        let anti_x = r.symplectic_product(&self.logical_x[0]);
        match (anti_z, anti_x) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (0, 1) => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    /// Minimum weight of a zero-syndrome operator with a non-identity logical
    /// class, by weight-ascending exhaustive search. Refuses above
    /// [`DISTANCE_SEARCH_CAP`] qubits.
    pub fn min_distance(&self) -> Result<usize, PauliError> {
        if self.n > DISTANCE_SEARCH_CAP {
            return Err(PauliError::DistanceTooLarge(self.n));
        }
        for w in 1..=self.n {
            let mut support: Vec<usize> = (0..w).collect();
            loop {
                if self.has_logical_on_support(&support) {
                    return Ok(w);
                }
                if !next_combination(&mut support, self.n) {
                    break;
                }
            }
        }
        Err(PauliError::InvalidCode("no logical operator found".into()))
    }

    fn has_logical_on_support(&self, support: &[usize]) -> bool {
        let w = support.len();
        let mut op = PauliOp::identity(self.n);
        for assignment in 0..3usize.pow(w as u32) {
            let mut a = assignment;
            for &q in support {
                op.set(q, [Pauli::X, Pauli::Y, Pauli::Z][a % 3]);
                a /= 3;
            }
            if self.syndrome(&op).iter().all(|&b| !b) && self.logical_class(&op) != Pauli::I {
                return true;
            }
            for &q in support {
                op.set(q, Pauli::I);
            }
        }
        false
    }
}

fn next_combination(support: &mut [usize], n: usize) -> bool {
    let w = support.len();
    let mut i = w;
    while i > 0 {
        i -= 1;
        if support[i] < n - w + i {
            support[i] += 1;
            for j in i + 1..w {
                support[j] = support[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solve for destabilizers: D_i anticommutes with stabilizer i only and
/// commutes with every other stabilizer and all logicals. The right-hand
/// sides pack one bit per stabilizer into a word, so the solve runs in
/// blocks of 64.
fn solve_destabilizers(
    n: usize,
    stabilizers: &[PauliOp],
    logical_x: &[PauliOp],
    logical_z: &[PauliOp],
) -> Result<Vec<PauliOp>, PauliError> {
    let m = stabilizers.len();
    let mut out = Vec::with_capacity(m);
    for block_start in (0..m.max(1)).step_by(WORD_BITS) {
        let block = block_start..(block_start + WORD_BITS).min(m);
        if block.is_empty() {
            break;
        }
        // Row r is the symplectic functional of generator r: v -> symp(g_r, v),
        // whose coefficient vector swaps the x and z blocks of g_r.
        let mut a = BitMatrix::new(2 * n);
        let mut rhs = Vec::new();
        for (i, s) in stabilizers.iter().enumerate() {
            a.push_row(swap_blocks(s));
            rhs.push(if block.contains(&i) { 1 << (i - block_start) } else { 0 });
        }
        for l in logical_x.iter().chain(logical_z) {
            a.push_row(swap_blocks(l));
            rhs.push(0);
        }
        let solutions = gf2::solve(&a, &rhs, block.len())
            .ok_or_else(|| PauliError::InvalidCode("destabilizer system is inconsistent".into()))?;
        out.extend(solutions.iter().map(|row| PauliOp::from_row(n, row)));
    }
    Ok(out)
}

fn swap_blocks(op: &PauliOp) -> Vec<Word> {
    let swapped = PauliOp { n: op.n, x: op.z.clone(), z: op.x.clone() };
    swapped.to_row(2 * op.n)
}
