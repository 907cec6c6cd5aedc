//! Sequences, sequence sets and sequence families.
//!
//! A sequence set is an ordered list of equal-length sequences and a family is
//! an ordered list of sets of the same size, so a family is also an `M × N`
//! matrix whose entries are sequences. Order matters for correlation sums,
//! which pair sequences by index. The convention that two families are the
//! same when they differ only by re-indexing is provided by
//! [`canonical_form`] and [`equal_up_to_indexing`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo::{CycloNum, MAX_ORDER};
use crate::error::{Error, Result};

/// Largest set size accepted by the exhaustive canonical-form search.
pub const CANONICAL_MAX_COLUMNS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        })
    }
}

/// A sequence entry: an exact cyclotomic integer or a double-precision complex.
///
/// Arithmetic between an exact and an approximate scalar evaluates the exact
/// one numerically; constructors of sequences, sets and families reject such
/// mixtures so that exact checks never degrade silently.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(CycloNum),
    Approx(Complex64),
}

impl Scalar {
    pub fn one() -> Self {
        Scalar::Exact(CycloNum::one())
    }

    pub fn zero() -> Self {
        Scalar::Exact(CycloNum::zero(1))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(CycloNum::from_int(n))
    }

    /// `ζ_order^exponent`, exactly.
    pub fn root(order: usize, exponent: i64) -> Self {
        Scalar::Exact(CycloNum::root(order, exponent))
    }

    pub fn approx(re: f64, im: f64) -> Self {
        Scalar::Approx(Complex64::new(re, im))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approx,
        }
    }

    pub fn as_exact(&self) -> Option<&CycloNum> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Approx(_) => None,
        }
    }

    /// Ring order of an exact scalar; approximate scalars report 1.
    pub fn order(&self) -> usize {
        match self {
            Scalar::Exact(c) => c.order(),
            Scalar::Approx(_) => 1,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_complex(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Approx(z) => Scalar::Approx(z.conj()),
        }
    }

    /// Exact zero test for exact scalars, `== 0.0` for approximate ones.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Approx(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Zero test used by the verifiers: exact for exact scalars, `|z| <= tol` otherwise.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Approx(z) => z.norm() <= tol,
        }
    }

    fn combine(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(&CycloNum, &CycloNum) -> CycloNum,
        approx: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Approx(approx(self.to_complex(), rhs.to_complex())),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => a == b,
            _ => false,
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Approx(z) => Scalar::Approx(-z),
        }
    }
}

impl From<CycloNum> for Scalar {
    fn from(c: CycloNum) -> Self {
        Scalar::Exact(c)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Approx(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Approx(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

fn coeff_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(2))?;
        match self {
            Scalar::Exact(c) => {
                map.serialize_entry("order", &c.order())?;
                let coeffs: Vec<_> = c.coeffs().iter().map(coeff_json).collect();
                map.serialize_entry("coeffs", &coeffs)?;
            }
            Scalar::Approx(z) => {
                map.serialize_entry("re", &z.re)?;
                map.serialize_entry("im", &z.im)?;
            }
        }
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Int(i64),
    Exact { order: usize, coeffs: Vec<CoeffRepr> },
    Approx { re: f64, im: f64 },
}

fn parse_int_text(s: &str) -> Option<BigInt> {
    match s.trim() {
        "+" => Some(BigInt::one()),
        "-" | "\u{2212}" => Some(-BigInt::one()),
        t => t.replace('\u{2212}', "-").parse().ok(),
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match ScalarRepr::deserialize(de)? {
            ScalarRepr::Text(s) => parse_int_text(&s)
                .map(|v| Scalar::Exact(CycloNum::new(1, vec![v]).expect("order 1")))
                .ok_or_else(|| D::Error::custom(format!("invalid scalar literal {s:?}"))),
            ScalarRepr::Int(v) => Ok(Scalar::int(v)),
            ScalarRepr::Exact { order, coeffs } => {
                if order > MAX_ORDER {
                    return Err(D::Error::custom(
                        Error::OrderTooLarge {
                            order,
                            limit: MAX_ORDER,
                        }
                        .to_string(),
                    ));
                }
                let coeffs = coeffs
                    .into_iter()
                    .map(|c| match c {
                        CoeffRepr::Int(v) => Ok(BigInt::from(v)),
                        CoeffRepr::Text(s) => {
                            parse_int_text(&s).ok_or_else(|| D::Error::custom(format!("invalid coefficient {s:?}")))
                        }
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                CycloNum::new(order, coeffs)
                    .map(Scalar::Exact)
                    .map_err(|e| D::Error::custom(e.to_string()))
            }
            ScalarRepr::Approx { re, im } => Ok(Scalar::approx(re, im)),
        }
    }
}

/// A finite sequence; entries outside `0..len` are treated as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    entries: Vec<Scalar>,
}

impl Sequence {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        let first = entries.first().ok_or(Error::EmptySequence)?.mode();
        if entries.iter().any(|e| e.mode() != first) {
            return Err(Error::ModeMismatch("a sequence".into()));
        }
        Ok(Sequence { entries })
    }

    /// Parses a `±` string such as `"+++-"` into an exact sequence; `0` is
    /// also accepted.
    pub fn from_signs(signs: &str) -> Result<Self> {
        let entries = signs
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '+' => Ok(Scalar::one()),
                '-' | '\u{2212}' => Ok(Scalar::int(-1)),
                '0' => Ok(Scalar::zero()),
                other => Err(Error::Precondition(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Scalar::int(v)).collect())
    }

    /// The all-zero sequence `0_len`.
    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Scalar::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn mode(&self) -> Mode {
        self.entries[0].mode()
    }

    /// Least common multiple of the entry orders.
    pub fn order(&self) -> usize {
        self.entries.iter().fold(1, |k, e| k.lcm(&e.order()))
    }

    pub fn scaled(&self, c: &Scalar) -> Sequence {
        Sequence {
            entries: self.entries.iter().map(|e| c * e).collect(),
        }
    }

    pub fn conj(&self) -> Sequence {
        Sequence {
            entries: self.entries.iter().map(Scalar::conj).collect(),
        }
    }

    /// Concatenation `(s_0 s_1 ... s_{k-1})`.
    pub fn concat<'a, I>(parts: I) -> Result<Sequence>
    where
        I: IntoIterator<Item = &'a Sequence>,
    {
        let entries: Vec<Scalar> = parts.into_iter().flat_map(|p| p.entries.iter().cloned()).collect();
        Sequence::new(entries)
    }

    /// `E_s = R_s(0) = Σ |s(l)|²`.
    pub fn energy(&self) -> Scalar {
        crate::corr::acorr(self, self, 0)
    }

    pub fn is_zero_sequence(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    fn all_signs(&self) -> Option<String> {
        self.entries
            .iter()
            .map(|e| match e {
                Scalar::Exact(c) => match c.as_integer() {
                    Some(v) if v.is_one() => Some('+'),
                    Some(v) if (-v.clone()).is_one() => Some('-'),
                    _ => None,
                },
                Scalar::Approx(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(signs) = self.all_signs() {
            return write!(f, "({signs})");
        }
        if self.is_zero_sequence() {
            return write!(f, "0_{}", self.len());
        }
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// An `(N, L)` sequence set.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSet {
    seqs: Vec<Sequence>,
}

impl SequenceSet {
    pub fn new(seqs: Vec<Sequence>) -> Result<Self> {
        let first = seqs.first().ok_or(Error::EmptySet)?;
        let (len, mode) = (first.len(), first.mode());
        for s in &seqs[1..] {
            if s.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: s.len(),
                });
            }
            if s.mode() != mode {
                return Err(Error::ModeMismatch("a sequence set".into()));
            }
        }
        Ok(SequenceSet { seqs })
    }

    pub fn size(&self) -> usize {
        self.seqs.len()
    }

    /// Common length `L` of the member sequences.
    pub fn seq_len(&self) -> usize {
        self.seqs[0].len()
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.seqs
    }

    pub fn into_sequences(self) -> Vec<Sequence> {
        self.seqs
    }

    pub fn mode(&self) -> Mode {
        self.seqs[0].mode()
    }

    pub fn order(&self) -> usize {
        self.seqs.iter().fold(1, |k, s| k.lcm(&s.order()))
    }

    /// `E_S = Σ_n E_{s_n}`.
    pub fn energy(&self) -> Scalar {
        crate::corr::corr_sum(self, self, 0).expect("a set has the same size as itself")
    }
}

/// An `(M, N, 𝕃)` sequence family.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceFamily {
    sets: Vec<SequenceSet>,
}

impl SequenceFamily {
    pub fn new(sets: Vec<SequenceSet>) -> Result<Self> {
        let first = sets.first().ok_or(Error::EmptyFamily)?;
        let (n, mode) = (first.size(), first.mode());
        for s in &sets[1..] {
            if s.size() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: s.size(),
                });
            }
            if s.mode() != mode {
                return Err(Error::ModeMismatch("a sequence family".into()));
            }
        }
        Ok(SequenceFamily { sets })
    }

    /// An `(M, 1, 𝕃)` family, one single-sequence set per entry.
    pub fn from_column(seqs: Vec<Sequence>) -> Result<Self> {
        let sets = seqs
            .into_iter()
            .map(|s| SequenceSet::new(vec![s]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets)
    }

    /// Builds a family from rows of sequences (the matrix view).
    pub fn from_rows(rows: Vec<Vec<Sequence>>) -> Result<Self> {
        let sets = rows.into_iter().map(SequenceSet::new).collect::<Result<Vec<_>>>()?;
        Self::new(sets)
    }

    /// Family size `M`.
    pub fn family_size(&self) -> usize {
        self.sets.len()
    }

    /// Set size `N`.
    pub fn set_size(&self) -> usize {
        self.sets[0].size()
    }

    pub fn sets(&self) -> &[SequenceSet] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<SequenceSet> {
        self.sets
    }

    pub fn get(&self, m: usize, n: usize) -> Option<&Sequence> {
        self.sets.get(m).and_then(|s| s.sequences().get(n))
    }

    pub fn mode(&self) -> Mode {
        self.sets[0].mode()
    }

    pub fn order(&self) -> usize {
        self.sets.iter().fold(1, |k, s| k.lcm(&s.order()))
    }

    /// The set of distinct set lengths, recomputed on each call.
    pub fn length_set(&self) -> BTreeSet<usize> {
        self.sets.iter().map(SequenceSet::seq_len).collect()
    }

    /// The sequences of an `(M, 1, 𝕃)` family in set order.
    pub fn column(&self) -> Result<Vec<&Sequence>> {
        if self.set_size() != 1 {
            return Err(Error::SizeMismatch {
                expected: 1,
                got: self.set_size(),
            });
        }
        Ok(self.sets.iter().map(|s| &s.sequences()[0]).collect())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Sequence]> {
        self.sets.iter().map(SequenceSet::sequences)
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Address of a cell in a multi-level partition tree, `(p_1, ..., p_q)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathVector(Vec<usize>);

impl PathVector {
    pub fn new(path: Vec<usize>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::Precondition("a path vector needs at least one level".into()));
        }
        Ok(PathVector(path))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// The path extended by one more level.
    pub fn child(&self, index: usize) -> PathVector {
        let mut p = self.0.clone();
        p.push(index);
        PathVector(p)
    }
}

impl fmt::Display for PathVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `R_s(0)`.
pub fn energy(s: &Sequence) -> Scalar {
    s.energy()
}

/// `E_S`, the sum of member energies.
pub fn family_energy(set: &SequenceSet) -> Scalar {
    set.energy()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EntryKey {
    Exact(Vec<BigInt>),
    Approx(i64, i64),
}

type SeqKey = (usize, Vec<EntryKey>);

const APPROX_GRID: f64 = 1e9;

fn normalize_entry(e: &Scalar, order: usize) -> (Scalar, EntryKey) {
    match e {
        Scalar::Exact(c) => {
            let n = c
                .promote(order)
                .expect("family order is a multiple of every entry order")
                .normalized();
            let key = EntryKey::Exact(n.coeffs().to_vec());
            (Scalar::Exact(n), key)
        }
        Scalar::Approx(z) => {
            let key = EntryKey::Approx((z.re * APPROX_GRID).round() as i64, (z.im * APPROX_GRID).round() as i64);
            (e.clone(), key)
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn canonical_at(f: &SequenceFamily, order: usize) -> Result<SequenceFamily> {
    let n = f.set_size();
    if n > CANONICAL_MAX_COLUMNS {
        return Err(Error::SearchBudget {
            n,
            limit: CANONICAL_MAX_COLUMNS,
        });
    }
    let mut normalized: Vec<Vec<Sequence>> = Vec::with_capacity(f.family_size());
    let mut keys: Vec<Vec<SeqKey>> = Vec::with_capacity(f.family_size());
    for row in f.rows() {
        let mut nrow = Vec::with_capacity(n);
        let mut krow = Vec::with_capacity(n);
        for s in row {
            let (entries, ek): (Vec<Scalar>, Vec<EntryKey>) =
                s.entries().iter().map(|e| normalize_entry(e, order)).unzip();
            nrow.push(Sequence { entries });
            krow.push((s.len(), ek));
        }
        normalized.push(nrow);
        keys.push(krow);
    }

    // Rank sequences once so each permutation only compares small integers.
    let mut distinct: Vec<&SeqKey> = keys.iter().flatten().collect();
    distinct.sort();
    distinct.dedup();
    let ids: Vec<Vec<usize>> = keys
        .iter()
        .map(|row| {
            row.iter()
                .map(|k| distinct.binary_search(&k).expect("key was collected"))
                .collect()
        })
        .collect();

    let mut perm: Vec<usize> = (0..n).collect();
    // (sorted rows, column order, row order) of the smallest image so far
    #[allow(clippy::type_complexity)]
    let mut best: Option<(Vec<Vec<usize>>, Vec<usize>, Vec<usize>)> = None;
    loop {
        let mut rows: Vec<(Vec<usize>, usize)> = ids
            .iter()
            .enumerate()
            .map(|(m, r)| (perm.iter().map(|&c| r[c]).collect(), m))
            .collect();
        rows.sort();
        let matrix: Vec<Vec<usize>> = rows.iter().map(|(r, _)| r.clone()).collect();
        let better = match &best {
            None => true,
            Some((b, _, _)) => matrix.cmp(b) == Ordering::Less,
        };
        if better {
            let order_rows = rows.iter().map(|(_, m)| *m).collect();
            best = Some((matrix, perm.clone(), order_rows));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (_, perm, row_order) = best.expect("at least one permutation");
    let rows = row_order
        .iter()
        .map(|&m| perm.iter().map(|&c| normalized[m][c].clone()).collect())
        .collect();
    SequenceFamily::from_rows(rows)
}

fn key_matrix(f: &SequenceFamily, order: usize) -> Vec<Vec<SeqKey>> {
    f.rows()
        .map(|row| {
            row.iter()
                .map(|s| {
                    (
                        s.len(),
                        s.entries().iter().map(|e| normalize_entry(e, order).1).collect(),
                    )
                })
                .collect()
        })
        .collect()
}

/// Searches for a column bijection under which the row multisets agree,
/// pruning on the multiset of row prefixes after each assigned column.
fn exact_match(a: &SequenceFamily, b: &SequenceFamily, order: usize) -> bool {
    let (ka, kb) = (key_matrix(a, order), key_matrix(b, order));
    let mut distinct: Vec<&SeqKey> = ka.iter().chain(&kb).flatten().collect();
    distinct.sort();
    distinct.dedup();
    let rank = |rows: &[Vec<SeqKey>]| -> Vec<Vec<usize>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|k| distinct.binary_search(&k).expect("collected"))
                    .collect()
            })
            .collect()
    };
    let (ia, ib) = (rank(&ka), rank(&kb));
    let n = a.set_size();
    let column = |m: &[Vec<usize>], c: usize| {
        let mut v: Vec<usize> = m.iter().map(|r| r[c]).collect();
        v.sort_unstable();
        v
    };
    let cols_a: Vec<Vec<usize>> = (0..n).map(|c| column(&ia, c)).collect();
    let cols_b: Vec<Vec<usize>> = (0..n).map(|c| column(&ib, c)).collect();

    fn prefixes(m: &[Vec<usize>], cols: &[usize]) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = m.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        v.sort_unstable();
        v
    }

    struct Search<'a> {
        ia: &'a [Vec<usize>],
        ib: &'a [Vec<usize>],
        cols_a: &'a [Vec<usize>],
        cols_b: &'a [Vec<usize>],
        used: Vec<bool>,
        perm: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self) -> bool {
            let j = self.perm.len();
            if j == self.used.len() {
                return true;
            }
            let identity: Vec<usize> = (0..=j).collect();
            let want = prefixes(self.ia, &identity);
            for c in 0..self.used.len() {
                if self.used[c] || self.cols_b[c] != self.cols_a[j] {
                    continue;
                }
                self.perm.push(c);
                if prefixes(self.ib, &self.perm) == want {
                    self.used[c] = true;
                    if self.run() {
                        return true;
                    }
                    self.used[c] = false;
                }
                self.perm.pop();
            }
            false
        }
    }

    Search {
        ia: &ia,
        ib: &ib,
        cols_a: &cols_a,
        cols_b: &cols_b,
        used: vec![false; n],
        perm: Vec::with_capacity(n),
    }
    .run()
}

/// Representative of the family's class under set re-indexing and a joint
/// re-indexing of sequences within sets.
///
/// Exact entries are promoted to the family's ring order and reduced, so the
/// output is in normal form. The search is exhaustive over column
/// permutations and therefore limited to `N <= 8`.
pub fn canonical_form(f: &SequenceFamily) -> Result<SequenceFamily> {
    canonical_at(f, f.order())
}

/// True when the two families coincide up to indexing of sets and sequences.
///
/// Exact families of any size are compared by a pruned matching search;
/// approximate families go through [`canonical_form`] and share its limit.
pub fn equal_up_to_indexing(a: &SequenceFamily, b: &SequenceFamily) -> Result<bool> {
    if a.mode() != b.mode() {
        return Err(Error::ModeMismatch("an indexing comparison".into()));
    }
    if a.family_size() != b.family_size() || a.set_size() != b.set_size() {
        return Ok(false);
    }
    if a == b {
        return Ok(true);
    }
    let order = a.order().lcm(&b.order());
    if a.mode() == Mode::Exact {
        return Ok(exact_match(a, b, order));
    }
    let (ca, cb) = (canonical_at(a, order)?, canonical_at(b, order)?);
    Ok(match a.mode() {
        Mode::Exact => unreachable!(),
        Mode::Approx => {
            let scale = ca
                .sets()
                .iter()
                .chain(cb.sets())
                .map(|s| s.energy().to_complex().norm())
                .fold(1.0, f64::max);
            ca.rows().zip(cb.rows()).all(|(ra, rb)| {
                ra.iter().zip(rb).all(|(x, y)| {
                    x.len() == y.len()
                        && x.entries()
                            .iter()
                            .zip(y.entries())
                            .all(|(p, q)| (p.to_complex() - q.to_complex()).norm() <= 1e-9 * scale)
                })
            })
        }
    })
}
