//! Construction operators and the generation/extension algorithms.
//!
//! * [`connect`] interleaves scaled copies of a set's sequences,
//!   `v ⊙ A = (v_{[k]_N} a_{[k]_M})_{k < lcm(M, N)}`.
//! * [`generate_cosf`] partitions the rows of a unitary-like matrix and
//!   connects each cell with the rows of a smaller unitary-like matrix,
//!   giving an optimal N-CO-SF.
//! * [`elongate_cosf`] regroups an N-CO-SF by length, splits each group into
//!   cells of equal-energy sequences, and connects each cell with a smaller
//!   CO-SF, producing longer sequences while keeping N-shift orthogonality.
//! * [`cosf_to_ccc`] and [`ccc_from_unitary`] turn an optimal N-CO-SF into an
//!   `(N, N, 𝕃)` CCC; [`enlarge_ccc`] grows the set size with `⊗`.
//!
//! Output ordering follows path vectors lexicographically, so every
//! construction is deterministic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corr::{is_ccc, is_n_co_sf, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrices::UnitaryLike;
use crate::model::{Mode, PathVector, Scalar, Sequence, SequenceFamily, SequenceSet};

/// A one-level partition of `{0, .., n-1}` into ordered, non-empty cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    universe: usize,
    cells: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(universe: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::from_cells(cells)?;
        if p.universe != universe {
            return Err(Error::InvalidPartition(format!(
                "cells cover {} elements, expected {universe}",
                p.universe
            )));
        }
        Ok(p)
    }

    /// Builds a partition of `{0, .., k-1}` where `k` is the total cell size.
    pub fn from_cells(cells: Vec<Vec<usize>>) -> Result<Self> {
        let universe: usize = cells.iter().map(Vec::len).sum();
        let mut seen = vec![false; universe];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidPartition(format!("cell {c} is empty")));
            }
            for &i in cell {
                if i >= universe {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} in cell {c} is outside 0..{universe}"
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
            }
        }
        Ok(Partition { universe, cells })
    }

    /// A single cell holding everything.
    pub fn whole(n: usize) -> Self {
        Partition {
            universe: n,
            cells: vec![(0..n).collect()],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            universe: n,
            cells: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Consecutive cells of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let cells = sizes
            .iter()
            .map(|&s| {
                let c: Vec<usize> = (start..start + s).collect();
                start += s;
                c
            })
            .collect();
        Self::from_cells(cells)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Level-one path vectors `(p_1)` of the cells.
    pub fn paths(&self) -> Vec<PathVector> {
        (0..self.cells.len())
            .map(|p| PathVector::new(vec![p]).expect("non-empty"))
            .collect()
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;
    fn try_from(cells: Vec<Vec<usize>>) -> Result<Self> {
        Partition::from_cells(cells)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.cells
    }
}

/// Connection `v ⊙ A`: with `K = lcm(|A|, |v|)`, the concatenation of
/// `v_{[k] mod |v|} · a_{[k] mod |A|}` for `k < K`.
pub fn connect(v: &Sequence, a: &SequenceSet) -> Sequence {
    let (nv, m) = (v.len(), a.size());
    let k = num_integer::lcm(nv, m);
    let parts: Vec<Sequence> = (0..k)
        .map(|i| a.sequences()[i % m].scaled(&v.entries()[i % nv]))
        .collect();
    Sequence::concat(&parts).expect("parts are non-empty")
}

/// Expansion `v ⊗ C`: the `|v|·|C|` sequences `v_{[k] mod |v|} · c_{⌊k / |v|⌋}`.
pub fn kron_expand(v: &Sequence, c: &SequenceSet) -> SequenceSet {
    let m = v.len();
    let seqs = (0..m * c.size())
        .map(|k| c.sequences()[k / m].scaled(&v.entries()[k % m]))
        .collect();
    SequenceSet::new(seqs).expect("scaling keeps lengths")
}

/// Entry-wise product `(u_n v_n)_n`.
pub fn entrywise(u: &Sequence, v: &Sequence) -> Result<Sequence> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Sequence::new(u.entries().iter().zip(v.entries()).map(|(a, b)| a * b).collect())
}

/// Dyadic (bitwise, carry-free) sum of two indices.
pub fn dyadic_sum(n: usize, m: usize) -> usize {
    n ^ m
}

fn ensure_mode(expected: Mode, got: Mode, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::ModeMismatch(what.to_string()));
    }
    Ok(())
}

fn require_verified(report: crate::corr::Report, what: impl FnOnce() -> String) -> Result<()> {
    if report.verified() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{} ({report})", what())))
    }
}

/// Generates an optimal `(N, 1, 𝕃)` N-CO-SF from the rows of `u`.
///
/// `subs[p]` is the unitary-like matrix for cell `p` of `part`; its dimension
/// must equal the cell size. Cell `p` yields `|cell|` sequences of length
/// `|cell| · N`, in row order of `subs[p]`.
pub fn generate_cosf(u: &UnitaryLike, part: &Partition, subs: &[UnitaryLike]) -> Result<SequenceFamily> {
    let n = u.dim();
    if part.universe() != n {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} rows but the matrix has {n}",
            part.universe()
        )));
    }
    if subs.len() != part.len() {
        return Err(Error::SizeMismatch {
            expected: part.len(),
            got: subs.len(),
        });
    }
    let rows = u.rows();
    let mut out = Vec::with_capacity(n);
    for (p, (cell, sub)) in part.cells().iter().zip(subs).enumerate() {
        if sub.dim() != cell.len() {
            return Err(Error::DimensionMismatch {
                cell: p,
                expected: cell.len(),
                got: sub.dim(),
            });
        }
        ensure_mode(u.mode(), sub.mode(), "a generation sub-matrix")?;
        let a = SequenceSet::new(cell.iter().map(|&i| rows[i].clone()).collect())?;
        out.extend((0..sub.dim()).map(|m| connect(&sub.row(m), &a)));
    }
    SequenceFamily::from_column(out)
}

/// A second-level cell of an elongation, with its path `(p_1, p_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level2Cell {
    pub path: PathVector,
    /// Index of the cell in the caller's partition.
    pub cell: usize,
    /// Member rows of the input family.
    pub members: Vec<usize>,
}

/// Orders the level-two cells of an elongation.
///
/// The first level groups sequences by length (ascending); a cell must sit in
/// a single group. Within a group, cells keep their order in `part`.
pub fn elongation_cells(lengths: &[usize], part: &Partition) -> Result<Vec<Level2Cell>> {
    if part.universe() != lengths.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} sequences but the family has {}",
            part.universe(),
            lengths.len()
        )));
    }
    let groups: Vec<usize> = lengths.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut cells = Vec::with_capacity(part.len());
    for (c, members) in part.cells().iter().enumerate() {
        let first = lengths[members[0]];
        if let Some(&other) = members.iter().map(|&i| &lengths[i]).find(|&&l| l != first) {
            return Err(Error::LengthInconsistentCell { cell: c, first, other });
        }
        let group = groups.binary_search(&first).expect("length was collected");
        cells.push((group, c, members.clone()));
    }
    cells.sort_by_key(|&(g, c, _)| (g, c));
    let mut out = Vec::with_capacity(cells.len());
    let mut within = 0;
    let mut prev_group = usize::MAX;
    for (g, c, members) in cells {
        if g != prev_group {
            within = 0;
            prev_group = g;
        }
        out.push(Level2Cell {
            path: PathVector::new(vec![g, within]).expect("two levels"),
            cell: c,
            members,
        });
        within += 1;
    }
    Ok(out)
}

fn energies_match(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => {
            let (x, y) = (a.to_complex(), b.to_complex());
            (x - y).norm() <= DEFAULT_TOLERANCE * x.norm().max(y.norm())
        }
    }
}

/// Elongates an N-CO-SF.
///
/// `part` splits the rows of `a` into cells; each cell must hold sequences of
/// one length and one energy. `subs[c]` is a `|cell c|`-CO-SF of family size
/// `|cell c|`, whose `m`-th sequence is connected with cell `c`. Output rows are
/// ordered by `(p_1, p_2, m)` as returned by [`elongation_cells`].
pub fn elongate_cosf(a: &SequenceFamily, part: &Partition, subs: &[SequenceFamily]) -> Result<SequenceFamily> {
    let n = a.family_size();
    let column = a.column()?;
    require_verified(is_n_co_sf(a, n)?, || format!("input is not an optimal {n}-CO-SF"))?;
    if subs.len() != part.len() {
        return Err(Error::SizeMismatch {
            expected: part.len(),
            got: subs.len(),
        });
    }
    let lengths: Vec<usize> = column.iter().map(|s| s.len()).collect();
    let cells = elongation_cells(&lengths, part)?;
    let energies: Vec<Scalar> = column.iter().map(|s| s.energy()).collect();

    for cell in &cells {
        let sub = &subs[cell.cell];
        let k = cell.members.len();
        if sub.family_size() != k {
            return Err(Error::DimensionMismatch {
                cell: cell.cell,
                expected: k,
                got: sub.family_size(),
            });
        }
        ensure_mode(a.mode(), sub.mode(), "an elongation sub-family")?;
        require_verified(is_n_co_sf(sub, k)?, || {
            format!("sub-family for cell {} is not a {k}-CO-SF", cell.cell)
        })?;
        let first = cell.members[0];
        for &i in &cell.members[1..] {
            if !energies_match(&energies[first], &energies[i]) {
                return Err(Error::EnergyMismatch {
                    cell: cell.cell,
                    a: first,
                    b: i,
                    ea: energies[first].to_string(),
                    eb: energies[i].to_string(),
                });
            }
        }
    }

    let mut out = Vec::with_capacity(n);
    for cell in &cells {
        let set = SequenceSet::new(cell.members.iter().map(|&i| column[i].clone()).collect())?;
        for v in subs[cell.cell].column()? {
            out.push(connect(v, &set));
        }
    }
    SequenceFamily::from_column(out)
}

/// Builds an `(N, N, 𝕃)` CCC from an optimal N-CO-SF:
/// `c^m_n(k) = u^n_{[k]_N} · s^m(k)`.
pub fn cosf_to_ccc(s: &SequenceFamily, u: &UnitaryLike) -> Result<SequenceFamily> {
    let n = u.dim();
    if s.family_size() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: s.family_size(),
        });
    }
    ensure_mode(s.mode(), u.mode(), "a CCC generation")?;
    let column = s.column()?;
    require_verified(is_n_co_sf(s, n)?, || format!("input is not a {n}-CO-SF"))?;
    let u_rows = u.rows();
    let rows = column
        .iter()
        .map(|seq| {
            let split = SequenceSet::new(
                seq.entries()
                    .iter()
                    .map(|e| Sequence::new(vec![e.clone()]))
                    .collect::<Result<Vec<_>>>()?,
            )?;
            Ok(u_rows.iter().map(|row| connect(row, &split)).collect())
        })
        .collect::<Result<Vec<Vec<Sequence>>>>()?;
    SequenceFamily::from_rows(rows)
}

/// `c^m_n = u^m · u^n` (entry-wise), an `(N, N, {N})` CCC.
pub fn ccc_from_unitary(u: &UnitaryLike) -> SequenceFamily {
    let rows = u.rows();
    let out = rows
        .iter()
        .map(|um| {
            rows.iter()
                .map(|un| entrywise(um, un).expect("rows share the matrix dimension"))
                .collect()
        })
        .collect();
    SequenceFamily::from_rows(out).expect("square matrix gives a rectangular family")
}

/// Enlarges an `(N, N, 𝕃)` CCC to an `(MN, MN, 𝕃)` CCC with
/// `𝔼^{nM+m} = u^{(n),m} ⊗ ℂ^n`.
pub fn enlarge_ccc(c: &SequenceFamily, us: &[UnitaryLike]) -> Result<SequenceFamily> {
    let n = c.family_size();
    if c.set_size() != n {
        return Err(Error::Precondition(format!(
            "enlargement needs an (N, N) CCC, got ({}, {})",
            n,
            c.set_size()
        )));
    }
    if us.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: us.len(),
        });
    }
    let m = us[0].dim();
    for (i, u) in us.iter().enumerate() {
        if u.dim() != m {
            return Err(Error::DimensionMismatch {
                cell: i,
                expected: m,
                got: u.dim(),
            });
        }
        ensure_mode(c.mode(), u.mode(), "an enlargement matrix")?;
    }
    require_verified(is_ccc(c), || "input is not a CCC".to_string())?;
    let mut sets = Vec::with_capacity(n * m);
    for (set, u) in c.sets().iter().zip(us) {
        for row in u.rows() {
            sets.push(kron_expand(&row, set));
        }
    }
    SequenceFamily::new(sets)
}
