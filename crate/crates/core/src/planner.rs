//! Length planning and recipe execution.
//!
//! A length `L` is reachable from an `N×N` base matrix when `L = N · l_0 · l_1 ⋯`
//! with every `l_j ≤ N`. The first factor is a cell size in the generation
//! step; each further factor is a cell size in one elongation round, whose
//! sub-family is the row set of an `l_j × l_j` matrix.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construct::{cosf_to_ccc, elongate_cosf, enlarge_ccc, generate_cosf, Partition};
use crate::corr::{is_ccc, is_n_co_sf, Claim};
use crate::error::{Error, Result};
use crate::matrices::MatrixSpec;
use crate::model::{Scalar, Sequence, SequenceFamily};

/// Executable description of a construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub base: BaseStep,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<Round>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<PostStep>,
}

/// Generation from an `n × n` matrix with one sub-matrix per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseStep {
    pub n: usize,
    pub matrix: MatrixSpec,
    pub cells: Partition,
    pub subs: Vec<MatrixSpec>,
}

/// One elongation round. Cells index rows of the current family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Round {
    pub cells: Partition,
    pub subs: Vec<SubFamilySpec>,
}

/// Source of an elongation sub-family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubFamilySpec {
    /// The rows of a matrix.
    Rows(MatrixSpec),
    /// Explicit sequences, one per set.
    Sequences(Vec<Vec<Scalar>>),
    /// The output of a nested recipe (without a post step).
    Recipe(Box<Recipe>),
}

impl SubFamilySpec {
    fn build(&self) -> Result<SequenceFamily> {
        match self {
            SubFamilySpec::Rows(m) => Ok(m.build()?.row_family()),
            SubFamilySpec::Sequences(seqs) => SequenceFamily::from_column(
                seqs.iter()
                    .map(|e| Sequence::new(e.clone()))
                    .collect::<Result<Vec<_>>>()?,
            ),
            SubFamilySpec::Recipe(r) => {
                if r.post.is_some() {
                    return Err(Error::Precondition(
                        "a nested recipe must produce a sequence family, not a CCC".into(),
                    ));
                }
                Ok(execute(r)?.family)
            }
        }
    }
}

/// Conversion to a CCC, optionally followed by enlargement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostStep {
    pub ccc: MatrixSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub enlarge: Vec<MatrixSpec>,
}

impl Recipe {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        crate::doc::to_json_layout(self, 4)
    }
}

/// Factors `q` greedily by its largest divisor not above `n`.
///
/// The chain is non-increasing. `Err(p)` returns a prime factor `p > n` that
/// blocks the factorization.
pub fn factor_chain(q: usize, n: usize) -> std::result::Result<Vec<usize>, usize> {
    assert!(q > 0 && n > 0);
    let mut chain = Vec::new();
    let mut rest = q;
    while rest > 1 {
        match (2..=n.min(rest)).rev().find(|d| rest.is_multiple_of(*d)) {
            Some(d) => {
                chain.push(d);
                rest /= d;
            }
            None => return Err(smallest_prime_factor(rest)),
        }
    }
    if chain.is_empty() {
        chain.push(1);
    }
    Ok(chain)
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..)
        .take_while(|d| d * d <= n)
        .find(|d| n.is_multiple_of(*d))
        .unwrap_or(n)
}

/// Whether `N | L` and `L / N` is a product of integers in `[1, N]`.
pub fn constructible(n: usize, l: usize) -> bool {
    fn search(q: usize, max: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
        if q == 1 {
            return true;
        }
        if let Some(&hit) = memo.get(&(q, max)) {
            return hit;
        }
        let found = (2..=max.min(q))
            .rev()
            .any(|d| q.is_multiple_of(d) && search(q / d, d, memo));
        memo.insert((q, max), found);
        found
    }
    n > 0 && l > 0 && l.is_multiple_of(n) && search(l / n, n, &mut HashMap::new())
}

fn unconstructible(n: usize, target: usize) -> Option<Error> {
    if target == 0 || !target.is_multiple_of(n) {
        return Some(Error::Unconstructible {
            n,
            target,
            reason: format!("{target} is not a positive multiple of {n}"),
        });
    }
    factor_chain(target / n, n).err().map(|p| Error::Unconstructible {
        n,
        target,
        reason: format!("factor {p} > {n}"),
    })
}

/// Plans a recipe whose output contains every target length.
///
/// Targets are merged into one generation step when their first factors sum
/// to at most `n`; otherwise the error lists a jointly feasible subset.
pub fn plan(n: usize, targets: &[usize]) -> Result<Recipe> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let targets: Vec<usize> = targets.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if targets.is_empty() {
        return Err(Error::Precondition("no target lengths given".into()));
    }
    if let Some(e) = targets.iter().find_map(|&t| unconstructible(n, t)) {
        return Err(e);
    }
    let chains: Vec<Vec<usize>> = targets
        .iter()
        .map(|&t| factor_chain(t / n, n).expect("checked above"))
        .collect();
    let needed: usize = chains.iter().map(|c| c[0]).sum();
    if needed > n {
        let mut used = 0;
        let feasible = targets
            .iter()
            .zip(&chains)
            .filter(|(_, c)| {
                let fits = used + c[0] <= n;
                if fits {
                    used += c[0];
                }
                fits
            })
            .map(|(&t, _)| t)
            .collect();
        return Err(Error::JointlyUnconstructible {
            n,
            targets,
            needed,
            feasible,
        });
    }

    // Generation: one cell per target, then singleton cells for spare rows.
    // `owned[j]` tracks the rows currently holding target j's sequences.
    let mut sizes: Vec<usize> = chains.iter().map(|c| c[0]).collect();
    sizes.extend(std::iter::repeat_n(1, n - needed));
    let mut subs: Vec<MatrixSpec> = sizes.iter().map(|&s| MatrixSpec::preferred(s)).collect();
    for s in subs.iter_mut().skip(chains.len()) {
        *s = MatrixSpec::Identity { dim: 1 };
    }
    let mut owned: Vec<Vec<usize>> = Vec::with_capacity(chains.len());
    let mut start = 0;
    for c in &chains {
        owned.push((start..start + c[0]).collect());
        start += c[0];
    }
    let base = BaseStep {
        n,
        matrix: MatrixSpec::preferred(n),
        cells: Partition::contiguous(&sizes)?,
        subs,
    };

    // Track row lengths to predict the output ordering of each round.
    let mut lengths: Vec<usize> = chains
        .iter()
        .flat_map(|c| std::iter::repeat_n(c[0] * n, c[0]))
        .chain(std::iter::repeat_n(n, n - needed))
        .collect();
    let depth = chains.iter().map(Vec::len).max().unwrap_or(1);
    let mut rounds = Vec::new();
    for r in 1..depth {
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut cell_subs = Vec::new();
        let mut cell_owner: Vec<Option<usize>> = Vec::new();
        let mut taken = vec![false; n];
        for (j, c) in chains.iter().enumerate() {
            if let Some(&l) = c.get(r) {
                let cell: Vec<usize> = owned[j][..l].to_vec();
                for &i in &cell {
                    taken[i] = true;
                }
                cells.push(cell);
                cell_subs.push(SubFamilySpec::Rows(MatrixSpec::preferred(l)));
                cell_owner.push(Some(j));
            }
        }
        for i in (0..n).filter(|&i| !taken[i]) {
            cells.push(vec![i]);
            cell_subs.push(SubFamilySpec::Rows(MatrixSpec::Identity { dim: 1 }));
            cell_owner.push(None);
        }
        let cells = Partition::new(n, cells)?;
        let order = crate::construct::elongation_cells(&lengths, &cells)?;
        let mut next_lengths = Vec::with_capacity(n);
        let mut next_owned: Vec<Vec<usize>> = vec![Vec::new(); chains.len()];
        for cell in &order {
            let k = cell.members.len();
            let len = lengths[cell.members[0]] * k;
            for _ in 0..k {
                let row = next_lengths.len();
                if let Some(j) = cell_owner[cell.cell] {
                    next_owned[j].push(row);
                }
                next_lengths.push(len);
            }
        }
        lengths = next_lengths;
        owned = next_owned;
        rounds.push(Round { cells, subs: cell_subs });
    }
    Ok(Recipe {
        base,
        rounds,
        post: None,
    })
}

/// One entry of the provenance log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub family_size: usize,
    pub set_size: usize,
    pub length_set: Vec<usize>,
    pub claim: Claim,
    pub verified: bool,
}

impl fmt::Display for StageRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: ({}, {}, {:?}) {} {}",
            self.stage,
            self.family_size,
            self.set_size,
            self.length_set,
            self.claim,
            if self.verified { "verified" } else { "NOT verified" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct Execution {
    pub family: SequenceFamily,
    pub log: Vec<StageRecord>,
}

impl Execution {
    /// Claim of the final family.
    pub fn claim(&self) -> Claim {
        self.log.last().expect("at least the base stage").claim
    }

    pub fn verified(&self) -> bool {
        self.log.iter().all(|r| r.verified)
    }
}

fn record(stage: &str, f: &SequenceFamily, claim: Claim) -> Result<StageRecord> {
    let report = match claim {
        Claim::Ccc => is_ccc(f),
        Claim::Cosf(n) => is_n_co_sf(f, n)?,
        Claim::Cs => unreachable!("stages never claim a single complementary set"),
    };
    Ok(StageRecord {
        stage: stage.to_string(),
        family_size: f.family_size(),
        set_size: f.set_size(),
        length_set: f.length_set().into_iter().collect(),
        claim,
        verified: report.verified(),
    })
}

/// Runs a recipe, verifying every intermediate family.
pub fn execute(r: &Recipe) -> Result<Execution> {
    let n = r.base.n;
    let stage = |name: &str| {
        let name = name.to_string();
        move |e: Error| e.at_stage(name)
    };
    let mut log = Vec::new();
    let mut family = (|| {
        let u = r.base.matrix.build()?;
        if u.dim() != n {
            return Err(Error::DimensionMismatch {
                cell: 0,
                expected: n,
                got: u.dim(),
            });
        }
        let subs = r.base.subs.iter().map(MatrixSpec::build).collect::<Result<Vec<_>>>()?;
        generate_cosf(&u, &r.base.cells, &subs)
    })()
    .map_err(stage("base"))?;
    log.push(record("base", &family, Claim::Cosf(n)).map_err(stage("base"))?);

    for (i, round) in r.rounds.iter().enumerate() {
        let name = format!("round {}", i + 1);
        family = (|| {
            let subs = round
                .subs
                .iter()
                .map(SubFamilySpec::build)
                .collect::<Result<Vec<_>>>()?;
            elongate_cosf(&family, &round.cells, &subs)
        })()
        .map_err(stage(&name))?;
        log.push(record(&name, &family, Claim::Cosf(n)).map_err(stage(&name))?);
    }

    if let Some(post) = &r.post {
        family = post
            .ccc
            .build()
            .and_then(|u| cosf_to_ccc(&family, &u))
            .map_err(stage("ccc"))?;
        log.push(record("ccc", &family, Claim::Ccc)?);
        if !post.enlarge.is_empty() {
            family = post
                .enlarge
                .iter()
                .map(MatrixSpec::build)
                .collect::<Result<Vec<_>>>()
                .and_then(|us| enlarge_ccc(&family, &us))
                .map_err(stage("enlarge"))?;
            log.push(record("enlarge", &family, Claim::Ccc)?);
        }
    }
    Ok(Execution { family, log })
}
