//! Aperiodic and periodic correlations, correlation sums, and the predicates
//! built on them: complementary set, complete complementary code, N-shift
//! cross-orthogonality, and the adjacent-sequence zone of a CCC.
//!
//! Every predicate produces a [`Report`] listing each shift where a sum that
//! should vanish does not, with its residual; the verdict is derived from it.
//! Exact families are decided without tolerances. Approximate families use
//! `|r| <= tol * E`, where `E` is the larger energy of the two sets involved.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo::ConjProductSum;
use crate::error::{Error, Result};
use crate::model::{Mode, Scalar, Sequence, SequenceFamily, SequenceSet};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

enum Acc {
    Exact(ConjProductSum),
    Approx(Complex64),
}

impl Acc {
    fn for_pair<'a>(seqs: impl IntoIterator<Item = &'a Sequence>) -> Acc {
        let mut order = 1usize;
        for s in seqs {
            if s.mode() == Mode::Approx {
                return Acc::Approx(Complex64::new(0.0, 0.0));
            }
            order = order.lcm(&s.order());
        }
        Acc::Exact(ConjProductSum::new(order))
    }

    #[inline]
    fn push(&mut self, a: &Scalar, b: &Scalar) {
        match (self, a, b) {
            (Acc::Exact(acc), Scalar::Exact(x), Scalar::Exact(y)) => acc.add_product_conj(x, y),
            (Acc::Approx(z), _, _) => *z += a.to_complex() * b.to_complex().conj(),
            (Acc::Exact(_), _, _) => unreachable!("exact accumulator fed an approximate scalar"),
        }
    }

    fn finish(self) -> Scalar {
        match self {
            Acc::Exact(acc) => Scalar::Exact(acc.finish()),
            Acc::Approx(z) => Scalar::Approx(z),
        }
    }
}

fn overlap(len_s: usize, len_t: usize, tau: i64) -> std::ops::Range<usize> {
    let lo = (-tau).max(0) as usize;
    let hi = (len_t as i64 - tau).clamp(0, len_s as i64) as usize;
    lo..hi.max(lo)
}

fn acorr_into(acc: &mut Acc, s: &Sequence, t: &Sequence, tau: i64) {
    let (se, te) = (s.entries(), t.entries());
    for l in overlap(s.len(), t.len(), tau) {
        acc.push(&se[l], &te[(l as i64 + tau) as usize]);
    }
}

/// Aperiodic correlation `R_{s,t}(τ) = Σ_l s(l) · conj(t(l + τ))`, zero-padded.
pub fn acorr(s: &Sequence, t: &Sequence, tau: i64) -> Scalar {
    let mut acc = Acc::for_pair([s, t]);
    acorr_into(&mut acc, s, t, tau);
    acc.finish()
}

/// Periodic correlation of two equal-length sequences (index `l + τ` taken mod `L`).
pub fn pcorr(s: &Sequence, t: &Sequence, tau: i64) -> Result<Scalar> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            got: t.len(),
        });
    }
    let len = s.len() as i64;
    let mut acc = Acc::for_pair([s, t]);
    for (l, a) in s.entries().iter().enumerate() {
        let j = (l as i64 + tau).rem_euclid(len) as usize;
        acc.push(a, &t.entries()[j]);
    }
    Ok(acc.finish())
}

fn check_sizes(s: &SequenceSet, t: &SequenceSet) -> Result<()> {
    if s.size() != t.size() {
        return Err(Error::SizeMismatch {
            expected: s.size(),
            got: t.size(),
        });
    }
    Ok(())
}

fn sum_at(s: &SequenceSet, t: &SequenceSet, tau: i64) -> Scalar {
    let mut acc = Acc::for_pair(s.sequences().iter().chain(t.sequences()));
    for (a, b) in s.sequences().iter().zip(t.sequences()) {
        acorr_into(&mut acc, a, b, tau);
    }
    acc.finish()
}

/// Correlation sum `Σ_n R_{s_n, t_n}(τ)`, pairing sequences strictly by index.
pub fn corr_sum(s: &SequenceSet, t: &SequenceSet, tau: i64) -> Result<Scalar> {
    check_sizes(s, t)?;
    Ok(sum_at(s, t, tau))
}

/// Correlation values over every shift where the operands can overlap.
#[derive(Clone, Debug)]
pub struct CorrelationProfile {
    first_shift: i64,
    values: Vec<Scalar>,
    mode: Mode,
}

impl CorrelationProfile {
    /// Shifts `-(L_s - 1) ..= L_t - 1`.
    pub fn shifts(&self) -> std::ops::RangeInclusive<i64> {
        self.first_shift..=self.first_shift + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// Value at any shift; zero outside the stored range.
    pub fn at(&self, tau: i64) -> Scalar {
        let idx = tau - self.first_shift;
        if idx >= 0 && (idx as usize) < self.values.len() {
            self.values[idx as usize].clone()
        } else {
            match self.mode {
                Mode::Exact => Scalar::zero(),
                Mode::Approx => Scalar::approx(0.0, 0.0),
            }
        }
    }
}

fn profile_of(len_s: usize, len_t: usize, mode: Mode, f: impl Fn(i64) -> Scalar) -> CorrelationProfile {
    let first_shift = -(len_s as i64 - 1);
    let last = len_t as i64 - 1;
    CorrelationProfile {
        first_shift,
        values: (first_shift..=last).map(f).collect(),
        mode,
    }
}

fn joint_mode(a: Mode, b: Mode) -> Mode {
    if a == Mode::Exact && b == Mode::Exact {
        Mode::Exact
    } else {
        Mode::Approx
    }
}

pub fn acorr_profile(s: &Sequence, t: &Sequence) -> CorrelationProfile {
    profile_of(s.len(), t.len(), joint_mode(s.mode(), t.mode()), |tau| acorr(s, t, tau))
}

pub fn corr_sum_profile(s: &SequenceSet, t: &SequenceSet) -> Result<CorrelationProfile> {
    check_sizes(s, t)?;
    Ok(profile_of(
        s.seq_len(),
        t.seq_len(),
        joint_mode(s.mode(), t.mode()),
        |tau| sum_at(s, t, tau),
    ))
}

/// The property a family is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    /// Complementary set (each set on its own).
    Cs,
    /// Complete complementary code.
    Ccc,
    /// N-shift cross-orthogonal sequence family.
    Cosf(usize),
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Cs => f.write_str("cs"),
            Claim::Ccc => f.write_str("ccc"),
            Claim::Cosf(n) => write!(f, "cosf:{n}"),
        }
    }
}

impl std::str::FromStr for Claim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cs" => Ok(Claim::Cs),
            "ccc" => Ok(Claim::Ccc),
            other => other
                .strip_prefix("cosf:")
                .and_then(|n| n.parse().ok())
                .filter(|&n| n > 0)
                .map(Claim::Cosf)
                .ok_or_else(|| Error::Precondition(format!("unknown claim {s:?}"))),
        }
    }
}

impl Serialize for Claim {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Claim {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftValue {
    pub tau: i64,
    pub value: Scalar,
}

/// One (auto or cross) correlation sum and the shifts where it should
/// vanish but does not, with the residual values in reduced form.
#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub first: usize,
    pub second: usize,
    pub violations: Vec<ShiftValue>,
}

impl PairCheck {
    pub fn violating_shifts(&self) -> Vec<i64> {
        self.violations.iter().map(|v| v.tau).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthViolation {
    pub set: usize,
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub claim: Claim,
    pub family_size: usize,
    pub set_size: usize,
    pub length_set: Vec<usize>,
    pub size_bound_holds: bool,
    pub length_violations: Vec<LengthViolation>,
    pub checks: Vec<PairCheck>,
}

impl Report {
    pub fn verified(&self) -> bool {
        self.size_bound_holds
            && self.length_violations.is_empty()
            && self.checks.iter().all(|c| c.violations.is_empty())
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &PairCheck> {
        self.checks.iter().filter(|c| !c.violations.is_empty())
    }

    /// Machine-readable rendering: the verdict, the number of checked pairs
    /// and the failing ones only.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "claim": self.claim,
            "verified": self.verified(),
            "family_size": self.family_size,
            "set_size": self.set_size,
            "length_set": self.length_set,
            "size_bound_holds": self.size_bound_holds,
            "length_violations": self.length_violations,
            "pairs_checked": self.checks.len(),
            "failures": self.failing_checks().collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.length_set.iter().map(ToString::to_string).collect();
        writeln!(
            f,
            "claim {}: ({}, {}, {{{}}})",
            self.claim,
            self.family_size,
            self.set_size,
            lengths.join(",")
        )?;
        if !self.size_bound_holds {
            writeln!(
                f,
                "  size bound violated: family size {} exceeds its limit",
                self.family_size
            )?;
        }
        for lv in &self.length_violations {
            writeln!(
                f,
                "  set {}: length {} is not a multiple of the shift unit",
                lv.set, lv.length
            )?;
        }
        for c in self.failing_checks() {
            let kind = if c.first == c.second { "auto" } else { "cross" };
            write!(f, "  {kind} sum ({}, {}) nonzero at", c.first, c.second)?;
            for v in &c.violations {
                write!(f, " τ={} [{}]", v.tau, v.value)?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", if self.verified() { "verified" } else { "NOT verified" })
    }
}

/// The predicates, parameterised by the approximate-mode tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Verifier {
    pub tol: f64,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier { tol: DEFAULT_TOLERANCE }
    }
}

impl Verifier {
    pub fn new(tol: f64) -> Self {
        Verifier { tol }
    }

    fn threshold(&self, a: &SequenceSet, b: &SequenceSet) -> f64 {
        if a.mode() == Mode::Exact && b.mode() == Mode::Exact {
            return 0.0;
        }
        let e = a.energy().to_complex().norm().max(b.energy().to_complex().norm());
        self.tol * e
    }

    fn pair_check(
        &self,
        (i, a): (usize, &SequenceSet),
        (j, b): (usize, &SequenceSet),
        shifts: impl Iterator<Item = i64>,
        auto: bool,
    ) -> PairCheck {
        let thr = self.threshold(a, b);
        let violations = shifts
            .filter(|&tau| !(auto && tau == 0))
            .filter_map(|tau| {
                let value = sum_at(a, b, tau);
                (!value.is_negligible(thr)).then(|| ShiftValue {
                    tau,
                    value: match value {
                        Scalar::Exact(c) => Scalar::Exact(c.normalized()),
                        approx => approx,
                    },
                })
            })
            .collect();
        PairCheck {
            first: i,
            second: j,
            violations,
        }
    }

    fn all_shifts(a: &SequenceSet, b: &SequenceSet) -> std::ops::RangeInclusive<i64> {
        -(a.seq_len() as i64 - 1)..=b.seq_len() as i64 - 1
    }

    fn report(&self, f: &SequenceFamily, claim: Claim, checks: Vec<PairCheck>) -> Report {
        Report {
            claim,
            family_size: f.family_size(),
            set_size: f.set_size(),
            length_set: f.length_set().into_iter().collect(),
            size_bound_holds: check_size_bound(f, claim),
            length_violations: Vec::new(),
            checks,
        }
    }

    /// Auto-correlation sum vanishes at every nonzero shift.
    pub fn complementary_set(&self, s: &SequenceSet) -> Report {
        let check = self.pair_check((0, s), (0, s), Self::all_shifts(s, s), true);
        let fam = SequenceFamily::new(vec![s.clone()]).expect("single set");
        self.report(&fam, Claim::Cs, vec![check])
    }

    /// Every set is complementary and every pair of distinct sets has an
    /// identically zero cross-correlation sum.
    pub fn ccc(&self, c: &SequenceFamily) -> Report {
        let sets = c.sets();
        let pairs: Vec<(usize, usize)> = (0..sets.len())
            .flat_map(|i| (i..sets.len()).map(move |j| (i, j)))
            .collect();
        let checks = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&sets[i], &sets[j]);
                self.pair_check((i, a), (j, b), Self::all_shifts(a, b), i == j)
            })
            .collect();
        self.report(c, Claim::Ccc, checks)
    }

    /// N-shift cross-orthogonality of an `(M, 1, 𝕃)` family.
    pub fn n_co_sf(&self, f: &SequenceFamily, n: usize) -> Result<Report> {
        if n == 0 {
            return Err(Error::Precondition("the shift unit N must be positive".into()));
        }
        if f.set_size() != 1 {
            return Err(Error::SizeMismatch {
                expected: 1,
                got: f.set_size(),
            });
        }
        let sets = f.sets();
        let length_violations: Vec<LengthViolation> = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.seq_len() % n != 0)
            .map(|(set, s)| LengthViolation {
                set,
                length: s.seq_len(),
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (0..sets.len())
            .flat_map(|i| (i..sets.len()).map(move |j| (i, j)))
            .collect();
        let step = n as i64;
        let checks = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&sets[i], &sets[j]);
                let range = Self::all_shifts(a, b);
                let lo = range.start().div_euclid(step) + i64::from(range.start().rem_euclid(step) != 0);
                let hi = range.end().div_euclid(step);
                self.pair_check((i, a), (j, b), (lo..=hi).map(|l| l * step), i == j)
            })
            .collect();
        let mut report = self.report(f, Claim::Cosf(n), checks);
        report.length_violations = length_violations;
        Ok(report)
    }

    pub fn verify(&self, f: &SequenceFamily, claim: Claim) -> Result<Report> {
        match claim {
            Claim::Ccc => Ok(self.ccc(f)),
            Claim::Cosf(n) => self.n_co_sf(f, n),
            Claim::Cs => {
                // Each set is checked on its own; pairs are labelled by set index.
                let mut checks = Vec::new();
                for (m, s) in f.sets().iter().enumerate() {
                    let mut c = self.pair_check((m, s), (m, s), Self::all_shifts(s, s), true);
                    c.first = m;
                    c.second = m;
                    checks.push(c);
                }
                Ok(self.report(f, Claim::Cs, checks))
            }
        }
    }

    /// Largest `Z` such that the adjacent-sequence sums
    /// `Σ_n R_{c^m_{[n+1]_N}, c^{m'}_n}(L - τ)` vanish for all `0 < τ <= Z` and
    /// all ordered pairs `(m, m')`. `τ` runs up to `L` (full overlap).
    pub fn zccc_zone(&self, c: &SequenceFamily) -> Result<usize> {
        if !self.ccc(c).verified() {
            return Err(Error::Precondition("zone width is only defined for a CCC".into()));
        }
        let lengths = c.length_set();
        if lengths.len() != 1 {
            return Err(Error::Precondition(format!(
                "zone width needs a single sequence length, got {lengths:?}"
            )));
        }
        let len = *lengths.iter().next().expect("one length");
        let sets = c.sets();
        let n = c.set_size();
        let rotated: Vec<SequenceSet> = sets
            .iter()
            .map(|s| {
                let seqs = s.sequences();
                SequenceSet::new((0..n).map(|k| seqs[(k + 1) % n].clone()).collect()).expect("rotation keeps set shape")
            })
            .collect();
        let mut zone = 0;
        for tau in 1..=len {
            let shift = len as i64 - tau as i64;
            let vanishes = (0..sets.len()).all(|m| {
                (0..sets.len()).all(|m2| {
                    let thr = self.threshold(&rotated[m], &sets[m2]);
                    sum_at(&rotated[m], &sets[m2], shift).is_negligible(thr)
                })
            });
            if !vanishes {
                break;
            }
            zone = tau;
        }
        Ok(zone)
    }
}

pub fn is_complementary_set(s: &SequenceSet) -> Report {
    Verifier::default().complementary_set(s)
}

pub fn is_ccc(c: &SequenceFamily) -> Report {
    Verifier::default().ccc(c)
}

pub fn is_n_co_sf(f: &SequenceFamily, n: usize) -> Result<Report> {
    Verifier::default().n_co_sf(f, n)
}

pub fn zccc_zone(c: &SequenceFamily) -> Result<usize> {
    Verifier::default().zccc_zone(c)
}

/// Family-size bound `M <= N`, with `N` the shift unit for N-CO-SFs and the set
/// size for CCCs. Complementary sets carry no bound.
pub fn check_size_bound(f: &SequenceFamily, claim: Claim) -> bool {
    match claim {
        Claim::Cosf(n) => f.family_size() <= n,
        Claim::Ccc => f.family_size() <= f.set_size(),
        Claim::Cs => true,
    }
}
