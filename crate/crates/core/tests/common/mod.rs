//! Reference families written out by hand, plus small independent
//! oracles used to cross-check library results.

#![allow(dead_code)]

use ccc_core::{dft_matrix, Scalar, Sequence, SequenceFamily};

pub fn seq(signs: &str) -> Sequence {
    Sequence::from_signs(signs).unwrap()
}

pub fn rows(rows: &[&[&str]]) -> SequenceFamily {
    SequenceFamily::from_rows(rows.iter().map(|r| r.iter().map(|s| seq(s)).collect()).collect()).unwrap()
}

pub fn column(seqs: Vec<Sequence>) -> SequenceFamily {
    SequenceFamily::from_column(seqs).unwrap()
}

/// Concatenation of scaled parts, `(a_0 s_0  a_1 s_1 ...)`.
pub fn joined(parts: &[(Scalar, &Sequence)]) -> Sequence {
    let scaled: Vec<Sequence> = parts.iter().map(|(c, s)| s.scaled(c)).collect();
    Sequence::concat(&scaled).unwrap()
}

pub fn plus() -> Scalar {
    Scalar::int(1)
}

pub fn minus() -> Scalar {
    Scalar::int(-1)
}

/// `W_3 = exp(-2πi/3)`.
pub fn w3() -> Scalar {
    Scalar::root(3, 1)
}

/// The (2,2,{4}) CCC `S^0 = {(+++-), (+-++)}`, `S^1 = {(++-+), (+---)}`.
pub fn golay_ccc() -> SequenceFamily {
    rows(&[&["+++-", "+-++"], &["++-+", "+---"]])
}

/// The (6,1,{12,24}) 6-CO-SF from F_6 with cells {0,1}, {2..5} and subs H_2, H_4.
pub fn f6_cosf() -> SequenceFamily {
    let f = dft_matrix(6).unwrap().rows();
    let (p, m) = (plus(), minus());
    column(vec![
        joined(&[(p.clone(), &f[0]), (p.clone(), &f[1])]),
        joined(&[(p.clone(), &f[0]), (m.clone(), &f[1])]),
        joined(&[
            (p.clone(), &f[2]),
            (p.clone(), &f[3]),
            (p.clone(), &f[4]),
            (p.clone(), &f[5]),
        ]),
        joined(&[
            (p.clone(), &f[2]),
            (m.clone(), &f[3]),
            (p.clone(), &f[4]),
            (m.clone(), &f[5]),
        ]),
        joined(&[
            (p.clone(), &f[2]),
            (p.clone(), &f[3]),
            (m.clone(), &f[4]),
            (m.clone(), &f[5]),
        ]),
        joined(&[(p.clone(), &f[2]), (m.clone(), &f[3]), (m.clone(), &f[4]), (p, &f[5])]),
    ])
}

/// Elongation of [`f6_cosf`] with cells {0,1}, {2,3}, {4,5} and subs H_2, H_2, {(+++-),(++-+)}.
pub fn f6_elongated() -> SequenceFamily {
    let a = f6_cosf();
    let s: Vec<&Sequence> = a.column().unwrap();
    let (p, m) = (plus(), minus());
    column(vec![
        joined(&[(p.clone(), s[0]), (p.clone(), s[1])]),
        joined(&[(p.clone(), s[0]), (m.clone(), s[1])]),
        joined(&[(p.clone(), s[2]), (p.clone(), s[3])]),
        joined(&[(p.clone(), s[2]), (m.clone(), s[3])]),
        joined(&[
            (p.clone(), s[4]),
            (p.clone(), s[5]),
            (p.clone(), s[4]),
            (m.clone(), s[5]),
        ]),
        joined(&[(p.clone(), s[4]), (p.clone(), s[5]), (m, s[4]), (p, s[5])]),
    ])
}

/// Elongation of [`f6_cosf`] with cells {0,1}, {2}, {3,4,5} and subs H_2, (+),
/// {(W_3,+,+), (+,W_3,+), (+,+,W_3)}.
pub fn f6_elongated_w3() -> SequenceFamily {
    let a = f6_cosf();
    let s: Vec<&Sequence> = a.column().unwrap();
    let (p, m, w) = (plus(), minus(), w3());
    column(vec![
        joined(&[(p.clone(), s[0]), (p.clone(), s[1])]),
        joined(&[(p.clone(), s[0]), (m, s[1])]),
        joined(&[(p.clone(), s[2])]),
        joined(&[(w.clone(), s[3]), (p.clone(), s[4]), (p.clone(), s[5])]),
        joined(&[(p.clone(), s[3]), (w.clone(), s[4]), (p.clone(), s[5])]),
        joined(&[(p.clone(), s[3]), (p, s[4]), (w, s[5])]),
    ])
}

/// A (4,4,{4}) CCC enlarged from [`golay_ccc`] by I_2 and H_2.
pub fn enlarged_4x4() -> SequenceFamily {
    rows(&[
        &["++-+", "+---", "0000", "0000"],
        &["0000", "0000", "++-+", "+---"],
        &["+++-", "+-++", "+++-", "+-++"],
        &["+++-", "+-++", "---+", "-+--"],
    ])
}

/// The (8,8,{4}) CCC enlarged from [`golay_ccc`] (entries `c^m_n`) by H_4 twice,
/// with rows grouped by sign pattern.
pub fn enlarged_8x8() -> SequenceFamily {
    let c = golay_ccc();
    // sign pattern of each row pair, from rows of H_4
    let patterns: [[i64; 4]; 4] = [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]];
    let mut out = Vec::new();
    for pat in patterns {
        for m in 0..2 {
            let row: Vec<Sequence> = pat
                .iter()
                .flat_map(|&sign| (0..2).map(move |n| (sign, n)))
                .map(|(sign, n)| c.get(m, n).unwrap().scaled(&Scalar::int(sign)))
                .collect();
            out.push(row);
        }
    }
    SequenceFamily::from_rows(out).unwrap()
}

/// Aperiodic correlation of integer sequences, straight from the definition.
pub fn int_acorr(s: &[i64], t: &[i64], tau: i64) -> i64 {
    (0..s.len() as i64)
        .filter_map(|l| {
            let k = l + tau;
            (k >= 0 && (k as usize) < t.len()).then(|| s[l as usize] * t[k as usize])
        })
        .sum()
}

pub fn signs_to_ints(signs: &str) -> Vec<i64> {
    signs.chars().map(|c| if c == '+' { 1 } else { -1 }).collect()
}

/// Every multiset of integers in `[2, n]` whose product is `q`, by exhaustive
/// enumeration of non-increasing part lists.
pub fn factorizations(q: u64, n: u64) -> Vec<Vec<u64>> {
    fn go(q: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if q == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in 2..=max.min(q) {
            if q.is_multiple_of(d) {
                prefix.push(d);
                go(q / d, d, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(q, n, &mut Vec::new(), &mut out);
    out
}

/// Constructibility by the exhaustive oracle: `n | l` and some factorization
/// of `l / n` into parts `≤ n` exists.
pub fn oracle_constructible(n: u64, l: u64) -> bool {
    l.is_multiple_of(n) && !factorizations(l / n, n).is_empty()
}
