//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Exact-mode checks use tolerance zero throughout.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ccc_core::corr::{acorr, corr_sum_profile, pcorr};
use ccc_core::planner::{execute, plan, BaseStep, Recipe, Round, SubFamilySpec};
use ccc_core::{
    ccc_from_unitary, cosf_to_ccc, dft_matrix, elongate_cosf, enlarge_ccc, equal_up_to_indexing, generate_cosf,
    hadamard_matrix, identity_matrix, is_ccc, is_n_co_sf, zccc_zone, CycloNum, Error, MatrixSpec, Partition, Scalar,
    Sequence, SequenceFamily,
};
use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ints(values: &[i64]) -> Vec<Scalar> {
    values.iter().map(|&v| Scalar::int(v)).collect()
}

fn show(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn sum_profile(f: &SequenceFamily, a: usize, b: usize) -> Vec<Scalar> {
    let p = corr_sum_profile(&f.sets()[a], &f.sets()[b]).unwrap();
    (-3..=3).map(|tau| p.at(tau)).collect()
}

fn pair_profile(s: &Sequence, t: &Sequence) -> Vec<Scalar> {
    (-3..=3).map(|tau| acorr(s, t, tau)).collect()
}

fn criterion_1() -> Outcome {
    let f = golay_ccc();
    let got = sum_profile(&f, 0, 0);
    ensure!(got == ints(&[0, 0, 0, 8, 0, 0, 0]), "auto sum was {}", show(&got));
    let first = pair_profile(f.get(0, 0).unwrap(), f.get(0, 0).unwrap());
    let second = pair_profile(f.get(0, 1).unwrap(), f.get(0, 1).unwrap());
    ensure!(
        first == ints(&[-1, 0, 1, 4, 1, 0, -1]),
        "first summand {}",
        show(&first)
    );
    ensure!(
        second == ints(&[1, 0, -1, 4, -1, 0, 1]),
        "second summand {}",
        show(&second)
    );
    Ok("auto-correlation sum of {(+++-),(+-++)} is (0,0,0,8,0,0,0)".into())
}

fn criterion_2() -> Outcome {
    let f = golay_ccc();
    let report = is_ccc(&f);
    ensure!(report.verified(), "is_ccc rejected the pair:\n{report}");
    let cases: [(usize, usize, usize, usize, [i64; 7]); 4] = [
        (1, 0, 1, 0, [1, 0, -1, 4, -1, 0, 1]),
        (1, 1, 1, 1, [-1, 0, 1, 4, 1, 0, -1]),
        (0, 0, 1, 0, [-1, 0, 3, 0, 1, 0, 1]),
        (0, 1, 1, 1, [1, 0, -3, 0, -1, 0, -1]),
    ];
    for (m, n, m2, n2, expect) in cases {
        let got = pair_profile(f.get(m, n).unwrap(), f.get(m2, n2).unwrap());
        ensure!(got == ints(&expect), "R(s^{m}_{n}, s^{m2}_{n2}) = {}", show(&got));
    }
    ensure!(sum_profile(&f, 1, 1) == ints(&[0, 0, 0, 8, 0, 0, 0]), "auto sum of S^1");
    ensure!(sum_profile(&f, 0, 1) == ints(&[0; 7]), "cross sum of S^0, S^1");
    ensure!(sum_profile(&f, 1, 0) == ints(&[0; 7]), "cross sum of S^1, S^0");
    Ok("is_ccc accepts {S^0,S^1}; all per-pair profiles match (R of s^1_0 ends in +1)".into())
}

fn criterion_3() -> Outcome {
    let h2 = hadamard_matrix(2).unwrap();
    let s = generate_cosf(&h2, &Partition::whole(2), std::slice::from_ref(&h2)).unwrap();
    ensure!(s == column(vec![seq("+++-"), seq("++-+")]), "H_2 generation gave\n{s}");
    let s = generate_cosf(
        &dft_matrix(6).unwrap(),
        &Partition::contiguous(&[2, 4]).unwrap(),
        &[h2, hadamard_matrix(4).unwrap()],
    )
    .unwrap();
    ensure!(s == f6_cosf(), "F_6 generation differs from the reference family");
    for (a, b) in s.column().unwrap().into_iter().zip(f6_cosf().column().unwrap()) {
        ensure!(a.entries() == b.entries(), "entry mismatch in {a}");
    }
    Ok("generate_cosf reproduces the (2,1,{4}) and (6,1,{12,24}) families".into())
}

fn criterion_4() -> Outcome {
    let a = f6_cosf();
    let h2 = hadamard_matrix(2).unwrap().row_family();
    let part = Partition::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
    let s = elongate_cosf(
        &a,
        &part,
        &[h2.clone(), h2.clone(), column(vec![seq("+++-"), seq("++-+")])],
    )
    .map_err(|e| e.to_string())?;
    ensure!(s == f6_elongated(), "(6,1,{{24,48,96}}) family differs");
    ensure!(
        is_n_co_sf(&s, 6).unwrap().verified(),
        "(6,1,{{24,48,96}}) family is not a 6-CO-SF"
    );

    let (p, w) = (plus(), w3());
    let v = column(vec![
        Sequence::new(vec![w.clone(), p.clone(), p.clone()]).unwrap(),
        Sequence::new(vec![p.clone(), w.clone(), p.clone()]).unwrap(),
        Sequence::new(vec![p.clone(), p, w]).unwrap(),
    ]);
    let part = Partition::new(6, vec![vec![0, 1], vec![2], vec![3, 4, 5]]).unwrap();
    let t = elongate_cosf(&a, &part, &[h2, column(vec![seq("+")]), v]).map_err(|e| e.to_string())?;
    ensure!(t == f6_elongated_w3(), "(6,1,{{24,72}}) family differs");
    ensure!(is_n_co_sf(&t, 6).unwrap().verified(), "variant is not a 6-CO-SF");
    Ok("elongate_cosf reproduces the (6,1,{24,48,96}) and (6,1,{24,72}) families, both 6-CO-SFs".into())
}

fn criterion_5() -> Outcome {
    let s = column(vec![seq("+++-"), seq("++-+")]);
    let c = cosf_to_ccc(&s, &hadamard_matrix(2).unwrap()).map_err(|e| e.to_string())?;
    ensure!(c == golay_ccc(), "cosf_to_ccc gave\n{c}");

    // Sets of the CCC are identified under reindexing; the reference 4x4
    // matrix corresponds to one of the two set orders.
    let (i2, h2) = (identity_matrix(2).unwrap(), hadamard_matrix(2).unwrap());
    let orders = [vec![0, 1], vec![1, 0]];
    let mut matched = Vec::new();
    for order in &orders {
        let reindexed = SequenceFamily::new(order.iter().map(|&i| c.sets()[i].clone()).collect()).unwrap();
        ensure!(
            equal_up_to_indexing(&reindexed, &c).unwrap(),
            "reindexing changed the class"
        );
        let e = enlarge_ccc(&reindexed, &[i2.clone(), h2.clone()]).map_err(|e| e.to_string())?;
        ensure!(is_ccc(&e).verified(), "enlarged family is not a CCC");
        if equal_up_to_indexing(&e, &enlarged_4x4()).unwrap() {
            matched.push(order.clone());
        }
    }
    ensure!(
        !matched.is_empty(),
        "no set order of the CCC yields the reference 4x4 matrix"
    );

    let h4 = hadamard_matrix(4).unwrap();
    let e = enlarge_ccc(&c, &[h4.clone(), h4]).map_err(|e| e.to_string())?;
    ensure!(
        (e.family_size(), e.set_size()) == (8, 8),
        "size {}x{}",
        e.family_size(),
        e.set_size()
    );
    ensure!(e.length_set() == BTreeSet::from([4]), "length set {:?}", e.length_set());
    ensure!(is_ccc(&e).verified(), "(8,8,{{4}}) family is not a CCC");
    ensure!(
        equal_up_to_indexing(&e, &enlarged_8x8()).unwrap(),
        "(8,8,{{4}}) differs from the reference"
    );
    Ok(format!(
        "cosf_to_ccc matches; [I_2,H_2] enlargement matches the reference (CCC set order {:?}); [H_4,H_4] gives an (8,8,{{4}})-CCC",
        matched[0]
    ))
}

fn criterion_6() -> Outcome {
    for n in [2, 3, 4, 5, 6, 8] {
        let c = ccc_from_unitary(&dft_matrix(n).unwrap());
        ensure!(is_ccc(&c).verified(), "DFT {n} CCC rejected");
        let mut exps = BTreeSet::new();
        for row in c.rows() {
            for s in row {
                for e in s.entries() {
                    let x = e
                        .as_exact()
                        .ok_or("approximate entry")?
                        .promote(n)
                        .map_err(|e| e.to_string())?;
                    exps.insert(
                        x.as_root_of_unity()
                            .ok_or_else(|| format!("N = {n}: {x} is not an N-th root"))?,
                    );
                }
            }
        }
        ensure!(exps == (0..n).collect(), "N = {n}: alphabet exponents {exps:?}");
    }
    for n in [2, 4, 8] {
        let h = hadamard_matrix(n).unwrap();
        let c = ccc_from_unitary(&h);
        for a in 0..n {
            for b in 0..n {
                ensure!(c.get(a, b).unwrap() == &h.row(a ^ b), "H_{n}: c^{a}_{b} != h^{}", a ^ b);
            }
        }
    }
    Ok("DFT CCCs (N=2,3,4,5,6,8) use exactly the N-th roots of unity; Hadamard CCCs follow h^(n xor m)".into())
}

fn criterion_7() -> Outcome {
    let mut seen = Vec::new();
    for n in [2, 3, 4, 5, 6, 8] {
        let z = zccc_zone(&ccc_from_unitary(&dft_matrix(n).unwrap())).map_err(|e| e.to_string())?;
        ensure!(z == n - 1, "DFT N = {n}: zone {z}, expected {}", n - 1);
        seen.push(format!("F{n}:{z}"));
    }
    for n in [2, 4, 8] {
        let z = zccc_zone(&ccc_from_unitary(&hadamard_matrix(n).unwrap())).map_err(|e| e.to_string())?;
        ensure!(z == n / 2, "Hadamard N = {n}: zone {z}, expected {}", n / 2);
        seen.push(format!("H{n}:{z}"));
    }
    Ok(format!("zones {}", seen.join(" ")))
}

fn criterion_8() -> Outcome {
    match plan(2, &[6]) {
        Err(Error::Unconstructible { target: 6, reason, .. }) if reason.contains("3 > 2") => {}
        other => return Err(format!("plan(2, {{6}}) gave {other:?}")),
    }
    let mut executed = 0;
    for n in 2..=5usize {
        for l in 1..=256usize {
            let oracle = oracle_constructible(n as u64, l as u64);
            match plan(n, &[l]) {
                Ok(r) => {
                    ensure!(oracle, "N = {n}, L = {l}: planned but the oracle says unconstructible");
                    let ex = execute(&r).map_err(|e| format!("N = {n}, L = {l}: {e}"))?;
                    ensure!(ex.family.length_set().contains(&l), "N = {n}, L = {l}: length missing");
                    ensure!(ex.family.family_size() == n, "N = {n}, L = {l}: family size");
                    ensure!(
                        is_n_co_sf(&ex.family, n).unwrap().verified(),
                        "N = {n}, L = {l}: not a CO-SF"
                    );
                    executed += 1;
                }
                Err(Error::Unconstructible { .. }) => {
                    ensure!(!oracle, "N = {n}, L = {l}: oracle constructible but planning failed")
                }
                Err(e) => return Err(format!("N = {n}, L = {l}: {e}")),
            }
        }
    }
    Ok(format!(
        "plan agrees with the factorization oracle on 1024 cases; {executed} recipes executed and verified"
    ))
}

fn pick_matrix(rng: &mut ChaCha8Rng, n: usize) -> MatrixSpec {
    match rng.gen_range(0..3) {
        0 => MatrixSpec::Dft { dim: n },
        1 if n.is_power_of_two() => MatrixSpec::Hadamard { dim: n },
        1 => MatrixSpec::preferred(n),
        _ => MatrixSpec::Identity { dim: n },
    }
}

fn random_cells(rng: &mut ChaCha8Rng, mut items: Vec<usize>) -> Vec<Vec<usize>> {
    items.shuffle(rng);
    let mut cells = vec![vec![items[0]]];
    for &x in &items[1..] {
        if rng.gen_bool(0.4) {
            cells.push(vec![x]);
        } else {
            cells.last_mut().unwrap().push(x);
        }
    }
    cells
}

fn random_recipe(rng: &mut ChaCha8Rng) -> Recipe {
    let n = rng.gen_range(1..=6);
    let cells = Partition::new(n, random_cells(rng, (0..n).collect())).unwrap();
    let subs = cells.cells().iter().map(|c| pick_matrix(rng, c.len())).collect();
    let mut recipe = Recipe {
        base: BaseStep {
            n,
            matrix: pick_matrix(rng, n),
            cells,
            subs,
        },
        rounds: vec![],
        post: None,
    };
    for _ in 0..rng.gen_range(0..=2) {
        let f = execute(&recipe).unwrap().family;
        let mut groups: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
        for (i, s) in f.column().unwrap().into_iter().enumerate() {
            groups.entry((s.len(), s.energy().to_string())).or_default().push(i);
        }
        let mut cells = Vec::new();
        for (_, members) in groups {
            cells.extend(random_cells(rng, members));
        }
        let cells = Partition::new(n, cells).unwrap();
        let subs = cells
            .cells()
            .iter()
            .map(|c| SubFamilySpec::Rows(pick_matrix(rng, c.len())))
            .collect();
        recipe.rounds.push(Round { cells, subs });
    }
    recipe
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for trial in 0..200 {
        let recipe = random_recipe(&mut rng);
        let n = recipe.base.n;
        let ex = execute(&recipe).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(
            ex.family.family_size() == n,
            "trial {trial}: M = {} but N = {n}",
            ex.family.family_size()
        );
        ensure!(ex.verified(), "trial {trial}: a stage failed verification");
        ensure!(
            is_n_co_sf(&ex.family, n).unwrap().verified(),
            "trial {trial}: not an {n}-CO-SF"
        );

        // one candidate sequence too many
        let blocks = rng.gen_range(1..=4);
        let mut values: Vec<i64> = (0..blocks * n).map(|_| rng.gen_range(-2..=2)).collect();
        if values.iter().all(|&v| v == 0) {
            values[0] = 1;
        }
        let extra = if rng.gen_bool(0.5) {
            Sequence::from_ints(&values).unwrap()
        } else {
            // a sequence already in the family, possibly rescaled
            let col = ex.family.column().unwrap();
            col[rng.gen_range(0..n)].scaled(&Scalar::int(rng.gen_range(1..=3)))
        };
        let mut seqs: Vec<Sequence> = ex.family.column().unwrap().into_iter().cloned().collect();
        seqs.push(extra);
        let bigger = SequenceFamily::from_column(seqs).unwrap();
        ensure!(
            !is_n_co_sf(&bigger, n).unwrap().verified(),
            "trial {trial}: M = N + 1 family passed"
        );
    }
    Ok("200 random recipes give M = N and verify; every M = N + 1 extension fails".into())
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let order = *[1usize, 2, 3, 4, 5, 6, 8, 12].choose(rng).unwrap();
    let coeffs: Vec<i64> = (0..order).map(|_| rng.gen_range(-3..=3)).collect();
    Scalar::Exact(CycloNum::from_i64s(order, &coeffs).unwrap())
}

fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> Sequence {
    Sequence::new((0..len).map(|_| random_scalar(rng)).collect()).unwrap()
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    for trial in 0..1000 {
        let len = rng.gen_range(1..=8);
        let (s, t) = (random_sequence(&mut rng, len), random_sequence(&mut rng, len));
        let other_len = rng.gen_range(1..=8);
        let other = random_sequence(&mut rng, other_len);
        for tau in -(len as i64) - 1..=(len as i64) + 1 {
            let lhs = acorr(&s, &t, tau);
            let rhs = acorr(&t, &s, -tau).conj();
            ensure!(
                (&lhs - &rhs).is_zero(),
                "trial {trial}, τ = {tau}: Hermitian residual {}",
                &lhs - &rhs
            );
            let lhs = acorr(&s, &other, tau);
            let rhs = acorr(&other, &s, -tau).conj();
            ensure!(
                (&lhs - &rhs).is_zero(),
                "trial {trial}, τ = {tau}: unequal-length Hermitian residual"
            );
        }
        for tau in 0..len as i64 {
            let p = pcorr(&s, &t, tau).map_err(|e| e.to_string())?;
            let mut a = acorr(&s, &t, tau);
            if tau != 0 {
                a = &a + &acorr(&s, &t, tau - len as i64);
            }
            ensure!(
                (&p - &a).is_zero(),
                "trial {trial}, τ = {tau}: periodic identity residual {}",
                &p - &a
            );
        }
    }
    Ok("Hermitian symmetry and the periodic-aperiodic identity hold with zero residual on 1000 pairs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("golden auto-correlation sum", criterion_1),
        ("golden CCC profiles", criterion_2),
        ("generation examples", criterion_3),
        ("elongation examples", criterion_4),
        ("CCC generation and enlargement", criterion_5),
        ("unitary CCC alphabets", criterion_6),
        ("Z-CCC zone widths", criterion_7),
        ("length planning at desk scale", criterion_8),
        ("family size bound", criterion_9),
        ("correlation identities", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} [{name}] ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} [{name}] ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
