//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use indord_core::bigraph::{low_mask, BipartiteGraph, SideMode};
use indord_core::counting::{closed_float, d_k, d_sum, recurrence_eval, total_count, Recurrence};
use indord_core::families::{build_cycle_path, build_grm};
use indord_core::invariants::{induced_matching_number, invariant_report, ordered_matching_number};
use indord_core::kseq::{enumerate_ksequences, KSequence};
use indord_core::oracle::{
    enumerate_graphs, raw_enumerate, EnumerationJob, GraphFilter, UNPRUNED_PROFILE_LIMIT,
};
use indord_core::profile::{
    classify_equal_r, classify_equal_two, complement_is_biclique_union, compute_profile,
    ind_match_from_profile, is_ind_ord_one, ord_match_from_profile,
};

/// Absolute tolerance between the floating closed forms and the exact recurrences.
const FLOAT_TOLERANCE: f64 = 1e-6;
const FLOAT_MAX_N: u64 = 200;
const RECURRENCE_MAX_N: u64 = 60;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ks(terms: &[u32]) -> KSequence {
    KSequence::new(terms.to_vec()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: indord_core::Error) -> String {
    e.to_string()
}

fn ksequence_counts() -> Outcome {
    let expected: [(u32, &[&[u32]]); 4] = [
        (2, &[&[2, 1, 0]]),
        (3, &[&[3, 2, 1, 0], &[3, 1, 0]]),
        (
            4,
            &[&[4, 3, 2, 1, 0], &[4, 2, 1, 0], &[4, 2, 0], &[4, 1, 0]],
        ),
        (
            5,
            &[
                &[5, 4, 3, 2, 1, 0],
                &[5, 3, 2, 1, 0],
                &[5, 3, 1, 0],
                &[5, 2, 1, 0],
                &[5, 2, 0],
                &[5, 1, 0],
            ],
        ),
    ];
    let mut sizes = Vec::new();
    for (m, list) in expected {
        let got: Vec<Vec<u32>> = enumerate_ksequences(m, 3)
            .map_err(err)?
            .iter()
            .map(|k| k.terms().to_vec())
            .collect();
        let want: Vec<Vec<u32>> = list.iter().map(|t| t.to_vec()).collect();
        ensure(got == want, || format!("m={m}: got {got:?}"))?;
        sizes.push(got.len().to_string());
    }
    Ok(format!("counts {} for m = 2..5", sizes.join(", ")))
}

fn recurrence_initial_values() -> Outcome {
    for which in Recurrence::ALL {
        let offset = which.offset();
        for (i, &want) in which.initial_values().iter().enumerate() {
            let n = offset + i as u64;
            let got = recurrence_eval(which, n).map_err(err)?;
            ensure(got as i128 == want, || {
                format!("{which:?} a_{n} = {got}, want {want}")
            })?;
        }
        let seq = which.sequence();
        for n in offset..=RECURRENCE_MAX_N {
            let rec = recurrence_eval(which, n).map_err(err)?;
            let lit = d_sum(n, &seq).map_err(err)?;
            ensure(rec == lit, || {
                format!("{which:?} n={n}: recurrence {rec}, nested sum {lit}")
            })?;
        }
    }
    Ok(format!(
        "initial values exact, nested sums agree for n <= {RECURRENCE_MAX_N}"
    ))
}

fn closed_form_floats() -> Outcome {
    let mut worst: f64 = 0.0;
    for which in Recurrence::ALL {
        for n in which.offset()..=FLOAT_MAX_N {
            let exact = recurrence_eval(which, n).map_err(err)? as f64;
            let approx = closed_float(which, n);
            let diff = (approx - exact).abs();
            worst = worst.max(diff);
            ensure(diff < FLOAT_TOLERANCE, || {
                format!("{which:?} n={n}: float {approx} vs exact {exact}")
            })?;
            ensure(approx.round() == exact, || {
                format!("{which:?} n={n}: rounding")
            })?;
        }
    }
    Ok(format!(
        "n <= {FLOAT_MAX_N}, max |float - exact| = {worst:.2e} (tol {FLOAT_TOLERANCE:.0e}); U uses the printed cubic at n-1"
    ))
}

fn d_k_worked_example() -> Outcome {
    let pair = [ks(&[6, 4, 2, 1, 0]), ks(&[6, 4, 2, 0])];
    for n in 2..=100u64 {
        let up = u128::from(n.div_ceil(2));
        let down = u128::from(n / 2);
        let want = up * (up - 1) / 2 + down * (down + 1) / 2;
        let got = d_k(n, &pair).map_err(err)?;
        ensure(got == want, || format!("n={n}: D_K = {got}, want {want}"))?;
    }
    let zero_pair = [ks(&[6, 3, 2, 1, 0]), ks(&[6, 3, 1, 0])];
    for n in 0..=100u64 {
        let got = d_k(n, &zero_pair).map_err(err)?;
        ensure(got == 0, || format!("n={n}: zero-rule pair gave {got}"))?;
    }
    Ok("closed form for n = 2..100; differing third terms give 0".into())
}

fn formula_vs_oracle() -> Outcome {
    let mut cases: Vec<(usize, usize)> = Vec::new();
    for m in 2..=4 {
        for n in m.max(3)..=7 {
            cases.push((m, n));
        }
    }
    cases.extend([(5, 5), (5, 6), (6, 6)]);
    for &(m, n) in &cases {
        let formula = total_count(m as u64, n as u64).map_err(err)?.total;
        let job = EnumerationJob {
            m,
            n,
            mode: SideMode::SidesLabeled,
            filter: GraphFilter::IndOrdTwo,
            emit: false,
        };
        let oracle = enumerate_graphs(&job).map_err(err)?.count;
        ensure(formula == u128::from(oracle), || {
            format!("N({m},{n}): formula {formula}, oracle {oracle}")
        })?;
    }

    let mut raw_pairs = 0;
    for m in 1..=6usize {
        for n in 1..=9usize {
            if m * n > 20 {
                continue;
            }
            let mut modes = vec![SideMode::SidesLabeled];
            if m == n {
                modes.push(SideMode::SidesUnlabeled);
            }
            for mode in modes {
                let mut filters = vec![GraphFilter::IndOrdTwo, GraphFilter::IndOrdR(1)];
                if unpruned_profiles(m, n) <= UNPRUNED_PROFILE_LIMIT as u128 {
                    filters.push(GraphFilter::AllConnected);
                }
                for filter in filters {
                    let raw = raw_enumerate(m, n, mode, filter).map_err(err)?;
                    let job = EnumerationJob {
                        m,
                        n,
                        mode,
                        filter,
                        emit: false,
                    };
                    let fast = enumerate_graphs(&job).map_err(err)?.count;
                    ensure(raw == fast, || {
                        format!("m={m} n={n} {mode:?} {filter:?}: raw {raw}, profile {fast}")
                    })?;
                    raw_pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} (m,n) formula cases match; {raw_pairs} raw-sweep comparisons with m*n <= 20 match",
        cases.len()
    ))
}

fn unpruned_profiles(m: usize, n: usize) -> u128 {
    let top = (1u128 << m) - 2 + n as u128;
    (0..n as u128).fold(1, |acc, i| acc * (top - i) / (i + 1))
}

fn manual_counts() -> Outcome {
    let mut got = Vec::new();
    for (m, want) in [(3, 3u64), (4, 14)] {
        let job = EnumerationJob {
            m,
            n: m,
            mode: SideMode::SidesUnlabeled,
            filter: GraphFilter::IndOrdTwo,
            emit: false,
        };
        let count = enumerate_graphs(&job).map_err(err)?.count;
        ensure(count == want, || {
            format!("({m},{m}) unlabeled: {count}, want {want}")
        })?;
        got.push(format!("({m},{m}) -> {count}"));
    }
    Ok(got.join(", "))
}

fn characterization() -> Outcome {
    let mut graphs = 0u64;
    for m in 1..=4usize {
        for n in 1..=4usize {
            let full = low_mask(m);
            for word in 0u64..1 << (m * n) {
                let adj: Vec<u64> = (0..n).map(|j| word >> (j * m) & full).collect();
                if adj.contains(&0) || adj.iter().fold(0, |a, &s| a | s) != full {
                    continue;
                }
                let g = BipartiteGraph::from_adjacency(m, adj).map_err(err)?;
                check_one(&g)?;
                graphs += 1;
            }
        }
    }
    Ok(format!(
        "{graphs} isolated-vertex-free graphs with m, n <= 4"
    ))
}

fn check_one(g: &BipartiteGraph) -> Result<(), String> {
    let p = compute_profile(g).map_err(err)?;
    let ind = induced_matching_number(g).map_err(err)?;
    let ord = ordered_matching_number(g).map_err(err)?;
    let p_ind = ind_match_from_profile(&p).map_err(err)?;
    let p_ord = ord_match_from_profile(&p).map_err(err)?;
    ensure(p_ind == ind && p_ord == ord, || {
        format!("profile ind/ord {p_ind}/{p_ord} vs brute {ind}/{ord}:\n{g}")
    })?;
    let two = ind == 2 && ord == 2;
    let by_r = classify_equal_r(&p, 2).map_err(err)?;
    let by_complement = complement_is_biclique_union(g);
    let by_classifier = classify_equal_two(g).map_err(err)?.equal;
    ensure(
        by_r == two && by_complement == two && by_classifier == two,
        || {
            format!("equal-two tests disagree (brute {two}, r {by_r}, complement {by_complement}):\n{g}")
        },
    )?;
    let complete = g.edge_count() == g.m() * g.n();
    let one = is_ind_ord_one(g).map_err(err)?;
    ensure(one == complete && one == (ind == 1 && ord == 1), || {
        format!("ind-ord-one test disagrees:\n{g}")
    })
}

fn witness_families() -> Outcome {
    for m in 2..=5 {
        for r in 2..=m {
            let g = build_grm(r, m).map_err(err)?;
            let rep = invariant_report(&g).map_err(err)?;
            ensure(
                rep.ind_match == r
                    && rep.ord_match == r
                    && rep.min_match == m
                    && rep.connected
                    && !rep.has_leaf
                    && !rep.unmixed,
                || format!("G({r},{m}): {rep:?}"),
            )?;
        }
    }
    for k in 3..=6 {
        let g = build_cycle_path(k).map_err(err)?;
        let rep = invariant_report(&g).map_err(err)?;
        ensure(rep.matching == k && rep.ord_match == k, || {
            format!("cycle with path k={k}: {rep:?}")
        })?;
    }
    Ok("G(r,m) for 2 <= r <= m <= 5 and cycle-with-path for k = 3..6".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("k-sequence counts", ksequence_counts),
        ("recurrence initial values", recurrence_initial_values),
        ("closed-form cross-check", closed_form_floats),
        ("D_K worked example", d_k_worked_example),
        ("formula vs oracle", formula_vs_oracle),
        ("manual counts", manual_counts),
        ("characterization equivalence", characterization),
        ("witness families", witness_families),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = fmt_elapsed(start.elapsed());
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{elapsed}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail} [{elapsed}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fmt_elapsed(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}
