//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

mod common;

use std::io::Write;
use std::time::Instant;

use prbp::game::{translate_rbp_to_prbp, GameConfig, GameKind, Schedule};
use prbp::generators::{
    gen_figure1, gen_figure1_chain, gen_kary_tree, gen_matvec, gen_maxinset_reduction,
    gen_pebble_collector, gen_spart_counterexample,
};
use prbp::partitions::{
    analytic_bound, edge_partition_from_schedule, lower_bound, min_classes_brute_force,
    node_partition_from_schedule, spart_counting_bound, validate_partition, AnalyticFamily,
    Condition, NodePartition, Partition, PartitionKind, Witness,
};
use prbp::reductions::{
    brute_force_max_clique_size, maxclique_brute_oracle, maxinset_vertex, UndirectedGraph,
};
use prbp::solver::{brute_force_opt, solve_opt, SolveBudget, SolveResult, SolveStatus};
use prbp::strategies::{
    chain_golden, collector_full, figure1_golden, matvec_prbp, streaming_prbp, tree_golden,
    NamedSchedule,
};
use prbp::{validate_schedule, ComputationDag};
use rand::Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

/// Writes straight to stdout so the lines show up without `--nocapture`.
macro_rules! report {
    ($($fmt:tt)+) => {
        writeln!(std::io::stdout().lock(), $($fmt)+).expect("stdout")
    };
}

const SWEEP_SEED: u64 = 7;
const SWEEP_DAGS: usize = 200;
const SWEEP_MAX_N: usize = 8;

fn solve(dag: &ComputationDag, config: &GameConfig) -> SolveResult {
    solve_opt(dag, config, &SolveBudget::default()).expect("supported config")
}

fn exact(dag: &ComputationDag, config: &GameConfig) -> Result<(usize, Schedule), String> {
    let res = solve(dag, config);
    match (res.status, res.opt_cost, res.witness) {
        (SolveStatus::Optimal, Some(c), Some(w)) => Ok((c, w)),
        (status, ..) => Err(format!("solver ended with {status:?}")),
    }
}

/// Checks a golden schedule against its claim and returns its cost.
fn golden(named: &NamedSchedule, dag: &ComputationDag) -> Result<usize, String> {
    let rep = named.report(dag);
    ensure!(
        rep.is_complete(),
        "{} does not replay: {:?}",
        named.name,
        rep.first_error
    );
    ensure!(
        rep.io_cost == named.claimed_cost,
        "{} costs {} but claims {}",
        named.name,
        rep.io_cost,
        named.claimed_cost
    );
    Ok(rep.io_cost)
}

/// PRBP schedules collected for the extraction criterion.
#[derive(Default)]
struct Collected(Vec<(String, ComputationDag, Schedule)>);

impl Collected {
    fn push(&mut self, name: impl Into<String>, dag: &ComputationDag, schedule: &Schedule) {
        self.0.push((name.into(), dag.clone(), schedule.clone()));
    }
}

fn figure1(col: &mut Collected) -> Check {
    let dag = gen_figure1(true).map_err(|e| e.to_string())?;
    let (rbp, _) = exact(&dag, &GameConfig::rbp(4))?;
    let (prbp, w) = exact(&dag, &GameConfig::prbp(4))?;
    ensure!((rbp, prbp) == (3, 2), "OPT_RBP={rbp} OPT_PRBP={prbp}");
    let g_rbp = figure1_golden(GameKind::Rbp);
    let g_prbp = figure1_golden(GameKind::Prbp);
    ensure!(golden(&g_rbp, &dag)? == 3, "RBP golden cost");
    ensure!(golden(&g_prbp, &dag)? == 2, "PRBP golden cost");
    col.push("figure1 golden", &dag, &g_prbp.schedule);
    col.push("figure1 witness", &dag, &w);
    Ok("OPT_RBP=3 OPT_PRBP=2, both goldens at cost".into())
}

fn binary_tree(col: &mut Collected) -> Check {
    let dag = gen_kary_tree(2, 3).map_err(|e| e.to_string())?;
    let g_rbp = tree_golden(2, 3, GameKind::Rbp).map_err(|e| e.to_string())?;
    let g_prbp = tree_golden(2, 3, GameKind::Prbp).map_err(|e| e.to_string())?;
    ensure!(golden(&g_rbp, &dag)? == 15, "RBP golden cost");
    ensure!(golden(&g_prbp, &dag)? == 11, "PRBP golden cost");
    col.push("tree golden", &dag, &g_prbp.schedule);
    let budget = SolveBudget::states(10_000_000);
    let rbp = solve_opt(&dag, &GameConfig::rbp(3), &budget).map_err(|e| e.to_string())?;
    let prbp = solve_opt(&dag, &GameConfig::prbp(3), &budget).map_err(|e| e.to_string())?;
    if rbp.status == SolveStatus::Optimal && prbp.status == SolveStatus::Optimal {
        ensure!(
            (rbp.opt_cost, prbp.opt_cost) == (Some(15), Some(11)),
            "OPT_RBP={:?} OPT_PRBP={:?}",
            rbp.opt_cost,
            prbp.opt_cost
        );
        col.push("tree witness", &dag, prbp.witness.as_ref().unwrap());
        Ok("mode=exact OPT_RBP=15 OPT_PRBP=11, goldens at cost".into())
    } else {
        ensure!(
            dag.trivial_cost() <= 11,
            "trivial bound above the golden cost"
        );
        Ok("mode=golden (exact search hit the budget), goldens at 15/11".into())
    }
}

fn tree_formulas(col: &mut Collected) -> Check {
    let mut seen = Vec::new();
    for (k, d) in [(2, 3), (2, 4), (3, 3)] {
        let dag = gen_kary_tree(k, d).map_err(|e| e.to_string())?;
        let rbp = k.pow(d as u32) + 2 * k.pow(d as u32 - 1) - 1;
        let prbp = k.pow(d as u32) + 2 * k.pow((d - k) as u32) - 1;
        for (kind, want) in [(GameKind::Rbp, rbp), (GameKind::Prbp, prbp)] {
            let named = tree_golden(k, d, kind).map_err(|e| e.to_string())?;
            let got = golden(&named, &dag)?;
            ensure!(got == want, "k={k} d={d} {kind:?}: {got} != {want}");
            if kind == GameKind::Prbp {
                col.push(format!("tree({k},{d}) golden"), &dag, &named.schedule);
            }
        }
        seen.push(format!("({k},{d})={rbp}/{prbp}"));
    }
    Ok(seen.join(" "))
}

fn matvec(col: &mut Collected) -> Check {
    let dag = gen_matvec(3).map_err(|e| e.to_string())?;
    let named = matvec_prbp(3).map_err(|e| e.to_string())?;
    let cost = golden(&named, &dag)?;
    ensure!(
        cost == 15 && cost == dag.trivial_cost(),
        "PRBP cost {cost}, trivial {}",
        dag.trivial_cost()
    );
    col.push("matvec golden", &dag, &named.schedule);
    let (rbp, _) = exact(&dag, &GameConfig::rbp(6))?;
    ensure!(rbp == 3 * 3 + 3 * 3 - 1, "OPT_RBP={rbp}");
    Ok("PRBP 15 = trivial, exact OPT_RBP=17".into())
}

fn chained(col: &mut Collected) -> Check {
    let mut rbp_opts = Vec::new();
    for g in 1..=3 {
        let dag = gen_figure1_chain(g).map_err(|e| e.to_string())?;
        let (rbp, _) = exact(&dag, &GameConfig::rbp(4))?;
        rbp_opts.push(rbp);
        if g >= 2 {
            let named = chain_golden(g).map_err(|e| e.to_string())?;
            ensure!(golden(&named, &dag)? == 2, "g={g} PRBP golden cost");
            col.push(format!("chain({g}) golden"), &dag, &named.schedule);
        }
    }
    ensure!(rbp_opts[1] >= 2 + 2, "g=2 OPT_RBP={}", rbp_opts[1]);
    ensure!(
        rbp_opts.windows(2).all(|w| w[0] < w[1]),
        "not increasing: {rbp_opts:?}"
    );
    Ok(format!(
        "PRBP golden 2 for g=2,3; OPT_RBP for g=1..3: {rbp_opts:?}"
    ))
}

fn collector(col: &mut Collected) -> Check {
    let (d, l) = (2, 8);
    let dag = gen_pebble_collector(d, l).map_err(|e| e.to_string())?;
    let named = collector_full(d, l).map_err(|e| e.to_string())?;
    let cost = golden(&named, &dag)?;
    ensure!(cost == 3 && cost == dag.trivial_cost(), "r=4 cost {cost}");
    col.push("collector golden", &dag, &named.schedule);
    let (opt, w) = exact(&dag, &GameConfig::prbp(3))?;
    let bound = l / (2 * d) + dag.trivial_cost();
    ensure!(opt >= bound, "r=3 OPT_PRBP={opt} < {bound}");
    col.push("collector witness", &dag, &w);
    Ok(format!(
        "r=4 cost 3 = trivial, r=3 OPT_PRBP={opt} >= {bound}"
    ))
}

fn spart(col: &mut Collected) -> Check {
    let h = 3;
    let dag = gen_spart_counterexample(h).map_err(|e| e.to_string())?;
    let named = streaming_prbp(&dag, 3);
    let rep = named.report(&dag);
    ensure!(rep.is_complete(), "streaming schedule does not replay");
    ensure!(
        rep.io_cost == 8 && dag.trivial_cost() == 8,
        "cost {}",
        rep.io_cost
    );
    col.push("spart streaming", &dag, &named.schedule);

    let one = Partition::Nodes(NodePartition {
        classes: vec![(0..dag.node_count()).collect()],
    });
    let verdict =
        validate_partition(&dag, &one, 6, PartitionKind::SPartition).map_err(|e| e.to_string())?;
    ensure!(!verdict.valid, "single class accepted");
    ensure!(
        verdict.failed_condition == Some(Condition::DominatorSize),
        "failed on {:?}",
        verdict.failed_condition
    );
    let paths = match &verdict.witness {
        Some(Witness::DisjointPaths(p)) => p.len(),
        other => return Err(format!("witness {other:?}")),
    };
    ensure!(paths > 6, "only {paths} disjoint paths");

    let cert = spart_counting_bound(&dag, 6).map_err(|e| e.to_string())?;
    let claim = h as f64 / 6.0 + 1.0;
    let holds = cert.bound as f64 >= claim;
    ensure!(holds, "certificate bound {} < {claim}", cert.bound);
    Ok(format!(
        "streaming 8 = trivial, single class fails with {paths} disjoint paths, MIN_part(6) >= {}",
        cert.bound
    ))
}

fn extraction(col: &Collected) -> Check {
    for (name, dag, schedule) in &col.0 {
        let r = schedule.config.capacity;
        let rep = validate_schedule(dag, &schedule.config, &schedule.moves);
        let c = rep.io_cost;
        let edges =
            edge_partition_from_schedule(dag, schedule).map_err(|e| format!("{name}: {e}"))?;
        let nodes =
            node_partition_from_schedule(dag, schedule).map_err(|e| format!("{name}: {e}"))?;
        for (part, kind) in [
            (Partition::Edges(edges), PartitionKind::SEdgePartition),
            (Partition::Nodes(nodes), PartitionKind::SDominatorPartition),
        ] {
            let k = match &part {
                Partition::Edges(p) => p.classes.len(),
                Partition::Nodes(p) => p.classes.len(),
            };
            let verdict = validate_partition(dag, &part, 2 * r, kind).map_err(|e| e.to_string())?;
            ensure!(
                verdict.valid,
                "{name} {kind:?}: {:?}",
                verdict.failed_condition
            );
            ensure!(
                r * k >= c && c >= r * (k - 1),
                "{name} {kind:?}: r={r} k={k} C={c}"
            );
        }
    }
    Ok(format!(
        "{} PRBP schedules, edge and node partitions valid at S=2r",
        col.0.len()
    ))
}

/// Solver results on the shared random sweep.
struct SweepRow {
    dag: ComputationDag,
    r: usize,
    kind: GameKind,
    res: SolveResult,
}

fn sweep_dags() -> Vec<ComputationDag> {
    let mut rng = common::rng(SWEEP_SEED);
    (0..SWEEP_DAGS)
        .map(|_| common::random_dag(&mut rng, SWEEP_MAX_N))
        .collect()
}

fn agreement(dags: &[ComputationDag], rows: &mut Vec<SweepRow>, col: &mut Collected) -> Check {
    let mut bad = Vec::new();
    let mut optimal = 0;
    for (i, dag) in dags.iter().enumerate() {
        for r in 2..=4 {
            for kind in [GameKind::Rbp, GameKind::Prbp] {
                let config = GameConfig::new(kind, r);
                let res = solve(dag, &config);
                let oracle = brute_force_opt(dag, &config, 64).map_err(|e| e.to_string())?;
                if (res.status, res.opt_cost) != (oracle.status, oracle.opt_cost) {
                    bad.push(format!(
                        "dag {i} r={r} {kind:?}: solver {:?}/{:?} brute {:?}/{:?}",
                        res.status, res.opt_cost, oracle.status, oracle.opt_cost
                    ));
                }
                ensure!(
                    res.status != SolveStatus::BudgetExhausted,
                    "dag {i} r={r} {kind:?} hit the budget"
                );
                if let Some(w) = &res.witness {
                    optimal += 1;
                    if kind == GameKind::Prbp {
                        col.push(format!("sweep {i} r={r}"), dag, w);
                    }
                }
                rows.push(SweepRow {
                    dag: dag.clone(),
                    r,
                    kind,
                    res,
                });
            }
        }
    }
    ensure!(
        bad.is_empty(),
        "{} disagreements, first: {}",
        bad.len(),
        bad[0]
    );
    Ok(format!(
        "{} instances, {optimal} solved, 0 disagreements",
        rows.len()
    ))
}

fn bound_soundness(rows: &[SweepRow]) -> Check {
    let mut checked = 0;
    for row in rows
        .iter()
        .filter(|row| row.kind == GameKind::Prbp && row.r <= 3)
    {
        let opt = row.res.opt_cost.ok_or("PRBP instance without an optimum")?;
        let s = 2 * row.r;
        for kind in [
            PartitionKind::SEdgePartition,
            PartitionKind::SDominatorPartition,
        ] {
            let min =
                min_classes_brute_force(&row.dag, s, kind, true).map_err(|e| e.to_string())?;
            let bound = lower_bound(row.r, min);
            ensure!(
                opt >= bound,
                "r={} {kind:?}: OPT={opt} < r(MIN-1)={bound}",
                row.r
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} bound checks, 0 violations"))
}

fn translation(rows: &[SweepRow]) -> Check {
    let witnesses: Vec<_> = rows
        .iter()
        .filter(|row| row.kind == GameKind::Rbp)
        .filter_map(|row| row.res.witness.as_ref().map(|w| (&row.dag, w)))
        .take(100)
        .collect();
    ensure!(
        witnesses.len() == 100,
        "only {} RBP witnesses",
        witnesses.len()
    );
    for (dag, w) in &witnesses {
        let rbp = validate_schedule(dag, &w.config, &w.moves);
        let out = translate_rbp_to_prbp(dag, w).map_err(|e| e.to_string())?;
        let prbp = validate_schedule(dag, &out.config, &out.moves);
        ensure!(
            prbp.is_complete(),
            "translation does not replay: {:?}",
            prbp.first_error
        );
        ensure!(
            prbp.io_cost == rbp.io_cost,
            "cost {} became {}",
            rbp.io_cost,
            prbp.io_cost
        );
    }
    Ok("100 RBP witnesses translate at identical cost".into())
}

/// Size of the largest clique, by checking every subset.
fn clique_size_by_subsets(g: &UndirectedGraph) -> usize {
    let n = g.node_count();
    (0u32..1 << n)
        .filter(|&mask| {
            let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            vs.iter()
                .enumerate()
                .all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

fn reductions() -> Check {
    let mut rng = common::rng(12);
    for i in 0..100 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.9);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        let g = UndirectedGraph::new(n, edges).map_err(|e| e.to_string())?;
        let want = clique_size_by_subsets(&g);
        let found = maxclique_brute_oracle(&g).map_err(|e| e.to_string())?;
        ensure!(
            found.clique.len() == want,
            "graph {i}: oracle clique {} != {want}",
            found.clique.len()
        );
        ensure!(
            brute_force_max_clique_size(&g).map_err(|e| e.to_string())? == want,
            "graph {i}: brute force disagrees"
        );
        let c = &found.clique;
        ensure!(
            c.iter()
                .enumerate()
                .all(|(j, &a)| c[j + 1..].iter().all(|&b| g.has_edge(a, b))),
            "graph {i}: oracle result is not a clique"
        );
    }

    let path = UndirectedGraph::new(3, [(0, 1), (1, 2)]).map_err(|e| e.to_string())?;
    ensure!(
        !maxinset_vertex(&path, 1).map_err(|e| e.to_string())?,
        "b is in a maximum independent set"
    );
    ensure!(
        maxinset_vertex(&path, 0).map_err(|e| e.to_string())?,
        "a is not in a maximum independent set"
    );

    let (n0, e0, b) = (2, 1, 4);
    let edge = UndirectedGraph::new(n0, [(0, 1)]).map_err(|e| e.to_string())?;
    let (_, meta) = gen_maxinset_reduction(&edge, 0, b).map_err(|e| e.to_string())?;
    ensure!(meta.r == b + 4 * n0 + 5, "r={}", meta.r);
    ensure!(
        meta.group_size == b + 4 * n0 + 3,
        "group size {}",
        meta.group_size
    );
    ensure!(meta.l == 2 * meta.l0 + n0 + (meta.r - 2), "l={}", meta.l);
    // l0 / (2(r-2)) - (r-1) > n0 b + 2|E0| + 6, cleared of denominators.
    let long_enough = |l0: usize| l0 > 2 * (meta.r - 2) * (n0 * b + 2 * e0 + 6 + meta.r - 1);
    ensure!(long_enough(meta.l0), "inequality fails at l0={}", meta.l0);
    ensure!(!long_enough(meta.l0 - 1), "l0={} is not minimal", meta.l0);
    Ok(format!(
        "100 graphs agree, path a-b-c ok, single edge r={} group={} l0={} l={}",
        meta.r, meta.group_size, meta.l0, meta.l
    ))
}

fn asymptotics() -> Check {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    for i in 0..10usize {
        let r = 2 + 3 * i;
        let rf = r as f64;

        let m = 4 << i;
        let got = analytic_bound(AnalyticFamily::Fft { m }, r).map_err(|e| e.to_string())?;
        let mf = m as f64;
        let want = mf * mf.ln() / rf.ln();
        ensure!(
            got.asymptotic && close(got.value, want),
            "fft m={m} r={r}: {} != {want}",
            got.value
        );

        let (m1, m2, m3) = (i + 1, 2 * i + 3, 5);
        let got =
            analytic_bound(AnalyticFamily::MatMul { m1, m2, m3 }, r).map_err(|e| e.to_string())?;
        let want = (m1 * m2 * m3) as f64 / rf.powf(0.5);
        ensure!(
            got.asymptotic && close(got.value, want),
            "matmul r={r}: {} != {want}",
            got.value
        );

        let (m, d) = (8 * (i + 1), i + 1);
        let got =
            analytic_bound(AnalyticFamily::Attention { m, d }, r).map_err(|e| e.to_string())?;
        let (mf, df) = (m as f64, d as f64);
        let want = if df * df / rf < df / rf.powf(0.5) {
            mf * mf * df * df / rf
        } else {
            mf * mf * df / rf.powf(0.5)
        };
        ensure!(
            got.asymptotic && close(got.value, want),
            "attention m={m} d={d} r={r}: {} != {want}",
            got.value
        );
    }
    Ok("30 points across fft, matmul, attention; all flagged asymptotic".into())
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut col = Collected::default();
    let mut results: Vec<(usize, Check)> = vec![
        (1, figure1(&mut col)),
        (2, binary_tree(&mut col)),
        (3, tree_formulas(&mut col)),
        (4, matvec(&mut col)),
        (5, chained(&mut col)),
        (6, collector(&mut col)),
        (7, spart(&mut col)),
    ];
    let dags = sweep_dags();
    let mut rows = Vec::new();
    results.push((10, agreement(&dags, &mut rows, &mut col)));
    results.push((8, extraction(&col)));
    results.push((9, bound_soundness(&rows)));
    results.push((11, translation(&rows)));
    results.push((12, reductions()));
    results.push((13, asymptotics()));
    results.sort_by_key(|(id, _)| *id);

    for (id, res) in &results {
        match res {
            Ok(detail) => report!("[PASS] criterion {id:>2}: {detail}"),
            Err(why) => report!("[FAIL] criterion {id:>2}: {why}"),
        }
    }
    report!("acceptance finished in {:.1?}", start.elapsed());
    let failed: Vec<usize> = results
        .iter()
        .filter(|(_, r)| r.is_err())
        .map(|(id, _)| *id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
