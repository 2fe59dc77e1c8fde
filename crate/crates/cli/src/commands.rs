use std::fs;
use std::path::Path;

use prbp::dag::{ComputationDag, DagFile};
use prbp::game::{parse_ratio, validate_schedule, GameConfig, GameKind, Move, ScheduleFile};
use prbp::generators::{gen_maxinset_reduction, GeneratorSpec};
use prbp::partitions::{
    analytic_bound, edge_partition_from_schedule, lower_bound, min_classes_brute_force,
    node_partition_from_schedule, spart_counting_bound, validate_partition, AnalyticFamily,
    Partition, PartitionError, PartitionKind,
};
use prbp::reductions::{maxinset_vertex, UndirectedGraph};
use prbp::solver::{compare_models, solve_opt, SolveBudget, SolveError, SolveStatus};
use prbp::strategies::{
    chain_golden, collector_full, figure1_golden, matvec_prbp, streaming_prbp, tree_golden,
    zipper_prbp, zipper_rbp, NamedSchedule,
};
use prbp::Schedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::args::{
    BoundFamily, Command, Family, Game, GameArgs, Global, GoldenFamily, PartitionCmd,
};
use crate::manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    #[error("{0}")]
    Usage(String),
    /// Well-formed input that fails the requested check.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

pub struct Ctx<'a> {
    pub global: &'a Global,
    pub manifest: RunManifest,
}

impl Ctx<'_> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.manifest.record_input(path, &bytes);
        String::from_utf8(bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn read_json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn read_dag(&mut self, path: &Path) -> Result<ComputationDag, CliError> {
        let file: DagFile = self.read_json(path)?;
        file.build()
            .map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn read_schedule(&mut self, path: &Path) -> Result<(Vec<Move>, Option<GameConfig>), CliError> {
        let file: ScheduleFile = self.read_json(path)?;
        Ok(file.into_parts())
    }

    fn write_file(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.manifest.record_output(path);
        Ok(())
    }

    /// Writes the primary output as one line of compact JSON.
    fn emit(&mut self, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string(value).map_err(usage)?;
        text.push('\n');
        match self.global.out.clone() {
            Some(path) => self.write_file(&path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Emits a DAG file, plus its DOT rendering when `--dot` is set: next to
    /// `--out` if given, otherwise inline under a `dot` key.
    fn emit_dag(&mut self, dag: &ComputationDag, file: DagFile) -> Result<(), CliError> {
        if !self.global.dot {
            return self.emit(&file);
        }
        match self.global.out.clone() {
            Some(out) => {
                self.write_file(&out.with_extension("dot"), &dag.to_dot())?;
                self.emit(&file)
            }
            None => {
                let mut value = serde_json::to_value(&file).map_err(usage)?;
                value["dot"] = dag.to_dot().into();
                self.emit(&value)
            }
        }
    }

    fn budget(&self) -> SolveBudget {
        SolveBudget {
            max_states: self.global.budget_states,
            max_seconds: self.global.budget_seconds,
            upper_bound_seed: None,
        }
    }
}

/// Game config from flags, falling back to one read from a file.
fn config(args: &GameArgs, fallback: Option<GameConfig>) -> Result<GameConfig, CliError> {
    let mut cfg = match (args.game, args.r, fallback) {
        (Some(g), Some(r), _) => GameConfig::new(g.into(), r),
        (g, r, Some(mut c)) => {
            if let Some(g) = g {
                c.kind = g.into();
            }
            if let Some(r) = r {
                c.capacity = r;
            }
            c
        }
        _ => return Err(usage("--game and --r are required")),
    };
    cfg.sliding |= args.sliding;
    cfg.allow_clear |= args.clear;
    cfg.no_deletion |= args.no_deletion;
    if let Some(eps) = &args.epsilon {
        cfg.compute_cost = parse_ratio(eps).map_err(usage)?;
    }
    if let Some(split) = args.split {
        cfg.prbp_compute_cost_split = split.into();
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

pub fn run(ctx: &mut Ctx, command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Gen { family } => gen(ctx, family),
        Command::Verify {
            dag,
            schedule,
            game,
        } => {
            let dag = ctx.read_dag(dag)?;
            let (moves, file_cfg) = ctx.read_schedule(schedule)?;
            let cfg = config(game, file_cfg)?;
            let report = validate_schedule(&dag, &cfg, &moves);
            ctx.emit(&report)?;
            Ok(if report.is_complete() {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Solve {
            dag,
            game,
            witness,
            upper_bound,
        } => {
            let dag = ctx.read_dag(dag)?;
            let cfg = config(game, None)?;
            let mut budget = ctx.budget();
            budget.upper_bound_seed = *upper_bound;
            let res = solve_opt(&dag, &cfg, &budget).map_err(solve_error)?;
            if let (Some(path), Some(w)) = (witness, &res.witness) {
                let mut text = serde_json::to_string(w).map_err(usage)?;
                text.push('\n');
                ctx.write_file(path, &text)?;
            }
            ctx.emit(&res)?;
            Ok(status_code(res.status))
        }
        Command::Compare { dag: path, r } => {
            let dag = ctx.read_dag(path)?;
            let cmp = match compare_models(&dag, *r, &ctx.budget()) {
                Ok(cmp) => cmp,
                Err(e @ SolveError::InfeasibleRbp { .. }) => {
                    eprintln!("{e}");
                    return Ok(EXIT_INFEASIBLE);
                }
                Err(e) => return Err(solve_error(e)),
            };
            ctx.emit(&json!({
                "dag": path.display().to_string(),
                "r": r,
                "opt_rbp": cmp.opt_rbp,
                "opt_prbp": cmp.opt_prbp,
                "strict": cmp.strict,
            }))?;
            let statuses = [cmp.rbp.status, cmp.prbp.status];
            Ok(if statuses.contains(&SolveStatus::BudgetExhausted) {
                EXIT_BUDGET
            } else if statuses.contains(&SolveStatus::Infeasible) {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            })
        }
        Command::Partition { action } => partition(ctx, action),
        Command::Bound {
            family,
            m,
            m1,
            m2,
            m3,
            d,
            r,
        } => {
            let need = |v: &Option<usize>, name: &str| {
                v.ok_or_else(|| usage(format!("--{name} is required")))
            };
            let fam = match family {
                BoundFamily::Fft => AnalyticFamily::Fft { m: need(m, "m")? },
                BoundFamily::Matmul => AnalyticFamily::MatMul {
                    m1: need(m1, "m1")?,
                    m2: need(m2, "m2")?,
                    m3: need(m3, "m3")?,
                },
                BoundFamily::Attention => AnalyticFamily::Attention {
                    m: need(m, "m")?,
                    d: need(d, "d")?,
                },
            };
            ctx.emit(&analytic_bound(fam, *r).map_err(usage)?)?;
            Ok(EXIT_OK)
        }
        Command::Reduce { graph, v0, b } => {
            let text = ctx.read(graph)?;
            let g0 = UndirectedGraph::parse_text(&text).map_err(usage)?;
            let answer = maxinset_vertex(&g0, *v0).map_err(usage)?;
            let (dag, meta) = gen_maxinset_reduction(&g0, *v0, *b).map_err(usage)?;
            let mut file = dag.to_file();
            file.meta = Some(serde_json::to_value(&meta).map_err(usage)?);
            let mut value = json!({ "dag": file, "maxinset_vertex": answer });
            if ctx.global.dot {
                match ctx.global.out.clone() {
                    Some(out) => ctx.write_file(&out.with_extension("dot"), &dag.to_dot())?,
                    None => value["dot"] = dag.to_dot().into(),
                }
            }
            ctx.emit(&value)?;
            Ok(EXIT_OK)
        }
        Command::Golden { family } => {
            let (named, dag) = golden(ctx, family)?;
            ctx.emit(&named)?;
            Ok(if named.holds(&dag) {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
    }
}

fn status_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => EXIT_OK,
        SolveStatus::BudgetExhausted => EXIT_BUDGET,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
    }
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::InfeasibleRbp { .. } => CliError::Failed(e.to_string()),
        _ => usage(e),
    }
}

fn gen(ctx: &mut Ctx, family: &Family) -> Result<i32, CliError> {
    let spec = match *family {
        Family::Figure1 { endpoints } => GeneratorSpec::Figure1 {
            with_endpoints: endpoints,
        },
        Family::Chain { g } => GeneratorSpec::Figure1Chain { copies: g },
        Family::Matvec { m } => GeneratorSpec::MatVec { m },
        Family::Zipper { d, l } => GeneratorSpec::Zipper { d, chain_len: l },
        Family::Kary { k, d } => GeneratorSpec::KaryTree { k, d },
        Family::Collector { d, l } => GeneratorSpec::PebbleCollector { d, chain_len: l },
        Family::Spart { h } => GeneratorSpec::SPartCounterexample { h },
        Family::Fft { m } => GeneratorSpec::Fft { m },
        Family::Matmul { m1, m2, m3 } => GeneratorSpec::MatMul { m1, m2, m3 },
        Family::Attention { m, d } => GeneratorSpec::Attention { m, d },
        Family::Random { n, p } => {
            let dag = random_dag(n, p, ctx.global.seed)?;
            let mut file = dag.to_file();
            file.meta = Some(json!({
                "family": "random",
                "n": n,
                "p": p,
                "seed": ctx.global.seed,
                "stats": dag.stats(),
            }));
            ctx.emit_dag(&dag, file)?;
            return Ok(EXIT_OK);
        }
    };
    let dag = spec.build().map_err(usage)?;
    let (n, m) = spec.expected_counts();
    let mut file = dag.to_file();
    file.meta = Some(json!({
        "generator": spec,
        "expected": { "n": n, "edges": m },
        "stats": dag.stats(),
    }));
    ctx.emit_dag(&dag, file)?;
    Ok(EXIT_OK)
}

fn random_dag(n: usize, p: f64, seed: u64) -> Result<ComputationDag, CliError> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(usage("random DAGs need n >= 2 and 0 <= p <= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    // Attach isolated nodes to a random partner.
    for v in 0..n {
        if !edges.iter().any(|&(a, b)| a == v || b == v) {
            let w = (v + rng.gen_range(1..n)) % n;
            edges.push((v.min(w), v.max(w)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    ComputationDag::new(n, edges).map_err(usage)
}

fn partition_error(e: PartitionError) -> CliError {
    match e {
        PartitionError::InvalidSchedule(_)
        | PartitionError::NotPrbp
        | PartitionError::ClearUnsupported => CliError::Failed(e.to_string()),
        _ => usage(e),
    }
}

fn partition(ctx: &mut Ctx, action: &PartitionCmd) -> Result<i32, CliError> {
    match action {
        PartitionCmd::Extract {
            dag,
            schedule,
            r,
            nodes,
        } => {
            let dag = ctx.read_dag(dag)?;
            let (moves, file_cfg) = ctx.read_schedule(schedule)?;
            let config = match (file_cfg, r) {
                (Some(mut c), r) => {
                    if let Some(r) = r {
                        c.capacity = *r;
                    }
                    c
                }
                (None, Some(r)) => GameConfig::new(GameKind::Prbp, *r),
                (None, None) => return Err(usage("--r is required for a bare move list")),
            };
            let schedule = Schedule::new(config, moves);
            let partition = if *nodes {
                Partition::Nodes(
                    node_partition_from_schedule(&dag, &schedule).map_err(partition_error)?,
                )
            } else {
                Partition::Edges(
                    edge_partition_from_schedule(&dag, &schedule).map_err(partition_error)?,
                )
            };
            ctx.emit(&partition)?;
            Ok(EXIT_OK)
        }
        PartitionCmd::Validate {
            dag,
            partition,
            s,
            kind,
        } => {
            let dag = ctx.read_dag(dag)?;
            let partition: Partition = ctx.read_json(partition)?;
            let verdict = validate_partition(&dag, &partition, *s, (*kind).into())
                .map_err(partition_error)?;
            ctx.emit(&verdict)?;
            Ok(if verdict.valid { EXIT_OK } else { EXIT_FAILED })
        }
        PartitionCmd::Min {
            dag,
            s,
            kind,
            force,
        } => {
            let dag = ctx.read_dag(dag)?;
            let kind: PartitionKind = (*kind).into();
            let k = min_classes_brute_force(&dag, *s, kind, *force).map_err(partition_error)?;
            ctx.emit(&json!({ "kind": kind, "s": s, "min_classes": k }))?;
            Ok(EXIT_OK)
        }
        PartitionCmd::Bound {
            r,
            min_k,
            dag,
            kind,
            force,
        } => {
            let k = match (min_k, dag, kind) {
                (Some(k), _, _) => *k,
                (None, Some(path), Some(kind)) => {
                    let dag = ctx.read_dag(path)?;
                    min_classes_brute_force(&dag, 2 * r, (*kind).into(), *force)
                        .map_err(partition_error)?
                }
                _ => return Err(usage("give --min-k, or --dag with --kind")),
            };
            ctx.emit(&json!({ "r": r, "s": 2 * r, "min_k": k, "bound": lower_bound(*r, k) }))?;
            Ok(EXIT_OK)
        }
        PartitionCmd::Spart { dag, s } => {
            let dag = ctx.read_dag(dag)?;
            let cert =
                spart_counting_bound(&dag, *s).map_err(|e| CliError::Failed(e.to_string()))?;
            ctx.emit(&cert)?;
            Ok(EXIT_OK)
        }
    }
}

fn golden(
    ctx: &mut Ctx,
    family: &GoldenFamily,
) -> Result<(NamedSchedule, ComputationDag), CliError> {
    let build = |spec: GeneratorSpec| spec.build().map_err(usage);
    Ok(match *family {
        GoldenFamily::Figure1 { game } => (
            figure1_golden(game.into()),
            build(GeneratorSpec::Figure1 {
                with_endpoints: true,
            })?,
        ),
        GoldenFamily::Chain { g } => (
            chain_golden(g).map_err(usage)?,
            build(GeneratorSpec::Figure1Chain { copies: g })?,
        ),
        GoldenFamily::Matvec { m } => (
            matvec_prbp(m).map_err(usage)?,
            build(GeneratorSpec::MatVec { m })?,
        ),
        GoldenFamily::Tree { k, d, game } => (
            tree_golden(k, d, game.into()).map_err(usage)?,
            build(GeneratorSpec::KaryTree { k, d })?,
        ),
        GoldenFamily::Zipper { d, l, game } => {
            let named = match game {
                Game::Rbp => zipper_rbp(d, l),
                Game::Prbp => zipper_prbp(d, l),
            }
            .map_err(usage)?;
            (named, build(GeneratorSpec::Zipper { d, chain_len: l })?)
        }
        GoldenFamily::Collector { d, l } => (
            collector_full(d, l).map_err(usage)?,
            build(GeneratorSpec::PebbleCollector { d, chain_len: l })?,
        ),
        GoldenFamily::Streaming { ref dag, r } => {
            let dag = ctx.read_dag(dag)?;
            if r < 2 {
                return Err(usage("streaming needs r >= 2"));
            }
            (streaming_prbp(&dag, r), dag)
        }
    })
}
