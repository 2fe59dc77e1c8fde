//! Partitions read off a complete PRBP schedule.
//!
//! The schedule is cut after every r-th I/O move. Moves after the last I/O
//! join the final segment, so there are max(1, ceil(C/r)) segments. A
//! segment that marks no edge yields an empty class; it is kept so that the
//! class count stays tied to C.

use super::{EdgePartition, NodePartition, PartitionError};
use crate::dag::ComputationDag;
use crate::game::{validate_schedule, GameKind, Move, MoveFailure, Schedule};

/// Segment index of every move.
fn segments(
    dag: &ComputationDag,
    schedule: &Schedule,
) -> Result<(Vec<usize>, usize), PartitionError> {
    let config = &schedule.config;
    if config.kind != GameKind::Prbp {
        return Err(PartitionError::NotPrbp);
    }
    if config.allow_clear {
        return Err(PartitionError::ClearUnsupported);
    }
    let report = validate_schedule(dag, config, &schedule.moves);
    if !report.is_complete() {
        let failure = report.first_error.unwrap_or(MoveFailure {
            index: None,
            reason: "schedule does not reach a terminal state".into(),
        });
        return Err(PartitionError::InvalidSchedule(failure));
    }
    let r = config.capacity;
    let k = report.io_cost.div_ceil(r).max(1);
    let mut io = 0;
    let seg = schedule
        .moves
        .iter()
        .map(|mv| {
            let s = (io / r).min(k - 1);
            io += usize::from(mv.is_io());
            s
        })
        .collect();
    Ok((seg, k))
}

/// Edges grouped by the segment in which they are marked.
pub fn edge_partition_from_schedule(
    dag: &ComputationDag,
    schedule: &Schedule,
) -> Result<EdgePartition, PartitionError> {
    let (seg, k) = segments(dag, schedule)?;
    let mut classes = vec![Vec::new(); k];
    for (mv, &s) in schedule.moves.iter().zip(&seg) {
        if let Move::PartialCompute { u, v } = *mv {
            classes[s].push((u, v));
        }
    }
    Ok(EdgePartition { classes })
}

/// Nodes grouped by the segment of the last marking of an in-edge; sources
/// by the segment of their first load.
pub fn node_partition_from_schedule(
    dag: &ComputationDag,
    schedule: &Schedule,
) -> Result<NodePartition, PartitionError> {
    let (seg, k) = segments(dag, schedule)?;
    let mut class = vec![None; dag.node_count()];
    for (mv, &s) in schedule.moves.iter().zip(&seg) {
        match *mv {
            Move::PartialCompute { v, .. } => class[v] = Some(s),
            Move::Load { v } if dag.is_source(v) && class[v].is_none() => class[v] = Some(s),
            _ => {}
        }
    }
    let mut classes = vec![Vec::new(); k];
    for (v, c) in class.into_iter().enumerate() {
        // A complete schedule marks every in-edge and loads every source.
        classes[c.expect("every node is reached")].push(v);
    }
    Ok(NodePartition { classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_figure1, gen_matvec};
    use crate::partitions::{validate_partition, Partition, PartitionKind};
    use crate::strategies::{figure1_golden, matvec_prbp, streaming_prbp};

    #[test]
    fn figure1_is_one_class() {
        let dag = gen_figure1(true).unwrap();
        let golden = figure1_golden(GameKind::Prbp);
        let edges = edge_partition_from_schedule(&dag, &golden.schedule).unwrap();
        assert_eq!(edges.classes.len(), 1);
        assert_eq!(edges.classes[0].len(), dag.edge_count());
        let p = Partition::Edges(edges);
        assert!(
            validate_partition(&dag, &p, 8, PartitionKind::SEdgePartition)
                .unwrap()
                .valid
        );
        let nodes = node_partition_from_schedule(&dag, &golden.schedule).unwrap();
        assert_eq!(nodes.classes.len(), 1);
    }

    #[test]
    fn matvec_has_three_classes() {
        let dag = gen_matvec(3).unwrap();
        let sched = matvec_prbp(3).unwrap().schedule;
        let edges = edge_partition_from_schedule(&dag, &sched).unwrap();
        assert_eq!(edges.classes.len(), 3);
        let p = Partition::Edges(edges);
        assert!(
            validate_partition(&dag, &p, 12, PartitionKind::SEdgePartition)
                .unwrap()
                .valid
        );
        let nodes = Partition::Nodes(node_partition_from_schedule(&dag, &sched).unwrap());
        assert_eq!(nodes.class_count(), 3);
        let v = validate_partition(&dag, &nodes, 12, PartitionKind::SDominatorPartition).unwrap();
        assert!(v.valid);
    }

    #[test]
    fn chain_streaming_is_one_class() {
        let dag = ComputationDag::new(3, [(0, 1), (1, 2)]).unwrap();
        let sched = streaming_prbp(&dag, 2).schedule;
        assert_eq!(
            edge_partition_from_schedule(&dag, &sched)
                .unwrap()
                .classes
                .len(),
            1
        );
        assert_eq!(
            node_partition_from_schedule(&dag, &sched)
                .unwrap()
                .classes
                .len(),
            1
        );
    }

    #[test]
    fn rejects_incomplete_and_rbp() {
        let dag = ComputationDag::new(3, [(0, 1), (1, 2)]).unwrap();
        let mut sched = streaming_prbp(&dag, 2).schedule;
        let last_save = sched
            .moves
            .iter()
            .rposition(|m| matches!(m, Move::Save { .. }));
        sched.moves.truncate(last_save.unwrap());
        assert!(matches!(
            edge_partition_from_schedule(&dag, &sched),
            Err(PartitionError::InvalidSchedule(_))
        ));
        sched.config.kind = GameKind::Rbp;
        assert_eq!(
            node_partition_from_schedule(&dag, &sched),
            Err(PartitionError::NotPrbp)
        );
    }
}
