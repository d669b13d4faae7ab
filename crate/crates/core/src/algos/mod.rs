//! Approximation algorithms with LP certificates, and the Kruskal dual.

pub mod kruskal_dual;
pub mod loss_contract;
pub mod one_pass;
pub mod ratio_greedy;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::Mask;
use crate::hyper::FullComponent;
use crate::partition::Partition;
use crate::ring::Surd;

pub use kruskal_dual::{kruskal_dual, KruskalDual};
pub use loss_contract::{loss_contracting, LossContractResult};
pub use one_pass::{one_pass_reduced, OnePassResult};
pub use ratio_greedy::{ratio_greedy, ratio_greedy_constant, RatioGreedyResult};

/// Dual solution of the partition LP: a value per partition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionDual {
    pub values: Vec<(Partition, Surd)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowViolation {
    pub component: usize,
    pub load: Surd,
    pub cost: Surd,
}

impl PartitionDual {
    /// `Σ_π (r(π) - 1) y_π`.
    pub fn objective(&self) -> Surd {
        self.values.iter().map(|(p, y)| y.scale(&crate::ring::integer(p.rank() as i64 - 1))).sum()
    }

    /// `Σ_π rc_K^π y_π`.
    pub fn load(&self, set: Mask) -> Surd {
        self.values.iter().map(|(p, y)| y.scale(&crate::ring::integer(p.rank_contribution(set) as i64))).sum()
    }

    pub fn scaled(&self, factor: &Surd) -> PartitionDual {
        PartitionDual { values: self.values.iter().map(|(p, y)| (p.clone(), y * factor)).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|(_, y)| !y.is_negative())
    }

    /// Component rows `Σ_π rc_K^π y_π <= C_K` that fail.
    pub fn violations(&self, components: &[FullComponent]) -> Vec<RowViolation> {
        components
            .iter()
            .enumerate()
            .filter_map(|(i, fc)| {
                let load = self.load(fc.terminals);
                (load > fc.cost).then(|| RowViolation { component: i, load, cost: fc.cost.clone() })
            })
            .collect()
    }

    pub fn is_feasible(&self, components: &[FullComponent]) -> bool {
        self.is_nonnegative() && self.violations(components).is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    Colex,
    Shuffle(u64),
}

impl ScanOrder {
    pub fn order(&self, len: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..len).collect();
        if let ScanOrder::Shuffle(seed) = self {
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
        }
        idx
    }
}

/// One scanned component of a one-pass heuristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub iteration: usize,
    /// Terminals of the component, as vertex ids of the starting instance.
    pub component: Vec<usize>,
    pub drop: Surd,
    pub gain: Surd,
    pub threshold: Surd,
    pub fired: bool,
    pub mtst_before: Surd,
    pub mtst_after: Surd,
    pub loss: Option<Surd>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeuristicTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Serialize)]
struct StepRecord<'a> {
    iteration: usize,
    component: &'a [usize],
    drop: String,
    gain: String,
    threshold: String,
    fired: bool,
    mtst_before: String,
    mtst_after: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    loss: Option<String>,
}

impl HeuristicTrace {
    pub fn fired(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.fired)
    }

    /// One JSON object per scanned component.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let record = StepRecord {
                iteration: s.iteration,
                component: &s.component,
                drop: s.drop.to_string(),
                gain: s.gain.to_string(),
                threshold: s.threshold.to_string(),
                fired: s.fired,
                mtst_before: s.mtst_before.to_string(),
                mtst_after: s.mtst_after.to_string(),
                loss: s.loss.as_ref().map(|l| l.to_string()),
            };
            out.push_str(&serde_json::to_string(&record).expect("serializable"));
            out.push('\n');
        }
        out
    }
}
