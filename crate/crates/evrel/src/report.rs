//! Machine-readable JSON reports.

use evrel_core::harness::{AblationTable, MetricsReport, Prf, TrainingLog};
use evrel_core::inference::DecodeStats;
use evrel_core::losses::LossBreakdown;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrfJson {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<Prf> for PrfJson {
    fn from(p: Prf) -> Self {
        PrfJson { precision: p.precision, recall: p.recall, f1: p.f1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossJson {
    pub l_a: f64,
    pub l_s: f64,
    pub l_c: f64,
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub total: f64,
}

impl From<&LossBreakdown> for LossJson {
    fn from(l: &LossBreakdown) -> Self {
        LossJson { l_a: l.l_a, l_s: l.l_s, l_c: l.l_c, lambda_s: l.lambda_s, lambda_c: l.lambda_c, total: l.total }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub temporal: PrfJson,
    pub f1_pc: f64,
    pub f1_cp: f64,
    pub f1_micro: f64,
    pub violation_rate: f64,
    pub loss_curve: Vec<LossJson>,
}

impl From<&MetricsReport> for MetricsJson {
    fn from(m: &MetricsReport) -> Self {
        MetricsJson {
            temporal: m.temporal.into(),
            f1_pc: m.subevent.f1_pc,
            f1_cp: m.subevent.f1_cp,
            f1_micro: m.subevent.f1_micro,
            violation_rate: m.violation_rate,
            loss_curve: m.loss_curve.iter().map(LossJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochJson {
    pub epoch: usize,
    pub loss: LossJson,
    pub dev_temporal_f1: Option<f64>,
    pub dev_subevent_f1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingJson {
    pub epochs: Vec<EpochJson>,
    pub selected_epoch: Option<usize>,
}

impl From<&TrainingLog> for TrainingJson {
    fn from(log: &TrainingLog) -> Self {
        TrainingJson {
            epochs: log
                .epochs
                .iter()
                .map(|e| EpochJson {
                    epoch: e.epoch,
                    loss: (&e.loss).into(),
                    dev_temporal_f1: e.dev.map(|d| d.temporal_f1),
                    dev_subevent_f1: e.dev.map(|d| d.subevent_f1),
                })
                .collect(),
            selected_epoch: log.selected_epoch,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeStatsJson {
    pub document: String,
    pub n_events: usize,
    pub objective: f64,
    pub nodes_expanded: u64,
    pub wall_time_ms: Option<f64>,
    pub violations: usize,
}

impl DecodeStatsJson {
    pub fn new(document: &str, n_events: usize, s: &DecodeStats) -> Self {
        DecodeStatsJson {
            document: document.to_string(),
            n_events,
            objective: s.objective,
            nodes_expanded: s.nodes_expanded,
            wall_time_ms: s.wall_time.map(|d| d.as_secs_f64() * 1e3),
            violations: s.violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRowJson {
    pub name: String,
    pub metrics: MetricsJson,
}

/// One ladder per seed plus the per-row mean over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationJson {
    pub seeds: Vec<u64>,
    pub runs: Vec<Vec<AblationRowJson>>,
    pub mean: Vec<AblationRowJson>,
}

pub fn ablation_rows(table: &AblationTable) -> Vec<AblationRowJson> {
    table
        .rows
        .iter()
        .map(|r| AblationRowJson { name: r.name.clone(), metrics: (&r.report).into() })
        .collect()
}

/// Row-wise mean of several ladders with identical row names. Loss curves
/// are dropped.
pub fn mean_table(tables: &[AblationTable]) -> AblationTable {
    let Some(first) = tables.first() else { return AblationTable::default() };
    let k = tables.len() as f64;
    let mut out = AblationTable::default();
    for (i, row) in first.rows.iter().enumerate() {
        let mut m = MetricsReport::default();
        for t in tables {
            let r = &t.rows[i].report;
            m.temporal.precision += r.temporal.precision / k;
            m.temporal.recall += r.temporal.recall / k;
            m.temporal.f1 += r.temporal.f1 / k;
            m.subevent.f1_pc += r.subevent.f1_pc / k;
            m.subevent.f1_cp += r.subevent.f1_cp / k;
            m.subevent.f1_micro += r.subevent.f1_micro / k;
            m.violation_rate += r.violation_rate / k;
        }
        out.rows.push(evrel_core::harness::AblationRow { name: row.name.clone(), report: m });
    }
    out
}
