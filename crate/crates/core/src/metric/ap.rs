use std::collections::BTreeMap;

use serde::Serialize;

use super::chamfer::SampledShape;
use super::matching::Prediction;
use crate::element::{ElementClass, MapElement};
use crate::exec::Execution;

/// Chamfer thresholds in meters.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.5, 1.0, 1.5];

/// Ground truth and predictions of one frame, both in its ego frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalFrame {
    pub gts: Vec<MapElement>,
    pub preds: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAp {
    pub num_gt: usize,
    pub num_pred: usize,
    /// AP at each threshold, in threshold order.
    pub per_threshold: Vec<f64>,
    pub ap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApReport {
    pub thresholds: Vec<f64>,
    /// Classes without any ground truth are absent.
    pub classes: BTreeMap<ElementClass, ClassAp>,
    /// Mean over the classes present; `None` if no class has ground truth.
    pub map: Option<f64>,
}

impl ApReport {
    pub fn class_ap(&self, class: ElementClass) -> Option<f64> {
        self.classes.get(&class).map(|c| c.ap)
    }

    /// Flat `{"AP_dsh": …, …, "mAP": …}` summary; undefined values are null.
    pub fn summary(&self) -> BTreeMap<String, Option<f64>> {
        let mut out: BTreeMap<String, Option<f64>> = ElementClass::ALL
            .into_iter()
            .map(|c| (format!("AP_{}", c.short_name()), self.class_ap(c)))
            .collect();
        out.insert("mAP".into(), self.map);
        out
    }
}

/// Area under the precision/recall curve with all-points interpolation:
/// precision at each recall level is replaced by the maximum precision at any
/// higher recall. `tp` is the TP/FP flag of each ranked prediction.
pub fn interpolated_ap(tp: &[bool], num_gt: usize) -> f64 {
    if num_gt == 0 {
        return 0.0;
    }
    let mut precision = Vec::with_capacity(tp.len());
    let mut recall = Vec::with_capacity(tp.len());
    let mut hits = 0usize;
    for (k, &t) in tp.iter().enumerate() {
        hits += t as usize;
        precision.push(hits as f64 / (k + 1) as f64);
        recall.push(hits as f64 / num_gt as f64);
    }
    for k in (0..precision.len().saturating_sub(1)).rev() {
        precision[k] = precision[k].max(precision[k + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in recall.into_iter().zip(precision) {
        ap += (r - prev_recall) * p;
        prev_recall = r;
    }
    ap
}

/// Chamfer distances between one frame's predictions and ground truths of a
/// single class: `costs[pred][gt]`.
struct ClassFrame {
    confidences: Vec<f64>,
    costs: Vec<Vec<f64>>,
    num_gt: usize,
}

fn class_frame(frame: &EvalFrame, class: ElementClass) -> ClassFrame {
    let gts: Vec<SampledShape> = frame
        .gts
        .iter()
        .filter(|g| g.class == class)
        .map(|g| SampledShape::new(&g.geometry))
        .collect();
    let preds: Vec<&Prediction> = frame.preds.iter().filter(|p| p.class() == class).collect();
    let costs = preds
        .iter()
        .map(|p| {
            let shape = SampledShape::new(&p.element.geometry);
            gts.iter().map(|g| shape.chamfer(g)).collect()
        })
        .collect();
    ClassFrame {
        confidences: preds.iter().map(|p| p.confidence).collect(),
        costs,
        num_gt: gts.len(),
    }
}

/// TP flags of the confidence-ranked predictions at one threshold. Each
/// prediction takes the closest still-unmatched GT of its frame within the
/// threshold; ties in confidence keep frame/input order.
fn greedy_flags(frames: &[ClassFrame], threshold: f64) -> Vec<bool> {
    let mut ranked: Vec<(usize, usize)> = frames
        .iter()
        .enumerate()
        .flat_map(|(f, cf)| (0..cf.confidences.len()).map(move |p| (f, p)))
        .collect();
    ranked.sort_by(|a, b| frames[b.0].confidences[b.1].total_cmp(&frames[a.0].confidences[a.1]));
    let mut taken: Vec<Vec<bool>> = frames.iter().map(|cf| vec![false; cf.num_gt]).collect();
    ranked
        .into_iter()
        .map(|(f, p)| {
            let mut best: Option<(usize, f64)> = None;
            for (g, &d) in frames[f].costs[p].iter().enumerate() {
                if !taken[f][g] && d <= threshold && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((g, d));
                }
            }
            match best {
                Some((g, _)) => {
                    taken[f][g] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

/// Per-class AP averaged over `thresholds`, and their mean over classes.
pub fn average_precision(frames: &[EvalFrame], thresholds: &[f64], exec: Execution) -> ApReport {
    let mut classes = BTreeMap::new();
    for class in ElementClass::ALL {
        let per_frame = exec.map(frames, |f| class_frame(f, class));
        let num_gt: usize = per_frame.iter().map(|cf| cf.num_gt).sum();
        if num_gt == 0 {
            log::warn!("no ground truth for class {class}; excluded from mAP");
            continue;
        }
        let num_pred = per_frame.iter().map(|cf| cf.confidences.len()).sum();
        let per_threshold: Vec<f64> = thresholds
            .iter()
            .map(|&t| interpolated_ap(&greedy_flags(&per_frame, t), num_gt))
            .collect();
        let ap = per_threshold.iter().sum::<f64>() / thresholds.len() as f64;
        classes.insert(
            class,
            ClassAp {
                num_gt,
                num_pred,
                per_threshold,
                ap,
            },
        );
    }
    let map = (!classes.is_empty())
        .then(|| classes.values().map(|c| c.ap).sum::<f64>() / classes.len() as f64);
    ApReport {
        thresholds: thresholds.to_vec(),
        classes,
        map,
    }
}
