//! Precision-recall curves and average precision for scored detections
//! against ground truth. Matching is greedy in global confidence order;
//! AP is the exact area under the traced curve (all-points summation),
//! which keeps it oracle-checkable.

use std::collections::BTreeMap;

use crate::detect::iou;
use crate::geom::BBox;

/// A scored detection bound to its frame.
#[derive(Debug, Clone, Copy)]
pub struct ScoredBox {
    pub frame: u64,
    pub bbox: BBox,
    pub confidence: f32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
}

/// The traced curve plus its area. Recall is non-decreasing along
/// `points`.
#[derive(Debug, Clone)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub ap: f64,
}

impl PrCurve {
    /// Two-column text (recall, precision) plus an `ap=` line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# recall precision\n");
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.recall, p.precision));
        }
        out.push_str(&format!("ap={}\n", self.ap));
        out
    }
}

/// Trace the PR curve. Predictions sort by descending confidence (ties:
/// frame, then input order); each greedily claims the highest-IoU
/// unmatched ground-truth box in its frame, a true positive iff that IoU
/// reaches `iou_min`. With no ground truth or no predictions, AP is 0.
pub fn pr_curve(
    predictions: &[ScoredBox],
    truth: &BTreeMap<u64, Vec<BBox>>,
    iou_min: f32,
) -> PrCurve {
    assert!(iou_min > 0.0 && iou_min < 1.0, "iou_min must be in (0,1)");
    let total_gt: usize = truth.values().map(Vec::len).sum();
    if total_gt == 0 || predictions.is_empty() {
        return PrCurve { points: Vec::new(), ap: 0.0 };
    }

    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| {
        predictions[b]
            .confidence
            .total_cmp(&predictions[a].confidence)
            .then(predictions[a].frame.cmp(&predictions[b].frame))
            .then(a.cmp(&b))
    });

    let mut matched: BTreeMap<u64, Vec<bool>> =
        truth.iter().map(|(f, v)| (*f, vec![false; v.len()])).collect();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut points = Vec::with_capacity(order.len());
    // Every recall step is exactly one TP, so the all-points area is the
    // precision sum at TP events over the ground-truth total. Summing
    // first and dividing once keeps a perfect detector at exactly 1.0.
    let mut precision_at_tp_sum = 0.0f64;

    for idx in order {
        let pred = &predictions[idx];
        let mut best: Option<(usize, f32)> = None;
        if let Some(gts) = truth.get(&pred.frame) {
            let taken = matched.get(&pred.frame).unwrap();
            for (gi, gt) in gts.iter().enumerate() {
                if taken[gi] {
                    continue;
                }
                let overlap = iou(&pred.bbox, gt);
                match best {
                    Some((_, b)) if overlap <= b => {}
                    _ if overlap > 0.0 => best = Some((gi, overlap)),
                    _ => {}
                }
            }
        }
        let is_tp = match best {
            Some((gi, overlap)) if overlap >= iou_min => {
                matched.get_mut(&pred.frame).unwrap()[gi] = true;
                tp += 1;
                true
            }
            _ => {
                fp += 1;
                false
            }
        };
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / total_gt as f64;
        if is_tp {
            precision_at_tp_sum += precision;
        }
        points.push(PrPoint { recall, precision });
    }
    PrCurve { points, ap: precision_at_tp_sum / total_gt as f64 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x: f32, y: f32, w: f32, h: f32) -> BBox {
        BBox::new(x, y, w, h)
    }

    fn truth_of(frames: &[(u64, BBox)]) -> BTreeMap<u64, Vec<BBox>> {
        let mut t: BTreeMap<u64, Vec<BBox>> = BTreeMap::new();
        for (f, b) in frames {
            t.entry(*f).or_default().push(*b);
        }
        t
    }

    #[test]
    fn perfect_detector_has_ap_one() {
        let truth = truth_of(&[
            (0, bx(10.0, 10.0, 20.0, 40.0)),
            (0, bx(100.0, 10.0, 20.0, 40.0)),
            (1, bx(50.0, 50.0, 20.0, 40.0)),
        ]);
        let preds: Vec<ScoredBox> = truth
            .iter()
            .flat_map(|(f, boxes)| {
                boxes.iter().map(|b| ScoredBox { frame: *f, bbox: *b, confidence: 1.0 })
            })
            .collect();
        let curve = pr_curve(&preds, &truth, 0.5);
        assert_eq!(curve.ap, 1.0);
        assert!(curve.points.iter().all(|p| p.precision == 1.0));
    }

    #[test]
    fn no_predictions_means_ap_zero() {
        let truth = truth_of(&[(0, bx(0.0, 0.0, 10.0, 10.0))]);
        assert_eq!(pr_curve(&[], &truth, 0.5).ap, 0.0);
    }

    #[test]
    fn hand_enumerated_four_step_trace() {
        // 3 ground-truth boxes; 4 predictions, the second-ranked one a
        // false positive. Trace: P 1, 1/2, 2/3, 3/4 at R 1/3, 1/3, 2/3, 1.
        // AP = 1/3 * 1 + 0 + 1/3 * 2/3 + 1/3 * 3/4 = 29/36.
        let g0 = bx(0.0, 0.0, 10.0, 10.0);
        let g1 = bx(50.0, 0.0, 10.0, 10.0);
        let g2 = bx(100.0, 0.0, 10.0, 10.0);
        let truth = truth_of(&[(0, g0), (0, g1), (0, g2)]);
        let preds = vec![
            ScoredBox { frame: 0, bbox: g0, confidence: 0.9 },
            ScoredBox { frame: 0, bbox: bx(200.0, 0.0, 10.0, 10.0), confidence: 0.8 },
            ScoredBox { frame: 0, bbox: g1, confidence: 0.7 },
            ScoredBox { frame: 0, bbox: g2, confidence: 0.6 },
        ];
        let curve = pr_curve(&preds, &truth, 0.5);
        assert!((curve.ap - 29.0 / 36.0).abs() < 1e-12, "ap {}", curve.ap);
        let recalls: Vec<f64> = curve.points.iter().map(|p| p.recall).collect();
        assert_eq!(recalls, vec![1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn recall_is_non_decreasing() {
        let truth = truth_of(&[(0, bx(0.0, 0.0, 10.0, 10.0)), (1, bx(0.0, 0.0, 10.0, 10.0))]);
        let preds = vec![
            ScoredBox { frame: 0, bbox: bx(1.0, 0.0, 10.0, 10.0), confidence: 0.5 },
            ScoredBox { frame: 1, bbox: bx(30.0, 0.0, 10.0, 10.0), confidence: 0.9 },
            ScoredBox { frame: 0, bbox: bx(0.0, 0.0, 10.0, 10.0), confidence: 0.7 },
        ];
        let curve = pr_curve(&preds, &truth, 0.5);
        for w in curve.points.windows(2) {
            assert!(w[1].recall >= w[0].recall);
        }
    }

    #[test]
    fn ap_is_monotone_in_iou_threshold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let truth = truth_of(
                &(0..rng.gen_range(1..5))
                    .map(|_| {
                        (
                            rng.gen_range(0..3u64),
                            bx(
                                rng.gen_range(0.0f32..80.0),
                                rng.gen_range(0.0f32..80.0),
                                rng.gen_range(5.0f32..30.0),
                                rng.gen_range(5.0f32..30.0),
                            ),
                        )
                    })
                    .collect::<Vec<_>>(),
            );
            let preds: Vec<ScoredBox> = (0..rng.gen_range(0..8))
                .map(|_| ScoredBox {
                    frame: rng.gen_range(0..3u64),
                    bbox: bx(
                        rng.gen_range(0.0f32..80.0),
                        rng.gen_range(0.0f32..80.0),
                        rng.gen_range(5.0f32..30.0),
                        rng.gen_range(5.0f32..30.0),
                    ),
                    confidence: rng.gen_range(0.0f32..=1.0),
                })
                .collect();
            let mut prev = f64::INFINITY;
            for thr in [0.3f32, 0.5, 0.7, 0.9] {
                let ap = pr_curve(&preds, &truth, thr).ap;
                assert!(ap <= prev + 1e-12, "ap rose from {prev} to {ap} at {thr}");
                prev = ap;
            }
        }
    }
}
