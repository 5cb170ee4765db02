//! Lost-track recovery rules: a new detection reclaims a lost track when
//! its center falls within the recovery radius of the last known
//! location, or inside the quarter-plane the track's motion direction
//! points into. Competing lost tracks are ranked by perpendicular
//! distance from the detection to the motion ray.

use crate::geom::Point2f;

/// A lost track's recovery anchor: last known center plus its unit
/// motion direction, when one could be estimated.
#[derive(Debug, Clone, Copy)]
pub struct LostCandidate {
    pub last_center: Point2f,
    pub gradient: Option<Point2f>,
}

/// Mean velocity direction over the last `window` history entries,
/// returned as a unit vector. `None` with fewer than two entries or when
/// the total displacement is under one pixel (stationary).
pub fn motion_direction(history: &[(u64, Point2f)], window: usize) -> Option<Point2f> {
    if history.len() < 2 || window < 2 {
        return None;
    }
    let k = window.min(history.len());
    let first = history[history.len() - k].1;
    let last = history[history.len() - 1].1;
    let dx = last.x - first.x;
    let dy = last.y - first.y;
    let norm = (dx * dx + dy * dy).sqrt();
    if norm < 1.0 {
        return None;
    }
    Some(Point2f::new(dx / norm, dy / norm))
}

/// Does `delta` (detection center minus anchor) lie in the quarter-plane
/// the gradient points into? Zero components match either sign, so
/// axis-aligned motion is recoverable on both sides of its axis.
fn quadrant_contains(gradient: Point2f, delta: Point2f) -> bool {
    let axis_ok = |g: f32, d: f32| g == 0.0 || d == 0.0 || (g > 0.0) == (d > 0.0);
    axis_ok(gradient.x, delta.x) && axis_ok(gradient.y, delta.y)
}

/// Distance from `point` to the ray from `anchor` along unit `dir`.
/// Points behind the anchor measure to the anchor itself.
fn ray_distance(anchor: Point2f, dir: Point2f, point: Point2f) -> f32 {
    let dx = point.x - anchor.x;
    let dy = point.y - anchor.y;
    let along = dx * dir.x + dy * dir.y;
    if along <= 0.0 {
        (dx * dx + dy * dy).sqrt()
    } else {
        let px = dx - along * dir.x;
        let py = dy - along * dir.y;
        (px * px + py * py).sqrt()
    }
}

/// Pick the lost track that should claim a detection at `det_center`, or
/// `None` when no candidate qualifies. Qualification: within `radius` of
/// the anchor, or inside the gradient quadrant. Among qualifiers the
/// shortest perpendicular distance to the motion ray wins; tracks with
/// no gradient rank by plain distance to the anchor. Ties take the
/// earlier candidate (lower id when callers order by id).
pub fn select_lost_candidate(
    candidates: &[LostCandidate],
    det_center: Point2f,
    radius: f32,
) -> Option<usize> {
    let mut best: Option<(usize, f32)> = None;
    for (i, cand) in candidates.iter().enumerate() {
        let dist = det_center.distance(&cand.last_center);
        let in_radius = dist <= radius;
        let in_quadrant = cand.gradient.map_or(false, |g| {
            quadrant_contains(
                g,
                Point2f::new(det_center.x - cand.last_center.x, det_center.y - cand.last_center.y),
            )
        });
        if !(in_radius || in_quadrant) {
            continue;
        }
        let score = match cand.gradient {
            Some(g) => ray_distance(cand.last_center, g, det_center),
            None => dist,
        };
        match best {
            Some((_, s)) if score >= s => {}
            _ => best = Some((i, score)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f32, y: f32) -> Point2f {
        Point2f::new(x, y)
    }

    #[test]
    fn recovery_inside_radius() {
        // Distance sqrt(50^2 + 50^2) ~ 70.7 <= 200.
        let cands = [LostCandidate { last_center: pt(100.0, 100.0), gradient: None }];
        assert_eq!(select_lost_candidate(&cands, pt(150.0, 150.0), 200.0), Some(0));
    }

    #[test]
    fn recovery_via_gradient_quadrant_outside_radius() {
        let g = pt(std::f32::consts::FRAC_1_SQRT_2, std::f32::consts::FRAC_1_SQRT_2);
        let cands = [LostCandidate { last_center: pt(100.0, 100.0), gradient: Some(g) }];
        // (900, 600) is far outside any radius but has positive deltas.
        assert_eq!(select_lost_candidate(&cands, pt(900.0, 600.0), 200.0), Some(0));
        // Opposite quadrant: no recovery.
        assert_eq!(select_lost_candidate(&cands, pt(-900.0, -600.0), 200.0), None);
    }

    #[test]
    fn perpendicular_distance_breaks_competition() {
        // Both anchors at the origin offset, detection at delta (10, 1).
        // The (+1, 0) track sees perpendicular distance 1; the (0, +1)
        // track sees 10.
        let cands = [
            LostCandidate { last_center: pt(50.0, 50.0), gradient: Some(pt(1.0, 0.0)) },
            LostCandidate { last_center: pt(50.0, 50.0), gradient: Some(pt(0.0, 1.0)) },
        ];
        assert_eq!(select_lost_candidate(&cands, pt(60.0, 51.0), 200.0), Some(0));
    }

    #[test]
    fn zero_gradient_component_matches_both_sides() {
        let cands = [LostCandidate { last_center: pt(0.0, 0.0), gradient: Some(pt(1.0, 0.0)) }];
        // Above and below the axis both qualify while moving right.
        assert_eq!(select_lost_candidate(&cands, pt(500.0, 300.0), 10.0), Some(0));
        assert_eq!(select_lost_candidate(&cands, pt(500.0, -300.0), 10.0), Some(0));
        assert_eq!(select_lost_candidate(&cands, pt(-500.0, 300.0), 10.0), None);
    }

    #[test]
    fn motion_direction_uniform_rightward() {
        let h = vec![(0u64, pt(0.0, 0.0)), (3, pt(1.0, 0.0)), (6, pt(2.0, 0.0))];
        let g = motion_direction(&h, 5).unwrap();
        assert!((g.x - 1.0).abs() < 1e-6 && g.y.abs() < 1e-6);
    }

    #[test]
    fn motion_direction_insufficient_history() {
        assert!(motion_direction(&[(0, pt(5.0, 5.0))], 5).is_none());
    }

    #[test]
    fn motion_direction_alternating_path() {
        // Centers (0,0),(1,1),(0,0),(1,1),(2,2): the mean of the 4 step
        // vectors points along (+1,+1).
        let h: Vec<(u64, Point2f)> = [(0.0, 0.0), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (i as u64 * 3, pt(x, y)))
            .collect();
        let g = motion_direction(&h, 5).unwrap();
        let inv_sqrt2 = std::f32::consts::FRAC_1_SQRT_2;
        assert!((g.x - inv_sqrt2).abs() < 1e-6);
        assert!((g.y - inv_sqrt2).abs() < 1e-6);
    }

    #[test]
    fn motion_direction_stationary_is_none() {
        let h = vec![(0u64, pt(10.0, 10.0)), (3, pt(10.4, 10.0)), (6, pt(10.0, 10.3))];
        assert!(motion_direction(&h, 5).is_none());
    }
}
