//! Pyramidal Lucas-Kanade sparse optical flow: propagates feature points
//! from one frame to the next, coarse-to-fine.
//!
//! Per-point computations are independent and run in parallel when the
//! `parallel` feature is on; each point's accumulation is sequential, so
//! results are identical in both modes.

use thiserror::Error;

use crate::exec;
use crate::geom::Point2f;
use crate::imgproc::{GrayImage, Pyramid};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("pyramids disagree: prev {prev_levels} levels {prev_w}x{prev_h}, next {next_levels} levels {next_w}x{next_h}")]
    PyramidMismatch {
        prev_levels: usize,
        prev_w: usize,
        prev_h: usize,
        next_levels: usize,
        next_w: usize,
        next_h: usize,
    },
    #[error("window must be odd and >= 5, got {0}")]
    BadWindow(usize),
}

/// Tracking outcome for one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Tracked,
    Lost,
}

/// Result of one tracking pass. All vectors have the input length; a
/// point flagged [`PointStatus::Lost`] carries no validity claim for its
/// coordinates or residual.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub points_next: Vec<Point2f>,
    pub status: Vec<PointStatus>,
    /// Mean absolute window difference in gray levels (0..255 scale).
    pub residual: Vec<f32>,
}

impl FlowResult {
    pub fn tracked_count(&self) -> usize {
        self.status.iter().filter(|s| **s == PointStatus::Tracked).count()
    }
}

/// Solver parameters. The defaults are a standard sparse-LK operating
/// point at 512x288.
#[derive(Debug, Clone, Copy)]
pub struct FlowParams {
    /// Square window side in pixels; odd, >= 5.
    pub window: usize,
    /// Gauss-Newton iteration cap per pyramid level.
    pub max_iters: usize,
    /// Convergence threshold on the per-iteration update norm, in pixels.
    pub eps: f32,
    /// Floor on the window-normalized minimum eigenvalue of the structure
    /// tensor (unit intensity scale); below it the point is lost.
    pub min_eig_floor: f32,
    /// Ceiling on the final mean absolute window difference, in gray
    /// levels; above it the point is lost.
    pub residual_ceiling: f32,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            window: 21,
            max_iters: 30,
            eps: 0.01,
            min_eig_floor: 1e-4,
            residual_ceiling: 20.0,
        }
    }
}

/// Track `points` from `prev` to `next`. Both pyramids must share level
/// counts and level-0 dimensions. An empty point list is a valid no-op.
pub fn lk_track(
    prev: &Pyramid,
    next: &Pyramid,
    points: &[Point2f],
    params: &FlowParams,
) -> Result<FlowResult, FlowError> {
    if prev.num_levels() != next.num_levels()
        || prev.base().width() != next.base().width()
        || prev.base().height() != next.base().height()
    {
        return Err(FlowError::PyramidMismatch {
            prev_levels: prev.num_levels(),
            prev_w: prev.base().width(),
            prev_h: prev.base().height(),
            next_levels: next.num_levels(),
            next_w: next.base().width(),
            next_h: next.base().height(),
        });
    }
    if params.window < 5 || params.window % 2 == 0 {
        return Err(FlowError::BadWindow(params.window));
    }

    let tracked = exec::map_slice(points, |p| track_point(prev, next, *p, params));
    let mut result = FlowResult {
        points_next: Vec::with_capacity(points.len()),
        status: Vec::with_capacity(points.len()),
        residual: Vec::with_capacity(points.len()),
    };
    for (q, st, res) in tracked {
        result.points_next.push(q);
        result.status.push(st);
        result.residual.push(res);
    }
    Ok(result)
}

fn window_inside(img: &GrayImage, p: Point2f, half: f32) -> bool {
    p.x - half >= 0.0
        && p.y - half >= 0.0
        && p.x + half <= (img.width() - 1) as f32
        && p.y + half <= (img.height() - 1) as f32
}

fn track_point(
    prev: &Pyramid,
    next: &Pyramid,
    p: Point2f,
    params: &FlowParams,
) -> (Point2f, PointStatus, f32) {
    let half = (params.window / 2) as f32;
    let n = (params.window * params.window) as f64;

    // The template window must fit at full resolution; coarser levels use
    // replicated-edge sampling instead.
    if !window_inside(prev.base(), p, half) {
        return (p, PointStatus::Lost, f32::INFINITY);
    }

    let half_i = (params.window / 2) as isize;
    let levels = prev.num_levels();
    let mut flow_x = 0f32;
    let mut flow_y = 0f32;

    let mut template = vec![0f32; params.window * params.window];
    let mut grad_x = vec![0f32; params.window * params.window];
    let mut grad_y = vec![0f32; params.window * params.window];

    for level in (0..levels).rev() {
        let prev_img = prev.level(level);
        let next_img = next.level(level);
        let scale = 1.0 / (1u32 << level) as f32;
        let cx = p.x * scale;
        let cy = p.y * scale;

        // Template intensities and spatial gradients (central differences
        // on the previous frame), unit intensity scale.
        let mut gxx = 0f64;
        let mut gxy = 0f64;
        let mut gyy = 0f64;
        let mut idx = 0;
        for dy in -half_i..=half_i {
            for dx in -half_i..=half_i {
                let sx = cx + dx as f32;
                let sy = cy + dy as f32;
                template[idx] = prev_img.sample(sx, sy) / 255.0;
                let gx = (prev_img.sample(sx + 1.0, sy) - prev_img.sample(sx - 1.0, sy)) / 510.0;
                let gy = (prev_img.sample(sx, sy + 1.0) - prev_img.sample(sx, sy - 1.0)) / 510.0;
                grad_x[idx] = gx;
                grad_y[idx] = gy;
                gxx += (gx * gx) as f64;
                gxy += (gx * gy) as f64;
                gyy += (gy * gy) as f64;
                idx += 1;
            }
        }

        let trace = gxx + gyy;
        let diff = gxx - gyy;
        let min_eig = 0.5 * (trace - (diff * diff + 4.0 * gxy * gxy).sqrt());
        if (min_eig / n) < params.min_eig_floor as f64 {
            return (p, PointStatus::Lost, f32::INFINITY);
        }
        let det = gxx * gyy - gxy * gxy;
        if det.abs() < 1e-12 {
            return (p, PointStatus::Lost, f32::INFINITY);
        }
        let inv_det = 1.0 / det;

        // Gauss-Newton on the displacement, Hessian fixed per level.
        for _ in 0..params.max_iters {
            let mut b0 = 0f64;
            let mut b1 = 0f64;
            let mut idx = 0;
            for dy in -half_i..=half_i {
                for dx in -half_i..=half_i {
                    let wx = cx + flow_x + dx as f32;
                    let wy = cy + flow_y + dy as f32;
                    let e = (template[idx] - next_img.sample(wx, wy) / 255.0) as f64;
                    b0 += grad_x[idx] as f64 * e;
                    b1 += grad_y[idx] as f64 * e;
                    idx += 1;
                }
            }
            let dx_step = (inv_det * (gyy * b0 - gxy * b1)) as f32;
            let dy_step = (inv_det * (gxx * b1 - gxy * b0)) as f32;
            flow_x += dx_step;
            flow_y += dy_step;
            if (dx_step * dx_step + dy_step * dy_step).sqrt() < params.eps {
                break;
            }
        }

        if level > 0 {
            flow_x *= 2.0;
            flow_y *= 2.0;
        }
    }

    let q = Point2f::new(p.x + flow_x, p.y + flow_y);
    if !window_inside(next.base(), q, half) {
        return (q, PointStatus::Lost, f32::INFINITY);
    }

    // Final residual at full resolution, back on the 0..255 scale.
    let mut sum = 0f64;
    let mut idx = 0;
    for dy in -half_i..=half_i {
        for dx in -half_i..=half_i {
            let e = template[idx] - next.base().sample(q.x + dx as f32, q.y + dy as f32) / 255.0;
            sum += e.abs() as f64;
            idx += 1;
        }
    }
    let residual = (sum / n * 255.0) as f32;
    if residual > params.residual_ceiling {
        return (q, PointStatus::Lost, residual);
    }
    (q, PointStatus::Tracked, residual)
}

/// Component-wise median displacement over tracked points, or `None` when
/// fewer than `min_survivors` points survive. Even-sized sets take the
/// mean of the two middle values.
pub fn median_displacement(
    points_prev: &[Point2f],
    result: &FlowResult,
    min_survivors: usize,
) -> Option<(f32, f32)> {
    assert_eq!(points_prev.len(), result.points_next.len());
    let mut dxs = Vec::new();
    let mut dys = Vec::new();
    for i in 0..points_prev.len() {
        if result.status[i] == PointStatus::Tracked {
            dxs.push(result.points_next[i].x - points_prev[i].x);
            dys.push(result.points_next[i].y - points_prev[i].y);
        }
    }
    if dxs.len() < min_survivors.max(1) {
        return None;
    }
    Some((median(&mut dxs), median(&mut dys)))
}

fn median(values: &mut [f32]) -> f32 {
    values.sort_by(f32::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
