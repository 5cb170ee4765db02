//! Synthetic scene generation: textured agents on a textured background
//! with optional static occluders, plus exact ground truth. Stands in
//! for proprietary store footage at desk scale.

use std::sync::Arc;

use thiserror::Error;

use super::texture::ValueNoise;
use crate::detect::{GroundTruth, TruthBox};
use crate::exec;
use crate::geom::{BBox, Point2f};
use crate::imgproc::GrayImage;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("scene must have at least one frame and a 32x32 raster")]
    TooSmall,
    #[error("agent {0}: needs at least one waypoint")]
    NoWaypoints(String),
    #[error("agent {0}: waypoint frames must be strictly increasing and inside the scene")]
    BadWaypoints(String),
    #[error("agent {name}: box leaves frame bounds at frame {frame}")]
    OutOfBounds { name: String, frame: u64 },
    #[error("duplicate agent name {0}")]
    DuplicateAgent(String),
}

/// An agent: a box of fixed size whose center follows a piecewise-linear
/// path through (frame, x, y) waypoints, holding position outside them.
#[derive(Debug, Clone)]
pub struct AgentSpec {
    pub name: String,
    pub waypoints: Vec<(u64, f32, f32)>,
    pub width: f32,
    pub height: f32,
    pub texture_seed: u64,
}

impl AgentSpec {
    /// Center at `frame`, linearly interpolated between waypoints.
    pub fn center_at(&self, frame: u64) -> Point2f {
        let wps = &self.waypoints;
        if frame <= wps[0].0 {
            return Point2f::new(wps[0].1, wps[0].2);
        }
        for pair in wps.windows(2) {
            let (f0, x0, y0) = pair[0];
            let (f1, x1, y1) = pair[1];
            if frame <= f1 {
                let t = (frame - f0) as f32 / (f1 - f0) as f32;
                return Point2f::new(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            }
        }
        let last = wps[wps.len() - 1];
        Point2f::new(last.1, last.2)
    }

    pub fn bbox_at(&self, frame: u64) -> BBox {
        let c = self.center_at(frame);
        BBox::new(c.x - self.width / 2.0, c.y - self.height / 2.0, self.width, self.height)
    }
}

/// Full scene description; `generate_scene` validates and renders it.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub fps: f32,
    pub frame_count: u64,
    pub background_seed: u64,
    pub agents: Vec<AgentSpec>,
    pub occluders: Vec<BBox>,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            width: 512,
            height: 288,
            fps: 25.0,
            frame_count: 0,
            background_seed: 1,
            agents: Vec::new(),
            occluders: Vec::new(),
        }
    }
}

/// Rendered frames plus exact ground truth.
pub struct Scene {
    pub spec: SceneSpec,
    pub frames: Vec<GrayImage>,
    pub truth: Arc<GroundTruth>,
}

/// The bundled three-agent demo: two walkers on separated lanes and one
/// loiterer that dominates the heat map. 240 frames at 512x288, 25 fps.
pub fn demo_scene_spec() -> SceneSpec {
    SceneSpec {
        width: 512,
        height: 288,
        fps: 25.0,
        frame_count: 240,
        background_seed: 1,
        agents: vec![
            AgentSpec {
                name: "alice".into(),
                waypoints: vec![(0, 80.0, 140.0), (239, 430.0, 140.0)],
                width: 40.0,
                height: 90.0,
                texture_seed: 11,
            },
            AgentSpec {
                name: "bob".into(),
                waypoints: vec![(0, 120.0, 48.0), (239, 300.0, 48.0)],
                width: 40.0,
                height: 90.0,
                texture_seed: 12,
            },
            AgentSpec {
                name: "carol".into(),
                waypoints: vec![
                    (0, 320.0, 225.0),
                    (60, 340.0, 225.0),
                    (120, 320.0, 225.0),
                    (180, 340.0, 225.0),
                    (239, 330.0, 225.0),
                ],
                width: 44.0,
                height: 80.0,
                texture_seed: 13,
            },
        ],
        occluders: Vec::new(),
    }
}

const OCCLUDER_VALUE: u8 = 40;

/// Deterministically render a scene. Agent boxes must stay inside frame
/// bounds for the whole run (checked at every frame).
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene, SceneError> {
    validate(spec)?;
    let bg = ValueNoise::new(spec.background_seed, spec.width, spec.height, 4.0);
    let agent_noise: Vec<ValueNoise> = spec
        .agents
        .iter()
        .map(|a| {
            ValueNoise::new(a.texture_seed, a.width.ceil() as usize + 2, a.height.ceil() as usize + 2, 3.0)
        })
        .collect();

    let mut truth = GroundTruth {
        frame_count: spec.frame_count,
        agent_names: spec.agents.iter().map(|a| a.name.clone()).collect(),
        by_frame: Default::default(),
    };
    let mut frames = Vec::with_capacity(spec.frame_count as usize);

    for frame in 0..spec.frame_count {
        let boxes: Vec<BBox> = spec.agents.iter().map(|a| a.bbox_at(frame)).collect();
        frames.push(render_frame(spec, &bg, &agent_noise, &boxes));
        let entries = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| TruthBox {
                agent: i,
                bbox: *b,
                visible_fraction: visible_fraction(b, &spec.occluders),
            })
            .collect();
        truth.by_frame.insert(frame, entries);
    }
    Ok(Scene { spec: spec.clone(), frames, truth: Arc::new(truth) })
}

fn validate(spec: &SceneSpec) -> Result<(), SceneError> {
    if spec.frame_count == 0 || spec.width < 32 || spec.height < 32 {
        return Err(SceneError::TooSmall);
    }
    let mut names = std::collections::HashSet::new();
    for a in &spec.agents {
        if !names.insert(a.name.as_str()) {
            return Err(SceneError::DuplicateAgent(a.name.clone()));
        }
        if a.waypoints.is_empty() {
            return Err(SceneError::NoWaypoints(a.name.clone()));
        }
        let increasing = a.waypoints.windows(2).all(|p| p[0].0 < p[1].0);
        let in_range = a.waypoints.iter().all(|w| w.0 < spec.frame_count);
        if !increasing || !in_range {
            return Err(SceneError::BadWaypoints(a.name.clone()));
        }
        // The path is piecewise linear, so box extremes occur at
        // waypoints (and at the held start/end positions).
        for &(frame, _, _) in &a.waypoints {
            let b = a.bbox_at(frame);
            if b.x < 0.0
                || b.y < 0.0
                || b.right() > spec.width as f32
                || b.bottom() > spec.height as f32
            {
                return Err(SceneError::OutOfBounds { name: a.name.clone(), frame });
            }
        }
    }
    Ok(())
}

fn render_frame(
    spec: &SceneSpec,
    bg: &ValueNoise,
    agent_noise: &[ValueNoise],
    boxes: &[BBox],
) -> GrayImage {
    let width = spec.width;
    let mut data = vec![0u8; width * spec.height];
    exec::for_each_chunk_mut(&mut data, width, |y, row| {
        let yf = y as f32;
        for (x, out) in row.iter_mut().enumerate() {
            let xf = x as f32;
            let p = Point2f::new(xf, yf);
            let mut v = bg.eval(xf, yf);
            // Topmost agent under this pixel wins (later agents draw over
            // earlier ones).
            for (i, b) in boxes.iter().enumerate() {
                if b.contains(&p) {
                    v = agent_noise[i].eval(xf - b.x, yf - b.y);
                }
            }
            for occ in &spec.occluders {
                if occ.contains(&p) {
                    v = OCCLUDER_VALUE as f32;
                }
            }
            *out = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
        }
    });
    GrayImage::new(width, spec.height, data).expect("dimensions positive")
}

/// Fraction of `bbox` left uncovered by the occluder union, computed
/// exactly by coordinate compression over the clipped rectangles.
fn visible_fraction(bbox: &BBox, occluders: &[BBox]) -> f32 {
    let clipped: Vec<BBox> = occluders.iter().filter_map(|o| o.intersection(bbox)).collect();
    if clipped.is_empty() {
        return 1.0;
    }
    let mut xs: Vec<f32> = clipped.iter().flat_map(|r| [r.x, r.right()]).collect();
    let mut ys: Vec<f32> = clipped.iter().flat_map(|r| [r.y, r.bottom()]).collect();
    xs.sort_by(f32::total_cmp);
    xs.dedup();
    ys.sort_by(f32::total_cmp);
    ys.dedup();
    let mut covered = 0f64;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            let cx = 0.5 * (wx[0] + wx[1]);
            let cy = 0.5 * (wy[0] + wy[1]);
            if clipped.iter().any(|r| r.contains(&Point2f::new(cx, cy))) {
                covered += (wx[1] - wx[0]) as f64 * (wy[1] - wy[0]) as f64;
            }
        }
    }
    (1.0 - covered / bbox.area() as f64).clamp(0.0, 1.0) as f32
}
