//! Shared geometric primitives: sub-pixel points and axis-aligned boxes.

use std::fmt;

/// A sub-pixel image location. `x` is the column, `y` the row; pixel
/// centers sit at integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2f {
    pub x: f32,
    pub y: f32,
}

impl Point2f {
    pub fn new(x: f32, y: f32) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2f) -> f32 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

impl fmt::Display for Point2f {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned box in pixel coordinates: `(x, y)` is the top-left corner,
/// `w` and `h` are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f32,
    pub y: f32,
    pub w: f32,
    pub h: f32,
}

impl BBox {
    pub fn new(x: f32, y: f32, w: f32, h: f32) -> Self {
        debug_assert!(w > 0.0 && h > 0.0, "box dimensions must be positive");
        debug_assert!(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite());
        Self { x, y, w, h }
    }

    pub fn is_valid(&self) -> bool {
        self.w > 0.0
            && self.h > 0.0
            && self.x.is_finite()
            && self.y.is_finite()
            && self.w.is_finite()
            && self.h.is_finite()
    }

    pub fn right(&self) -> f32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f32 {
        self.y + self.h
    }

    pub fn area(&self) -> f32 {
        self.w * self.h
    }

    pub fn center(&self) -> Point2f {
        Point2f::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Box translated by `(dx, dy)`, size unchanged.
    pub fn translated(&self, dx: f32, dy: f32) -> BBox {
        BBox::new(self.x + dx, self.y + dy, self.w, self.h)
    }

    pub fn contains(&self, p: &Point2f) -> bool {
        p.x >= self.x && p.x < self.right() && p.y >= self.y && p.y < self.bottom()
    }

    /// Intersection box, or `None` when disjoint (zero-area overlap counts
    /// as disjoint).
    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        if x1 > x0 && y1 > y0 {
            Some(BBox::new(x0, y0, x1 - x0, y1 - y0))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_of_unit_box() {
        let b = BBox::new(0.0, 0.0, 10.0, 20.0);
        assert_eq!(b.center(), Point2f::new(5.0, 10.0));
    }

    #[test]
    fn intersection_disjoint_is_none() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BBox::new(20.0, 20.0, 5.0, 5.0);
        assert!(a.intersection(&b).is_none());
        // Touching edges have zero overlap area.
        let c = BBox::new(10.0, 0.0, 5.0, 5.0);
        assert!(a.intersection(&c).is_none());
    }

    #[test]
    fn intersection_overlap() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BBox::new(5.0, 0.0, 10.0, 10.0);
        let i = a.intersection(&b).unwrap();
        assert_eq!((i.x, i.y, i.w, i.h), (5.0, 0.0, 5.0, 10.0));
    }
}
