use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CAPACITY_TOLERANCE;

/// A job seen as a rectangle: `width` along time, `height` along capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectPlacement {
    pub time_offset: f64,
    pub capacity_offset: f64,
    /// Index into `StripPlacement::shelves`.
    pub shelf: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shelf {
    pub offset: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripPlacement {
    /// `placements[i]` positions `rects[i]`.
    pub placements: Vec<RectPlacement>,
    pub width: f64,
    pub shelves: Vec<Shelf>,
}

/// Next-fit decreasing-width shelf packing into a strip of unit height.
///
/// Rectangles are taken by width, longest first (stable). Each shelf is as
/// wide as its first rectangle; rectangles stack upwards until the next one
/// would overflow the unit height, which opens a new shelf.
///
/// The strip is at most `2 * area + max width` wide: every shelf after the
/// first is no wider than the rectangles on the shelf before it, and that
/// shelf plus the next one's first rectangle fill more than the full height.
pub fn shelf_pack(rects: &[Rect]) -> StripPlacement {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| rects[b].width.total_cmp(&rects[a].width));

    let mut placements = vec![RectPlacement { time_offset: 0.0, capacity_offset: 0.0, shelf: 0 }; rects.len()];
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut used = 0.0;
    for i in order {
        let r = rects[i];
        match shelves.last() {
            Some(_) if used + r.height <= 1.0 + CAPACITY_TOLERANCE => {}
            last => {
                let offset = last.map_or(0.0, |s| s.offset + s.width);
                shelves.push(Shelf { offset, width: r.width });
                used = 0.0;
            }
        }
        let shelf = shelves.last().expect("a shelf is open");
        placements[i] = RectPlacement { time_offset: shelf.offset, capacity_offset: used, shelf: shelves.len() - 1 };
        used += r.height;
    }
    let width = shelves.iter().map(|s| s.width).sum();
    StripPlacement { placements, width, shelves }
}

/// Packs one level's jobs. Every width must be at most `(1 + eps) *
/// level_budget` so the strip fits in `3 (1 + eps) level_budget` whenever
/// the total area is within `(1 + eps) level_budget`.
pub fn strip_pack(rects: &[Rect], eps: f64, level_budget: f64) -> Result<StripPlacement> {
    let limit = (1.0 + eps) * level_budget;
    if let Some(r) = rects.iter().find(|r| r.width > limit + CAPACITY_TOLERANCE) {
        return Err(Error::PackPrecondition { duration: r.width, limit });
    }
    Ok(shelf_pack(rects))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(width: f64, height: f64) -> Rect {
        Rect { width, height }
    }

    #[test]
    fn three_jobs_three_shelves() {
        let rs = [rect(2.0, 0.6), rect(2.0, 0.6), rect(1.0, 0.5)];
        let out = strip_pack(&rs, 0.1, 4.0).unwrap();
        let offsets: Vec<f64> = out.placements.iter().map(|p| p.time_offset).collect();
        assert_eq!(offsets, vec![0.0, 2.0, 4.0]);
        assert_eq!(out.width, 5.0);
        assert!(out.width <= 2.0 * 2.9 + 2.0);
    }

    #[test]
    fn single_job_single_shelf() {
        let out = shelf_pack(&[rect(3.0, 0.2)]);
        assert_eq!(out.width, 3.0);
        assert_eq!(out.shelves.len(), 1);
    }

    #[test]
    fn exact_capacity_fit() {
        let k = 7;
        let rs: Vec<Rect> = (0..k).map(|_| rect(2.0, 1.0 / k as f64)).collect();
        let out = shelf_pack(&rs);
        assert_eq!(out.shelves.len(), 1);
        assert_eq!(out.width, 2.0);
    }

    #[test]
    fn too_wide_is_rejected() {
        assert!(matches!(strip_pack(&[rect(5.0, 0.1)], 0.1, 4.0), Err(Error::PackPrecondition { .. })));
    }

    #[test]
    fn empty_strip() {
        let out = shelf_pack(&[]);
        assert_eq!(out.width, 0.0);
        assert!(out.shelves.is_empty());
    }
}
