use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, Point};

/// Even-odd fill: a pixel is set iff its center lies inside the polygon.
/// Parts outside the grid are clipped.
pub fn rasterize_polygon(points: &[Point], (width, height): (u32, u32)) -> Result<BinaryMask> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "polygon has {} vertices, need at least 3",
            points.len()
        )));
    }
    let mut mask = BinaryMask::empty(width, height);
    let mut crossings = Vec::new();
    for y in 0..height {
        let yc = f64::from(y) + 0.5;
        crossings.clear();
        for (a, b) in edges(points) {
            if (a.y > yc) != (b.y > yc) {
                crossings.push(edge_x_at(a, b, yc));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for span in crossings.chunks_exact(2) {
            let (lo, hi) = (span[0], span[1]);
            let mut x = first_center_at_or_after(lo, width);
            while x < width && f64::from(x) + 0.5 < hi {
                mask.set(x, y, true);
                x += 1;
            }
        }
    }
    Ok(mask)
}

fn edges(points: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    points
        .iter()
        .copied()
        .zip(points.iter().copied().cycle().skip(1))
}

fn edge_x_at(a: Point, b: Point, y: f64) -> f64 {
    a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
}

fn first_center_at_or_after(x: f64, width: u32) -> u32 {
    if !(x > 0.5) {
        return 0;
    }
    let mut col = ((x - 0.5).floor().min(f64::from(width))) as u32;
    while col < width && f64::from(col) + 0.5 < x {
        col += 1;
    }
    col
}

/// Crossing-number point-in-polygon test under the same edge rule the
/// rasterizer uses.
pub fn point_in_polygon(p: Point, points: &[Point]) -> bool {
    let mut inside = false;
    for (a, b) in edges(points) {
        if (a.y > p.y) != (b.y > p.y) && p.x < edge_x_at(a, b, p.y) {
            inside = !inside;
        }
    }
    inside
}

/// Union of several polygons on one grid.
pub fn rasterize_union<'a>(
    polygons: impl IntoIterator<Item = &'a [Point]>,
    dims: (u32, u32),
) -> Result<BinaryMask> {
    let mut acc = BinaryMask::empty(dims.0, dims.1);
    for poly in polygons {
        acc = acc.or(&rasterize_polygon(poly, dims)?)?;
    }
    Ok(acc)
}
