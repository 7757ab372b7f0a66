use crate::colormap::ColormapName;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use crate::imaging::{rgb_to_gray, RasterImage, Rgb};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRendering {
    pub image: RasterImage,
    /// Pixels whose luma lies within the bounds (drawn black).
    pub inside: BinaryMask,
    /// Outside pixels touching an inside pixel (drawn in the edge color).
    pub edges: BinaryMask,
}

/// Luma threshold visualization. In-bound pixels turn black; the remaining
/// area shows the original luma through the configured colormap, and the
/// class boundary is traced on the outside pixels.
pub fn binary_threshold_vis(
    img: &RasterImage,
    lo: u8,
    hi: u8,
    cfg: &Config,
) -> Result<ThresholdRendering> {
    if lo > hi {
        return Err(Error::invalid(format!(
            "threshold lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    let gray = rgb_to_gray(img);
    let (w, h) = img.dims();
    let inside = BinaryMask::from_fn(w, h, |x, y| (lo..=hi).contains(&gray.get(x, y)));
    let edges = threshold_edges(&inside);
    let image = render(&gray, &inside, &edges, cfg.colormap, cfg.edge_color)?;
    Ok(ThresholdRendering {
        image,
        inside,
        edges,
    })
}

fn render(
    gray: &crate::imaging::GrayImage,
    inside: &BinaryMask,
    edges: &BinaryMask,
    colormap: ColormapName,
    edge_color: Rgb,
) -> Result<RasterImage> {
    RasterImage::from_fn(gray.width(), gray.height(), |x, y| {
        if inside.get(x, y) {
            [0, 0, 0]
        } else if edges.get(x, y) {
            edge_color
        } else {
            colormap.lookup(gray.get(x, y))
        }
    })
}

/// 4-neighbourhood class transitions, marked on the outside pixel.
pub fn threshold_edges(inside: &BinaryMask) -> BinaryMask {
    let (w, h) = inside.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        if inside.get(x, y) {
            return false;
        }
        (x > 0 && inside.get(x - 1, y))
            || (x + 1 < w && inside.get(x + 1, y))
            || (y > 0 && inside.get(x, y - 1))
            || (y + 1 < h && inside.get(x, y + 1))
    })
}
