//! Dense raster containers, label/leader-line rasterization, and map IO.

mod io;
mod map;
mod shapes;

pub use io::{
    load_graymap, load_graymap_sized, load_image, load_image_sized, load_semantic_map, load_semantic_map_sized, save_graymap, save_image,
    save_semantic_map,
};
pub use map::{GrayMap, SemanticMap, UNKNOWN_CATEGORY};
pub use shapes::{
    for_each_segment_pixel, for_each_trace_pixel, line_trace, rasterize_rect, rasterize_segment, segment_pixels, LabelRect, LabelSize,
    PixelBox, Point, Segment,
};

pub use image::RgbImage;
