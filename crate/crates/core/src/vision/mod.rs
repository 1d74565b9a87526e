//! Classical saliency and edge detection, plus dispatch to precomputed maps.

mod canny;
mod filter;
mod saliency;

pub use canny::{canny, grayscale, EdgeParams};
pub use saliency::{resolve_saliency, saliency_ft, srgb_to_lab, SaliencySource};
