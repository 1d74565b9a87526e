use image::{Rgb, RgbImage};

use crate::raster::for_each_segment_pixel;
use crate::scene::{Layout, Scene};

const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
const TEXT: Rgb<u8> = Rgb([60, 60, 60]);

/// Draws leader lines, then labels as white boxes with a 1 px black border
/// and a gray bar standing in for the text.
pub fn render_overlay(scene: &Scene, layout: &Layout, image: &RgbImage) -> RgbImage {
    let mut out = image.clone();
    let (w, h) = (out.width() as usize, out.height() as usize);
    for k in 0..layout.len() {
        let body = layout.rect(scene, k).pixel_box();
        for_each_segment_pixel(&layout.leader(scene, k), Some(&body), w, h, |x, y| {
            out.put_pixel(x as u32, y as u32, BLACK);
        });
    }
    for k in 0..layout.len() {
        let b = layout.rect(scene, k).pixel_box();
        let text_len = scene.label_text(k).chars().count() as i64;
        let text_h = ((b.y1 - b.y0) / 3).max(1);
        let text_w = (text_len * 6).min(b.x1 - b.x0 - 8).max(0);
        let tx0 = b.x0 + (b.x1 - b.x0 - text_w) / 2;
        let ty0 = b.y0 + (b.y1 - b.y0 - text_h) / 2;
        let c = b.clip(w, h);
        for y in c.y0..c.y1 {
            for x in c.x0..c.x1 {
                let border = x == b.x0 || x == b.x1 - 1 || y == b.y0 || y == b.y1 - 1;
                let text = x >= tx0 && x < tx0 + text_w && y >= ty0 && y < ty0 + text_h;
                let px = if border {
                    BLACK
                } else if text {
                    TEXT
                } else {
                    WHITE
                };
                out.put_pixel(x as u32, y as u32, px);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{segment_pixels, LabelSize, Point};

    #[test]
    fn empty_layout_copies_image() {
        let img = RgbImage::from_pixel(30, 20, Rgb([10, 200, 30]));
        let s = Scene::new("r", 30, 20, vec![Point::new(5.0, 5.0)], LabelSize::new(8, 6)).unwrap();
        assert_eq!(render_overlay(&s, &Layout::default(), &img), img);
    }

    #[test]
    fn diff_is_confined_to_label_and_line() {
        let img = RgbImage::from_pixel(80, 60, Rgb([10, 200, 30]));
        let s = Scene::new("r", 80, 60, vec![Point::new(10.0, 50.0)], LabelSize::new(20, 9)).unwrap();
        let l = Layout::new(vec![Point::new(50.0, 15.0)]);
        let out = render_overlay(&s, &l, &img);
        let body = l.rect(&s, 0).pixel_box();
        let line = segment_pixels(&l.leader(&s, 0), Some(&body), 80, 60);
        let mut white = 0;
        for (x, y, px) in out.enumerate_pixels() {
            let inside = body.contains(x as i64, y as i64);
            let on_line = line.contains(&(x as usize, y as usize));
            if !inside && !on_line {
                assert_eq!(px, img.get_pixel(x, y));
            }
            if on_line {
                assert_eq!(*px, BLACK);
            }
            if *px == WHITE {
                assert!(inside);
                white += 1;
            }
        }
        assert!(white > 0);
        assert_eq!(*out.get_pixel(body.x0 as u32, body.y0 as u32), BLACK);
    }
}
