//! Image and map file IO. Grayscale maps are 8-bit PNG or PGM on disk and
//! `v / 255` in memory; semantic maps are 8-bit single-channel PNG holding
//! category ids.

use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};

use super::map::{GrayMap, SemanticMap};
use crate::error::{Error, Result};

fn open(path: &Path) -> Result<DynamicImage> {
    if !path.exists() {
        return Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "file not found")));
    }
    image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn check_dims(what: &Path, found: (usize, usize), expected: Option<(usize, usize)>) -> Result<()> {
    match expected {
        Some(exp) if exp != found => Err(Error::dims(what.display().to_string(), exp, found)),
        _ => Ok(()),
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    Ok(open(path.as_ref())?.to_rgb8())
}

pub fn load_image_sized(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<RgbImage> {
    let path = path.as_ref();
    let img = load_image(path)?;
    check_dims(path, (img.width() as usize, img.height() as usize), Some(expected))?;
    Ok(img)
}

pub fn load_graymap(path: impl AsRef<Path>) -> Result<GrayMap> {
    let luma = open(path.as_ref())?.to_luma8();
    GrayMap::from_u8(luma.width() as usize, luma.height() as usize, luma.as_raw())
}

pub fn load_graymap_sized(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<GrayMap> {
    let path = path.as_ref();
    let map = load_graymap(path)?;
    check_dims(path, map.dims(), Some(expected))?;
    Ok(map)
}

/// Writes an 8-bit grayscale file; the format follows the extension (`.pgm` or `.png`).
pub fn save_graymap(map: &GrayMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let img = GrayImage::from_raw(map.width() as u32, map.height() as u32, map.to_u8()).expect("buffer length matches dimensions");
    img.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_semantic_map(path: impl AsRef<Path>) -> Result<SemanticMap> {
    let path = path.as_ref();
    match open(path)? {
        DynamicImage::ImageLuma8(img) => SemanticMap::new(img.width() as usize, img.height() as usize, img.into_raw()),
        other => Err(Error::InvalidMap(format!(
            "{}: semantic maps must be 8-bit single-channel, found {:?}",
            path.display(),
            other.color()
        ))),
    }
}

pub fn load_semantic_map_sized(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<SemanticMap> {
    let path = path.as_ref();
    let map = load_semantic_map(path)?;
    check_dims(path, map.dims(), Some(expected))?;
    Ok(map)
}

pub fn save_semantic_map(map: &SemanticMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let img = GrayImage::from_raw(map.width() as u32, map.height() as u32, map.ids().to_vec()).expect("buffer length matches dimensions");
    img.save_with_format(path, image::ImageFormat::Png).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn black_and_white_pgm() {
        let dir = tempfile::tempdir().unwrap();
        for (value, expect) in [(0u8, 0.0), (255u8, 1.0)] {
            let path = dir.path().join(format!("m{value}.pgm"));
            GrayImage::from_pixel(5, 3, image::Luma([value])).save(&path).unwrap();
            let m = load_graymap(&path).unwrap();
            assert_eq!(m.dims(), (5, 3));
            assert!(m.data().iter().all(|&v| v == expect));
        }
    }

    #[test]
    fn random_roundtrip_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let bytes: Vec<u8> = (0..37 * 23).map(|_| rng.random()).collect();
        let map = GrayMap::from_u8(37, 23, &bytes).unwrap();
        for ext in ["png", "pgm"] {
            let path = dir.path().join(format!("r.{ext}"));
            save_graymap(&map, &path).unwrap();
            let back = load_graymap(&path).unwrap();
            assert_eq!(back.to_u8(), bytes);
        }
    }

    #[test]
    fn missing_file_and_wrong_size() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_graymap(dir.path().join("nope.png")), Err(Error::Io { .. })));
        let path = dir.path().join("m.png");
        save_graymap(&GrayMap::zeros(4, 4), &path).unwrap();
        assert!(matches!(load_graymap_sized(&path, (5, 4)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn semantic_ids_survive_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.png");
        let map = SemanticMap::from_fn(9, 4, |x, y| (x * 7 + y) as u8);
        save_semantic_map(&map, &path).unwrap();
        assert_eq!(load_semantic_map(&path).unwrap(), map);
    }
}
