use std::path::Path;

use image::{ImageBuffer, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// A square RGB image as an `n × n × 3` tensor with values in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct LoadedImage<T> {
    pub tensor: Tensor3<T>,
    /// `(width, height)` of the file.
    pub original_size: (u32, u32),
    /// The file was not square and was center-cropped.
    pub cropped: bool,
}

fn image_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads an 8-bit RGB PNG. Non-square images are center-cropped to the
/// shorter side.
pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<LoadedImage<T>> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => image_error(path, other.to_string()),
    })?;
    let color = img.color();
    let rgb = match img {
        image::DynamicImage::ImageRgb8(rgb) => rgb,
        _ => return Err(image_error(path, format!("expected 8-bit RGB, found {color:?}"))),
    };
    let (w, h) = rgb.dimensions();
    let n = w.min(h);
    let (x0, y0) = ((w - n) / 2, (h - n) / 2);
    let inv = T::lit(1.0 / 255.0);
    let n_us = n as usize;
    let tensor = Tensor3::from_fn(n_us, n_us, 3, |i, j, k| {
        let p = rgb.get_pixel(x0 + j as u32, y0 + i as u32);
        T::from_len(p[k] as usize) * inv
    })
    .map_err(|_| image_error(path, "empty image"))?;
    Ok(LoadedImage {
        tensor,
        original_size: (w, h),
        cropped: w != h,
    })
}

/// Writes an `n1 × n2 × 3` tensor as an 8-bit RGB PNG, clamping to `[0, 1]`
/// and rounding.
pub fn save_image<T: Scalar>(tensor: &Tensor3<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if tensor.n3() != 3 {
        return Err(image_error(
            path,
            format!("an RGB image needs 3 frontal slices, tensor has {}", tensor.n3()),
        ));
    }
    let to_byte = |v: T| -> u8 {
        let v = v.to_f64_lossy();
        let c = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        (c * 255.0).round() as u8
    };
    let (h, w) = (tensor.n1() as u32, tensor.n2() as u32);
    let img: RgbImage = ImageBuffer::from_fn(w, h, |x, y| {
        let (i, j) = (y as usize, x as usize);
        Rgb([0, 1, 2].map(|k| to_byte(tensor.get(i, j, k))))
    });
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::Io(io),
            other => image_error(path, other.to_string()),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_quantizes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("half.png");
        let t = Tensor3::<f64>::filled(3, 3, 3, 0.5).unwrap();
        save_image(&t, &p).unwrap();
        let back = load_image::<f64>(&p).unwrap();
        assert!(!back.cropped);
        assert!(back.tensor.as_slice().iter().all(|&v| (0.498..=0.502).contains(&v)));
    }

    #[test]
    fn pure_red_and_clamping() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("red.png");
        let img: RgbImage = ImageBuffer::from_pixel(2, 2, Rgb([255, 0, 0]));
        img.save(&p).unwrap();
        let t = load_image::<f64>(&p).unwrap().tensor;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!([t.get(i, j, 0), t.get(i, j, 1), t.get(i, j, 2)], [1.0, 0.0, 0.0]);
            }
        }
        let q = dir.path().join("clamp.png");
        let hot = Tensor3::<f64>::from_fn(1, 1, 3, |_, _, k| [1.7, -0.3, 0.2][k]).unwrap();
        save_image(&hot, &q).unwrap();
        let raw = image::open(&q).unwrap().to_rgb8();
        assert_eq!(raw.get_pixel(0, 0).0, [255, 0, 51]);
    }

    #[test]
    fn crops_and_rejects() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("wide.png");
        let img: RgbImage = ImageBuffer::from_fn(4, 2, |x, _| Rgb([x as u8 * 60, 0, 0]));
        img.save(&p).unwrap();
        let l = load_image::<f64>(&p).unwrap();
        assert!(l.cropped);
        assert_eq!(l.original_size, (4, 2));
        assert_eq!(l.tensor.n1(), 2);
        assert!((l.tensor.get(0, 0, 0) - 60.0 / 255.0).abs() < 1e-15);

        let g = dir.path().join("gray.png");
        image::GrayImage::from_pixel(2, 2, image::Luma([9])).save(&g).unwrap();
        assert!(matches!(load_image::<f64>(&g), Err(Error::Image { .. })));
        assert!(load_image::<f64>(dir.path().join("missing.png")).is_err());
    }
}
