//! Zero-loci pictures of `(x, y) ↦ W_{g_i}(y) − W_{g_i}(x)` for up to three
//! translates `g_i = g(· − s_i)`, plus an in-memory PGM/PPM raster.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::embed::Metric;
use crate::error::{Error, Result};
use crate::funcore::{PeriodicFunction, WeierstrassSpec};

/// Channel intensity for the light and dark shades.
pub const LIGHT: u8 = 110;
pub const DARK: u8 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PixelFormat {
    Gray,
    Rgb,
}

impl PixelFormat {
    pub fn channels(self) -> usize {
        match self {
            PixelFormat::Gray => 1,
            PixelFormat::Rgb => 3,
        }
    }

    fn magic(self) -> &'static str {
        match self {
            PixelFormat::Gray => "P5",
            PixelFormat::Rgb => "P6",
        }
    }
}

/// 8-bit raster, rows stored top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    format: PixelFormat,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, format: PixelFormat) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("resolution", "image dimensions must be positive"));
        }
        let len = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(format.channels()))
            .ok_or_else(|| Error::Overflow("image size".into()))?;
        Ok(RasterImage { width, height, format, pixels: vec![0; len] })
    }

    pub fn from_pixels(width: usize, height: usize, format: PixelFormat, pixels: Vec<u8>) -> Result<Self> {
        let mut img = Self::new(width, height, format)?;
        if pixels.len() != img.pixels.len() {
            return Err(Error::invalid("pixels", "length does not match width × height × channels"));
        }
        img.pixels = pixels;
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn format(&self) -> PixelFormat {
        self.format
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, col: usize, row: usize) -> &[u8] {
        let c = self.format.channels();
        let at = (row * self.width + col) * c;
        &self.pixels[at..at + c]
    }

    pub fn set(&mut self, col: usize, row: usize, channel: usize, value: u8) {
        let c = self.format.channels();
        self.pixels[(row * self.width + col) * c + channel] = value;
    }

    fn header(&self) -> String {
        alloc::format!("{}\n{} {}\n255\n", self.format.magic(), self.width, self.height)
    }

    /// Binary PGM (`P5`) or PPM (`P6`) encoding.
    pub fn to_pnm(&self) -> Vec<u8> {
        let mut out = self.header().into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Parses the encoding produced by [`RasterImage::to_pnm`]. Comments and
    /// maxval other than 255 are not supported.
    pub fn from_pnm(bytes: &[u8]) -> Result<Self> {
        let bad = |why: &str| Error::invalid("pnm", why);
        let mut fields: Vec<&[u8]> = Vec::with_capacity(4);
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(&bytes[start..pos]);
        }
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(bad("missing separator after header"));
        }
        pos += 1;
        let format = match fields[0] {
            b"P5" => PixelFormat::Gray,
            b"P6" => PixelFormat::Rgb,
            _ => return Err(bad("unknown magic")),
        };
        let num = |f: &[u8]| -> Result<usize> {
            core::str::from_utf8(f).ok().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed number"))
        };
        let (width, height) = (num(fields[1])?, num(fields[2])?);
        if num(fields[3])? != 255 {
            return Err(bad("maxval must be 255"));
        }
        Self::from_pixels(width, height, format, bytes[pos..].to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroLociOptions {
    pub c: f64,
    pub resolution: usize,
    /// Pixels with `|i − j| ≤ band` count as diagonal.
    pub band: usize,
    pub metric: Metric,
    pub tol: f64,
}

impl Default for ZeroLociOptions {
    fn default() -> Self {
        ZeroLociOptions { c: 0.2, resolution: 1024, band: 4, metric: Metric::Euclidean, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroLociCounts {
    /// Light-shaded pixels per channel, diagonal included.
    pub shaded: Vec<u64>,
    /// Dark-shaded pixels per channel, diagonal included.
    pub dark: Vec<u64>,
    /// Pixels off the exact diagonal shaded in every channel.
    pub all_shaded_offdiag: u64,
    /// Pixels outside the diagonal band shaded in every channel.
    pub all_shaded_outside_band: u64,
    /// Smallest `max_i |ΔW_i| / |x − y|^α` outside the band.
    pub min_ratio_outside_band: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLoci {
    pub image: RasterImage,
    pub counts: ZeroLociCounts,
}

/// Renders the shading of `|W_{g_i}(y) − W_{g_i}(x)| < c|x − y|^α` at pixel
/// centres, channel `i` for shift `s_i`. Column `i` carries `x = (i + ½)/n`
/// and row `r` carries `y = (n − r − ½)/n`, so the diagonal runs from the
/// bottom-left corner to the top-right one. A single shift produces a gray
/// image, more produce RGB. Diagonal pixels are shaded whenever `c > 0`.
pub fn render_zero_loci(
    shifts: &[f64],
    base_g: &PeriodicFunction,
    alpha: f64,
    b: u32,
    opts: &ZeroLociOptions,
) -> Result<ZeroLoci> {
    if shifts.is_empty() || shifts.len() > 3 {
        return Err(Error::invalid("shifts", "between one and three shifts are supported"));
    }
    let n = opts.resolution;
    if n < 64 {
        return Err(Error::invalid("resolution", "must be at least 64"));
    }
    if !(opts.c >= 0.0 && opts.c.is_finite()) {
        return Err(Error::invalid("c", "must be finite and non-negative"));
    }
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(shifts.len());
    for &s in shifts {
        let spec = WeierstrassSpec::new(base_g.translate(s)?, alpha, b)?;
        let w = spec.evaluator(opts.tol)?;
        values.push((0..n).map(|i| w.eval((i as f64 + 0.5) / n as f64)).collect());
    }
    // |x − y|^α depends only on the index distance.
    let pow: Vec<f64> = (0..n)
        .map(|d| {
            let t = d as f64 / n as f64;
            let t = match opts.metric {
                Metric::Euclidean => t,
                Metric::Circle => t.min(1.0 - t),
            };
            libm::pow(t, alpha)
        })
        .collect();

    let format = if shifts.len() == 1 { PixelFormat::Gray } else { PixelFormat::Rgb };
    let mut image = RasterImage::new(n, n, format)?;
    let k = shifts.len();
    let mut counts = ZeroLociCounts {
        shaded: vec![0; k],
        dark: vec![0; k],
        all_shaded_offdiag: 0,
        all_shaded_outside_band: 0,
        min_ratio_outside_band: f64::INFINITY,
    };
    for row in 0..n {
        let yi = n - 1 - row;
        for xi in 0..n {
            let d = xi.abs_diff(yi);
            let mut all = true;
            let mut worst = 0.0f64;
            for (ch, v) in values.iter().enumerate() {
                let diff = libm::fabs(v[yi] - v[xi]);
                let thr = opts.c * pow[d];
                let (light, dark) = if d == 0 { (opts.c > 0.0, opts.c > 0.0) } else { (diff < thr, diff < thr / 8.0) };
                if d > 0 {
                    worst = worst.max(diff / pow[d]);
                }
                if dark {
                    counts.dark[ch] += 1;
                    image.set(xi, row, ch, DARK);
                } else if light {
                    image.set(xi, row, ch, LIGHT);
                }
                if light {
                    counts.shaded[ch] += 1;
                } else {
                    all = false;
                }
            }
            if d > 0 && all {
                counts.all_shaded_offdiag += 1;
            }
            if d > opts.band {
                if all {
                    counts.all_shaded_outside_band += 1;
                }
                counts.min_ratio_outside_band = counts.min_ratio_outside_band.min(worst);
            }
        }
    }
    Ok(ZeroLoci { image, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(c: f64, resolution: usize) -> ZeroLociOptions {
        ZeroLociOptions { c, resolution, ..Default::default() }
    }

    #[test]
    fn pnm_header_contract() {
        let mut img = RasterImage::new(1, 1, PixelFormat::Gray).unwrap();
        img.set(0, 0, 0, 0xFF);
        assert_eq!(img.to_pnm(), b"P5\n1 1\n255\n\xFF");
        assert_eq!(RasterImage::from_pnm(&img.to_pnm()).unwrap(), img);
        let rgb = RasterImage::from_pixels(2, 1, PixelFormat::Rgb, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(&rgb.to_pnm()[..11], b"P6\n2 1\n255\n");
        assert_eq!(RasterImage::from_pnm(&rgb.to_pnm()).unwrap(), rgb);
        assert!(RasterImage::from_pnm(b"P5\n2 2\n255\n\x00").is_err());
        assert!(RasterImage::from_pnm(b"P3\n1 1\n255\n\x00").is_err());
    }

    #[test]
    fn zero_threshold_shades_nothing() {
        let z = render_zero_loci(&[0.0], &PeriodicFunction::cosine(), 0.7, 2, &opts(0.0, 64)).unwrap();
        assert_eq!(z.image.format(), PixelFormat::Gray);
        assert!(z.image.pixels().iter().all(|&p| p == 0));
        assert_eq!(z.counts.shaded, vec![0]);
    }

    #[test]
    fn diagonal_is_always_shaded() {
        let z = render_zero_loci(&[0.0, 0.3, 0.6], &PeriodicFunction::triangle(), 0.7, 2, &opts(0.2, 64)).unwrap();
        for i in 0..64 {
            assert_eq!(z.image.pixel(i, 63 - i), &[DARK, DARK, DARK]);
        }
        assert!(z.counts.all_shaded_offdiag >= z.counts.all_shaded_outside_band);
        assert!(z.counts.shaded.iter().zip(&z.counts.dark).all(|(s, d)| s >= d));
    }

    #[test]
    fn image_is_symmetric_about_the_diagonal() {
        let z = render_zero_loci(&[0.1, 0.5], &PeriodicFunction::cosine(), 0.5, 3, &opts(0.3, 64)).unwrap();
        for row in 0..64 {
            for col in 0..64 {
                assert_eq!(z.image.pixel(col, row), z.image.pixel(63 - row, 63 - col));
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = PeriodicFunction::cosine();
        assert!(render_zero_loci(&[], &g, 0.7, 2, &opts(0.2, 64)).is_err());
        assert!(render_zero_loci(&[0.0; 4], &g, 0.7, 2, &opts(0.2, 64)).is_err());
        assert!(render_zero_loci(&[0.0], &g, 0.7, 2, &opts(0.2, 63)).is_err());
        assert!(render_zero_loci(&[0.0], &g, 0.7, 2, &opts(-1.0, 64)).is_err());
    }
}
