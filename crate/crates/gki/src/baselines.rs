//! Classical separable upsamplers used as comparison baselines: nearest
//! neighbor, bilinear, and bicubic convolution with the Keys kernel.
//!
//! All three use the half-pixel center convention: output pixel p maps to
//! source coordinate (p + 0.5) / scale - 0.5, with indices clamped at the
//! edges.

use crate::error::{Error, Result};
use crate::imaging::RawImage;

/// Keys cubic-convolution kernel parameter; reproduces degree-1 polynomials.
const KEYS_A: f64 = -0.5;

fn keys_kernel(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        (KEYS_A + 2.0) * x * x * x - (KEYS_A + 3.0) * x * x + 1.0
    } else if x < 2.0 {
        KEYS_A * (x * x * x - 5.0 * x * x + 8.0 * x - 4.0)
    } else {
        0.0
    }
}

fn src_coord(p: usize, scale: usize) -> f64 {
    (p as f64 + 0.5) / scale as f64 - 0.5
}

fn clamp_index(i: i64, n: usize) -> usize {
    i.clamp(0, n as i64 - 1) as usize
}

/// Per-output-position source taps for one axis; identical across the other
/// axis, so they are precomputed once per pass.
struct Taps {
    offsets: Vec<usize>,
    weights: Vec<f64>,
}

fn axis_taps(n: usize, scale: usize, taps_per_output: usize) -> Vec<Taps> {
    (0..n * scale)
        .map(|p| {
            let s = src_coord(p, scale);
            match taps_per_output {
                1 => Taps {
                    offsets: vec![clamp_index(s.round() as i64, n)],
                    weights: vec![1.0],
                },
                2 => {
                    let i0 = s.floor();
                    let t = s - i0;
                    Taps {
                        offsets: vec![
                            clamp_index(i0 as i64, n),
                            clamp_index(i0 as i64 + 1, n),
                        ],
                        weights: vec![1.0 - t, t],
                    }
                }
                _ => {
                    let i0 = s.floor();
                    let t = s - i0;
                    let offsets = (-1..=2)
                        .map(|d| clamp_index(i0 as i64 + d, n))
                        .collect();
                    let weights = (-1..=2)
                        .map(|d| keys_kernel(t - d as f64))
                        .collect();
                    Taps { offsets, weights }
                }
            }
        })
        .collect()
}

fn upsample(image: &RawImage, scale: usize, taps_per_output: usize, clip: bool) -> Result<RawImage> {
    if scale < 2 {
        return Err(Error::InvalidArgument(format!(
            "upsampling factor must be at least 2, got {scale}"
        )));
    }
    let (h, w, channels) = (image.h(), image.w(), image.channels());
    let (oh, ow) = (h * scale, w * scale);
    let col_taps = axis_taps(w, scale, taps_per_output);
    let row_taps = axis_taps(h, scale, taps_per_output);

    let mut out = vec![0u8; oh * ow * channels];
    for ch in 0..channels {
        let plane = image.channel_plane(ch);

        // Horizontal pass: h x ow intermediate values.
        let mut mid = vec![0.0f64; h * ow];
        for r in 0..h {
            let src_row = &plane[r * w..(r + 1) * w];
            for (p, taps) in col_taps.iter().enumerate() {
                let mut acc = 0.0;
                for (&off, &wt) in taps.offsets.iter().zip(&taps.weights) {
                    acc += wt * src_row[off];
                }
                mid[r * ow + p] = acc;
            }
        }

        // Vertical pass straight into the interleaved output buffer.
        for (q, taps) in row_taps.iter().enumerate() {
            for p in 0..ow {
                let mut acc = 0.0;
                for (&off, &wt) in taps.offsets.iter().zip(&taps.weights) {
                    acc += wt * mid[off * ow + p];
                }
                let v = if clip { acc.clamp(0.0, 255.0) } else { acc };
                out[(q * ow + p) * channels + ch] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    RawImage::new(oh, ow, channels, image.maxval(), out)
}

/// Copies the nearest source pixel under the half-pixel inverse map.
pub fn upsample_nearest(image: &RawImage, scale: usize) -> Result<RawImage> {
    upsample(image, scale, 1, false)
}

/// Separable linear interpolation over the 2x2 source neighborhood.
pub fn upsample_bilinear(image: &RawImage, scale: usize) -> Result<RawImage> {
    upsample(image, scale, 2, false)
}

/// Separable cubic convolution over the 4x4 source neighborhood; overshoot is
/// clipped to [0, 255] before quantization.
pub fn upsample_bicubic(image: &RawImage, scale: usize) -> Result<RawImage> {
    upsample(image, scale, 4, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gray(h: usize, w: usize, data: Vec<u8>) -> RawImage {
        RawImage::new(h, w, 1, 255, data).unwrap()
    }

    #[test]
    fn keys_kernel_values() {
        assert_eq!(keys_kernel(0.0), 1.0);
        assert_eq!(keys_kernel(1.0), 0.0);
        assert_eq!(keys_kernel(2.0), 0.0);
        assert_eq!(keys_kernel(0.5), 0.5625);
        assert_eq!(keys_kernel(-0.5), 0.5625);
        assert_eq!(keys_kernel(1.5), -0.0625);
        // Partition of unity at the half-sample phase.
        assert_eq!(
            keys_kernel(1.5) + keys_kernel(0.5) + keys_kernel(0.5) + keys_kernel(1.5),
            1.0
        );
    }

    #[test]
    fn constant_images_stay_constant() {
        let img = RawImage::constant(3, 4, 1, 77).unwrap();
        for result in [
            upsample_nearest(&img, 3).unwrap(),
            upsample_bilinear(&img, 3).unwrap(),
            upsample_bicubic(&img, 3).unwrap(),
        ] {
            assert_eq!(result.h(), 9);
            assert_eq!(result.w(), 12);
            assert!(result.data().iter().all(|&v| v == 77));
        }
    }

    #[test]
    fn single_pixel_fans_out_to_constant_block() {
        let img = gray(1, 1, vec![42]);
        let out = upsample_nearest(&img, 4).unwrap();
        assert_eq!((out.h(), out.w()), (4, 4));
        assert!(out.data().iter().all(|&v| v == 42));
    }

    #[test]
    fn nearest_doubles_checkerboard_into_blocks() {
        let img = gray(2, 2, vec![0, 255, 255, 0]);
        let out = upsample_nearest(&img, 2).unwrap();
        let expect = [
            0, 0, 255, 255, //
            0, 0, 255, 255, //
            255, 255, 0, 0, //
            255, 255, 0, 0,
        ];
        assert_eq!(out.data(), &expect);
    }

    #[test]
    fn bilinear_preserves_a_ramp_away_from_edges() {
        let img = gray(1, 5, vec![10, 30, 50, 70, 90]);
        let out = upsample_bilinear(&img, 2).unwrap();
        let expect = [10, 15, 25, 35, 45, 55, 65, 75, 85, 90];
        assert_eq!((out.h(), out.w()), (2, 10));
        for row in 0..2 {
            for (c, want) in expect.iter().enumerate() {
                assert_eq!(out.get(row, c, 0), *want);
            }
        }
    }

    #[test]
    fn bicubic_reproduces_a_ramp_in_the_interior() {
        let img = gray(1, 7, vec![0, 40, 80, 120, 160, 200, 240]);
        let out = upsample_bicubic(&img, 2).unwrap();
        // Interior outputs have all four taps in range when s is in [1, 5]:
        // the ramp value 40*s is reproduced exactly.
        for p in 0..14 {
            let s = (p as f64 + 0.5) / 2.0 - 0.5;
            if (1.0..=5.0).contains(&s) {
                assert_eq!(out.get(0, p, 0) as f64, 40.0 * s, "output {p}");
            }
        }
    }

    #[test]
    fn odd_scale_aligns_output_centers_with_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data: Vec<u8> = (0..4 * 5).map(|_| rng.random()).collect();
        let img = gray(4, 5, data);
        for out in [
            upsample_nearest(&img, 3).unwrap(),
            upsample_bilinear(&img, 3).unwrap(),
            upsample_bicubic(&img, 3).unwrap(),
        ] {
            for r in 0..4 {
                for c in 0..5 {
                    assert_eq!(out.get(3 * r + 1, 3 * c + 1, 0), img.get(r, c, 0));
                }
            }
        }
    }

    #[test]
    fn bilinear_stays_within_source_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data: Vec<u8> = (0..6 * 6).map(|_| rng.random_range(40..=200)).collect();
        let img = gray(6, 6, data);
        let out = upsample_bilinear(&img, 2).unwrap();
        assert!(out.data().iter().all(|&v| (40..=200).contains(&v)));
    }

    #[test]
    fn channels_upsample_independently() {
        // Channel 0 constant, channels 1 and 2 gradients.
        let mut data = Vec::new();
        for v in [0u8, 80, 160, 240] {
            data.push(55);
            data.push(v);
            data.push(255 - v);
        }
        let img = RawImage::new(2, 2, 3, 255, data).unwrap();
        let out = upsample_bilinear(&img, 2).unwrap();
        assert_eq!(out.channels(), 3);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(out.get(r, c, 0), 55);
                assert_eq!(out.get(r, c, 1) as u16 + out.get(r, c, 2) as u16, 255);
            }
        }
    }

    #[test]
    fn rejects_degenerate_scale() {
        let img = gray(2, 2, vec![0, 1, 2, 3]);
        assert!(matches!(
            upsample_nearest(&img, 1).unwrap_err(),
            Error::InvalidArgument(_)
        ));
        assert!(matches!(
            upsample_bicubic(&img, 0).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn output_dimensions_scale_exactly() {
        let img = gray(3, 2, vec![1, 2, 3, 4, 5, 6]);
        let out = upsample_bicubic(&img, 5).unwrap();
        assert_eq!((out.h(), out.w()), (15, 10));
        assert_eq!(out.maxval(), 255);
    }
}
