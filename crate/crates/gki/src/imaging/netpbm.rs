//! NetPBM image I/O: P2/P5 grayscale and P3/P6 color, maxval up to 255.
//!
//! Reads are lossless and skip `#` comments in the header; parse failures
//! report the byte offset of the offending content. Writes emit the binary
//! formats by default, with ASCII variants available for fixtures and
//! interoperability.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{Mask, RawImage};

struct Scanner<'a> {
    data: &'a [u8],
    pos: usize,
    path: String,
}

impl<'a> Scanner<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), offset, message: message.into() }
    }

    fn skip_separators(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<(usize, &'a [u8])> {
        self.skip_separators();
        if self.pos >= self.data.len() {
            return Err(self.err(self.data.len(), "unexpected end of file"));
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Ok((start, &self.data[start..self.pos]))
    }

    fn number(&mut self, what: &str) -> Result<(usize, u32)> {
        let (at, tok) = self.token()?;
        let s = std::str::from_utf8(tok).map_err(|_| self.err(at, format!("invalid {what}")))?;
        let v = s
            .parse::<u32>()
            .map_err(|_| self.err(at, format!("invalid {what} {s:?}")))?;
        Ok((at, v))
    }
}

/// Reads a P2/P5 PGM or P3/P6 PPM file with maxval at most 255.
pub fn read_netpbm(path: &Path) -> Result<RawImage> {
    let data = std::fs::read(path)?;
    let mut sc = Scanner { data: &data, pos: 0, path: path.display().to_string() };

    let (at, magic) = sc.token()?;
    let (channels, ascii) = match magic {
        b"P2" => (1, true),
        b"P3" => (3, true),
        b"P5" => (1, false),
        b"P6" => (3, false),
        other => {
            return Err(sc.err(
                at,
                format!("unsupported magic {:?}", String::from_utf8_lossy(other)),
            ))
        }
    };

    let (at_w, w) = sc.number("width")?;
    let (at_h, h) = sc.number("height")?;
    if w == 0 {
        return Err(sc.err(at_w, "width must be positive"));
    }
    if h == 0 {
        return Err(sc.err(at_h, "height must be positive"));
    }
    let (at_max, maxval) = sc.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(sc.err(at_max, format!("unsupported maxval {maxval} (need 1..=255)")));
    }

    let (h, w, maxval) = (h as usize, w as usize, maxval as u8);
    let expected = h * w * channels;
    let mut pixels = Vec::with_capacity(expected);

    if ascii {
        for _ in 0..expected {
            let (at, v) = sc.number("pixel value")?;
            if v > maxval as u32 {
                return Err(sc.err(at, format!("pixel value {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as u8);
        }
    } else {
        // exactly one separator byte between the maxval and the payload
        if sc.pos >= data.len() || !data[sc.pos].is_ascii_whitespace() {
            return Err(sc.err(sc.pos, "missing separator before binary payload"));
        }
        sc.pos += 1;
        if data.len() - sc.pos < expected {
            return Err(sc.err(
                data.len(),
                format!(
                    "truncated payload: need {expected} bytes, have {}",
                    data.len() - sc.pos
                ),
            ));
        }
        for (i, &b) in data[sc.pos..sc.pos + expected].iter().enumerate() {
            if b > maxval {
                return Err(sc.err(
                    sc.pos + i,
                    format!("pixel value {b} exceeds maxval {maxval}"),
                ));
            }
            pixels.push(b);
        }
    }

    RawImage::new(h, w, channels, maxval, pixels)
}

/// Writes the binary format: P5 for grayscale, P6 for color.
pub fn write_netpbm(image: &RawImage, path: &Path) -> Result<()> {
    let magic = if image.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n{}\n", image.w(), image.h(), image.maxval())
        .into_bytes();
    out.extend_from_slice(image.data());
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes the ASCII format: P2 for grayscale, P3 for color.
pub fn write_netpbm_ascii(image: &RawImage, path: &Path) -> Result<()> {
    let magic = if image.channels() == 1 { "P2" } else { "P3" };
    let mut out = format!("{magic}\n{} {}\n{}\n", image.w(), image.h(), image.maxval());
    // short lines keep the files friendly to strict readers
    for chunk in image.data().chunks(12) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a grayscale PGM as a mask: zero means missing, anything else
/// observed.
pub fn read_mask(path: &Path) -> Result<Mask> {
    let img = read_netpbm(path)?;
    if img.channels() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{}: masks must be grayscale, got {} channels",
            path.display(),
            img.channels()
        )));
    }
    let data = img.data().iter().map(|&v| v != 0).collect();
    Mask::new(img.h(), img.w(), data)
}

/// Writes a mask as a binary PGM with 0 = missing, 255 = observed.
pub fn write_mask(mask: &Mask, path: &Path) -> Result<()> {
    let data = mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let img = RawImage::new(mask.h(), mask.w(), 1, 255, data)?;
    write_netpbm(&img, path)
}
