//! Netpbm bitmap codec. Reads plain (P1) and raw (P4) PBM, writes P4.
//! PBM value 1 (black) is an edge pixel.

use super::{EdgeImage, ImageError};

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ImageError> {
        Err(ImageError::Format {
            offset,
            message: message.into(),
        })
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn dimension(&mut self) -> Result<usize, ImageError> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected a decimal dimension");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value: usize = match text.parse() {
            Ok(v) => v,
            Err(_) => return self.err(start, "dimension overflows"),
        };
        if value < 3 {
            return self.err(
                start,
                format!("dimension {value} is below the 3 px minimum"),
            );
        }
        Ok(value)
    }
}

pub fn load_pbm(bytes: &[u8]) -> Result<EdgeImage, ImageError> {
    let mut r = Reader { bytes, pos: 0 };
    let raw = match bytes.get(..2) {
        Some(b"P1") => false,
        Some(b"P4") => true,
        _ => return r.err(0, "missing P1/P4 magic number"),
    };
    r.pos = 2;
    let width = r.dimension()?;
    let height = r.dimension()?;
    let Some(count) = width.checked_mul(height) else {
        return r.err(r.pos, "image too large");
    };
    let mut edges = Vec::with_capacity(count);

    if raw {
        match bytes.get(r.pos) {
            Some(b) if b.is_ascii_whitespace() => r.pos += 1,
            _ => return r.err(r.pos, "expected a single whitespace byte before the raster"),
        }
        let stride = width.div_ceil(8);
        let needed = stride * height;
        let raster = &bytes[r.pos..];
        if raster.len() < needed {
            return r.err(
                bytes.len(),
                format!("raster truncated: {} of {needed} bytes", raster.len()),
            );
        }
        for row in raster[..needed].chunks_exact(stride) {
            for x in 0..width {
                edges.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
            }
        }
    } else {
        while edges.len() < count {
            r.skip_blank();
            match bytes.get(r.pos) {
                Some(b'0') => edges.push(false),
                Some(b'1') => edges.push(true),
                Some(_) => return r.err(r.pos, "expected 0 or 1"),
                None => {
                    return r.err(
                        r.pos,
                        format!("raster truncated: {} of {count} pixels", edges.len()),
                    )
                }
            }
            r.pos += 1;
        }
    }
    EdgeImage::from_edges(width, height, edges)
}

/// Encodes as binary P4 with rows padded to whole bytes.
pub fn save_pbm(image: &EdgeImage) -> Vec<u8> {
    let (w, h) = (image.width(), image.height());
    let stride = w.div_ceil(8);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    out.reserve(stride * h);
    for row in image.as_slice().chunks_exact(w) {
        let mut packed = vec![0u8; stride];
        for (x, _) in row.iter().enumerate().filter(|(_, &e)| e) {
            packed[x / 8] |= 0x80 >> (x % 8);
        }
        out.extend_from_slice(&packed);
    }
    out
}
