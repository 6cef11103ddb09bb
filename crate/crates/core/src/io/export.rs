//! Frame, raster, and loss-history files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::losses::LossBreakdown;
use crate::sketch::{frame_to_svg, parse_svg_raw, SketchFrame, SketchVideo};

/// Samples per stroke when rasterizing.
pub const RASTER_SAMPLES: usize = 128;
/// Raster side length in pixels.
pub const RASTER_SIZE: usize = 256;

pub fn frame_file_name(index: usize, ext: &str) -> String {
    format!("frame_{index:04}.{ext}")
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_svg_frames(dir: &Path, video: &SketchVideo) -> Result<()> {
    for (i, f) in video.frames().iter().enumerate() {
        write_file(&dir.join(frame_file_name(i, "svg")), frame_to_svg(f))?;
    }
    Ok(())
}

pub fn write_ppm_frames(dir: &Path, video: &SketchVideo) -> Result<()> {
    for (i, f) in video.frames().iter().enumerate() {
        write_file(&dir.join(frame_file_name(i, "ppm")), render_ppm(f))?;
    }
    Ok(())
}

/// `frame_*.svg` files of a directory in name order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("frame_") && name.ends_with(".svg") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Reads every frame of a directory without canvas normalization.
pub fn read_frame_dir(dir: &Path) -> Result<Vec<SketchFrame>> {
    let paths = frame_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::MalformedSvg(format!(
            "{}: no frame_*.svg files",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_svg_raw(&text).map_err(|e| match e {
                Error::MalformedSvg(msg) => Error::MalformedSvg(format!("{}: {msg}", p.display())),
                other => other,
            })
        })
        .collect()
}

/// Binary PPM: black polylines on white, `RASTER_SAMPLES` points per stroke.
pub fn render_ppm(frame: &SketchFrame) -> Vec<u8> {
    let n = RASTER_SIZE;
    let mut pixels = vec![255u8; n * n * 3];
    let mut plot = |x: i64, y: i64| {
        if (0..n as i64).contains(&x) && (0..n as i64).contains(&y) {
            let i = 3 * (y as usize * n + x as usize);
            pixels[i..i + 3].fill(0);
        }
    };
    for stroke in frame.strokes() {
        let pts: Vec<(i64, i64)> = (0..RASTER_SAMPLES)
            .map(|s| {
                let p = stroke.eval(s as f64 / (RASTER_SAMPLES - 1) as f64);
                pixel(p)
            })
            .collect();
        for w in pts.windows(2) {
            bresenham(w[0], w[1], &mut plot);
        }
    }
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    out
}

fn pixel(p: Point2) -> (i64, i64) {
    // Clamp far-away points so the line walk stays short.
    let lim = 4.0 * RASTER_SIZE as f64;
    let c = |v: f64| {
        if v.is_finite() {
            v.floor().clamp(-lim, lim) as i64
        } else {
            -1
        }
    };
    (c(p.x), c(p.y))
}

fn bresenham((mut x0, mut y0): (i64, i64), (x1, y1): (i64, i64), plot: &mut impl FnMut(i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        plot(x0, y0);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

pub const LOSS_CSV_HEADER: &str = "iter,length,area,arap,guidance,total";

pub fn loss_csv(history: &[LossBreakdown]) -> String {
    let mut out = String::from(LOSS_CSV_HEADER);
    out.push('\n');
    for (i, b) in history.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{}",
            b.length_term, b.area_term, b.arap_term, b.guidance_term, b.total
        );
    }
    out
}
