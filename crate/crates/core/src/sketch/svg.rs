//! SVG path-subset import (M/L/C/Z, absolute and relative) and export.

use std::fmt::Write as _;

use super::frame::SketchFrame;
use crate::error::{Error, Result};
use crate::geometry::{CubicBezier, Point2};

/// Side length of the square output canvas.
pub const CANVAS_SIZE: f64 = 256.0;
/// Fraction of the canvas left empty on each side after normalization.
pub const CANVAS_MARGIN: f64 = 0.05;

/// Parses an SVG document and normalizes it into the canvas.
pub fn parse_svg(text: &str) -> Result<SketchFrame> {
    Ok(normalize_to_canvas(&parse_svg_raw(text)?))
}

/// Parses an SVG document keeping the original coordinates.
pub fn parse_svg_raw(text: &str) -> Result<SketchFrame> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::MalformedSvg(e.to_string()))?;
    let mut strokes = Vec::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("path")) {
        let Some(d) = node.attribute("d") else {
            continue;
        };
        parse_path_data(d, &mut strokes)?;
    }
    if strokes.is_empty() {
        return Err(Error::EmptySketch);
    }
    SketchFrame::new(strokes)
}

/// Uniformly scales and centers the control points into the canvas with a
/// margin, preserving aspect ratio.
pub fn normalize_to_canvas(frame: &SketchFrame) -> SketchFrame {
    let pts = frame.points();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if extent > 0.0 {
        CANVAS_SIZE * (1.0 - 2.0 * CANVAS_MARGIN) / extent
    } else {
        1.0
    };
    let mid = (lo + hi) * 0.5;
    let center = Point2::new(CANVAS_SIZE / 2.0, CANVAS_SIZE / 2.0);
    frame.map_points(|p| (p - mid) * scale + center)
}

/// Serializes one frame as an SVG document with one `path` per stroke.
///
/// Coordinates use the shortest representation that parses back to the
/// identical `f64`.
pub fn frame_to_svg(frame: &SketchFrame) -> String {
    let mut out = String::new();
    let size = CANVAS_SIZE;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    for s in frame.strokes() {
        let [a, b, c, d] = s.control;
        let _ = writeln!(
            out,
            r#"  <path d="M {} {} C {} {} {} {} {} {}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Command(char),
    Number(f64),
}

fn tokenize(d: &str) -> Result<Vec<Token>> {
    let bytes = d.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() || ch == ',' {
            i += 1;
        } else if ch.is_ascii_alphabetic() && ch != 'e' && ch != 'E' {
            out.push(Token::Command(ch));
            i += 1;
        } else if ch == '+' || ch == '-' || ch == '.' || ch.is_ascii_digit() {
            let start = i;
            if ch == '+' || ch == '-' {
                i += 1;
            }
            let mut seen_dot = false;
            let mut seen_digit = false;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_ascii_digit() {
                    seen_digit = true;
                    i += 1;
                } else if c == '.' && !seen_dot {
                    seen_dot = true;
                    i += 1;
                } else {
                    break;
                }
            }
            if !seen_digit {
                return Err(Error::MalformedSvg(format!(
                    "bad number in path data at byte {start}"
                )));
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let v: f64 = d[start..i]
                .parse()
                .map_err(|_| Error::MalformedSvg(format!("bad number '{}'", &d[start..i])))?;
            out.push(Token::Number(v));
        } else {
            return Err(Error::MalformedSvg(format!(
                "unexpected character '{ch}' in path data"
            )));
        }
    }
    Ok(out)
}

fn parse_path_data(d: &str, strokes: &mut Vec<CubicBezier>) -> Result<()> {
    let tokens = tokenize(d)?;
    let mut pos = 0;
    let mut current = Point2::ZERO;
    let mut start = Point2::ZERO;
    let mut command: Option<char> = None;
    let mut started = false;

    let take = |pos: &mut usize, n: usize| -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            match tokens.get(*pos) {
                Some(Token::Number(x)) => {
                    v.push(*x);
                    *pos += 1;
                }
                _ => {
                    return Err(Error::MalformedSvg(
                        "path command is missing coordinates".into(),
                    ))
                }
            }
        }
        Ok(v)
    };

    while pos < tokens.len() {
        let cmd = match tokens[pos] {
            Token::Command(c) => {
                pos += 1;
                c
            }
            Token::Number(_) => match command {
                // Extra coordinate pairs after a moveto are implicit linetos.
                Some('M') => 'L',
                Some('m') => 'l',
                Some(c) if c != 'Z' && c != 'z' => c,
                _ => return Err(Error::MalformedSvg("coordinates without a command".into())),
            },
        };
        if !matches!(cmd, 'M' | 'm' | 'L' | 'l' | 'C' | 'c' | 'Z' | 'z') {
            return Err(Error::UnsupportedCommand(cmd));
        }
        if !started && !matches!(cmd, 'M' | 'm') {
            return Err(Error::MalformedSvg(
                "path data must begin with a moveto".into(),
            ));
        }
        let relative = cmd.is_ascii_lowercase();
        let base = if relative { current } else { Point2::ZERO };
        match cmd.to_ascii_uppercase() {
            'M' => {
                let v = take(&mut pos, 2)?;
                current = base + Point2::new(v[0], v[1]);
                start = current;
                started = true;
            }
            'L' => {
                let v = take(&mut pos, 2)?;
                let next = base + Point2::new(v[0], v[1]);
                strokes.push(CubicBezier::line(current, next));
                current = next;
            }
            'C' => {
                let v = take(&mut pos, 6)?;
                let c1 = base + Point2::new(v[0], v[1]);
                let c2 = base + Point2::new(v[2], v[3]);
                let end = base + Point2::new(v[4], v[5]);
                strokes.push(CubicBezier::new(current, c1, c2, end));
                current = end;
            }
            'Z' => {
                if current != start {
                    strokes.push(CubicBezier::line(current, start));
                }
                current = start;
            }
            _ => unreachable!(),
        }
        command = Some(cmd);
    }
    Ok(())
}
