use std::io::BufRead;

use super::{fan_triangulate, Point, TriangleMesh};
use crate::error::{Error, Result};
use crate::lines::LineReader;

/// Parses the `v`/`f` subset of Wavefront OBJ. Face references may carry
/// `/vt/vn` suffixes, which are ignored; negative references count back from
/// the most recent vertex. Other record types are skipped.
pub fn parse_obj<R: BufRead>(reader: R) -> Result<TriangleMesh> {
    let mut lines = LineReader::new(reader);
    let mut vertices: Vec<Point> = Vec::new();
    let mut faces = Vec::new();
    let mut polygon = Vec::new();

    while let Some((n, l)) = lines.next_content()? {
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("v") => {
                let coords: Vec<&str> = toks.collect();
                if coords.len() < 3 {
                    return Err(Error::parse(
                        n,
                        format!("`v` needs 3 coordinates, found {}", coords.len()),
                    ));
                }
                let mut p = [0.0; 3];
                for (c, tok) in p.iter_mut().zip(&coords) {
                    *c = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(n, format!("invalid coordinate `{tok}`")))?;
                }
                vertices.push(p);
            }
            Some("f") => {
                polygon.clear();
                for tok in toks {
                    polygon.push(resolve_index(n, tok, vertices.len())?);
                }
                if polygon.len() < 3 {
                    return Err(Error::parse(
                        n,
                        format!("`f` needs at least 3 vertices, found {}", polygon.len()),
                    ));
                }
                fan_triangulate(&polygon, &mut faces);
            }
            _ => {}
        }
    }

    TriangleMesh::new(vertices, faces).map_err(|e| Error::parse(lines.line(), e.to_string()))
}

pub fn parse_obj_str(text: &str) -> Result<TriangleMesh> {
    parse_obj(text.as_bytes())
}

fn resolve_index(line: usize, tok: &str, count: usize) -> Result<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid vertex reference `{tok}`")))?;
    let resolved = if raw > 0 {
        usize::try_from(raw - 1).ok()
    } else if raw < 0 {
        usize::try_from(raw.unsigned_abs())
            .ok()
            .and_then(|back| count.checked_sub(back))
    } else {
        None
    };
    resolved.filter(|&i| i < count).ok_or_else(|| {
        Error::parse(
            line,
            format!("vertex reference `{tok}` out of range ({count} vertices defined)"),
        )
    })
}
