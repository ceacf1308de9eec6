use std::io::BufRead;

use super::{fan_triangulate, Point, TriangleMesh};
use crate::error::{Error, Result};
use crate::lines::LineReader;

/// Parses an OFF mesh. Polygons with more than three vertices are fan
/// triangulated; `#` comments and blank lines are skipped. A header glued to
/// the counts (`OFF490 518 0`, common in ModelNet) is accepted.
pub fn parse_off<R: BufRead>(reader: R) -> Result<TriangleMesh> {
    let mut lines = LineReader::new(reader);

    let (n, header) = lines
        .next_content()?
        .ok_or_else(|| Error::parse(lines.line() + 1, "empty input, expected `OFF` header"))?;
    let header = header.trim();
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| Error::parse(n, format!("expected `OFF` header, found `{header}`")))?;
    let (n, counts) = if rest.trim().is_empty() {
        lines
            .next_content()?
            .ok_or_else(|| Error::parse(lines.line() + 1, "missing counts line"))?
    } else if rest.starts_with(|c: char| c.is_ascii_digit() || c.is_whitespace()) {
        (n, rest.to_owned())
    } else {
        return Err(Error::parse(
            n,
            format!("expected `OFF` header, found `{header}`"),
        ));
    };

    let counts: Vec<&str> = counts.split_whitespace().collect();
    if counts.len() != 3 {
        return Err(Error::parse(
            n,
            format!(
                "expected `vertices faces edges` counts, found {} fields",
                counts.len()
            ),
        ));
    }
    let nv: usize = count(n, counts[0], "vertex count")?;
    let nf: usize = count(n, counts[1], "face count")?;
    count(n, counts[2], "edge count")?;

    let mut vertices: Vec<Point> = Vec::with_capacity(nv.min(1 << 16));
    for i in 0..nv {
        let (n, l) = lines.next_content()?.ok_or_else(|| {
            Error::parse(
                lines.line() + 1,
                format!("expected vertex {} of {nv}, found end of input", i + 1),
            )
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::parse(
                n,
                format!("vertex needs 3 coordinates, found {}", toks.len()),
            ));
        }
        let mut p = [0.0; 3];
        for (c, tok) in p.iter_mut().zip(&toks) {
            *c = tok
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(n, format!("invalid coordinate `{tok}`")))?;
        }
        vertices.push(p);
    }

    let mut faces = Vec::with_capacity(nf.min(1 << 16));
    let mut polygon = Vec::new();
    for i in 0..nf {
        let (n, l) = lines.next_content()?.ok_or_else(|| {
            Error::parse(
                lines.line() + 1,
                format!("expected face {} of {nf}, found end of input", i + 1),
            )
        })?;
        let mut toks = l.split_whitespace();
        let k: usize = count(n, toks.next().unwrap_or(""), "polygon size")?;
        if k < 3 {
            return Err(Error::parse(n, format!("polygon with {k} vertices")));
        }
        polygon.clear();
        for j in 0..k {
            let tok = toks.next().ok_or_else(|| {
                Error::parse(n, format!("polygon declares {k} vertices, found {j}"))
            })?;
            let v: usize = count(n, tok, "vertex index")?;
            if v >= nv {
                return Err(Error::parse(
                    n,
                    format!("vertex index {v} out of range (mesh has {nv})"),
                ));
            }
            polygon.push(v);
        }
        // Remaining tokens are optional face colors.
        fan_triangulate(&polygon, &mut faces);
    }

    if let Some((n, l)) = lines.next_content()? {
        return Err(Error::parse(
            n,
            format!("unexpected data after {nf} faces: `{}`", l.trim()),
        ));
    }

    TriangleMesh::new(vertices, faces).map_err(|e| Error::parse(lines.line(), e.to_string()))
}

pub fn parse_off_str(text: &str) -> Result<TriangleMesh> {
    parse_off(text.as_bytes())
}

fn count(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}
