use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A height-1 cuboid brick footprint in studs, `width <= depth`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Footprint {
    pub width: usize,
    pub depth: usize,
    pub part_id: String,
}

impl Footprint {
    pub fn area(&self) -> usize {
        self.width * self.depth
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickCatalog {
    footprints: Vec<Footprint>,
}

const STANDARD: &[(usize, usize, &str)] = &[
    (1, 1, "3005"),
    (1, 2, "3004"),
    (1, 3, "3622"),
    (1, 4, "3010"),
    (1, 6, "3009"),
    (1, 8, "3008"),
    (2, 2, "3003"),
    (2, 3, "3002"),
    (2, 4, "3001"),
    (2, 6, "2456"),
    (2, 8, "3007"),
];

impl BrickCatalog {
    /// Footprints given as `(a, b)` are normalized so that `width <= depth`.
    pub fn new(footprints: Vec<Footprint>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut ids = HashSet::new();
        let mut out = Vec::with_capacity(footprints.len());
        for mut f in footprints {
            if f.width == 0 || f.depth == 0 {
                return Err(Error::Input(format!("brick {} has a zero side", f.part_id)));
            }
            if f.part_id.is_empty() || f.part_id.chars().any(char::is_whitespace) {
                return Err(Error::Input(format!("invalid part id `{}`", f.part_id)));
            }
            if f.width > f.depth {
                std::mem::swap(&mut f.width, &mut f.depth);
            }
            if !seen.insert((f.width, f.depth)) {
                return Err(Error::Input(format!(
                    "duplicate footprint {}x{}",
                    f.width, f.depth
                )));
            }
            if !ids.insert(f.part_id.clone()) {
                return Err(Error::Input(format!("duplicate part id {}", f.part_id)));
            }
            out.push(f);
        }
        if !seen.contains(&(1, 1)) {
            return Err(Error::Input("catalog must contain a 1x1 brick".into()));
        }
        Ok(BrickCatalog { footprints: out })
    }

    /// Common bricks from the LDraw parts library.
    pub fn standard() -> Self {
        BrickCatalog {
            footprints: STANDARD
                .iter()
                .map(|&(width, depth, id)| Footprint {
                    width,
                    depth,
                    part_id: id.to_owned(),
                })
                .collect(),
        }
    }

    pub fn footprints(&self) -> &[Footprint] {
        &self.footprints
    }

    pub fn by_part(&self, part_id: &str) -> Option<&Footprint> {
        self.footprints.iter().find(|f| f.part_id == part_id)
    }

    /// Parses lines of `width depth part_id`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut footprints = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(n, "expected `width depth part_id`"));
            }
            let side = |t: &str| {
                t.parse::<usize>()
                    .ok()
                    .filter(|&v| (1..=64).contains(&v))
                    .ok_or_else(|| Error::parse(n, format!("invalid brick side `{t}`")))
            };
            footprints.push(Footprint {
                width: side(toks[0])?,
                depth: side(toks[1])?,
                part_id: toks[2].to_owned(),
            });
        }
        BrickCatalog::new(footprints).map_err(|e| Error::parse(text.lines().count(), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.footprints {
            let _ = writeln!(out, "{} {} {}", f.width, f.depth, f.part_id);
        }
        out
    }
}
