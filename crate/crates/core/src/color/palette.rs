use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{channel_from_u8, Rgb};

#[derive(Debug, Clone, PartialEq)]
pub struct PaletteEntry {
    pub code: u32,
    pub rgb: Rgb,
    pub name: String,
}

/// Brick colors keyed by LDraw color code.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

/// Solid colors from the LDraw `LDConfig.ldr` color table.
const STANDARD: &[(u32, [u8; 3], &str)] = &[
    (0, [0x1B, 0x2A, 0x34], "Black"),
    (1, [0x1E, 0x5A, 0xA8], "Blue"),
    (2, [0x00, 0x85, 0x2B], "Green"),
    (3, [0x06, 0x9D, 0x9F], "Dark_Turquoise"),
    (4, [0xB4, 0x00, 0x00], "Red"),
    (5, [0xD3, 0x35, 0x9D], "Dark_Pink"),
    (6, [0x54, 0x33, 0x24], "Brown"),
    (7, [0x8A, 0x92, 0x8D], "Light_Grey"),
    (8, [0x54, 0x59, 0x55], "Dark_Grey"),
    (9, [0x97, 0xCB, 0xD9], "Light_Blue"),
    (10, [0x58, 0xAB, 0x41], "Bright_Green"),
    (11, [0x00, 0xAA, 0xA4], "Light_Turquoise"),
    (12, [0xF0, 0x6D, 0x61], "Salmon"),
    (13, [0xF6, 0xA9, 0xBB], "Pink"),
    (14, [0xFA, 0xC8, 0x0A], "Yellow"),
    (15, [0xF4, 0xF4, 0xF4], "White"),
    (19, [0xE4, 0xCD, 0x9E], "Tan"),
    (25, [0xD6, 0x79, 0x23], "Orange"),
    (27, [0xA5, 0xCA, 0x18], "Lime"),
    (28, [0x89, 0x7D, 0x62], "Dark_Tan"),
    (70, [0x5F, 0x31, 0x09], "Reddish_Brown"),
    (71, [0x96, 0x96, 0x96], "Light_Bluish_Grey"),
    (72, [0x64, 0x64, 0x64], "Dark_Bluish_Grey"),
    (78, [0xF6, 0xD7, 0xB3], "Light_Nougat"),
    (84, [0xAA, 0x7D, 0x55], "Medium_Nougat"),
    (92, [0xD0, 0x91, 0x68], "Nougat"),
    (320, [0x72, 0x00, 0x12], "Dark_Red"),
];

impl Palette {
    pub fn new(entries: Vec<PaletteEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.code) {
                return Err(Error::Input(format!("duplicate palette code {}", e.code)));
            }
            if e.rgb.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::Input(format!(
                    "palette color {} has channels outside [0, 1]",
                    e.code
                )));
            }
        }
        Ok(Palette { entries })
    }

    /// Built-in palette of common solid brick colors.
    pub fn standard() -> Self {
        let entries = STANDARD
            .iter()
            .map(|&(code, [r, g, b], name)| PaletteEntry {
                code,
                rgb: [channel_from_u8(r), channel_from_u8(g), channel_from_u8(b)],
                name: name.to_owned(),
            })
            .collect();
        Palette { entries }
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, code: u32) -> Option<&PaletteEntry> {
        self.entries.iter().find(|e| e.code == code)
    }

    pub fn name_of(&self, code: u32) -> String {
        self.get(code)
            .map(|e| e.name.clone())
            .unwrap_or_else(|| format!("Color_{code}"))
    }

    /// Entry with the smallest Euclidean RGB distance; ties go to the lowest code.
    pub fn nearest(&self, rgb: Rgb) -> Option<&PaletteEntry> {
        let mut best: Option<(f64, &PaletteEntry)> = None;
        for e in &self.entries {
            let d = dist2(rgb, e.rgb);
            let better = match best {
                None => true,
                Some((bd, be)) => d < bd || (d == bd && e.code < be.code),
            };
            if better {
                best = Some((d, e));
            }
        }
        best.map(|(_, e)| e)
    }

    /// Parses lines of `code r g b name` with 0-255 channels. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 5 {
                return Err(Error::parse(n, "expected `code r g b name`"));
            }
            let code = toks[0]
                .parse()
                .map_err(|_| Error::parse(n, format!("invalid color code `{}`", toks[0])))?;
            let mut rgb = [0.0; 3];
            for (c, tok) in rgb.iter_mut().zip(&toks[1..4]) {
                let v: u8 = tok
                    .parse()
                    .map_err(|_| Error::parse(n, format!("invalid channel `{tok}`")))?;
                *c = channel_from_u8(v);
            }
            entries.push(PaletteEntry {
                code,
                rgb,
                name: toks[4..].join("_"),
            });
        }
        Palette::new(entries).map_err(|e| Error::parse(text.lines().count(), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let [r, g, b] = e.rgb.map(crate::grid::channel_to_u8);
            let _ = writeln!(out, "{} {r} {g} {b} {}", e.code, e.name);
        }
        out
    }
}

#[inline]
pub(crate) fn dist2(a: Rgb, b: Rgb) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}
