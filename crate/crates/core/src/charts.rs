//! Adams E2 charts: classes and h0/h1/h2 lines, rendered as SVG, ASCII or JSON.
//!
//! Chart coordinates are (stem, s) for the module normalized to bottom degree
//! 0. `shift` is the bottom degree before normalizing; add it to a stem to get
//! the stem on the original axes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::modules::FdModule;
use crate::resolution::{hom_complex_ext, resolve, ExtTable, Resolution, ResolutionError};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error(
        "internal cross-check failed at s={s}, stem={stem}: duality route gives {duality}, Hom complex gives {hom}"
    )]
    OracleDisagreement {
        s: u32,
        stem: i32,
        duality: usize,
        hom: usize,
    },
    #[error("unknown chart format `{0}` (expected svg, ascii or json)")]
    UnknownFormat(String),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Ascii,
    Json,
}

impl FromStr for Format {
    type Err = ChartError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svg" => Ok(Format::Svg),
            "ascii" => Ok(Format::Ascii),
            "json" => Ok(Format::Json),
            _ => Err(ChartError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    H0,
    H1,
    H2,
}

impl LineKind {
    pub const ALL: [LineKind; 3] = [LineKind::H0, LineKind::H1, LineKind::H2];

    pub fn power(self) -> u32 {
        match self {
            LineKind::H0 => 0,
            LineKind::H1 => 1,
            LineKind::H2 => 2,
        }
    }

    /// (Δstem, Δs) of a line of this kind.
    pub fn step(self) -> (i32, u32) {
        ((1 << self.power()) - 1, 1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LineKind::H0 => "h0",
            LineKind::H1 => "h1",
            LineKind::H2 => "h2",
        }
    }
}

/// A class position: (stem, s, index within the bidegree).
pub type ClassId = (i32, u32, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartClass {
    pub stem: i32,
    pub s: u32,
    pub index: usize,
    pub name: String,
}

impl ChartClass {
    pub fn id(&self) -> ClassId {
        (self.stem, self.s, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartLine {
    pub kind: LineKind,
    pub from: ClassId,
    pub to: ClassId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Truncation {
    /// Classes exist beyond `max_stem` in the computed range.
    pub stem: bool,
    /// Classes exist at `max_s`, so towers may continue above the chart.
    pub s: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtChart {
    pub title: String,
    pub shift: i32,
    pub max_stem: i32,
    pub max_s: u32,
    pub classes: Vec<ChartClass>,
    pub lines: Vec<ChartLine>,
    pub truncated: Truncation,
}

/// Chart of `Ext(M ⊗ DN, F_2)`, cross-checked against the Hom complex
/// `Hom(F_*, N)` over a resolution of `M`.
pub fn build_chart(m: &FdModule, n: &FdModule, max_s: u32, max_stem: i32) -> Result<ExtChart, ChartError> {
    build_chart_with(m, n, max_s, max_stem, &mut |module, s, t| Ok(resolve(module, s, t)))
}

/// As [`build_chart`], with resolutions supplied by `resolver`, which must
/// return a resolution of its argument covering at least the requested
/// bounds (for example from a cache).
pub fn build_chart_with(
    m: &FdModule,
    n: &FdModule,
    max_s: u32,
    max_stem: i32,
    resolver: &mut dyn FnMut(&FdModule, u32, i32) -> Result<Resolution, ResolutionError>,
) -> Result<ExtChart, ChartError> {
    let title = format!("Ext({}, {})", m.name(), n.name());
    let product = m.tensor(&n.dual());
    let Some(shift) = product.min_degree() else {
        return Ok(ExtChart::empty(title, max_s, max_stem));
    };
    let max_t = max_stem + max_s as i32;
    let r = resolver(&product.normalized(), max_s, max_t)?;
    let table = r.ext_table();

    // Hom(F_*, N) in absolute degrees needs F_* of M through s + 1 and t + top(N).
    let n_top = n.max_degree().expect("N is nonzero when M ⊗ DN is");
    let rm = resolver(m, max_s + 1, max_t + shift + n_top)?;
    let hom = hom_complex_ext(&rm, n).shifted(-shift);
    let in_chart = |s: u32, t: i32| s <= max_s && t - (s as i32) <= max_stem;
    if let Some((s, t, duality, hom)) = table.first_difference(&hom, in_chart) {
        return Err(ChartError::OracleDisagreement {
            s,
            stem: t - s as i32,
            duality,
            hom,
        });
    }
    Ok(chart_from_resolution(&r, title, shift, max_s, max_stem))
}

/// Reads classes and h0/h1/h2 lines off a minimal resolution.
pub fn chart_from_resolution(r: &Resolution, title: String, shift: i32, max_s: u32, max_stem: i32) -> ExtChart {
    let mut chart = ExtChart::empty(title, max_s, max_stem);
    chart.shift = shift;
    let table = r.ext_table();
    let in_chart = |stem: i32, s: u32| s <= max_s && stem <= max_stem;
    for ((s, t), dim) in table.entries() {
        let stem = t - s as i32;
        if !in_chart(stem, s) {
            chart.truncated.stem |= s <= max_s && stem > max_stem;
            continue;
        }
        chart.truncated.s |= s == max_s;
        for index in 0..dim {
            chart.classes.push(ChartClass {
                stem,
                s,
                index,
                name: class_name(s, stem, index),
            });
        }
    }
    for kind in LineKind::ALL {
        let products = r.h_action(kind.power());
        let (dstem, ds) = kind.step();
        for ((s, t), m) in products.matrices() {
            let stem = t - s as i32;
            if !in_chart(stem, s) || !in_chart(stem + dstem, s + ds) {
                continue;
            }
            for row in 0..m.rows() {
                for col in 0..m.cols() {
                    if m.get(row, col) {
                        chart.lines.push(ChartLine {
                            kind,
                            from: (stem, s, col),
                            to: (stem + dstem, s + ds, row),
                        });
                    }
                }
            }
        }
    }
    chart.sort();
    chart
}

pub fn class_name(s: u32, stem: i32, index: usize) -> String {
    format!("x_{{{s},{stem},{index}}}")
}

impl ExtChart {
    pub fn empty(title: String, max_s: u32, max_stem: i32) -> Self {
        ExtChart {
            title,
            shift: 0,
            max_stem,
            max_s,
            classes: Vec::new(),
            lines: Vec::new(),
            truncated: Truncation::default(),
        }
    }

    fn sort(&mut self) {
        self.classes.sort_by_key(|c| (c.stem, c.s, c.index));
        self.lines.sort_by_key(|l| (l.from, l.kind, l.to));
    }

    pub fn count(&self, stem: i32, s: u32) -> usize {
        self.classes.iter().filter(|c| c.stem == stem && c.s == s).count()
    }

    pub fn counts(&self) -> BTreeMap<(i32, u32), usize> {
        let mut out = BTreeMap::new();
        for c in &self.classes {
            *out.entry((c.stem, c.s)).or_default() += 1;
        }
        out
    }

    pub fn class(&self, id: ClassId) -> Option<&ChartClass> {
        self.classes.iter().find(|c| c.id() == id)
    }

    pub fn find(&self, name: &str) -> Option<&ChartClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn lines_from(&self, id: ClassId, kind: LineKind) -> impl Iterator<Item = &ChartLine> {
        self.lines.iter().filter(move |l| l.from == id && l.kind == kind)
    }

    /// Renames classes; `aliases` maps a class position to its new name.
    /// Unknown positions are ignored.
    pub fn with_aliases<'a>(mut self, aliases: impl IntoIterator<Item = (ClassId, &'a str)>) -> Self {
        for (id, name) in aliases {
            if let Some(c) = self.classes.iter_mut().find(|c| c.id() == id) {
                c.name = name.to_string();
            }
        }
        self
    }

    /// Every line joins two classes of the chart with the right offset.
    pub fn check_lines(&self) -> Result<(), String> {
        for l in &self.lines {
            let (dstem, ds) = l.kind.step();
            if self.class(l.from).is_none() || self.class(l.to).is_none() {
                return Err(format!("{} line {:?} -> {:?} has a missing endpoint", l.kind.as_str(), l.from, l.to));
            }
            if l.to.0 - l.from.0 != dstem || l.to.1 - l.from.1 != ds {
                return Err(format!("{} line {:?} -> {:?} has the wrong offset", l.kind.as_str(), l.from, l.to));
            }
        }
        Ok(())
    }

    /// Per-bidegree dimensions in `table` (normalized `t`) equal the chart's counts.
    pub fn matches_table(&self, table: &ExtTable) -> bool {
        let counts = self.counts();
        let mut expected = BTreeMap::new();
        for ((s, t), d) in table.entries() {
            let stem = t - s as i32;
            if s <= self.max_s && stem <= self.max_stem {
                expected.insert((stem, s), d);
            }
        }
        counts == expected
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Svg => self.to_svg(),
            Format::Ascii => self.to_ascii(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("chart serializes");
        out.push('\n');
        out
    }

    /// Rows are filtrations from the top, columns are stems on the original
    /// axes. Up to three classes print as `*`, more as a count.
    pub fn to_ascii(&self) -> String {
        const W: usize = 4;
        let mut out = String::new();
        let _ = write!(out, "{:>3} |", "s");
        for stem in 0..=self.max_stem {
            let _ = write!(out, "{:>W$}", stem + self.shift);
        }
        out.push('\n');
        if self.classes.is_empty() {
            return out;
        }
        let counts = self.counts();
        let top = self.classes.iter().map(|c| c.s).max().unwrap_or(0);
        for s in (0..=top).rev() {
            let _ = write!(out, "{s:>3} |");
            for stem in 0..=self.max_stem {
                let cell = match counts.get(&(stem, s)).copied().unwrap_or(0) {
                    0 => ".".to_string(),
                    k if k <= 3 => "*".repeat(k),
                    k => k.to_string(),
                };
                let _ = write!(out, "{cell:>W$}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const UNIT: f64 = 30.0;
        const MARGIN: f64 = 40.0;
        const FAN: f64 = 6.0;
        let top = self.classes.iter().map(|c| c.s).max().unwrap_or(0).max(1);
        let width = MARGIN * 2.0 + UNIT * (self.max_stem.max(0) as f64 + 1.0);
        let height = MARGIN * 2.0 + UNIT * (top as f64 + 1.0);
        let counts = self.counts();
        let pos = |(stem, s, index): ClassId| {
            let k = counts.get(&(stem, s)).copied().unwrap_or(1) as f64;
            let x = MARGIN + UNIT * (stem as f64 + 0.5) + FAN * (index as f64 - (k - 1.0) / 2.0);
            let y = height - MARGIN - UNIT * (s as f64 + 0.5);
            (x, y)
        };

        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(
            out,
            r#"<style>.h0{{stroke:#000}} .h1{{stroke:#06c}} .h2{{stroke:#c00}} line{{stroke-width:1.2}} text{{font:10px sans-serif}}</style>"#
        );
        let _ = writeln!(out, r#"<g class="axes">"#);
        for stem in 0..=self.max_stem {
            let (x, _) = pos((stem, 0, 0));
            let x = x.max(0.0);
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                height - MARGIN / 3.0,
                stem + self.shift
            );
        }
        for s in 0..=top {
            let (_, y) = pos((0, s, 0));
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{s}</text>"#, MARGIN / 1.5, y + 3.0);
        }
        let _ = writeln!(out, "</g>");
        for l in &self.lines {
            let (x1, y1) = pos(l.from);
            let (x2, y2) = pos(l.to);
            let _ = writeln!(
                out,
                r#"<line class="{}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"/>"#,
                l.kind.as_str()
            );
        }
        for (&(stem, s), &k) in &counts {
            let _ = writeln!(out, r#"<g class="bidegree" data-stem="{stem}" data-s="{s}">"#);
            for index in 0..k {
                let (x, y) = pos((stem, s, index));
                let name = self.class((stem, s, index)).map_or(String::new(), |c| escape(&c.name));
                let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5"><title>{name}</title></circle>"#);
            }
            let _ = writeln!(out, "</g>");
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    #[test]
    fn sphere_chart() {
        let s = Fixture::Sphere.module();
        let c = build_chart(&s, &s, 6, 14).unwrap();
        for k in 0..=6 {
            assert_eq!(c.count(0, k), 1);
        }
        assert_eq!(c.count(1, 1), 1);
        assert_eq!((0..=6).map(|k| c.count(1, k)).sum::<usize>(), 1);
        assert_eq!((1..=3).map(|k| c.count(3, k)).sum::<usize>(), 3);
        assert_eq!(c.lines_from((3, 1, 0), LineKind::H0).count(), 1);
        assert_eq!(c.lines_from((3, 2, 0), LineKind::H0).count(), 1);
        assert!(c.truncated.s);
        c.check_lines().unwrap();
    }

    #[test]
    fn zero_chart() {
        let c = build_chart(&FdModule::zero("Z"), &Fixture::X.module(), 4, 10).unwrap();
        assert!(c.classes.is_empty() && c.lines.is_empty());
        assert_eq!(c.to_ascii().lines().count(), 1);
    }

    #[test]
    fn json_has_unit_class() {
        let s = Fixture::Sphere.module();
        let json = build_chart(&s, &s, 3, 5).unwrap().to_json();
        assert!(json.contains("\"stem\": 0,\n      \"s\": 0,\n      \"index\": 0"));
        let keys = ["\"title\"", "\"shift\"", "\"max_stem\"", "\"max_s\"", "\"classes\"", "\"lines\"", "\"truncated\""];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ascii_uses_counts_above_three() {
        let mut c = ExtChart::empty("t".into(), 2, 1);
        for index in 0..4 {
            c.classes.push(ChartClass { stem: 1, s: 0, index, name: class_name(0, 1, index) });
        }
        c.classes.push(ChartClass { stem: 0, s: 1, index: 0, name: class_name(1, 0, 0) });
        let text = c.to_ascii();
        assert!(text.lines().nth(2).unwrap().ends_with("   4"));
        assert!(text.lines().nth(1).unwrap().ends_with("   *   ."));
    }

    #[test]
    fn format_parse() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("pdf".parse::<Format>().is_err());
    }
}
