//! Renderings of how a Hirzebruch–Zagier curve `F̃_m` meets the resolution
//! chains over the cusp of `Z̃(N, r)`.
//!
//! Each cusp of `X₀(m)` contributes one block: the chain `E₀, C₁, …, C_ℓ,
//! E_{ℓ+1}` with the self-intersections `−cᵢ` of the inner curves, and a mark
//! carrying the multiplicity `mᵢ` on every curve that `F̃_m` meets. The two
//! ends `E₀` and `E_{ℓ+1}` are the cusp fibres. Blocks whose multiplicities
//! are not determined by the width equations carry an "ambiguous" marker.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::surface::{fm_cusp_incidence, CuspIncidence, Level};

/// Output syntax of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagramFormat {
    /// Plain text, one block per cusp.
    Text,
    /// Graphviz source.
    Dot,
    /// A standalone SVG document.
    Svg,
}

/// The incidence data of `F̃_m` on `Z̃(N, r)`, ready to render.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceDiagram {
    /// The level.
    pub level: Level,
    /// The index `m`.
    pub m: u64,
    /// One entry per cusp of `X₀(m)`.
    pub cusps: Vec<CuspIncidence>,
}

impl IncidenceDiagram {
    /// Computes the incidence data.
    pub fn new(level: Level, m: u64) -> Result<Self> {
        Ok(Self {
            level,
            m,
            cusps: fm_cusp_incidence(&level, m)?,
        })
    }

    /// True when some cusp admits several multiplicity solutions.
    pub fn is_ambiguous(&self) -> bool {
        self.cusps.iter().any(|c| !c.is_unique())
    }

    /// Renders in the requested syntax.
    pub fn render(&self, format: DiagramFormat) -> String {
        match format {
            DiagramFormat::Text => self.to_text(),
            DiagramFormat::Dot => self.to_dot(),
            DiagramFormat::Svg => self.to_svg(),
        }
    }

    fn title(&self) -> String {
        format!("F~_{} on Z~({},{})", self.m, self.level.n, self.level.r)
    }

    /// The plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title());
        for inc in &self.cusps {
            let l = inc.chain.chain.len();
            let _ = writeln!(
                out,
                "cusp {} (width {}, Fricke width {}) meets chain ({},{}) = {}",
                inc.cusp,
                inc.cusp.width,
                inc.fricke_width,
                inc.chain.sing.d,
                inc.chain.sing.q,
                inc.chain.chain
            );
            let names: Vec<String> = (0..=l + 1).map(|i| node_label(inc, i)).collect();
            let _ = writeln!(out, "  {}", names.join(" --- "));
            match inc.multiplicities() {
                Some(v) => {
                    let marks: Vec<String> = v
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x > 0)
                        .map(|(i, x)| format!("{} x{x}", node_name(i, l)))
                        .collect();
                    let _ = writeln!(out, "  marks: {}", marks.join(", "));
                }
                None => {
                    let sols: Vec<String> =
                        inc.solutions.iter().map(|v| format!("{v:?}")).collect();
                    let _ = writeln!(
                        out,
                        "  ambiguous: {} solutions {}",
                        sols.len(),
                        sols.join(" ")
                    );
                }
            }
        }
        out
    }

    /// The Graphviz rendering: one cluster per cusp, chains drawn left to right.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph incidence {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  label=\"{}\";", self.title());
        for (k, inc) in self.cusps.iter().enumerate() {
            let l = inc.chain.chain.len();
            let _ = writeln!(out, "  subgraph cluster_{k} {{");
            let ambiguous = if inc.is_unique() { "" } else { " ambiguous" };
            let _ = writeln!(out, "    label=\"cusp {}{ambiguous}\";", inc.cusp);
            for i in 0..=l + 1 {
                let shape = if i == 0 || i == l + 1 {
                    "box"
                } else {
                    "circle"
                };
                let _ = writeln!(
                    out,
                    "    c{k}_{i} [label=\"{}\", shape={shape}];",
                    node_label(inc, i)
                );
            }
            for i in 0..=l {
                let _ = writeln!(out, "    c{k}_{i} -- c{k}_{};", i + 1);
            }
            let _ = writeln!(out, "    f{k} [label=\"F~_{}\", shape=plaintext];", self.m);
            match inc.multiplicities() {
                Some(v) => {
                    for (i, &x) in v.iter().enumerate().filter(|(_, &x)| x > 0) {
                        let _ =
                            writeln!(out, "    f{k} -- c{k}_{i} [label=\"x{x}\", style=dashed];");
                    }
                }
                None => {
                    let _ = writeln!(out, "    f{k} [label=\"F~_{} ambiguous\"];", self.m);
                }
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }

    /// The SVG rendering: one horizontal row per cusp, marks as labelled ticks.
    pub fn to_svg(&self) -> String {
        const STEP: usize = 70;
        const ROW: usize = 90;
        const MARGIN: usize = 40;
        let longest = self
            .cusps
            .iter()
            .map(|c| c.chain.chain.len() + 2)
            .max()
            .unwrap_or(2);
        let width = 2 * MARGIN + STEP * (longest - 1) + 160;
        let height = MARGIN + ROW * self.cusps.len() + 10;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
             font-family=\"monospace\" font-size=\"11\">\n"
        );
        let _ = writeln!(
            out,
            "  <text x=\"{MARGIN}\" y=\"20\">{}</text>",
            escape(&self.title())
        );
        for (k, inc) in self.cusps.iter().enumerate() {
            let l = inc.chain.chain.len();
            let y = MARGIN + ROW * k + 40;
            let x_of = |i: usize| MARGIN + STEP * i;
            let _ = writeln!(
                out,
                "  <line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>",
                x_of(0),
                x_of(l + 1)
            );
            for i in 0..=l + 1 {
                let x = x_of(i);
                if i == 0 || i == l + 1 {
                    let _ = writeln!(
                        out,
                        "  <rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"white\" stroke=\"black\"/>",
                        x - 6,
                        y - 6
                    );
                } else {
                    let _ = writeln!(
                        out,
                        "  <circle cx=\"{x}\" cy=\"{y}\" r=\"6\" fill=\"white\" stroke=\"black\"/>"
                    );
                }
                let _ = writeln!(
                    out,
                    "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                    y + 22,
                    escape(&node_label(inc, i))
                );
            }
            let _ = writeln!(
                out,
                "  <text x=\"{}\" y=\"{}\">cusp {} {}</text>",
                x_of(l + 1) + 20,
                y + 4,
                inc.cusp,
                if inc.is_unique() { "" } else { "ambiguous" }
            );
            if let Some(v) = inc.multiplicities() {
                for (i, &x) in v.iter().enumerate().filter(|(_, &x)| x > 0) {
                    let cx = x_of(i);
                    let _ = writeln!(
                        out,
                        "  <line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"red\"/>",
                        y - 24,
                        y - 8
                    );
                    let _ = writeln!(
                        out,
                        "  <text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" fill=\"red\">x{x}</text>",
                        y - 28
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn node_name(i: usize, l: usize) -> String {
    if i == 0 || i == l + 1 {
        format!("E{i}")
    } else {
        format!("C{i}")
    }
}

fn node_label(inc: &CuspIncidence, i: usize) -> String {
    let l = inc.chain.chain.len();
    if i == 0 || i == l + 1 {
        node_name(i, l)
    } else {
        format!("C{i}({})", -(inc.chain.chain.coefficients[i - 1] as i64))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
