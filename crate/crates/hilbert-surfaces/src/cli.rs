//! The `hilbert-surfaces` command line tool.
//!
//! Reports go to standard output and every diagnostic goes to standard
//! error. Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 missing base data, 4 resource guard.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arith::units;
use crate::diagram::{DiagramFormat, IncidenceDiagram};
use crate::error::{domain, Error, Result};
use crate::gl2::{verify_involution_classes, MAX_ENUMERATION_LEVEL};
use crate::hj::{fiber_multiplicities, hj_expansion, SingularityType};
use crate::modular_curves::verify_family_signatures;
use crate::surface::{
    classify_w, classify_z, invariant_table, level_report, square_class_representative, BaseData,
    InvariantRow, Level, LevelReport,
};

/// Output syntax selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// JSON.
    Json,
    /// Comma separated values.
    Csv,
    /// A Markdown table.
    Markdown,
    /// Plain text.
    Text,
    /// Scalable vector graphics.
    Svg,
    /// Graphviz source.
    Dot,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_possible_value() {
            Some(v) => f.write_str(v.get_name()),
            None => Ok(()),
        }
    }
}

/// Which surface `classify` reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceChoice {
    /// The Hilbert modular surface `Z(N, r)`.
    Z,
    /// The symmetric quotient `W(N, r)`.
    W,
}

/// Invariants and classification of the surfaces `Z(N, r)` and `W(N, r)`.
#[derive(Debug, Parser)]
#[command(name = "hilbert-surfaces", version, about)]
pub struct Cli {
    /// The command to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands of the tool.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full invariant report for one level.
    Invariants {
        /// The level N.
        n: u64,
        /// The determinant class r, a unit modulo N.
        #[arg(allow_negative_numbers = true)]
        r: i64,
        /// One of json, csv, markdown.
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// CSV file with columns N,r,pg_Z,c1sq_Z extending the bundled data.
        #[arg(long)]
        base_data: Option<PathBuf>,
    },
    /// The invariants table for every level in a range.
    Table {
        /// Smallest level.
        min: u64,
        /// Largest level.
        max: u64,
        /// One of json, csv, markdown.
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutputFormat,
        /// CSV file with columns N,r,pg_Z,c1sq_Z extending the bundled data.
        #[arg(long)]
        base_data: Option<PathBuf>,
    },
    /// Enriques-Kodaira class of Z(N, r) or W(N, r).
    Classify {
        /// The level N.
        n: u64,
        /// The determinant class r.
        #[arg(allow_negative_numbers = true)]
        r: i64,
        /// Which surface.
        #[arg(long, value_enum, default_value = "w")]
        surface: SurfaceChoice,
    },
    /// Resolution chain of a cyclic quotient singularity of type (d, q).
    Resolve {
        /// Order of the cyclic group.
        d: u64,
        /// Weight, a unit modulo d.
        #[arg(allow_negative_numbers = true)]
        q: i64,
        /// Also print the cusp fibre multiplicities at this level.
        #[arg(long)]
        level: Option<u64>,
    },
    /// How the curve F_m meets the resolution chains over the cusp.
    Diagram {
        /// The level N.
        n: u64,
        /// The determinant class r.
        #[arg(allow_negative_numbers = true)]
        r: i64,
        /// The index m.
        m: u64,
        /// One of text, dot, svg.
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write to this file instead of standard output.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Compare closed forms with brute-force enumeration for every level up to a bound.
    OracleVerify {
        /// Largest level checked.
        #[arg(long, default_value_t = 21)]
        max_level: u64,
    },
}

/// Maps an error to the documented exit code.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Consistency(_) => 1,
        Error::Domain(_) => 2,
        Error::Data(_) => 3,
        Error::Resource(_) => 4,
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Runs one command, writing the report to `out`.
pub fn run(command: &Command, out: &mut dyn std::io::Write) -> Result<()> {
    let text = match command {
        Command::Invariants {
            n,
            r,
            format,
            base_data,
        } => {
            let base = load_base(base_data.as_ref())?;
            let level = normalised_level(*n, *r)?;
            render_report(&level_report(&level, &base)?, tabular(*format)?)?
        }
        Command::Table {
            min,
            max,
            format,
            base_data,
        } => {
            let base = load_base(base_data.as_ref())?;
            render_table(&invariant_table(*min, *max, &base)?, tabular(*format)?)?
        }
        Command::Classify { n, r, surface } => {
            let level = normalised_level(*n, *r)?;
            let base = BaseData::bundled();
            let (name, class) = match surface {
                SurfaceChoice::Z => ("Z", classify_z(&level, &base)?),
                SurfaceChoice::W => ("W", classify_w(&level, &base)?),
            };
            format!("{name}{level}: {class} (kappa {})\n", class.kappa())
        }
        Command::Resolve { d, q, level } => render_resolution(*d, *q, *level)?,
        Command::Diagram {
            n,
            r,
            m,
            format,
            output,
        } => {
            let level = normalised_level(*n, *r)?;
            let diagram = IncidenceDiagram::new(level, *m)?;
            if diagram.is_ambiguous() {
                eprintln!("warning: some cusp multiplicities are ambiguous; marked in the output");
            }
            let rendered = diagram.render(diagram_format(*format)?);
            if let Some(path) = output {
                std::fs::write(path, rendered)
                    .map_err(|e| domain!("cannot write {}: {e}", path.display()))?;
                String::new()
            } else {
                rendered
            }
        }
        Command::OracleVerify { max_level } => oracle_verify(*max_level)?,
    };
    out.write_all(text.as_bytes())
        .map_err(|e| domain!("cannot write output: {e}"))
}

fn load_base(path: Option<&PathBuf>) -> Result<BaseData> {
    match path {
        Some(p) => BaseData::with_override(p),
        None => Ok(BaseData::bundled()),
    }
}

fn normalised_level(n: u64, r: i64) -> Result<Level> {
    let raw = Level::with_representative(n, r)?;
    let level = Level::new(n, r)?;
    if raw.r != level.r || r != level.ri() {
        eprintln!(
            "note: r = {r} normalised to r = {} (same square class modulo {n})",
            level.r
        );
    }
    Ok(level)
}

fn tabular(format: OutputFormat) -> Result<OutputFormat> {
    match format {
        OutputFormat::Json | OutputFormat::Csv | OutputFormat::Markdown => Ok(format),
        other => Err(domain!(
            "format {other} is not available for tables; use json, csv or markdown"
        )),
    }
}

fn diagram_format(format: OutputFormat) -> Result<DiagramFormat> {
    match format {
        OutputFormat::Text => Ok(DiagramFormat::Text),
        OutputFormat::Dot => Ok(DiagramFormat::Dot),
        OutputFormat::Svg => Ok(DiagramFormat::Svg),
        other => Err(domain!(
            "format {other} is not available for diagrams; use text, dot or svg"
        )),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Consistency(format!("serialisation failed: {e}")))
}

/// Column headers of the invariants table in Markdown.
pub const MARKDOWN_HEADERS: [&str; 9] = [
    "N",
    "r",
    "p_g(Z)",
    "κ(Z)",
    "p_g(W)",
    "K_W̄·C̄_∞",
    "K_W²",
    "K²_small",
    "κ(W)",
];

const CSV_HEADERS: [&str; 9] = [
    "N",
    "r",
    "pg_Z",
    "kappa_Z",
    "pg_W",
    "KWbar_Cinf",
    "KW_sq",
    "Ksmall_sq",
    "kappa_W",
];

fn row_cells(row: &InvariantRow) -> [String; 9] {
    [
        row.n.to_string(),
        row.r.to_string(),
        row.pg_z.to_string(),
        row.kappa_z.to_string(),
        row.pg_w.to_string(),
        row.kwbar_cinf.to_string(),
        row.kw_sq.to_string(),
        row.ksmall_sq.map(|v| v.to_string()).unwrap_or_default(),
        row.kappa_w.to_string(),
    ]
}

fn markdown_line(cells: &[String]) -> String {
    format!("| {} |\n", cells.join(" | "))
}

/// Renders table rows as JSON, CSV or Markdown.
pub fn render_table(rows: &[InvariantRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| Error::Consistency(format!("csv output failed: {e}"));
            writer.write_record(CSV_HEADERS).map_err(fail)?;
            for row in rows {
                writer.write_record(row_cells(row)).map_err(fail)?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Error::Consistency(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Consistency(e.to_string()))
        }
        OutputFormat::Markdown => {
            let headers: Vec<String> = MARKDOWN_HEADERS.iter().map(|s| s.to_string()).collect();
            let mut out = markdown_line(&headers);
            out.push_str(&format!("|{}\n", "---|".repeat(MARKDOWN_HEADERS.len())));
            for row in rows {
                out.push_str(&markdown_line(&row_cells(row)));
            }
            Ok(out)
        }
        other => Err(domain!("format {other} is not available for tables")),
    }
}

fn render_report(report: &LevelReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => render_table(std::slice::from_ref(&report.row), format),
        OutputFormat::Markdown => {
            let mut out = render_table(std::slice::from_ref(&report.row), format)?;
            let _ = writeln!(out, "\nZ: {}, W: {}\n", report.class_z, report.class_w);
            out.push_str("| singularity | count |\n|---|---|\n");
            for (sing, count) in report.census.entries() {
                let _ = writeln!(out, "| {sing} | {count} |");
            }
            out.push_str(
                "\n| fixed curve | index | e2 | e3 | cusps | genus | components | K.F | in S |\n",
            );
            out.push_str("|---|---|---|---|---|---|---|---|---|\n");
            for c in &report.fixed_points.components {
                let s = c.signature;
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    c.family,
                    s.index,
                    s.e2,
                    s.e3,
                    s.cusps,
                    s.genus,
                    s.components,
                    c.k_dot,
                    c.in_support_s
                );
            }
            let p = report.fixed_points.isolated;
            let _ = writeln!(
                out,
                "\nisolated fixed points: P1 {}, P2 {}, P3 {}, P_inf {}",
                p.p1, p.p2, p.p3, p.p_inf
            );
            let _ = writeln!(
                out,
                "s21 {}, s32 {}",
                report.fixed_points.s21, report.fixed_points.s32
            );
            let _ = writeln!(
                out,
                "blow-down deltas: dK2 {}, dKF {}",
                report.deltas.0, report.deltas.1
            );
            let _ = writeln!(
                out,
                "frak m: {} from m in {:?}",
                report.frak_m, report.frak_m_levels
            );
            Ok(out)
        }
        other => Err(domain!("format {other} is not available for reports")),
    }
}

fn render_resolution(d: u64, q: i64, level: Option<u64>) -> Result<String> {
    let sing = SingularityType::new(d, q)?;
    let chain = hj_expansion(d, q)?;
    let mut out = format!(
        "type {sing}: {} self-intersections {:?}\n",
        chain,
        chain.self_intersections()
    );
    if let Some(n) = level {
        let fc = fiber_multiplicities(n, sing)?;
        let _ = writeln!(out, "level {n}: a = {:?}", fc.mult_j);
        let _ = writeln!(out, "level {n}: a' = {:?}", fc.mult_jprime);
    }
    Ok(out)
}

/// Runs both closed-form versus enumeration comparisons for every level
/// `2 ≤ N ≤ max_level` and every square class `r`, returning the report.
pub fn oracle_verify(max_level: u64) -> Result<String> {
    if max_level > MAX_ENUMERATION_LEVEL {
        return Err(Error::Resource(format!(
            "oracle-verify is limited to N <= {MAX_ENUMERATION_LEVEL}, got {max_level}"
        )));
    }
    let mut out = String::new();
    let (mut class_checks, mut signature_checks, mut rejected) = (0usize, 0usize, 0usize);
    for n in 2..=max_level {
        let mut reps: Vec<u64> = units(n)
            .into_iter()
            .map(|r| square_class_representative(n, r))
            .collect();
        reps.sort_unstable();
        reps.dedup();
        for r in reps {
            verify_involution_classes(n, r as i64)?;
            let sig = verify_family_signatures(n, r as i64)?;
            class_checks += 1;
            signature_checks += sig.checked;
            rejected += sig.rejected;
            let _ = writeln!(
                out,
                "N={n} r={r}: classes ok, signatures checked {}, rejected {}",
                sig.checked, sig.rejected
            );
        }
    }
    let _ = writeln!(
        out,
        "total: {class_checks} class lists, {signature_checks} (N,r,family) signature checks, {rejected} rejected"
    );
    Ok(out)
}
