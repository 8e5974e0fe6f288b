//! Serialization of sweep results: the CSV interchange format, its parser,
//! and static SVG renderings of fringe and visibility curves.
//!
//! The CSV layout is a compatibility contract: header
//! `phi_rad,mirror_um,pair,p_joint,p_conditional,counts`, one row per
//! (phase point, pair), floats at 17 significant digits, LF line endings.
//! Identical inputs always produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::protocol::{FringeRecord, PairId, PairProbability, VisibilityPoint};

pub const FRINGE_CSV_HEADER: &str = "phi_rad,mirror_um,pair,p_joint,p_conditional,counts";
pub const VISIBILITY_CSV_HEADER: &str = "alpha_sq,pair,visibility,degenerate";

/// 17 significant digits, enough to round-trip any f64 exactly.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(line: usize, msg: impl Into<String>) -> Error {
    Error::CsvParse { line, msg: msg.into() }
}

fn parse_f64(field: &str, line: usize, name: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| csv_err(line, format!("field {name} is not a number: {field:?}")))
}

pub fn fringe_csv_string(records: &[FringeRecord]) -> String {
    let mut out = String::with_capacity(64 * (1 + 4 * records.len()));
    out.push_str(FRINGE_CSV_HEADER);
    out.push('\n');
    for record in records {
        for pair in PairId::ALL {
            let p = record.pair(pair);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_float(record.phi),
                fmt_float(record.mirror_um),
                pair.label(),
                fmt_float(p.joint),
                fmt_float(p.conditional),
                p.counts,
            );
        }
    }
    out
}

pub fn write_fringe_csv(path: &Path, records: &[FringeRecord]) -> Result<()> {
    std::fs::write(path, fringe_csv_string(records))?;
    Ok(())
}

/// Inverse of [`fringe_csv_string`]. Rows are grouped into records by their
/// (phi, mirror) columns; every group must contain each pair exactly once.
pub fn parse_fringe_csv(text: &str) -> Result<Vec<FringeRecord>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().ok_or_else(|| csv_err(1, "empty input"))?.1;
    if header.trim_end() != FRINGE_CSV_HEADER {
        return Err(csv_err(1, format!("expected header {FRINGE_CSV_HEADER:?}")));
    }

    struct Group {
        phi: f64,
        mirror_um: f64,
        slots: [Option<PairProbability>; 4],
    }

    let close = |group: Group, line: usize| -> Result<FringeRecord> {
        let mut pairs = Vec::with_capacity(4);
        for (slot, pair) in group.slots.into_iter().zip(PairId::ALL) {
            pairs.push(slot.ok_or_else(|| {
                csv_err(line, format!("phase point is missing pair {}", pair.label()))
            })?);
        }
        Ok(FringeRecord {
            phi: group.phi,
            mirror_um: group.mirror_um,
            pairs: pairs.try_into().expect("four slots"),
        })
    };

    let mut records = Vec::new();
    let mut current: Option<Group> = None;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 6 {
            return Err(csv_err(line_no, format!("expected 6 fields, got {}", fields.len())));
        }
        let phi = parse_f64(fields[0], line_no, "phi_rad")?;
        let mirror_um = parse_f64(fields[1], line_no, "mirror_um")?;
        let pair = PairId::parse(fields[2])
            .map_err(|_| csv_err(line_no, format!("unknown pair {:?}", fields[2])))?;
        let joint = parse_f64(fields[3], line_no, "p_joint")?;
        let conditional = parse_f64(fields[4], line_no, "p_conditional")?;
        let counts: u64 = fields[5]
            .parse()
            .map_err(|_| csv_err(line_no, format!("counts is not an integer: {:?}", fields[5])))?;

        let same_point = current.as_ref().is_some_and(|g| {
            g.phi.to_bits() == phi.to_bits() && g.mirror_um.to_bits() == mirror_um.to_bits()
        });
        if !same_point {
            if let Some(group) = current.take() {
                records.push(close(group, line_no)?);
            }
            current = Some(Group { phi, mirror_um, slots: [None; 4] });
        }
        let group = current.as_mut().expect("group opened above");
        if group.slots[pair.index()].is_some() {
            return Err(csv_err(line_no, format!("duplicate pair {} at this point", pair.label())));
        }
        group.slots[pair.index()] =
            Some(PairProbability { pair, joint, conditional, counts });
    }
    if let Some(group) = current.take() {
        let last = text.lines().count();
        records.push(close(group, last)?);
    }
    if records.is_empty() {
        return Err(csv_err(1, "no data rows"));
    }
    Ok(records)
}

pub fn visibility_csv_string(points: &[VisibilityPoint], pair: PairId) -> String {
    let mut out = String::new();
    out.push_str(VISIBILITY_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(p.alpha_sq),
            pair.label(),
            fmt_float(p.visibility),
            p.degenerate,
        );
    }
    out
}

pub fn write_visibility_csv(path: &Path, points: &[VisibilityPoint], pair: PairId) -> Result<()> {
    std::fs::write(path, visibility_csv_string(points, pair))?;
    Ok(())
}

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PAIR_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN_L + (v - self.x_min) / span * (PLOT_W - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        PLOT_H - MARGIN_B - (v - self.y_min) / span * (PLOT_H - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(out, "<rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>",
        MARGIN_L + (PLOT_W - MARGIN_L - MARGIN_R) / 2.0
    );
}

fn svg_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#444\"/>",
        x1 - x0,
        y0 - y1
    );
    for i in 0..=4 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let px = frame.x(fx);
        let py = frame.y(fy);
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{fx:.3}</text>",
            y0 + 20.0
        );
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"#444\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{fy:.3}</text>",
            x0 - 9.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        PLOT_H - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn svg_polyline(out: &mut String, frame: &Frame, series: &[(f64, f64)], color: &str) {
    if series.len() < 2 {
        for &(x, y) in series {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                frame.x(x),
                frame.y(y)
            );
        }
        return;
    }
    let mut points = String::new();
    for &(x, y) in series {
        let _ = write!(points, "{:.2},{:.2} ", frame.x(x), frame.y(y));
    }
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>",
        points.trim_end()
    );
}

fn svg_legend(out: &mut String, entries: &[(&str, &str)]) {
    let x = PLOT_W - MARGIN_R + 18.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN_T + 16.0 + i as f64 * 20.0;
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.8\"/>",
            x + 24.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\">{label}</text>",
            x + 30.0,
            y + 4.0
        );
    }
}

/// Coincidence fringes for all four pairs, conditional probability when
/// `joint` is false.
pub fn fringe_svg(records: &[FringeRecord], joint: bool) -> String {
    let value = |p: &PairProbability| if joint { p.joint } else { p.conditional };
    let x_min = records.iter().map(|r| r.phi).fold(f64::INFINITY, f64::min);
    let x_max = records.iter().map(|r| r.phi).fold(f64::NEG_INFINITY, f64::max);
    let y_max = records
        .iter()
        .flat_map(|r| r.pairs.iter().map(value))
        .fold(0.0_f64, f64::max);
    let frame = Frame {
        x_min: if records.is_empty() { 0.0 } else { x_min },
        x_max: if records.is_empty() { 1.0 } else { x_max },
        y_min: 0.0,
        y_max: (y_max * 1.05).max(1e-9),
    };

    let mut out = String::new();
    svg_open(&mut out, "coincidence fringes");
    let y_label = if joint { "joint probability" } else { "conditional probability" };
    svg_axes(&mut out, &frame, "phase (rad)", y_label);
    let mut legend = Vec::new();
    for pair in PairId::ALL {
        let series: Vec<(f64, f64)> =
            records.iter().map(|r| (r.phi, value(r.pair(pair)))).collect();
        svg_polyline(&mut out, &frame, &series, PAIR_COLORS[pair.index()]);
        legend.push((pair.label(), PAIR_COLORS[pair.index()]));
    }
    svg_legend(&mut out, &legend);
    out.push_str("</svg>\n");
    out
}

/// Visibility against input weight for one pair; degenerate points (fringe
/// amplitude at numerical zero) break the curve instead of plotting.
pub fn visibility_svg(points: &[VisibilityPoint], pair: PairId) -> String {
    let frame = Frame { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.05 };
    let mut out = String::new();
    svg_open(&mut out, "fringe visibility");
    svg_axes(&mut out, &frame, "input weight", "visibility");
    let color = PAIR_COLORS[pair.index()];
    let mut segment: Vec<(f64, f64)> = Vec::new();
    for p in points {
        if p.degenerate {
            svg_polyline(&mut out, &frame, &segment, color);
            segment.clear();
        } else {
            segment.push((p.alpha_sq, p.visibility));
        }
    }
    svg_polyline(&mut out, &frame, &segment, color);
    svg_legend(&mut out, &[(pair.label(), color)]);
    out.push_str("</svg>\n");
    out
}
