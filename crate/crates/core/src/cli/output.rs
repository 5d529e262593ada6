//! CSV and SVG encodings of phase-space fields.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{PhaseSpaceField, SupportBox, TorusGrid};
use crate::uncertainty::report::format_float;

/// Columns `m0.., w0.., re, im, abs`, one row per lattice point and node; `w` is the node `j/M`.
pub fn write_field_csv(field: &PhaseSpaceField, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    let n = field.dim();
    let header: Vec<String> = (0..n)
        .map(|i| format!("m{i}"))
        .chain((0..n).map(|i| format!("w{i}")))
        .chain(["re", "im", "abs"].map(String::from))
        .collect();
    w.write_record(&header).map_err(|e| io_error(path, e))?;
    let lattice = field.lattice();
    let grid = field.grid();
    for r in 0..lattice.len() {
        let m = lattice.coords_of(r);
        for (j, v) in field.row(r).iter().enumerate() {
            let mut rec: Vec<String> = m.iter().map(|c| c.to_string()).collect();
            rec.extend(grid.node(j).into_iter().map(format_float));
            rec.extend([format_float(v.re), format_float(v.im), format_float(v.norm())]);
            w.write_record(&rec).map_err(|e| io_error(path, e))?;
        }
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Reads a field written by [`write_field_csv`]; the lattice box and grid are inferred.
pub fn read_field_csv(path: &Path) -> Result<PhaseSpaceField> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let header = rdr.headers().map_err(|e| io_error(path, e))?.clone();
    let cols = header.len();
    if cols < 5 || (cols - 3) % 2 != 0 {
        return Err(input(path, format!("expected columns m0.., w0.., re, im, abs; got {cols} columns")));
    }
    let n = (cols - 3) / 2;
    for i in 0..n {
        if header.get(i) != Some(&format!("m{i}")) || header.get(n + i) != Some(&format!("w{i}")) {
            return Err(input(path, "header must read m0.., w0.., re, im, abs".into()));
        }
    }
    let mut rows = Vec::new();
    let mut nodes = BTreeSet::new();
    let mut reach = 0u64;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| io_error(path, e))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| input(path, format!("row {}: column {} is not a number", line + 2, header[i].to_string())))
        };
        let m: Vec<i64> = (0..n)
            .map(|i| {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<i64>().ok())
                    .ok_or_else(|| input(path, format!("row {}: m{i} is not an integer", line + 2)))
            })
            .collect::<Result<_>>()?;
        reach = reach.max(m.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0));
        let w: Vec<f64> = (0..n).map(|i| num(n + i)).collect::<Result<_>>()?;
        nodes.insert(w[0].to_bits());
        rows.push((m, w, Complex64::new(num(2 * n)?, num(2 * n + 1)?)));
    }
    let points = nodes.len();
    let lattice = SupportBox::new(n, reach as usize);
    let grid = TorusGrid::new(n, points.max(1));
    if rows.len() != lattice.len() * grid.len() {
        return Err(input(
            path,
            format!("expected {} rows for a full field, found {}", lattice.len() * grid.len(), rows.len()),
        ));
    }
    let mut field = PhaseSpaceField::zeros(lattice, grid);
    let mut seen = vec![false; lattice.len() * grid.len()];
    for (m, w, v) in rows {
        let r = lattice.linear_index(&m).expect("inside inferred box");
        let idx: Vec<usize> = w
            .iter()
            .map(|x| ((x * points as f64).round() as usize) % points)
            .collect();
        let slot = r * grid.len() + grid.linear_of(&idx);
        if seen[slot] {
            return Err(input(path, format!("duplicate entry at m = {m:?}, w = {w:?}")));
        }
        seen[slot] = true;
        field.values_mut()[slot] = v;
    }
    Ok(field)
}

/// Heat map of `|V|` with one row per `m`; one-dimensional fields only.
pub fn write_field_svg(field: &PhaseSpaceField, path: &Path) -> Result<()> {
    if field.dim() != 1 {
        return Err(Error::InvalidParameter("SVG output needs a one-dimensional field".into()));
    }
    let lattice = field.lattice();
    let points = field.grid().points_per_axis();
    let cell = (512 / points).clamp(2, 16);
    let rows = lattice.len();
    let peak = field.norm_inf().max(f64::MIN_POSITIVE);
    let mut svg = String::new();
    let (width, height) = (points * cell, rows * cell);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    for r in 0..rows {
        // Larger m at the top.
        let y = (rows - 1 - r) * cell;
        for (j, v) in field.row(r).iter().enumerate() {
            let t = v.norm() / peak;
            let (red, green, blue) = ramp(t);
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{y}" width="{cell}" height="{cell}" fill="rgb({red},{green},{blue})"/>"#,
                j * cell
            );
        }
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| io_error(path, e))
}

fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    (lerp(20.0, 250.0), lerp(20.0, 220.0), lerp(80.0, 40.0))
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("{}: {e}", path.display()))
}

fn input(path: &Path, msg: String) -> Error {
    Error::InvalidParameter(format!("{}: {msg}", path.display()))
}
