//! Plain-text artifact formats and atomic file writes.
//!
//! Floating-point values are written with 17 significant digits, so every
//! file parses back to the exact in-memory values.
//!
//! Sinogram CSV: a header line
//! `# sinogram kind=raw angles=A offsets=P theta0=… dtheta=… p0=… dp=… aperture=…`
//! followed by one comma-separated row per angle.
//!
//! Moment CSV: `# moments K=…`, then `a1,a2,value` lines ordered by total
//! degree.
//!
//! Reconstruction CSV: `# recon N=… m=… n=…`, then one row per `x₂` index.
//! PGM: plain P2 with max value 255, top row at `x₂ = 1`, and the affine
//! scale recorded in comment lines.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::density_recon::ReconGrid;
use crate::error::{Error, Result};
use crate::numerics::quadrature::Grid1D;
use crate::phantoms::MomentTable;
use crate::projector::{Sinogram, SinogramKind};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::domain(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_header<'a>(what: &'static str, line: Option<&'a str>, tag: &str) -> Result<HashMap<&'a str, &'a str>> {
    let line = line.ok_or_else(|| Error::format(what, "empty file"))?;
    let rest = line
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|l| l.strip_prefix(tag))
        .ok_or_else(|| Error::format(what, format!("header must start with '# {tag}'")))?;
    let mut fields = HashMap::new();
    for token in rest.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::format(what, format!("header token '{token}' is not key=value")))?;
        if fields.insert(k, v).is_some() {
            return Err(Error::format(what, format!("duplicate header key '{k}'")));
        }
    }
    Ok(fields)
}

fn field<T: std::str::FromStr>(what: &'static str, fields: &HashMap<&str, &str>, key: &str) -> Result<T> {
    let raw = fields
        .get(key)
        .ok_or_else(|| Error::format(what, format!("header lacks '{key}'")))?;
    raw.parse()
        .map_err(|_| Error::format(what, format!("header value {key}={raw} does not parse")))
}

fn parse_row(what: &'static str, line: &str, expected: usize, lineno: usize) -> Result<Vec<f64>> {
    let values = line
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::format(what, format!("line {lineno}: '{}' is not a number", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::format(
            what,
            format!("line {lineno}: expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn format_sinogram(s: &Sinogram) -> String {
    let (a, p) = (s.angles(), s.offsets());
    let mut out = format!(
        "# sinogram kind={} angles={} offsets={} theta0={} dtheta={} p0={} dp={} aperture={}\n",
        s.kind().name(),
        a.count(),
        p.count(),
        num(a.start()),
        num(a.spacing()),
        num(p.start()),
        num(p.spacing()),
        num(s.aperture())
    );
    for row in s.rows() {
        let line: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_sinogram(text: &str) -> Result<Sinogram> {
    const WHAT: &str = "sinogram file";
    let fields = parse_header(WHAT, text.lines().next(), "sinogram")?;
    let kind_name: String = field(WHAT, &fields, "kind")?;
    let kind = SinogramKind::parse(&kind_name)
        .ok_or_else(|| Error::format(WHAT, format!("unknown sinogram kind '{kind_name}'")))?;
    let n_angles: usize = field(WHAT, &fields, "angles")?;
    let n_offsets: usize = field(WHAT, &fields, "offsets")?;
    let grid_err = |e: Error| Error::format(WHAT, e.to_string());
    let angles = Grid1D::from_spacing(field(WHAT, &fields, "theta0")?, field(WHAT, &fields, "dtheta")?, n_angles)
        .map_err(grid_err)?;
    let offsets =
        Grid1D::from_spacing(field(WHAT, &fields, "p0")?, field(WHAT, &fields, "dp")?, n_offsets).map_err(grid_err)?;
    let aperture: f64 = if fields.contains_key("aperture") {
        field(WHAT, &fields, "aperture")?
    } else {
        0.0
    };
    let mut values = Vec::with_capacity(n_angles * n_offsets);
    let mut rows = 0;
    for (lineno, line) in data_lines(text) {
        values.extend(parse_row(WHAT, line, n_offsets, lineno)?);
        rows += 1;
    }
    if rows != n_angles {
        return Err(Error::format(WHAT, format!("expected {n_angles} rows, found {rows}")));
    }
    Sinogram::new(angles, offsets, values, kind)?
        .with_aperture(aperture)
        .map_err(|e| Error::format(WHAT, e.to_string()))
}

pub fn write_sinogram(path: &Path, s: &Sinogram) -> Result<()> {
    write_atomic(path, format_sinogram(s).as_bytes())
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    parse_sinogram(&read_text(path)?)
}

pub fn format_moments(t: &MomentTable) -> String {
    let mut out = format!("# moments K={}\na1,a2,value\n", t.max_order());
    for (a1, a2, v) in t.entries() {
        let _ = writeln!(out, "{a1},{a2},{}", num(v));
    }
    out
}

pub fn parse_moments(text: &str) -> Result<MomentTable> {
    const WHAT: &str = "moment file";
    let fields = parse_header(WHAT, text.lines().next(), "moments")?;
    let k: usize = field(WHAT, &fields, "K")?;
    let mut table = MomentTable::zeros(k);
    let mut seen = vec![false; (k + 1) * (k + 2) / 2];
    for (lineno, line) in data_lines(text) {
        if line == "a1,a2,value" {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::format(WHAT, format!("line {lineno}: expected a1,a2,value")));
        }
        let bad = |what: &str| Error::format(WHAT, format!("line {lineno}: bad {what}"));
        let a1: usize = parts[0].parse().map_err(|_| bad("a1"))?;
        let a2: usize = parts[1].parse().map_err(|_| bad("a2"))?;
        let v: f64 = parts[2].parse().map_err(|_| bad("value"))?;
        if a1 + a2 > k {
            return Err(Error::format(WHAT, format!("line {lineno}: degree {} exceeds K={k}", a1 + a2)));
        }
        let slot = (a1 + a2) * (a1 + a2 + 1) / 2 + a1;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::format(WHAT, format!("line {lineno}: duplicate entry ({a1}, {a2})")));
        }
        table.set(a1, a2, v)?;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::format(WHAT, format!("{} of {} entries missing (first at slot {missing})", seen.iter().filter(|s| !**s).count(), seen.len())));
    }
    Ok(table)
}

pub fn write_moments(path: &Path, t: &MomentTable) -> Result<()> {
    write_atomic(path, format_moments(t).as_bytes())
}

pub fn read_moments(path: &Path) -> Result<MomentTable> {
    parse_moments(&read_text(path)?)
}

pub fn format_recon_csv(r: &ReconGrid) -> String {
    let n = r.resolution();
    let mut out = format!("# recon N={n}");
    if let Some((m, nn)) = r.orders() {
        let _ = write!(out, " m={m} n={nn}");
    }
    out.push('\n');
    for row in r.values().chunks(n) {
        let line: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_recon_csv(text: &str) -> Result<ReconGrid> {
    const WHAT: &str = "reconstruction file";
    let fields = parse_header(WHAT, text.lines().next(), "recon")?;
    let n: usize = field(WHAT, &fields, "N")?;
    let orders = match (fields.contains_key("m"), fields.contains_key("n")) {
        (true, true) => Some((field(WHAT, &fields, "m")?, field(WHAT, &fields, "n")?)),
        (false, false) => None,
        _ => return Err(Error::format(WHAT, "header must give both m and n or neither")),
    };
    let mut values = Vec::with_capacity(n * n);
    for (lineno, line) in data_lines(text) {
        values.extend(parse_row(WHAT, line, n, lineno)?);
    }
    ReconGrid::new(n, values, orders).map_err(|e| Error::format(WHAT, e.to_string()))
}

/// Plain PGM; `pixel = round(255 (v − lo)/(hi − lo))`.
pub fn format_pgm(r: &ReconGrid) -> String {
    let n = r.resolution();
    let lo = r.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P2\n# value = lo + (hi - lo) * pixel / 255\n# lo={} hi={}\n{n} {n}\n255\n", num(lo), num(hi));
    for j in (0..n).rev() {
        let line: Vec<String> = (0..n)
            .map(|i| (((r.get(i, j) - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_recon(csv: &Path, pgm: &Path, r: &ReconGrid) -> Result<()> {
    write_atomic(csv, format_recon_csv(r).as_bytes())?;
    write_atomic(pgm, format_pgm(r).as_bytes())
}

pub fn read_recon_csv(path: &Path) -> Result<ReconGrid> {
    parse_recon_csv(&read_text(path)?)
}
