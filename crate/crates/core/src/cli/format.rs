use std::io::{self, Write};

use super::Format;
use crate::sim::{sig12, sig_digits};

pub(super) fn num(x: f64, format: Format) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    match format {
        Format::Csv => sig12(x),
        Format::Pretty => sig_digits(x, 6),
    }
}

pub(super) fn opt(x: Option<f64>, format: Format) -> String {
    x.map_or_else(|| "NA".into(), |v| num(v, format))
}

/// Comment line opening every CSV: version, seed and parameters.
pub(super) fn header_comment(out: &mut dyn Write, seed: Option<u64>, params: &[(&str, String)]) -> io::Result<()> {
    write!(out, "# aoi-lab {}", env!("CARGO_PKG_VERSION"))?;
    if let Some(s) = seed {
        write!(out, " seed={s}")?;
    }
    for (k, v) in params {
        write!(out, " {k}={v}")?;
    }
    writeln!(out)
}

/// Left-aligned columns separated by two spaces.
pub(super) fn pretty_table(out: &mut dyn Write, header: &[String], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(header))?;
    for r in rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

pub(super) fn table(
    out: &mut dyn Write,
    format: Format,
    seed: Option<u64>,
    params: &[(&str, String)],
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    match format {
        Format::Csv => {
            header_comment(out, seed, params)?;
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.join(","))?;
            }
            Ok(())
        }
        Format::Pretty => pretty_table(out, &header, rows),
    }
}
