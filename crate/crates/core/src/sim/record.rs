use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// One delivered packet as seen by the monitored (final) node.
///
/// `arrival` is the entry time into the node whose departures are observed,
/// so `initial_age = arrival - generation`. In the retrial queue it is the
/// start of the successful service and in the zero-wait model the start of
/// the attempt. `node_arrivals` keeps the entry times into every node of a
/// tandem, or the external arrival time for a retrial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub id: u64,
    pub generation: f64,
    pub arrival: f64,
    pub initial_age: f64,
    pub service_start: f64,
    pub departure: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_arrivals: Vec<f64>,
}

impl PacketRecord {
    pub fn system_time(&self) -> f64 {
        self.departure - self.arrival
    }

    pub fn service_time(&self) -> f64 {
        self.departure - self.service_start
    }
}

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    sig_digits(x, 12)
}

/// Formats `x` with `digits` significant digits, dropping trailing zeros and
/// switching to exponent notation for very small or large magnitudes.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let s = format!("{x:.*e}", digits - 1);
    // Reparse so the magnitude reflects any carry from rounding.
    let v: f64 = s.parse().unwrap_or(x);
    let mag = v.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let mut out = format!("{v:.decimals$}");
        if out.contains('.') {
            while out.ends_with('0') {
                out.pop();
            }
            if out.ends_with('.') {
                out.pop();
            }
        }
        out
    } else {
        s
    }
}

/// Writes the per-packet log as CSV.
pub fn write_log_csv<W: Write>(records: &[PacketRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "id,generation,arrival,service_start,departure,initial_age")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.id,
            sig12(r.generation),
            sig12(r.arrival),
            sig12(r.service_start),
            sig12(r.departure),
            sig12(r.initial_age)
        )?;
    }
    Ok(())
}

/// Age `s - g_N(s)` sampled at `points` evenly spaced instants of
/// `[from, to]`. Records must be in departure order and `from` must not
/// precede the first departure.
pub fn age_path(records: &[PacketRecord], from: f64, to: f64, points: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(points);
    let mut idx = 0;
    for k in 0..points {
        let s = if points == 1 { from } else { from + (to - from) * k as f64 / (points - 1) as f64 };
        while idx + 1 < records.len() && records[idx + 1].departure <= s {
            idx += 1;
        }
        out.push((s, s - records[idx].generation));
    }
    out
}

/// Corner points of the age sawtooth from the first to the last departure:
/// the peak just before each delivery followed by the value just after it.
pub fn age_vertices(records: &[PacketRecord]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(2 * records.len());
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push((r.departure, r.departure - records[i - 1].generation));
        }
        out.push((r.departure, r.departure - r.generation));
    }
    out
}

/// Trapezoid integral of a sampled path.
pub fn trapezoid(path: &[(f64, f64)]) -> f64 {
    path.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u64, g: f64, t: f64, d: f64) -> PacketRecord {
        PacketRecord {
            id,
            generation: g,
            arrival: t,
            initial_age: t - g,
            service_start: t,
            departure: d,
            node_arrivals: vec![],
        }
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(123456.789012345), "123456.789012");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(1e-9), "1.00000000000e-9");
        assert_eq!(sig_digits(1.208_333_333, 6), "1.20833");
        assert_eq!(sig_digits(9.999_999_9, 6), "10");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_log_csv(&[rec(0, 0.5, 1.0, 2.0)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "id,generation,arrival,service_start,departure,initial_age\n0,0.5,1,1,2,0.5\n");
    }

    #[test]
    fn path_and_vertices() {
        let log = vec![rec(0, 0.0, 0.0, 1.0), rec(1, 1.5, 1.5, 3.0), rec(2, 2.0, 2.5, 4.0)];
        let path = age_path(&log, 1.0, 4.0, 4);
        assert_eq!(path, vec![(1.0, 1.0), (2.0, 2.0), (3.0, 1.5), (4.0, 2.0)]);
        let v = age_vertices(&log);
        assert_eq!(v, vec![(1.0, 1.0), (3.0, 3.0), (3.0, 1.5), (4.0, 2.5), (4.0, 2.0)]);
        // Exact area from 1 to 4 is 4 + 2.
        assert!((trapezoid(&v) - 6.0).abs() < 1e-12);
    }
}
