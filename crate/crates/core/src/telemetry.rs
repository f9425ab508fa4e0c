//! Per-tick telemetry and its fixed-width CSV encoding.
//!
//! Every record carries all four subsystem slots; slots beyond the chain
//! length hold 0 and are marked absent in `present`. Reals are written in
//! scientific notation with 17 significant digits so that parsing a file
//! reproduces the recorded values bit for bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::types::MAX_SUBSYSTEMS;

/// Column order of the telemetry CSV.
pub const CSV_COLUMNS: [&str; 32] = [
    "t", "x1", "x2", "x3", "x4", "x1d", "x2d", "x3d", "x4d", "e1", "e2", "e3", "e4", "z1", "z2", "z3", "z4", "u0",
    "u1", "u2", "u3", "su1", "su2", "su3", "chi0", "chi1", "chi2", "chi3", "d1", "d2", "d3", "d4",
];

/// One control tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TelemetryRecord {
    pub t: f64,
    pub x: [f64; MAX_SUBSYSTEMS],
    pub xd: [f64; MAX_SUBSYSTEMS],
    pub e: [f64; MAX_SUBSYSTEMS],
    pub z: [f64; MAX_SUBSYSTEMS],
    /// Raw controls `u_0..u_3`.
    pub u: [f64; MAX_SUBSYSTEMS],
    /// Applied controls `u_1..u_3` after saturation.
    pub sat_u: [f64; 3],
    pub chi: [f64; MAX_SUBSYSTEMS],
    pub disturbance: [f64; MAX_SUBSYSTEMS],
    /// Bit `j` set when subsystem `j+1` exists.
    pub present: u8,
}

impl TelemetryRecord {
    pub fn mask_for(n: usize) -> u8 {
        ((1u16 << n) - 1) as u8
    }

    pub fn subsystems(&self) -> usize {
        self.present.count_ones() as usize
    }

    /// Squared Euclidean norm of the tracking transform `z`.
    pub fn z_norm_sq(&self) -> f64 {
        self.z.iter().map(|z| z * z).sum()
    }

    fn values(&self) -> [f64; 32] {
        let mut out = [0.0; 32];
        out[0] = self.t;
        out[1..5].copy_from_slice(&self.x);
        out[5..9].copy_from_slice(&self.xd);
        out[9..13].copy_from_slice(&self.e);
        out[13..17].copy_from_slice(&self.z);
        out[17..21].copy_from_slice(&self.u);
        out[21..24].copy_from_slice(&self.sat_u);
        out[24..28].copy_from_slice(&self.chi);
        out[28..32].copy_from_slice(&self.disturbance);
        out
    }

    fn from_values(v: &[f64; 32], present: u8) -> Self {
        let mut r = TelemetryRecord {
            t: v[0],
            present,
            ..Default::default()
        };
        r.x.copy_from_slice(&v[1..5]);
        r.xd.copy_from_slice(&v[5..9]);
        r.e.copy_from_slice(&v[9..13]);
        r.z.copy_from_slice(&v[13..17]);
        r.u.copy_from_slice(&v[17..21]);
        r.sat_u.copy_from_slice(&v[21..24]);
        r.chi.copy_from_slice(&v[24..28]);
        r.disturbance.copy_from_slice(&v[28..32]);
        r
    }
}

/// Formats a real with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, records: &[TelemetryRecord]) -> Result<()> {
    let mut line = String::with_capacity(32 * 25);
    line.push_str(&CSV_COLUMNS.join(","));
    line.push('\n');
    out.write_all(line.as_bytes())?;
    for r in records {
        line.clear();
        for (i, v) in r.values().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{v:.16e}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[TelemetryRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Parses telemetry written by [`write_csv`]. The CSV does not carry the
/// presence mask, so the caller supplies the chain length.
pub fn read_csv<R: BufRead>(input: R, subsystems: usize) -> Result<Vec<TelemetryRecord>> {
    if subsystems == 0 || subsystems > MAX_SUBSYSTEMS {
        return Err(Error::Telemetry(format!("invalid subsystem count {subsystems}")));
    }
    let present = TelemetryRecord::mask_for(subsystems);
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Telemetry("missing header".into()))??;
    if header.trim_end() != CSV_COLUMNS.join(",") {
        return Err(Error::Telemetry("unexpected header".into()));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut values = [0.0; 32];
        let mut count = 0;
        for field in line.split(',') {
            if count == 32 {
                count += 1;
                break;
            }
            values[count] = field
                .trim()
                .parse()
                .map_err(|_| Error::Telemetry(format!("row {}: bad real `{field}`", idx + 2)))?;
            count += 1;
        }
        if count != 32 {
            return Err(Error::Telemetry(format!("row {}: expected 32 columns", idx + 2)));
        }
        records.push(TelemetryRecord::from_values(&values, present));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_fixed() {
        let csv = to_csv_string(&[]);
        assert_eq!(
            csv,
            "t,x1,x2,x3,x4,x1d,x2d,x3d,x4d,e1,e2,e3,e4,z1,z2,z3,z4,u0,u1,u2,u3,su1,su2,su3,\
             chi0,chi1,chi2,chi3,d1,d2,d3,d4\n"
        );
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn mask_matches_count() {
        assert_eq!(TelemetryRecord::mask_for(3), 0b0111);
        assert_eq!(TelemetryRecord::mask_for(4), 0b1111);
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e3..1e3f64,]
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(values in proptest::collection::vec(finite(), 32)) {
            let mut arr = [0.0; 32];
            arr.copy_from_slice(&values);
            let rec = TelemetryRecord::from_values(&arr, TelemetryRecord::mask_for(4));
            let csv = to_csv_string(&[rec]);
            let back = read_csv(csv.as_bytes(), 4).unwrap();
            prop_assert_eq!(back.len(), 1);
            for (a, b) in back[0].values().iter().zip(arr.iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
