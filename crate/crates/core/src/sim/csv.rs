use std::io::Write;

use super::Trace;
use crate::scalar::Scalar;

pub const CSV_HEADER_PREFIX: &str = "t,k_h,norm_e";

/// Twelve significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes `t,k_h,norm_e,q_1..q_m,in_ball` with LF line endings.
pub fn write_csv<T: Scalar, W: Write>(trace: &Trace<T>, mut out: W) -> std::io::Result<()> {
    let m = trace.q.first().map_or(0, |q| q.len());
    let mut header = String::from(CSV_HEADER_PREFIX);
    for i in 1..=m {
        header.push_str(&format!(",q_{i}"));
    }
    header.push_str(",in_ball\n");
    out.write_all(header.as_bytes())?;
    let mut line = String::new();
    for j in 0..trace.len() {
        line.clear();
        line.push_str(&format_number(trace.times[j].as_f64()));
        line.push(',');
        line.push_str(&format_number(trace.gains[j].as_f64()));
        line.push(',');
        line.push_str(&format_number(trace.norms[j].as_f64()));
        for x in trace.q[j].iter() {
            line.push(',');
            line.push_str(&format_number(x.as_f64()));
        }
        line.push_str(if trace.in_ball[j] { ",1\n" } else { ",0\n" });
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(-0.000123456789012345), "-1.23456789012e-4");
        let parsed: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert!((parsed - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn layout_of_rows() {
        let trace = Trace {
            times: vec![0.0, 0.5],
            q: vec![DVector::from_vec(vec![1.0, 2.0]), DVector::from_vec(vec![0.5, 1.0])],
            norms: vec![2.0, 1.0],
            in_ball: vec![true, false],
            gains: vec![0.25, 0.25],
        };
        let mut buf = Vec::new();
        write_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,k_h,norm_e,q_1,q_2,in_ball");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",0"));
        assert_eq!(lines[1].split(',').count(), 6);
        assert!(!text.contains('\r'));
    }
}
