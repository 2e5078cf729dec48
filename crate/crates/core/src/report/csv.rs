//! Trajectory CSV: one row per (sample, domain), ordered by time then domain.

use crate::error::{Error, Result};
use crate::model::{Domain, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t,domain,c,s,d,u,v_e,v_h,divergence";

/// Formats `x` with 9 significant digits, `%g` style: plain notation for
/// exponents in [-4, 9), scientific otherwise, trailing zeros dropped.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * 3 * traj.len() + 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        for (i, d) in s.state.domains.iter().enumerate() {
            let row = [
                sig9(s.t),
                Domain::ALL[i].name().to_string(),
                sig9(d.c),
                sig9(d.s),
                sig9(d.d),
                d.u.to_string(),
                sig9(d.v_e),
                sig9(s.state.v_h),
                sig9(s.divergence[i]),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

/// One parsed trajectory row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub domain: Domain,
    pub c: f64,
    pub s: f64,
    pub d: f64,
    pub u: u8,
    pub v_e: f64,
    pub v_h: f64,
    pub divergence: f64,
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRAJECTORY_HEADER => {}
        _ => {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: format!("expected header `{TRAJECTORY_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| Error::Syntax {
            line: idx + 1,
            column,
            message,
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(err(1, format!("expected 9 fields, found {}", f.len())));
        }
        let num = |k: usize| -> Result<f64> {
            f[k].parse::<f64>()
                .map_err(|_| err(k + 1, format!("bad number `{}`", f[k])))
        };
        let domain = Domain::ALL
            .into_iter()
            .find(|d| d.name() == f[1])
            .ok_or_else(|| err(2, format!("unknown domain `{}`", f[1])))?;
        rows.push(TrajectoryRow {
            t: num(0)?,
            domain,
            c: num(2)?,
            s: num(3)?,
            d: num(4)?,
            u: f[5].parse().map_err(|_| err(6, format!("bad indicator `{}`", f[5])))?,
            v_e: num(6)?,
            v_h: num(7)?,
            divergence: num(8)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(0.25), "0.25");
        assert_eq!(sig9(17.5), "17.5");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(2.0 / 3.0 * 100.0), "66.6666667");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e9");
        assert_eq!(sig9(0.000012345), "1.2345e-5");
        assert_eq!(sig9(0.00012345), "0.00012345");
        assert_eq!(sig9(-0.5), "-0.5");
        assert_eq!(sig9(9.9999999999), "10");
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_trajectory_csv("t,c\n").is_err());
        let text = format!("{TRAJECTORY_HEADER}\n0,martian,1,1,0,0,0,0,0\n");
        assert!(matches!(
            parse_trajectory_csv(&text),
            Err(Error::Syntax { line: 2, column: 2, .. })
        ));
    }
}
