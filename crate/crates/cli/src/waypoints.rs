//! Waypoint files.
//!
//! ```text
//! # comment
//! start_velocity 0 0 0
//! end_velocity 0 0 0
//! 0 0 0
//! 5 0 0
//! 10 0 0
//! ```
//!
//! Both velocity lines are optional and default to rest.

use std::fmt::Write as _;

use pmm_planner::{Vec3, WaypointPath};

use crate::CliError;

fn triple(fields: &[&str], line: usize) -> Result<Vec3<f64>, CliError> {
    if fields.len() != 3 {
        return Err(CliError::Parse(format!("line {line}: expected 3 numbers, found {}", fields.len())));
    }
    let mut out = [0.0; 3];
    for (k, f) in fields.iter().enumerate() {
        let v: f64 = f
            .parse()
            .map_err(|_| CliError::Parse(format!("line {line}, column {}: not a number: {f:?}", k + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Parse(format!("line {line}, column {}: value must be finite", k + 1)));
        }
        out[k] = v;
    }
    Ok(Vec3(out))
}

pub fn parse(text: &str) -> Result<WaypointPath<f64>, CliError> {
    let mut v_start = None;
    let mut v_end = None;
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "start_velocity" => {
                if v_start.replace(triple(&fields[1..], line)?).is_some() {
                    return Err(CliError::Parse(format!("line {line}: start_velocity given twice")));
                }
            }
            "end_velocity" => {
                if v_end.replace(triple(&fields[1..], line)?).is_some() {
                    return Err(CliError::Parse(format!("line {line}: end_velocity given twice")));
                }
            }
            _ => points.push(triple(&fields, line)?),
        }
    }
    if points.len() < 2 {
        return Err(CliError::Parse(format!("need at least 2 waypoints, found {}", points.len())));
    }
    WaypointPath::new(points, v_start.unwrap_or(Vec3::zeros()), v_end.unwrap_or(Vec3::zeros()))
        .map_err(|e| CliError::Parse(e.to_string()))
}

pub fn format(path: &WaypointPath<f64>) -> String {
    let mut s = String::new();
    let v = |s: &mut String, key: &str, x: &Vec3<f64>| {
        writeln!(s, "{key}{:.16e} {:.16e} {:.16e}", x[0], x[1], x[2]).unwrap();
    };
    v(&mut s, "start_velocity ", &path.v_start);
    v(&mut s, "end_velocity ", &path.v_end);
    for p in &path.waypoints {
        v(&mut s, "", p);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_velocities() {
        let p = parse("# path\nstart_velocity 1 0 0\n0 0 0 # origin\n\n1 2 3\n").unwrap();
        assert_eq!(p.v_start, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(p.v_end, Vec3::zeros());
        assert_eq!(p.waypoints.len(), 2);
    }

    #[test]
    fn bad_line_is_reported_by_number() {
        let e = parse("0 0 0\n1 x 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse("0 0 0\n1 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn round_trip() {
        let p = parse("start_velocity 0.1 0.2 0.3\n0 0 0\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(parse(&format(&p)).unwrap(), p);
    }
}
