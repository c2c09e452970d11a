//! Plain-text trajectory files.
//!
//! ```text
//! # pmm-trajectory v1
//! waypoints <count>
//! w <x> <y> <z>                     (one line per waypoint)
//! segments <count>
//! segment <duration>
//! axis <M|S> <gamma> <p0> <v0> <phase count>   (three per segment: x, y, z)
//! phase <duration> <acceleration>   (per axis phase)
//! ```
//!
//! Floats are written with 17 significant digits so a file parses back to
//! the identical trajectory.

use std::fmt::Write as _;

use pmm_planner::{AxisProfile, AxisState, Phase, Role, Segment3D, Trajectory, Vec3};

use crate::CliError;

pub const HEADER: &str = "# pmm-trajectory v1";

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write(trajectory: &Trajectory<f64>) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "waypoints {}", trajectory.waypoints.len()).unwrap();
    for w in &trajectory.waypoints {
        writeln!(s, "w {} {} {}", f(w[0]), f(w[1]), f(w[2])).unwrap();
    }
    writeln!(s, "segments {}", trajectory.segments.len()).unwrap();
    for seg in &trajectory.segments {
        writeln!(s, "segment {}", f(seg.duration)).unwrap();
        for ax in &seg.axes {
            let role = ax.role.letter();
            writeln!(
                s,
                "axis {role} {} {} {} {}",
                f(ax.gamma),
                f(ax.start.position),
                f(ax.start.velocity),
                ax.phases.len()
            )
            .unwrap();
            for ph in &ax.phases {
                writeln!(s, "phase {} {}", f(ph.duration), f(ph.acceleration)).unwrap();
            }
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line that is not a comment, split into fields.
    fn next(&mut self) -> Result<Vec<&'a str>, CliError> {
        for (k, raw) in self.inner.by_ref() {
            self.line = k + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            return Ok(body.split_whitespace().collect());
        }
        Err(CliError::Parse(format!("line {}: unexpected end of file", self.line + 1)))
    }

    fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Parse(format!("line {}: {msg}", self.line))
    }

    fn keyed(&mut self, key: &str, values: usize) -> Result<Vec<&'a str>, CliError> {
        let fields = self.next()?;
        if fields.first() != Some(&key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        if fields.len() != values + 1 {
            return Err(self.err(format!("`{key}` takes {values} values, found {}", fields.len() - 1)));
        }
        Ok(fields[1..].to_vec())
    }

    fn num(&self, s: &str) -> Result<f64, CliError> {
        s.parse().map_err(|_| self.err(format!("not a number: {s:?}")))
    }

    fn count(&self, s: &str) -> Result<usize, CliError> {
        s.parse().map_err(|_| self.err(format!("not a count: {s:?}")))
    }
}

pub fn parse(text: &str) -> Result<Trajectory<f64>, CliError> {
    if text.lines().next().map(str::trim) != Some(HEADER) {
        return Err(CliError::Parse(format!("line 1: expected `{HEADER}`")));
    }
    let mut it = Lines { inner: text.lines().enumerate(), line: 0 };
    it.inner.next();
    let n = {
        let v = it.keyed("waypoints", 1)?;
        it.count(v[0])?
    };
    let mut waypoints = Vec::with_capacity(n);
    for _ in 0..n {
        let v = it.keyed("w", 3)?;
        waypoints.push(Vec3::new(it.num(v[0])?, it.num(v[1])?, it.num(v[2])?));
    }
    let m = {
        let v = it.keyed("segments", 1)?;
        it.count(v[0])?
    };
    let mut segments = Vec::with_capacity(m);
    for _ in 0..m {
        let duration = {
            let v = it.keyed("segment", 1)?;
            it.num(v[0])?
        };
        let mut axes = Vec::with_capacity(3);
        for _ in 0..3 {
            let v = it.keyed("axis", 5)?;
            let Some(role) = Role::from_letter(v[0]) else {
                return Err(it.err(format!("role must be M or S, found {:?}", v[0])));
            };
            let gamma = it.num(v[1])?;
            let start = AxisState::new(it.num(v[2])?, it.num(v[3])?);
            let k = it.count(v[4])?;
            let mut profile = AxisProfile::bang_bang(start, Phase::new(0.0, 0.0), Phase::new(0.0, 0.0));
            profile.phases.clear();
            for _ in 0..k {
                let p = it.keyed("phase", 2)?;
                let ph = Phase::new(it.num(p[0])?, it.num(p[1])?);
                if profile.phases.try_push(ph).is_err() {
                    return Err(it.err("an axis has at most 3 phases"));
                }
            }
            profile.role = role;
            profile.gamma = gamma;
            axes.push(profile);
        }
        let axes: [AxisProfile<f64>; 3] = axes.try_into().expect("three axes");
        segments.push(Segment3D { axes, duration });
    }
    Ok(Trajectory::new(segments, waypoints))
}
