//! Artifact emission: CSV and JSON writers shared by the CLI and examples.
//!
//! Files are written atomically (temp file in the target directory, then
//! rename) and floats carry 17 significant digits, so identical runs produce
//! byte-identical artifacts.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::classical::{BoxTrajectory, ReflectionEvent, Wall};
use crate::constants::PhysicalConstants;
use crate::driving::DrivingField;
use crate::error::Result;
use crate::qbasis::OperatorMatrix;
use crate::qline::{EhrenfestSample, GridWavepacket};

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial artifact.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn wall_name(wall: Wall) -> &'static str {
    match wall {
        Wall::Left => "left",
        Wall::Right => "right",
    }
}

/// `t,x,v,p0,pchi` rows for a sampled trajectory; both canonical momenta are
/// emitted regardless of the state's gauge tag.
pub fn trajectory_csv(
    traj: &BoxTrajectory,
    field: &DrivingField,
    consts: &PhysicalConstants,
) -> Result<String> {
    let mut out = String::from("t,x,v,p0,pchi\n");
    for s in &traj.samples {
        let p0 = consts.mass * s.v;
        let pchi = p0 + consts.alpha * field.primitive(s.t)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(s.t),
            fmt_float(s.x),
            fmt_float(s.v),
            fmt_float(p0),
            fmt_float(pchi)
        ));
    }
    Ok(out)
}

/// `t_hit,wall,v_in,v_out` rows.
pub fn events_csv(events: &[ReflectionEvent]) -> String {
    let mut out = String::from("t_hit,wall,v_in,v_out\n");
    for e in events {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(e.t_hit),
            wall_name(e.wall),
            fmt_float(e.v_in),
            fmt_float(e.v_out)
        ));
    }
    out
}

/// Row-major matrix CSV; every cell becomes a `re,im` pair of columns.
pub fn matrix_csv(m: &OperatorMatrix) -> String {
    let n = m.n();
    let mut out = String::new();
    for i in 0..n {
        let mut cells = Vec::with_capacity(2 * n);
        for j in 0..n {
            let z = m.entries[(i, j)];
            cells.push(fmt_float(z.re));
            cells.push(fmt_float(z.im));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// JSON envelope for a truncated operator: row-major `[re, im]` pairs.
pub fn matrix_json(m: &OperatorMatrix, operator: &str, theta: Option<f64>) -> Value {
    let n = m.n();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = m.entries[(i, j)];
            entries.push(json!([z.re, z.im]));
        }
    }
    json!({
        "N": n,
        "operator": operator,
        "theta": theta,
        "entries": entries,
    })
}

/// `x,re,im,abs2` rows for a packet snapshot.
pub fn packet_csv(packet: &GridWavepacket) -> String {
    let mut out = String::from("x,re,im,abs2\n");
    for (j, z) in packet.samples.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(packet.grid.x(j)),
            fmt_float(z.re),
            fmt_float(z.im),
            fmt_float(z.norm_sqr())
        ));
    }
    out
}

/// `t,mean_x,mean_p,var_x` rows.
pub fn moments_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("t,mean_x,mean_p,var_x\n");
    for (t, mx, mp, vx) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(*t),
            fmt_float(*mx),
            fmt_float(*mp),
            fmt_float(*vx)
        ));
    }
    out
}

/// `t,mean_x,x_classical,deviation` rows for the mean-position comparison.
pub fn ehrenfest_csv(rows: &[EhrenfestSample]) -> String {
    let mut out = String::from("t,mean_x,x_classical,deviation\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(r.t),
            fmt_float(r.mean_x),
            fmt_float(r.x_classical),
            fmt_float(r.deviation)
        ));
    }
    out
}

/// Complex vector as JSON `[re, im]` pairs.
pub fn complex_vec_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{simulate_box, ClassicalState, Gauge};
    use crate::qbasis::matrix_p;

    #[test]
    fn float_format_has_17_significant_digits() {
        let s = fmt_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("artifact.csv");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        // no stray temp file left behind
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn trajectory_and_events_headers() {
        let c = PhysicalConstants::default();
        let field = DrivingField::free(0.0);
        let initial = ClassicalState::new(0.25, 0.5, 0.0, Gauge::Scalar);
        let traj = simulate_box(&initial, &field, &c, 5.0, 6).unwrap();
        let csv = trajectory_csv(&traj, &field, &c).unwrap();
        assert!(csv.starts_with("t,x,v,p0,pchi\n"));
        assert_eq!(csv.lines().count(), 7);
        let ev = events_csv(&traj.events);
        assert!(ev.starts_with("t_hit,wall,v_in,v_out\n"));
        assert!(ev.contains(",right,"));
    }

    #[test]
    fn matrix_csv_layout() {
        let c = PhysicalConstants::default();
        let p = matrix_p(2, &c);
        let csv = matrix_csv(&p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        let first: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(first.len(), 4);
        // (1,1) vanishes; (1,2) is purely imaginary +8ħ/(3Λ)
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
        assert_eq!(first[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
        assert!((first[3].parse::<f64>().unwrap() - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_json_envelope() {
        let c = PhysicalConstants::default();
        let p = matrix_p(3, &c);
        let v = matrix_json(&p, "P", None);
        assert_eq!(v["N"], 3);
        assert_eq!(v["operator"], "P");
        assert!(v["theta"].is_null());
        assert_eq!(v["entries"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn deterministic_serialization() {
        let c = PhysicalConstants::default();
        let field = DrivingField::cosine(1.0, 2.0, 0.0).unwrap();
        let initial = ClassicalState::new(0.3, 0.7, 0.0, Gauge::Vector);
        let a = simulate_box(&initial, &field, &c, 3.0, 9).unwrap();
        let b = simulate_box(&initial, &field, &c, 3.0, 9).unwrap();
        assert_eq!(
            trajectory_csv(&a, &field, &c).unwrap(),
            trajectory_csv(&b, &field, &c).unwrap()
        );
    }
}
