//! End-to-end checks of the command-line interface: piping fixtures through
//! subcommands, JSON round-trips, exit codes, and the SVG golden property.

use boxnef::positivity;
use boxnef::scalar::rat_int;
use boxnef::Rat;
use boxnef_cli::{json, svg};
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_boxnef")
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(bin())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn boxnef");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn fixture(args: &[&str]) -> String {
    let out = Command::new(bin()).arg("fixture").args(args).output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn lct_of_nakayama_prints_reference_digits() {
    let problem = fixture(&["nakayama", "--a", "2"]);
    let out = run_with_stdin(&["lct", "--point", "P(L0)"], &problem);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "3.828427124746");
}

#[test]
fn boxnef_lists_the_pentagon() {
    let problem = fixture(&["ex62", "--u", "1", "--v", "2"]);
    let out = run_with_stdin(&["boxnef"], &problem);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for vertex in ["(0, 1/2)", "(0, 1)", "(1/6, 1/6)", "(1/2, 0)", "(1, 0)"] {
        assert!(text.contains(vertex), "missing {vertex} in:\n{text}");
    }
}

#[test]
fn zariski_verdicts() {
    for (fix, expected) in [
        (vec!["ex62", "--u", "1", "--v", "2"], "RationalPolyhedral"),
        (vec!["nakayama", "--a", "2"], "NonPolyhedralOrIrrational"),
        (vec!["ex65"], "NonPolyhedralOrIrrational"),
    ] {
        let problem = fixture(&fix);
        let out = run_with_stdin(&["zariski"], &problem);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), expected);
    }
}

#[test]
fn nnef_reports_named_strata() {
    let problem = fixture(&["ex65"]);
    let out = run_with_stdin(&["nnef"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P(L2)"), "{text}");
    assert!(!text.contains("P(L0)"));
}

#[test]
fn exit_codes() {
    // Parse error: malformed JSON.
    let out = run_with_stdin(&["pseff"], "{ not json");
    assert_eq!(out.status.code(), Some(1));
    // Math error: lct needs bigness; starving the base class empties the
    // nef box and reports through exit code 2.
    let problem = fixture(&["ex62", "--u", "1", "--v", "2"]);
    let mut doc: serde_json::Value = serde_json::from_str(&problem).unwrap();
    doc["L0"] = serde_json::json!({"f": ["-9", "-9", "-9"]});
    let starved = serde_json::to_string(&doc).unwrap();
    let out = run_with_stdin(&["lct", "--point", "P(L0)"], &starved);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // Success path.
    let out = run_with_stdin(&["pseff"], &problem);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_round_trip_is_bit_exact() {
    for args in [vec!["nakayama", "--a", "3"], vec!["ex62", "--u", "2", "--v", "5"], vec!["ex65"]] {
        let text = fixture(&args);
        let parsed: json::ProblemFile = serde_json::from_str(&text).unwrap();
        let problem = json::to_problem(&parsed).unwrap();
        let emitted = serde_json::to_string_pretty(&json::from_problem(&problem)).unwrap();
        assert_eq!(text.trim(), emitted.trim(), "canonical emission must round-trip");
    }
}

#[test]
fn eval_and_lelong_at_points() {
    let problem = fixture(&["nakayama", "--a", "2"]);
    // Unit-modulus torus point: weight 0.
    let out = run_with_stdin(
        &["eval", "--point", "sigma=0;x=1,1;z=0,0"],
        &problem,
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "psi = 0.000000000000");
    // Polar section: -inf and positive Lelong number.
    let out = run_with_stdin(&["eval", "--point", "P(L0)"], &problem);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "psi = -inf");
    let out = run_with_stdin(&["lelong", "--point", "P(L0)"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    let expected = 2.0 / (2.0 * 2.0_f64.sqrt() + 1.0);
    let value: f64 = text.trim().strip_prefix("lelong = ").unwrap().parse().unwrap();
    assert!((value - expected).abs() < 1e-9);
    // Kiselman with doubled weights halves the value.
    let out = run_with_stdin(&["kiselman", "--point", "P(L0)", "--w", "2,2"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    let halved: f64 = text.trim().strip_prefix("kiselman = ").unwrap().parse().unwrap();
    assert!((halved - expected / 2.0).abs() < 1e-9);
}

#[test]
fn mideal_membership_and_generators() {
    let problem = fixture(&["nakayama", "--a", "2"]);
    let out = run_with_stdin(&["mideal", "--point", "P(L0)", "--t", "1"], &problem);
    assert!(String::from_utf8(out.stdout).unwrap().contains("member"));
    let out = run_with_stdin(&["mideal", "--point", "P(L0)", "--t", "4"], &problem);
    assert!(String::from_utf8(out.stdout).unwrap().contains("not a member"));
    let out = run_with_stdin(&["mideal", "--point", "P(L0)", "--t", "4", "--gens"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x1") && text.contains("x2"), "{text}");
}

#[test]
fn jumps_and_sections() {
    let problem = fixture(&["ex62", "--u", "1", "--v", "2"]);
    let out = run_with_stdin(&["jumps", "--point", "P(L0)", "--max", "12"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    for v in ["6 =", "8 =", "10 =", "12 ="] {
        assert!(text.contains(v), "missing {v} in {text}");
    }
    let out = run_with_stdin(&["sections"], &problem);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("total: 18"), "{text}");
}

#[test]
fn svg_region_encloses_exactly_the_lattice_points() {
    // The plotted scaled exponent body must enclose exactly the lattice
    // points the geometry reports, for each fixture's polar chart.
    for (args, sigma, t) in [
        (vec!["ex62", "--u", "1", "--v", "2"], 0usize, 6.0f64),
        (vec!["nakayama", "--a", "2"], 0, 4.0),
        (vec!["ex65"], 2, 60.0),
    ] {
        let text = fixture(&args);
        let parsed: json::ProblemFile = serde_json::from_str(&text).unwrap();
        let problem = json::to_problem(&parsed).unwrap();
        let body = positivity::s_set(&problem, sigma).unwrap();
        let view = 2.0 * t;
        let doc = svg::plot_sset(&body, t, view, "golden");
        let poly_px = svg::parse_polygon(&doc);
        assert!(poly_px.len() > 3);
        let max = svg::parse_max(&doc).unwrap();
        let poly: Vec<[f64; 2]> = poly_px
            .iter()
            .map(|p| svg::pixel_to_coord(*p, max))
            .collect();
        let limit = view.floor() as i64 - 1;
        let mut checked = 0;
        for i in 0..=limit {
            for j in 0..=limit {
                let in_path = svg::point_in_polygon(&poly, [i as f64, j as f64]);
                let scaled_point = [
                    Rat::from_float(i as f64 / t).unwrap(),
                    Rat::from_float(j as f64 / t).unwrap(),
                ];
                let member = body.contains(&scaled_point).unwrap();
                // Skip points within a pixel of the drawn boundary; the
                // path is a polyline approximation of conic arcs.
                let near_boundary = poly
                    .windows(2)
                    .any(|w| dist_to_segment([i as f64, j as f64], w[0], w[1]) < 0.02 * t.max(1.0));
                if near_boundary {
                    continue;
                }
                assert_eq!(in_path, member, "fixture {args:?} lattice point ({i},{j})");
                checked += 1;
            }
        }
        assert!(checked > 10, "enough lattice points checked");
        let _ = rat_int(0);
    }
}

fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) };
    let close = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    (close[0] * close[0] + close[1] * close[1]).sqrt()
}
