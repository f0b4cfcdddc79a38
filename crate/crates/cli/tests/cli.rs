use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, Output};

use currentalg_cli::{execute, resolve, Subcommand};

fn binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_currentalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn files_in(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

/// Output files (manifest excluded) computed in memory.
fn outputs(cmd: Subcommand, seed: u64, params: &[String]) -> BTreeMap<String, Vec<u8>> {
    let config = resolve(None, Some(cmd.name()), Some(seed), None, params).unwrap();
    execute(&config)
        .unwrap()
        .files
        .into_iter()
        .map(|f| (f.name, f.contents))
        .collect()
}

fn pairs(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn reruns_through_the_binary_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 3] = [
        ("sample-measure", &["draws=20000"]),
        ("quiver-ground", &["method=both", "runs=3", "sweeps=300"]),
        ("bec-curve", &["steps=30"]),
    ];
    for (cmd, extra) in cases {
        let mut seen = Vec::new();
        for copy in ["a", "b"] {
            let out = dir.path().join(format!("{cmd}-{copy}"));
            let mut args = vec![cmd, "--seed", "11", "--out", out.to_str().unwrap()];
            args.extend_from_slice(extra);
            let result = binary(&args);
            assert!(
                result.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&result.stderr)
            );
            seen.push(files_in(&out));
        }
        assert_eq!(seen[0], seen[1], "{cmd}");
        assert!(seen[0].contains_key("manifest.json"));
    }
}

#[test]
fn validation_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let out_str = out.to_str().unwrap();
    let bad: [&[&str]; 6] = [
        &["ml-weights", "colour=blue"],
        &["ml-weights", "alpha=1.5"],
        &["ml-weights", "m=lots"],
        &["no-such-command"],
        &["bec-curve", "ml-weights"],
        &["quiver-ground", "lx=1", "boundary=periodic"],
    ];
    for args in bad {
        let mut full = args.to_vec();
        full.extend(["--out", out_str]);
        let result = binary(&full);
        assert_eq!(result.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&result.stderr);
        assert!(stderr.starts_with("error: ") && stderr.lines().count() == 1, "{stderr}");
        assert!(!out.exists(), "{args:?} created the output directory");
    }
}

#[test]
fn config_file_is_overridden_by_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(
        &config,
        "# weights\nsubcommand = ml-weights\nseed = 5\nm = 2\nn_max = 10\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = binary(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "m=1.5",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "ml-weights");
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["seed_used"], false);
    assert_eq!(manifest["parameters"]["m"], "1.5");
    assert_eq!(manifest["parameters"]["n_max"], "10");
    assert_eq!(manifest["parameters"]["alpha"], "0.5");
    let csv = std::fs::read_to_string(out.join("ml_weights.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

/// Base parameters and one alternative value for every key the manifest
/// records.
type Perturbations = (Subcommand, Vec<&'static str>, Vec<(&'static str, &'static str)>);

fn perturbations() -> Vec<Perturbations> {
    use Subcommand::*;
    vec![
        (MlWeights, vec![], vec![("alpha", "0.7"), ("m", "2"), ("n_max", "30")]),
        (
            FunctionalCheck,
            vec!["samples=5000"],
            vec![
                ("case", "poisson"),
                ("lo", "0.1"),
                ("hi", "0.4"),
                ("amplitude", "2"),
                ("length", "2"),
                ("rho", "1.5"),
                ("samples", "4000"),
                ("n_values", "1024,2048"),
                ("rho_bar", "0.5"),
                ("alpha", "0.7"),
            ],
        ),
        (
            SampleMeasure,
            vec!["draws=5000"],
            vec![
                ("kind", "poisson"),
                ("alpha", "0.7"),
                ("m", "2"),
                ("draws", "4000"),
                ("n_max", "10"),
            ],
        ),
        (
            GirardLimit,
            vec!["n_max=8"],
            vec![
                ("length", "2"),
                ("n_max", "6"),
                ("beta", "0.5"),
                ("rho_bar", "0.5"),
                ("lo", "0.1"),
                ("hi", "0.4"),
                ("amplitude", "2"),
                ("ordering", "left"),
            ],
        ),
        (
            GroundPotential,
            vec!["field=calogero", "points=21"],
            vec![
                ("field", "harmonic"),
                ("particles", "3"),
                ("omega", "2"),
                ("lambda", "-2"),
                ("lo", "-1"),
                ("hi", "1"),
                ("points", "15"),
                ("margin", "1"),
            ],
        ),
        (
            BecCurve,
            vec!["steps=20"],
            vec![("sigmas", "0,0.4"), ("tmin", "0.4"), ("tmax", "1.2"), ("steps", "10")],
        ),
        (QuiverAlgebra, vec!["lattices=1x2"], vec![("lattices", "2x1")]),
        (
            QuiverGround,
            vec!["method=both", "runs=3", "sweeps=200"],
            vec![
                ("lx", "2"),
                ("ly", "2"),
                ("boundary", "periodic"),
                ("electrons", "8"),
                ("U", "50"),
                ("t", "0.5"),
                ("J", "0.3"),
                ("k", "1"),
                ("alpha_q", "1"),
                ("beta_q", "0"),
                ("bond_convention", "unordered"),
                ("nnn_rule", "all_distinct"),
                ("method", "anneal"),
                ("runs", "2"),
                ("t_init", "1"),
                ("cooling", "0.9"),
                ("sweeps", "1"),
            ],
        ),
    ]
}

/// Changing a key only alters the manifest: both orderings give the same
/// determinant, det(I − AD) = det(I − DA).
const NO_OPS: [(Subcommand, &str); 1] = [(Subcommand::GirardLimit, "ordering")];

#[test]
fn every_recorded_parameter_is_live() {
    let cases = perturbations();
    assert_eq!(cases.len(), Subcommand::ALL.len());
    for (cmd, base, changes) in cases {
        let base = pairs(&base);
        let config = resolve(None, Some(cmd.name()), Some(0), None, &base).unwrap();
        let recorded: BTreeSet<String> = execute(&config).unwrap().parameters.into_keys().collect();
        let perturbed: BTreeSet<String> = changes.iter().map(|(k, _)| k.to_string()).collect();
        // Keys read only by other variants (e.g. `lambda`) are in `perturbed`
        // but not in `recorded`; everything recorded must be covered.
        assert!(
            recorded.is_subset(&perturbed),
            "{}: {recorded:?} vs {perturbed:?}",
            cmd.name()
        );

        let reference = outputs(cmd, 0, &base);
        for (key, value) in changes {
            let mut params = base.clone();
            params.push(format!("{key}={value}"));
            let changed = outputs(cmd, 0, &params) != reference;
            let no_op = NO_OPS.contains(&(cmd, key));
            assert_eq!(changed, !no_op, "{} {key}={value}", cmd.name());
        }
    }
}

#[test]
fn seed_matters_only_where_it_is_used() {
    for cmd in Subcommand::ALL {
        let params = match cmd {
            Subcommand::QuiverGround => pairs(&["method=anneal", "runs=4", "sweeps=100"]),
            Subcommand::SampleMeasure => pairs(&["draws=5000"]),
            Subcommand::FunctionalCheck => pairs(&["samples=5000"]),
            Subcommand::QuiverAlgebra => pairs(&["lattices=1x2"]),
            _ => Vec::new(),
        };
        let config = resolve(None, Some(cmd.name()), Some(1), None, &params).unwrap();
        let seed_used = execute(&config).unwrap().seed_used;
        let differs = outputs(cmd, 1, &params) != outputs(cmd, 2, &params);
        assert_eq!(differs, seed_used, "{}", cmd.name());
    }
}

#[test]
fn bec_curve_svg_has_one_line_per_sigma() {
    let files = outputs(Subcommand::BecCurve, 0, &pairs(&["sigmas=0.1,0.4,0.8", "steps=40"]));
    let svg = String::from_utf8(files["cv_curve.svg"].clone()).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<polyline").count(), 3);
    for s in ["0.1", "0.4", "0.8"] {
        assert!(svg.contains(&format!("sigma={s}")), "legend for {s}");
    }
    let csv = String::from_utf8(files["cv_curve.csv"].clone()).unwrap();
    assert_eq!(csv.lines().next(), Some("sigma,T_star,z,u,cv,cv_fd_relerr"));
    assert_eq!(csv.lines().count(), 1 + 3 * 41);
}

#[test]
fn quiver_ground_csv_row() {
    let files = outputs(Subcommand::QuiverGround, 0, &[]);
    let csv = String::from_utf8(files["quiver_ground.csv"].clone()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines,
        [
            "Lx,Ly,boundary,electrons,H,alpha_q,beta_q,U,t,J,k,bond_convention,E_min,n_degenerate,adjacent_hole_pairs,max_cluster",
            "3,3,open,7,2,0,1,100,1,0.6,1.8,ordered,-24,64,0,1",
        ]
    );
}
