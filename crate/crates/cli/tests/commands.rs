mod common;

use common::{code, stderr, Workspace, CUBIC, FAMILY_R};
use nls_ground::{FieldVector, RadialGrid};
use nls_ground_cli::profile::{read_profile, write_profile};

#[test]
fn solve_cubic_writes_result_and_profile() {
    let ws = Workspace::new();
    let cfg = ws.write("cubic.toml", CUBIC);
    let out = ws.run("solve", &cfg, "out", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = ws.json("out/result.json");
    let total = doc["energy"]["total"].as_f64().unwrap();
    let lambda = doc["lambda"][0].as_f64().unwrap();
    assert!((total + 1.0 / 96.0).abs() <= 0.01 / 96.0, "{total}");
    assert!((lambda + 1.0 / 16.0).abs() <= 0.01 / 16.0, "{lambda}");
    assert_eq!(doc["verification"]["all_pass"], true);

    let text = std::fs::read_to_string(ws.path("out/profile.csv")).unwrap();
    assert!(text.starts_with("r,u_1\n"));
    let grid = RadialGrid::uniform(1, 4096, 20.0).unwrap();
    let field = read_profile(&ws.path("out/profile.csv"), &grid).unwrap();
    assert!((grid.mass(field.component(0)).unwrap() - 1.0).abs() <= 1e-10);
    // writing the parsed field again reproduces the file byte for byte
    write_profile(&ws.path("again.csv"), &grid, &field).unwrap();
    assert_eq!(std::fs::read_to_string(ws.path("again.csv")).unwrap(), text);
}

#[test]
fn solve_zero_coupling_reports_non_attainment() {
    let ws = Workspace::new();
    let cfg = ws.write(
        "zero.toml",
        "[problem]\ndimension = 1\ncomponents = 1\nmasses = [1.0]\ncells = 256\n\n\
         [nonlinearity]\nfamily = \"zero\"\n\n[solver]\nmax_iterations = 2000\n",
    );
    let out = ws.run("solve", &cfg, "out", &[]);
    assert_eq!(code(&out), 2);
    let doc = ws.json("out/result.json");
    assert!(doc["diagnostic"].as_str().unwrap().contains("non-attainment"));
}

#[test]
fn malformed_config_names_the_field() {
    let ws = Workspace::new();
    let cfg = ws.write("bad.toml", &CUBIC.replace("masses = [1.0]", "masses = [0.0]"));
    let out = ws.run("solve", &cfg, "out", &[]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("problem.masses") && err.contains("line 5"), "{err}");

    let cfg = ws.write("typo.toml", &format!("{CUBIC}\n[solver]\nmax_iters = 10\n"));
    let out = ws.run("solve", &cfg, "out", &[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("max_iters"));

    let out = ws.run("solve", &ws.path("missing.toml"), "out", &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn certify_exit_codes() {
    let ws = Workspace::new();
    let cfg = ws.write("r.toml", FAMILY_R);
    let out = ws.run("certify", &cfg, "r", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = ws.json("r/certificate.json");
    assert_eq!(doc["found"], true);
    assert!(doc["energy_value"].as_f64().unwrap() < 0.0);
    assert!(!doc["scan_table"].as_array().unwrap().is_empty());

    let zero = CUBIC.replace("family = \"power\"\nexponent = 2.0\nbeta = 0.0", "family = \"zero\"");
    let cfg = ws.write("zero.toml", &zero.replace("4096", "512"));
    assert_eq!(code(&ws.run("certify", &cfg, "z", &[])), 3);

    let sextic = CUBIC.replace("exponent = 2.0", "exponent = 4.0").replace("4096", "8192")
        + "\n[certify]\nkind = \"dilation\"\nalphas = [1.0, 3.1622776601683795, 10.0, 31.622776601683793, 100.0, 316.22776601683796, 1000.0, 3162.2776601683795, 10000.0]\n";
    let cfg = ws.write("sextic.toml", &sextic);
    let out = ws.run("certify", &cfg, "s", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(ws.json("s/certificate.json")["scan"]["unbounded_below"], true);

    // a potential certificate without a potential is an error
    let cfg = ws.write("nopot.toml", &format!("{}\n[certify]\nkind = \"potential\"\n", CUBIC.replace("4096", "256")));
    assert_eq!(code(&ws.run("certify", &cfg, "p", &[])), 1);
}

#[test]
fn potential_certificate_in_three_dimensions() {
    let ws = Workspace::new();
    let cfg = ws.write(
        "well.toml",
        "[problem]\ndimension = 3\ncomponents = 1\nmasses = [1.0]\ncells = 1024\nr_max = 10.0\n\n\
         [nonlinearity]\nfamily = \"zero\"\n\n[potential]\nbreakpoints = [2.0]\nlevels = [3.0, 0.0]\n\n\
         [certify]\nkind = \"potential\"\n",
    );
    let out = ws.run("certify", &cfg, "w", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(ws.json("w/certificate.json")["parameter_name"], "R");
}

#[test]
fn check_reports_per_hypothesis() {
    let ws = Workspace::new();
    let cfg = ws.write("p.toml", &CUBIC.replace("beta = 0.0", "beta = 1.0"));
    let out = ws.run("check", &cfg, "p", &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = ws.json("p/hypotheses.json");
    assert_eq!(doc["all_pass"], true);

    // ℓ sum = 4 ≥ 4/N with N = 1
    let heavy = FAMILY_R
        .replace("dimension = 2", "dimension = 1")
        .replace("terms = [[0.5, 0.5]]", "terms = [[2.0, 2.0]]");
    let cfg = ws.write("heavy.toml", &heavy);
    let out = ws.run("check", &cfg, "h", &[]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert_eq!(ws.json("h/hypotheses.json")["hypotheses"]["g1"]["holds_on_samples"], false);

    let cfg = ws.write(
        "up.toml",
        &format!("{CUBIC}\n[potential]\nbreakpoints = [1.0, 2.0]\nlevels = [1.0, 2.0, 0.0]\n"),
    );
    let out = ws.run("check", &cfg, "u", &[]);
    assert_eq!(code(&out), 3);
    let p1 = &ws.json("u/hypotheses.json")["potential"][0];
    assert_eq!(p1["clause"], "P1");
    assert_eq!(p1["holds"], false);
    assert!(!p1["witness_radii"].as_array().unwrap().is_empty());
}

#[test]
fn rearrange_command() {
    let ws = Workspace::new();
    let cfg = ws.write("r.toml", &FAMILY_R.replace("512", "64"));
    let grid = RadialGrid::uniform(2, 64, 30.0).unwrap();

    let sym = FieldVector::new(vec![grid.sample(|r| (-r).exp()), grid.sample(|r| 1.0 / (1.0 + r))]).unwrap();
    write_profile(&ws.path("sym.csv"), &grid, &sym).unwrap();
    let out = ws.run("rearrange", &cfg, "a", &["--input", ws.path("sym.csv").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_profile(&ws.path("a/rearranged.csv"), &grid).unwrap(), sym);

    let bumpy = FieldVector::new(vec![
        grid.sample(|r| (r * 1.7).sin().abs()),
        grid.sample(|r| (-(r - 10.0).powi(2)).exp()),
    ])
    .unwrap();
    write_profile(&ws.path("bumpy.csv"), &grid, &bumpy).unwrap();
    let out = ws.run("rearrange", &cfg, "b", &["--input", ws.path("bumpy.csv").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = ws.json("b/rearrangement.json");
    for i in 0..2 {
        let (x, y) = (
            doc["report"]["l2_before"][i].as_f64().unwrap(),
            doc["report"]["l2_after"][i].as_f64().unwrap(),
        );
        assert!((x - y).abs() <= 1e-12 * x);
    }
    let (gb, ga) = (
        doc["report"]["g_integral_before"].as_f64().unwrap(),
        doc["report"]["g_integral_after"].as_f64().unwrap(),
    );
    assert!(ga >= gb);

    let other = RadialGrid::uniform(2, 32, 30.0).unwrap();
    write_profile(&ws.path("short.csv"), &other, &FieldVector::zeros(2, 32)).unwrap();
    let out = ws.run("rearrange", &cfg, "c", &["--input", ws.path("short.csv").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn seed_flag_and_repeatability() {
    let ws = Workspace::new();
    let cfg = ws.write(
        "c.toml",
        &format!("{}\n[solver]\ninitial_guess = \"random_positive\"\n", CUBIC.replace("4096", "512")),
    );
    for dir in ["x", "y"] {
        assert_eq!(code(&ws.run("solve", &cfg, dir, &["--seed", "9"])), 0);
    }
    let (x, y) = (ws.json("x/result.json"), ws.json("y/result.json"));
    assert_eq!(x["seed"], 9);
    assert_eq!(x["energy_history"].to_string(), y["energy_history"].to_string());
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            nls_ground_cli::config::RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 5);
}
