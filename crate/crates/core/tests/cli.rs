use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use hypercube_density::estimators::{estimate_at, EstimatorConfig};
use hypercube_density::synth::Planted;
use hypercube_density::{CellIndex, CountsVector, HypercubePoint};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcdensity"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap()
}

fn values(report: &Value) -> Vec<f64> {
    report["estimate"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect()
}

const THREE_ROWS: &str = "1,1\n1,-1\n1,1\n";

#[test]
fn uniform_and_frequency_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("data.csv"), THREE_ROWS).unwrap();
    std::fs::write(
        d.join("uniform.toml"),
        "[estimator]\nvariant = \"linear\"\nshrinkage = { form = \"sparse\", n = 2, entries = [] }\n",
    )
    .unwrap();
    std::fs::write(
        d.join("freq.toml"),
        "[estimator]\nvariant = \"linear\"\nshrinkage = { form = \"dense\", values = [1.0, 1.0, 1.0, 1.0] }\n",
    )
    .unwrap();

    let out = run(
        d,
        &[
            "estimate",
            "--data",
            "data.csv",
            "--config",
            "uniform.toml",
            "--out",
            "u.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(values(&json(d, "u.json")), vec![0.25; 4]);

    let out = run(
        d,
        &[
            "estimate",
            "--data",
            "data.csv",
            "--config",
            "freq.toml",
            "--out",
            "f.json",
        ],
    );
    assert!(out.status.success());
    let r = json(d, "f.json");
    // cells in index order: ++, -+, +-, --
    assert_eq!(values(&r), vec![2.0 / 3.0, 0.0, 1.0 / 3.0, 0.0]);
    assert_eq!(r["estimate"]["cells"][2], "+-");
    assert_eq!(r["estimate"]["normalizers"][0]["method"], "linear_trivial");
    assert!(r.get("timing").is_none());

    let out = run(
        d,
        &[
            "estimate",
            "--data",
            "data.csv",
            "--config",
            "freq.toml",
            "--out",
            "t.json",
            "--timing",
        ],
    );
    assert!(out.status.success());
    assert!(json(d, "t.json")["timing"]["total_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn bits_encoding_matches_signs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("signs.csv"), THREE_ROWS).unwrap();
    std::fs::write(d.join("bits.csv"), "0 0\n0 1\n0 0\n").unwrap();
    std::fs::write(
        d.join("c.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 2\nlambda = 0.8\n",
    )
    .unwrap();
    std::fs::write(
        d.join("cb.toml"),
        "[data]\ndelimiter = \" \"\n[estimator]\nvariant = \"aa_classic\"\nn = 2\nlambda = 0.8\n",
    )
    .unwrap();
    assert!(run(
        d,
        &[
            "estimate",
            "--data",
            "signs.csv",
            "--config",
            "c.toml",
            "--out",
            "a.json"
        ]
    )
    .status
    .success());
    assert!(run(
        d,
        &[
            "estimate",
            "--data",
            "bits.csv",
            "--encoding",
            "bits",
            "--config",
            "cb.toml",
            "--out",
            "b.json"
        ]
    )
    .status
    .success());
    assert_eq!(json(d, "a.json")["estimate"], json(d, "b.json")["estimate"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("data.csv"), "1,1\n1,x\n").unwrap();
    std::fs::write(
        d.join("c.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 2\nlambda = 0.8\n",
    )
    .unwrap();
    let out = run(
        d,
        &[
            "estimate", "--data", "data.csv", "--config", "c.toml", "--out", "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    std::fs::write(
        d.join("bad.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 2\nlambda = 1.0\n",
    )
    .unwrap();
    assert_eq!(
        run(
            d,
            &["estimate", "--data", "data.csv", "--config", "bad.toml", "--out", "r.json"]
        )
        .status
        .code(),
        Some(2)
    );

    // every cell at n = 21 is beyond the full-vector limit
    let wide = format!("{}\n", vec!["1"; 21].join(","));
    std::fs::write(d.join("wide.csv"), &wide).unwrap();
    std::fs::write(
        d.join("wide.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 21\nlambda = 0.8\n",
    )
    .unwrap();
    let out = run(
        d,
        &[
            "estimate",
            "--data",
            "wide.csv",
            "--config",
            "wide.toml",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // tanh of b = e_2 sums to zero over a row
    std::fs::write(d.join("ok.csv"), "1,1\n").unwrap();
    std::fs::write(
        d.join("zero.toml"),
        "[estimator]\nvariant = \"transformed\"\nshrinkage = { form = \"dense\", values = [0.0, 1.0, 0.0, 0.0] }\ntransform = { kind = \"tanh\", scale = 1.0 }\n",
    )
    .unwrap();
    let out = run(
        d,
        &[
            "estimate",
            "--data",
            "ok.csv",
            "--config",
            "zero.toml",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.join("r.json").exists());
}

#[test]
fn query_conditional_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("data.csv"), "1,1,-1\n1,-1,-1\n1,1,1\n1,-1,1\n").unwrap();
    std::fs::write(
        d.join("u.toml"),
        "[estimator]\nvariant = \"linear\"\nshrinkage = { form = \"sparse\", n = 3, entries = [] }\n",
    )
    .unwrap();
    std::fs::write(
        d.join("f.toml"),
        "[estimator]\nvariant = \"linear\"\nshrinkage = { form = \"dense\", values = [1, 1, 1, 1, 1, 1, 1, 1] }\n",
    )
    .unwrap();
    for (cfg, expected) in [("u.toml", 0.0), ("f.toml", 1.0)] {
        assert!(run(
            d,
            &["estimate", "--data", "data.csv", "--config", cfg, "--out", "fit.json"]
        )
        .status
        .success());
        let out = run(
            d,
            &[
                "query",
                "--fit",
                "fit.json",
                "--cells",
                "+++,+-+,++-",
                "--response",
                "1",
                "--out",
                "q.json",
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let q = json(d, "q.json");
        for row in q["conditional"].as_array().unwrap() {
            assert_eq!(row["expectation"].as_f64().unwrap(), expected, "{cfg}: {row}");
        }
    }
}

#[test]
fn waak_query_matches_two_cell_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let planted = Planted::Clusters {
        prototypes: vec!["++-+-".into(), "-+--+".into()],
        flip: vec![0.2; 5],
    };
    let points = planted.sample(25, 4).unwrap();
    let rows: String = points
        .iter()
        .map(|p| p.entries().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(d.join("data.csv"), rows).unwrap();
    std::fs::write(
        d.join("c.toml"),
        "[estimator]\nvariant = \"waak\"\nweights = [1.0, 0.5, 0.8, 0.2, 0.6]\ngamma = 2.5\n",
    )
    .unwrap();
    assert!(run(
        d,
        &["estimate", "--data", "data.csv", "--config", "c.toml", "--out", "fit.json", "--cells", "+++++"]
    )
    .status
    .success());
    assert!(run(
        d,
        &[
            "query",
            "--fit",
            "fit.json",
            "--cells",
            "++-+-,-+--+",
            "--response",
            "3",
            "--out",
            "q.json"
        ]
    )
    .status
    .success());
    let q = json(d, "q.json");

    let est = EstimatorConfig::waak(vec![1.0, 0.5, 0.8, 0.2, 0.6], 2.5)
        .build()
        .unwrap();
    let counts = CountsVector::from_observations(&points).unwrap();
    for (row, cell) in q["conditional"].as_array().unwrap().iter().zip(["++-+-", "-+--+"]) {
        let base = HypercubePoint::parse_signs(cell).unwrap();
        let mut plus = base.entries().to_vec();
        plus[2] = 1;
        let mut minus = plus.clone();
        minus[2] = -1;
        let cells: Vec<CellIndex> = [plus, minus]
            .into_iter()
            .map(|e| hypercube_density::walsh::index_of_point(&HypercubePoint::new(e).unwrap()))
            .collect();
        let v = estimate_at(&cells, &est, &counts).unwrap().values;
        let expected = (v[0] - v[1]) / (v[0] + v[1]);
        assert!((row["expectation"].as_f64().unwrap() - expected).abs() < 1e-15);
    }
}

#[test]
fn high_dimensional_point_queries() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let n = 20;
    std::fs::write(
        d.join("c.toml"),
        format!(
            "seed = 3\n[data]\npath = \"data.csv\"\n[estimator]\nvariant = \"waak\"\nweights = {:?}\ngamma = 2.0\n[synth]\ncount = 200\nmodel = {{ model = \"product\", means = {:?} }}\n",
            vec![0.7; n],
            vec![0.2; n]
        ),
    )
    .unwrap();
    assert!(run(d, &["synth", "--config", "c.toml", "--out", "data.csv"])
        .status
        .success());
    let cells = "++++++++++++++++++++,--------------------,1,2,524288";
    let out = run(
        d,
        &["estimate", "--config", "c.toml", "--out", "r.json", "--cells", cells],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = values(&json(d, "r.json"));
    assert_eq!(v.len(), 5);
    assert!(v.iter().all(|x| *x > 0.0 && *x < 1.0));
}

#[test]
fn cv_reports_accounting_for_both_losses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("c.toml"),
        "seed = 9\n[data]\npath = \"data.csv\"\n[estimator]\nvariant = \"aa_classic\"\nn = 6\nlambda = 0.8\n\
         [cv]\naxes = [{ param = \"lambda\", values = [0.6, 0.75, 0.9] }]\n\
         [synth]\ncount = 30\nmodel = { model = \"single_interaction\", coefficients = [0.5, 0.3, 0.0, 0.0, 0.0, 0.0] }\n",
    )
    .unwrap();
    assert!(run(d, &["synth", "--config", "c.toml", "--out", "data.csv"])
        .status
        .success());
    for loss in ["se", "kl"] {
        let out = run(
            d,
            &[
                "cv",
                "--config",
                "c.toml",
                "--loss",
                loss,
                "--threads",
                "3",
                "--out",
                "cv.json",
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let r = json(d, "cv.json");
        let acc = &r["accounting"];
        let k = acc["observations"].as_u64().unwrap();
        assert_eq!(acc["element_bound"].as_u64().unwrap(), k * (k - 1) / 2);
        assert!(acc["element_evaluations"].as_u64() <= acc["element_bound"].as_u64());
        assert!(acc["squared_element_evaluations"].as_u64() <= acc["squared_element_bound"].as_u64());
        assert_eq!(r["table"].as_array().unwrap().len(), 3);
        assert_eq!(r["loss"], loss);
    }

    // one-point grid and an exceeded budget
    std::fs::write(
        d.join("one.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 6\nlambda = 0.7\n",
    )
    .unwrap();
    assert!(run(
        d,
        &["cv", "--data", "data.csv", "--config", "one.toml", "--out", "one.json"]
    )
    .status
    .success());
    assert_eq!(json(d, "one.json")["fitted"]["lambda"], 0.7);
    std::fs::write(
        d.join("budget.toml"),
        "[estimator]\nvariant = \"aa_classic\"\nn = 6\nlambda = 0.7\n[cv]\nbudget = 2\naxes = [{ param = \"lambda\", values = [0.6, 0.75, 0.9] }]\n",
    )
    .unwrap();
    let out = run(
        d,
        &["cv", "--data", "data.csv", "--config", "budget.toml", "--out", "b.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(d, "b.json")["complete"], false);
}

#[test]
fn bench_quick_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(d, &["bench", "--quick", "--max-n", "12", "--out", "bench.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(d, "bench.json");
    let rows = r["rows"].as_array().unwrap();
    for regime in ["linear_sparse_b", "exponential_b_w", "logistic_b_w", "general"] {
        assert!(rows.iter().any(|row| row["regime"] == regime), "{regime}");
    }
    assert!(rows.iter().any(|row| row["n"] == 10_000));
    assert!(!r["scaling"].as_array().unwrap().is_empty());
}
