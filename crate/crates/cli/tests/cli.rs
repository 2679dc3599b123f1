use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use cardpipe_core::activity::GradeResult;
use cardpipe_core::pipeline::{ExecutionTrace, ValidationReport};
use serde_json::Value;

#[path = "../../server/tests/schemas/mod.rs"]
mod schemas;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn pipeline(name: &str) -> PathBuf {
    root().join("pipelines").join(name)
}

fn cardpipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardpipe"))
        .args(args)
        .env_remove("CARDPIPE_DATA_DIR")
        .output()
        .unwrap()
}

fn text(out: &Output) -> (i32, String, String) {
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout.clone()).unwrap(),
        String::from_utf8(out.stderr.clone()).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("cardpipe-cli-{}-{name}", std::process::id()))
}

#[test]
fn validate_exit_codes() {
    let (code, out, _) = text(&cardpipe(&[
        "validate",
        p(&pipeline("brazil_forest_line.json")),
    ]));
    assert_eq!((code, out.as_str()), (0, "valid: 4 steps\n"));
    let (code, out, _) = text(&cardpipe(&[
        "validate",
        p(&fixture("transform_first.json")),
    ]));
    assert_eq!(code, 1);
    assert!(out.contains("step 0: TYPE_MISMATCH"), "{out}");
    assert_eq!(
        cardpipe(&["validate", "/definitely/missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cardpipe(&["validate", p(&fixture("broken.json"))])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cardpipe(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn run_prints_the_result() {
    let (code, out, _) = text(&cardpipe(&["run", p(&pipeline("spain_average_age.json"))]));
    assert_eq!((code, out.as_str()), (0, "28.5\n"));

    let (code, out, _) = text(&cardpipe(&["run", p(&pipeline("argentina_table.json"))]));
    assert_eq!(code, 0);
    assert!(
        out.contains("L. Messi") && out.contains("P. Dybala"),
        "{out}"
    );

    let (code, out, _) = text(&cardpipe(&[
        "run",
        "--trace",
        p(&pipeline("brazil_forest_line.json")),
    ]));
    assert_eq!(code, 0);
    let blocks: Vec<&str> = out.lines().filter(|l| l.starts_with("== step ")).collect();
    assert_eq!(blocks.len(), 4);
    assert!(blocks[3].contains("line chart: 26 points"));

    let (code, out, err) = text(&cardpipe(&["run", p(&fixture("empty_aggregate.json"))]));
    assert_eq!((code, out.as_str()), (1, ""));
    assert!(
        err.contains("step 2 (average) failed: EMPTY_AGGREGATE"),
        "{err}"
    );

    let (code, _, err) = text(&cardpipe(&["run", p(&fixture("transform_first.json"))]));
    assert_eq!(code, 1);
    assert!(err.contains("TYPE_MISMATCH"));
}

#[test]
fn render_writes_svg() {
    let out = tmp("brazil_line.svg");
    let (code, msg, _) = text(&cardpipe(&[
        "render",
        p(&pipeline("brazil_forest_line.json")),
        "-o",
        p(&out),
    ]));
    assert_eq!(code, 0);
    assert!(
        msg.contains("26 points, missing: title, x-axis label, y-axis label"),
        "{msg}"
    );
    let svg = std::fs::read_to_string(&out).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("point"))
            .count(),
        26
    );
    assert!(doc
        .descendants()
        .any(|n| n.attribute("class") == Some("missing")));

    let (code, msg, _) = text(&cardpipe(&[
        "render",
        p(&fixture("brazil_line_labelled.json")),
        "--out",
        p(&out),
        "--width",
        "400",
        "--height",
        "300",
    ]));
    assert_eq!((code, msg.contains("missing")), (0, false));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.contains("width=\"400\"") && !svg.contains("class=\"missing\""));
    std::fs::remove_file(&out).unwrap();

    assert_eq!(
        cardpipe(&[
            "render",
            p(&pipeline("spain_average_age.json")),
            "-o",
            p(&out)
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        cardpipe(&[
            "render",
            p(&pipeline("brazil_forest_line.json")),
            "-o",
            p(&out),
            "--width",
            "0"
        ])
        .status
        .code(),
        Some(1)
    );
    assert!(!out.exists());
}

#[test]
fn grade_verdicts() {
    let (code, out, _) = text(&cardpipe(&[
        "grade",
        "d3q6",
        p(&pipeline("spain_average_age.json")),
    ]));
    assert_eq!(code, 0);
    assert!(out.starts_with("CORRECT"));
    let (code, out, _) = text(&cardpipe(&["grade", "d3q6", p(&fixture("empty.json"))]));
    assert_eq!(code, 1);
    assert!(out.starts_with("INCORRECT"));
    let (code, out, _) = text(&cardpipe(&[
        "grade",
        "d3q2",
        p(&pipeline("brazil_forest_line.json")),
    ]));
    assert_eq!(code, 1);
    assert!(out.contains("missing"), "{out}");
    assert_eq!(
        cardpipe(&["grade", "d3q2", p(&fixture("brazil_line_labelled.json"))])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        cardpipe(&["grade", "nope", p(&fixture("empty.json"))])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cardpipe(&["grade", "d1q1", p(&fixture("empty.json"))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_outputs_round_trip_through_the_schemas() {
    let json = |args: &[&str]| -> Value {
        let out = cardpipe(args);
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"))
    };
    let check = |name: &str, v: &Value| schemas::check(name, v).unwrap_or_else(|e| panic!("{e}"));

    for entry in std::fs::read_dir(root().join("pipelines")).unwrap() {
        let path = entry.unwrap().path();
        let v = json(&["validate", "--json", p(&path)]);
        check("validation-report", &v);
        let report: ValidationReport = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&report).unwrap(), v);

        let v = json(&["run", "--json", p(&path)]);
        check("trace", &v);
        let trace: ExecutionTrace = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&trace).unwrap(), v);
    }
    let v = json(&["run", "--json", p(&fixture("transform_first.json"))]);
    check("validation-report", &v);
    let v = json(&["run", "--json", p(&fixture("empty_aggregate.json"))]);
    check("trace", &v);
    assert_eq!(v["error"]["code"], "EMPTY_AGGREGATE");

    for (q, f) in [
        ("d3q6", pipeline("spain_average_age.json")),
        ("d3q2", pipeline("brazil_forest_line.json")),
        ("d3q6", fixture("empty.json")),
    ] {
        let v = json(&["grade", "--json", q, p(&f)]);
        check("grade-result", &v);
        let g: GradeResult = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&g).unwrap(), v);
    }
}

#[test]
fn data_dir_adds_datasets_and_a_file_root() {
    let dir = tmp("data");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(dir.join("pets")).unwrap();
    std::fs::write(
        dir.join("pets/pets.csv"),
        "name,legs\ncat,4\nbird,2\nsnake,0\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("pets/manifest.json"),
        r#"{"id":"pets","title":"Pets","description":"d","source_note":"n",
            "schema":[{"column":"name","dtype":"TEXT"},{"column":"legs","dtype":"INTEGER"}]}"#,
    )
    .unwrap();
    std::fs::write(dir.join("loose.csv"), "a\n1\n2\n").unwrap();
    let p1 = dir.join("p1.json");
    std::fs::write(&p1, r#"{"cards":[{"card":"open_csv_file","inputs":{"file":"pets"}},{"card":"maximum","inputs":{"column":"legs"}}]}"#).unwrap();
    let p2 = dir.join("p2.json");
    std::fs::write(
        &p2,
        r#"{"cards":[{"card":"open_csv_file","inputs":{"file":"loose.csv"}},{"card":"count"}]}"#,
    )
    .unwrap();

    let (code, out, _) = text(&cardpipe(&["run", "--data-dir", p(&dir), p(&p1)]));
    assert_eq!((code, out.as_str()), (0, "4\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_cardpipe"))
        .args(["run", p(&p2)])
        .env("CARDPIPE_DATA_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(text(&out).1, "2\n");
    assert_eq!(cardpipe(&["run", p(&p1)]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for entry in std::fs::read_dir(root().join("pipelines")).unwrap() {
        let path = entry.unwrap().path();
        for args in [
            vec!["run", p(&path)],
            vec!["run", "--trace", p(&path)],
            vec!["run", "--json", p(&path)],
        ] {
            assert_eq!(cardpipe(&args).stdout, cardpipe(&args).stdout, "{args:?}");
        }
        let (a, b) = (tmp("a.svg"), tmp("b.svg"));
        let ra = cardpipe(&["render", p(&path), "-o", p(&a)]);
        let rb = cardpipe(&["render", p(&path), "-o", p(&b)]);
        assert_eq!(ra.status.code(), rb.status.code());
        if ra.status.success() {
            assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
            std::fs::remove_file(&a).unwrap();
            std::fs::remove_file(&b).unwrap();
        }
    }
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn get_json(agent: &ureq::Agent, url: &str) -> Value {
    let body = agent
        .get(url)
        .call()
        .unwrap()
        .body_mut()
        .read_to_string()
        .unwrap();
    serde_json::from_str(&body).unwrap()
}

fn post_json(agent: &ureq::Agent, url: &str, body: Value) -> (u16, Value) {
    let mut r = agent
        .post(url)
        .header("content-type", "application/json")
        .send(body.to_string())
        .unwrap();
    (
        r.status().as_u16(),
        serde_json::from_str(&r.body_mut().read_to_string().unwrap()).unwrap(),
    )
}

fn wait_for(url: &str) -> ureq::Agent {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .max_idle_connections(0)
        .build()
        .into();
    let start = Instant::now();
    while agent.get(url).call().is_err() {
        assert!(
            start.elapsed() < Duration::from_secs(20),
            "server did not come up"
        );
        std::thread::sleep(Duration::from_millis(50));
    }
    agent
}

#[test]
fn serve_takes_flags_and_environment() {
    let port = free_port();
    let sessions = tmp("sessions");
    let _ = std::fs::remove_dir_all(&sessions);
    let _server = Server(
        Command::new(env!("CARGO_BIN_EXE_cardpipe"))
            .args(["serve", "--base-points", "7", "--session-dir", p(&sessions)])
            .env("CARDPIPE_PORT", port.to_string())
            .env("CARDPIPE_PUBLIC_URL", "http://10.0.0.5:9000")
            .env("CARDPIPE_LOG", "off")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let base = format!("http://127.0.0.1:{port}");
    let agent = wait_for(&format!("{base}/api/v1/cards"));

    let datasets = get_json(&agent, &format!("{base}/api/v1/datasets"));
    assert_eq!(
        datasets[0]["url"],
        "http://10.0.0.5:9000/datasets/city_bikes.csv"
    );

    let (status, session) = post_json(
        &agent,
        &format!("{base}/api/v1/sessions"),
        serde_json::json!({}),
    );
    assert_eq!(status, 201);
    let id = session["id"].as_str().unwrap();
    post_json(
        &agent,
        &format!("{base}/api/v1/sessions/{id}/join"),
        serde_json::json!({"participant": "ada"}),
    );
    let pipeline: Value =
        serde_json::from_str(&std::fs::read_to_string(pipeline("spain_average_age.json")).unwrap())
            .unwrap();
    let (_, answer) = post_json(
        &agent,
        &format!("{base}/api/v1/sessions/{id}/answer"),
        serde_json::json!({"participant": "ada", "question": "d3q6", "answer": {"pipeline": pipeline}}),
    );
    assert_eq!(answer["score"], 7);
    assert!(sessions.join(format!("{id}.jsonl")).exists());
    drop(_server);
    std::fs::remove_dir_all(&sessions).unwrap();
}

#[test]
fn serve_refuses_a_bad_port() {
    assert_eq!(cardpipe(&["serve", "--port", "0"]).status.code(), Some(2));
    assert_eq!(
        cardpipe(&["serve", "--port", "70000"]).status.code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_cardpipe"))
        .arg("serve")
        .env("CARDPIPE_PORT", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
