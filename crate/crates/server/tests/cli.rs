mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};
use std::time::Duration;

use eyevis_core::imaging::{save, RasterImage};
use eyevis_core::landmarks::{EyeContourIndices, LandmarkFile};
use eyevis_core::synthetic::{render, EyeSpec, SceneSpec};
use eyevis_core::Rect;

fn eyevis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eyevis"))
        .args(args)
        .env_remove("EYEVIS_PORT")
        .env_remove("EYEVIS_DATA_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn stats_on_shipped_table() {
    let out = eyevis(&["stats"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for (col, avg, std) in [
        ("r_p_baseline", "19.84", "6.51"),
        ("r_p_eyevis_mean", "4.00", "1.66"),
        ("r_b_baseline", "19.48", "6.81"),
        ("r_b_eyevis_mean", "3.63", "1.61"),
    ] {
        let line = text.lines().find(|l| l.starts_with(col)).unwrap();
        assert_eq!(line.split_whitespace().collect::<Vec<_>>(), [col, avg, std]);
    }
    let json: serde_json::Value = serde_json::from_str(&stdout(&eyevis(&["stats", "--json"]))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
}

#[test]
fn bad_paths_exit_nonzero() {
    for args in [
        vec!["stats", "/no/such/table.csv"],
        vec!["illum", "/no/such/group"],
        vec!["visualize", "/no/such.png", "/tmp/x"],
        vec!["evaluate", "/no/such/corpus", "--out", "/tmp/r.json"],
    ] {
        let out = eyevis(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn illum_identical_copies_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g1");
    std::fs::create_dir(&g).unwrap();
    let img = RasterImage::from_fn(20, 10, |x, y| [x as u8 * 9, y as u8 * 20, 77]).unwrap();
    for n in ["a.png", "b.png", "c.png"] {
        save(&img, g.join(n)).unwrap();
    }
    let out = eyevis(&["illum", p(&g), "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["d_ab", "d_ac", "d_bc"] {
        assert_eq!(rows[0][key], 0.0);
    }
    assert_eq!(rows[1]["group"], "average");
    let table = stdout(&eyevis(&["illum", p(&g)]));
    assert!(table.starts_with("group"));
}

#[test]
fn visualize_white_image() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("white.png");
    save(&RasterImage::filled(16, 16, [255; 3]).unwrap(), &img_path).unwrap();
    let out_dir = dir.path().join("vis");
    let out = eyevis(&["visualize", p(&img_path), p(&out_dir)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["black_ratio"], 0.0);
    assert_eq!(v["pink_ratio"], 0.0);
    for name in ["original", "black_vis", "pink_vis", "combined", "contour_vis"] {
        assert!(out_dir.join(format!("{name}.png")).is_file());
    }
}

fn write_corpus(dir: &Path) {
    let idx = EyeContourIndices::default();
    for i in 0..2u32 {
        let name = format!("s{i}.png");
        let spec = SceneSpec {
            width: 96,
            height: 64,
            eyes: [
                EyeSpec::new(30.0 + i as f64, 32.0, 10.0, 4.0),
                EyeSpec::new(66.0, 32.0, 10.0, 4.0),
            ],
            black: Some(Rect::new(4, 44, 92, 60).unwrap()),
            pink: Some(Rect::new(4, 4, 92, 20).unwrap()),
        };
        let scene = render(&spec, &idx, &name).unwrap();
        save(&scene.image, dir.join(&name)).unwrap();
        std::fs::write(dir.join(format!("s{i}.annotations.json")), scene.annotations.to_json()).unwrap();
        let doc = LandmarkFile::new(Some(name.clone()), &scene.landmarks);
        std::fs::write(dir.join(format!("s{i}.landmarks.json")), doc.to_json()).unwrap();
    }
}

#[test]
fn evaluate_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus);
    let report = dir.path().join("report.json");

    let out = eyevis(&["evaluate", p(&corpus), "--out", p(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["failed"], 0);
    for k in ["r_eye", "r_pink", "r_black", "r_bin"] {
        assert_eq!(v["averages"][k], 1.0, "{k}");
    }

    std::fs::write(corpus.join("broken.annotations.json"), "{not json").unwrap();
    let out = eyevis(&["evaluate", p(&corpus), "--out", p(&report)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: broken"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["failed"], 1);

    let out = eyevis(&["evaluate", p(&corpus), "--out", p(&report), "--allow-failures"]);
    assert!(out.status.success());
}

struct Served {
    child: Child,
    addr: String,
}

fn spawn_serve(args: &[&str]) -> Served {
    let mut child = Command::new(env!("CARGO_BIN_EXE_eyevis"))
        .arg("serve")
        .args(args)
        .env_remove("EYEVIS_PORT")
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on http://")
        .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
        .to_string();
    Served { child, addr }
}

fn raw_request(addr: &str, request: &[u8]) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(20))).unwrap();
    s.write_all(request).unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

fn get(addr: &str, path: &str) -> String {
    raw_request(
        addr,
        format!("GET {path} HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").as_bytes(),
    )
}

#[test]
fn serve_health_and_busy_port() {
    let dir = tempfile::tempdir().unwrap();
    let mut srv = spawn_serve(&["--data-dir", p(dir.path()), "--port", "0"]);
    let resp = get(&srv.addr, "/health");
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains(env!("CARGO_PKG_VERSION")));

    let port = srv.addr.rsplit(':').next().unwrap();
    let out = eyevis(&["serve", "--data-dir", p(dir.path()), "--port", port]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot listen"));
    srv.child.kill().unwrap();
    srv.child.wait().unwrap();
}

#[test]
fn unwritable_data_dir_fails_startup() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    let out = eyevis(&["serve", "--data-dir", p(&file.join("sub")), "--port", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("data directory"));
}

#[test]
fn env_selects_data_dir_and_port() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_eyevis"))
        .arg("serve")
        .env("EYEVIS_DATA_DIR", dir.path())
        .env("EYEVIS_PORT", "0")
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap().to_string();
    let resp = raw_request(&addr, b"POST /users HTTP/1.1\r\nHost: x\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    assert!(resp.starts_with("HTTP/1.1 201"), "{resp}");
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(dir.path().join("events.log").is_file());
}

fn multipart_request(path: &str, png: &[u8]) -> Vec<u8> {
    let boundary = "XyZ0boundary";
    let mut body = Vec::new();
    body.extend_from_slice(
        format!(
            "--{boundary}\r\nContent-Disposition: form-data; name=\"image\"; filename=\"f.png\"\r\nContent-Type: image/png\r\n\r\n"
        )
        .as_bytes(),
    );
    body.extend_from_slice(png);
    body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
    let mut req = format!(
        "POST {path} HTTP/1.1\r\nHost: x\r\nConnection: close\r\nContent-Type: multipart/form-data; boundary={boundary}\r\nContent-Length: {}\r\n\r\n",
        body.len()
    )
    .into_bytes();
    req.extend_from_slice(&body);
    req
}

#[cfg(unix)]
#[test]
fn sigterm_lets_inflight_request_finish() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let persona = common::persona();
    let landmarks = dir.path().join("face.landmarks.json");
    std::fs::write(&landmarks, LandmarkFile::new(None, &persona.face_landmarks).to_json()).unwrap();
    // a slow detector: ignores its input, answers after a pause
    let script = format!("sleep 1; cat '{}'", landmarks.display());
    let mut srv = spawn_serve(&[
        "--data-dir",
        p(&data),
        "--port",
        "0",
        "--provider",
        "external",
        "--external-cmd",
        "sh",
        "--external-arg",
        "-c",
        "--external-arg",
        &script,
    ]);
    let created = raw_request(&srv.addr, b"POST /users HTTP/1.1\r\nHost: x\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    assert!(created.contains("user-1"), "{created}");

    let addr = srv.addr.clone();
    let face = common::png(&persona.face);
    let inflight = std::thread::spawn(move || {
        raw_request(&addr, &multipart_request("/users/user-1/captures?kind=baseline-face", &face))
    });
    std::thread::sleep(Duration::from_millis(400));
    let status = Command::new("kill")
        .args(["-TERM", &srv.child.id().to_string()])
        .status()
        .unwrap();
    assert!(status.success());

    let resp = inflight.join().unwrap();
    assert!(resp.starts_with("HTTP/1.1 201"), "{resp}");
    let exit = srv.child.wait().unwrap();
    assert!(exit.success(), "{exit:?}");
    let log = std::fs::read_to_string(data.join("events.log")).unwrap();
    assert!(log.contains("capture_recorded"));
}
