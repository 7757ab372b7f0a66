use std::path::Path;

use eyevis_core::eval::{run_corpus_eval, ItemStatus};
use eyevis_core::imaging::{save, ImageFormat};
use eyevis_core::landmarks::{EyeContourIndices, FixtureProvider};
use eyevis_core::synthetic::{render, EyeSpec, SceneSpec};
use eyevis_core::{Config, Rect};

fn spec(shift: u32) -> SceneSpec {
    let s = f64::from(shift);
    SceneSpec {
        width: 128,
        height: 96,
        eyes: [
            EyeSpec::new(36.0 + s, 48.0, 14.0, 5.0 + s / 4.0),
            EyeSpec::new(92.0 - s, 48.0, 14.0, 5.0),
        ],
        black: Some(Rect::new(8, 66 + shift, 120, 90).unwrap()),
        pink: Some(Rect::new(8 + shift, 4, 120, 28).unwrap()),
    }
}

fn write_corpus(dir: &Path, n: u32) -> FixtureProvider {
    let idx = EyeContourIndices::default();
    let mut provider = FixtureProvider::new();
    for i in 0..n {
        let name = format!("item{i}.png");
        let scene = render(&spec(i * 2), &idx, &name).unwrap();
        save(&scene.image, dir.join(&name)).unwrap();
        std::fs::write(
            dir.join(format!("item{i}.annotations.json")),
            scene.annotations.to_json(),
        )
        .unwrap();
        provider.insert(&scene.image, scene.landmarks);
    }
    provider
}

#[test]
fn constructed_corpus_scores_one_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let provider = write_corpus(dir.path(), 3);
    let report = run_corpus_eval(dir.path(), &provider, &Config::default()).unwrap();
    assert_eq!(report.items.len(), 3);
    assert_eq!(report.failed, 0);
    assert!(report.warnings.is_empty());
    for item in &report.items {
        assert_eq!(item.status, ItemStatus::Ok);
        assert_eq!(item.overlap.r_eye, Some(1.0), "{}", item.item);
        assert_eq!(item.overlap.r_pink, Some(1.0));
        assert_eq!(item.overlap.r_black, Some(1.0));
        assert_eq!(item.overlap.r_bin, Some(1.0));
    }
    assert_eq!(report.averages.r_eye, Some(1.0));
    assert_eq!(report.averages.r_bin, Some(1.0));

    let out = dir.path().join("report.json");
    report.write(&out).unwrap();
    let back: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(back["items"][0]["r_pink"], 1.0);
    assert_eq!(back["items"][0]["status"], "ok");
}

#[test]
fn empty_corpus_warns() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_corpus_eval(dir.path(), &FixtureProvider::new(), &Config::default()).unwrap();
    assert!(report.items.is_empty());
    assert_eq!(report.failed, 0);
    assert_eq!(report.warnings.len(), 1);
    assert_eq!(report.averages.r_eye, None);
}

#[test]
fn bad_items_fail_alone() {
    let dir = tempfile::tempdir().unwrap();
    let provider = write_corpus(dir.path(), 2);
    // corrupt the second image
    std::fs::write(dir.path().join("item1.png"), b"\x89PNG\r\n\x1a\n broken").unwrap();
    // an annotation naming a missing file
    std::fs::write(
        dir.path().join("zz.annotations.json"),
        r#"{"image":"missing.png","shapes":[]}"#,
    )
    .unwrap();
    // an image the provider knows nothing about
    let stranger = render(&spec(10), &EyeContourIndices::default(), "stranger.jpg").unwrap();
    save(&stranger.image, dir.path().join("stranger.jpg")).unwrap();
    assert_eq!(ImageFormat::from_path(Path::new("stranger.jpg")), Some(ImageFormat::Jpeg));
    std::fs::write(
        dir.path().join("stranger.annotations.json"),
        stranger.annotations.to_json(),
    )
    .unwrap();

    let report = run_corpus_eval(dir.path(), &provider, &Config::default()).unwrap();
    let status: Vec<(&str, ItemStatus)> = report
        .items
        .iter()
        .map(|i| (i.item.as_str(), i.status))
        .collect();
    assert_eq!(
        status,
        vec![
            ("item0", ItemStatus::Ok),
            ("item1", ItemStatus::Failed),
            ("stranger", ItemStatus::Failed),
            ("zz", ItemStatus::Failed),
        ]
    );
    assert_eq!(report.failed, 3);
    assert_eq!(report.warnings.len(), 3);
    assert_eq!(report.averages.r_eye, Some(1.0));
}
