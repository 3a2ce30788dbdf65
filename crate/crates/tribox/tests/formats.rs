//! External format checks: box files round-trip bit-exactly and re-analysis
//! reproduces identical reports.

use tribox::{analyze_box, mermin_family, svetlichny_family, TripartiteBox};

#[test]
fn json_round_trip_reproduces_reports() {
    let b = svetlichny_family(0.775).unwrap();
    let before = analyze_box(&b, "src", 1e-10).unwrap();
    let parsed = TripartiteBox::from_json(&b.to_json()).unwrap();
    let after = analyze_box(&parsed, "src", 1e-10).unwrap();
    assert_eq!(before.to_json(), after.to_json());
}

#[test]
fn csv_round_trip_reproduces_reports() {
    let b = mermin_family(0.613).unwrap();
    let before = analyze_box(&b, "src", 1e-10).unwrap();
    let parsed = TripartiteBox::from_csv(&b.to_csv()).unwrap();
    let after = analyze_box(&parsed, "src", 1e-10).unwrap();
    assert_eq!(before.to_json(), after.to_json());
    assert_eq!(b.to_csv(), parsed.to_csv());
}

#[test]
fn json_blocks_have_fixed_layout() {
    let b = svetlichny_family(0.5).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 8);
    // Settings in (x,y,z) lexicographic order, 8 outcome probs per block.
    assert_eq!(arr[0]["settings"], serde_json::json!([0, 0, 0]));
    assert_eq!(arr[7]["settings"], serde_json::json!([1, 1, 1]));
    assert_eq!(arr[3]["probs"].as_array().unwrap().len(), 8);
}

#[test]
fn malformed_files_give_located_errors() {
    let err = TripartiteBox::from_json("[{\"settings\": [0,0,0]}]").unwrap_err();
    assert!(matches!(err, tribox::Error::Parse { .. }));

    let err = TripartiteBox::from_csv("x,y,z,a,b,c,p\n0,0,2,0,0,0,0.1\n").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 2"), "{msg}");

    // A signaling file parses but fails analysis validation.
    let mut bad = TripartiteBox::uniform();
    bad.set_prob(0, 0, 0, 0, 0, 0, 0.135);
    bad.set_prob(0, 0, 0, 0, 0, 1, 0.115);
    let text = bad.to_csv();
    let parsed = TripartiteBox::from_csv(&text).unwrap();
    assert!(analyze_box(&parsed, "bad", 1e-10).is_err());
}
