use serde_json::Value;
use tic_wasm::api;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

const SQUARE_WITH_TAIL: &str = "# a square with a tail\n0 1\n1 2\n2 3\n3 0\n3 4\n4 5\n";

#[test]
fn layout_is_deterministic_and_normalized() {
    let a = api::layout_graph(SQUARE_WITH_TAIL, 3, 2).unwrap();
    assert_eq!(a, api::layout_graph(SQUARE_WITH_TAIL, 3, 2).unwrap());
    let v = parse(&a);
    let pos = v["positions"].as_array().unwrap();
    assert_eq!(pos.len(), 6);
    assert_eq!(v["edges"].as_array().unwrap().len(), 6);
    for k in 0..3 {
        let xs: Vec<f64> = pos.iter().map(|p| p[k].as_f64().unwrap()).collect();
        let span = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(span <= 1.0 + 1e-9);
    }
}

#[test]
fn scoring_reports_answer_and_region() {
    let layout = api::layout_graph(SQUARE_WITH_TAIL, 1, 1).unwrap();
    let cn = parse(&api::score_pair(SQUARE_WITH_TAIL, &layout, 0, 2, "cn").unwrap());
    assert_eq!(cn["task"], "CN");
    assert_eq!(cn["answer"], 2);
    assert_eq!(cn["region"]["kind"], "sphere");
    assert!(cn["signal"].as_f64().unwrap() >= 0.0);

    let sp = parse(&api::score_pair(SQUARE_WITH_TAIL, &layout, 1, 5, "sp").unwrap());
    assert_eq!(sp["answer"], 4);
    assert_eq!(sp["region"]["kind"], "ellipsoid");
    let path: Vec<u64> = sp["region"]["path"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(path.len(), 5);
    let mut ends = [path[0], path[4]];
    ends.sort();
    assert_eq!(ends, [1, 5]);
    // A noise-free instance has no combined value.
    if sp["noise"].as_f64().unwrap() == 0.0 {
        assert!(sp["combined"].is_null());
    }
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    let layout = api::layout_graph(SQUARE_WITH_TAIL, 1, 1).unwrap();
    assert!(api::score_pair(SQUARE_WITH_TAIL, &layout, 2, 2, "cn").is_err());
    assert!(api::score_pair(SQUARE_WITH_TAIL, &layout, 0, 99, "sp").is_err());
    assert!(api::score_pair(SQUARE_WITH_TAIL, &layout, 0, 2, "xx").is_err());
    assert!(api::score_pair(SQUARE_WITH_TAIL, "{}", 0, 2, "cn").is_err());
    assert!(api::layout_graph("0 0\n", 1, 1).is_err());
    assert!(api::enclose("[]").is_err());
}

#[test]
fn enclosing_cube_corners_gives_a_ball() {
    let corners: Vec<[f64; 3]> =
        (0..8).map(|i| [(i & 1) as f64 * 2.0 - 1.0, ((i >> 1) & 1) as f64 * 2.0 - 1.0, ((i >> 2) & 1) as f64 * 2.0 - 1.0]).collect();
    let e = parse(&api::enclose(&serde_json::to_string(&corners).unwrap()).unwrap());
    for a in e["semi_axes"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-2);
    }
}

#[test]
fn sample_graph_round_trips_through_layout() {
    let text = api::sample_graph(40, 0.1, 7);
    assert_eq!(text.lines().count(), 78);
    let v = parse(&api::layout_graph(&text, 0, 1).unwrap());
    assert_eq!(v["positions"].as_array().unwrap().len(), 40);
}
