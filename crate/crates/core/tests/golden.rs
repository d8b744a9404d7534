//! Root systems and cascades against checked-in JSON snapshots.

use std::path::Path;

use serde_json::Value;
use stepwise::cascade::{closed_form_beta, decompose, format_combo};
use stepwise::rootsys::{build, RootSystem, RootSystemJson, Series};

fn golden(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const CASES: [(Series, usize); 9] = [
    (Series::A, 3),
    (Series::A, 4),
    (Series::A, 5),
    (Series::B, 3),
    (Series::B, 4),
    (Series::C, 3),
    (Series::C, 4),
    (Series::D, 4),
    (Series::D, 5),
];

#[test]
fn systems_match_snapshots() {
    for (s, r) in CASES {
        let g = golden(&format!("{s}{r}"));
        let sys = build(s, r).unwrap();
        assert_eq!(serde_json::to_value(sys.to_json()).unwrap(), g["system"], "{s}{r}");
        assert_eq!(
            serde_json::to_value(sys.cartan_matrix()).unwrap(),
            g["cartan"],
            "{s}{r}"
        );
    }
}

#[test]
fn snapshots_round_trip_through_the_interchange_format() {
    for (s, r) in CASES {
        let g = golden(&format!("{s}{r}"));
        let j: RootSystemJson = serde_json::from_value(g["system"].clone()).unwrap();
        let sys = RootSystem::from_json(&j).unwrap();
        assert_eq!(sys.positives(), build(s, r).unwrap().positives());
        assert_eq!(sys.to_json(), j);
    }
}

#[test]
fn cascades_match_snapshots() {
    for (s, r) in CASES {
        let g = golden(&format!("{s}{r}"));
        let sys = build(s, r).unwrap();
        let d = decompose(&sys).unwrap();
        assert_eq!(serde_json::to_value(d.to_json()).unwrap(), g["cascade"], "{s}{r}");
        let table: Vec<String> = closed_form_beta(sys.params().unwrap())
            .unwrap()
            .iter()
            .map(format_combo)
            .collect();
        assert_eq!(serde_json::to_value(table).unwrap(), g["closed_form_beta"], "{s}{r}");
    }
}

#[test]
fn type_c_table_reads_as_doubled_simple_chain() {
    let g = golden("C4");
    let want = ["ψ1", "ψ1+2ψ2", "ψ1+2ψ2+2ψ3", "ψ1+2ψ2+2ψ3+2ψ4"];
    let got: Vec<&str> = g["closed_form_beta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(got, want);
}
