//! Paper-scale schedules against values produced by an independent script
//! (`scripts/paper_params_oracle.py`, exact fractions and 120-digit floats).

use pauliverify::protocol::{paper_params, ProtocolKind, ProtocolParams};
use pauliverify::BigUint;
use serde::Deserialize;

#[derive(Deserialize)]
struct Row {
    protocol: String,
    n: usize,
    r: Option<f64>,
    epsilon_exact: String,
    k: String,
    m: String,
    registers: String,
}

fn golden() -> Vec<Row> {
    serde_json::from_str(include_str!("golden/paper_params.json")).unwrap()
}

#[test]
fn schedules_match_golden_file() {
    let rows = golden();
    assert_eq!(rows.len(), 25);
    for row in rows {
        let kind = ProtocolKind::parse(&row.protocol).unwrap();
        let s = paper_params(kind, row.n, row.r, None).unwrap();
        let ctx = format!("{} N={} R={:?}", row.protocol, row.n, row.r);
        assert_eq!(s.epsilon_exact.unwrap().to_string(), row.epsilon_exact, "{ctx}");
        assert_eq!(s.k.to_string(), row.k, "{ctx}");
        assert_eq!(s.m.to_string(), row.m, "{ctx}");
        assert_eq!(s.registers.to_string(), row.registers, "{ctx}");
    }
}

#[test]
fn ground_n2_r1_by_hand() {
    // ε = 1/16, k = 32·2^5 = 1024, m = ⌈2·32·1024²·ln 2⌉.
    let s = paper_params(ProtocolKind::Ground, 2, Some(1.0), None).unwrap();
    assert_eq!(s.k, BigUint::from(1024u32));
    assert_eq!(s.m, BigUint::from(46_516_320u64));
    assert_eq!(s.epsilon_exact.unwrap().to_string(), "1/16");
}

#[test]
fn hypergraph_k_is_4n_to_the_seventh() {
    for n in 2..=6usize {
        let s = paper_params(ProtocolKind::Hypergraph, n, None, None).unwrap();
        assert_eq!(s.k, BigUint::from(4 * n as u64).pow(7));
    }
}

#[test]
fn ground_and_circuit_need_r() {
    assert!(paper_params(ProtocolKind::Ground, 3, None, None).is_err());
    assert!(paper_params(ProtocolKind::Circuit, 3, None, None).is_err());
}

#[test]
fn paper_scale_is_not_executable() {
    let s = paper_params(ProtocolKind::Hypergraph, 3, None, None).unwrap();
    assert!(ProtocolParams::from_schedule(&s).is_err());
}
