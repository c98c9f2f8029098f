//! Reference CVSS v3.1 base equation, working straight from a vector string.

use std::collections::HashMap;

fn roundup(x: f64) -> f64 {
    let int_input = (x * 100_000.0).round() as i64;
    if int_input % 10_000 == 0 {
        int_input as f64 / 100_000.0
    } else {
        ((int_input / 10_000) + 1) as f64 / 10.0
    }
}

/// Base score for `CVSS:3.1/AV:_/AC:_/PR:_/UI:_/S:_/C:_/I:_/A:_`.
pub fn reference_score(vector: &str) -> f64 {
    let body = vector.strip_prefix("CVSS:3.1/").expect("prefix");
    let m: HashMap<&str, &str> = body
        .split('/')
        .map(|kv| kv.split_once(':').expect("metric"))
        .collect();
    assert_eq!(m.len(), 8, "{vector}");
    let changed = m["S"] == "C";
    let av = match m["AV"] { "N" => 0.85, "A" => 0.62, "L" => 0.55, "P" => 0.2, x => panic!("AV {x}") };
    let ac = match m["AC"] { "L" => 0.77, "H" => 0.44, x => panic!("AC {x}") };
    let pr = match (m["PR"], changed) {
        ("N", _) => 0.85,
        ("L", false) => 0.62,
        ("L", true) => 0.68,
        ("H", false) => 0.27,
        ("H", true) => 0.5,
        (x, _) => panic!("PR {x}"),
    };
    let ui = match m["UI"] { "N" => 0.85, "R" => 0.62, x => panic!("UI {x}") };
    let cia = |k: &str| match m[k] { "H" => 0.56, "L" => 0.22, "N" => 0.0, x => panic!("{k} {x}") };

    let iss = 1.0 - (1.0 - cia("C")) * (1.0 - cia("I")) * (1.0 - cia("A"));
    let impact = if changed {
        7.52 * (iss - 0.029) - 3.25 * (iss - 0.02f64).powi(15)
    } else {
        6.42 * iss
    };
    let exploitability = 8.22 * av * ac * pr * ui;
    if impact <= 0.0 {
        0.0
    } else if changed {
        roundup((1.08 * (impact + exploitability)).min(10.0))
    } else {
        roundup((impact + exploitability).min(10.0))
    }
}

/// Every one of the 2,592 base vectors, as strings.
pub fn all_vectors() -> Vec<String> {
    let mut out = Vec::with_capacity(2592);
    for av in ["N", "A", "L", "P"] {
        for ac in ["L", "H"] {
            for pr in ["N", "L", "H"] {
                for ui in ["N", "R"] {
                    for s in ["U", "C"] {
                        for c in ["H", "L", "N"] {
                            for i in ["H", "L", "N"] {
                                for a in ["H", "L", "N"] {
                                    out.push(format!(
                                        "CVSS:3.1/AV:{av}/AC:{ac}/PR:{pr}/UI:{ui}/S:{s}/C:{c}/I:{i}/A:{a}"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
