mod oracles {
    pub mod cvss_reference;
}

use defii_analysis::cvss::{
    AttackComplexity, AttackVector, Impact, Metric, PrivilegesRequired, Scope, UserInteraction,
};
use defii_analysis::{roll_up, CvssVector, MetricArrays, Strategy as RollUp};
use oracles::cvss_reference::{all_vectors, reference_score};
use proptest::prelude::*;

#[test]
fn oracle_known_values() {
    // Published calculator values, used to sanity-check the oracle itself.
    assert_eq!(reference_score("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"), 9.8);
    assert_eq!(reference_score("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H"), 10.0);
    assert_eq!(reference_score("CVSS:3.1/AV:N/AC:L/PR:N/UI:R/S:C/C:L/I:L/A:N"), 6.1);
    assert_eq!(reference_score("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H"), 7.8);
    assert_eq!(reference_score("CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:L"), 1.6);
}

#[test]
fn matches_oracle_on_every_vector() {
    let ours = CvssVector::all();
    let theirs = all_vectors();
    assert_eq!(ours.len(), 2592);
    assert_eq!(theirs.len(), 2592);
    let rendered: std::collections::BTreeSet<String> = ours.iter().map(|v| v.to_string()).collect();
    assert_eq!(rendered, theirs.iter().cloned().collect());
    for v in &ours {
        let s = v.to_string();
        assert_eq!(v.base_score().to_bits(), reference_score(&s).to_bits(), "{s}");
    }
}

#[test]
fn named_cases() {
    let score = |s: &str| s.parse::<CvssVector>().unwrap().base_score();
    assert_eq!(score("CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:L"), 1.6);
    assert_eq!(score("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"), 9.8);
    for v in CvssVector::all() {
        if v.c == Impact::None && v.i == Impact::None && v.a == Impact::None {
            assert_eq!(v.base_score(), 0.0, "{v}");
        }
    }
}

#[test]
fn range_and_granularity() {
    for v in CvssVector::all() {
        let s = v.base_score();
        assert!((0.0..=10.0).contains(&s), "{v} -> {s}");
        let tenths = s * 10.0;
        assert!((tenths - tenths.round()).abs() < 1e-9, "{v} -> {s}");
    }
}

fn raise<M: Metric>(value: M) -> Option<M> {
    let pos = M::VALUES.iter().position(|v| *v == value)?;
    M::VALUES.get(pos + 1).copied()
}

/// Every vector reachable by making exactly one metric one step more severe.
fn single_raises(v: &CvssVector) -> Vec<CvssVector> {
    let mut out = Vec::new();
    if let Some(x) = raise(v.av) { out.push(CvssVector { av: x, ..*v }); }
    if let Some(x) = raise(v.ac) { out.push(CvssVector { ac: x, ..*v }); }
    if let Some(x) = raise(v.pr) { out.push(CvssVector { pr: x, ..*v }); }
    if let Some(x) = raise(v.ui) { out.push(CvssVector { ui: x, ..*v }); }
    if let Some(x) = raise(v.c) { out.push(CvssVector { c: x, ..*v }); }
    if let Some(x) = raise(v.i) { out.push(CvssVector { i: x, ..*v }); }
    if let Some(x) = raise(v.a) { out.push(CvssVector { a: x, ..*v }); }
    out
}

#[test]
fn single_metric_monotonicity() {
    for v in CvssVector::all() {
        for w in single_raises(&v) {
            assert!(w.base_score() >= v.base_score(), "{v} -> {w}");
        }
    }
}

#[test]
fn scope_sensitivity() {
    for v in CvssVector::all().into_iter().filter(|v| v.s == Scope::Unchanged) {
        if v.impact_subscore() > 0.0 {
            let changed = CvssVector { s: Scope::Changed, ..v };
            assert!(changed.base_score() >= v.base_score(), "{v}");
        }
    }
}

#[test]
fn severity_orders() {
    use std::cmp::Ordering::Less;
    assert_eq!(AttackVector::Physical.cmp(&AttackVector::Network), Less);
    assert_eq!(AttackVector::Local.cmp(&AttackVector::Adjacent), Less);
    assert_eq!(AttackComplexity::High.cmp(&AttackComplexity::Low), Less);
    assert_eq!(PrivilegesRequired::High.cmp(&PrivilegesRequired::Low), Less);
    assert_eq!(PrivilegesRequired::Low.cmp(&PrivilegesRequired::None), Less);
    assert_eq!(UserInteraction::Required.cmp(&UserInteraction::None), Less);
    assert_eq!(Scope::Unchanged.cmp(&Scope::Changed), Less);
    assert_eq!(Impact::None.cmp(&Impact::Low), Less);
    assert_eq!(Impact::Low.cmp(&Impact::High), Less);
}

/// Four instance-table rows; UI, S, PR, C and I come from fixture data.
#[test]
fn instance_rows_under_max_score() {
    let rows = [
        ["Physical", "High", "High", "Required", "Unchanged", "None", "None", "Low"],
        ["Physical", "High", "High", "Required", "Unchanged", "None", "None", "Low"],
        ["Physical", "High", "High", "Required", "Unchanged", "None", "None", "Low"],
        ["Network", "Low", "None", "Required", "Unchanged", "Low", "Low", "Low"],
    ];
    let col = |k: usize| rows.iter().map(|r| r[k].to_string()).collect::<Vec<_>>();
    let arrays = MetricArrays { av: col(0), ac: col(1), pr: col(2), ui: col(3), s: col(4), c: col(5), i: col(6), a: col(7) };
    let code = |long: &str| match long {
        "Physical" => "P", "Network" => "N", "High" => "H", "Low" => "L", "None" => "N",
        "Required" => "R", "Unchanged" => "U", other => panic!("{other}"),
    };
    let by_hand = rows
        .iter()
        .map(|r| {
            reference_score(&format!(
                "CVSS:3.1/AV:{}/AC:{}/PR:{}/UI:{}/S:{}/C:{}/I:{}/A:{}",
                code(r[0]), code(r[1]), code(r[2]), code(r[3]), code(r[4]), code(r[5]), code(r[6]), code(r[7])
            ))
        })
        .fold(0.0f64, f64::max);
    assert_eq!(roll_up(&arrays, RollUp::MaxScore).unwrap().base_score, by_hand);
    assert_eq!(by_hand, 6.3);
}

fn vector() -> impl Strategy<Value = CvssVector> {
    (0..2592usize).prop_map(|k| CvssVector::all()[k])
}

proptest! {
    #[test]
    fn vector_round_trip(v in vector()) {
        prop_assert_eq!(v.to_string().parse::<CvssVector>().unwrap(), v);
    }

    #[test]
    fn singleton_strategies_agree(v in vector()) {
        let a = MetricArrays::single(&v);
        let w = roll_up(&a, RollUp::WorstCase).unwrap();
        let m = roll_up(&a, RollUp::MaxScore).unwrap();
        prop_assert_eq!(&w, &m);
        prop_assert_eq!(w.base_score, reference_score(&v.to_string()));
    }

    #[test]
    fn worst_case_dominates_max_score(vs in prop::collection::vec(vector(), 1..8)) {
        let col = |f: &dyn Fn(&CvssVector) -> String| vs.iter().map(f).collect::<Vec<_>>();
        let arrays = MetricArrays {
            av: col(&|v| v.av.long_name().into()),
            ac: col(&|v| v.ac.long_name().into()),
            pr: col(&|v| v.pr.long_name().into()),
            ui: col(&|v| v.ui.long_name().into()),
            s: col(&|v| v.s.long_name().into()),
            c: col(&|v| v.c.long_name().into()),
            i: col(&|v| v.i.long_name().into()),
            a: col(&|v| v.a.long_name().into()),
        };
        let worst = roll_up(&arrays, RollUp::WorstCase).unwrap().base_score;
        let max = roll_up(&arrays, RollUp::MaxScore).unwrap().base_score;
        let oracle_max = vs.iter().map(|v| reference_score(&v.to_string())).fold(0.0, f64::max);
        prop_assert_eq!(max, oracle_max);
        prop_assert!(worst >= max);
    }
}
