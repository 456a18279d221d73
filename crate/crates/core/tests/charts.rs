use std::collections::BTreeMap;

use adamsext::charts::{build_chart, LineKind};
use adamsext::claims::X_X_ALIASES;
use adamsext::fixtures::Fixture;
use adamsext::modules::{parse_module, FdModule};
use adamsext::resolution::{hom_complex_ext, resolve, ExtTable, HProducts};

/// Class counts of E2 for X against itself, by (normalized stem, s), for
/// normalized stems 0..=14 and s <= 7. Read off the published chart.
const X_X_REFERENCE: [((i32, u32), usize); 33] = [
    ((0, 0), 1),
    ((3, 0), 1),
    ((3, 1), 2),
    ((3, 2), 1),
    ((3, 3), 1),
    ((3, 4), 1),
    ((3, 5), 1),
    ((3, 6), 1),
    ((3, 7), 1),
    ((4, 1), 1),
    ((5, 1), 1),
    ((5, 2), 1),
    ((6, 1), 2),
    ((6, 2), 2),
    ((6, 3), 1),
    ((7, 1), 1),
    ((8, 2), 1),
    ((9, 2), 2),
    ((10, 1), 1),
    ((10, 2), 1),
    ((10, 3), 1),
    ((10, 4), 1),
    ((11, 2), 2),
    ((11, 3), 1),
    ((12, 3), 2),
    ((12, 4), 1),
    ((12, 5), 1),
    ((13, 6), 1),
    ((14, 2), 1),
    ((14, 3), 1),
    ((14, 5), 1),
    ((14, 6), 1),
    ((14, 7), 1),
];

#[test]
fn x_against_x_matches_reference_chart() {
    let x = Fixture::X.module();
    let chart = build_chart(&x, &x, 8, 16).unwrap();
    assert_eq!(chart.shift, -3);
    let ours: BTreeMap<(i32, u32), usize> = chart
        .counts()
        .into_iter()
        .filter(|&((stem, s), _)| stem <= 14 && s <= 7)
        .collect();
    let reference: BTreeMap<(i32, u32), usize> = X_X_REFERENCE.into_iter().collect();
    assert_eq!(ours, reference);
    assert_eq!(ours.values().sum::<usize>(), 39);
}

#[test]
fn x_against_x_named_classes() {
    let x = Fixture::X.module();
    let chart = build_chart(&x, &x, 6, 16).unwrap().with_aliases(X_X_ALIASES);
    // Unnormalized stem = normalized stem + shift.
    let c = chart.find("c").expect("c is present");
    assert_eq!((c.stem + chart.shift, c.s), (8, 2));
    let nu_c = chart.find("νc").unwrap();
    assert_eq!((nu_c.stem + chart.shift, nu_c.s), (11, 3));
    let h2: Vec<_> = chart.lines_from(c.id(), LineKind::H2).map(|l| l.to).collect();
    assert_eq!(h2, vec![nu_c.id()]);
    assert!(chart.find("ε").is_some() && chart.find("ησ").is_some());
}

#[test]
fn maps_from_x_to_y_highlighted_classes() {
    // Maps X -> Y are charted by Y ⊗ DX.
    let chart = build_chart(&Fixture::Y.module(), &Fixture::X.module(), 6, 20).unwrap();
    assert_eq!(chart.shift, -7);
    let at = |stem: i32, s: u32| chart.count(stem - chart.shift, s);
    assert_eq!(at(8, 1), 1);
    assert_eq!(at(8, 2), 2);
    assert_eq!(at(8, 0), 0);
    assert_eq!(at(11, 2), 1);
    assert!(at(11, 3) >= 1);
}

#[test]
fn sphere_chart_through_stem_15() {
    let s = Fixture::Sphere.module();
    let chart = build_chart(&s, &s, 7, 15).unwrap();
    // Classical E2 for the sphere, s in 1..=7, stems 1..=15.
    let expected: [(i32, &[u32]); 15] = [
        (1, &[1]),
        (2, &[2]),
        (3, &[1, 2, 3]),
        (4, &[]),
        (5, &[]),
        (6, &[2]),
        (7, &[1, 2, 3, 4]),
        (8, &[2, 3]),
        (9, &[3, 4, 5]),
        (10, &[6]),
        (11, &[5, 6, 7]),
        (12, &[]),
        (13, &[]),
        (14, &[2, 3, 4, 5, 6]),
        (15, &[1, 2, 3, 4, 5, 6, 7]),
    ];
    for (stem, filtrations) in expected {
        let ours: Vec<u32> = (1..=7).filter(|&s| chart.count(stem, s) > 0).collect();
        assert_eq!(ours, filtrations, "stem {stem}");
        for s in 1..=7 {
            // h0^4 h4 and h1 d0 share (15, 5).
            let expected = if (stem, s) == (15, 5) { 2 } else { 1 };
            assert!(chart.count(stem, s) <= expected, "stem {stem}, s {s}");
        }
    }
    assert_eq!(chart.count(15, 5), 2);
    assert_eq!(chart.count(0, 0), 1);
}

fn cofiber_of_nu() -> FdModule {
    parse_module("module Cnu {\n  gen a:0\n  gen b:4\n  sq 4 a = b\n}\n").unwrap()
}

fn rank(p: &HProducts, s: u32, t: i32) -> usize {
    p.matrix(s, t).map_or(0, |m| m.rank())
}

/// Checks h2 ranks against Ext(M, C(ν)) through the long exact sequence of
/// 0 -> Σ^4 F2 -> H*C(ν) -> F2 -> 0, whose connecting map is h2.
fn check_h2_by_cofiber(m: &FdModule) -> usize {
    let (max_s, max_t) = (7, 26);
    let r = resolve(m, max_s + 1, max_t);
    let e: ExtTable = r.ext_table();
    let h2 = r.h_action(2);
    let hom = hom_complex_ext(&r, &cofiber_of_nu());
    let mut checked = 0;
    for s in 0..max_s {
        for t in e.min_t..=max_t - 4 {
            if !hom.covers(s, t) {
                continue;
            }
            let kernel = e.dim(s, t) - rank(&h2, s, t);
            let cokernel = e.dim(s, t + 4) - if s == 0 { 0 } else { rank(&h2, s - 1, t) };
            assert_eq!(hom.dim(s, t), kernel + cokernel, "{}: s={s} t={t}", m.name());
            checked += 1;
        }
    }
    checked
}

#[test]
fn h2_agrees_with_cofiber_sequence() {
    let x = Fixture::X.module();
    let y = Fixture::Y.module();
    for m in [
        Fixture::Sphere.module(),
        x.tensor(&x.dual()).normalized(),
        y.tensor(&x.dual()).normalized(),
    ] {
        assert!(check_h2_by_cofiber(&m) > 50);
    }
}

#[test]
fn json_is_deterministic() {
    let x = Fixture::X.module();
    let y = Fixture::Y.module();
    let a = build_chart(&x, &y, 5, 12).unwrap().to_json();
    let b = build_chart(&x, &y, 5, 12).unwrap().to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["shift"], -3);
    assert!(v["classes"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn lines_connect_existing_classes() {
    let x = Fixture::X.module();
    let chart = build_chart(&x, &Fixture::XPrime.module(), 8, 16).unwrap();
    chart.check_lines().unwrap();
}
