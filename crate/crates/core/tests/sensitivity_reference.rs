//! Sobol' sequence, Saltelli design and index estimators against values
//! produced by scipy and SALib (tools/saltelli_reference.py).

use std::f64::consts::PI;

use lh2_core::sensitivity::{
    ishigami, saltelli_sample, sobol_indices, IndexOptions, ParameterSpace, SampleOptions, SobolSequence,
};

const REFERENCE: &str = include_str!("data/saltelli_reference.txt");

fn records(tag: &str) -> Vec<Vec<f64>> {
    REFERENCE
        .lines()
        .filter_map(|l| l.strip_prefix(tag).and_then(|r| r.strip_prefix(' ')))
        .map(|r| r.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn ishigami_space() -> ParameterSpace {
    ParameterSpace::new(vec![("x1", -PI, PI), ("x2", -PI, PI), ("x3", -PI, PI)]).unwrap()
}

#[test]
fn sobol_points_match_reference_generator() {
    let seq = SobolSequence::new(21).unwrap();
    let recs = records("sobol");
    assert!(!recs.is_empty());
    for r in recs {
        let got = seq.point(r[0] as u64);
        assert_eq!(got, r[1..].to_vec(), "point {}", r[0]);
    }
}

#[test]
fn saltelli_rows_match_reference_ordering() {
    let rows = saltelli_sample(&ishigami_space(), 8, SampleOptions::default()).unwrap();
    let expect = records("saltelli");
    assert_eq!(rows.len(), expect.len());
    for (i, (a, b)) in rows.iter().zip(&expect).enumerate() {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "row {i}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn estimators_match_reference_implementation() {
    let space = ishigami_space();
    let rows = saltelli_sample(&space, 1024, SampleOptions::default()).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| ishigami(r, 7.0, 0.1)).collect();
    let rep = sobol_indices(&space, "y", &y, IndexOptions::default()).unwrap();
    for r in records("ishigami") {
        let p = &rep.parameters[r[0] as usize];
        assert!((p.first - r[1]).abs() < 1e-9, "S1 {} vs {}", p.first, r[1]);
        assert!((p.total - r[2]).abs() < 1e-9, "ST {} vs {}", p.total, r[2]);
    }
}

#[test]
fn ishigami_error_shrinks_with_sample_size() {
    let exact = lh2_core::sensitivity::ishigami_indices(7.0, 0.1);
    let space = ishigami_space();
    let error = |n: usize| {
        let rows = saltelli_sample(&space, n, SampleOptions::default()).unwrap();
        let y: Vec<f64> = rows.iter().map(|x| ishigami(x, 7.0, 0.1)).collect();
        let opts = IndexOptions { bootstrap_resamples: 0, ..IndexOptions::default() };
        let r = sobol_indices(&space, "y", &y, opts).unwrap();
        r.parameters
            .iter()
            .enumerate()
            .map(|(i, p)| (p.first - exact[i]).abs().max((p.total - exact[3 + i]).abs()))
            .fold(0.0, f64::max)
    };
    let coarse = error(256);
    let fine = error(4096);
    assert!(fine < coarse, "{coarse} -> {fine}");
    assert!(fine < 0.02, "{fine}");
}
