use std::collections::BTreeMap;
use std::path::Path;

use ldsp_core::edi::{compute_edi, EdiConfig};
use ldsp_core::evaluation::{evaluate_property, lp_classifier, EvalConfig, SplitSpec};
use ldsp_core::io::{
    decode_ldse, encode_ldse, evaluation_report_csv, generate_synthetic, parse_ldsp_csv, read_ldse, read_ldsp_csv,
    render_combined_analysis, render_confusion_heatmap, render_evaluation_curve, sha256_hex, write_ldse,
    write_ldsp_csv, DataError, LdspRecord, SyntheticSpec,
};
use ldsp_core::linear::LogisticConfig;
use ldsp_core::{EmbeddingMeta, EmbeddingPairSet, LinguisticProperty};
use proptest::prelude::*;

fn finite_f32() -> impl Strategy<Value = f32> {
    prop::num::f32::NORMAL | prop::num::f32::SUBNORMAL | prop::num::f32::ZERO
}

fn pair_set() -> impl Strategy<Value = EmbeddingPairSet> {
    (1usize..12, 1usize..9, "[a-z\\-]{1,12}", "[a-z]{1,10}").prop_flat_map(|(n, d, tag, prop)| {
        (prop::collection::vec(finite_f32(), n * d), prop::collection::vec(finite_f32(), n * d)).prop_map(
            move |(s1, s2)| EmbeddingPairSet::new(EmbeddingMeta::new(tag.clone(), prop.clone()), d, s1, s2).unwrap(),
        )
    })
}

fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #[test]
    fn ldse_round_trip_is_bit_exact(set in pair_set()) {
        let bytes = encode_ldse(&set).unwrap();
        let back = decode_ldse(&bytes).unwrap();
        prop_assert_eq!(bits(back.s1_raw()), bits(set.s1_raw()));
        prop_assert_eq!(bits(back.s2_raw()), bits(set.s2_raw()));
        prop_assert_eq!(&back.meta, &set.meta);
        prop_assert_eq!(encode_ldse(&back).unwrap(), bytes);
    }

    #[test]
    fn ldse_truncation_is_always_detected(set in pair_set(), cut in 0.0f64..1.0) {
        let bytes = encode_ldse(&set).unwrap();
        let keep = ((bytes.len() - 1) as f64 * cut) as usize;
        let r = decode_ldse(&bytes[..keep]);
        let detected = matches!(r, Err(DataError::TruncatedFile { .. }) | Err(DataError::BadMagic));
        prop_assert!(detected);
    }
}

#[test]
fn ldse_file_round_trip_and_corruptions() {
    let set = generate_synthetic(&SyntheticSpec::new(3, 4, vec![(1, 1.0)], 1.0, 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.ldse");
    write_ldse(&path, &set).unwrap();
    let back = read_ldse(&path).unwrap();
    assert_eq!(bits(back.s1_raw()), bits(set.s1_raw()));

    let good = std::fs::read(&path).unwrap();
    assert!(matches!(decode_ldse(&good[..good.len() - 5]), Err(DataError::TruncatedFile { .. })));
    let mut v2 = good.clone();
    v2[4] = 0x02;
    assert!(matches!(decode_ldse(&v2), Err(DataError::UnsupportedVersion(2))));
    let mut magic = good.clone();
    magic[0] = b'X';
    assert!(matches!(decode_ldse(&magic), Err(DataError::BadMagic)));
    let mut long = good;
    long.push(0);
    assert!(matches!(decode_ldse(&long), Err(DataError::ShapeMismatch(_))));
}

#[test]
fn synthetic_generation_is_a_pure_function_of_the_spec() {
    let spec = SyntheticSpec::new(50, 8, vec![(2, 1.0)], 0.5, 77);
    let a = encode_ldse(&generate_synthetic(&spec).unwrap()).unwrap();
    let b = encode_ldse(&generate_synthetic(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = SyntheticSpec { seed: 78, ..spec };
    assert_ne!(encode_ldse(&generate_synthetic(&other).unwrap()).unwrap(), a);
}

#[test]
fn single_planted_dim_has_the_smallest_p() {
    let set = generate_synthetic(&SyntheticSpec::new(300, 16, vec![(7, 3.0)], 1.0, 5)).unwrap();
    let report = compute_edi(&set, &EdiConfig::default()).unwrap();
    let min = report.dims.iter().min_by(|a, b| a.p_value.total_cmp(&b.p_value)).unwrap();
    assert_eq!(min.dimension, 7);
}

#[test]
fn sha256_known_vector() {
    assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn ldsp_csv_thousand_rows_from_file_stem() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("sentence1,sentence2\n");
    for i in 0..1000 {
        text.push_str(&format!("Item {i} is here.,Item {i} is not here.\n"));
    }
    let records = read_ldsp_csv(&write(dir.path(), "negation.csv", &text)).unwrap();
    assert_eq!(records.len(), 1000);
    assert!(records.iter().all(|r| r.property == LinguisticProperty::Negation));
}

#[test]
fn ldsp_csv_quoting_and_index_column() {
    let dir = tempfile::tempdir().unwrap();
    let text = ",sentence1,sentence2\n0,\"Yes, it is.\",\"No, it is not.\"\n1,a,b\n";
    let records = read_ldsp_csv(&write(dir.path(), "polarity.csv", text)).unwrap();
    assert_eq!(records[0].sentence1, "Yes, it is.");
    assert_eq!(records[0].sentence2, "No, it is not.");
    assert_eq!(records.len(), 2);
}

#[test]
fn ldsp_csv_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = read_ldsp_csv(&write(dir.path(), "tense.csv", "sentence1,sentence2\na,b\nc\n")).unwrap_err();
    assert!(matches!(missing, DataError::MalformedCsv { line: 3, .. }), "{missing}");
    let empty = read_ldsp_csv(&write(dir.path(), "voice.csv", "sentence1,sentence2\n")).unwrap_err();
    assert!(matches!(empty, DataError::EmptyFile(_)));
    let unknown = read_ldsp_csv(&write(dir.path(), "sarcasm.csv", "sentence1,sentence2\na,b\n")).unwrap_err();
    assert!(matches!(unknown, DataError::UnknownProperty { .. }));
    let blank = read_ldsp_csv(&write(dir.path(), "tense.csv", "sentence1,sentence2\na,\n")).unwrap_err();
    assert!(matches!(blank, DataError::MalformedCsv { line: 2, .. }));
    assert!(matches!(read_ldsp_csv(&dir.path().join("nope.csv")), Err(DataError::Io { .. })));
}

#[test]
fn ldsp_csv_property_column_and_write_round_trip() {
    let text = "sentence1,sentence2,property\nThe cat.,A cat.,definiteness\nHe runs.,He ran.,tense\n";
    let records = parse_ldsp_csv(text.as_bytes(), Path::new("mixed.csv")).unwrap();
    assert_eq!(records[1].property, LinguisticProperty::Tense);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quantity.csv");
    let recs = vec![LdspRecord {
        property: LinguisticProperty::Quantity,
        sentence1: "She bought \"five\" apples, fresh.".into(),
        sentence2: "She bought some apples, fresh.".into(),
    }];
    write_ldsp_csv(&path, &recs).unwrap();
    assert_eq!(read_ldsp_csv(&path).unwrap(), recs);
}

fn parse_svg(text: &str) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(text).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(doc.root().children().filter(|n| n.is_element()).count(), 1);
    doc
}

fn count_class(doc: &roxmltree::Document, class: &str) -> usize {
    doc.descendants().filter(|n| n.attribute("class") == Some(class)).count()
}

#[test]
fn combined_analysis_svg() {
    let set = generate_synthetic(&SyntheticSpec::new(400, 48, vec![(1, 2.0), (30, 2.0)], 1.0, 2)).unwrap();
    let cfg = EdiConfig { keep_count: 25, ..EdiConfig::default() };
    let report = compute_edi(&set, &cfg).unwrap();
    let svg = render_combined_analysis(&report, 25);
    let doc = parse_svg(&svg);
    assert_eq!(count_class(&doc, "rfe-marker"), 25);
    assert_eq!(count_class(&doc, "bar") + count_class(&doc, "bar wilcoxon-top"), 48);
    assert_eq!(count_class(&doc, "bar wilcoxon-top"), 25);
    assert_eq!(count_class(&doc, "mi-threshold"), 1);
    assert!(count_class(&doc, "agreement-marker") >= 2);
}

#[test]
fn evaluation_curve_svg_spans_one_to_k() {
    let set = generate_synthetic(&SyntheticSpec::new(500, 20, vec![(4, 1.0), (9, 0.8), (15, 0.6)], 1.0, 3)).unwrap();
    let ranked = compute_edi(&set, &EdiConfig::default()).unwrap().ranked_dims();
    let mut others = BTreeMap::new();
    others.insert("other".to_string(), (0..20).rev().collect::<Vec<_>>());
    let cfg = EvalConfig { bottom_k: 10, cross_k: 5, stop_ratio: 0.99, ..EvalConfig::default() };
    let report = evaluate_property(&set, &ranked, &others, &cfg).unwrap();
    let svg = render_evaluation_curve(&report);
    let doc = parse_svg(&svg);
    let ticks: Vec<usize> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("x-tick"))
        .map(|n| n.text().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ticks, (1..=report.k_at_95).collect::<Vec<_>>());
    assert_eq!(count_class(&doc, "accuracy-curve"), 1);
    assert_eq!(count_class(&doc, "baseline"), 1);
    assert_eq!(count_class(&doc, "low-edi"), 1);
    assert_eq!(count_class(&doc, "best-cross"), 1);

    let csv = evaluation_report_csv(&report);
    assert_eq!(csv.lines().next(), Some("metric,k,accuracy"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("high_edi,")).count(), report.high_edi_curve.len());
}

#[test]
fn confusion_heatmap_svg() {
    let mut sets = BTreeMap::new();
    for (i, name) in ["x<y", "b&c", "d"].iter().enumerate() {
        let spec = SyntheticSpec::new(60, 6, vec![(i, 2.0)], 1.0, i as u64).with_property(*name);
        sets.insert(name.to_string(), generate_synthetic(&spec).unwrap());
    }
    let r = lp_classifier(&sets, &SplitSpec::default(), &LogisticConfig::default()).unwrap();
    let svg = render_confusion_heatmap(&r.confusion);
    let doc = parse_svg(&svg);
    assert!(svg.contains("x&lt;y") && svg.contains("b&amp;c"));
    assert_eq!(count_class(&doc, "cell"), 9);
}
