use std::io::Write;
use std::path::{Path, PathBuf};

use rule_ensemble::dataset::*;
use rule_ensemble::Error;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn temp_csv(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn bundled_datasets_load() {
    let class = LabelColumn::Name("class".into());
    for (file, rows, attrs, counts) in [
        ("iris.csv", 150, 4, vec![50, 50, 50]),
        ("breast-w.csv", 683, 9, vec![444, 239]),
        ("pima.csv", 768, 8, vec![500, 268]),
    ] {
        let d = load_csv(data(file), &class).unwrap();
        assert_eq!((d.n_rows(), d.n_attrs()), (rows, attrs), "{file}");
        assert_eq!(d.class_counts(), counts, "{file}");
    }
}

#[test]
fn label_column_by_index_or_name() {
    let f = temp_csv("a,label,b\n1,x,2\n3,y,4\n5,x,6\n");
    let by_name = load_csv(f.path(), &LabelColumn::Name("label".into())).unwrap();
    let by_index = load_csv(f.path(), &LabelColumn::Index(1)).unwrap();
    let by_digit = load_csv(f.path(), &"1".parse().unwrap()).unwrap();
    assert_eq!(by_name, by_index);
    assert_eq!(by_name, by_digit);
    assert_eq!(by_name.attribute_names(), ["a", "b"]);
    assert_eq!(by_name.class_names(), ["x", "y"]);
    assert_eq!(by_name.row(1), [3.0, 4.0]);
}

#[test]
fn numeric_class_names_sort_numerically() {
    let f = temp_csv("a,y\n1,10\n2,9\n3,-1\n");
    let d = load_csv(f.path(), &LabelColumn::Name("y".into())).unwrap();
    assert_eq!(d.class_names(), ["-1", "9", "10"]);
}

#[test]
fn malformed_files_are_rejected() {
    let y = LabelColumn::Name("y".into());
    let cases: Vec<(&str, fn(&Error) -> bool)> = vec![
        ("a,y\n1,p\n2\n", |e| matches!(e, Error::RaggedRow { .. })),
        ("a,y\n1,p\nfoo,q\n", |e| matches!(e, Error::Parse { .. })),
        ("a,y\n1,p\nNaN,q\n", |e| matches!(e, Error::Parse { .. })),
        ("a,z\n1,p\n2,q\n", |e| matches!(e, Error::UnknownLabelColumn(_))),
        ("a,y\n1,p\n2,p\n", |e| matches!(e, Error::TooFewClasses(1))),
        ("a,y\n", |e| matches!(e, Error::EmptyInput(_))),
        ("y\np\nq\n", |e| matches!(e, Error::EmptyInput(_))),
    ];
    for (text, check) in cases {
        let err = load_csv(temp_csv(text).path(), &y).unwrap_err();
        assert!(check(&err), "{text:?} gave {err}");
    }
    assert!(matches!(
        load_csv("/nonexistent/file.csv", &y).unwrap_err(),
        Error::Io { .. }
    ));
}

#[test]
fn known_classes_allow_single_class_files() {
    let f = temp_csv("a,y\n1,q\n2,q\n");
    let classes = vec!["p".to_string(), "q".to_string()];
    let d = load_csv_with_classes(f.path(), &LabelColumn::Name("y".into()), &classes).unwrap();
    assert_eq!(d.labels(), [1, 1]);
    let f = temp_csv("a,y\n1,r\n");
    let err = load_csv_with_classes(f.path(), &LabelColumn::Name("y".into()), &classes).unwrap_err();
    assert!(matches!(err, Error::UnknownClass(c) if c == "r"));
}

#[test]
fn observations_are_selected_by_header() {
    let f = temp_csv("c,b,a,extra\n3,2,1,x\n6,5,4,y\n");
    let rows = load_observations(f.path(), &["a".into(), "c".into()]).unwrap();
    assert_eq!(rows, vec![vec![1.0, 3.0], vec![4.0, 6.0]]);
    let err = load_observations(f.path(), &["a".into(), "d".into()]).unwrap_err();
    assert!(matches!(err, Error::MissingAttribute(a) if a == "d"));
}

#[test]
fn write_then_read_is_lossless() {
    let d = load_csv(data("pima.csv"), &LabelColumn::Name("class".into())).unwrap();
    let (scaled, _) = standardize(&d);
    let mut buf = Vec::new();
    write_csv(&scaled, &mut buf, "class").unwrap();
    let back = read_csv(buf.as_slice(), &LabelColumn::Name("class".into())).unwrap();
    assert_eq!(back, scaled);
}

#[test]
fn five_by_two_folds_partition_each_repetition() {
    let d = load_csv(data("iris.csv"), &LabelColumn::Name("class".into())).unwrap();
    let mut evaluations = 0;
    for rep in 0..5 {
        let folds = stratified_kfold(&d, 2, rep).unwrap();
        assert_eq!(folds.len(), 2);
        // the two pairs swap train and test
        assert_eq!(folds[0].train, folds[1].test);
        assert_eq!(folds[0].test, folds[1].train);
        for f in &folds {
            let test = d.subset(f.test.as_slice());
            let train = d.subset(f.train.as_slice());
            for c in 0..3 {
                assert!(test.class_counts()[c].abs_diff(train.class_counts()[c]) <= 1);
            }
            evaluations += 1;
        }
    }
    assert_eq!(evaluations, 10);
    assert_ne!(stratified_kfold(&d, 2, 0).unwrap(), stratified_kfold(&d, 2, 1).unwrap());
}

#[test]
fn stratified_split_examples() {
    let values: Vec<f64> = (0..20).map(f64::from).collect();
    let labels: Vec<usize> = (0..20).map(|i| usize::from(i < 10)).collect();
    let d = Dataset::new(values, 1, labels, vec!["a".into()], vec!["n".into(), "p".into()]).unwrap();
    let (train, test) = stratified_split(&d, &[5, 5], 1).unwrap();
    assert_eq!(train.class_counts(), vec![5, 5]);
    assert_eq!(test.class_counts(), vec![5, 5]);
    let (train, test) = stratified_split(&d, &[0, 10], 1).unwrap();
    assert_eq!(train.class_counts(), vec![0, 10]);
    assert_eq!(test.class_counts(), vec![10, 0]);
    assert!(matches!(
        stratified_split(&d, &[11, 0], 1).unwrap_err(),
        Error::InsufficientClassMembers { .. }
    ));
}

#[test]
fn test_data_is_scaled_with_training_statistics() {
    let d = load_csv(data("breast-w.csv"), &LabelColumn::Name("class".into())).unwrap();
    let folds = stratified_kfold(&d, 2, 3).unwrap();
    let train = d.subset(folds[0].train.as_slice());
    let test = d.subset(folds[0].test.as_slice());
    let (scaled_train, params) = standardize(&train);
    let again = params.transform(&train).unwrap();
    assert_eq!(again, scaled_train);
    for j in 0..d.n_attrs() {
        let mean = again.column(j).iter().sum::<f64>() / again.n_rows() as f64;
        assert!(mean.abs() < 1e-12);
    }
    let scaled_test = params.transform(&test).unwrap();
    assert_eq!(scaled_test.row(0), params.transform_row(test.row(0)).as_slice());
}
