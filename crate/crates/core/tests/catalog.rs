use lck_core::catalog::{builtin_catalog, coverage, load_catalog, summary, verify_catalog, CatalogError};

#[test]
fn builtin_catalog_verifies() {
    let entries = builtin_catalog();
    let reports = verify_catalog(&entries);
    let mut failures = Vec::new();
    for r in &reports {
        for c in r.failures() {
            failures.push(format!("{}: {:?} {:?}", c.id, c.residual, c.witness));
        }
    }
    assert!(failures.is_empty(), "failures:\n{}", failures.join("\n"));
}

#[test]
fn builtin_catalog_counts() {
    let (algebras, structures, families) = summary(&builtin_catalog());
    assert!(algebras >= 18, "{algebras} algebras");
    assert!(structures >= 25, "{structures} complex structures");
    assert!(families >= 30, "{families} lcK families");
}

#[test]
fn table_rows_covered_once() {
    if let Err(problems) = coverage(&builtin_catalog()) {
        panic!("{}", problems.join("\n"));
    }
}

#[test]
fn empty_source_is_empty_catalog() {
    assert!(load_catalog("").unwrap().is_empty());
    assert!(load_catalog("entry = []").unwrap().is_empty());
}

#[test]
fn witness_violating_constraint_is_schema_error() {
    let src = r#"
[[entry]]
id = "rh3"
name = "rh3"
salamon = "0,0,-12,0"

[[entry.J]]
name = "J"
matrix = ["0", "-1", "0", "0", "1", "0", "0", "0", "0", "0", "0", "-1", "0", "0", "1", "0"]

[[entry.lck]]
id = "rh3"
J = "J"
theta = "-e4"
omega = "sigma*e12 + sigma*e34"
params = [{ name = "sigma", constraints = ["sigma > 0"] }]
witnesses = [{ sigma = "1" }, { sigma = "-1" }]
vaisman = "always"
"#;
    match load_catalog(src) {
        Err(CatalogError::Schema { location, message }) => {
            assert!(location.contains("witnesses[1]"), "{location}");
            assert!(message.contains("sigma > 0"), "{message}");
        }
        other => panic!("expected schema error, got {other:?}"),
    }
}

#[test]
fn unknown_structure_is_schema_error() {
    let src = r#"
[[entry]]
id = "rh3"
name = "rh3"
salamon = "0,0,-12,0"

[[entry.lck]]
id = "rh3"
J = "J7"
theta = "-e4"
omega = "e12 + e34"
witnesses = [{}, {}]
vaisman = "always"
"#;
    assert!(matches!(load_catalog(src), Err(CatalogError::Schema { .. })));
}
