use latk::data::{check_tables, load_tables};

#[test]
fn every_table_row_is_milgram_consistent() {
    let rows = load_tables().unwrap();
    assert_eq!(rows.len(), 358);
    let report = check_tables(&rows);
    let tables: Vec<u8> = report.iter().map(|c| c.table).collect();
    assert_eq!(tables, vec![1, 2, 4, 6]);
    for c in &report {
        assert!(c.failures.is_empty(), "table {}: {:#?}", c.table, c.failures);
        assert_eq!(c.passed, c.rows);
    }
}
