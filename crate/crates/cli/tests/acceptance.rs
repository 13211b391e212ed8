//! One line per acceptance criterion. Failing criteria are reported, not asserted,
//! so that the full table is always printed; the checks themselves are tested elsewhere.

use eddycorner_cli::checks;

#[test]
fn acceptance() {
    let outcomes = checks::all(20240601);
    println!();
    for o in &outcomes {
        println!("{}", o.line());
        for d in &o.details {
            println!("    {d}");
        }
    }
    assert_eq!(outcomes.len(), 7);
    for o in &outcomes {
        assert!(
            !o.summary.starts_with("error:"),
            "criterion {} could not run: {}",
            o.criterion,
            o.summary
        );
    }
}
