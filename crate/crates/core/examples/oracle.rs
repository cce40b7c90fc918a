//! Search for inputs under which a specification has no solution.
use murtlola::oracle::{check_consistency, OracleConfig, OracleVerdict};
use murtlola::parser::parse_spec;
use murtlola::trace::trace_to_string;
use murtlola::typecheck::{type_spec, Extensions};

fn main() {
    let cfg = OracleConfig::new(3, [0, 1]).unwrap();
    for text in [
        "input a input b output x @ a := a output y @ b := x",
        "input a input b output x @ a := a output y @ b := x.hold(or: b)",
        // rejected without reordering, yet consistent
        "input i output x @ i := y output y @ i := i",
    ] {
        let spec = parse_spec(text).unwrap();
        let typed = type_spec(&spec, Extensions::NONE).is_ok();
        println!("{text}\n  base type system accepts: {typed}");
        match check_consistency(&spec, &cfg).unwrap() {
            OracleVerdict::ConsistentOnTested { inputs_checked } => {
                println!("  no counterexample in {inputs_checked} input traces")
            }
            OracleVerdict::Counterexample { rho_in } => {
                print!("  counterexample:\n{}", trace_to_string(&rho_in))
            }
        }
    }
}
