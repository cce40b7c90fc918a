//! Run the battery monitor over a CSV trace.
use murtlola::evaluator::{run, EvalPlan};
use murtlola::parser::parse_spec;
use murtlola::trace::{read_trace, trace_to_string};
use murtlola::typecheck::Extensions;

const SPEC: &str = include_str!("../fixtures/battery.lola");
const TRACE: &str = include_str!("../fixtures/battery.csv");

fn main() {
    let plan = EvalPlan::new(parse_spec(SPEC).unwrap(), Extensions::ALL).expect("battery spec type-checks");
    let inputs = read_trace(TRACE, &plan.spec().inputs).unwrap();
    let outputs = run(&plan, &inputs).unwrap();
    print!("{}", trace_to_string(&outputs));
}
