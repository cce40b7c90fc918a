//! Pacing type checking, with and without the reorder and prev-self extensions.
use murtlola::parser::parse_spec;
use murtlola::typecheck::{type_spec, Extensions};

fn main() {
    let cases = [
        "input a input b output x @ b := b output y @ a := x",
        "input a input b output x @ a := a output y @ b := x.hold(or: b)",
        "input i output x @ i := y output y @ i := i",
        "output x @ true := x.prev(or: 0) + 1",
    ];
    for text in cases {
        let spec = parse_spec(text).unwrap();
        println!("{text}");
        for (label, ext) in [("base", Extensions::NONE), ("extended", Extensions::ALL)] {
            match type_spec(&spec, ext) {
                Ok(order) => println!("  {label}: accepted, order {:?}", order.names(&spec)),
                Err(e) => println!("  {label}: {e}"),
            }
        }
    }
}
