//! Stream operators and the denotation of equations on a small trace.
use murtlola::ast::ident;
use murtlola::parser::parse_spec;
use murtlola::semantics::{hold_op, pacing_points, prev_op, satisfies, FiniteStream, StreamMap};

fn main() {
    let w: FiniteStream = "[⊥,3,⊥,5]".parse().unwrap();
    for n in 0..w.len() {
        println!(
            "n={n}  w={:?}  prev={:?}  hold={:?}",
            w.get(n),
            prev_op(&w, n, Some(0)),
            hold_op(&w, n, Some(0))
        );
    }

    let spec = parse_spec("input a input b output x @ a := a output y @ b := x.hold(or: b)").unwrap();
    let ins = StreamMap::from_streams(
        3,
        [(ident("a"), "[1,⊥,2]".parse().unwrap()), (ident("b"), "[⊥,4,4]".parse().unwrap())],
    )
    .unwrap();
    println!("y is paced at {:?}", pacing_points(&spec.equations[1].pacing, &ins));

    let outs = StreamMap::from_streams(
        3,
        [(ident("x"), "[1,⊥,2]".parse().unwrap()), (ident("y"), "[⊥,1,2]".parse().unwrap())],
    )
    .unwrap();
    println!("satisfies: {}", satisfies(&spec, &ins, &outs).unwrap());
}
