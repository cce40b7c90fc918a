//! Parse a specification, print its canonical form, and show a parse error.
use murtlola::parser::{parse_spec, print_spec};

fn main() {
    let text = "input a input b
                output x @ a|b := a.hold(or: 0)+b.hold(or:0)*2
                output y @ a := x.prev(or: -1) < a";
    let spec = parse_spec(text).expect("valid spec");
    print!("{}", print_spec(&spec));
    assert_eq!(parse_spec(&print_spec(&spec)).unwrap(), spec);

    let err = parse_spec("input a\noutput x @ a := a < 1 < 2\n").unwrap_err();
    println!("{}", err.render("bad.lola"));
}
