//! Gaussian rationals: parsing, canonical text, exact moduli.

use hyperquad::exactnum::{format_rational, parse_rational, rat, rational_sqrt};
use hyperquad::GR;

fn main() -> hyperquad::Result<()> {
    let a: GR = "1/2+3/4 i".parse()?;
    let b: GR = "-2i".parse()?;

    println!("a = {a}, b = {b}");
    println!("a * b = {}", &a * &b);
    println!("a / b = {}", a.checked_div(&b).expect("b is nonzero"));
    println!("conj(a) = {}", a.conj());

    // |a|² stays rational; no square roots are taken.
    println!("|a|^2 = {}", format_rational(&a.sq_modulus()));
    println!("canonical: {}", a.to_canonical_string());

    let r = parse_rational("18/8")?;
    println!("18/8 reduces to {}", format_rational(&r));
    match rational_sqrt(&r) {
        Some(s) => println!("sqrt(9/4) = {}", format_rational(&s)),
        None => println!("not a square"),
    }
    println!("sqrt(2) rational? {}", rational_sqrt(&rat(2, 1)).is_some());
    Ok(())
}
