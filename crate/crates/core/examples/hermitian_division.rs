//! Division by powers of ⟨z,ξ⟩_ℓ and by |z|²_ℓ.

use hyperquad::hermitian::{bounded_decomposition_report, divide_by_norm_sq, divide_with_remainder, pairing_poly};
use hyperquad::polyring::build::{xi, z};
use hyperquad::exactnum::format_rational;
use hyperquad::{Signature, VarSpace, GR};

fn main() -> hyperquad::Result<()> {
    let sig = Signature::new(2, 1)?;
    let sp = VarSpace::bihermitian(2);
    let p = pairing_poly(&sig, &sp)?;
    println!("<z, xi>_1 = {p}");

    let x = &(&(&z(&sp, 0) * &z(&sp, 1)) * &xi(&sp, 0)) + &(&z(&sp, 1) * &xi(&sp, 1)).scale(&GR::from_int(3));
    let d = divide_with_remainder(&sig, &x, 1)?;
    println!("X = {x}");
    println!("  quotient  B = {}", d.quotient);
    println!("  remainder H = {}", d.remainder);
    let back = &d.remainder + &(&d.quotient * &p);
    println!("  H + B<z,xi> == X: {}", back == x);

    let y = &z(&sp, 0) + &xi(&sp, 1);
    let yn = &y * &p;
    println!("(Y |z|^2) / |z|^2 = {:?}", divide_by_norm_sq(&sig, &yn)?.map(|q| q.to_string()));
    println!("z1 / |z|^2 = {:?}", divide_by_norm_sq(&sig, &z(&sp, 0))?);

    // Two levels: (z1 ξ2)⟨z,ξ⟩ + (z2 ξ1)⟨z,ξ⟩² = H + B⟨z,ξ⟩³.
    let phi = vec![vec![z(&sp, 0)], vec![z(&sp, 1)]];
    let psi = vec![vec![xi(&sp, 1)], vec![xi(&sp, 0)]];
    let r = bounded_decomposition_report(&sig, &phi, &psi)?;
    let levels: Vec<String> = r.level_norm_sq.iter().map(format_rational).collect();
    println!("levels [{}]: ||H||^2 = {}, ||B||^2 = {}", levels.join(", "), r.h_norm_sq, r.b_norm_sq);
    Ok(())
}
