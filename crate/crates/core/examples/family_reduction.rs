//! Family reduction with its certificate. The family below attains the
//! lower bound ‖Σφ̃ψ̃‖² = ‖ψ̃‖²/4^{s'-1}.

use hyperquad::exactnum::format_rational;
use hyperquad::family_reduce::{paired_sum, reduce_family, verify_reduction_report, PolyFamily};
use hyperquad::io::{families_from_json, read_json};

fn show(label: &str, fam: &PolyFamily) {
    for (j, m) in fam.members().iter().enumerate() {
        println!("  {label}{} = {m}", j + 1);
    }
}

fn main() -> hyperquad::Result<()> {
    let (phi, psi) = families_from_json(&read_json(include_str!("data/family.json"))?)?;
    show("phi", &phi);
    show("psi", &psi);

    let r = reduce_family(&phi, &psi)?;
    println!("reduced:");
    show("phi~", &r.phi_tilde);
    show("psi~", &r.psi_tilde);
    println!("pivot columns {:?}, dropped {:?}", r.pivot_columns, r.dropped);

    let s = paired_sum(&r.phi_tilde, &r.psi_tilde)?;
    println!("||sum||^2 = {}", format_rational(&s.coeff_norm_sq()));
    println!("||psi~||^2 = {}", format_rational(&r.psi_tilde.norm_sq()));
    println!("certified lower factor = {}", format_rational(&r.certified_lower));

    let v = verify_reduction_report(&r, &phi, &psi);
    println!("{v:?}");
    Ok(())
}
