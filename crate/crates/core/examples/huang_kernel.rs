//! Exact kernel check: every ψ with Σ φ_j ψ_j divisible by ⟨z,ξ⟩_ℓ gives a
//! vanishing sum.

use hyperquad::hermitian::huang_kernel_check;
use hyperquad::io::{huang_from_json, read_json};
use hyperquad::polyring::build::z;
use hyperquad::{Signature, VarSpace};

fn main() -> hyperquad::Result<()> {
    let sig = Signature::new(3, 1)?;
    let sp = VarSpace::bihermitian(3);
    let phi = vec![z(&sp, 0), z(&sp, 1)];
    let r = huang_kernel_check(&sig, &phi, 2)?;
    println!("phi = (z1, z2): kernel dim {}, holds {}", r.kernel_dim, r.holds());

    // Dependent members leave a kernel, and every element of it sums to 0.
    let phi = vec![z(&sp, 0), z(&sp, 0)];
    let r = huang_kernel_check(&sig, &phi, 1)?;
    println!("phi = (z1, z1): kernel dim {}, holds {}", r.kernel_dim, r.holds());
    for psi in &r.basis {
        println!("  psi = ({}, {})", psi[0], psi[1]);
    }

    let text = include_str!("data/huang.json");
    let (sig, phi, cap) = huang_from_json(&read_json(text)?)?;
    let r = huang_kernel_check(&sig, &phi, cap)?;
    println!("data/huang.json: kernel dim {}, holds {}", r.kernel_dim, r.holds());
    Ok(())
}
