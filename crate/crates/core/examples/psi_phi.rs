//! Mutual information and the psi / phi functionals on a few channels.

use secmux::info::{binary_entropy, mutual_information, phi, phi_extended, psi};
use secmux::{Channel, Distribution};

fn main() -> secmux::Result<()> {
    let uniform = Distribution::uniform(2);
    for (name, ch) in [
        ("BSC(0.1)", Channel::bsc(0.1)?),
        ("BSC(0.2)", Channel::bsc(0.2)?),
        ("BEC(0.3)", Channel::bec(0.3)?),
    ] {
        let info = mutual_information(&ch.joint(&uniform)?)?;
        println!("{name}: I(L;Z) = {info:.9} nats");
        for rho in [0.001, 0.25, 0.5, 0.75] {
            let s = psi(rho, &ch, &uniform)?;
            let p = phi(rho, &ch, &uniform)?;
            println!("  rho = {rho:<5} psi = {s:.9}  phi = {p:.9}  psi/rho = {:.6}", s / rho);
        }
        println!("  phi at rho = 1 (limit) = {:.9}", phi_extended(1.0, &ch, &uniform)?);
    }
    println!("h(0.2) - h(0.1) = {:.9}", binary_entropy(0.2) - binary_entropy(0.1));
    Ok(())
}
