//! The leakage exponent as a function of rho and its optimum.

use secmux::region::{leakage_exponent, optimize_exponent};
use secmux::{Channel, Distribution, MarkovSpec};

fn main() -> secmux::Result<()> {
    let spec = MarkovSpec::new(
        Distribution::uniform(2),
        Channel::bsc(0.1)?,
        Channel::identity(2),
    )?;
    let joint = spec.uvz_joint(&Channel::bsc(0.2)?)?;
    for (r_i, r_p) in [(0.1, 0.6), (0.2, 0.3), (0.3, 0.3)] {
        println!("R_I = {r_i}, R_p = {r_p}");
        for rho in [0.25, 0.5, 1.0] {
            let e = leakage_exponent(rho, r_i, r_p, &joint)?;
            println!("  rho = {rho:<4} exponent = {:+.9}", e.value);
        }
        let opt = optimize_exponent(r_i, r_p, &joint)?;
        println!("  optimum rho* = {:.6}, value = {:+.9}", opt.rho, opt.value);
    }
    Ok(())
}
