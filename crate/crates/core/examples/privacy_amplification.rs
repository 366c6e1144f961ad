//! Exact privacy-amplification left side against its bound, over the full
//! linear family on a 4-message space.

use secmux::pa::pa_check;
use secmux::{Channel, Distribution, HashFamily, MessageLayout};

fn main() -> secmux::Result<()> {
    let layout = MessageLayout::new(2, vec![1, 1])?;
    let family = HashFamily::linear(&layout);
    let cases = [
        ("noiseless", Channel::identity(4)),
        ("BSC(0.1) x 2", Channel::bsc(0.1)?.product_extend(2)?),
        ("independent", Channel::constant(4, &Distribution::uniform(3))),
    ];
    for (name, ch) in &cases {
        let joint = ch.joint(&Distribution::uniform(4))?;
        for subset in layout.all_subsets() {
            for rho in [0.1, 0.5, 1.0] {
                let r = pa_check(&family, rho, &joint, subset)?;
                println!(
                    "{name:<13} I = {subset:<6} rho = {rho:<4} lhs = {:.9}  rhs = {:.9}  psi form = {:?}",
                    r.lhs_exact.unwrap(),
                    r.rhs_bound,
                    r.forms.discrete
                );
            }
        }
    }
    Ok(())
}
