//! Exhaustive two-universality checks and the orbit criterion for the
//! bijection families used in multiplex coding.

use secmux::hash::{orbit_criterion_all, permutation_collision_closed_form, verify_two_universal};
use secmux::{HashFamily, MessageLayout};

fn main() -> secmux::Result<()> {
    let layout = MessageLayout::new(2, vec![1, 1, 1])?;
    let families = [
        ("all permutations", HashFamily::all_permutations(&layout)?),
        ("GL(3,2)", HashFamily::linear(&layout)),
        ("identity only", HashFamily::explicit(&layout, vec![secmux::Bijection::identity(&layout)])?),
    ];
    for (name, family) in &families {
        println!("{name}: {} members", family.size());
        for subset in layout.all_subsets() {
            let r = verify_two_universal(family, subset)?;
            let orbit = if family.is_linear() {
                format!("{}", orbit_criterion_all(family, subset)?.0)
            } else {
                "-".into()
            };
            println!("  I = {subset:<9} max collision {} <= {}: {}  orbit criterion: {orbit}", r.max_ratio, r.bound, r.pass);
        }
    }
    let s = secmux::SubsetIndex::new(&[1])?;
    println!("permutation closed form for I = {s}: {}", permutation_collision_closed_form(&layout, s));
    Ok(())
}
