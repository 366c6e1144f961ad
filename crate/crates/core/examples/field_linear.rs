//! Prime-field arithmetic and uniform sampling from GL(k, q).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secmux::field::gl_order;
use secmux::{enumerate_gl, sample_gl, FieldElement, GfMatrix, PrimeField};

fn main() -> secmux::Result<()> {
    let a = FieldElement::new(3, 5)?;
    let b = FieldElement::new(4, 5)?;
    println!("in F_5: 3 + 4 = {}, 3 * 4 = {}, 3^-1 = {}", a.add(b)?.value(), a.mul(b)?.value(), a.inv()?.value());

    let f3 = PrimeField::new(3)?;
    let m = GfMatrix::from_rows(f3, &[vec![1, 2], vec![0, 1]])?;
    let inv = m.inverse()?;
    println!("M = {:?}, M^-1 = {:?}, M M^-1 = {:?}", m.row_major(), inv.row_major(), m.mul(&inv)?.row_major());

    for (k, q) in [(2, 2), (3, 2), (2, 3)] {
        let field = PrimeField::new(q)?;
        let all = enumerate_gl(k, field)?;
        println!("|GL({k},{q})| = {} (formula {})", all.len(), gl_order(k, q));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let g = sample_gl(3, PrimeField::binary(), &mut rng)?;
    println!("random element of GL(3,2): {:?}, rank {}", g.row_major(), g.rank());
    Ok(())
}
