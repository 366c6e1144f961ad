//! End-to-end multiplex coding at n = 2: random codebooks, the six linear
//! bijections of F_2^2, exact leakage, the existence search and the bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secmux::sim::{bound_check, build_codebook, existence_search, leakage_report, EncoderConfig, Ensemble};
use secmux::{Channel, Distribution, HashFamily, MarkovSpec, MessageLayout, SubsetIndex};

fn main() -> secmux::Result<()> {
    let layout = MessageLayout::new(2, vec![1, 1])?;
    let spec = MarkovSpec::new(
        Distribution::point(1, 0),
        Channel::constant(1, &Distribution::uniform(2)),
        Channel::identity(2),
    )?;
    let (bob, eve) = (Channel::bsc(0.05)?, Channel::bsc(0.2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let codebooks = (0..3)
        .map(|_| build_codebook(2, &spec.p_u, &spec.v_given_u, 1, 4, &mut rng))
        .collect::<secmux::Result<Vec<_>>>()?;
    let maps = HashFamily::linear(&layout).members()?;
    let p_e = Distribution::uniform(1);
    let ensemble = Ensemble::new(layout.clone(), maps, codebooks, Channel::identity(2), p_e.clone())?;

    let subsets = [SubsetIndex::new(&[1])?];
    let search = existence_search(&ensemble, &subsets, &eve, &bob, false)?;
    println!("average leakage {:.9}, threshold {:.9}", search.average_leakage[0], search.leakage_thresholds[0]);
    let pair = search.selected_pair().expect("a qualifying pair");
    println!("selected map {} with codebook {}", pair.map_index, pair.codebook_index);

    let check = bound_check(&ensemble, &spec, &eve, &search.pairs, 0, &[0.25, 0.5, 1.0], false)?;
    for row in &check.rows {
        println!("rho = {:<4} E exp(rho I) = {:.9} <= {:.9}: {}", row.rho, row.lhs, row.rhs, row.pass);
    }

    let encoder = EncoderConfig::new(
        layout,
        ensemble.maps[pair.map_index].clone(),
        ensemble.codebooks[pair.codebook_index].clone(),
        Channel::identity(2),
    )?;
    let (b, x) = encoder.encode(&[1], 0, &mut rng)?;
    println!("s_1 = 1 -> b = {b}, x^n = {x:?}");
    let report = leakage_report(&encoder, &subsets, &eve, Some(&bob), &p_e)?;
    for e in &report.entries {
        println!("I = {}: leakage {:.9}, equivocation rate {:.9}", e.subset, e.leakage, e.equivocation_rate);
    }
    println!("Bob's ML error {:.9}", report.bob_error.unwrap());
    Ok(())
}
