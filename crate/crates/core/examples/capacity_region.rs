//! Region membership certificates and a grid scan of the degraded binary
//! wiretap channel.

use secmux::info::binary_entropy;
use secmux::region::{bcc_membership, region_scan, smc_membership, BccRates, RateTuple, ScanConfig};
use secmux::{Channel, Distribution, MarkovSpec};

fn main() -> secmux::Result<()> {
    let bob = Channel::bsc(0.1)?;
    let eve = Channel::bsc(0.2)?;
    let spec = MarkovSpec::direct(Distribution::uniform(2));
    let cap = binary_entropy(0.2) - binary_entropy(0.1);

    let cert = bcc_membership(BccRates { r1: 0.3, re: cap, r0: 0.0 }, &spec, &bob, &eve)?;
    println!("(R1, Re, R0) = (0.3, {cap:.6}, 0) in BCC region: {}", cert.pass);
    for s in &cert.slacks {
        println!("  {:<20} slack {:+.9}", s.name, s.slack);
    }

    // Two secret messages whose sum exceeds the secrecy term still protect
    // each other.
    let mut rates = RateTuple::full_secrecy(0.0, vec![0.15, 0.15]);
    rates.equivocation.insert("1,2".into(), cap);
    println!("multiplex (0.15, 0.15), R_e,{{1,2}} = {cap:.6}: {}", smc_membership(&rates, &spec, &bob, &eve)?.pass);

    let scan = region_scan(&bob, &eve, ScanConfig { u_card: 1, v_card: 2, resolution: 101, v_equals_x: true })?;
    println!("scan of {} points: max R_e = {:.6} (closed form {cap:.6})", scan.points, scan.best_secrecy.re);

    let wide = region_scan(&bob, &Channel::bec(0.6)?, ScanConfig { u_card: 2, v_card: 2, resolution: 6, v_equals_x: false })?;
    println!("BSC/BEC scan, {} points, frontier:", wide.points);
    print!("{}", wide.to_csv(1.0));
    Ok(())
}
