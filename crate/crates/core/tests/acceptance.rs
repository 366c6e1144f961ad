//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//!
//! Runs without the libtest harness so the summary is always printed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secmux::hash::{
    collision_probability, orbit_criterion_all, permutation_collision_closed_form, verify_two_universal,
};
use secmux::info::{binary_entropy, mutual_information, phi, psi};
use secmux::pa::{pa_check, pa_rhs};
use secmux::region::{leakage_exponent, region_scan, ScanConfig};
use secmux::sim::{
    bcd_error_probability, bob_error_probability, bound_check, build_codebook, existence_search, leakage_report,
    EncoderConfig, Ensemble,
};
use secmux::{
    Bijection, Channel, Distribution, GfMatrix, GfVector, HashFamily, MarkovSpec, MessageLayout, PrimeField,
    SubsetIndex,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng, inputs: usize, outputs: usize) -> Channel {
    Channel::new((0..inputs).map(|_| random_dist(rng, outputs).probs().to_vec()).collect()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// 1. Exact two-universality of the permutation and linear families.
fn two_universality() -> Outcome {
    let mut checked = 0;
    for (q, dims) in [(2, vec![1, 1, 1]), (3, vec![1, 1])] {
        let layout = MessageLayout::new(q, dims).map_err(err)?;
        let mut families = vec![HashFamily::linear(&layout)];
        if layout.space_size() <= 8 {
            families.push(HashFamily::all_permutations(&layout).map_err(err)?);
        }
        for fam in &families {
            for s in layout.all_subsets() {
                let r = verify_two_universal(fam, s).map_err(err)?;
                ensure(r.pass, || format!("{:?} fails for {s} on q={q}", fam.kind()))?;
                checked += 1;
                if fam.kind() == secmux::FamilyKind::AllPermutations {
                    let want = permutation_collision_closed_form(&layout, s);
                    ensure(r.max_ratio == want, || format!("max collision {} != closed form {want}", r.max_ratio))?;
                    let k = layout.total_dim();
                    for (a, b) in [(0, 1), (2, 7), (5, 6)] {
                        let x1 = GfVector::from_index(layout.field(), k, a);
                        let x2 = GfVector::from_index(layout.field(), k, b);
                        let c = collision_probability(fam, s, &x1, &x2).map_err(err)?;
                        ensure(c == want, || format!("pair ({a},{b}) collides w.p. {c}, closed form {want}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (family, I) pairs"))
}

// 2. Orbit criterion agrees with two-universality on group families.
fn orbit_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a);
    let f2 = PrimeField::binary();
    let (mut total, mut agree, mut passing) = (0, 0, 0);
    for dims in [vec![1, 1], vec![1, 0], vec![2, 1], vec![1, 2], vec![1, 1, 1], vec![2, 0]] {
        let layout = MessageLayout::new(2, dims).map_err(err)?;
        let k = layout.total_dim();
        let mut families = vec![
            HashFamily::linear(&layout),
            HashFamily::generated(&layout, vec![GfMatrix::identity(f2, k)]).map_err(err)?,
        ];
        for gens in 1..=2 {
            for _ in 0..4 {
                let g = (0..gens).map(|_| secmux::sample_gl(k, f2, &mut rng)).collect::<secmux::Result<Vec<_>>>();
                families.push(HashFamily::generated(&layout, g.map_err(err)?).map_err(err)?);
            }
        }
        for fam in &families {
            for s in layout.all_subsets() {
                let universal = verify_two_universal(fam, s).map_err(err)?.pass;
                let orbit = orbit_criterion_all(fam, s).map_err(err)?.0;
                total += 1;
                agree += usize::from(universal == orbit);
                passing += usize::from(universal);
            }
        }
    }
    ensure(agree == total, || format!("agreement on {agree}/{total} pairs"))?;
    Ok(format!("{agree}/{total} pairs agree ({passing} two-universal)"))
}

// 3. Exact privacy-amplification left side never exceeds the bound.
fn pa_inequality() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for dims in [vec![1, 1], vec![1, 1, 1]] {
        let layout = MessageLayout::new(2, dims).map_err(err)?;
        let fam = HashFamily::linear(&layout);
        let k = layout.total_dim();
        let channels = [
            Channel::identity(layout.space_size()),
            Channel::bsc(0.1).unwrap().product_extend(k).map_err(err)?,
            Channel::constant(layout.space_size(), &Distribution::uniform(3)),
        ];
        for ch in &channels {
            let joint = ch.joint(&Distribution::uniform(layout.space_size())).map_err(err)?;
            for s in layout.all_subsets() {
                for rho in [0.1, 0.5, 1.0] {
                    let m = pa_check(&fam, rho, &joint, s).map_err(err)?.margin().unwrap();
                    worst = worst.min(m);
                    count += 1;
                    ensure(m >= -1e-10, || format!("margin {m:e} at rho={rho}, I={s}"))?;
                }
            }
        }
    }
    Ok(format!("{count} cases, min margin {worst:.3e}"))
}

// 4. Uniform-L and psi forms of the bound agree.
fn rhs_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (nl, nz) = (rng.gen_range(2..=8), rng.gen_range(2..=6));
        let ch = random_channel(&mut rng, nl, nz);
        let joint = ch.joint(&Distribution::uniform(nl)).map_err(err)?;
        let rho = rng.gen_range(0.01..=1.0);
        let r = pa_rhs(rho, rng.gen_range(1..=nl), &joint).map_err(err)?;
        let d = (r.forms.uniform.unwrap() - r.forms.discrete.unwrap()).abs();
        worst = worst.max(d);
    }
    ensure(worst <= 1e-12, || format!("max difference {worst:e}"))?;
    Ok(format!("100 instances, max difference {worst:.2e}"))
}

// 5. psi <= phi and concavity of exp(phi) in the input distribution.
fn psi_phi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gap = f64::INFINITY;
    for _ in 0..500 {
        let (nl, nz) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let ch = random_channel(&mut rng, nl, nz);
        let p = random_dist(&mut rng, nl);
        let rho = rng.gen_range(0.001..0.999);
        let gap = phi(rho, &ch, &p).map_err(err)? - psi(rho, &ch, &p).map_err(err)?;
        worst_gap = worst_gap.min(gap);
    }
    ensure(worst_gap >= -1e-10, || format!("psi exceeds phi by {:e}", -worst_gap))?;
    let mut worst_concave = f64::INFINITY;
    for _ in 0..200 {
        let (nl, nz) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let ch = random_channel(&mut rng, nl, nz);
        let (p, q) = (random_dist(&mut rng, nl), random_dist(&mut rng, nl));
        let (lambda, rho) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.001..0.999));
        let mix = p.mix(&q, lambda).map_err(err)?;
        let f = |d: &Distribution| phi(rho, &ch, d).map(f64::exp);
        let slack = f(&mix).map_err(err)? - lambda * f(&p).map_err(err)? - (1.0 - lambda) * f(&q).map_err(err)?;
        worst_concave = worst_concave.min(slack);
    }
    ensure(worst_concave >= -1e-10, || format!("concavity violated by {:e}", -worst_concave))?;
    Ok(format!("min phi-psi {worst_gap:.2e}, min concavity slack {worst_concave:.2e}"))
}

// 6. psi(rho)/rho tends to I(L;Z).
fn small_rho() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (nl, nz) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let ch = random_channel(&mut rng, nl, nz);
        let p = random_dist(&mut rng, nl);
        let info = mutual_information(&ch.joint(&p).map_err(err)?).map_err(err)?;
        let approx = psi(1e-3, &ch, &p).map_err(err)? / 1e-3;
        worst = worst.max((approx - info).abs() / info.max(0.01));
    }
    ensure(worst <= 0.02, || format!("relative deviation {worst:.4}"))?;
    Ok(format!("max relative deviation {worst:.2e}"))
}

// 7. Degraded binary wiretap channel region scan.
fn region_closed_form() -> Outcome {
    let cfg = ScanConfig { u_card: 1, v_card: 2, resolution: 101, v_equals_x: true };
    let bob = Channel::bsc(0.1).unwrap();
    let best = region_scan(&bob, &Channel::bsc(0.2).unwrap(), cfg).map_err(err)?.best_secrecy.re;
    let cap = binary_entropy(0.2) - binary_entropy(0.1);
    ensure((best - 0.175319).abs() <= 0.002, || format!("max R_e = {best}"))?;
    ensure((cap - 0.175319).abs() < 1e-6, || format!("closed form {cap}"))?;
    let same = region_scan(&bob, &bob, cfg).map_err(err)?.best_secrecy.re;
    ensure(same <= 1e-9, || format!("identical channels give R_e = {same:e}"))?;
    Ok(format!("max R_e = {best:.6} (closed form {cap:.6}), identical channels {same:.1e}"))
}

// 8. Exponent with trivial U equals rho (R_I - R_p) + psi.
fn exponent_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (nv, nx, nz) = (rng.gen_range(2..=4), rng.gen_range(2..=4), rng.gen_range(2..=4));
        let p_v = random_dist(&mut rng, nv);
        let x_given_v = random_channel(&mut rng, nv, nx);
        let eve = random_channel(&mut rng, nx, nz);
        let spec = MarkovSpec::new(Distribution::point(1, 0), Channel::constant(1, &p_v), x_given_v.clone())
            .map_err(err)?;
        let joint = spec.uvz_joint(&eve).map_err(err)?;
        let (rho, r_i, r_p) = (rng.gen_range(0.01..=1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let got = leakage_exponent(rho, r_i, r_p, &joint).map_err(err)?.value;
        let z_given_v = x_given_v.compose(&eve).map_err(err)?;
        let want = rho * (r_i - r_p) + psi(rho, &z_given_v, &p_v).map_err(err)?;
        worst = worst.max((got - want).abs());
    }
    ensure(worst <= 1e-12, || format!("max difference {worst:e}"))?;
    Ok(format!("100 instances, max difference {worst:.2e}"))
}

fn trivial_u_spec() -> MarkovSpec {
    MarkovSpec::new(
        Distribution::point(1, 0),
        Channel::constant(1, &Distribution::uniform(2)),
        Channel::identity(2),
    )
    .unwrap()
}

// 9. End-to-end bound dominance and the existence search at n = 2.
fn end_to_end() -> Outcome {
    let layout = MessageLayout::new(2, vec![1, 1]).map_err(err)?;
    let spec = trivial_u_spec();
    let (bob, eve) = (Channel::bsc(0.05).unwrap(), Channel::bsc(0.2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let codebooks = (0..3)
        .map(|_| build_codebook(2, &spec.p_u, &spec.v_given_u, 1, 4, &mut rng))
        .collect::<secmux::Result<Vec<_>>>()
        .map_err(err)?;
    let maps = HashFamily::linear(&layout).members().map_err(err)?;
    ensure(maps.len() == 6, || format!("{} linear maps", maps.len()))?;
    let ens = Ensemble::new(layout, maps, codebooks, Channel::identity(2), Distribution::uniform(1)).map_err(err)?;
    let subsets = [SubsetIndex::new(&[1]).unwrap()];
    let search = existence_search(&ens, &subsets, &eve, &bob, false).map_err(err)?;
    let check = bound_check(&ens, &spec, &eve, &search.pairs, 0, &[0.25, 0.5, 1.0], false).map_err(err)?;
    let mut detail = Vec::new();
    for row in &check.rows {
        let v = Distribution::uniform(2);
        let phi_v = if row.rho < 1.0 {
            phi(row.rho, &eve, &v).map_err(err)?
        } else {
            secmux::info::phi_extended(1.0, &eve, &v).map_err(err)?
        };
        let rhs = 1.0 + ((row.rho * (check.r_i - check.r_p)).exp() * phi_v.exp()).powi(2);
        ensure((rhs - row.rhs).abs() < 1e-12, || format!("rhs {} vs {rhs}", row.rhs))?;
        ensure(row.lhs <= rhs, || format!("rho={}: {} > {rhs}", row.rho, row.lhs))?;
        detail.push(format!("rho={} {:.4}<={:.4}", row.rho, row.lhs, rhs));
    }
    let pair = search.selected_pair().ok_or("no pair meets the inflated thresholds")?;
    ensure(search.qualifies(pair), || "selected pair exceeds thresholds".into())?;
    let min = search.pairs.iter().map(|p| p.leakage[0].leakage).fold(f64::INFINITY, f64::min);
    ensure(pair.leakage[0].leakage <= min, || "selected pair is not the least leaky".into())?;
    Ok(format!("{}; selected pair {}", detail.join(", "), search.selected.unwrap()))
}

// 10. Conservation of uniform-message entropy; multiplexing keeps Bob's error.
fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut reports = 0;
    for (dims, n, n_e, u_card) in [
        (vec![1, 1], 2, 1, 1),
        (vec![1, 0], 3, 2, 2),
        (vec![1, 1, 1], 2, 2, 2),
        (vec![1, 1, 0], 2, 3, 1),
        (vec![2, 1], 1, 2, 2),
    ] {
        let layout = MessageLayout::new(2, dims).unwrap();
        let p_u = random_dist(&mut rng, u_card);
        let v_given_u = random_channel(&mut rng, u_card, 3);
        let x_given_v = random_channel(&mut rng, 3, 2);
        let (bob, eve) = (random_channel(&mut rng, 2, 3), random_channel(&mut rng, 2, 2));
        let p_e = random_dist(&mut rng, n_e);
        let fam = HashFamily::linear(&layout);
        for _ in 0..4 {
            let cb = build_codebook(n, &p_u, &v_given_u, n_e, layout.space_size(), &mut rng).map_err(err)?;
            let f = fam.sample(&mut rng).map_err(err)?;
            let enc = EncoderConfig::new(layout.clone(), f, cb.clone(), x_given_v.clone()).map_err(err)?;
            let rep = leakage_report(&enc, &layout.secret_subsets(), &eve, Some(&bob), &p_e).map_err(err)?;
            for e in &rep.entries {
                worst = worst.max(e.conservation_error());
            }
            let multiplex = bob_error_probability(&enc, &bob, &p_e).map_err(err)?;
            let raw = bcd_error_probability(&cb, &x_given_v, &bob, &p_e).map_err(err)?;
            ensure(multiplex == raw, || format!("multiplex error {multiplex} != raw {raw}"))?;
            reports += 1;
        }
        // A permutation that is not linear also preserves the error.
        let mut perm: Vec<u32> = (0..layout.space_size() as u32).collect();
        perm.rotate_left(1);
        let cb = build_codebook(n, &p_u, &v_given_u, n_e, layout.space_size(), &mut rng).map_err(err)?;
        let enc = EncoderConfig::new(layout.clone(), Bijection::Permutation(perm), cb.clone(), x_given_v.clone())
            .map_err(err)?;
        ensure(
            bob_error_probability(&enc, &bob, &p_e).map_err(err)?
                == bcd_error_probability(&cb, &x_given_v, &bob, &p_e).map_err(err)?,
            || "permutation changes the error".into(),
        )?;
    }
    ensure(worst <= 1e-10, || format!("conservation error {worst:e}"))?;
    Ok(format!("{reports} reports, max conservation error {worst:.2e}, errors bit-identical"))
}

// 11. Every CLI command is byte-deterministic.
fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_secmux");
    let dir = tempfile::tempdir().map_err(err)?;
    let configs: [(&[&str], &str); 8] = [
        (&["hash", "verify"], r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1, 1]}}"#),
        (
            &["pa", "check"],
            r#"{"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
                "joint": {"channel": "b2"}, "channels": {"b2": {"inputs": 4, "outputs": 4,
                "rows": [[0.81,0.09,0.09,0.01],[0.09,0.81,0.01,0.09],[0.09,0.01,0.81,0.09],[0.01,0.09,0.09,0.81]]}},
                "rho": [0.1, 0.5, 1.0]}"#,
        ),
        (&["psi"], r#"{"channel": {"bsc": 0.1}, "rho": [0.001, 0.5, 1.0]}"#),
        (&["phi"], r#"{"channel": {"bec": 0.3}, "rho": [0.25, 0.5, 1.0]}"#),
        (
            &["region", "scan"],
            r#"{"bob": {"bsc": 0.1}, "eve": {"bec": 0.5},
                "scan": {"u_card": 2, "v_card": 2, "resolution": 5}}"#,
        ),
        (
            &["region", "member"],
            r#"{"markov": {"p_u": [1.0], "v_given_u": {"constant": [0.5, 0.5], "inputs": 1}, "x_given_v": {"identity": 2}},
                "bob": {"bsc": 0.1}, "eve": {"bsc": 0.2},
                "rates": {"smc": {"r0": 0.0, "secret": [0.1, 0.1], "equivocation": {"1": 0.1, "2": 0.1, "1,2": 0.17}}}}"#,
        ),
        (
            &["exponent"],
            r#"{"markov": {"p_u": [0.5, 0.5], "v_given_u": {"bsc": 0.1}, "x_given_v": {"identity": 2}},
                "eve": {"bsc": 0.2}, "r_i": 0.2, "r_p": 0.3, "rho": [0.25, 0.5, 1.0]}"#,
        ),
        (
            &["simulate"],
            r#"{"q": 2, "dims": [1, 1], "n": 2,
                "markov": {"p_u": [1.0], "v_given_u": {"constant": [0.5, 0.5], "inputs": 1}, "x_given_v": {"identity": 2}},
                "bob": {"bsc": 0.05}, "eve": {"bsc": 0.2},
                "maps": {"sample_linear": 4}, "codebooks": {"random": 3}}"#,
        ),
    ];
    let mut files = 0;
    for (i, (cmd, cfg)) in configs.iter().enumerate() {
        let cfg_path = dir.path().join(format!("cfg{i}.json"));
        std::fs::write(&cfg_path, cfg).map_err(err)?;
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for run in 0..2 {
                let out = dir.path().join(format!("out{i}_{format}_{run}"));
                let status = run_cli(bin, cmd, &cfg_path, &out, format)?;
                ensure(status == 0, || format!("{} exited with {status}", cmd.join(" ")))?;
                outputs.push(std::fs::read(&out).map_err(err)?);
            }
            ensure(outputs[0] == outputs[1], || format!("{} {format} output differs between runs", cmd.join(" ")))?;
            ensure(!outputs[0].is_empty(), || format!("{} {format} output is empty", cmd.join(" ")))?;
            files += 1;
        }
    }
    Ok(format!("{} commands x 2 formats, {files} byte-identical output pairs", configs.len()))
}

fn run_cli(bin: &str, cmd: &[&str], cfg: &Path, out: &Path, format: &str) -> Result<i32, String> {
    let status = Command::new(bin)
        .args(cmd)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(["--format", format, "--seed", "17"])
        .env_remove("SECMUX_GUARD_OVERRIDE")
        .status()
        .map_err(err)?;
    Ok(status.code().unwrap_or(-1))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("two-universality (exact)", two_universality, Some(Duration::from_secs(60))),
        ("orbit criterion equivalence", orbit_equivalence, Some(Duration::from_secs(30))),
        ("privacy amplification inequality", pa_inequality, Some(Duration::from_secs(300))),
        ("uniform vs psi forms of the bound", rhs_forms, None),
        ("psi <= phi, concavity of exp(phi)", psi_phi, None),
        ("small-rho limit of psi", small_rho, None),
        ("degraded wiretap region closed form", region_closed_form, Some(Duration::from_secs(120))),
        ("exponent identity with trivial U", exponent_identity, None),
        ("end-to-end bound dominance at n = 2", end_to_end, Some(Duration::from_secs(120))),
        ("conservation and error invariance", conservation, None),
        ("CLI determinism", determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name:<38} {:>9.3}s  {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
