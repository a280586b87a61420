//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wpvol::asymptotics::{self, Thresholds, Which};
use wpvol::bracket::{keys_up_to_weight, BracketEngine, BracketKey};
use wpvol::consistency;
use wpvol::exactnum::PiScalar;
use wpvol::geodesic::{self, CutDescription, WeightSpec};
use wpvol::volume::volume_polynomial;

static ENGINE: Lazy<BracketEngine> = Lazy::new(BracketEngine::new);

type Outcome = Result<String, String>;
type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ps(n: i64, d: i64, e: u32) -> PiScalar {
    PiScalar::frac(n, d, e)
}

fn within(limit: Duration, t: Duration) -> Result<(), String> {
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn anchors() -> Outcome {
    let start = Instant::now();
    let e = BracketEngine::new();
    let cases: [(u32, &[u32], PiScalar); 10] = [
        (0, &[0, 0, 0], ps(1, 1, 0)),
        (0, &[0, 0, 0, 0], ps(2, 1, 1)),
        (0, &[1, 0, 0, 0], ps(12, 1, 0)),
        (0, &[0, 0, 0, 0, 0], ps(10, 1, 2)),
        (1, &[0], ps(1, 12, 1)),
        (1, &[1], ps(1, 2, 0)),
        (1, &[0, 0], ps(1, 4, 2)),
        (1, &[1, 0], ps(2, 1, 1)),
        (1, &[2, 0], ps(10, 1, 0)),
        (1, &[1, 1], ps(6, 1, 0)),
    ];
    for (g, d, want) in cases {
        let got = e.bracket_of(g, d).map_err(|x| x.to_string())?;
        ensure(got == want, || format!("[{d:?}]_{g}: got {got}, want {want}"))?;
    }
    within(Duration::from_secs(1), start.elapsed())?;
    Ok("10 anchors equal".into())
}

fn double_factorial(n: u64) -> BigInt {
    (1..=n).rev().step_by(2).fold(BigInt::from(1), |a, k| a * k)
}

fn top_psi() -> Outcome {
    let start = Instant::now();
    let e = BracketEngine::new();
    for g in 1..=5u32 {
        let num = double_factorial(6 * u64::from(g) - 3) * BigInt::from(4).pow(3 * g - 2);
        let fact: BigInt = (1..=g).fold(BigInt::from(1), |a, k| a * k);
        let den = BigInt::from(24).pow(g) * fact;
        let want = PiScalar::from_rational(BigRational::new(num, den));
        let got = e.bracket_of(g, &[3 * g - 2]).map_err(|x| x.to_string())?;
        ensure(got == want, || format!("g = {g}: got {got}, want {want}"))?;
    }
    within(Duration::from_secs(10), start.elapsed())?;
    Ok("g = 1..5 exact".into())
}

fn recursions() -> Outcome {
    let start = Instant::now();
    let e = BracketEngine::new();
    let two = consistency::sweep_recursion_ii(&e, 10);
    let one = consistency::sweep_recursion_i(&e, 10);
    for r in [&two, &one] {
        ensure(r.pass, || r.to_string())?;
    }
    within(Duration::from_secs(600), start.elapsed())?;
    Ok(format!("II on {} keys, I on {} keys, zero defect", two.keys_checked, one.keys_checked))
}

fn closed_volumes() -> Outcome {
    let e = &*ENGINE;
    for g in 2..=10 {
        let v = volume_polynomial(e, g, 1).map_err(|x| x.to_string())?;
        ensure(v.eval_at_2pi_i(0).is_zero(), || format!("V_{{{g},1}}(2 pi i) != 0"))?;
    }
    let v2 = consistency::genus_volume(e, 2).map_err(|x| x.to_string())?;
    ensure(v2 == ps(43, 2160, 3), || format!("V_2 = {v2}"))?;
    for g in 2..=12 {
        let v = consistency::genus_volume(e, g).map_err(|x| x.to_string())?;
        ensure(v.is_positive() && v.pi_exp() == 3 * g - 3, || format!("V_{g} = {v}"))?;
    }
    Ok("V_{g,1}(2 pi i) = 0 for g <= 10, V_2 = 43/2160*pi^6, V_g > 0 graded for g <= 12".into())
}

fn ratio_laws(th: &Thresholds) -> Outcome {
    let e = &*ENGINE;
    let mut notes = Vec::new();
    for which in [Which::B, Which::C] {
        for n in 0..=1usize {
            let t = asymptotics::ratio_table(e, which, 12, n).map_err(|x| x.to_string())?;
            let sup = t.sup_deviation();
            let bound = th.ratio_bound(which, n).expect("configured");
            ensure(sup.is_finite() && sup <= bound, || format!("{which:?} n = {n}: sup {sup} above {bound}"))?;
            let limit = if which == Which::B { 1.0 } else { 4.0 * std::f64::consts::PI.powi(2) };
            let raw = |g| (t.row(g, n).expect("row").float / limit - 1.0).abs();
            ensure(raw(12) < raw(4), || format!("{which:?} n = {n}: no decay from g = 4 to 12"))?;
            for g in [4, 12] {
                let r = match which {
                    Which::B => asymptotics::ratio_b(e, g, n),
                    _ => asymptotics::ratio_c(e, g, n),
                }
                .map_err(|x| x.to_string())?;
                ensure(r.graded().is_some_and(|(_, k)| k == 1), || format!("{which:?}_{{{g},{n}}} not a rational times pi^2"))?;
            }
            notes.push(format!("{which:?}{n} sup {sup:.4}"));
        }
    }
    Ok(notes.join(", "))
}

fn zograf(th: &Thresholds) -> Outcome {
    let e = &*ENGINE;
    let mut sup = 0.0f64;
    for n in 0..=2 {
        for row in asymptotics::zograf_table(e, 12, n).map_err(|x| x.to_string())? {
            ensure(row.exponent.is_finite(), || format!("g = {}, n = {n}: non-finite exponent", row.g))?;
            sup = sup.max(row.exponent.abs());
        }
    }
    ensure(sup <= th.zograf_exponent, || format!("exponent sup {sup} above {}", th.zograf_exponent))?;
    Ok(format!("|ln(V/F)|/ln g <= {sup:.4}"))
}

fn thin_part(th: &Thresholds) -> Outcome {
    let e = &*ENGINE;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for g in 2..=8 {
        for eps in [0.025, 0.05, 0.1] {
            let t = geodesic::thin_part_estimate(e, g, eps, geodesic::DEFAULT_EPS0).map_err(|x| x.to_string())?;
            let c = t.upper / (eps * eps);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let a = geodesic::thin_part_estimate(e, g, 0.025, geodesic::DEFAULT_EPS0).map_err(|x| x.to_string())?;
        let b = geodesic::thin_part_estimate(e, g, 0.05, geodesic::DEFAULT_EPS0).map_err(|x| x.to_string())?;
        let r = b.upper / a.upper;
        ensure((3.8..=4.2).contains(&r), || format!("g = {g}: doubling ratio {r}"))?;
    }
    ensure(hi / lo < 4.0, || format!("c2/c1 = {}", hi / lo))?;
    ensure(th.thin_lo <= lo && hi <= th.thin_hi, || format!("[{lo}, {hi}] outside configured interval"))?;
    Ok(format!("upper/eps^2 in [{lo:.4}, {hi:.4}]"))
}

fn random_cut(rng: &mut ChaCha8Rng) -> Option<(CutDescription, (u32, usize))> {
    let g = rng.gen_range(2..=4u32);
    let mut cut = match rng.gen_range(0..3) {
        0 => CutDescription::nonseparating(g),
        1 => CutDescription::separating(g, rng.gen_range(1..=g / 2)),
        _ => {
            let k = rng.gen_range(1..=3usize.min(g as usize + 1));
            let g1 = rng.gen_range(0..=(g + 1 - k as u32));
            CutDescription::two_block(g, g1, k)
        }
    };
    for c in &mut cut.curves {
        *c = rng.gen_range(1..=3);
    }
    // two-block draws can leave an unstable side
    let ambient = cut.ambient().ok()?;
    Some((cut, ambient))
}

fn quadrature_vs_exact() -> Outcome {
    let e = &*ENGINE;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 10 {
        let Some((cut, ambient)) = random_cut(&mut rng) else { continue };
        let lambda = rng.gen_range(0.3..2.0);
        let w = if rng.gen_bool(0.5) {
            WeightSpec::Indicator { lambda }
        } else {
            WeightSpec::Monomial { power: rng.gen_range(1..=3), lambda }
        };
        let exact = geodesic::integrate_f_gamma(e, &cut, &w, ambient, &[]).map_err(|x| x.to_string())?;
        ensure(exact.exact.is_some(), || "power-law weight without exact form".into())?;
        let quad = geodesic::integrate_f_gamma_quadrature(e, &cut, &w, ambient, &[]).map_err(|x| x.to_string())?;
        let rel = (quad.numeric - exact.numeric).abs() / exact.numeric.abs();
        ensure(rel <= 1e-9, || format!("{} with {w:?}: relative error {rel:e}", cut.to_json()))?;
        worst = worst.max(rel);
        tested += 1;
    }
    Ok(format!("10 random cuts, worst relative error {worst:.2e}"))
}

fn positivity() -> Outcome {
    let e = &*ENGINE;
    e.bracket_range(10);
    let mut checked = 0;
    for (k, v) in e.snapshot() {
        ensure(k.is_admissible() && v.is_positive(), || format!("{k} = {v}"))?;
        ensure(Some(v.pi_exp()) == k.d0(), || format!("{k} has pi exponent {}", v.pi_exp()))?;
        checked += 1;
    }
    // one past the top degree vanishes
    for k in keys_up_to_weight(10) {
        let mut d = k.d().to_vec();
        d[0] += k.d0().expect("admissible") + 1;
        let over = BracketKey::new(k.g(), d).expect("stable");
        ensure(e.bracket(&over).is_zero(), || format!("{over} nonzero"))?;
    }
    let report = consistency::check_positivity_homogeneity(e, 10);
    ensure(report.pass, || report.to_string())?;
    Ok(format!("{checked} memoized brackets"))
}

fn cache_round_trip() -> Outcome {
    let e = &*ENGINE;
    e.bracket_range(10);
    let before = e.dump_sha256();
    let dir = tempfile::tempdir().map_err(|x| x.to_string())?;
    let path = dir.path().join("memo.txt");
    e.save_cache(&path).map_err(|x| x.to_string())?;
    let fresh = BracketEngine::new();
    fresh.load_cache(&path).map_err(|x| x.to_string())?;
    let after = fresh.dump_sha256();
    ensure(before == after, || format!("{before} != {after}"))?;
    let again = dir.path().join("again.txt");
    fresh.save_cache(&again).map_err(|x| x.to_string())?;
    let same = std::fs::read(&path).ok() == std::fs::read(&again).ok();
    ensure(same, || "re-saved file differs".into())?;
    Ok(format!("sha256 {}", &before[..16]))
}

fn main() {
    let th = Thresholds::default();
    let criteria: Vec<Criterion> = vec![
        ("exact anchor values", Box::new(anchors)),
        ("top psi power", Box::new(top_psi)),
        ("recursions I and II to weight 10", Box::new(recursions)),
        ("closed volumes", Box::new(closed_volumes)),
        ("ratio laws", Box::new(|| ratio_laws(&th))),
        ("Zograf sandwich", Box::new(|| zograf(&th))),
        ("thin part scaling", Box::new(|| thin_part(&th))),
        ("quadrature vs exact", Box::new(quadrature_vs_exact)),
        ("positivity and homogeneity", Box::new(positivity)),
        ("cache round trip", Box::new(cache_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(note) => println!("criterion {:>2} PASS {name}: {note} ({t:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({t:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
