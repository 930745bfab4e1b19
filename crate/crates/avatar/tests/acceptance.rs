//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_DEFECTS` still print FAIL, but do not fail the
//! process; every other failure exits with status 1.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use avatar::report::gated_residual;
use avatar::{compare_zeros, load_zeros, run_parallel, Config, ExperimentRun};
use avatar_core::eta_engine::{eta_multiplier, EtaContext, HPoint};
use avatar_core::exactquad::symbolic_suite;
use avatar_core::sl2z::{in_gamma_upper0, in_gamma_upper1, CosetTable, GroupElem, Letter, Word};
use avatar_core::tracer::{experiment_path, AVATAR};
use avatar_core::treepath::{find_c, pole_scan, THETA_I, THETA_OMEGA};
use avatar_core::zeta::{find_zeros, zeta, zeta_prime};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose failure is a documented defect of the source identities.
const KNOWN_DEFECTS: &[(u32, &str)] = &[(
    1,
    "two of the four claimed B-factorizations do not hold for the b_ij table",
)];

const SEED: u64 = 0x15_96_41;

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.pass = false;
        }
        self.lines
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, what: impl Into<String>) {
        self.lines.push(format!("info {}", what.into()));
    }
}

fn run(id: u32, name: &str, limit: Duration, f: impl FnOnce(&mut Verdict)) -> (u32, bool) {
    let mut v = Verdict::new();
    let t0 = Instant::now();
    f(&mut v);
    let took = t0.elapsed();
    v.check(
        took < limit,
        format!(
            "runtime {:.3} s < {} s",
            took.as_secs_f64(),
            limit.as_secs()
        ),
    );
    println!(
        "{} criterion {id}: {name} ({:.2} s)",
        if v.pass { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    for l in &v.lines {
        println!("      {l}");
    }
    (id, v.pass)
}

fn product_eta(z: C) -> C {
    let q = (C::i() * 2.0 * PI * z).exp();
    let mut prod = C::new(1.0, 0.0);
    let mut qn = q;
    while qn.norm() > 1e-18 {
        prod *= C::new(1.0, 0.0) - qn;
        qn *= q;
    }
    (C::i() * PI * z / 12.0).exp() * prod
}

fn random_element(rng: &mut ChaCha8Rng) -> GroupElem {
    let len = rng.gen_range(1..=8);
    let mut letters = Vec::with_capacity(len);
    let mut rotation = rng.gen_bool(0.5);
    for _ in 0..len {
        letters.push(if rotation {
            if rng.gen_bool(0.5) {
                Letter::R
            } else {
                Letter::RInv
            }
        } else {
            Letter::S
        });
        rotation = !rotation;
    }
    let g = Word::new(letters).eval();
    let shift = GroupElem::translation(rng.gen_range(-3..=3));
    shift * g
}

fn random_fd_point(rng: &mut ChaCha8Rng) -> HPoint {
    loop {
        let x = rng.gen_range(-0.5..=0.5);
        let y = rng.gen_range(0.8..2.5);
        let z = C::new(x, y);
        if z.norm() >= 1.0 {
            return HPoint::new(z).expect("upper half-plane");
        }
    }
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn criterion1(v: &mut Verdict) {
    for c in symbolic_suite() {
        v.check(c.ok, c.name);
    }
}

fn criterion2(v: &mut Verdict) {
    let rep = CosetTable::embedded().verify();
    v.check(
        rep.enumerated_cosets == 96,
        format!("enumerated {} cosets", rep.enumerated_cosets),
    );
    v.check(rep.enumeration_bijection, "bijection with table matrices");
    v.check(
        rep.rows.iter().all(|r| r.word_ok),
        "word column = ±P_n (96 rows)",
    );
    v.check(
        rep.rows.iter().all(|r| r.n_r_ok && r.n_s_ok),
        "nR/nS columns (96 rows)",
    );
    v.check(
        rep.s_squared_identity && rep.r_cubed_identity,
        "S-perm² = id, R-perm³ = id",
    );
    v.check(
        rep.rows.iter().all(|r| r.chase_ok),
        "avatar_apply(1, w_n) = n",
    );
    v.check(rep.a_fixes_41, "P₄₁·A·P₄₁⁻¹ ∈ K");
    v.check(rep.all_ok(), "full report");
}

fn criterion3(v: &mut Verdict) {
    let ctx = EtaContext::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    for (label, z) in [("η(i)", C::new(0.0, 1.0)), ("η(2i)", C::new(0.0, 2.0))] {
        let got = ctx.dedekind_eta(HPoint::new(z).unwrap());
        let err = (got - product_eta(z)).norm();
        v.check(
            err < 1e-12,
            format!("{label} = {:.15} vs product, |Δ| = {err:.1e}", got.re),
        );
    }

    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let g = random_element(&mut rng);
        let z = C::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.5));
        let gz = g.mobius(z);
        if gz.im < 0.02 {
            continue;
        }
        let (c, d) = if g.c() < 0 || (g.c() == 0 && g.d() < 0) {
            (-g.c(), -g.d())
        } else {
            (g.c(), g.d())
        };
        let rhs =
            eta_multiplier(&g) * (C::new(c as f64, 0.0) * z + d as f64).sqrt() * product_eta(z);
        let lhs = product_eta(gz);
        let engine = ctx.dedekind_eta(HPoint::new(gz).unwrap());
        worst = worst.max(rel(rhs, lhs)).max(rel(engine, lhs));
        done += 1;
    }
    v.check(
        worst < 1e-10,
        format!("100 transformation checks, max rel {worst:.1e}"),
    );

    let mut max_res: f64 = 0.0;
    let mut other_worse = 0;
    for _ in 0..50 {
        let p = random_fd_point(&mut rng);
        let res = ctx
            .z_eval(p, None)
            .and_then(|zv| ctx.residuals(p, zv))
            .expect("fundamental-domain points are regular");
        max_res = max_res.max(gated_residual(&res));
        if res.b_relation_other_root > res.b_relation {
            other_worse += 1;
        }
    }
    v.check(
        max_res < 1e-8,
        format!("quadratic, B-relation, quartic, λ², τ₅, Ψ² and cubic residuals at 50 points, max {max_res:.1e}"),
    );
    v.note(format!(
        "unselected root has the larger B-relation residual at {other_worse}/50 points (monitored, not gated)"
    ));

    let gamma0 = [
        GroupElem::new(2, 15, 1, 8).unwrap(),
        GroupElem::new(4, 15, 1, 4).unwrap(),
    ];
    let gamma1 = [
        GroupElem::new(16, 15, 1, 1).unwrap(),
        GroupElem::new(1, 15, 1, 16).unwrap(),
    ];
    v.check(
        gamma0.iter().all(|g| in_gamma_upper0(g, 15))
            && gamma1.iter().all(|g| in_gamma_upper1(g, 15)),
        "test elements lie in Γ⁰(15) / Γ¹(15)",
    );
    let pts = [C::new(0.1, 1.1), C::new(-0.3, 0.9), C::new(0.45, 1.6)];
    let mut tau_dev: f64 = 0.0;
    let mut lambda_dev: f64 = 0.0;
    for z in pts {
        let p = HPoint::new(z).unwrap();
        for g in &gamma0 {
            tau_dev = tau_dev.max(rel(ctx.tau(p.apply(g)), ctx.tau(p)));
        }
        for g in &gamma1 {
            lambda_dev = lambda_dev.max(rel(ctx.lambda_fn(p.apply(g)), ctx.lambda_fn(p)));
        }
    }
    v.check(
        tau_dev < 1e-9,
        format!("τ invariance under Γ⁰(15), rel {tau_dev:.1e}"),
    );
    v.check(
        lambda_dev < 1e-9,
        format!("λ invariance under Γ¹(15), rel {lambda_dev:.1e}"),
    );

    let ji = ctx.j_fricke(HPoint::i()).unwrap();
    let jw = ctx.j_fricke(HPoint::omega()).unwrap();
    let ji_err = (ji - 1728.0).norm() / 1728.0;
    v.check(ji_err < 1e-8, format!("j(i) = 1728, rel {ji_err:.1e}"));
    v.check(
        jw.norm() < 1e-6,
        format!("j(ω) = 0, |j| = {:.1e}", jw.norm()),
    );
}

fn criterion4(v: &mut Verdict) {
    let ctx = EtaContext::new();
    let c = find_c(&ctx).expect("find_c");
    let target = 135.0 * (637.0 * 5f64.sqrt() - 1415.0) / 2.0;
    let j_err = (c.j - target).norm();
    v.check(j_err < 1e-8, format!("|j(c) − target| = {j_err:.1e}"));
    v.check(
        c.theta > THETA_I && c.theta < THETA_OMEGA,
        format!("θ_c = {:.15} in (π/2, 2π/3)", c.theta),
    );
    let z41 = ctx.avatar_eval(AVATAR, c.c, None).unwrap().norm();
    v.check(z41 < 1e-6, format!("|Z₄₁(c)| = {z41:.1e}"));
    let p41c = c.c.apply(&ctx.table().rep(AVATAR));
    let tau_err = (ctx.tau(p41c) - (5f64.sqrt() - 1.0) / 2.0).norm();
    let sigma = ctx.sigma(p41c).unwrap().norm();
    v.check(
        tau_err < 1e-8,
        format!("|τ(P₄₁c) − (−1+√5)/2| = {tau_err:.1e}"),
    );
    v.check(sigma < 1e-6, format!("|σ(P₄₁c)| = {sigma:.1e}"));
    let path = experiment_path(c.theta, false);
    let mism = path.endpoint_mismatches().into_iter().fold(0.0, f64::max);
    v.check(path.len() == 18, format!("P_A has {} edges", path.len()));
    v.check(mism < 1e-12, format!("endpoint mismatch {mism:.1e}"));
    let cfg = Config::default();
    match pole_scan(&ctx, &path, AVATAR, cfg.samples, cfg.pole_cap) {
        Ok(s) => v.check(
            true,
            format!("pole_scan(P_A, 41): max |Z₄₁| = {:.4}", s.max_modulus),
        ),
        Err(e) => v.check(false, format!("pole_scan(P_A, 41): {e}")),
    }
}

fn criterion5(v: &mut Verdict) {
    let z2 = zeta(C::new(2.0, 0.0)).unwrap();
    let z0 = zeta(C::new(0.0, 0.0)).unwrap();
    let e2 = (z2 - PI * PI / 6.0).norm();
    let e0 = (z0 + 0.5).norm();
    v.check(e2 < 1e-12, format!("ζ(2) = π²/6, |Δ| = {e2:.1e}"));
    v.check(e0 < 1e-12, format!("ζ(0) = −1/2, |Δ| = {e0:.1e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut conj: f64 = 0.0;
    for _ in 0..50 {
        let s = C::new(rng.gen_range(-2.0..3.0), rng.gen_range(-40.0..40.0));
        if (s - 1.0).norm() < 0.1 {
            continue;
        }
        let a = zeta(s.conj()).unwrap();
        let b = zeta(s).unwrap().conj();
        conj = conj.max((a - b).norm() / b.norm().max(1.0));
    }
    v.check(
        conj < 1e-12,
        format!("ζ(s̄) = conj ζ(s) at 50 points, {conj:.1e}"),
    );

    let zeros = find_zeros(30).expect("30 zeros");
    let increasing = zeros.ordinates.windows(2).all(|w| w[0] < w[1]);
    v.check(
        zeros.len() == 30 && increasing,
        "30 zeros strictly increasing",
    );
    let res = zeros.max_residual();
    v.check(res < 1e-8, format!("max |ζ(1/2+iγ_m)| = {res:.1e}"));
    let min_d = zeros
        .ordinates
        .iter()
        .map(|&g| zeta_prime(C::new(0.5, g)).unwrap().norm())
        .fold(f64::INFINITY, f64::min);
    v.note(format!("min |ζ′(ρ_m)| = {min_d:.3} (simple zeros)"));
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/zeros_320.txt");
    let reference = load_zeros(file).expect("reference zeros");
    let cmp = compare_zeros(&zeros, &reference);
    v.check(
        cmp.compared == 30 && cmp.max_deviation < 1e-6,
        format!(
            "computed vs reference file, max |Δγ| = {:.1e}",
            cmp.max_deviation
        ),
    );
}

fn experiment(samples: usize) -> ExperimentRun {
    let cfg = Config {
        samples,
        ..Config::default()
    };
    let ctx = cfg.context();
    let theta = find_c(&ctx).expect("find_c").theta;
    let zeros = cfg.zeros(21).expect("zeros");
    run_parallel(&cfg, theta, &zeros, 20, false).expect("experiment runs")
}

fn criterion6(v: &mut Verdict) -> ExperimentRun {
    let run = experiment(Config::default().samples);
    let hits = run.summary().successes();
    v.check(hits == 20, format!("{hits}/20 traces end at ρ_(m+1)"));
    for t in &run.traces {
        match &t.entry.result {
            Ok(r) if t.entry.hit() => {
                let ratio = r.second_distance / r.nearest_distance;
                v.check(
                    r.nearest_distance < 1e-6 && ratio >= 10.0 && r.end_abs_z41 < 1e-5,
                    format!(
                        "m = {:2}: |s(1) − ρ_{}| = {:.1e}, margin {:.0e}, residual {:.1e}",
                        t.entry.m,
                        t.entry.m + 1,
                        r.nearest_distance,
                        ratio,
                        r.max_residual
                    ),
                );
            }
            Ok(r) => v.check(false, format!("m = {}: matched {:?}", t.entry.m, r.matched)),
            Err(e) => v.check(false, format!("m = {}: {e}", t.entry.m)),
        }
    }
    let slowest = run.slowest();
    v.check(
        slowest < Duration::from_secs(10),
        format!("slowest trace {:.3} s < 10 s", slowest.as_secs_f64()),
    );
    v.check(
        run.summary().max_residual() < 1e-8,
        "max |ζ(s) − Z₄₁(z)| < 1e-8",
    );
    run
}

fn criterion7(v: &mut Verdict, base: &ExperimentRun) {
    let fine = experiment(2 * Config::default().samples);
    let mut shift: f64 = 0.0;
    let mut same_match = true;
    for (a, b) in base.traces.iter().zip(&fine.traces) {
        match (&a.entry.result, &b.entry.result) {
            (Ok(x), Ok(y)) => {
                same_match &= x.matched == y.matched;
                shift = shift.max((x.end - y.end).norm());
            }
            _ => same_match = false,
        }
    }
    v.check(same_match, "doubled samples: same matched indices");
    v.check(
        shift < 1e-7,
        format!("doubled samples: max endpoint shift {shift:.1e}"),
    );

    let again = experiment(Config::default().samples);
    let identical = base
        .traces
        .iter()
        .zip(&again.traces)
        .all(|(a, b)| a.entry == b.entry);
    v.check(identical, "experiment re-run is bitwise identical");
    v.check(
        symbolic_suite() == symbolic_suite(),
        "symbolic suite re-run identical",
    );
    v.check(
        CosetTable::embedded().verify() == CosetTable::embedded().verify(),
        "coset suite re-run identical",
    );
    let ctx = EtaContext::new();
    let once = find_c(&ctx).unwrap();
    let twice = find_c(&EtaContext::new()).unwrap();
    v.check(once == twice, "find_c re-run identical");
}

fn main() -> ExitCode {
    let mut results = vec![
        run(1, "symbolic suite", Duration::from_secs(1), criterion1),
        run(2, "coset suite", Duration::from_secs(1), criterion2),
        run(3, "modular functions", Duration::from_secs(30), criterion3),
        run(4, "geometry", Duration::from_secs(30), criterion4),
        run(5, "zeta", Duration::from_secs(30), criterion5),
    ];
    let mut base = None;
    results.push(run(
        6,
        "experiment m = 1..20",
        Duration::from_secs(300),
        |v| base = Some(criterion6(v)),
    ));
    let base = base.expect("criterion 6 ran");
    results.push(run(7, "stability", Duration::from_secs(300), |v| {
        criterion7(v, &base)
    }));

    let failed: Vec<u32> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|id| !KNOWN_DEFECTS.iter().any(|(k, _)| k == id))
        .collect();
    println!(
        "\n{} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    for (id, why) in KNOWN_DEFECTS {
        if failed.contains(id) {
            println!("criterion {id} fails on a known defect: {why}");
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
