//! Acceptance criteria AC1–AC15, one line per criterion.

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::Instant;

use koenigs_core::analysis::{
    ahlfors_audit, backward_criterion, backward_generator_limsup, bilipschitz_probe, conjugated_forward_check,
    conjugated_growth, euclidean_sufficient_test, forward_certificate, hayman_wu_audit, regularity_classify,
    shift_classify, AhlforsOptions, BiLipschitzVerdict, Heuristic, RegularityClass, ShiftClass, SpiralSpec, Verdict,
};
use koenigs_core::audit::{
    bounded_target_map, criterion_with_note, half_plane_target_map, random_disk_points, run_example,
    sigma_displayed_expression, AuditConfig, SLIT_STRIP_NOTE,
};
use koenigs_core::domains::{example1_domain, DEFAULT_SLIT_PAIRS};
use koenigs_core::scenarios::{Anchored, Builtin, DEFAULT_CHANNEL_TRUNCATION};
use koenigs_core::semigroup::{Semigroup, Start};
use koenigs_core::{Complex64, Domain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<Vec<String>, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn builtin(b: Builtin) -> Semigroup {
    b.semigroup(DEFAULT_CHANNEL_TRUNCATION).expect("built-in semigroup")
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0xAC);
    r.set_stream(stream);
    r
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Collects failures instead of stopping at the first one.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn ok<T, E: std::fmt::Display>(&mut self, what: &str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes)
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn ac1() -> Outcome {
    let mut t = Tally::default();
    let hp = builtin(Builtin::HalfPlane);
    let strip = builtin(Builtin::Strip);
    let mut worst = 0.0f64;
    for s in [0.1, 1.0, 10.0, 100.0] {
        if let Some(z) = t.ok("half-plane", hp.phi(s, c(0.0, 0.0))) {
            let e = (z - s / (s + 2.0)).norm();
            worst = worst.max(e);
            t.check(e <= 1e-9, || format!("half-plane t={s}: {z}"));
        }
        if let Some(z) = t.ok("strip", strip.phi(s, c(0.0, 0.0))) {
            let e = (z - (PI * s / 4.0).tanh()).norm();
            worst = worst.max(e);
            t.check(e <= 1e-9, || format!("strip t={s}: {z}"));
        }
    }
    t.note(format!("max error {worst:.1e}"));
    t.finish()
}

fn ac2() -> Outcome {
    let mut t = Tally::default();
    let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for b in Builtin::ALL {
        let sg = builtin(b);
        let mut starts = random_disk_points(&mut rng, 3, 0.9);
        starts.push(c(0.5, 0.0));
        for z in starts {
            if let Some(d) = t.ok(b.name(), sg.orbit_deviation(z, &grid, false)) {
                worst = worst.max(d);
                t.check(d <= 1e-6, || format!("{} from {z}: {d:e}", b.name()));
            }
        }
    }
    t.note(format!("sup deviation {worst:.1e} over six built-ins"));
    t.finish()
}

fn ac3() -> Outcome {
    let mut t = Tally::default();
    let mut rng = rng(3);
    let mut count = 0;
    for b in Builtin::ALL {
        let sg = builtin(b);
        for z in random_disk_points(&mut rng, 100, 0.95) {
            if let Some(cert) = t.ok(b.name(), forward_certificate(&sg, z)) {
                count += 1;
                t.check(cert.measured <= cert.constant * 1.05, || {
                    format!("{} from {z}: {} > 1.05·{}", b.name(), cert.measured, cert.constant)
                });
            }
        }
    }
    let hp = builtin(Builtin::HalfPlane);
    if let Some(cert) = t.ok("half-plane anchor", forward_certificate(&hp, c(0.0, 0.0))) {
        t.check(close(cert.constant, 1.0, 1e-12), || format!("anchor constant {}", cert.constant));
        t.check(close(cert.measured, 0.5, 1e-6), || format!("anchor measured {}", cert.measured));
        t.note(format!("{count} certificates; anchor {:.8} ≤ {}", cert.measured, cert.constant));
    }
    t.finish()
}

fn ac4() -> Outcome {
    let mut t = Tally::default();
    let mut rng = rng(4);
    let mut largest = 0.0f64;
    for b in Builtin::ALL.into_iter().filter(|b| !b.is_elliptic()) {
        let sg = builtin(b);
        let mut starts = vec![c(0.0, 0.0)];
        starts.extend(random_disk_points(&mut rng, 5, 0.9));
        for z in starts {
            if let Some(o) = t.ok(b.name(), sg.forward_orbit(z, &[0.0, 100.0])) {
                let (g0, g1) = (o[0].g.norm(), o[1].g.norm());
                largest = largest.max(g1);
                t.check(g1 < 0.05 && g1 < g0, || format!("{} from {z}: {g0} → {g1}", b.name()));
            }
        }
    }
    t.note(format!("largest |G| at t=100: {largest:.3e}"));
    t.finish()
}

fn ac5() -> Outcome {
    let mut t = Tally::default();
    let mut rng = rng(5);
    let mut longest = 0.0f64;
    for b in Builtin::ALL.into_iter().filter(|b| !b.is_elliptic()) {
        let sg = builtin(b);
        let mut starts = vec![c(0.0, 0.0)];
        starts.extend(random_disk_points(&mut rng, 3, 0.9));
        for (i, z) in starts.into_iter().enumerate() {
            if let Some(r) = t.ok(b.name(), hayman_wu_audit(&sg, z)) {
                longest = longest.max(r.length);
                t.check(r.length <= 4.0 * PI, || format!("{} from {z}: {}", b.name(), r.length));
                if i == 0 && matches!(b, Builtin::HalfPlane | Builtin::Strip) {
                    t.check(close(r.length, 2.0, 1e-6), || format!("{} anchor {}", b.name(), r.length));
                }
            }
        }
    }
    t.note(format!("longest {longest:.4} ≤ 4π"));
    t.finish()
}

fn ac6() -> Outcome {
    let mut t = Tally::default();
    let h = Heuristic::default();
    let hp = builtin(Builtin::HalfPlane);
    if let Some(r) = t.ok("half-plane", backward_criterion(&hp, Start::Disk(c(0.0, 0.0)), &h)) {
        for s in &r.samples {
            t.check(close(s.ratio.lo, 0.5, 1e-9) && close(s.ratio.hi, 0.5, 1e-9), || {
                format!("half-plane ratio {:?} at t={}", s.ratio, s.t)
            });
        }
        t.check(matches!(r.verdict, Verdict::Certified { bound } if close(bound, 0.5, 1e-9)), || {
            format!("half-plane verdict {:?}", r.verdict)
        });
    }
    let dil = builtin(Builtin::EllipticDilation);
    if let Some(r) = t.ok("dilation", backward_criterion(&dil, Start::Disk(c(0.5, 0.0)), &h)) {
        let first = r.samples.first().map(|s| s.ratio);
        t.check(
            first.is_some_and(|iv| r.samples[0].t == 0.0 && close(iv.lo, 4.0 / 3.0, 1e-9) && close(iv.hi, 4.0 / 3.0, 1e-9)),
            || format!("dilation ratio at 0: {first:?}"),
        );
        t.check(r.verdict.is_certified(), || format!("dilation verdict {:?}", r.verdict));
    }
    // Sandwich at every sample of every fixture.
    let mut rng = rng(6);
    let mut samples = 0;
    for b in Builtin::ALL {
        let sg = builtin(b);
        let mut starts = random_disk_points(&mut rng, 2, 0.9);
        starts.push(c(0.5, 0.0));
        for z in starts {
            if let Some(r) = t.ok(b.name(), backward_criterion(&sg, Start::Disk(z), &h)) {
                let rr = z.norm();
                for s in &r.samples {
                    samples += 1;
                    match (s.g_abs, b.is_elliptic()) {
                        (Some(g), false) => {
                            let lo = (1.0 - rr) / (1.0 + rr) * s.ratio.lo;
                            let hi = 4.0 * (1.0 + rr) / (1.0 - rr) * s.ratio.hi;
                            t.check(lo - 1e-9 <= g && g <= hi + 1e-9, || {
                                format!("{} from {z} at t={}: |G|={g} outside [{lo}, {hi}]", b.name(), s.t)
                            });
                        }
                        (Some(_), true) => t.check(s.sandwich == Some(true), || {
                            format!("{} from {z} at t={}: sandwich violated", b.name(), s.t)
                        }),
                        (None, _) => {}
                    }
                }
                t.check(r.sandwich_holds, || format!("{} from {z}: sandwich flag false", b.name()));
            }
        }
    }
    t.note(format!("sandwich verified at {samples} samples"));
    t.finish()
}

fn ac7() -> Outcome {
    let mut t = Tally::default();
    let h = Heuristic::default();
    let mut rng = rng(7);
    let mut pairs = 0;
    for b in Builtin::ALL {
        let sg = builtin(b);
        let mut starts = vec![c(0.5, 0.0)];
        if !b.is_elliptic() {
            starts.push(c(0.0, 0.0));
        }
        starts.extend(random_disk_points(&mut rng, 2, 0.9));
        for z in starts {
            let r = t.ok(b.name(), backward_criterion(&sg, Start::Disk(z), &h));
            let l = t.ok(b.name(), backward_generator_limsup(&sg, Start::Disk(z), &h));
            if let (Some(r), Some(l)) = (r, l) {
                pairs += 1;
                t.check(r.verdict.is_certified() == l.bounded, || {
                    format!("{} from {z}: {:?} vs bounded={}", b.name(), r.verdict, l.bounded)
                });
            }
        }
    }
    let hp = builtin(Builtin::HalfPlane);
    let dil = builtin(Builtin::EllipticDilation);
    if let Some(l) = t.ok("half-plane", backward_generator_limsup(&hp, Start::Disk(c(0.0, 0.0)), &h)) {
        t.check(close(l.sup_tail, 2.0, 1e-6), || format!("half-plane tail sup {}", l.sup_tail));
        t.note(format!("half-plane tail sup {:.8}", l.sup_tail));
    }
    if let Some(l) = t.ok("dilation", backward_generator_limsup(&dil, Start::Disk(c(0.5, 0.0)), &h)) {
        t.check(close(l.sup_tail, 1.0, 1e-6), || format!("dilation tail sup {}", l.sup_tail));
        t.note(format!("dilation tail sup {:.8}", l.sup_tail));
    }
    t.note(format!("{pairs} verdict/limsup pairs agree"));
    t.finish()
}

fn ac8() -> Outcome {
    let mut t = Tally::default();
    let h = Heuristic::default();
    let strip = builtin(Builtin::Strip);
    if let Some(r) = t.ok("strip regularity", regularity_classify(&strip, Start::Disk(c(0.0, 0.0)), &h)) {
        t.check(r.class == RegularityClass::Regular, || format!("strip class {:?}", r.class));
        t.check(!r.steps.is_empty(), || "no unit steps".into());
        for s in &r.steps {
            t.check(close(s.distance.lo, PI / 4.0, 1e-9) && close(s.distance.hi, PI / 4.0, 1e-9), || {
                format!("unit step at t={}: {:?}", s.t, s.distance)
            });
        }
    }
    if let Some(r) = t.ok("strip criterion", backward_criterion(&strip, Start::Disk(c(0.0, 0.0)), &h)) {
        t.check(r.verdict.is_certified(), || format!("strip verdict {:?}", r.verdict));
    }
    let mut rng = rng(8);
    let mut names = Vec::new();
    for b in Builtin::ALL.into_iter().filter(|b| b.convex()) {
        names.push(b.name());
        let sg = builtin(b);
        for z in random_disk_points(&mut rng, 50, 0.95) {
            if let Some(r) = t.ok(b.name(), backward_criterion(&sg, Start::Disk(z), &h)) {
                t.check(r.verdict.is_certified(), || format!("{} from {z}: {:?}", b.name(), r.verdict));
            }
        }
    }
    t.note(format!("convex built-ins certified: {}", names.join(", ")));
    t.finish()
}

fn ac9() -> Outcome {
    let mut t = Tally::default();
    let h = Heuristic::default();
    let start = Start::Koenigs(c(0.0, 0.0));
    let ex2 = Anchored::LogChannel.semigroup(DEFAULT_SLIT_PAIRS).expect("example 2");
    if let Some(r) = t.ok("example 2 regularity", regularity_classify(&ex2, start, &h)) {
        t.check(r.class == RegularityClass::NonRegular, || format!("example 2 class {:?}", r.class));
    }
    if let Some(r) = t.ok("example 2 euclidean", euclidean_sufficient_test(&ex2, start, &h)) {
        t.check(r.pass, || format!("example 2 euclidean liminf {}", r.liminf_estimate));
    }
    if let Some(r) = t.ok("example 2 criterion", backward_criterion(&ex2, start, &h)) {
        t.check(r.verdict.is_certified(), || format!("example 2 verdict {:?}", r.verdict));
    }
    let ex3 = Anchored::ShiftedLogChannel.semigroup(DEFAULT_SLIT_PAIRS).expect("example 3");
    if let Some(r) = t.ok("example 3 regularity", regularity_classify(&ex3, start, &h)) {
        t.check(r.class == RegularityClass::NonRegular, || format!("example 3 class {:?}", r.class));
    }
    if let Some(r) = t.ok("example 3 criterion", backward_criterion(&ex3, start, &h)) {
        t.check(r.verdict.is_certified(), || format!("example 3 verdict {:?}", r.verdict));
    }
    t.note("example 2: NonRegular, euclidean pass, Certified; example 3: NonRegular, Certified".into());
    t.finish()
}

fn ac10() -> Outcome {
    let mut t = Tally::default();
    let omega = example1_domain(DEFAULT_SLIT_PAIRS).expect("slit strip");
    if let Some(d) = t.ok("δ_Ω(0)", omega.boundary_distance(c(0.0, 0.0))) {
        t.check(d == 2.0, || format!("δ_Ω(0) = {d}"));
    }
    let mut rng = rng(10);
    for n in [4u32, 8, 16] {
        let Some(sigma) = t.ok("Σ_t", Domain::sigma_half_strip(n)) else { continue };
        let left = -(2f64.powi(n as i32));
        let hw = 1.0 / n as f64;
        let mut accepted = 0;
        let mut violations = 0;
        while accepted < 10_000 {
            let p = c(rng.gen_range(left..left.abs() + 8.0), hw * rng.gen_range(-1.0..1.0));
            if sigma.contains(p) {
                accepted += 1;
                if !omega.contains(p) {
                    violations += 1;
                }
            }
        }
        t.check(violations == 0, || format!("Σ_{n}: {violations} of 10⁴ samples outside Ω"));
    }
    let s8 = Domain::sigma_half_strip(8).expect("Σ_8");
    let exact = s8.exact_distance(c(0.0, 0.0), c(-8.0, 0.0)).unwrap_or(f64::NAN);
    // ½(log sinh(1024π) − log sinh(992π)) with log sinh x = x − ln 2 + ln(1 − e^{−2x}).
    let ln_sinh = |x: f64| x - 2f64.ln() + (-(-2.0 * x).exp()).ln_1p();
    let closed = 0.5 * (ln_sinh(1024.0 * PI) - ln_sinh(992.0 * PI));
    t.check(close(exact, closed, 1e-6), || format!("k_Σ8 = {exact}, closed form {closed}"));
    t.check(close(exact, 16.0 * PI, 1e-6), || format!("k_Σ8 = {exact} vs 16π"));
    let expr = sigma_displayed_expression(8.0);
    t.check(close(expr, 1.9375, 1e-12), || format!("expression at t=8: {expr}"));
    let cfg = AuditConfig::default();
    if let Some(rep) = t.ok("example 1 report", run_example(1, &cfg)) {
        t.check(rep.note.as_deref() == Some(SLIT_STRIP_NOTE), || "example 1 report lacks the note".into());
        t.check(!rep.data.to_string().contains("\"diverges\":true"), || "report asserts divergence".into());
    }
    let sg = Anchored::SlitStrip.semigroup(DEFAULT_SLIT_PAIRS).expect("slit-strip semigroup");
    if let Some(r) = t.ok("example 1 criterion", criterion_with_note(&sg, Start::Koenigs(c(0.0, 0.0)), &Heuristic::default())) {
        t.check(r.note.is_some(), || "criterion report lacks the note".into());
    }
    t.note(format!("k_Σ8 = {exact:.12} (16π = {:.12}); expression 1.9375", 16.0 * PI));
    t.finish()
}

fn ac11() -> Outcome {
    let mut t = Tally::default();
    let h = Heuristic::default();
    let uhp = builtin(Builtin::UpperHalfPlane);
    if let Some(r) = t.ok("upper half-plane", shift_classify(&uhp, c(0.0, 0.0), &h)) {
        t.check(r.class == ShiftClass::Finite, || format!("class {:?}", r.class));
        let q = r.quotient.unwrap_or(f64::NAN);
        t.check(close(q, 1.0, 1e-6), || format!("quotient {q}"));
        t.note(format!("upper half-plane Finite, quotient {q:.8}"));
    }
    for b in [Builtin::Strip, Builtin::EllipticDilation, Builtin::EllipticSpiral] {
        if let Some(r) = t.ok(b.name(), shift_classify(&builtin(b), c(0.2, 0.1), &h)) {
            t.check(r.class == ShiftClass::NotApplicable, || format!("{}: {:?}", b.name(), r.class));
        }
    }
    t.finish()
}

fn ac12() -> Outcome {
    let mut t = Tally::default();
    let mut worst = 0.0f64;
    let mut k = 0;
    for alpha in [-2.0, -1.0, -0.5, 0.5, 1.5] {
        for beta in [-3.0, -1.0, 0.0, 1.0, 4.0] {
            k += 1;
            let Some(spec) = t.ok("spiral", SpiralSpec::new(c(1.0, 0.0), alpha, beta)) else { continue };
            let opts = AhlforsOptions {
                trials: 1000,
                seed: 1000 + k,
                ..Default::default()
            };
            if let Some(r) = t.ok("ahlfors", ahlfors_audit(&spec, &opts)) {
                let bound = 2.0 * (alpha * alpha + beta * beta).sqrt() / alpha.abs();
                t.check(close(r.bound, bound, 1e-12 * bound), || format!("({alpha}, {beta}): bound {}", r.bound));
                t.check(r.trials == 1000, || format!("({alpha}, {beta}): {} trials", r.trials));
                worst = worst.max(r.measured_sup / bound);
                t.check(r.measured_sup <= bound * (1.0 + 1e-3), || {
                    format!("({alpha}, {beta}): {} > {bound}", r.measured_sup)
                });
            }
        }
    }
    if let Some(spec) = t.ok("anchor", SpiralSpec::new(c(1.0, 0.0), -1.0, 1.0)) {
        t.check(close(spec.bound(), 2.0 * SQRT_2, 1e-12), || format!("anchor bound {}", spec.bound()));
    }
    t.note(format!("worst measured/bound {worst:.4}"));
    t.finish()
}

fn ac13() -> Outcome {
    let mut t = Tally::default();
    let hp = builtin(Builtin::HalfPlane);
    let grid: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.1).collect();
    if let Some(o) = t.ok("forward", hp.forward_orbit(c(0.0, 0.0), &grid)) {
        let s: Vec<(f64, f64)> = o.iter().map(|p| (p.t, p.g.norm())).collect();
        if let Some(p) = t.ok("forward probe", bilipschitz_probe(&s)) {
            let want = 2.0 / (102.0 * 102.0);
            t.check(close(p.inf_g, want, 1e-9), || format!("forward inf {} vs {want}", p.inf_g));
            t.check(p.verdict == BiLipschitzVerdict::NotBiLipschitz, || format!("forward {:?}", p.verdict));
            t.note(format!("forward inf {:.3e}", p.inf_g));
        }
    }
    let grid: Vec<f64> = (0..=90).map(|k| k as f64 * 0.01).collect();
    if let Some(o) = t.ok("backward", hp.backward_orbit(c(0.0, 0.0), &grid)) {
        let s: Vec<(f64, f64)> = o.iter().map(|p| (p.t, p.g.norm())).collect();
        if let Some(p) = t.ok("backward probe", bilipschitz_probe(&s)) {
            t.check(close(p.inf_g, 0.5, 1e-9), || format!("backward inf {}", p.inf_g));
            t.check(p.verdict == BiLipschitzVerdict::BiLipschitzOnRange, || format!("backward {:?}", p.verdict));
            t.note(format!("backward inf {:.10}", p.inf_g));
        }
    }
    t.finish()
}

fn ac14() -> Outcome {
    let mut t = Tally::default();
    let hp = builtin(Builtin::HalfPlane);
    let f = bounded_target_map().expect("bounded target");
    let starts = random_disk_points(&mut rng(14), 20, 0.9);
    if let Some(rows) = t.ok("bounded target", conjugated_forward_check(&hp, &f, &starts)) {
        t.check(rows.len() == 20, || format!("{} rows", rows.len()));
        for r in &rows {
            t.check(r.measured.is_finite() && r.measured <= r.bound, || {
                format!("from {}: {} vs {}", r.z, r.measured, r.bound)
            });
        }
        let worst = rows.iter().map(|r| r.measured / r.bound).fold(0.0, f64::max);
        t.note(format!("bounded target worst quotient/bound {worst:.3}"));
    }
    let strip = builtin(Builtin::Strip);
    let g = half_plane_target_map().expect("half-plane target");
    if let Some(gr) = t.ok("growth", conjugated_growth(&strip, &g, c(0.0, 0.0), &[10.0, 100.0, 1000.0])) {
        t.check(gr.log10_quotient.windows(2).all(|p| p[1] > p[0]), || format!("{:?}", gr.log10_quotient));
        t.note(format!("log10 quotient {:.1?}", gr.log10_quotient));
    }
    t.finish()
}

fn ac15() -> Outcome {
    let dir = std::env::temp_dir().join(format!("koenigs-ac15-{}", std::process::id()));
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_koenigs"))
            .args(["audit", "--suite", "all", "--seed", "20240601", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("audit exited with {}: {}", status.status, String::from_utf8_lossy(&status.stderr)));
        }
        std::fs::read(out.join("audit_all.json")).map_err(|e| e.to_string())
    };
    let a = run("a")?;
    let b = run("b")?;
    let _ = std::fs::remove_dir_all(&dir);
    if a == b {
        Ok(vec![format!("two reports of {} bytes are identical", a.len())])
    } else {
        Err("reports differ".into())
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("closed-form orbit anchors", ac1),
        ("dual-method agreement", ac2),
        ("forward Lipschitz certificates", ac3),
        ("generator decay", ac4),
        ("orbit length bound", ac5),
        ("backward criterion anchors and sandwich", ac6),
        ("verdict vs generator limsup", ac7),
        ("regular strip orbit and convex built-ins", ac8),
        ("logarithmic channel examples", ac9),
        ("slit-strip example audit", ac10),
        ("shift classification", ac11),
        ("spiral Ahlfors regularity", ac12),
        ("bi-Lipschitz probes", ac13),
        ("conjugated orbits", ac14),
        ("determinism", ac15),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(notes) => println!("AC{:<2} PASS  {name} [{secs:.1}s] {}", i + 1, notes.join("; ")),
            Err(msg) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name} [{secs:.1}s] {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
