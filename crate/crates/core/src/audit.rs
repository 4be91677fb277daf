//! Invariant suites over the built-in semigroups and the worked-example
//! reports, with deterministic, hashed metadata.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    ahlfors_audit, backward_criterion, backward_generator_limsup, bilipschitz_probe, conjugated_forward_check,
    conjugated_growth, euclidean_sufficient_test, forward_certificate, hayman_wu_audit, regularity_classify,
    shift_classify, AhlforsOptions, BiLipschitzVerdict, CriterionReport, Heuristic, RegularityClass, ShiftClass,
    SpiralSpec, Verdict,
};
use crate::confmap::{MapExpr, Primitive};
use crate::domains::{example1_domain, DEFAULT_SLIT_PAIRS};
use crate::ext::ln_sinh;
use crate::hypgeo::{disk_density, domain_density, domain_distance};
use crate::scenarios::{Anchored, Builtin, DEFAULT_CHANNEL_TRUNCATION};
use crate::semigroup::{Semigroup, Start};
use crate::{par, Complex64, Domain, Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Note attached to every report on the slit-strip example.
pub const SLIT_STRIP_NOTE: &str = "slit-strip example: the simplified half-strip distance \
    ½·log(2^n/(2^n - t)) understates the exact value ½·log(sinh(πn2^n/2)/sinh(πn(2^n - t)/2)) \
    ≈ πnt/4 by many orders of magnitude; exact distances, the simplified lower-bound expression \
    n(2^n - t)/(4·2^n) and interval enclosures are reported side by side and no divergence \
    verdict is asserted from the simplified expression";

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Metrics,
    Semigroup,
    Forward,
    Backward,
    Shift,
    Ahlfors,
    HaymanWu,
    All,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Metrics,
        Suite::Semigroup,
        Suite::Forward,
        Suite::Backward,
        Suite::Shift,
        Suite::Ahlfors,
        Suite::HaymanWu,
        Suite::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Metrics => "metrics",
            Suite::Semigroup => "semigroup",
            Suite::Forward => "forward",
            Suite::Backward => "backward",
            Suite::Shift => "shift",
            Suite::Ahlfors => "ahlfors",
            Suite::HaymanWu => "haymanwu",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::param(format!("unknown suite '{s}'")))
    }
}

/// Knobs shared by the suites and example reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub seed: u64,
    pub slit_pairs: u32,
    pub channel_truncation: f64,
    /// Overrides the probe horizon of every semigroup.
    pub tmax: Option<f64>,
    pub heuristic: Heuristic,
    /// Random starts per built-in for the forward certificates.
    pub forward_starts: usize,
    /// Random starts per convex built-in for the backward verdicts.
    pub convex_starts: usize,
    pub ahlfors_trials: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            seed: DEFAULT_SEED,
            slit_pairs: DEFAULT_SLIT_PAIRS,
            channel_truncation: DEFAULT_CHANNEL_TRUNCATION,
            tmax: None,
            heuristic: Heuristic::default(),
            forward_starts: 100,
            convex_starts: 50,
            ahlfors_trials: 1000,
        }
    }
}

impl AuditConfig {
    pub fn builtin(&self, b: Builtin) -> Result<Semigroup> {
        let sg = b.semigroup(self.channel_truncation)?;
        match self.tmax {
            Some(t) => sg.with_tmax(t),
            None => Ok(sg),
        }
    }

    pub fn anchored(&self, a: Anchored) -> Result<Semigroup> {
        let sg = a.semigroup(self.slit_pairs)?;
        match self.tmax {
            Some(t) => sg.with_tmax(t),
            None => Ok(sg),
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationMeta {
    pub slit_pairs: Option<u32>,
    pub channel: Option<f64>,
    pub tmax: Option<f64>,
}

/// Provenance embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    /// SHA-256 of the canonical JSON of the request.
    pub scenario_hash: String,
    pub seed: u64,
    pub truncation: TruncationMeta,
    pub heuristic: Heuristic,
}

impl Metadata {
    /// Metadata for a request identified by `kind` and any serializable payload.
    pub fn new<T: Serialize>(kind: &str, payload: &T, seed: u64, truncation: TruncationMeta, heuristic: Heuristic) -> Self {
        let canonical = serde_json::to_vec(&json!({ "kind": kind, "payload": payload })).unwrap_or_default();
        Metadata {
            version: VERSION.to_string(),
            scenario_hash: sha256_hex(&canonical),
            seed,
            truncation,
            heuristic,
        }
    }

    fn for_config(kind: &str, cfg: &AuditConfig) -> Self {
        Metadata::new(
            kind,
            cfg,
            cfg.seed,
            TruncationMeta {
                slit_pairs: Some(cfg.slit_pairs),
                channel: Some(cfg.channel_truncation),
                tmax: cfg.tmax,
            },
            cfg.heuristic,
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One audited invariant with its pass count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
    /// Headline measurements.
    pub values: BTreeMap<String, Value>,
    /// At most a handful of failure descriptions.
    pub failures: Vec<String>,
}

const MAX_FAILURES: usize = 8;

struct CheckBuilder {
    check: Check,
}

impl CheckBuilder {
    fn new(id: &str, description: &str) -> Self {
        CheckBuilder {
            check: Check {
                id: id.into(),
                description: description.into(),
                passed: 0,
                total: 0,
                pass: true,
                values: BTreeMap::new(),
                failures: Vec::new(),
            },
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) -> &mut Self {
        self.check.total += 1;
        if ok {
            self.check.passed += 1;
        } else if self.check.failures.len() < MAX_FAILURES {
            self.check.failures.push(what());
        }
        self
    }

    /// Counts `r` as a failure when it is an error; returns the value otherwise.
    fn attempt<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.expect(false, || format!("{label}: {e}"));
                None
            }
        }
    }

    fn value(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.check.values.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    fn finish(mut self) -> Check {
        self.check.pass = self.check.total > 0 && self.check.passed == self.check.total;
        self.check
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub metadata: Metadata,
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
}

/// Runs the named suite; `All` runs every other suite in order.
pub fn run_audit(suite: Suite, cfg: &AuditConfig) -> Result<AuditReport> {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::ALL.into_iter().filter(|s| *s != Suite::All).collect(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Metrics => metrics_suite(cfg)?,
            Suite::Semigroup => semigroup_suite(cfg)?,
            Suite::Forward => forward_suite(cfg)?,
            Suite::Backward => backward_suite(cfg)?,
            Suite::Shift => shift_suite(cfg)?,
            Suite::Ahlfors => ahlfors_suite(cfg)?,
            Suite::HaymanWu => hayman_wu_suite(cfg)?,
            Suite::All => unreachable!(),
        });
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(AuditReport {
        metadata: Metadata::for_config(&format!("audit:{suite}"), cfg),
        suite,
        total: checks.len(),
        pass: passed == checks.len(),
        passed,
        checks,
    })
}

/// Uniform points in `|z| < radius`.
pub fn random_disk_points(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)))
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn metrics_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut b = CheckBuilder::new("metrics.anchors", "closed-form densities of the disk, half-plane and strip");
    let d0 = disk_density(c(0.0, 0.0))?;
    let d5 = disk_density(c(0.5, 0.0))?;
    let hp = domain_density(&Domain::right_half_plane(), c(1.0, 0.0))?;
    let st = domain_density(&Domain::strip(1.0, 0.0)?, c(0.0, 0.0))?;
    b.expect(d0 == 1.0, || format!("disk density at 0 is {d0}"));
    b.expect(close(d5, 4.0 / 3.0, 1e-15), || format!("disk density at 0.5 is {d5}"));
    b.expect(hp.is_point() && close(hp.lo, 0.5, 1e-15), || format!("half-plane density at 1 is {hp:?}"));
    b.expect(st.is_point() && close(st.lo, PI / 4.0, 1e-15), || format!("strip density at 0 is {st:?}"));
    b.value("strip_density_at_0", st.lo);
    out.push(b.finish());

    let mut b = CheckBuilder::new("metrics.boundary_distance", "boundary distances of the example domains");
    let ex1 = example1_domain(cfg.slit_pairs)?;
    let at0 = ex1.boundary_distance(c(0.0, 0.0))?;
    let at6 = ex1.boundary_distance(c(-6.0, 0.0))?;
    let ex2 = Anchored::LogChannel.semigroup(cfg.slit_pairs)?;
    let e4 = ex2.omega().boundary_distance(c(-(4f64.exp()), 0.0))?;
    b.expect(at0 == 2.0, || format!("slit strip at 0: {at0}"));
    b.expect(close(at6, 0.5, 1e-12), || format!("slit strip at -6: {at6}"));
    b.expect(close(e4, 0.25, 2e-3), || format!("log channel at -e^4: {e4}"));
    b.value("slit_strip_at_0", at0).value("slit_strip_at_minus_6", at6).value("log_channel_at_minus_e4", e4);
    out.push(b.finish());

    let mut b = CheckBuilder::new(
        "metrics.enclosures",
        "distance enclosures contain the exact distance on random pairs of closed-form domains",
    );
    let mut rng = cfg.rng(1);
    for dom in [Domain::right_half_plane(), Domain::strip(1.0, 0.0)?, Domain::half_strip(-3.0, 0.5)?] {
        let pts = dom.sample_points(&mut rng, 200);
        for pair in pts.chunks(2).filter(|p| p.len() == 2) {
            let exact = dom.exact_distance(pair[0], pair[1]).unwrap_or(f64::NAN);
            let lower = crate::hypgeo::distance_lower_bound(
                dom.boundary_distance(pair[0])?,
                dom.boundary_distance(pair[1])?,
                (pair[0] - pair[1]).norm(),
                dom.convex(),
            );
            b.expect(lower <= exact * (1.0 + 1e-12) + 1e-15, || {
                format!("{:?}: lower {lower} above exact {exact} for {} {}", dom.kind(), pair[0], pair[1])
            });
        }
    }
    let pts = ex1.sample_points(&mut rng, 100);
    for pair in pts.chunks(2).filter(|p| p.len() == 2) {
        let iv = domain_distance(&ex1, pair[0], pair[1], None)?;
        b.expect(iv.lo <= iv.hi, || format!("empty enclosure {iv:?}"));
    }
    out.push(b.finish());

    out.push(sigma_containment_check(cfg, &ex1)?);
    out.push(sigma_distance_check()?);
    Ok(out)
}

/// Half-strip `Σ_n` from the slit-strip example.
fn sigma(n: u32) -> Result<Domain> {
    Domain::sigma_half_strip(n)
}

/// Closed form of `k_{Σ_n}(0, -t)` in log space.
pub fn sigma_distance_closed_form(n: u32, t: f64) -> f64 {
    let p = 2f64.powi(n as i32);
    let nf = n as f64;
    0.5 * (ln_sinh(PI * nf * p / 2.0) - ln_sinh(PI * nf * (p - t) / 2.0))
}

/// The simplified lower-bound expression `n(2^n - t)/(4·2^n)`.
pub fn sigma_displayed_expression(t: f64) -> f64 {
    let n = t.floor();
    let p = 2f64.powf(n);
    n * (p - t) / (4.0 * p)
}

fn sigma_points(rng: &mut ChaCha8Rng, n: u32, count: usize) -> Result<Vec<Complex64>> {
    let s = sigma(n)?;
    let mut pts = s.sample_points(rng, count / 2);
    let left = -(2f64.powi(n as i32));
    let hw = 1.0 / n as f64;
    while pts.len() < count {
        let p = c(rng.gen_range(left..4.0), hw * rng.gen_range(-1.0..1.0));
        if s.contains(p) {
            pts.push(p);
        }
    }
    Ok(pts)
}

fn sigma_containment_check(cfg: &AuditConfig, omega: &Domain) -> Result<Check> {
    let mut b = CheckBuilder::new("metrics.sigma_containment", "half-strips Σ_t lie in the slit strip (10⁴ samples each)");
    let mut rng = cfg.rng(2);
    for n in [4u32, 8, 16] {
        let pts = sigma_points(&mut rng, n, 10_000)?;
        let violations = pts.iter().filter(|p| !omega.contains(**p)).count();
        b.expect(violations == 0 && pts.len() == 10_000, || format!("Σ_{n}: {violations} violations"));
        b.value(&format!("violations_t{n}"), violations);
    }
    Ok(b.finish())
}

fn sigma_distance_check() -> Result<Check> {
    let mut b = CheckBuilder::new("metrics.sigma_distance", "exact half-strip distance k_Σ8(0,-8) in log space");
    let s8 = sigma(8)?;
    let exact = s8.exact_distance(c(0.0, 0.0), c(-8.0, 0.0)).unwrap_or(f64::NAN);
    let closed = sigma_distance_closed_form(8, 8.0);
    b.expect(close(exact, closed, 1e-6), || format!("exact {exact} vs closed form {closed}"));
    b.expect(close(exact, 16.0 * PI, 1e-6), || format!("exact {exact} vs 16π"));
    let expr = sigma_displayed_expression(8.0);
    b.expect(close(expr, 1.9375, 1e-12), || format!("expression {expr}"));
    b.value("exact", exact).value("closed_form", closed).value("displayed_expression", expr);
    Ok(b.finish())
}

fn semigroup_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut b = CheckBuilder::new("semigroup.closed_form", "φ_t(0) = t/(t+2) on the half-plane and tanh(πt/4) on the strip");
    let hp = cfg.builtin(Builtin::HalfPlane)?;
    let strip = cfg.builtin(Builtin::Strip)?;
    for t in [0.1, 1.0, 10.0, 100.0] {
        if let Some(z) = b.attempt("half-plane φ_t(0)", hp.phi(t, c(0.0, 0.0))) {
            let want = t / (t + 2.0);
            b.expect((z - want).norm() <= 1e-9, || format!("half-plane t={t}: {z} vs {want}"));
        }
        if let Some(z) = b.attempt("strip φ_t(0)", strip.phi(t, c(0.0, 0.0))) {
            let want = (PI * t / 4.0).tanh();
            b.expect((z - want).norm() <= 1e-9, || format!("strip t={t}: {z} vs {want}"));
        }
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new("semigroup.dual_method", "pullback and ODE orbits agree within 1e-6 on [0, 10]");
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
    let mut rng = cfg.rng(3);
    let mut worst = 0.0f64;
    for bi in Builtin::ALL {
        let sg = cfg.builtin(bi)?;
        let mut starts = vec![c(0.0, 0.0)];
        starts.extend(random_disk_points(&mut rng, 2, 0.9));
        for z in starts {
            if let Some(d) = b.attempt(bi.name(), sg.orbit_deviation(z, &grid, false)) {
                worst = worst.max(d);
                b.expect(d <= 1e-6, || format!("{} from {z}: deviation {d:e}", bi.name()));
            }
        }
    }
    b.value("worst_deviation", worst);
    out.push(b.finish());

    let mut b = CheckBuilder::new("semigroup.composition", "φ_s ∘ φ_t = φ_{s+t} at random points");
    let mut rng = cfg.rng(4);
    for bi in Builtin::ALL {
        let sg = cfg.builtin(bi)?;
        for z in random_disk_points(&mut rng, 3, 0.9) {
            let (s, t) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
            let r = sg.phi(t, z).and_then(|a| sg.phi(s, a)).and_then(|a| Ok((a, sg.phi(s + t, z)?)));
            if let Some((a, b2)) = b.attempt(bi.name(), r) {
                b.expect((a - b2).norm() <= 1e-9, || format!("{} at {z}: {a} vs {b2}", bi.name()));
            }
        }
    }
    out.push(b.finish());
    Ok(out)
}

fn forward_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut b = CheckBuilder::new("forward.certificates", "forward Lipschitz certificates hold for random starts");
    let mut rng = cfg.rng(5);
    for bi in Builtin::ALL {
        let sg = cfg.builtin(bi)?;
        let starts = random_disk_points(&mut rng, cfg.forward_starts, 0.95);
        let certs = par::map(&starts, |&z| forward_certificate(&sg, z));
        for (z, r) in starts.iter().zip(certs) {
            if let Some(cert) = b.attempt(bi.name(), r) {
                b.expect(cert.pass, || {
                    format!("{} from {z}: measured {} vs constant {}", bi.name(), cert.measured, cert.constant)
                });
            }
        }
    }
    let hp = cfg.builtin(Builtin::HalfPlane)?;
    if let Some(cert) = b.attempt("half-plane anchor", forward_certificate(&hp, c(0.0, 0.0))) {
        b.expect(close(cert.constant, 1.0, 1e-12), || format!("half-plane constant {}", cert.constant));
        b.expect(close(cert.measured, 0.5, 1e-6), || format!("half-plane measured {}", cert.measured));
        b.value("half_plane_constant", cert.constant).value("half_plane_measured", cert.measured);
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new("forward.generator_decay", "|G(γ(100))| < 0.05 and below |G(γ(0))|");
    let mut rng = cfg.rng(6);
    for bi in Builtin::ALL.into_iter().filter(|b| !b.is_elliptic()) {
        let sg = cfg.builtin(bi)?;
        let mut starts = vec![c(0.0, 0.0)];
        starts.extend(random_disk_points(&mut rng, 4, 0.9));
        for z in starts {
            let r = sg.forward_orbit(z, &[0.0, 100.0]);
            if let Some(orbit) = b.attempt(bi.name(), r) {
                let (g0, g1) = (orbit[0].g.norm(), orbit[1].g.norm());
                b.expect(g1 < 0.05 && g1 < g0, || format!("{} from {z}: |G| {g0} → {g1}", bi.name()));
            }
        }
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new("forward.bilipschitz", "forward orbits are not bi-Lipschitz; short backward arcs are");
    let grid: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.1).collect();
    if let Some(orbit) = b.attempt("half-plane forward", hp.forward_orbit(c(0.0, 0.0), &grid)) {
        let samples: Vec<(f64, f64)> = orbit.iter().map(|s| (s.t, s.g.norm())).collect();
        let p = bilipschitz_probe(&samples)?;
        let want = 2.0 / (102.0 * 102.0);
        b.expect(close(p.inf_g, want, 1e-9), || format!("forward inf {} vs {want}", p.inf_g));
        b.expect(p.verdict == BiLipschitzVerdict::NotBiLipschitz, || format!("forward verdict {:?}", p.verdict));
        b.value("forward_inf", p.inf_g);
    }
    let grid: Vec<f64> = (0..=90).map(|k| k as f64 * 0.01).collect();
    if let Some(orbit) = b.attempt("half-plane backward", hp.backward_orbit(c(0.0, 0.0), &grid)) {
        let samples: Vec<(f64, f64)> = orbit.iter().map(|s| (s.t, s.g.norm())).collect();
        let p = bilipschitz_probe(&samples)?;
        b.expect(close(p.inf_g, 0.5, 1e-9), || format!("backward inf {}", p.inf_g));
        b.expect(p.verdict == BiLipschitzVerdict::BiLipschitzOnRange, || format!("backward verdict {:?}", p.verdict));
        b.value("backward_inf", p.inf_g);
    }
    out.push(b.finish());

    out.extend(conjugation_checks(cfg)?);
    Ok(out)
}

/// `z - z²/2` written as a chain.
pub fn bounded_target_map() -> Result<MapExpr> {
    MapExpr::new(
        vec![
            Primitive::affine(c(1.0, 0.0), c(-1.0, 0.0))?,
            Primitive::Power { p: 2.0, branch: PI },
            Primitive::affine(c(-0.5, 0.0), c(0.5, 0.0))?,
        ],
        Domain::unit_disk(),
        Domain::plane(),
    )
}

/// `z/(1 - z)` onto the half-plane `Re > -1/2`.
pub fn half_plane_target_map() -> Result<MapExpr> {
    MapExpr::new(
        vec![Primitive::mobius(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0))?],
        Domain::unit_disk(),
        Domain::plane(),
    )
}

fn conjugation_checks(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut b = CheckBuilder::new(
        "forward.conjugated_bounded",
        "conjugated forward quotients stay below the boundary-distance bound for a bounded target",
    );
    let hp = cfg.builtin(Builtin::HalfPlane)?;
    let f = bounded_target_map()?;
    let mut rng = cfg.rng(7);
    let starts = random_disk_points(&mut rng, 20, 0.9);
    if let Some(rows) = b.attempt("conjugated check", conjugated_forward_check(&hp, &f, &starts)) {
        let worst = rows.iter().map(|r| r.measured / r.bound).fold(0.0, f64::max);
        for r in &rows {
            b.expect(r.pass && r.measured.is_finite(), || format!("from {}: {} vs {}", r.z, r.measured, r.bound));
        }
        b.value("worst_measured_over_bound", worst);
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new(
        "forward.conjugated_growth",
        "conjugated strip orbit under z/(1-z) has a quotient growing across decades",
    );
    let strip = cfg.builtin(Builtin::Strip)?;
    let g = half_plane_target_map()?;
    if let Some(gr) = b.attempt("growth", conjugated_growth(&strip, &g, c(0.0, 0.0), &[10.0, 100.0, 1000.0])) {
        b.expect(gr.increasing, || format!("log10 quotients {:?}", gr.log10_quotient));
        b.value("log10_quotient", &gr.log10_quotient);
    }
    out.push(b.finish());
    Ok(out)
}

/// Criterion report with the note appropriate to the domain.
pub fn criterion_with_note(sg: &Semigroup, start: Start, heuristic: &Heuristic) -> Result<CriterionReport> {
    let mut r = backward_criterion(sg, start, heuristic)?;
    if sg.omega().truncation().is_some() {
        r.note = Some(SLIT_STRIP_NOTE.to_string());
    }
    Ok(r)
}

fn backward_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let h = &cfg.heuristic;
    let hp = cfg.builtin(Builtin::HalfPlane)?;
    let dil = cfg.builtin(Builtin::EllipticDilation)?;

    let mut b = CheckBuilder::new("backward.criterion_anchors", "half-plane ratio ≡ 1/2 and dilation ratio 4/3 at t = 0");
    if let Some(r) = b.attempt("half-plane", backward_criterion(&hp, Start::Disk(c(0.0, 0.0)), h)) {
        for s in &r.samples {
            b.expect(close(s.ratio.lo, 0.5, 1e-9) && close(s.ratio.hi, 0.5, 1e-9), || {
                format!("half-plane ratio at t={}: {:?}", s.t, s.ratio)
            });
        }
        let ok = matches!(r.verdict, Verdict::Certified { bound } if close(bound, 0.5, 1e-9));
        b.expect(ok, || format!("half-plane verdict {:?}", r.verdict));
        b.value("half_plane_verdict", r.verdict);
    }
    if let Some(r) = b.attempt("dilation", backward_criterion(&dil, Start::Disk(c(0.5, 0.0)), h)) {
        let first = r.samples.first().map(|s| s.ratio);
        b.expect(first.is_some_and(|iv| close(iv.lo, 4.0 / 3.0, 1e-9) && close(iv.hi, 4.0 / 3.0, 1e-9)), || {
            format!("dilation ratio at 0: {first:?}")
        });
        b.expect(r.verdict.is_certified(), || format!("dilation verdict {:?}", r.verdict));
        b.value("dilation_verdict", r.verdict);
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new(
        "backward.sandwich_and_limsup",
        "generator sandwich at every sample; Certified iff bounded generator limsup",
    );
    let mut rng = cfg.rng(8);
    for bi in Builtin::ALL {
        let sg = cfg.builtin(bi)?;
        let mut starts = vec![c(0.5, 0.0)];
        if !bi.is_elliptic() {
            starts.push(c(0.0, 0.0));
        }
        starts.extend(random_disk_points(&mut rng, 3, 0.9));
        for z in starts {
            let r = backward_criterion(&sg, Start::Disk(z), h);
            let l = backward_generator_limsup(&sg, Start::Disk(z), h);
            if let (Some(r), Some(l)) = (b.attempt(bi.name(), r), b.attempt(bi.name(), l)) {
                b.expect(r.sandwich_holds, || format!("{} from {z}: sandwich violated", bi.name()));
                b.expect(r.verdict.is_certified() == l.bounded, || {
                    format!("{} from {z}: verdict {:?} vs limsup bounded {}", bi.name(), r.verdict, l.bounded)
                });
            }
        }
    }
    if let Some(l) = b.attempt("half-plane limsup", backward_generator_limsup(&hp, Start::Disk(c(0.0, 0.0)), h)) {
        b.expect(close(l.sup_tail, 2.0, 1e-6), || format!("half-plane tail sup {}", l.sup_tail));
        b.value("half_plane_tail_sup", l.sup_tail);
    }
    if let Some(l) = b.attempt("dilation limsup", backward_generator_limsup(&dil, Start::Disk(c(0.5, 0.0)), h)) {
        b.expect(close(l.sup_tail, 1.0, 1e-6), || format!("dilation tail sup {}", l.sup_tail));
        b.value("dilation_tail_sup", l.sup_tail);
    }
    out.push(b.finish());

    let mut b = CheckBuilder::new("backward.regular", "strip orbit is regular with unit steps π/4; convex built-ins certify");
    let strip = cfg.builtin(Builtin::Strip)?;
    if let Some(rep) = b.attempt("strip regularity", regularity_classify(&strip, Start::Disk(c(0.0, 0.0)), h)) {
        b.expect(rep.class == RegularityClass::Regular, || format!("strip class {:?}", rep.class));
        for s in &rep.steps {
            b.expect(close(s.distance.lo, PI / 4.0, 1e-9) && close(s.distance.hi, PI / 4.0, 1e-9), || {
                format!("strip step at t={}: {:?}", s.t, s.distance)
            });
        }
    }
    if let Some(r) = b.attempt("strip criterion", backward_criterion(&strip, Start::Disk(c(0.0, 0.0)), h)) {
        b.expect(r.verdict.is_certified(), || format!("strip verdict {:?}", r.verdict));
    }
    let mut rng = cfg.rng(9);
    for bi in Builtin::ALL.into_iter().filter(|b| b.convex()) {
        let sg = cfg.builtin(bi)?;
        let starts = random_disk_points(&mut rng, cfg.convex_starts, 0.95);
        let reports = par::map(&starts, |&z| {
            let r = backward_criterion(&sg, Start::Disk(z), h)?;
            let reg = regularity_classify(&sg, Start::Disk(z), h)?;
            let lim = if reg.class == RegularityClass::Regular {
                Some(backward_generator_limsup(&sg, Start::Disk(z), h)?.bounded)
            } else {
                None
            };
            Ok((r.verdict, lim))
        });
        for (z, r) in starts.iter().zip(reports) {
            if let Some((v, lim)) = b.attempt(bi.name(), r) {
                b.expect(v.is_certified(), || format!("{} from {z}: {v:?}", bi.name()));
                if let Some(bounded) = lim {
                    b.expect(bounded, || format!("{} from {z}: regular but unbounded generator", bi.name()));
                }
            }
        }
    }
    out.push(b.finish());

    for id in [1u8, 2, 3] {
        let rep = run_example(id, cfg)?;
        let mut b = CheckBuilder::new(&format!("backward.example{id}"), &rep.title);
        for ch in &rep.checks {
            b.expect(ch.pass, || format!("{}: {:?}", ch.id, ch.failures));
        }
        out.push(b.finish());
    }
    Ok(out)
}

fn shift_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let h = &cfg.heuristic;
    let mut b = CheckBuilder::new("shift.classes", "finite shift in the upper half-plane; strip and elliptic not applicable");
    let uhp = cfg.builtin(Builtin::UpperHalfPlane)?;
    if let Some(r) = b.attempt("upper half-plane", shift_classify(&uhp, c(0.0, 0.0), h)) {
        b.expect(r.class == ShiftClass::Finite, || format!("class {:?}", r.class));
        let q = r.quotient.unwrap_or(f64::NAN);
        b.expect(close(q, 1.0, 1e-6), || format!("quotient {q}"));
        b.expect(r.consistent == Some(true), || "class and quotient disagree".into());
        b.value("upper_half_plane_quotient", q);
    }
    for bi in [Builtin::Strip, Builtin::EllipticDilation, Builtin::EllipticSpiral] {
        let sg = cfg.builtin(bi)?;
        if let Some(r) = b.attempt(bi.name(), shift_classify(&sg, c(0.0, 0.0), h)) {
            b.expect(r.class == ShiftClass::NotApplicable, || format!("{}: {:?}", bi.name(), r.class));
        }
    }
    Ok(vec![b.finish()])
}

/// `α` and `β` values of the spiral grid.
pub const SPIRAL_ALPHAS: [f64; 5] = [-2.0, -1.0, -0.5, 0.5, 1.5];
pub const SPIRAL_BETAS: [f64; 5] = [-3.0, -1.0, 0.0, 1.0, 4.0];

fn ahlfors_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut b = CheckBuilder::new("ahlfors.spirals", "spiral traces are Ahlfors regular with the stated constant");
    let mut k = 0u64;
    let mut worst = 0.0f64;
    for alpha in SPIRAL_ALPHAS {
        for beta in SPIRAL_BETAS {
            let spec = SpiralSpec::new(c(1.0, 0.0), alpha, beta)?;
            let opts = AhlforsOptions {
                trials: cfg.ahlfors_trials,
                seed: cfg.seed.wrapping_add(k),
                ..Default::default()
            };
            k += 1;
            if let Some(r) = b.attempt("ahlfors", ahlfors_audit(&spec, &opts)) {
                worst = worst.max(r.measured_sup / r.bound);
                b.expect(r.pass, || format!("(α, β) = ({alpha}, {beta}): {} vs {}", r.measured_sup, r.bound));
            }
        }
    }
    let anchor = SpiralSpec::new(c(1.0, 0.0), -1.0, 1.0)?.bound();
    b.expect(close(anchor, 2.0 * SQRT_2, 1e-12), || format!("anchor bound {anchor}"));
    b.value("worst_ratio_to_bound", worst).value("anchor_bound", anchor);
    Ok(vec![b.finish()])
}

fn hayman_wu_suite(cfg: &AuditConfig) -> Result<Vec<Check>> {
    let mut b = CheckBuilder::new("haymanwu.lengths", "full non-elliptic orbits are shorter than 4π");
    let mut rng = cfg.rng(10);
    let mut lengths = BTreeMap::new();
    for bi in Builtin::ALL.into_iter().filter(|b| !b.is_elliptic()) {
        let sg = cfg.builtin(bi)?;
        let mut starts = vec![c(0.0, 0.0)];
        starts.extend(random_disk_points(&mut rng, 4, 0.9));
        let mut longest = 0.0f64;
        for (i, z) in starts.into_iter().enumerate() {
            if let Some(r) = b.attempt(bi.name(), hayman_wu_audit(&sg, z)) {
                longest = longest.max(r.length);
                b.expect(r.pass, || format!("{} from {z}: length {}", bi.name(), r.length));
                if i == 0 && matches!(bi, Builtin::HalfPlane | Builtin::Strip) {
                    b.expect(close(r.length, 2.0, 1e-6), || format!("{} anchor length {}", bi.name(), r.length));
                }
            }
        }
        lengths.insert(bi.name(), longest);
    }
    b.value("longest", lengths);
    Ok(vec![b.finish()])
}

/// Report reproducing the intermediate quantities of one worked example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub metadata: Metadata,
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub pass: bool,
}

impl ExampleReport {
    /// Plain-text summary, one line per check followed by the note.
    pub fn summary(&self) -> String {
        let mut s = format!("example {}: {}\n", self.id, self.title);
        for ch in &self.checks {
            let status = if ch.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("  [{status}] {} ({}/{})", ch.id, ch.passed, ch.total));
            if !ch.values.is_empty() {
                let vals: Vec<String> = ch.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
                s.push_str(&format!(" {}", vals.join(" ")));
            }
            s.push('\n');
            for f in &ch.failures {
                s.push_str(&format!("      {f}\n"));
            }
        }
        if let Some(n) = &self.note {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}

/// Worked examples 1 (slit strip), 2 (logarithmic channel) and 3 (shifted channel).
pub fn run_example(id: u8, cfg: &AuditConfig) -> Result<ExampleReport> {
    let (title, checks, data, note) = match id {
        1 => example1(cfg)?,
        2 => example_channel(cfg, Anchored::LogChannel, true)?,
        3 => example_channel(cfg, Anchored::ShiftedLogChannel, false)?,
        _ => return Err(Error::param(format!("example id must be 1, 2 or 3, got {id}"))),
    };
    Ok(ExampleReport {
        metadata: Metadata::for_config(&format!("example:{id}"), cfg),
        id,
        title,
        pass: checks.iter().all(|c| c.pass),
        checks,
        data,
        note,
    })
}

type ExampleParts = (String, Vec<Check>, Value, Option<String>);

fn verdict_checks(b: &mut CheckBuilder, sg: &Semigroup, h: &Heuristic, want_regular: RegularityClass) -> Value {
    let start = Start::Koenigs(c(0.0, 0.0));
    let mut data = serde_json::Map::new();
    if let Some(r) = b.attempt("regularity", regularity_classify(sg, start, h)) {
        b.expect(r.class == want_regular, || format!("regularity {:?}", r.class));
        data.insert("regularity".into(), json!(r));
    }
    if let Some(e) = b.attempt("euclidean test", euclidean_sufficient_test(sg, start, h)) {
        data.insert("euclidean_test".into(), json!(e));
    }
    if let Some(r) = b.attempt("criterion", criterion_with_note(sg, start, h)) {
        data.insert("criterion".into(), json!(r));
    }
    Value::Object(data)
}

fn example1(cfg: &AuditConfig) -> Result<ExampleParts> {
    let omega = example1_domain(cfg.slit_pairs)?;
    let mut checks = Vec::new();

    let mut b = CheckBuilder::new("example1.boundary_distance", "δ_Ω(0) = 2 and the δ_Ω(-t) table");
    let d0 = omega.boundary_distance(c(0.0, 0.0))?;
    b.expect(d0 == 2.0, || format!("δ(0) = {d0}"));
    let mut table = Vec::new();
    for t in [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 16.0, 32.0, 64.0, 256.0, 1024.0] {
        let d = omega.boundary_distance(c(-t, 0.0))?;
        let floor_bound = if t >= 1.0 { 1.0 / t.floor() } else { f64::INFINITY };
        table.push(json!({
            "t": t,
            "delta": d,
            "one_over_floor_t": if floor_bound.is_finite() { json!(floor_bound) } else { Value::Null },
            "t_times_delta": t * d,
        }));
    }
    b.value("delta_at_0", d0);
    checks.push(b.finish());

    let mut b = CheckBuilder::new("example1.half_strips", "Σ_t ⊂ Ω and exact half-strip distances");
    let mut rng = cfg.rng(11);
    let mut rows = Vec::new();
    for t in [4.0f64, 8.0, 16.0] {
        let n = t.floor() as u32;
        let pts = sigma_points(&mut rng, n, 10_000)?;
        let violations = pts.iter().filter(|p| !omega.contains(**p)).count();
        b.expect(violations == 0, || format!("Σ_{n}: {violations} violations"));
        let s = sigma(n)?;
        let exact = s.exact_distance(c(0.0, 0.0), c(-t, 0.0)).unwrap_or(f64::NAN);
        let closed = sigma_distance_closed_form(n, t);
        b.expect(close(exact, closed, 1e-6 * closed.max(1.0)), || format!("t={t}: exact {exact} vs {closed}"));
        let enclosure = domain_distance(&omega, c(0.0, 0.0), c(-t, 0.0), Some(&s))?;
        rows.push(json!({
            "t": t,
            "samples": pts.len(),
            "violations": violations,
            "exact_half_strip_distance": exact,
            "closed_form": closed,
            "displayed_expression": sigma_displayed_expression(t),
            "omega_distance_enclosure": enclosure,
        }));
    }
    let k8 = sigma(8)?.exact_distance(c(0.0, 0.0), c(-8.0, 0.0)).unwrap_or(f64::NAN);
    b.expect(close(k8, sigma_distance_closed_form(8, 8.0), 1e-6), || format!("k_Σ8 = {k8}"));
    b.expect(close(k8, 16.0 * PI, 1e-6), || format!("k_Σ8 = {k8} vs 16π"));
    let expr8 = sigma_displayed_expression(8.0);
    b.expect(close(expr8, 1.9375, 1e-12), || format!("expression at 8: {expr8}"));
    b.value("k_sigma8", k8).value("displayed_expression_t8", expr8);
    checks.push(b.finish());

    let sg = cfg.anchored(Anchored::SlitStrip)?;
    let mut b = CheckBuilder::new("example1.verdicts", "orbit of 0 is non-regular; criterion report carries the note");
    let verdicts = verdict_checks(&mut b, &sg, &cfg.heuristic, RegularityClass::NonRegular);
    let has_note = verdicts.get("criterion").and_then(|c| c.get("note")).is_some();
    b.expect(has_note, || "criterion report lacks the note".into());
    checks.push(b.finish());

    let data = json!({
        "slit_pairs": cfg.slit_pairs,
        "delta_table": table,
        "half_strips": rows,
        "verdicts": verdicts,
    });
    Ok((
        "slit strip with slits at heights ±1/n".into(),
        checks,
        data,
        Some(SLIT_STRIP_NOTE.to_string()),
    ))
}

fn example_channel(cfg: &AuditConfig, which: Anchored, with_fitted: bool) -> Result<ExampleParts> {
    let sg = cfg.anchored(which)?;
    let h = &cfg.heuristic;
    let mut checks = Vec::new();

    let mut b = CheckBuilder::new(
        &format!("example{}.verdicts", if with_fitted { 2 } else { 3 }),
        "orbit of 0 is non-regular, passes the Euclidean test and certifies",
    );
    let verdicts = verdict_checks(&mut b, &sg, h, RegularityClass::NonRegular);
    let euclid = verdicts.get("euclidean_test").and_then(|e| e.get("pass")).and_then(Value::as_bool);
    b.expect(euclid == Some(true), || format!("euclidean test {euclid:?}"));
    let certified = verdicts
        .get("criterion")
        .and_then(|c| c.get("verdict"))
        .and_then(Value::as_str)
        .is_some_and(|v| v == "Certified");
    b.expect(certified, || "criterion not certified".into());
    checks.push(b.finish());

    let mut table = Vec::new();
    for t in [0.0, 2.0, 4f64.exp(), 100.0, 1e3, 1e4] {
        let d = sg.omega().boundary_distance(c(-t, 0.0))?;
        table.push(json!({ "t": t, "delta": d, "t_times_delta": t * d }));
    }
    let mut data = json!({ "delta_table": table, "verdicts": verdicts });

    if with_fitted {
        let fitted = cfg.builtin(Builtin::Example2Channel)?;
        let mut b = CheckBuilder::new("example2.fitted_map", "fitted Koenigs map reproduces the certified verdict");
        let z0 = b.attempt("preimage of 0", fitted.generator_at_image(c(0.0, 0.0), None).map(|p| p.0));
        if let Some(z0) = z0 {
            let mut r = b.attempt("criterion", backward_criterion(&fitted, Start::Disk(z0), h));
            if let Some(r) = r.as_mut() {
                r.truncation.channel = Some(cfg.channel_truncation);
                b.expect(r.verdict.is_certified(), || format!("fitted verdict {:?}", r.verdict));
                b.expect(r.sandwich_holds, || "fitted sandwich violated".into());
            }
            let reg = b.attempt("regularity", regularity_classify(&fitted, Start::Disk(z0), h));
            data["fitted"] = json!({
                "channel_truncation": cfg.channel_truncation,
                "start": z0,
                "criterion": r,
                "regularity": reg,
            });
        }
        checks.push(b.finish());
    }
    let title = match which {
        Anchored::LogChannel => "half-plane joined to a channel of half-width 1/log|x|",
        _ => "half-plane joined to a channel with lower edge shifted by one",
    };
    Ok((title.into(), checks, data, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn hashes_are_stable() {
        let cfg = AuditConfig::default();
        let a = Metadata::for_config("x", &cfg);
        let b = Metadata::for_config("x", &cfg);
        assert_eq!(a, b);
        assert_eq!(a.scenario_hash.len(), 64);
        let other = AuditConfig { seed: 1, ..cfg };
        assert_ne!(a.scenario_hash, Metadata::for_config("x", &other).scenario_hash);
    }

    #[test]
    fn displayed_expression_values() {
        assert!((sigma_displayed_expression(8.0) - 1.9375).abs() < 1e-12);
        assert!((sigma_distance_closed_form(8, 8.0) - 16.0 * PI).abs() < 1e-9);
    }
}
