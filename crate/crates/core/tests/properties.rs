//! Randomized invariants of the metrics, maps, domains, semigroups and audits.

use std::f64::consts::PI;
use std::sync::LazyLock;

use koenigs_core::analysis::{
    backward_criterion, backward_generator_limsup, lipschitz_quotient, orbit_point, regularity_classify, Direction,
    Heuristic, RegularityClass, DEFAULT_PAIR_BUDGET,
};
use koenigs_core::domains::example1_domain;
use koenigs_core::hypgeo::{disk_distance, distance_lower_bound, domain_density, domain_distance};
use koenigs_core::scenarios::{Builtin, DEFAULT_CHANNEL_TRUNCATION};
use koenigs_core::semigroup::{Semigroup, Start};
use koenigs_core::{Complex64, Domain, MapExpr, Primitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, -PI..PI).prop_map(move |(r, a)| Complex64::from_polar(radius * r.sqrt(), a))
}

static SEMIGROUPS: LazyLock<Vec<Semigroup>> =
    LazyLock::new(|| Builtin::ALL.into_iter().map(|b| b.semigroup(DEFAULT_CHANNEL_TRUNCATION).unwrap()).collect());

fn builtin(b: Builtin) -> &'static Semigroup {
    &SEMIGROUPS[Builtin::ALL.iter().position(|x| *x == b).unwrap()]
}

static MONOTONE_DOMAINS: LazyLock<Vec<Domain>> = LazyLock::new(|| {
    vec![
        example1_domain(40).unwrap(),
        Domain::strip(1.0, 0.0).unwrap(),
        Domain::right_half_plane(),
        Domain::half_strip(-3.0, 0.5).unwrap(),
        builtin(Builtin::Example2Channel).omega().clone(),
        koenigs_core::domains::example2_domain(),
        koenigs_core::domains::example3_domain(),
    ]
});

#[test]
fn monotone_domains_are_convex_in_positive_direction() {
    for dom in MONOTONE_DOMAINS.iter() {
        assert!(dom.is_convex_positive_direction(50), "{:?}", dom.kind());
    }
}

/// Domains with closed-form Riemann maps.
static EXACT_DOMAINS: LazyLock<Vec<Domain>> = LazyLock::new(|| {
    vec![
        Domain::right_half_plane(),
        Domain::upper_half_plane(),
        Domain::half_plane(0.7, -1.0).unwrap(),
        Domain::strip(1.0, 0.0).unwrap(),
        Domain::strip(0.3, 2.0).unwrap(),
        Domain::half_strip(-3.0, 0.5).unwrap(),
        Domain::sigma_half_strip(4).unwrap(),
        Domain::spiral_sector(c(1.0, 1.0), 1.0).unwrap(),
        Domain::disk(c(0.5, -1.0), 2.0).unwrap(),
        builtin(Builtin::Example2Channel).omega().clone(),
    ]
});

/// Maps with derivatives, inverses and an interior sampling radius.
static MAPS: LazyLock<Vec<(MapExpr, f64)>> = LazyLock::new(|| {
    let mut out: Vec<(MapExpr, f64)> = Builtin::ALL
        .into_iter()
        .filter_map(|b| builtin(b).koenigs().cloned())
        .map(|m| (m, 0.95))
        .collect();
    out.push((koenigs_core::audit::bounded_target_map().unwrap(), 0.9));
    let spiral = MapExpr::new(
        vec![
            Primitive::cayley(),
            Primitive::SpiralLog { mu: c(1.0, 0.5), center: 0.0 },
        ],
        Domain::unit_disk(),
        Domain::plane(),
    )
    .unwrap();
    out.push((spiral, 0.9));
    out
});

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_between_boundary_bounds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for dom in EXACT_DOMAINS.iter() {
            for w in dom.sample_points(&mut rng, 6) {
                let d = dom.boundary_distance(w).unwrap();
                if d < 1e-9 {
                    continue;
                }
                let exact = dom.exact_density(w).unwrap();
                let slack = 1e-9 * exact;
                prop_assert!(exact >= 1.0 / (4.0 * d) - slack && exact <= 1.0 / d + slack,
                    "{:?} at {w}: {exact} vs δ = {d}", dom.kind());
                let iv = domain_density(&dom, w).unwrap();
                prop_assert!(iv.contains(exact));
            }
        }
    }

    #[test]
    fn disk_triangle_inequality(a in disk_point(0.99), b in disk_point(0.99), m in disk_point(0.99)) {
        let ab = disk_distance(a, b).unwrap();
        let am = disk_distance(a, m).unwrap();
        let mb = disk_distance(m, b).unwrap();
        prop_assert!(ab <= am + mb + 1e-12);
    }

    #[test]
    fn disk_distance_mobius_invariant(a in disk_point(0.95), b in disk_point(0.95), p in disk_point(0.9), rot in -PI..PI) {
        let e = Complex64::from_polar(1.0, rot);
        let sigma = |z: Complex64| e * (z - p) / (1.0 - p.conj() * z);
        let before = disk_distance(a, b).unwrap();
        let after = disk_distance(sigma(a), sigma(b)).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0), "{before} vs {after}");
    }

    #[test]
    fn distance_bounds_enclose_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for dom in EXACT_DOMAINS.iter() {
            let pts = dom.sample_points(&mut rng, 8);
            for pair in pts.chunks(2).filter(|p| p.len() == 2) {
                let (z, w) = (pair[0], pair[1]);
                let (dz, dw) = (dom.boundary_distance(z).unwrap(), dom.boundary_distance(w).unwrap());
                if dz.min(dw) < 1e-9 {
                    continue;
                }
                let exact = dom.exact_distance(z, w).unwrap();
                let lo = distance_lower_bound(dz, dw, (z - w).norm(), dom.convex());
                prop_assert!(lo <= exact * (1.0 + 1e-9) + 1e-12, "{:?}: {lo} > {exact}", dom.kind());
                for e in dom.enclosures() {
                    if e.contains(z) && e.contains(w) {
                        if let Some(hi) = e.exact_distance(z, w) {
                            prop_assert!(exact <= hi * (1.0 + 1e-9) + 1e-12, "{:?}: {exact} > {hi}", dom.kind());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn slit_strip_enclosures_are_ordered(seed in any::<u64>(), n in 1u32..=40) {
        let dom = example1_domain(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = dom.sample_points(&mut rng, 6);
        for pair in pts.chunks(2).filter(|p| p.len() == 2) {
            let iv = domain_distance(&dom, pair[0], pair[1], None).unwrap();
            prop_assert!(iv.lo <= iv.hi && iv.lo >= 0.0, "{iv:?}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient(z in disk_point(1.0)) {
        for (m, r) in MAPS.iter() {
            let r = *r;
            let z = z * r;
            let d = m.derivative(z).unwrap();
            let h = 1e-6 * (1.0 - z.norm()).max(1e-3);
            let fd = (m.evaluate(z + h).unwrap() - m.evaluate(z - h).unwrap()) / (2.0 * h);
            prop_assert!((d - fd).norm() <= 1e-6 * d.norm().max(1e-300) + 1e-9, "{m:?} at {z}: {d} vs {fd}");
        }
    }

    #[test]
    fn invert_undoes_evaluate(z in disk_point(1.0)) {
        for (m, r) in MAPS.iter() {
            let r = *r;
            let z = z * r;
            let w = m.evaluate(z).unwrap();
            let back = m.invert(w, None).unwrap();
            prop_assert!((back - z).norm() <= 1e-10, "{m:?}: {z} → {w} → {back}");
        }
    }

    #[test]
    fn maps_are_injective_on_samples(a in disk_point(0.9), b in disk_point(0.9)) {
        prop_assume!((a - b).norm() > 1e-6);
        for (m, _) in MAPS.iter() {
            let (fa, fb) = (m.evaluate(a).unwrap(), m.evaluate(b).unwrap());
            prop_assert!((fa - fb).norm() > 1e-12, "{m:?} identifies {a} and {b}");
        }
    }

    #[test]
    fn half_strips_lie_in_slit_strip(n in 1u32..=16, x in 0.0..1.0f64, y in -1.0..1.0f64, pairs in 16u32..=40) {
        let sigma = Domain::sigma_half_strip(n).unwrap();
        let omega = example1_domain(pairs).unwrap();
        let left = -(2f64.powi(n as i32));
        let p = c(left + x * (left.abs() + 8.0), y / n as f64);
        prop_assume!(sigma.contains(p));
        prop_assert!(omega.contains(p), "Σ_{n} point {p} outside Ω_{pairs}");
    }

    #[test]
    fn boundary_distance_grows_in_positive_direction(seed in any::<u64>(), t in 0.0..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for dom in MONOTONE_DOMAINS.iter() {
            for w in dom.sample_points(&mut rng, 4) {
                let d0 = dom.boundary_distance(w).unwrap();
                let d1 = dom.boundary_distance(w + t).unwrap();
                prop_assert!(d1 >= d0 * (1.0 - 1e-9) - 1e-12, "{:?}: δ({w}) = {d0}, δ(+{t}) = {d1}", dom.kind());
            }
        }
    }

    #[test]
    fn boundary_distance_discs_are_inside(seed in any::<u64>(), a in -PI..PI, s in 0.0..0.99f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for dom in EXACT_DOMAINS.iter().chain(MONOTONE_DOMAINS.iter()) {
            for w in dom.sample_points(&mut rng, 4) {
                let d = dom.boundary_distance(w).unwrap();
                let p = w + Complex64::from_polar(s * d, a);
                prop_assert!(dom.contains(p), "{:?}: {p} within δ = {d} of {w} is outside", dom.kind());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_law(z in disk_point(0.9), s in 0.0..3.0f64, t in 0.0..3.0f64) {
        for b in Builtin::ALL {
            let sg = builtin(b);
            let id = sg.phi(0.0, z).unwrap();
            prop_assert!((id - z).norm() <= 1e-12);
            let lhs = sg.phi(s, sg.phi(t, z).unwrap()).unwrap();
            let rhs = sg.phi(s + t, z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9, "{}: {lhs} vs {rhs}", b.name());
            let h = sg.koenigs().unwrap();
            let w = h.evaluate(rhs).unwrap();
            let want = sg.forward_image(h.evaluate(z).unwrap(), s + t);
            prop_assert!((w - want).norm() <= 1e-8 * want.norm().max(1.0), "{}: {w} vs {want}", b.name());
        }
    }

    #[test]
    fn boundary_distance_along_forward_orbits(z in disk_point(0.9)) {
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
        for b in Builtin::ALL.into_iter().filter(|b| !b.is_elliptic()) {
            let orbit = builtin(b).forward_orbit(z, &grid).unwrap();
            for p in orbit.windows(2) {
                prop_assert!(p[1].delta_omega >= p[0].delta_omega * (1.0 - 1e-9) - 1e-12, "{}: {p:?}", b.name());
            }
        }
    }

    #[test]
    fn regular_orbits_have_bounded_generator(z in disk_point(0.9)) {
        let h = Heuristic::default();
        for b in [Builtin::Strip, Builtin::UpperHalfPlane, Builtin::HalfPlane] {
            let sg = builtin(b);
            let reg = regularity_classify(&sg, Start::Disk(z), &h).unwrap();
            if reg.class == RegularityClass::Regular {
                prop_assert!(backward_generator_limsup(&sg, Start::Disk(z), &h).unwrap().bounded);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sandwich_and_limsup_agree(z in disk_point(0.9)) {
        let h = Heuristic::default();
        for b in Builtin::ALL {
            let sg = builtin(b);
            if sg.is_elliptic() && z.norm() < 1e-12 {
                continue;
            }
            let r = backward_criterion(&sg, Start::Disk(z), &h).unwrap();
            prop_assert!(r.sandwich_holds, "{} from {z}", b.name());
            let l = backward_generator_limsup(&sg, Start::Disk(z), &h).unwrap();
            prop_assert_eq!(r.verdict.is_certified(), l.bounded, "{} from {}", b.name(), z);
        }
    }

    #[test]
    fn full_orbit_quotient_is_max_of_halves(z in disk_point(0.8)) {
        let sg = builtin(Builtin::Strip);
        let w0 = sg.koenigs_image(Start::Disk(z)).unwrap();
        let span = 8.0;
        let fwd = lipschitz_quotient(|t| orbit_point(&sg, w0, Direction::Forward, t), 0.0, span, DEFAULT_PAIR_BUDGET).unwrap();
        let bwd = lipschitz_quotient(|t| orbit_point(&sg, w0, Direction::Backward, t), 0.0, span, DEFAULT_PAIR_BUDGET).unwrap();
        let full = lipschitz_quotient(
            |t| if t < 0.0 { orbit_point(&sg, w0, Direction::Backward, -t) } else { orbit_point(&sg, w0, Direction::Forward, t) },
            -span,
            span,
            DEFAULT_PAIR_BUDGET,
        )
        .unwrap();
        let m = fwd.max(bwd);
        prop_assert!((full - m).abs() <= 0.05 * m, "full {full} vs max({fwd}, {bwd})");
    }
}
