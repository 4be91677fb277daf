//! Frozen reference values, each recomputed here from an independent closed
//! form or geometric argument.

use std::f64::consts::{FRAC_PI_4, LN_2, PI, SQRT_2};

use approx::assert_relative_eq;
use koenigs_core::analysis::{
    backward_criterion, backward_generator_limsup, euclidean_sufficient_test, forward_certificate, forward_constant,
    lipschitz_quotient, orbit_length, regularity_classify, shift_classify, Direction, Heuristic, RegularityClass,
    ShiftClass, SpiralSpec, DEFAULT_PAIR_BUDGET,
};
use koenigs_core::domains::{example1_domain, example2_domain, example3_domain};
use koenigs_core::hypgeo::{disk_distance, domain_density, domain_distance};
use koenigs_core::scenarios::{Anchored, Builtin, DEFAULT_CHANNEL_TRUNCATION};
use koenigs_core::semigroup::{Semigroup, SemigroupKind, Start};
use koenigs_core::{Complex64, Domain, MapExpr, Primitive};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn builtin(b: Builtin) -> Semigroup {
    b.semigroup(DEFAULT_CHANNEL_TRUNCATION).unwrap()
}

fn strip_map() -> MapExpr {
    builtin(Builtin::Strip).koenigs().unwrap().clone()
}

fn ln_sinh(x: f64) -> f64 {
    x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
}

#[test]
fn disk_distance_is_automorphism_invariant() {
    let (z, w) = (c(0.3, 0.0), c(0.0, 0.3));
    let sigma = |p: Complex64| (p - 0.2) / (1.0 - 0.2 * p);
    let d = disk_distance(z, w).unwrap();
    assert!((d - disk_distance(sigma(z), sigma(w)).unwrap()).abs() <= 1e-12);
    // Curvature -4: artanh of the pseudo-hyperbolic distance.
    let rho = ((z - w) / (1.0 - w.conj() * z)).norm();
    assert_relative_eq!(d, rho.atanh(), max_relative = 1e-14);
}

#[test]
fn densities() {
    let hp = domain_density(&Domain::right_half_plane(), c(2.0, 0.0)).unwrap();
    assert_eq!((hp.lo, hp.hi), (0.25, 0.25));
    let st = domain_density(&Domain::strip(1.0, 0.0).unwrap(), c(0.0, 0.0)).unwrap();
    assert!((st.lo - FRAC_PI_4).abs() < 1e-15 && st.is_point());
    let ex1 = domain_density(&example1_domain(10).unwrap(), c(0.0, 0.0)).unwrap();
    assert!(ex1.lo <= 0.125 + 1e-12 && ex1.hi >= 0.5 - 1e-12, "{ex1:?}");
}

#[test]
fn distances() {
    let hp = domain_distance(&Domain::right_half_plane(), c(1.0, 0.0), c(3.0, 0.0), None).unwrap();
    assert!((hp.lo - 0.5 * 3f64.ln()).abs() < 1e-12 && hp.is_point());
    let strip = Domain::strip(1.0, 0.0).unwrap();
    for t in [0.0, 3.0, 250.0] {
        let d = domain_distance(&strip, c(-t, 0.0), c(-t - 1.0, 0.0), None).unwrap();
        assert!((d.lo - FRAC_PI_4).abs() < 1e-9 && (d.hi - FRAC_PI_4).abs() < 1e-9, "{d:?}");
    }
    let sigma8 = Domain::sigma_half_strip(8).unwrap();
    let ex1 = example1_domain(40).unwrap();
    let d = domain_distance(&ex1, c(0.0, 0.0), c(-8.0, 0.0), Some(&sigma8)).unwrap();
    let a = PI * 8.0 * 256.0 / 2.0;
    let b = PI * 8.0 * 248.0 / 2.0;
    let want = 0.5 * (ln_sinh(a) - ln_sinh(b));
    assert!((d.hi - want).abs() < 1e-6 * want, "{d:?} vs {want}");
    assert!((want - 16.0 * PI).abs() < 1e-9);
    assert!(d.lo <= d.hi);
}

#[test]
fn map_values() {
    let h = strip_map();
    assert!((h.derivative(c(0.0, 0.0)).unwrap() - 4.0 / PI).norm() < 1e-14);
    assert!((h.invert(c(1.0, 0.0), None).unwrap() - (PI / 4.0).tanh()).norm() < 1e-12);
    let cayley = MapExpr::new(vec![Primitive::cayley()], Domain::unit_disk(), Domain::right_half_plane()).unwrap();
    assert!((cayley.invert(c(2.0, 0.0), None).unwrap() - 1.0 / 3.0).norm() < 1e-14);
}

#[test]
fn slit_strip_geometry() {
    let ex10 = example1_domain(10).unwrap();
    assert!(ex10.contains(c(-6.0, 0.0)));
    assert!(!ex10.contains(c(-6.0, 0.5)));
    assert!(!ex10.contains(c(-2000.0, 0.1)));
    assert!(ex10.contains(c(-1000.0, 0.1)));
    assert_eq!(ex10.boundary_distance(c(0.0, 0.0)).unwrap(), 2.0);
    assert!((ex10.boundary_distance(c(-6.0, 0.0)).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(ex10.convex_in_positive_direction(), Some(true));
    let ex1 = example1_domain(1).unwrap();
    assert!(!ex1.contains(c(-3.0, 1.0)) && ex1.contains(c(-1.0, 1.0)) && ex1.contains(c(-3.0, 1.5)));
}

#[test]
fn channel_geometry() {
    let e2 = 1f64.exp().powi(2);
    assert!(example2_domain().contains(c(-e2, 0.4)));
    assert!(!example2_domain().contains(c(-e2, 0.6)));
    let e4 = 4f64.exp();
    assert!(example3_domain().contains(c(-e4, -0.9)));
    assert!(!example3_domain().contains(c(-e4, -1.3)));
    let d = example2_domain().boundary_distance(c(-e4, 0.0)).unwrap();
    assert!((d - 0.25).abs() < 2e-3, "{d}");
}

#[test]
fn spirallike_flags() {
    assert!(Domain::unit_disk().is_spirallike(c(1.0, 1.0), 2000).unwrap());
    // Real dilation keeps |Im| < 1; a rotating spiral leaves the strip.
    let strip = Domain::strip(1.0, 0.0).unwrap();
    let w = c(10.0, 0.5);
    assert!((0..200).all(|k| strip.contains((-(k as f64) * 0.05).exp() * w)));
    assert!(strip.is_spirallike(c(1.0, 0.0), 2000).unwrap());
    let mu = c(1.0, 1.0);
    assert!(!strip.contains((-mu * 0.5).exp() * w));
    assert!(!strip.is_spirallike(mu, 2000).unwrap());
}

#[test]
fn semigroup_closed_forms() {
    let hp = builtin(Builtin::HalfPlane);
    let strip = builtin(Builtin::Strip);
    assert!((hp.phi(1.0, c(0.0, 0.0)).unwrap() - 1.0 / 3.0).norm() < 1e-12);
    assert!((strip.phi(1.0, c(0.0, 0.0)).unwrap() - (PI / 4.0).tanh()).norm() < 1e-12);
    assert!((hp.generator(c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-14);
    assert!((strip.generator(c(0.0, 0.0)).unwrap() - FRAC_PI_4).norm() < 1e-14);

    let fwd = hp.forward_orbit(c(0.0, 0.0), &[0.0, 1.0, 2.0]).unwrap();
    for (s, want) in fwd.iter().zip([0.0, 1.0 / 3.0, 0.5]) {
        assert!((s.z - want).norm() < 1e-12);
    }
    let back = hp.backward_orbit(c(0.0, 0.0), &[0.0, 0.5]).unwrap();
    assert!((back[1].z + 1.0 / 3.0).norm() < 1e-12);
    let full = hp.full_orbit(c(0.0, 0.0), &[-0.5, 0.0, 1.0]).unwrap();
    for (s, want) in full.iter().zip([-1.0 / 3.0, 0.0, 1.0 / 3.0]) {
        assert!((s.z - want).norm() < 1e-12, "{s:?}");
    }
    let dil = builtin(Builtin::EllipticDilation);
    let full = dil.full_orbit(c(0.5, 0.0), &[-0.5, 0.5]).unwrap();
    assert!((full[0].z - 0.5 * 0.5f64.exp()).norm() < 1e-12);
    assert!((full[1].z - 0.5 * (-0.5f64).exp()).norm() < 1e-12);
    assert!((full[0].z.re - 0.824361).abs() < 1e-6 && (full[1].z.re - 0.303265).abs() < 1e-6);
}

#[test]
fn horizons() {
    let hp = builtin(Builtin::HalfPlane);
    let h = hp.backward_horizon(Start::Disk(c(0.0, 0.0))).unwrap();
    assert!((h.value - 1.0).abs() < 1e-10);
    let dil = builtin(Builtin::EllipticDilation);
    let h = dil.backward_horizon(Start::Disk(c(0.5, 0.0))).unwrap();
    assert!((h.value - LN_2).abs() < 1e-10);
    let ex1 = Anchored::SlitStrip.semigroup(40).unwrap();
    assert!(ex1.backward_horizon(Start::Koenigs(c(0.0, 0.0))).unwrap().value.is_infinite());
}

#[test]
fn conjugated_values() {
    let hp = builtin(Builtin::HalfPlane);
    let f = MapExpr::new(
        vec![Primitive::mobius(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap()],
        Domain::unit_disk(),
        Domain::plane(),
    )
    .unwrap();
    let conj = hp.conjugate_version(f).unwrap();
    // f(φ_1(0)) = f(1/3).
    assert!((conj.phi(1.0, c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-10);
    let g = koenigs_core::audit::bounded_target_map().unwrap();
    let conj = hp.conjugate_version(g).unwrap();
    // f'(0)·G(0) with f(z) = z - z²/2.
    assert!((conj.generator(c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-10);
}

#[test]
fn denjoy_wolff_points() {
    for b in [Builtin::HalfPlane, Builtin::Strip] {
        let dw = builtin(b).denjoy_wolff_estimate().unwrap();
        assert!((dw.point - 1.0).norm() < 1e-6, "{}: {dw:?}", b.name());
    }
}

#[test]
fn lengths_and_quotients() {
    let hp = builtin(Builtin::HalfPlane);
    let z0 = Start::Disk(c(0.0, 0.0));
    let all = orbit_length(&hp, z0, Direction::Forward, None).unwrap();
    assert!((all.value - 1.0).abs() < 1e-6, "{all:?}");
    let ten = orbit_length(&hp, z0, Direction::Forward, Some(10.0)).unwrap();
    assert!((ten.value - 10.0 / 12.0).abs() < 1e-9, "{ten:?}");
    let spiral = builtin(Builtin::EllipticSpiral);
    let l = orbit_length(&spiral, Start::Disk(c(0.5, 0.0)), Direction::Forward, None).unwrap();
    assert!((l.value - SQRT_2 * 0.5).abs() < 1e-6, "{l:?}");

    let q = lipschitz_quotient(|t| Ok(c(t / (2.0 + t), 0.0)), 0.0, 100.0, DEFAULT_PAIR_BUDGET).unwrap();
    assert!((q - 0.5).abs() < 1e-6, "{q}");
    let q = lipschitz_quotient(|t| Ok(c(0.5 * (-t).exp(), 0.0)), 0.0, 10.0, DEFAULT_PAIR_BUDGET).unwrap();
    assert!((q - 0.5).abs() < 1e-6, "{q}");
}

#[test]
fn forward_constants() {
    let hp = forward_certificate(&builtin(Builtin::HalfPlane), c(0.0, 0.0)).unwrap();
    assert!((hp.constant - 1.0).abs() < 1e-12 && (hp.measured - 0.5).abs() < 1e-6 && hp.pass);
    let st = forward_certificate(&builtin(Builtin::Strip), c(0.0, 0.0)).unwrap();
    assert!((st.constant - 1.0).abs() < 1e-12 && (st.measured - FRAC_PI_4).abs() < 1e-6 && st.pass);
    let ex1 = Anchored::SlitStrip.semigroup(40).unwrap();
    assert_eq!(forward_constant(&ex1, Start::Koenigs(c(0.0, 0.0))).unwrap(), 0.5);
}

#[test]
fn generator_limsups() {
    let h = Heuristic::default();
    let hp = backward_generator_limsup(&builtin(Builtin::HalfPlane), Start::Disk(c(0.0, 0.0)), &h).unwrap();
    assert!(hp.bounded && (hp.sup_tail - 2.0).abs() < 1e-6);
    let dil = backward_generator_limsup(&builtin(Builtin::EllipticDilation), Start::Disk(c(0.5, 0.0)), &h).unwrap();
    assert!(dil.bounded && (dil.sup_tail - 1.0).abs() < 1e-6);
    let st = backward_generator_limsup(&builtin(Builtin::Strip), Start::Disk(c(0.0, 0.0)), &h).unwrap();
    assert!(st.bounded && st.sup_tail < 1e-3, "{st:?}");
}

#[test]
fn criterion_values() {
    let h = Heuristic::default();
    let hp = backward_criterion(&builtin(Builtin::HalfPlane), Start::Disk(c(0.0, 0.0)), &h).unwrap();
    assert!(hp.samples.iter().all(|s| (s.ratio.lo - 0.5).abs() < 1e-9 && (s.ratio.hi - 0.5).abs() < 1e-9));
    let dil = backward_criterion(&builtin(Builtin::EllipticDilation), Start::Disk(c(0.5, 0.0)), &h).unwrap();
    assert_eq!(dil.samples[0].t, 0.0);
    assert!((dil.samples[0].ratio.lo - 4.0 / 3.0).abs() < 1e-9);
    let ex2 = Anchored::LogChannel.semigroup(40).unwrap();
    assert!(backward_criterion(&ex2, Start::Koenigs(c(0.0, 0.0)), &h).unwrap().verdict.is_certified());
}

#[test]
fn classifications() {
    let h = Heuristic::default();
    let hp = regularity_classify(&builtin(Builtin::HalfPlane), Start::Disk(c(0.0, 0.0)), &h).unwrap();
    assert_eq!(hp.class, RegularityClass::FiniteHorizon);
    let st = regularity_classify(&builtin(Builtin::Strip), Start::Disk(c(0.0, 0.0)), &h).unwrap();
    assert_eq!(st.class, RegularityClass::Regular);
    let ex2 = Anchored::LogChannel.semigroup(40).unwrap();
    let o = Start::Koenigs(c(0.0, 0.0));
    assert_eq!(regularity_classify(&ex2, o, &h).unwrap().class, RegularityClass::NonRegular);
    assert!(euclidean_sufficient_test(&ex2, o, &h).unwrap().pass);
    let exp = Anchored::ExpChannel.semigroup(40).unwrap();
    assert!(!euclidean_sufficient_test(&exp, o, &h).unwrap().pass);

    let uhp = shift_classify(&builtin(Builtin::UpperHalfPlane), c(0.0, 0.0), &h).unwrap();
    assert_eq!(uhp.class, ShiftClass::Finite);
    assert!((uhp.quotient.unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn spiral_bounds() {
    assert!((SpiralSpec::new(c(1.0, 0.0), -1.0, 1.0).unwrap().bound() - 2.0 * SQRT_2).abs() < 1e-12);
    assert!((SpiralSpec::new(c(0.5, 0.0), 2.0, -3.0).unwrap().bound() - 13f64.sqrt()).abs() < 1e-12);
}

#[test]
fn semigroup_kinds_are_checked() {
    let h = MapExpr::identity(Domain::unit_disk());
    assert!(Semigroup::new(SemigroupKind::Elliptic { mu: c(-1.0, 0.0) }, h, Domain::unit_disk()).is_err());
}
