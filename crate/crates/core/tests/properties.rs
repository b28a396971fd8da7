//! Property tests for the numerical invariants, each checked against an
//! oracle that does not share the implementation path.

use proptest::prelude::*;

use ratdiff::analysis::{classify_orbit, detect_cycle, AnalysisSettings};
use ratdiff::map::{iterate, step, tangent, IterationSettings, OrbitSeed, Parameters};
use ratdiff::periodicity::{
    admissible_epsilon, ball_certificate, check_identities, period_two_pairs, trichotomy,
    PeriodTwo, Trichotomy, DEFAULT_BOUNDARY_TOL,
};
use ratdiff::scan::{
    classification_grid, classification_grid_serial, extrema_over, scan_margin, ComplexRect,
    GridSpec,
};
use ratdiff::stability::{
    characteristic_roots, classify, equilibria, equilibrium_on_branch, linearization, Branch,
    CharCoeffs, RootBranch, Spectral,
};
use ratdiff::C64;

fn c64(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn params(range: f64) -> impl Strategy<Value = Parameters> {
    (c64(range), c64(range)).prop_map(|(alpha, beta)| Parameters { alpha, beta })
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tangent_matches_central_differences(p in params(3.0), zp in c64(3.0), zc in c64(3.0)) {
        prop_assume!((zc + 1.0).norm() > 1e-1);
        let h = 1e-6;
        let t = tangent(&p, zp, zc).unwrap();
        let d_curr = (step(&p, zp, zc + h).unwrap() - step(&p, zp, zc - h).unwrap()) / (2.0 * h);
        let d_prev = (step(&p, zp + h, zc).unwrap() - step(&p, zp - h, zc).unwrap()) / (2.0 * h);
        // entries that are tiny relative to the map's scale carry only
        // cancellation noise in the difference quotient
        let scale = 1.0 + step(&p, zp, zc).unwrap().norm();
        let ok = |exact: C64, fd: C64| rel_err(exact, fd) <= 1e-5 || (exact - fd).norm() <= 1e-7 * scale;
        prop_assert!(ok(t.a11, d_curr), "a11 {} vs {}", t.a11, d_curr);
        prop_assert!(ok(t.a12, d_prev), "a12 {} vs {}", t.a12, d_prev);
        prop_assert_eq!(t.a21, C64::new(1.0, 0.0));
        prop_assert_eq!(t.a22, C64::new(0.0, 0.0));
    }

    #[test]
    fn step_never_returns_non_finite(p in params(100.0), zp in c64(100.0), zc in c64(100.0)) {
        if let Ok(z) = step(&p, zp, zc) {
            prop_assert!(z.re.is_finite() && z.im.is_finite());
        }
    }

    #[test]
    fn equilibria_are_fixed_points(p in params(5.0)) {
        for e in equilibria(&p) {
            let z = e.z_bar;
            // equilibrium equation residual
            let lhs = z * (z + 1.0);
            let rhs = p.alpha + p.alpha * z + p.beta * z;
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
            if (z + 1.0).norm() > 1e-6 {
                let f = step(&p, z, z).unwrap();
                prop_assert!((f - z).norm() <= 1e-9 * (1.0 + z.norm()), "{} -> {}", z, f);
            }
        }
    }

    #[test]
    fn roots_satisfy_vieta(a in c64(10.0), c in c64(10.0)) {
        let (l1, l2) = characteristic_roots(&CharCoeffs::new(a, c));
        prop_assert!((l1 * l2 - c).norm() <= 1e-10 * c.norm().max(1e-12) + 1e-14, "product");
        prop_assert!((l1 + l2 + a).norm() <= 1e-10 * a.norm().max(l1.norm()).max(1e-12) + 1e-14, "sum");
        prop_assert!(l1.norm() >= l2.norm() * (1.0 - 1e-12));
    }

    #[test]
    fn clark_implies_spectral_stability(p in params(2.0)) {
        for e in equilibria(&p) {
            if let Ok(v) = classify(&p, &e) {
                if v.clark_holds {
                    prop_assert!(v.roots.0.norm() < 1.0 && v.roots.1.norm() < 1.0);
                    prop_assert_eq!(v.spectral, Spectral::Stable);
                }
            }
        }
    }

    #[test]
    fn branch_swap_under_negated_root(p in params(3.0)) {
        // the two branches differ only by the sign of the square root
        let minus = equilibrium_on_branch(&p, RootBranch::Minus);
        let plus = equilibrium_on_branch(&p, RootBranch::Plus);
        let base = p.alpha + p.beta - 1.0;
        prop_assert!(((minus + plus) - base).norm() <= 1e-12 * (1.0 + base.norm()));
        let root = plus - minus;
        let d = (p.alpha + 1.0) * (p.alpha + 1.0) + 2.0 * (p.alpha - 1.0) * p.beta + p.beta * p.beta;
        prop_assert!((root * root - d).norm() <= 1e-10 * (1.0 + d.norm()));
        let flipped_minus = 0.5 * (base + root);
        let flipped_plus = 0.5 * (base - root);
        prop_assert!((flipped_minus - plus).norm() <= 1e-12 * (1.0 + plus.norm()));
        prop_assert!((flipped_plus - minus).norm() <= 1e-12 * (1.0 + minus.norm()));
    }

    #[test]
    fn trichotomy_depends_only_on_moduli(p in params(3.0), t1 in 0.0..6.3f64, t2 in 0.0..6.3f64) {
        // rotate β freely and move α + 1 around its circle
        let rot = |t: f64| C64::from_polar(1.0, t);
        let q = Parameters { alpha: (p.alpha + 1.0) * rot(t1) - 1.0, beta: p.beta * rot(t2) };
        let a = trichotomy(&p, 0.0);
        let b = trichotomy(&q, 0.0);
        prop_assert!((a.lhs - b.lhs).abs() < 1e-12 && (a.rhs - b.rhs).abs() < 1e-12);
        if (a.lhs - a.rhs).abs() > 1e-9 {
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn period_two_family_closes(alpha in c64(2.0), s in c64(20.0)) {
        let p = Parameters::on_period_two_line(alpha);
        let PeriodTwo::Family(fam) = period_two_pairs(&p) else { panic!("on the line") };
        let pair = fam.pair_for_sum(s);
        let scale = 1.0 + pair.phi.norm() * pair.psi.norm() + alpha.norm() * (1.0 + s.norm());
        prop_assert!(pair.residual(alpha) <= 1e-10 * scale);
        prop_assume!((pair.psi + 1.0).norm() > 1e-3 && (pair.phi + 1.0).norm() > 1e-3);
        let z1 = step(&p, pair.phi, pair.psi).unwrap();
        let z2 = step(&p, pair.psi, z1).unwrap();
        prop_assert!((z1 - pair.phi).norm() <= 1e-8 * (1.0 + pair.phi.norm()), "{} vs {}", z1, pair.phi);
        prop_assert!((z2 - pair.psi).norm() <= 1e-8 * (1.0 + pair.psi.norm()));
    }

    #[test]
    fn no_period_two_family_off_line(p in params(3.0)) {
        prop_assume!((p.beta - p.alpha - 1.0).norm() > 1e-6);
        prop_assert_eq!(period_two_pairs(&p), PeriodTwo::NoneExists);
    }
}

/// Linearization coefficients typed in from the closed forms for the two
/// branches, independent of the generic `β z̄/(1+z̄)²`, `−β/(1+z̄)` route.
fn closed_form(alpha: C64, beta: C64, plus: bool) -> (C64, C64) {
    let root = ((1.0 + alpha) * (1.0 + alpha) + 2.0 * (alpha - 1.0) * beta + beta * beta).sqrt();
    let sr = if plus { root } else { -root };
    let num = 2.0 * beta * (-1.0 + alpha + beta + sr);
    let den = (1.0 + alpha + beta + sr) * (1.0 + alpha + beta + sr);
    let a = num / den;
    let c = if plus {
        -2.0 * beta / (1.0 + alpha + beta + sr)
    } else {
        -0.5 * (1.0 + alpha + beta - sr)
    };
    (a, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generic_linearization_matches_closed_forms(p in params(2.0)) {
        prop_assume!(p.alpha.norm() > 1e-3 && p.beta.norm() > 1e-3);
        for (branch, plus) in [(RootBranch::Minus, false), (RootBranch::Plus, true)] {
            let z = equilibrium_on_branch(&p, branch);
            prop_assume!((z + 1.0).norm() > 1e-3);
            let k = linearization(&p, z).unwrap();
            let (a, c) = closed_form(p.alpha, p.beta, plus);
            prop_assert!(rel_err(k.a, a) <= 1e-8 || (k.a - a).norm() < 1e-12, "A {} vs {}", k.a, a);
            prop_assert!(rel_err(k.c, c) <= 1e-8, "C {} vs {}", k.c, c);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn identities_hold_on_the_period_two_line(alpha in c64(1.0), s1 in c64(1.0), s2 in c64(1.0)) {
        let p = Parameters::on_period_two_line(alpha);
        let orbit = iterate(&p, OrbitSeed::new(s1, s2).unwrap(), &IterationSettings::with_steps(100));
        prop_assume!(orbit.is_completed());
        let r = check_identities(&p, &orbit).unwrap();
        prop_assert!(r.max_residual() <= 1e-6, "{:?}", r);
    }
}

/// Bisection on the certificate margin, used to check the closed-form
/// endpoints of the admissible radius interval.
fn margin_root(p: &Parameters, mut lo: f64, mut hi: f64) -> f64 {
    let m = |e: f64| ball_certificate(p, e).unwrap().margin;
    let sign_lo = m(lo) >= 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (m(mid) >= 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn epsilon_interval_endpoints_match_bisection() {
    let p = Parameters::from_parts(0.01, 0.0, 0.05, 0.0);
    let iv = admissible_epsilon(&p).unwrap();
    let mid = 0.5 * (iv.lo + iv.hi);
    let lo = margin_root(&p, mid, 1e-9);
    let hi = margin_root(&p, mid, 1.0 - 1e-12);
    assert!((lo - iv.lo).abs() < 1e-9, "{lo} vs {}", iv.lo);
    assert!((hi - iv.hi).abs() < 1e-9, "{hi} vs {}", iv.hi);
    assert!((iv.lo - 0.01075).abs() < 5e-5 && (iv.hi - 0.92925).abs() < 5e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn admissible_radii_give_valid_certificates(p in params(0.3), t in 0.0..1.0f64) {
        match admissible_epsilon(&p) {
            Some(iv) => {
                let lo = if iv.lo_open { iv.lo + 1e-9 } else { iv.lo };
                let eps = lo + t * (iv.hi - lo);
                prop_assume!(eps > 0.0 && eps < 1.0);
                prop_assert!(ball_certificate(&p, eps).unwrap().margin >= -1e-12);
            }
            None => {
                for k in 1..200 {
                    prop_assert!(!ball_certificate(&p, k as f64 / 200.0).unwrap().valid());
                }
            }
        }
    }
}

#[test]
fn ball_invariance_small_parameters() {
    use rand::{Rng, SeedableRng};
    let p = Parameters::from_parts(0.01, 0.0, 0.05, 0.0);
    let eps = 0.1;
    assert!(ball_certificate(&p, eps).unwrap().valid());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut draw = || {
        C64::from_polar(
            eps * rng.gen::<f64>().sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    for _ in 0..1000 {
        let seed = OrbitSeed::new(draw(), draw()).unwrap();
        let o = iterate(&p, seed, &IterationSettings::with_steps(10_000));
        assert!(o.is_completed());
        assert!(o.points.iter().all(|z| z.norm() <= eps));
    }
}

#[test]
fn orbits_are_bitwise_deterministic() {
    let p = Parameters::from_parts(0.0007, 0.2836, 0.5508, 0.8709);
    let seed = OrbitSeed::new(C64::new(0.3, -0.2), C64::new(0.1, 0.7)).unwrap();
    let s = IterationSettings::with_steps(5000);
    let a = iterate(&p, seed, &s);
    let b = std::thread::spawn(move || iterate(&p, seed, &s))
        .join()
        .unwrap();
    assert!(a
        .points
        .iter()
        .zip(&b.points)
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    assert_eq!(a.status, b.status);
}

#[test]
fn cycle_reports_are_minimal_and_close() {
    let cases = [
        (
            Parameters::from_parts(0.0098, 0.5323, 0.2794, 0.9462),
            (C64::new(-0.5938, -0.3212), C64::new(-1.2230, 1.7184)),
        ),
        (
            Parameters::from_parts(0.2021, 0.4539, 0.4280, 0.9660),
            (C64::new(-0.6653, 2.8), C64::new(0.2991, 0.6178)),
        ),
        (
            Parameters::on_period_two_line(C64::new(0.3804, 0.5678)),
            (C64::new(92.0, 28.0), C64::new(76.0, 76.0)),
        ),
    ];
    for (p, (a, b)) in cases {
        let o = iterate(
            &p,
            OrbitSeed::new(a, b).unwrap(),
            &IterationSettings::with_steps(20_000),
        );
        let tol = 1e-6;
        let cyc = detect_cycle(&o, tol, 128).unwrap();
        let tail = &o.points[o.points.len() / 2..];
        // no proper divisor locks
        for d in (1..cyc.period).filter(|&d| cyc.period.is_multiple_of(d)) {
            let locked = tail
                .iter()
                .zip(&tail[d..])
                .all(|(x, y)| (y - x).norm() <= tol * (1.0 + x.norm()));
            assert!(!locked, "divisor {d} of {} also locks", cyc.period);
        }
        // closure: continue the orbit one more period from its end
        let n = o.points.len();
        let (mut zp, mut zc) = (o.points[n - 2], o.points[n - 1]);
        let mut extra = Vec::new();
        for _ in 0..cyc.period {
            let next = step(&p, zp, zc).unwrap();
            extra.push(next);
            zp = zc;
            zc = next;
        }
        for (k, z) in extra.iter().enumerate() {
            assert!((z - cyc.cycle_points[k]).norm() <= cyc.residual.max(1e-12) * 1.0001);
        }
    }
}

#[test]
fn scan_is_monotone_in_budget() {
    let sq = ComplexRect::unit_square();
    let mut prev: Option<(f64, f64)> = None;
    for budget in [10, 50, 200, 1000, 4000] {
        let r = scan_margin(RootBranch::Plus, &sq, &sq, budget, 99).unwrap();
        if let Some((mx, mn)) = prev {
            assert!(r.max_value >= mx, "max decreased at {budget}");
            assert!(r.min_value <= mn, "min increased at {budget}");
        }
        prev = Some((r.max_value, r.min_value));
    }
}

#[test]
fn lattice_extrema_match_brute_force() {
    let axis = [-0.75, 0.0, 0.75];
    let mut points = Vec::new();
    for &ar in &axis {
        for &ai in &axis {
            for &br in &axis {
                for &bi in &axis {
                    points.push((C64::new(ar, ai), C64::new(br, bi)));
                }
            }
        }
    }
    for branch in [RootBranch::Minus, RootBranch::Plus] {
        let r = extrema_over(branch, &points).unwrap();
        let mut best_max = f64::NEG_INFINITY;
        let mut best_min = f64::INFINITY;
        let mut n = 0;
        for &(a, b) in &points {
            let z = equilibrium_on_branch(&Parameters { alpha: a, beta: b }, branch);
            if b == C64::new(0.0, 0.0) {
                best_max = best_max.max(0.0);
                best_min = best_min.min(0.0);
                n += 1;
                continue;
            }
            if (z + 1.0).norm() < 1e-12 {
                continue;
            }
            let v = (b * z / ((z + 1.0) * (z + 1.0))).norm() + (b / (z + 1.0)).norm();
            best_max = best_max.max(v);
            best_min = best_min.min(v);
            n += 1;
        }
        assert_eq!(r.max_value, best_max);
        assert_eq!(r.min_value, best_min);
        assert_eq!(r.samples, n);
    }
}

#[test]
fn grid_parallel_equals_serial() {
    let spec = GridSpec::Seeds {
        params: Parameters::from_parts(0.2278, 0.3210, 0.82956, 0.8221),
    };
    let region = ComplexRect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    let s = IterationSettings::with_steps(3000);
    let a = AnalysisSettings::default();
    let par = classification_grid(&spec, region, (5, 4), &s, &a).unwrap();
    let ser = classification_grid_serial(&spec, region, (5, 4), &s, &a).unwrap();
    assert_eq!(par, ser);
    assert_eq!(par.cells.len(), 4);
    assert!(par.cells.iter().all(|r| r.len() == 5));
    for (iy, row) in par.cells.iter().enumerate() {
        for (ix, tag) in row.iter().enumerate() {
            let center = region.cell_center(ix, iy, 5, 4);
            let direct =
                classify_orbit(&spec.case_at(center).0, OrbitSeed::constant(center), &s, &a);
            assert_eq!(*tag, direct.tag());
        }
    }
}

#[test]
fn alpha_zero_tags_and_trichotomy_on_line() {
    let eqs = equilibria(&Parameters::from_parts(0.0, 0.0, 0.5, 0.5));
    assert_eq!(eqs[0].branch, Branch::ZeroCase);
    assert_eq!(eqs[1].branch, Branch::AlphaBetaMinusOne);
    let t = trichotomy(
        &Parameters::on_period_two_line(C64::new(3.0, -7.0)),
        DEFAULT_BOUNDARY_TOL,
    );
    assert_eq!(t.verdict, Trichotomy::PeriodTwo);
}
