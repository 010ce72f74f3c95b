use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strip_lab::analytic::{SeparationMode, TravelingWave};
use strip_lab::conformal::*;
use strip_lab::duality::*;
use strip_lab::{HalfPlaneGrid, PatchField, ScalarField, StripGrid};

fn patch(n: usize) -> HalfPlaneGrid<f64> {
    HalfPlaneGrid::new((-2.0, 2.0), (1.0, 3.0), n, n, 0.02).unwrap()
}

#[test]
fn divergence_and_expanded_forms_agree() {
    // u = x^3 y - y^2 + e^x cos y with closed-form gradient and Laplacian.
    let grad = |x: f64, y: f64| {
        (
            3.0 * x * x * y + x.exp() * y.cos(),
            x.powi(3) - 2.0 * y - x.exp() * y.sin(),
        )
    };
    let lap = |x: f64, y: f64| 6.0 * x * y - 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let k = rng.gen_range(-3.0..3.0);
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0));
        let flux = |px: f64, py: f64| {
            let w = (px * px + py * py).powf(-k / 2.0);
            let (gx, gy) = grad(px, py);
            (w * gx, w * gy)
        };
        let s = 1e-4;
        let div = (flux(x + s, y).0 - flux(x - s, y).0) / (2.0 * s)
            + (flux(x, y + s).1 - flux(x, y - s).1) / (2.0 * s);
        let r2 = x * x + y * y;
        let (gx, gy) = grad(x, y);
        let expanded = r2.powf(-k / 2.0 - 1.0) * (r2 * lap(x, y) - k * (x * gx + y * gy));
        assert!(
            (div - expanded).abs() < 1e-6 * (1.0 + expanded.abs()),
            "k={k} ({x},{y})"
        );
    }
}

#[test]
fn map_image_lands_on_the_right_rays() {
    let g = StripGrid::<f64>::new(-1.0, 1.5, 11, 9).unwrap();
    let img = pushforward(&ScalarField::sample(g, |x, y| x + y).unwrap());
    for (n, (_, j, x, _)) in g.nodes().enumerate() {
        let (xt, yt) = img.image()[n];
        assert!((xt.hypot(yt) - x.exp()).abs() < 1e-14 * x.exp());
        if j == 0 {
            assert!(yt == 0.0 && xt > 0.0);
        } else if j == g.ny() + 1 {
            assert!(yt == 0.0 && xt < 0.0);
        } else {
            assert!(yt > 0.0);
        }
    }
}

#[test]
fn transported_gradient_matches_differences() {
    let u = Transported(TravelingWave::new(2.0, 0.0, 1.0, 1.0).unwrap());
    for &(x, y) in &[(0.3f64, 0.8f64), (-1.5, 0.2), (2.0, 2.0)] {
        let (gx, gy) = u.gradient(x, y);
        let s = 1e-6;
        let fx = (u.value(x + s, y) - u.value(x - s, y)) / (2.0 * s);
        let fy = (u.value(x, y + s) - u.value(x, y - s)) / (2.0 * s);
        assert!((gx - fx).abs() < 1e-7 && (gy - fy).abs() < 1e-7);
    }
}

#[test]
fn weighted_residual_examples() {
    let p = patch(33);
    let zero = PatchField::sample(p, |_, _| 0.0).unwrap();
    assert_eq!(weighted_residual(&zero, 1.0, p.exclusion()).unwrap(), 0.0);
    let height = PatchField::sample(p, |_, y| y).unwrap();
    assert!(weighted_residual(&height, 0.0, p.exclusion()).unwrap() < 1e-12);
    // A separation mode solves the transported equation as well.
    let m = Transported(SeparationMode::new(1.0, 2, 1.0, -0.5).unwrap());
    let r1 = weighted_residual(&transport_to_patch(&m, &patch(33)).unwrap(), 1.0, 0.02).unwrap();
    let r2 = weighted_residual(&transport_to_patch(&m, &patch(65)).unwrap(), 1.0, 0.02).unwrap();
    assert!(r1 / r2 > 3.0, "{r1} {r2}");
    let report = admissibility(2.5);
    assert!(!report.admissible && report.warning.unwrap().contains("admissible"));
}

#[test]
fn resampled_field_converges_to_transported_field() {
    let w = TravelingWave::new(1.0, 0.0, 1.0, 1.0).unwrap();
    let p = patch(17);
    let exact = transport_to_patch(&Transported(w), &p).unwrap();
    let mut gaps = Vec::new();
    let mut g = StripGrid::new(-1.0, 1.5, 51, 49).unwrap();
    for _ in 0..3 {
        let f = ScalarField::sample(g, |x, y| w.eval(x, y)).unwrap();
        let pf = resample_bilinear(&f, &p).unwrap();
        let gap = pf
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        gaps.push(gap);
        g = g.refined();
    }
    assert!(
        gaps[0] / gaps[1] > 3.0 && gaps[1] / gaps[2] > 3.0,
        "{gaps:?}"
    );
}

#[test]
fn stream_gradient_matches_integrated_dual() {
    let k = 2.0;
    let u = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0).unwrap());
    let base = (1.5, 2.0);
    let v = |x: f64, y: f64| {
        integrate_stream(
            &u,
            k,
            &StreamPath::staircase(base, (x, y), true, 0.05).unwrap(),
        )
        .value
    };
    let s = 1e-4;
    let fd = (
        (v(s, 1.0) - v(-s, 1.0)) / (2.0 * s),
        (v(0.0, 1.0 + s) - v(0.0, 1.0 - s)) / (2.0 * s),
    );
    let g = stream_gradient(&u, k, (0.0, 1.0), 0.05).unwrap();
    assert!(
        (g.0 - fd.0).abs() < 1e-6 && (g.1 - fd.1).abs() < 1e-6,
        "{g:?} {fd:?}"
    );
}

#[test]
fn log_and_argument_are_conjugate() {
    let u = FnPair {
        value: |x: f64, y: f64| x.hypot(y).ln(),
        gradient: |x: f64, y: f64| (x / (x * x + y * y), y / (x * x + y * y)),
    };
    let g = stream_gradient(&u, 0.0, (0.6, 0.8), 0.1).unwrap();
    assert!((g.0 + 0.8).abs() < 1e-15 && (g.1 - 0.6).abs() < 1e-15);
    let path =
        StreamPath::new(vec![(2.0, 0.5), (2.0, 2.0), (-1.0, 2.0), (-1.0, 0.5)], 0.1).unwrap();
    let s = integrate_stream(&u, 0.0, &path);
    let expected = 0.5f64.atan2(-1.0) - 0.5f64.atan2(2.0);
    assert!((s.value - expected).abs() < 1e-10, "{} {expected}", s.value);
}

#[test]
fn curl_of_stream_gradient_tracks_primal_residual() {
    // Solutions: curl vanishes at second order.
    let k = 1.5;
    let u = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0).unwrap());
    let at_coarse = |n: usize, level: usize| {
        let c = stream_curl(&transport_to_patch(&u, &patch(n)).unwrap(), k).unwrap();
        let mut m = 0.0f64;
        for i in 2..15 {
            for j in 2..15 {
                m = m.max(c.at(i << level, j << level).abs());
            }
        }
        m
    };
    let (c1, c2) = (at_coarse(17, 0), at_coarse(33, 1));
    assert!(c1 / c2 > 3.5, "{c1} {c2}");

    // Non-solution u = x^2: curl = |x|^{-k} (2 - 2 k x^2 / |x|^2).
    let p = patch(65);
    let sq = PatchField::sample(p, |x, _| x * x).unwrap();
    let c = stream_curl(&sq, k).unwrap();
    for i in 2..p.nx() - 2 {
        for j in 2..p.ny() - 2 {
            let (x, y) = p.node(i, j);
            let r2 = x * x + y * y;
            let exact = r2.powf(-k / 2.0) * (2.0 - 2.0 * k * x * x / r2);
            assert!((c.at(i, j) - exact).abs() < 2e-2, "({x},{y})");
        }
    }
}

#[test]
fn applying_duality_twice_negates() {
    let k = 1.0;
    let u = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0).unwrap());
    let p = patch(21);
    let base = p.node(0, 0);
    let v = DualPotential::new(&u, k, base, 0.02).unwrap();
    let vv = dual_field(&v, -k, &p, (0, 0)).unwrap();
    let u0 = u.value(base.0, base.1);
    for (i, j, x, y) in p.nodes() {
        assert!((vv.at(i, j) + (u.value(x, y) - u0)).abs() < 1e-10);
    }
    // The potential's values agree with the cell-by-cell dual field.
    let direct = dual_field(&u, k, &p, (0, 0)).unwrap();
    for &(i, j) in &[(5, 7), (20, 20), (13, 2)] {
        let (x, y) = p.node(i, j);
        assert!((v.value(x, y) - direct.at(i, j)).abs() < 1e-10);
    }
}

#[test]
fn basepoint_choice_shifts_by_a_constant() {
    let k = 2.0;
    let u = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0).unwrap());
    let p = patch(25);
    let a = dual_field(&u, k, &p, (0, 0)).unwrap();
    let b = dual_field(&u, k, &p, (12, 20)).unwrap();
    let shift = a.at(12, 20);
    for n in 0..p.len() {
        assert!((a.values()[n] - b.values()[n] - shift).abs() < 1e-10);
    }
    assert_eq!(b.at(12, 20), 0.0);
    let _ = PI;
}
