use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strip_lab::analytic::{SeparationMode, StripSolution, TravelingWave};
use strip_lab::fd::*;
use strip_lab::{Error, PdeParams, ScalarField, StripGrid};

fn solve_with<F: Fn(f64, f64) -> f64>(
    grid: &StripGrid<f64>,
    params: &PdeParams<f64>,
    bc: &BoundaryData<'_, f64>,
    f: F,
    opts: AssemblyOptions,
) -> ScalarField<f64> {
    let sys = assemble(grid, params, bc, f, opts).unwrap();
    solve(&sys, DEFAULT_TOL).unwrap()
}

#[test]
fn maximum_principle_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let grid = StripGrid::new(
            -2.0,
            rng.gen_range(0.5..3.0),
            rng.gen_range(9..40),
            rng.gen_range(5..25),
        )
        .unwrap();
        let kmax = 2.0 / grid.hx();
        let params = PdeParams::new(rng.gen_range(-kmax..kmax), rng.gen_range(0.0..3.0)).unwrap();
        let a: f64 = rng.gen_range(0.0..1.0);
        let bc = BoundaryData::new(
            move |x: f64| a * x.sin().powi(2),
            |_| 0.0,
            SideClosure::Dirichlet(Box::new(move |_, y: f64| a * y.sin())),
        );
        let u = solve_with(
            &grid,
            &params,
            &bc,
            |x, y| -(x * y).cos().powi(2),
            AssemblyOptions::default(),
        );
        assert!(u.min() >= -1e-12, "min {}", u.min());
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let grid = StripGrid::new(-3.0, 3.0, 31, 15).unwrap();
    for &(k, lambda) in &[(0.0, 0.0), (2.0, 0.0), (-3.0, 1.5)] {
        let params = PdeParams::new(k, lambda).unwrap();
        let u = solve_with(
            &grid,
            &params,
            &BoundaryData::zero(),
            |_, _| 0.0,
            AssemblyOptions::default(),
        );
        assert_eq!(u.max_abs(), 0.0);
    }
}

#[test]
fn solution_is_linear_in_data() {
    let grid = StripGrid::new(-1.0, 2.0, 25, 13).unwrap();
    let params = PdeParams::new(1.5, 0.5).unwrap();
    let o = AssemblyOptions::default();
    let g1 = |x: f64, y: f64| x * y + 1.0;
    let g2 = |x: f64, y: f64| (x - y).sin();
    let g12 = |x: f64, y: f64| 2.0 * g1(x, y) - 3.0 * g2(x, y);
    let f1 = |x: f64, y: f64| x.cos() * y;
    let f2 = |x: f64, _: f64| x * x;
    let u1 = solve_with(&grid, &params, &BoundaryData::dirichlet_from(&g1), f1, o);
    let u2 = solve_with(&grid, &params, &BoundaryData::dirichlet_from(&g2), f2, o);
    let u12 = solve_with(
        &grid,
        &params,
        &BoundaryData::dirichlet_from(&g12),
        |x, y| 2.0 * f1(x, y) - 3.0 * f2(x, y),
        o,
    );
    for (n, &v) in u12.values().iter().enumerate() {
        assert!((v - (2.0 * u1.values()[n] - 3.0 * u2.values()[n])).abs() < 1e-11);
    }
}

#[test]
fn comparison_with_constant_barrier() {
    // With f = 0 and data in [0, M], the solution stays in [0, M].
    let grid = StripGrid::new(-2.0, 2.0, 41, 21).unwrap();
    let params = PdeParams::new(3.0, 0.0).unwrap();
    let m = 2.5;
    let bc = BoundaryData::new(
        |x: f64| 1.0 + x.sin(),
        |_| 0.0,
        SideClosure::Dirichlet(Box::new(move |_, y: f64| m * (y / PI))),
    );
    let u = solve_with(&grid, &params, &bc, |_, _| 0.0, AssemblyOptions::default());
    assert!(u.min() >= -1e-12);
    assert!(u.values().iter().all(|&v| v <= m + 1e-12));
}

#[test]
fn separation_mode_reproduced_on_truncated_strip() {
    let k = 1.0f64;
    let mode = SeparationMode::new(k, 1, 0.3, 0.7).unwrap();
    let problem = ConvergenceProblem {
        grid: StripGrid::new(-1.5, 1.5, 17, 15).unwrap(),
        params: PdeParams::new(k, 0.0).unwrap(),
        exact: ExactSolution::Mode(mode),
        options: AssemblyOptions::default(),
    };
    let study = convergence_order(&problem, 3).unwrap();
    assert!((study.order - 2.0).abs() < 0.1, "{study:?}");
    let u = |x: f64, y: f64| mode.value(x, y);
    assert!(u(0.4, 0.0) == 0.0 && u(0.4, PI).abs() < 1e-15);
}

#[test]
fn orderings_agree_and_refinement_gap_shrinks() {
    let grid = StripGrid::new(-PI, PI, 33, 15).unwrap();
    let w = TravelingWave::new(2.0, 0.0, 1.0, 1.0).unwrap();
    let params = w.params();
    let u = |x: f64, y: f64| w.eval(x, y);
    let bc = BoundaryData::dirichlet_from(&u);
    let yf = SolverVariant::default();
    let xf = SolverVariant {
        options: AssemblyOptions {
            ordering: Ordering::XFastest,
            ..Default::default()
        },
        refinements: 0,
    };
    let gap = uniqueness_gap(&grid, &params, &bc, |_, _| 0.0, yf, xf).unwrap();
    assert!(gap <= 1e-10, "{gap}");

    let fine1 = SolverVariant {
        refinements: 1,
        ..yf
    };
    let fine2 = SolverVariant {
        refinements: 2,
        ..yf
    };
    let g1 = uniqueness_gap(&grid, &params, &bc, |_, _| 0.0, yf, fine1).unwrap();
    let g2 = uniqueness_gap(&grid, &params, &bc, |_, _| 0.0, fine1, fine2).unwrap();
    assert!(g1 / g2 > 3.5 && g1 / g2 < 4.5, "{g1} {g2}");
}

#[test]
fn central_and_upwind_orders() {
    let w = TravelingWave::new(2.0, 0.0, 1.0, 1.0).unwrap();
    let mut problem = ConvergenceProblem {
        grid: StripGrid::new(-PI, PI, 33, 15).unwrap(),
        params: w.params(),
        exact: ExactSolution::Wave(w),
        options: AssemblyOptions::default(),
    };
    let central = convergence_order(&problem, 3).unwrap();
    assert!((central.order - 2.0).abs() < 0.1, "{central:?}");
    problem.options.convection = Convection::Upwind;
    let upwind = convergence_order(&problem, 4).unwrap();
    assert!((upwind.order - 1.0).abs() < 0.15, "{upwind:?}");
}

#[test]
fn manufactured_forcing_and_periodic_sides() {
    let params = PdeParams::new(-1.0, 2.0).unwrap();
    let problem = ConvergenceProblem {
        grid: StripGrid::new(0.0, 1.0, 9, 7).unwrap(),
        params,
        exact: ExactSolution::SinY,
        options: AssemblyOptions::default(),
    };
    // sin y is reproduced to roundoff in x and second order in y.
    let err = solution_error(&problem, &problem.grid).unwrap();
    assert!(err < 1e-2);

    let w = TravelingWave::new(1.0, 0.0, 1.0, 1.0).unwrap();
    let u = |x: f64, y: f64| w.eval(x, y);
    let bc = BoundaryData::periodic_from(&u);
    let mut errs = Vec::new();
    let mut grid = StripGrid::new(0.0, 2.0 * PI, 33, 15).unwrap();
    for _ in 0..2 {
        let sol = solve_with(
            &grid,
            &w.params(),
            &bc,
            |_, _| 0.0,
            AssemblyOptions::default(),
        );
        errs.push(
            grid.nodes()
                .map(|(i, j, x, y)| (sol.at(i, j) - u(x, y)).abs())
                .fold(0.0, f64::max),
        );
        grid = grid.refined();
    }
    assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
}

#[test]
fn peclet_guard() {
    let grid = StripGrid::new(0.0, 10.0, 11, 5).unwrap();
    let params = PdeParams::new(3.0, 0.0).unwrap();
    let err = assemble(
        &grid,
        &params,
        &BoundaryData::zero(),
        |_, _| 0.0,
        AssemblyOptions::default(),
    );
    assert!(matches!(err, Err(Error::CellPeclet { .. })));
    let upwind = AssemblyOptions {
        convection: Convection::Upwind,
        ..Default::default()
    };
    let sys = assemble(&grid, &params, &BoundaryData::zero(), |_, _| 0.0, upwind).unwrap();
    assert!(sys.matrix.is_negated_m_matrix());
}

#[test]
fn eigenvalue_decreases_with_width() {
    let mut prev = f64::INFINITY;
    for m in 0..3 {
        let half = PI * f64::from(1u32 << m);
        let g = StripGrid::new(-half, half, 32 * (1 << m) + 1, 15).unwrap();
        let ev = min_eigenvalue(&g).unwrap();
        let h = g.hx().max(g.hy());
        let exact = continuum_min_eigenvalue(2.0 * half);
        assert!((ev.eigenvalue - exact).abs() <= 5.0 * h * h);
        assert!(ev.eigenvalue > 1.0 && ev.eigenvalue < prev);
        prev = ev.eigenvalue;
    }
}
