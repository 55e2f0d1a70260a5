//! Cross-checks of the closed-form oracles and the optimizer against
//! independent brute-force computations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thinshield::functionals::{eval_f0, eval_f1, eval_geps, PhysicsParams, ThicknessField};
use thinshield::geometry::{circle_mesh, discretize_sphere, ellipse_mesh, BoundaryMesh, Sample};
use thinshield::optimizer::optimize;
use thinshield::oracle::{
    fiber_energy, fiber_expansion_check, radial_exact_energy, recovery_energy, RadialProblem,
};

/// Minimizes `sum_j k_j (u_{j+1} - u_j)^2 + b u_M^2` with `u_0 = 1` and
/// returns the minimum. Tridiagonal solve.
fn min_chain_energy(k: &[f64], b: f64) -> f64 {
    let m = k.len();
    // unknowns u_1..u_M; row j: -k_{j-1} u_{j-1} + (k_{j-1} + k_j) u_j - k_j u_{j+1} = 0
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut lower = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for j in 0..m {
        diag[j] = k[j] + if j + 1 < m { k[j + 1] } else { b };
        if j + 1 < m {
            upper[j] = -k[j + 1];
            lower[j + 1] = -k[j + 1];
        }
    }
    rhs[0] = k[0];
    for j in 1..m {
        let f = lower[j] / diag[j - 1];
        diag[j] -= f * upper[j - 1];
        rhs[j] -= f * rhs[j - 1];
    }
    let mut u = vec![0.0; m + 1];
    u[0] = 1.0;
    u[m] = rhs[m - 1] / diag[m - 1];
    for j in (1..m).rev() {
        u[j] = (rhs[j - 1] - upper[j - 1] * u[j + 1]) / diag[j - 1];
    }
    let bulk: f64 = (0..m).map(|j| k[j] * (u[j + 1] - u[j]).powi(2)).sum();
    bulk + b * u[m] * u[m]
}

/// Linear finite elements for `eps int_0^T u'^2 w(t) dt + beta w(T) u(T)^2`,
/// with `int w` over each element supplied exactly.
fn fe_fiber(
    eps: f64,
    beta: f64,
    thickness: f64,
    elems: usize,
    w_int: impl Fn(f64, f64) -> f64,
    w_end: f64,
) -> f64 {
    let d = thickness / elems as f64;
    let k: Vec<f64> = (0..elems)
        .map(|j| eps * w_int(j as f64 * d, (j + 1) as f64 * d) / (d * d))
        .collect();
    min_chain_energy(&k, beta * w_end)
}

#[test]
fn radial_energy_matches_finite_elements() {
    for (n, eps, h) in [
        (2usize, 0.1, 1.0),
        (2, 0.4, 1.0),
        (3, 0.1, 2.0),
        (3, 0.3, 1.5),
        (4, 0.2, 1.0),
    ] {
        let (radius, beta) = (1.0, 1.3);
        let p = RadialProblem::new(n, radius, beta, eps, h).unwrap();
        let exact = radial_exact_energy(&p).unwrap();
        let area = |r: f64| {
            // |S^(n-1)| r^(n-1), with the unit sphere area from the 2D/3D/4D values
            let unit = match n {
                2 => 2.0 * PI,
                3 => 4.0 * PI,
                4 => 2.0 * PI * PI,
                _ => unreachable!(),
            };
            unit * r.powi(n as i32 - 1)
        };
        let nn = n as f64;
        let w_int =
            |a: f64, b: f64| area(1.0) * ((radius + b).powf(nn) - (radius + a).powf(nn)) / nn;
        let fe = fe_fiber(eps, beta, eps * h, 4000, w_int, area(radius + eps * h));
        // Galerkin energies approach the minimum from above
        assert!(fe >= exact * (1.0 - 1e-13), "n={n}");
        assert!((fe - exact) / exact < 1e-7, "n={n} fe={fe} exact={exact}");
    }
}

#[test]
fn fiber_energy_matches_finite_elements() {
    let beta = 0.8;
    for (curv, h, eps) in [
        (0.0, 1.0, 0.1),
        (2.0, 1.0, 0.1),
        (5.0, 0.5, 0.2),
        (-1.5, 1.0, 0.3),
    ] {
        let samples = vec![Sample {
            position: [0.0; 3],
            weight: 1.0,
            curvature: curv,
        }];
        let mesh = BoundaryMesh::new(2, samples, "point").unwrap();
        let field = ThicknessField::constant(&mesh, h).unwrap();
        let oracle = fiber_energy(&mesh, &field, beta, eps).unwrap();
        let t = eps * h;
        let w_int = |a: f64, b: f64| (b - a) + curv * (b * b - a * a) / 2.0;
        let fe = fe_fiber(eps, beta, t, 4000, w_int, 1.0 + t * curv);
        assert!(fe >= oracle * (1.0 - 1e-13));
        assert!(
            (fe - oracle) / oracle < 1e-7,
            "H={curv}: fe={fe} oracle={oracle}"
        );
    }
}

#[test]
fn fiber_and_radial_agree_to_second_order_on_spheres() {
    let mesh = discretize_sphere(1.0, 16).unwrap();
    let h = ThicknessField::constant(&mesh, 1.0).unwrap();
    let diffs: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let f = fiber_energy(&mesh, &h, 1.0, eps).unwrap();
            let r =
                radial_exact_energy(&RadialProblem::new(3, 1.0, 1.0, eps, 1.0).unwrap()).unwrap();
            (f - r).abs() / (eps * eps)
        })
        .collect();
    let max = diffs.iter().cloned().fold(0.0, f64::max);
    let min = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max < 10.0 && max / min < 2.0, "{diffs:?}");
}

#[test]
fn fiber_first_order_error_is_linear_in_eps() {
    let mesh = ellipse_mesh(2.0, 1.0, 256).unwrap();
    let h = ThicknessField::new(
        &mesh,
        (0..256)
            .map(|i| 1.0 + 0.5 * (i as f64 * 2.0 * PI / 256.0).cos())
            .collect(),
    )
    .unwrap();
    let f0 = eval_f0(&mesh, &h, 1.0).unwrap();
    let f1 = eval_f1(&mesh, &h, 1.0).unwrap();
    let err = |eps: f64| ((fiber_energy(&mesh, &h, 1.0, eps).unwrap() - f0) / eps - f1).abs();
    let ratio = err(1e-2) / err(1e-3);
    assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
    let rep = fiber_expansion_check(&mesh, &h, 1.0, &[1e-2, 1e-3, 1e-4]).unwrap();
    assert!((rep.fitted_f0 - f0).abs() < 1e-6 * f0);
    assert!((rep.fitted_f1 - f1).abs() < 1e-3 * f1);
}

#[test]
fn recovery_profiles_never_beat_fibers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let a = rng.gen_range(1.0..4.0);
        let mesh = ellipse_mesh(a, 1.0, 64).unwrap();
        let h =
            ThicknessField::new(&mesh, (0..64).map(|_| rng.gen_range(0.0..2.0)).collect()).unwrap();
        let beta = rng.gen_range(0.2..3.0);
        let eps = 10f64.powf(rng.gen_range(-4.0..-1.0));
        let f = fiber_energy(&mesh, &h, beta, eps).unwrap();
        for order in [1, 2] {
            let r = recovery_energy(&mesh, &h, beta, eps, order).unwrap();
            assert!(r >= f - 1e-12, "case {case} order {order}: {r} < {f}");
        }
    }
}

#[test]
fn second_order_recovery_is_second_order_accurate() {
    let mesh = circle_mesh(1.0, 128).unwrap();
    let h = ThicknessField::constant(&mesh, 1.0).unwrap();
    let model = |eps: f64| PI + eps * 0.75 * PI;
    let ratios: Vec<f64> = [1e-2, 1e-3]
        .iter()
        .map(|&eps| {
            (recovery_energy(&mesh, &h, 1.0, eps, 2).unwrap() - model(eps)).abs() / (eps * eps)
        })
        .collect();
    assert!(ratios[0] < 10.0 && ratios[1] < 10.0, "{ratios:?}");
}

#[test]
fn radial_energy_decreases_with_thickness() {
    for n in [2, 3] {
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let h = 0.1 * i as f64;
            let e =
                radial_exact_energy(&RadialProblem::new(n, 1.0, 1.0, 0.05, h).unwrap()).unwrap();
            assert!(e < last);
            last = e;
        }
    }
}

/// Two-sample boundary; the optimum is a one-parameter search over how the
/// mass is split.
fn two_group_mesh(w1: f64, h1: f64, w2: f64, h2: f64) -> BoundaryMesh {
    let s = |w, h| Sample {
        position: [0.0; 3],
        weight: w,
        curvature: h,
    };
    BoundaryMesh::new(2, vec![s(w1, h1), s(w2, h2)], "two-group").unwrap()
}

#[test]
fn optimizer_matches_brute_force_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..30 {
        let (w1, w2) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let beta = rng.gen_range(0.5..2.0);
        let eps = rng.gen_range(0.01..0.3);
        let hmax = (2.0 / 3.0) * beta / eps;
        let (c1, c2) = (rng.gen_range(0.0..hmax), rng.gen_range(0.0..hmax));
        let m = rng.gen_range(0.05..4.0);
        let mesh = two_group_mesh(w1, c1, w2, c2);
        let params = PhysicsParams::new(beta, eps, m).unwrap();
        let opt = optimize(&mesh, &params).unwrap();

        let g = |s: f64| {
            let h = ThicknessField::new(&mesh, vec![s / w1, (m - s) / w2]).unwrap();
            eval_geps(&mesh, &h, beta, eps).unwrap()
        };
        // dense scan, then golden-section refinement around the best cell
        let n = 20_000;
        let best = (0..=n)
            .map(|i| m * i as f64 / n as f64)
            .min_by(|a, b| g(*a).total_cmp(&g(*b)))
            .unwrap();
        let (mut lo, mut hi) = ((best - m / n as f64).max(0.0), (best + m / n as f64).min(m));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let x1 = hi - phi * (hi - lo);
            let x2 = lo + phi * (hi - lo);
            if g(x1) <= g(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let s = 0.5 * (lo + hi);
        assert!(
            opt.value <= g(s) + 1e-12,
            "case {case}: {} vs {}",
            opt.value,
            g(s)
        );
        assert!((opt.value - g(s)).abs() < 1e-10, "case {case}");
        assert!(
            (opt.mu.values()[0] * w1 - s).abs() < 1e-5 * m.max(1.0),
            "case {case}"
        );
    }
}
