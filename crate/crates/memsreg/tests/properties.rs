use memsreg::asymptotics::farfield::first_integral_orders;
use memsreg::asymptotics::{contact_point_from_field, FarFieldCoeffs};
use memsreg::discretization::{elastic_operator, Field, Grid};
use memsreg::equilibrium::{EquilibriumSolver, TraceOptions};
use memsreg::model::{energy, ModelParams, Order};
use memsreg::phaseplane::{l0, l_eps};
use proptest::prelude::*;

fn order_strategy() -> impl Strategy<Value = Order> {
    prop_oneof![Just(Order::Second), Just(Order::Fourth)]
}

/// Max-norm error of the discrete solve A u_h = A u against the exact u.
fn solve_error(order: Order, n: usize, u: &dyn Fn(f64) -> f64, au: &dyn Fn(f64) -> f64) -> f64 {
    let g = Grid::new(n).unwrap();
    let op = elastic_operator(order, g);
    let rhs: Vec<f64> = g.nodes().iter().map(|&x| au(x)).collect();
    let uh = op.to_band().lu().unwrap().solve(&rhs);
    g.nodes().iter().zip(&uh).map(|(&x, v)| (u(x) - v).abs()).fold(0.0, f64::max)
}

fn observed_order(order: Order, u: &dyn Fn(f64) -> f64, au: &dyn Fn(f64) -> f64) -> f64 {
    let e1 = solve_error(order, 101, u, au);
    let e2 = solve_error(order, 203, u, au);
    (e1 / e2).log2()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn force_is_potential_derivative(u in -0.9f64..2.0, eps in 1e-3f64..0.09, m in 3u32..7, lambda in 0.1f64..50.0) {
        let p = ModelParams::new(lambda, eps, m, Order::Second).unwrap();
        let h = 1e-6;
        let fd = (p.potential_phi(u + h).unwrap() - p.potential_phi(u - h).unwrap()) / (2.0 * h);
        let f = p.force(u).unwrap();
        prop_assert!((fd - f).abs() <= 1e-6 * (1.0 + f.abs()), "fd {} force {}", fd, f);
        let dfd = (p.force(u + h).unwrap() - p.force(u - h).unwrap()) / (2.0 * h);
        let df = p.dforce(u).unwrap();
        prop_assert!((dfd - df).abs() <= 1e-5 * (1.0 + df.abs()));
    }

    #[test]
    fn force_vanishes_at_contact_gap(eps in 1e-3f64..0.5, m in 3u32..8, lambda in 0.1f64..50.0) {
        let p = ModelParams::new(lambda, eps, m, Order::Second).unwrap();
        prop_assert!(p.force(-1.0 + eps).unwrap().abs() < 1e-9 * lambda / (eps * eps));
        prop_assert!(p.force(-1.0 + 0.5 * eps).unwrap() < 0.0);
        prop_assert!(p.force(-1.0 + 2.0 * eps).unwrap() > 0.0);
    }

    #[test]
    fn laplacian_converges_at_second_order(a in prop::collection::vec(-1.0f64..1.0, 3)) {
        let w = |k: usize| k as f64 * std::f64::consts::PI / 2.0;
        let u = |x: f64| (1..=3).map(|k| a[k - 1] * (w(k) * (x + 1.0)).sin()).sum::<f64>();
        let au = |x: f64| (1..=3).map(|k| a[k - 1] * w(k) * w(k) * (w(k) * (x + 1.0)).sin()).sum::<f64>();
        prop_assume!(a.iter().map(|v| v.abs()).sum::<f64>() > 0.1);
        let p = observed_order(Order::Second, &u, &au);
        prop_assert!((p - 2.0).abs() < 0.15, "observed order {}", p);
    }

    #[test]
    fn biharmonic_converges_at_second_order(c in prop::collection::vec(-1.0f64..1.0, 2)) {
        // (1 − x²)²(1 + c₀x + c₁x²) is clamped at both ends
        let u = |x: f64| (1.0 - x * x).powi(2) * (1.0 + c[0] * x + c[1] * x * x);
        let au = |x: f64| 24.0 + 120.0 * c[0] * x + c[1] * (360.0 * x * x - 48.0);
        let p = observed_order(Order::Fourth, &u, &au);
        prop_assert!((p - 2.0).abs() < 0.2, "observed order {}", p);
    }

    #[test]
    fn equilibria_are_symmetric(order in order_strategy(), eps in 0.02f64..0.2, s_max in 0.1f64..1.0) {
        let solver = EquilibriumSolver::new(eps, 4, order, 257).unwrap();
        let mut opts = TraceOptions::new(s_max, 0.05);
        opts.keep_fields = true;
        let b = solver.trace(&opts).unwrap();
        prop_assert!(b.points.len() > 2);
        for p in &b.points {
            let f = p.field.as_ref().unwrap();
            prop_assert!(f.asymmetry() < 1e-8, "asymmetry {} at s = {}", f.asymmetry(), p.norm_sq);
        }
    }

    #[test]
    fn energy_is_even_in_x(order in order_strategy(), a in -0.5f64..0.5, b in -0.3f64..0.3) {
        let g = Grid::new(129).unwrap();
        let p = ModelParams::new(3.0, 0.05, 4, order).unwrap();
        let f = Field::from_fn(g, |x| (1.0 - x * x).powi(2) * (a + b * x));
        let r = Field::from_fn(g, |x| (1.0 - x * x).powi(2) * (a - b * x));
        let (e1, e2) = (energy(&f, &p).unwrap(), energy(&r, &p).unwrap());
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.abs().max(1.0));
    }

    #[test]
    fn regularized_length_tends_to_classical(alpha in 0.1f64..0.95) {
        let a = l_eps(alpha, 1e-4, 4).unwrap();
        let b = l0(alpha).unwrap();
        prop_assert!((a - b).abs() < 1e-6 * b.max(1e-3));
    }

    #[test]
    fn farfield_first_integral_decays(
        lambda in 1.0f64..80.0,
        m in 3u32..6,
        k in prop::collection::vec(-2.0f64..2.0, 12),
    ) {
        let mut c = FarFieldCoeffs::new(lambda, m);
        c.c0 = k[0]; c.d0 = k[1]; c.a1 = k[2]; c.c1 = k[3]; c.d1 = k[4]; c.g1 = k[5];
        c.gamma1 = k[6]; c.a2 = k[7]; c.c2 = k[8]; c.d2 = k[9]; c.gamma2 = k[10]; c.g2 = k[11];
        // once scaled by ξ⁴ the remainder is a quadratic in ln ξ up to O(ln² ξ/ξ)
        let xs = [20.0f64, 40.0, 80.0, 160.0];
        let r: Vec<[f64; 3]> = xs.iter().map(|&x| first_integral_orders(&c, x).map(|v| v * x.powi(4))).collect();
        for j in 0..3 {
            let (t, y): (Vec<f64>, Vec<f64>) = (0..3).map(|i| (xs[i].ln(), r[i][j])).unzip();
            // Lagrange extrapolation in t = ln ξ
            let t3 = xs[3].ln();
            let pred: f64 = (0..3)
                .map(|i| {
                    let w: f64 = (0..3).filter(|&k| k != i).map(|k| (t3 - t[k]) / (t[i] - t[k])).product();
                    w * y[i]
                })
                .sum();
            let scale = y.iter().fold(r[3][j].abs(), |a, v| a.max(v.abs()));
            let floor = 1e-9 * xs[3].powi(4);
            prop_assert!((pred - r[3][j]).abs() <= 0.1 * scale + floor,
                "order {}: xi^4 I = {:?}, predicted {} at 160", j, r.iter().map(|v| v[j]).collect::<Vec<_>>(), pred);
        }
    }
}

#[test]
fn contact_point_of_double_well() {
    let g = Grid::new(2001).unwrap();
    let f = Field::from_fn(g, |x| (x * x - 0.64).powi(2) - 1.0);
    let xc = contact_point_from_field(&f, Order::Fourth).unwrap();
    assert!((xc - 0.8).abs() < 1e-5, "x_c = {xc}");
}
