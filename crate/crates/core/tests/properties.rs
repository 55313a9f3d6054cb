use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qcompat::algebra::{make_preset, structure_constants_by_solve, StructureConstants};
use qcompat::bound::{char_poly_coeffs, rank_antisymmetric, XMatrix, RANK_TOL};
use qcompat::estimation::{sld_eigen, state_and_derivatives, symmetrized_product};
use qcompat::model::{parse_expression, Expr, Func};
use qcompat::state::{assemble_derivative, assemble_rho, decompose};
use qcompat::{Convention, Model};

fn names() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..50).prop_map(|n| Expr::Num(n as f64 / 4.0)),
        (0usize..2).prop_map(Expr::Param),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -3i32..4).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
            (inner.clone(), 0usize..3).prop_map(|(a, k)| {
                let f = [Func::Sin, Func::Cos, Func::Exp][k];
                Expr::Call(f, Box::new(a))
            }),
        ]
    })
}

fn xstate_model() -> Model {
    let gs = Arc::new(make_preset("xstate2q", 4).unwrap());
    Model::parse(
        gs,
        vec!["x1".into(), "x2".into(), "x3".into()],
        &["0.2*sin(x1)", "0.1*x2*x3", "0.3*cos(x1+x2)", "0.1*x3^2", "0.15*sin(x2)", "0.05*x1*x3", "0.1*cos(x3)"],
        Convention::Internal,
    )
    .unwrap()
}

fn beta_strategy(g: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_fixpoint(e in expr_strategy()) {
        let text = e.to_text(&names());
        let parsed = parse_expression(&text, &names()).unwrap();
        prop_assert_eq!(parsed.to_text(&names()), text);
        let x = [0.37, -1.21];
        match (e.eval(&x), parsed.eval(&x)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "evaluation disagrees: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn dual_value_matches_plain(e in expr_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        if let (Ok(v), Ok(d)) = (e.eval(&[a, b]), e.eval_dual(&[a, b])) {
            prop_assert_eq!(v.to_bits(), d.value.to_bits());
        }
    }

    #[test]
    fn jacobian_matches_finite_differences(x in proptest::collection::vec(-1.5f64..1.5, 3)) {
        let m = xstate_model();
        let jac = m.eval_beta_jacobian(&x).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let bp = m.eval_beta(&xp).unwrap();
            let bm = m.eval_beta(&xm).unwrap();
            for a in 0..7 {
                let fd = (bp[a] - bm[a]) / (2.0 * h);
                prop_assert!((fd - jac[(a, i)]).abs() < 1e-7, "a={} i={} fd={} ad={}", a, i, fd, jac[(a, i)]);
            }
        }
    }

    #[test]
    fn state_derivative_is_linear(d1 in beta_strategy(7), d2 in beta_strategy(7), s in -3.0f64..3.0) {
        let gs = make_preset("xstate2q", 4).unwrap();
        let mix: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| a + s * b).collect();
        let lhs = assemble_derivative(&gs, &mix).unwrap();
        let rhs = assemble_derivative(&gs, &d1).unwrap().matrix() + assemble_derivative(&gs, &d2).unwrap().matrix() * nalgebra::Complex::new(s, 0.0);
        prop_assert!((lhs.matrix() - rhs).norm() < 1e-13);
    }

    #[test]
    fn assemble_decompose_round_trip(beta in beta_strategy(8)) {
        let gs = make_preset("gellmann", 3).unwrap();
        let rho = assemble_rho(&gs, &beta).unwrap();
        let d = decompose(&gs, rho.matrix(), 1e-10).unwrap();
        for (a, b) in d.beta.iter().zip(&beta) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(d.residual < 1e-12);
    }

    #[test]
    fn sld_solves_lyapunov(x in proptest::collection::vec(-1.5f64..1.5, 3)) {
        let m = xstate_model();
        let (rho, drhos) = state_and_derivatives(&m, &x).unwrap();
        prop_assume!(rho.min_eigenvalue() > 1e-6);
        for d in &drhos {
            let s = sld_eigen(&rho, d, 1e-10, 1e-10).unwrap();
            let err = (symmetrized_product(&rho, &s.l) - d.matrix()).norm();
            prop_assert!(err <= 1e-10 * d.matrix().norm().max(1.0));
            prop_assert!(s.residual <= 1e-10 * d.matrix().norm().max(1.0));
        }
    }

    #[test]
    fn x_rank_is_scale_invariant(beta in beta_strategy(7), s in prop_oneof![1e-6f64..1e-3, 1e3f64..1e6]) {
        let gs = make_preset("xstate2q", 4).unwrap();
        let r = XMatrix::new(gs.f(), &beta, RANK_TOL).unwrap().rank();
        let scaled: Vec<f64> = beta.iter().map(|b| b * s).collect();
        prop_assert_eq!(XMatrix::new(gs.f(), &scaled, RANK_TOL).unwrap().rank(), r);
        prop_assert_eq!(r % 2, 0);
    }

    #[test]
    fn char_poly_odd_coefficients_vanish(entries in proptest::collection::vec(-2.0f64..2.0, 21)) {
        let mut x = DMatrix::zeros(7, 7);
        let mut k = 0;
        for a in 0..7 {
            for b in (a + 1)..7 {
                x[(a, b)] = entries[k];
                x[(b, a)] = -entries[k];
                k += 1;
            }
        }
        let cp = char_poly_coeffs(&x);
        let scale = x.norm().max(1.0);
        for (j, c) in cp.coeffs.iter().enumerate() {
            if j % 2 == 1 {
                prop_assert!(c.abs() <= 1e-10 * scale.powi(j as i32), "j={} c={}", j, c);
            }
        }
        prop_assert!(rank_antisymmetric(&x, RANK_TOL).unwrap().rank <= 6);
    }
}

#[test]
fn structure_constants_agree_between_routes() {
    for (name, n) in [("pauli", 2), ("gellmann", 3), ("gellmann", 4), ("xstate2q", 4)] {
        let gs = make_preset(name, n).unwrap();
        let solved = structure_constants_by_solve(gs.generators()).unwrap();
        let g = gs.g();
        for a in 0..g {
            for b in 0..g {
                for k in 0..g {
                    assert!((gs.f().get(a, b, k) - solved.get(a, b, k)).abs() < 1e-12, "{name} {a} {b} {k}");
                }
            }
        }
        assert!(gs.f().jacobi_residual() < 1e-12, "{name}");
        assert!(gs.f().antisymmetry_deviation() < 1e-14, "{name}");
    }
    assert!(StructureConstants::levi_civita().jacobi_residual() == 0.0);
}
