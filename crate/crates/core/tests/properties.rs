use cascade_core::analysis::{schmidt_entropy, trace_distance};
use cascade_core::hilbert::{annihilation, coherent_state, embed, partial_trace, qubit_state, Factor, FockSpec, Layout, Operator, PureState, Qubit};
use cascade_core::liouvillian::{build_total, regroup, CouplingConfig, Superoperator};
use cascade_core::scalar::{c, CMatrix, CVector, C};
use cascade_core::sources::{build_l_s, SourceModel};
use cascade_core::DensityOperator;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

fn matrix(dim: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| CMatrix::from_vec(dim, dim, v))
}

fn config() -> impl Strategy<Value = CouplingConfig<f64>> {
    (0.0..2.0f64, 0.0..2.0f64, 0.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(gs, gtf, gts, d)| CouplingConfig::new(gs, gtf, gts, d).unwrap())
}

fn density(dim: usize) -> impl Strategy<Value = CMatrix<f64>> {
    matrix(dim).prop_map(|g| {
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        m.map(|z| z / tr)
    })
}

fn max_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn generator(cfg: &CouplingConfig<f64>, spec: FockSpec, eps: C<f64>) -> Superoperator<f64> {
    let model = SourceModel::CoherentDrive { epsilon: eps, initial_amplitude: c(0.0, 0.0) };
    regroup(&build_l_s(&model, spec).unwrap(), cfg, spec).unwrap().total()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regrouping_preserves_the_generator(cfg in config(), n_max in 1usize..5, eps in complex()) {
        let spec = FockSpec::new(n_max).unwrap();
        let model = SourceModel::CoherentDrive { epsilon: eps, initial_amplitude: c(0.0, 0.0) };
        let l_s = build_l_s(&model, spec).unwrap();
        let a = build_total(&l_s, &cfg, spec).unwrap().to_matrix().unwrap();
        let b = regroup(&l_s, &cfg, spec).unwrap().total().to_matrix().unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn generator_output_is_traceless_and_hermitian(cfg in config(), eps in complex(), rho in density(8)) {
        let spec = FockSpec::new(3).unwrap();
        let out = generator(&cfg, spec, eps).apply(&rho).unwrap();
        prop_assert!(out.trace().norm() < 1e-12);
        prop_assert!(max_diff(&out, &out.adjoint()) < 1e-12);
    }

    #[test]
    fn apply_matches_column_stacked_matrix(cfg in config(), eps in complex(), rho in matrix(6)) {
        let spec = FockSpec::new(2).unwrap();
        let l = generator(&cfg, spec, eps);
        let direct = l.apply(&rho).unwrap();
        let vec = CVector::from_column_slice(rho.as_slice());
        let stacked = l.to_matrix().unwrap() * vec;
        let back = CMatrix::from_column_slice(6, 6, stacked.as_slice());
        prop_assert!(max_diff(&direct, &back) < 1e-12);
        let compiled = l.compile().apply(&rho);
        prop_assert!(max_diff(&direct, &compiled) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(src in density(4), tgt in density(2)) {
        let s = DensityOperator::unchecked(src.clone(), Layout::Source);
        let t = DensityOperator::unchecked(tgt.clone(), Layout::Target);
        let rho = DensityOperator::tensor(&s, &t).unwrap();
        prop_assert!(max_diff(partial_trace(&rho, Factor::Source).unwrap().matrix(), &src) < 1e-13);
        prop_assert!(max_diff(partial_trace(&rho, Factor::Target).unwrap().matrix(), &tgt) < 1e-13);
    }

    #[test]
    fn embedded_factors_commute(a in matrix(5), b in matrix(2)) {
        let spec = FockSpec::new(4).unwrap();
        let ea = embed(&Operator::new(a, "A").unwrap(), Factor::Source, spec).unwrap();
        let eb = embed(&Operator::new(b, "B").unwrap(), Factor::Target, spec).unwrap();
        prop_assert!(ea.commutator(&eb).matrix().iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn coherent_states_are_eigenstates(alpha in complex()) {
        let spec = FockSpec::new(25).unwrap();
        let psi = coherent_state(alpha, spec);
        prop_assert!((psi.norm() - 1.0).abs() < 1e-13);
        let a = annihilation::<f64>(spec);
        let residual = (a.apply(psi.amplitudes()) - psi.amplitudes().map(|z| z * alpha)).norm();
        prop_assert!(residual < 1e-6);
    }

    #[test]
    fn product_states_have_no_entanglement(alpha in complex(), x in 0.0..1.0f64, phi in 0.0..std::f64::consts::TAU) {
        let spec = FockSpec::new(12).unwrap();
        let q = PureState::new(CVector::from_vec(vec![c(x.sqrt(), 0.0), c((1.0 - x).sqrt() * phi.cos(), (1.0 - x).sqrt() * phi.sin())])).unwrap();
        let psi = PureState::product(&coherent_state(alpha, spec), &q);
        prop_assert!(schmidt_entropy(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn trace_distance_is_a_bounded_metric(a in density(4), b in density(4)) {
        let ra = DensityOperator::unchecked(a, Layout::Composite);
        let rb = DensityOperator::unchecked(b, Layout::Composite);
        let d = trace_distance(&ra, &rb).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - trace_distance(&rb, &ra).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&ra, &ra).unwrap() < 1e-12);
    }
}

#[test]
fn qubit_basis_is_orthonormal() {
    let g = qubit_state::<f64>(Qubit::Ground);
    let e = qubit_state::<f64>(Qubit::Excited);
    assert_eq!(g.inner(&e).norm(), 0.0);
    assert_eq!(g.inner(&g).norm(), 1.0);
}
