use gkls::bath::{bose_einstein, gamma_one_sided, jc_kinetic_coefficients, BathSpec, SpectralDensity};
use gkls::eigenops::static_eigenoperators;
use gkls::gkls::{
    build_dissipator, check_time_translation, choi_min_eigenvalue, detailed_balance_rates, fixed_point, gibbs_state,
    liouvillian, DissipatorSpec,
};
use gkls::jc::{jc_eigenoperators, jc_kraus_operators, jc_kraus_reduce, touchard_asymptotic, touchard_scaled, JCParams};
use gkls::operator::{uhlmann_fidelity, unvec, vec, DensityMatrix, Ket, Operator, Superoperator, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    Operator::from_matrix(random_matrix(rng, d)).unwrap().hermitian_part()
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let x = random_matrix(rng, d);
    let m = &x * x.adjoint();
    let tr = m.trace();
    DensityMatrix::new(Operator::from_matrix(m / tr).unwrap()).unwrap()
}

/// Thermal generator built from the Bohr eigenoperators of a random Hamiltonian.
fn thermal_generator(seed: u64, d: usize, beta: f64) -> (Operator, DissipatorSpec, Superoperator) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian(&mut rng, d);
    let set = static_eigenoperators(&h).unwrap();
    let mut spec = DissipatorSpec::new(d);
    let mut freqs = Vec::new();
    let mut ks = Vec::new();
    for (k, t) in set.transitions.iter().enumerate() {
        if let Some((n, m)) = t {
            if n < m {
                freqs.push(set.freqs[k]);
                ks.push(k);
            }
        }
    }
    let base: Vec<f64> = ks.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    for (&k, (r, rr)) in ks.iter().zip(detailed_balance_rates(&freqs, beta, &base).unwrap()) {
        spec = spec.channel(set.ops[k].clone(), r, rr);
    }
    let l = liouvillian(&h, &build_dissipator(&spec).unwrap()).unwrap();
    (h, spec, l)
}

fn params() -> impl Strategy<Value = JCParams> {
    (0.5f64..2.0, -0.4f64..0.4, 0.02f64..0.3, 0.5f64..4.0, -3.0f64..3.0).prop_map(|(wc, delta, g, a, phi)| {
        JCParams::new(wc, wc + delta, g, C64::from_polar(a, phi)).unwrap()
    })
}

fn bath() -> impl Strategy<Value = BathSpec> {
    (0.0f64..3.0, 0.001f64..0.1, 2.0f64..20.0, 0usize..3).prop_map(|(t, eta, cutoff, kind)| {
        let sd = match kind {
            0 => SpectralDensity::Ohmic { eta, cutoff },
            1 => SpectralDensity::Cubic { eta, cutoff },
            _ => SpectralDensity::Flat { eta, cutoff },
        };
        BathSpec::new(t, sd).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vec_unvec_round_trip(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Operator::from_matrix(random_matrix(&mut rng, d)).unwrap();
        let back = unvec(&vec(&a)).unwrap();
        prop_assert_eq!(back.matrix(), a.matrix());
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(seed in any::<u64>(), d in 2usize..6, beta in 0.1f64..3.0, t in 0.05f64..3.0) {
        let (_, _, l) = thermal_generator(seed, d, beta);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let rho = random_state(&mut rng, d);
        let out = l.exp(t).apply(rho.op()).unwrap();
        prop_assert!((out.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(out.hermiticity_error() < 1e-10);
        prop_assert!(l.trace_annihilation_error() < 1e-10);
    }

    #[test]
    fn semigroup_composition(seed in any::<u64>(), d in 2usize..5, t in 0.05f64..2.0, s in 0.05f64..2.0) {
        let (_, _, l) = thermal_generator(seed, d, 1.0);
        let lhs = l.exp(t).compose(&l.exp(s));
        prop_assert!(lhs.max_diff(&l.exp(t + s)) < 1e-10);
    }

    #[test]
    fn thermal_maps_are_cp_and_covariant(seed in any::<u64>(), d in 2usize..5, t in 0.05f64..2.0, s in 0.1f64..3.0) {
        let (h, _, l) = thermal_generator(seed, d, 0.7);
        prop_assert!(choi_min_eigenvalue(&l.exp(t)) >= -1e-8);
        prop_assert!(check_time_translation(&l, &h, t, s).unwrap() < 1e-9);
    }

    #[test]
    fn detailed_balance_fixed_point_is_gibbs(seed in any::<u64>(), d in 2usize..6, beta in 0.1f64..3.0) {
        let (h, spec, _) = thermal_generator(seed, d, beta);
        let set = static_eigenoperators(&h).unwrap();
        let fp = fixed_point(&spec, &set).unwrap();
        prop_assert!(fp.state.op().max_diff(gibbs_state(&h, beta).unwrap().op()) < 1e-9);
    }

    #[test]
    fn detailed_balance_ratio(freqs in prop::collection::vec(0.01f64..5.0, 1..6), beta in 0.05f64..5.0) {
        let base = vec![0.3; freqs.len()];
        for (w, (r, rr)) in freqs.iter().zip(detailed_balance_rates(&freqs, beta, &base).unwrap()) {
            prop_assert!(r >= 0.0 && rr >= 0.0);
            prop_assert!((rr / r - (-beta * w).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn kms_ratio(w in 0.01f64..10.0, b in bath()) {
        prop_assume!(b.temperature > 0.05);
        let up = gamma_one_sided(w, &b);
        let down = gamma_one_sided(-w, &b);
        let ratio = (-w / b.temperature).exp();
        prop_assert!((down - ratio * up).abs() <= 1e-12 * up.max(1e-300));
        prop_assert!(bose_einstein(w, b.temperature).unwrap() >= 0.0);
    }

    #[test]
    fn kinetic_coefficients_nonnegative(p in params(), b in bath()) {
        let k = jc_kinetic_coefficients(&p, &b).unwrap();
        for x in [k.gamma0, k.gamma_minus, k.gamma_plus, k.s_plus, k.s_minus, k.k0] {
            prop_assert!(x >= 0.0);
        }
        prop_assert!((k.s_plus + k.s_minus + k.k0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenoperators_nilpotent_and_normalized(p in params(), t in 0.0f64..50.0) {
        let e = jc_eigenoperators(&p).unwrap();
        for f in [e.f_plus(t), e.f_minus(t)] {
            let sq = Operator::from_matrix(f.matrix() * f.matrix()).unwrap();
            prop_assert!(sq.max_abs() < 1e-12);
            prop_assert!((f.hs_norm() - 1.0).abs() < 1e-12);
        }
        prop_assert!((e.f0(t).hs_norm() - 1.0).abs() < 1e-12);
        prop_assert!(e.f_plus(t).max_diff(&e.f_minus(t).adjoint()) < 1e-12);
    }

    #[test]
    fn kraus_completeness(p in params(), t in 0.0f64..40.0) {
        let k = jc_kraus_operators(&p, t).unwrap();
        prop_assert!(k.completeness_deficit < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(t.to_bits());
        let rho = jc_kraus_reduce(&random_state(&mut rng, 2), &p, t).unwrap();
        prop_assert!((rho.op().trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fidelity_bounds(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, d);
        let b = random_state(&mut rng, d);
        let f = uhlmann_fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - uhlmann_fidelity(&b, &a).unwrap()).abs() < 1e-8);
        prop_assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_state_fidelity_is_overlap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ket = |r: &mut ChaCha8Rng| {
            let v: Vec<C64> = (0..2).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            Ket::from_vec(v.into_iter().map(|z| z / n).collect())
        };
        let (a, b) = (ket(&mut rng), ket(&mut rng));
        let overlap = a.dotc(&b).norm_sqr();
        let f = uhlmann_fidelity(&DensityMatrix::from_ket(&a).unwrap(), &DensityMatrix::from_ket(&b).unwrap()).unwrap();
        prop_assert!((f - overlap).abs() < 1e-10);
    }

    #[test]
    fn touchard_leading_order(j in 0u32..8, x in 1e3f64..1e5) {
        // next term is S(j, j-2)/x², bounded by j⁴/(8x²)
        let exact = touchard_scaled(j, x).unwrap();
        let approx = touchard_asymptotic(j, x).unwrap() / x.powi(j as i32);
        let jf = j as f64;
        prop_assert!((exact - approx).abs() <= jf.powi(4) / (8.0 * x * x) + 1e-13);
    }
}
