use multiree_core::energy::{
    cb_energy, cb_finite_dim, gibbs_state, max_entropy_f, HamiltonianSpec, Oscillator,
};
use multiree_core::*;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn tri() -> SubsystemLayout {
    SubsystemLayout::new(vec![2, 3, 2]).unwrap()
}

fn rel(rho: &HermitianOperator, sigma: &HermitianOperator) -> f64 {
    relative_entropy(rho, sigma).unwrap().to_f64()
}

fn random_projector(s: &mut Sampler, dim: usize, rank: usize) -> HermitianOperator {
    let u = s.unitary(dim);
    let mut p = HermitianOperator::zeros(dim);
    for j in 0..rank {
        p.axpy(1.0, &HermitianOperator::projector(&u.column(j)));
    }
    p
}

fn full_rank(layout: &SubsystemLayout, seed: u64) -> HermitianOperator {
    random_density(layout, layout.total_dim(), seed).unwrap()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn partial_trace_composes(seed in any::<u64>()) {
        let layout = tri();
        let rho = random_density(&layout, 1 + (seed % 12) as usize, seed).unwrap();
        let ab = partial_trace(&rho, &layout, &[0, 1]).unwrap();
        let a1 = partial_trace(&ab, &layout.restrict(&[0, 1]), &[0]).unwrap();
        let a2 = partial_trace(&rho, &layout, &[0]).unwrap();
        prop_assert!(a1.sub(&a2).matrix().max_abs() < 1e-12);
        prop_assert!((ab.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..9) {
        let mut s = Sampler::new(seed);
        let m = s.density(n, n).unwrap().scale(3.0).sub(&HermitianOperator::identity(n));
        let e = hermitian_eig(&m);
        let v = &e.vectors;
        prop_assert!(v.adjoint_matmul(v).sub(&CMatrix::identity(n)).max_abs() <= 1e-9);
        let norm = m.matrix().frobenius_norm();
        prop_assert!(e.with_diagonal(&e.values).sub(&m).matrix().max_abs() <= 1e-9 * norm.max(1.0));
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn schmidt_matches_reduced_spectrum(seed in any::<u64>(), cut in 1usize..3) {
        let layout = tri();
        let psi = random_pure(&layout, seed);
        let sd = schmidt_decompose(&psi, &layout, cut).unwrap();
        let keep: Vec<usize> = (0..cut).collect();
        let reduced = partial_trace(&psi.density(), &layout, &keep).unwrap();
        let e = reduced.eig();
        for (k, c) in sd.coefficients.iter().enumerate() {
            prop_assert!((c - e.values[k].max(0.0).sqrt()).abs() <= 1e-8);
        }
    }

    #[test]
    fn trace_distance_triangle(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let [a, b, c] = [1, 2, 4].map(|k| s.density(4, k).unwrap());
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
    }

    #[test]
    fn joint_convexity(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let [r1, r2] = [0, 1].map(|_| s.density(4, 2).unwrap());
        let [s1, s2] = [0, 1].map(|_| s.density(4, 4).unwrap());
        let lhs = rel(&r1.mix(0.5, &r2), &s1.mix(0.5, &s2));
        prop_assert!(lhs <= 0.5 * rel(&r1, &s1) + 0.5 * rel(&r2, &s2) + 1e-10);
    }

    #[test]
    fn data_processing_under_instruments(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let rho = s.density(6, 1 + (seed % 6) as usize).unwrap();
        let sigma = s.density(6, 6).unwrap();
        let p = random_projector(&mut s, 6, 1 + (seed % 5) as usize);
        let q = HermitianOperator::identity(6).sub(&p);
        let mut lhs = 0.0;
        for proj in [&p, &q] {
            let a = rho.conjugate(proj.matrix());
            let b = sigma.conjugate(proj.matrix());
            let (pa, pb) = (a.trace(), b.trace());
            if pa > 1e-14 {
                lhs += pa * rel(&a.scale(1.0 / pa), &b.scale(1.0 / pb));
            }
        }
        prop_assert!(lhs <= rel(&rho, &sigma) + 1e-9);
    }

    #[test]
    fn entropy_concavity_with_correction(seed in any::<u64>(), p in 0.01f64..0.99) {
        let mut s = Sampler::new(seed);
        let a = s.density(5, 2).unwrap();
        let b = s.density(5, 3).unwrap();
        let (ha, hb) = (von_neumann_entropy(&a).unwrap(), von_neumann_entropy(&b).unwrap());
        let mixed = von_neumann_entropy(&a.mix(p, &b)).unwrap();
        prop_assert!(mixed >= p * ha + (1.0 - p) * hb - 1e-10);
        prop_assert!(mixed <= p * ha + (1.0 - p) * hb + binary_entropy(p).unwrap() + 1e-10);
    }

    #[test]
    fn unitary_invariance(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let rho = s.density(4, 3).unwrap();
        let sigma = s.density(4, 4).unwrap();
        let u = sigma.eig().vectors.clone();
        let w = s.unitary(4).matmul(&u);
        let drift = rel(&rho.conjugate(&w), &sigma.conjugate(&w)) - rel(&rho, &sigma);
        prop_assert!(drift.abs() <= 1e-9);
    }

    #[test]
    fn truncation_bounds(seed in any::<u64>(), r in 1usize..4) {
        let layout = SubsystemLayout::uniform(3, 3).unwrap();
        let rho = random_density(&layout, 1 + (seed % 27) as usize, seed).unwrap();
        for mask in 1u32..8 {
            let subset: Vec<usize> = (0..3).filter(|k| mask & (1 << k) != 0).collect();
            let t = approx_map(&rho, &layout, &subset, r).unwrap();
            prop_assert!(t.c_r >= 1.0 - t.delta_r * t.delta_r - 1e-9);
            prop_assert!(trace_distance(&rho, &t.state).unwrap() <= (1.0 - t.c_r).max(0.0).sqrt() + 1e-9);
            for s in 0..3 {
                let a = partial_trace(&rho, &layout, &[s]).unwrap();
                let b = partial_trace(&t.state, &layout, &[s]).unwrap().scale(t.c_r);
                prop_assert!(a.sub(&b).min_eigenvalue() >= -1e-9);
            }
        }
    }

    #[test]
    fn assemble_is_linear(seed in any::<u64>()) {
        let layout = tri();
        let a = random_separable(&layout, 3, seed).unwrap();
        let b = random_separable(&layout, 2, seed ^ 1).unwrap();
        let joined = a.mix(0.5, &b).unwrap().assemble();
        let direct = a.assemble().mix(0.5, &b.assemble());
        prop_assert!(joined.sub(&direct).matrix().max_abs() <= 1e-12);
    }

    #[test]
    fn lemma_omega_matches_marginals(seed in any::<u64>(), which in 0usize..3) {
        let layout = [vec![2, 2], vec![2, 2, 2], vec![2, 3, 2]][which].clone();
        let layout = SubsystemLayout::new(layout).unwrap();
        let omega = random_pure(&layout, seed);
        let sigma = lemma_omega_state(&omega, &layout, None).unwrap().assemble();
        let rho = omega.density();
        let n = layout.parties();
        let mut hsum = 0.0;
        for s in 0..n {
            let a = partial_trace(&rho, &layout, &[s]).unwrap();
            let b = partial_trace(&sigma, &layout, &[s]).unwrap();
            prop_assert!(trace_distance(&a, &b).unwrap() <= 1e-8);
            if s + 1 < n {
                hsum += von_neumann_entropy(&a).unwrap();
            }
        }
        prop_assert!(rel(&rho, &sigma) <= hsum + 1e-8);
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn qmi_truncation_is_dominated(seed in any::<u64>()) {
        let layout = SubsystemLayout::uniform(3, 3).unwrap();
        let rho = full_rank(&layout, seed);
        let t = truncation_experiment(&rho, &layout, &[0, 1, 2], &Functional::Qmi, &[1, 2, 3]).unwrap();
        for row in t.rows.iter().filter(|r| r.valid_regime) {
            prop_assert!((row.value - t.reference).abs() <= row.bound.unwrap());
        }
    }

    #[test]
    fn gibbs_residual(e in 0.05f64..0.95) {
        for h in [vec![0.0, 1.0], vec![0.0, 0.5, 2.0]] {
            let h = HamiltonianSpec::new(h).unwrap();
            let g = gibbs_state(&h, e).unwrap();
            if !g.clamped {
                prop_assert!((g.mean_energy(&h) - e).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn sum_hamiltonian_caps_marginal_entropies(seed in any::<u64>()) {
        let layout = SubsystemLayout::uniform(3, 2).unwrap();
        let rho = full_rank(&layout, seed);
        let h = HamiltonianSpec::new(vec![0.0, 1.0, 2.0]).unwrap();
        let margs = marginals(&rho, &layout).unwrap();
        let diag_energy = |m: &HermitianOperator| (0..3).map(|k| m.get(k, k).re * k as f64).sum::<f64>();
        let total: f64 = margs.iter().map(diag_energy).sum();
        let (sum, _) = HamiltonianSpec::sum(&[h.clone(), h], 100).unwrap();
        let entropies: f64 = margs.iter().map(|m| von_neumann_entropy(m).unwrap()).sum();
        prop_assert!(max_entropy_f(&sum, total).unwrap() >= entropies - 1e-9);
    }
}

#[test]
fn f_concavity_on_grids() {
    let osc = HamiltonianSpec::oscillator(Oscillator::new(vec![1.0], 1.0).unwrap(), 60).unwrap();
    let specs = [
        HamiltonianSpec::new(vec![0.0, 1.0]).unwrap(),
        HamiltonianSpec::new(vec![0.0, 1.0, 2.0]).unwrap(),
        osc,
    ];
    for h in &specs {
        let e0 = h.ground_energy();
        let top = e0 + 0.45 * (h.uniform_mean() - e0).min(10.0);
        let step = (top - e0) / 40.0;
        let v: Vec<f64> = (1..=40)
            .map(|k| max_entropy_f(h, e0 + k as f64 * step).unwrap())
            .collect();
        for w in v.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-8);
            assert!(w[1] >= w[0]);
        }
    }
}

#[test]
fn continuity_bounds_are_monotone() {
    let qubit = HamiltonianSpec::new(vec![0.0, 1.0]).unwrap();
    let grid: Vec<f64> = (1..=50).map(|k| k as f64 / 50.0).collect();
    let fd: Vec<f64> = grid
        .iter()
        .map(|&e| cb_finite_dim(e, &[2]).unwrap())
        .collect();
    let ce: Vec<f64> = grid
        .iter()
        .map(|&e| {
            cb_energy(e, 0.75, 1, 2, std::slice::from_ref(&qubit))
                .unwrap()
                .value
        })
        .collect();
    for v in [fd, ce] {
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
