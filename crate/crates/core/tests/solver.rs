use multiree_core::*;

const LN2: f64 = core::f64::consts::LN_2;

fn opts(seed: u64) -> SolveOptions {
    SolveOptions {
        seed,
        ..SolveOptions::default()
    }
}

fn bell_basis() -> [PureState; 4] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    [
        [s, 0.0, 0.0, s],
        [s, 0.0, 0.0, -s],
        [0.0, s, s, 0.0],
        [0.0, s, -s, 0.0],
    ]
    .map(|a| PureState::new(a.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap())
}

fn bell_diagonal(w: [f64; 4]) -> HermitianOperator {
    let mut rho = HermitianOperator::zeros(4);
    for (p, b) in w.iter().zip(bell_basis()) {
        rho.axpy(*p, &b.density());
    }
    rho
}

fn h2(p: f64) -> f64 {
    binary_entropy(p).unwrap()
}

#[test]
fn certificate_brackets_known_values() {
    let qubits = SubsystemLayout::uniform(2, 2).unwrap();
    let mut cases = vec![(bell_diagonal([1.0, 0.0, 0.0, 0.0]), LN2)];
    for top in [0.5, 0.6, 0.7, 0.8, 0.9, 0.95] {
        let rest = (1.0 - top) / 3.0;
        cases.push((bell_diagonal([top, rest, rest, rest]), LN2 - h2(top)));
        cases.push((bell_diagonal([rest, top, rest, rest]), LN2 - h2(top)));
    }
    for (k, (rho, known)) in cases.iter().enumerate() {
        let r = estimate_ree(rho, &qubits, &opts(k as u64)).unwrap();
        assert!(
            r.lower() - 1e-9 <= *known && *known <= r.value + 1e-9,
            "{k}: {known} vs [{}, {}]",
            r.lower(),
            r.value
        );
    }
    let tri = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
    for seed in 0..10 {
        let rho = random_separable(&tri, 4, seed).unwrap().assemble();
        let r = estimate_ree(&rho, &tri, &opts(seed)).unwrap();
        assert!(r.lower() <= 1e-9 && r.value >= -1e-9);
    }
}

#[test]
fn two_copies_of_bell() {
    let bell = bell_basis()[0].density();
    let two = tensor(&bell, &bell);
    let grouped = SubsystemLayout::new(vec![2, 2, 2, 2]).unwrap();
    // reorder A1 B1 A2 B2 into A1 A2 | B1 B2
    let mut swap = CMatrix::zeros(16, 16);
    for x in 0..16 {
        let d = grouped.digits(x);
        let y = grouped.flat_index(&[d[0], d[2], d[1], d[3]]);
        swap.set(y, x, Complex64::new(1.0, 0.0));
    }
    let rho = two.conjugate(&swap);
    let cut = SubsystemLayout::new(vec![4, 4]).unwrap();
    let r = estimate_ree(&rho, &cut, &opts(0)).unwrap();
    assert!((r.value - 2.0 * LN2).abs() <= 2e-3, "{}", r.value);
}

#[test]
fn convexity_on_random_triples() {
    let qubits = SubsystemLayout::uniform(2, 2).unwrap();
    let o = opts(0);
    for k in 0..100u64 {
        let p = 0.1 * (1 + k % 9) as f64;
        let a = random_density(&qubits, 1 + (k % 4) as usize, 3 * k).unwrap();
        let b = random_density(&qubits, 1 + ((k + 1) % 4) as usize, 3 * k + 1).unwrap();
        let mixed = a.mix(p, &b);
        let (ea, eb, em) = (
            estimate_ree(&a, &qubits, &o).unwrap(),
            estimate_ree(&b, &qubits, &o).unwrap(),
            estimate_ree(&mixed, &qubits, &o).unwrap(),
        );
        let lhs = p * ea.lower() + (1.0 - p) * eb.lower();
        assert!(lhs <= em.value + h2(p) + 1e-9, "RE-LAA {k}");
        assert!(
            em.value <= p * ea.value + (1.0 - p) * eb.value + 2.0 * o.tol,
            "convexity {k}"
        );
    }
}

#[test]
fn local_unitary_invariance() {
    let layout = SubsystemLayout::new(vec![2, 3]).unwrap();
    let o = opts(0);
    let mut s = Sampler::new(11);
    for seed in 0..20 {
        let rho = random_density(&layout, 1 + seed as usize % 6, seed).unwrap();
        let u = s.unitary(2).kron(&CMatrix::identity(3));
        let base = estimate_ree(&rho, &layout, &o).unwrap();
        let moved = estimate_ree(&rho.conjugate(&u), &layout, &o).unwrap();
        assert!((base.value - moved.value).abs() <= 2.0 * o.tol, "{seed}");
    }
}

#[test]
fn lemma_omega_is_feasible() {
    let orders: [&[usize]; 8] = [
        &[0, 1],
        &[1, 0],
        &[0, 1, 2],
        &[0, 2, 1],
        &[1, 0, 2],
        &[1, 2, 0],
        &[2, 0, 1],
        &[2, 1, 0],
    ];
    for seed in 0..100u64 {
        let layout = SubsystemLayout::new(if seed % 2 == 0 {
            vec![2, 2]
        } else {
            vec![2, 2, 2]
        })
        .unwrap();
        let omega = random_pure(&layout, seed);
        let rho = omega.density();
        let r = estimate_ree(&rho, &layout, &opts(seed)).unwrap();
        for order in orders.iter().filter(|o| o.len() == layout.parties()) {
            let sigma = lemma_omega_state(&omega, &layout, Some(order))
                .unwrap()
                .assemble();
            let h = relative_entropy(&rho, &sigma).unwrap().to_f64();
            assert!(
                h >= r.lower() - 1e-9,
                "{seed} {order:?}: {h} < {}",
                r.lower()
            );
        }
    }
}

#[test]
fn upper_bounds_hold_on_ghz() {
    let layout = SubsystemLayout::uniform(2, 3).unwrap();
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(s, 0.0);
    amps[7] = Complex64::new(s, 0.0);
    let rho = PureState::new(amps).unwrap().density();
    let report = audit_state(&rho, &layout, &AuditOptions::default()).unwrap();
    assert!(report.all_pass(), "{report:?}");
    assert!((report.value - LN2).abs() <= 2e-3);
}
