//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use multiree::format::{to_json, SolveResultFile, StateFile, TruncationFile};
use multiree_core::energy::{
    cb_energy, cb_finite_dim, oscillator_f, Oscillator, OscillatorVariant,
};
use multiree_core::*;

/// Tolerances, pinned.
mod tol {
    pub const BELL: f64 = 1e-3;
    pub const BELL_GAP: f64 = 1e-3;
    pub const BELL_SECONDS: f64 = 5.0;
    pub const BELL_DIAGONAL: f64 = 5e-3;
    pub const BELL_DIAGONAL_075: f64 = 0.1308;
    pub const SEPARABLE_VALUE: f64 = 2e-3;
    pub const SEPARABLE_GAP: f64 = 1e-3;
    pub const MARGINALS: f64 = 1e-8;
    pub const LEMMA_BOUND: f64 = 1e-8;
    pub const FEASIBILITY: f64 = 1e-9;
    /// Solver tolerance for the E_R column of the truncation tables.
    pub const TRUNCATION_SOLVER: f64 = 1e-2;
    pub const TRUNCATION_QMI: f64 = 1e-9;
    pub const SLACK: f64 = 1e-9;
    pub const CONTINUITY: f64 = 1e-9;
    pub const CONTINUITY_MINUTES: f64 = 10.0;
    pub const OSCILLATOR: f64 = 1e-6;
    pub const OSCILLATOR_GRID: f64 = 1e-12;
    pub const SOLVER: f64 = 1e-3;
    pub const LOWER_BOUNDS: f64 = 1e-9;
    pub const DATA_PROCESSING: f64 = 1e-9;
}

const LN2: f64 = std::f64::consts::LN_2;

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: String) -> Self {
        Check { pass, detail }
    }
}

fn workdir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn multiree(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multiree"))
        .args(args)
        .output()
        .expect("spawn multiree");
    let stderr = String::from_utf8_lossy(&out.stderr);
    if !stderr.trim().is_empty() {
        eprintln!("{stderr}");
    }
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn write_state(name: &str, layout: &SubsystemLayout, rho: &HermitianOperator) -> String {
    let path = workdir().join(name);
    fs::write(&path, to_json(&StateFile::density(layout, rho))).unwrap();
    path.display().to_string()
}

fn bell_basis() -> [PureState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [s, 0.0, 0.0, s],
        [s, 0.0, 0.0, -s],
        [0.0, s, s, 0.0],
        [0.0, s, -s, 0.0],
    ]
    .map(|a| PureState::new(a.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap())
}

fn bell_diagonal(p: [f64; 4]) -> HermitianOperator {
    let mut rho = HermitianOperator::zeros(4);
    for (w, b) in p.iter().zip(bell_basis()) {
        rho.axpy(*w, &b.density());
    }
    rho
}

fn qubits() -> SubsystemLayout {
    SubsystemLayout::uniform(2, 2).unwrap()
}

fn opts(seed: u64) -> SolveOptions {
    SolveOptions {
        seed,
        ..SolveOptions::default()
    }
}

fn c1_bell() -> Check {
    let bell = bell_basis()[0].density();
    let path = write_state("bell.json", &qubits(), &bell);
    let start = Instant::now();
    let (code, out) = multiree(&["ree", &path, "--layout", "2,2", "--seed", "0"]);
    let secs = start.elapsed().as_secs_f64();
    let r: SolveResultFile = serde_json::from_str(&out).unwrap();
    let err = (r.value - LN2).abs();
    Check::new(
        code == 0 && err <= tol::BELL && r.gap <= tol::BELL_GAP && secs < tol::BELL_SECONDS,
        format!(
            "value {:.6}, |value - ln 2| {err:.1e}, gap {:.1e}, {secs:.2} s",
            r.value, r.gap
        ),
    )
}

/// Brute-force minimum of `H(rho || sigma)` over Bell-diagonal separable
/// `sigma` (weights `k/1000`, each at most one half).
fn bell_diagonal_oracle(p: [f64; 4]) -> f64 {
    const N: usize = 1000;
    let ln: Vec<f64> = (0..=N).map(|k| (k as f64 / N as f64).ln()).collect();
    let neg: f64 = p.iter().map(|x| x * x.ln()).sum();
    let mut best = f64::INFINITY;
    for a in 1..=N / 2 {
        for b in 1..=N / 2 {
            for c in 1..=N / 2 {
                let Some(d) = N.checked_sub(a + b + c) else {
                    break;
                };
                if d == 0 || d > N / 2 {
                    continue;
                }
                let cross = p[0] * ln[a] + p[1] * ln[b] + p[2] * ln[c] + p[3] * ln[d];
                best = best.min(neg - cross);
            }
        }
    }
    best
}

fn c2_bell_diagonal() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, w) in [0.6, 0.75, 0.9].into_iter().enumerate() {
        let rest = (1.0 - w) / 3.0;
        let p = [w, rest, rest, rest];
        let r = estimate_ree(&bell_diagonal(p), &qubits(), &opts(0)).unwrap();
        let oracle = bell_diagonal_oracle(p);
        let err = (r.value - oracle).abs();
        ok &= err <= tol::BELL_DIAGONAL;
        if k == 1 {
            ok &= (r.value - tol::BELL_DIAGONAL_075).abs() <= tol::BELL_DIAGONAL;
        }
        parts.push(format!("w={w}: {:.4} vs oracle {oracle:.4}", r.value));
    }
    Check::new(ok, parts.join(", "))
}

fn c3_separable() -> Check {
    let layout = SubsystemLayout::uniform(3, 2).unwrap();
    let (mut worst_value, mut worst_gap) = (f64::NEG_INFINITY, 0.0f64);
    for seed in 0..50 {
        let rho = random_separable(&layout, 1 + (seed % 9) as usize, 1000 + seed)
            .unwrap()
            .assemble();
        let r = estimate_ree(&rho, &layout, &opts(seed)).unwrap();
        worst_value = worst_value.max(r.value);
        worst_gap = worst_gap.max(r.gap);
    }
    Check::new(
        worst_value <= tol::SEPARABLE_VALUE && worst_gap <= tol::SEPARABLE_GAP,
        format!("max value {worst_value:.1e}, max gap {worst_gap:.1e} over 50 states"),
    )
}

fn c4_lemma_omega() -> Check {
    let (mut dist, mut excess, mut infeasible) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (l, dims) in [vec![2, 2], vec![2, 2, 2], vec![2, 3, 2]]
        .into_iter()
        .enumerate()
    {
        let layout = SubsystemLayout::new(dims).unwrap();
        let n = layout.parties();
        for k in 0..100u64 {
            let seed = 2000 + 100 * l as u64 + k;
            let omega = random_pure(&layout, seed);
            let rho = omega.density();
            let sigma = lemma_omega_state(&omega, &layout, None).unwrap().assemble();
            let mut bound = 0.0;
            for s in 0..n {
                let a = partial_trace(&rho, &layout, &[s]).unwrap();
                let b = partial_trace(&sigma, &layout, &[s]).unwrap();
                dist = dist.max(trace_distance(&a, &b).unwrap());
                if s + 1 < n {
                    bound += von_neumann_entropy(&a).unwrap();
                }
            }
            let h = relative_entropy(&rho, &sigma).unwrap().to_f64();
            excess = excess.max(h - bound);
            let r = estimate_ree(&rho, &layout, &opts(seed)).unwrap();
            infeasible = infeasible.max(r.lower() - h);
        }
    }
    Check::new(
        dist <= tol::MARGINALS && excess <= tol::LEMMA_BOUND && infeasible <= tol::FEASIBILITY,
        format!(
            "max marginal distance {dist:.1e}, max H - bound {excess:.1e}, max (value - gap) - H {infeasible:.1e}"
        ),
    )
}

fn c5_truncation() -> Check {
    let layout = SubsystemLayout::uniform(4, 3).unwrap();
    let solver_tol = tol::TRUNCATION_SOLVER.to_string();
    let (mut qmi_ok, mut er_ok) = (true, true);
    let (mut valid_rows, mut worst_qmi, mut worst_step, mut worst_end) =
        (0, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for k in 0..20u64 {
        let rho = random_density(&layout, 64, 3000 + k).unwrap();
        let path = write_state(&format!("full_rank_{k}.json"), &layout, &rho);
        let (code, out) = multiree(&[
            "truncate", &path, "--subset", "1,2,3", "--f", "qmi", "--format", "json",
        ]);
        let qmi: TruncationFile = serde_json::from_str(&out).unwrap();
        qmi_ok &= code == 0;
        for row in qmi.rows.iter().filter(|r| r.valid_regime) {
            valid_rows += 1;
            let excess = (row.value - qmi.reference).abs() - row.bound.unwrap();
            worst_qmi = worst_qmi.max(excess);
            qmi_ok &= excess <= tol::TRUNCATION_QMI;
        }
        let (code, out) = multiree(&[
            "truncate",
            &path,
            "--subset",
            "1,2,3",
            "--f",
            "ree",
            "--format",
            "json",
            "--tol",
            &solver_tol,
        ]);
        let er: TruncationFile = serde_json::from_str(&out).unwrap();
        er_ok &= code == 0;
        let d: Vec<f64> = er
            .rows
            .iter()
            .map(|r| (r.value - er.reference).abs())
            .collect();
        for w in d.windows(2) {
            let step = w[1] - w[0];
            worst_step = worst_step.max(step);
            er_ok &= step <= 2.0 * tol::TRUNCATION_SOLVER;
        }
        let end = *d.last().unwrap();
        worst_end = worst_end.max(end);
        er_ok &= er.rows.last().unwrap().r == 4 && end <= 2.0 * tol::TRUNCATION_SOLVER;
    }
    Check::new(
        qmi_ok && er_ok,
        format!(
            "QMI: {valid_rows} valid rows, max excess over bound {worst_qmi:.1e}; E_R: max envelope step {worst_step:.1e}, max |value - full| at r=4 {worst_end:.1e}"
        ),
    )
}

fn c6_trace_bounds() -> Check {
    let layout = SubsystemLayout::new(vec![2, 3, 4]).unwrap();
    let (mut p_slack, mut n_slack) = (f64::INFINITY, f64::INFINITY);
    let mut cases = 0;
    for k in 0..200u64 {
        let rho = random_density(&layout, 1 + (k % 24) as usize, 4000 + k).unwrap();
        let margs: Vec<HermitianOperator> = (0..3)
            .map(|s| partial_trace(&rho, &layout, &[s]).unwrap())
            .collect();
        for mask in 1u32..8 {
            let subset: Vec<usize> = (0..3).filter(|s| mask & (1 << s) != 0).collect();
            for r in 1..=4 {
                let Ok(t) = approx_map(&rho, &layout, &subset, r) else {
                    continue;
                };
                let tail: f64 = subset
                    .iter()
                    .map(|&s| {
                        let p = spectral_projector(&margs[s], r.min(layout.dim(s))).unwrap();
                        1.0 - p.inner(&margs[s])
                    })
                    .sum();
                p_slack = p_slack.min(t.c_r - (1.0 - tail));
                let dist = trace_distance(&rho, &t.state).unwrap();
                n_slack = n_slack.min((1.0 - t.c_r).max(0.0).sqrt() - dist);
                cases += 1;
            }
        }
    }
    Check::new(
        p_slack >= -tol::SLACK && n_slack >= -tol::SLACK,
        format!(
            "{cases} cases, min slack: trace bound {p_slack:.1e}, gentle measurement {n_slack:.1e}"
        ),
    )
}

fn certified_difference(a: &SolveResult, b: &SolveResult) -> f64 {
    (a.value - b.lower()).max(b.value - a.lower())
}

fn c7_continuity() -> Check {
    let start = Instant::now();
    let layout = qubits();
    let mut s = Sampler::new(5000);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200 {
        let rho = s.density(4, 1 + k % 4).unwrap();
        let sigma = if k % 2 == 0 {
            let t = 0.01 + 0.3 * s.uniform();
            rho.mix(1.0 - t, &s.density(4, 4).unwrap())
        } else {
            s.density(4, 1 + (k / 2) % 4).unwrap()
        };
        let eps = trace_distance(&rho, &sigma).unwrap();
        let (a, b) = (
            estimate_ree(&rho, &layout, &opts(0)).unwrap(),
            estimate_ree(&sigma, &layout, &opts(0)).unwrap(),
        );
        worst = worst.max(certified_difference(&a, &b) - cb_finite_dim(eps, &[2]).unwrap());
    }
    let h = HamiltonianSpec::new(vec![0.0, 1.0]).unwrap();
    let energy = |x: &HermitianOperator| partial_trace(x, &layout, &[0]).unwrap().get(1, 1).re;
    let mut bounded = || loop {
        let rank = 1 + (s.next_u64() % 4) as usize;
        let x = s.density(4, rank).unwrap();
        if energy(&x) <= 0.75 {
            return x;
        }
    };
    let mut worst_energy = f64::NEG_INFINITY;
    for k in 0..50 {
        let rho = bounded();
        let sigma = if k % 2 == 0 {
            let mut x;
            loop {
                x = rho.mix(0.8, &bounded());
                if energy(&x) <= 0.75 {
                    break x;
                }
            }
        } else {
            bounded()
        };
        let eps = trace_distance(&rho, &sigma).unwrap();
        let (a, b) = (
            estimate_ree(&rho, &layout, &opts(0)).unwrap(),
            estimate_ree(&sigma, &layout, &opts(0)).unwrap(),
        );
        let bound = cb_energy(eps, 0.75, 1, 2, std::slice::from_ref(&h))
            .unwrap()
            .value;
        worst_energy = worst_energy.max(certified_difference(&a, &b) - bound);
    }
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    Check::new(
        worst <= tol::CONTINUITY
            && worst_energy <= tol::CONTINUITY
            && minutes < tol::CONTINUITY_MINUTES,
        format!(
            "max (|dE_R| - bound): finite {worst:.3}, energy {worst_energy:.3}; {:.1} min",
            minutes
        ),
    )
}

fn c8_oscillator() -> Check {
    let osc = Oscillator::new(vec![1.0], 1.0).unwrap();
    let h = HamiltonianSpec::oscillator(osc, 60).unwrap();
    let mut worst_closed = 0.0f64;
    for n in [0.5, 1.0, 2.0] {
        let closed = (n + 1.0) * f64::ln(n + 1.0) - n * f64::ln(n);
        worst_closed = worst_closed.max((max_entropy_f(&h, n + 0.5).unwrap() - closed).abs());
    }
    let mut worst_dominance = f64::NEG_INFINITY;
    for k in 1..=200 {
        let e = 0.5 + 0.1 * k as f64;
        let f = max_entropy_f(&h, e).unwrap();
        let upper = oscillator_f(&[1.0], 1.0, e, OscillatorVariant::F).unwrap();
        worst_dominance = worst_dominance.max(f - upper);
    }
    let grid: Vec<f64> = (0..=400)
        .map(|k| 0.1 * 10f64.powf(4.0 * k as f64 / 400.0))
        .collect();
    let ratio: Vec<f64> = grid
        .iter()
        .map(|&e| oscillator_f(&[1.0], 1.0, e, OscillatorVariant::FBar).unwrap() / e.sqrt())
        .collect();
    let worst_rise = ratio
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Check::new(
        worst_closed <= tol::OSCILLATOR && worst_dominance <= tol::OSCILLATOR_GRID && worst_rise <= tol::OSCILLATOR_GRID,
        format!(
            "closed-form error {worst_closed:.1e}, max F - F_1 {worst_dominance:.2}, max rise of Fbar/sqrt(E) {worst_rise:.1e}"
        ),
    )
}

fn c9_energy_sweep() -> Check {
    let bell = bell_basis()[0].density();
    let h = HamiltonianSpec::new(vec![0.0, 1.0]).unwrap();
    let hams = [h.clone(), h];
    let free = estimate_ree(&bell, &qubits(), &opts(0)).unwrap();
    let runs: Vec<(f64, SolveResult)> = [0.2, 0.5, 1.0, 2.0, 5.0]
        .into_iter()
        .map(|e| {
            (
                e,
                energy_constrained_ree(&bell, &qubits(), &hams, e, &opts(0)).unwrap(),
            )
        })
        .collect();
    // a later value may exceed an earlier one only if the brackets allow it
    let monotone = runs
        .windows(2)
        .all(|w| w[1].1.lower() <= w[0].1.value + tol::FEASIBILITY);
    let last = &runs.last().unwrap().1;
    let limit = (last.value - free.value).abs();
    let values: Vec<String> = runs
        .iter()
        .map(|(e, r)| format!("{e}:{:.4}", r.value))
        .collect();
    Check::new(
        monotone && limit <= 2.0 * tol::SOLVER,
        format!("values {}; |E_R(5) - E_R| {limit:.1e}", values.join(" ")),
    )
}

fn c10_lower_bounds() -> Check {
    let mut worst_lb1 = f64::NEG_INFINITY;
    for k in 0..50u64 {
        let rho = random_pure(&qubits(), 6000 + k).density();
        let r = estimate_ree(&rho, &qubits(), &opts(k)).unwrap();
        let joint = von_neumann_entropy(&rho).unwrap();
        for keep in [0, 1] {
            let cond = joint
                - von_neumann_entropy(&partial_trace(&rho, &qubits(), &[keep]).unwrap()).unwrap();
            worst_lb1 = worst_lb1.max(-cond - (r.value + r.gap));
        }
    }
    let layout = SubsystemLayout::uniform(2, 3).unwrap();
    let mut worst_lb2 = f64::NEG_INFINITY;
    for k in 0..25u64 {
        let rho = random_pure(&layout, 7000 + k).density();
        let full = estimate_ree(&rho, &layout, &opts(k)).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let pair = partial_trace(&rho, &layout, &[i, j]).unwrap();
            let sub = estimate_ree(&pair, &qubits(), &opts(k)).unwrap();
            let lhs = sub.lower() + von_neumann_entropy(&pair).unwrap();
            worst_lb2 = worst_lb2.max(lhs - full.value);
        }
    }
    Check::new(
        worst_lb1 <= tol::LOWER_BOUNDS && worst_lb2 <= tol::LOWER_BOUNDS,
        format!("max violation: two-qubit {worst_lb1:.1e}, tripartite {worst_lb2:.1e}"),
    )
}

fn c11_data_processing() -> Check {
    let mut s = Sampler::new(8000);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200 {
        let dim = 2 + k % 5;
        let rho = s.density(dim, 1 + k % dim).unwrap();
        let sigma = s.density(dim, dim).unwrap();
        let u = s.unitary(dim);
        let rank = 1 + (k / 5) % (dim - 1);
        let mut p = HermitianOperator::zeros(dim);
        for j in 0..rank {
            p.axpy(1.0, &HermitianOperator::projector(&u.column(j)));
        }
        let q = HermitianOperator::identity(dim).sub(&p);
        let mut lhs = 0.0;
        for proj in [&p, &q] {
            let a = rho.conjugate(proj.matrix());
            let b = sigma.conjugate(proj.matrix());
            let (pa, pb) = (a.trace(), b.trace());
            if pa > 0.0 {
                lhs += pa
                    * relative_entropy(&a.scale(1.0 / pa), &b.scale(1.0 / pb))
                        .unwrap()
                        .to_f64();
            }
        }
        worst = worst.max(lhs - relative_entropy(&rho, &sigma).unwrap().to_f64());
    }
    Check::new(
        worst <= tol::DATA_PROCESSING,
        format!("max violation {worst:.1e} over 200 pairs"),
    )
}

fn c12_determinism() -> Check {
    let dir = workdir();
    let tri = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
    let mixed = write_state(
        "det_mixed.json",
        &tri,
        &random_density(&tri, 5, 9000).unwrap(),
    );
    let pure_path = dir.join("det_pure.json");
    fs::write(
        &pure_path,
        to_json(&StateFile::vector(&tri, &random_pure(&tri, 9001))),
    )
    .unwrap();
    let pure = pure_path.display().to_string();
    let bell = write_state("det_bell.json", &qubits(), &bell_basis()[0].density());
    let commands: Vec<Vec<&str>> = vec![
        vec!["ree", &mixed],
        vec!["ree", &bell, "--energy", "0.5", "--ham", "diag:0,1"],
        vec!["entropy", &mixed, "--qmi"],
        vec!["entropy", &mixed, "--cond", "1,2|3"],
        vec!["truncate", &mixed, "--subset", "1,2", "--f", "qmi"],
        vec!["truncate", &mixed, "--subset", "2", "--f", "ree"],
        vec!["audit", &bell],
        vec!["lemma-omega", &pure],
        vec!["gibbs", "--ham", "oscillator:1:60", "--energy", "1.5"],
        vec![
            "fa-check",
            "--spectrum",
            "geometric:0.5",
            "--weights",
            "logpow:3",
        ],
        vec![
            "bounds",
            "finite",
            "--sweep",
            "epsilon=0:1:11",
            "--dims",
            "2",
        ],
        vec![
            "bounds",
            "oscillator",
            "--sweep",
            "epsilon=0.01:0.1:6",
            "--energy",
            "2",
            "--n",
            "2",
            "--m",
            "1",
            "--optimize-t",
            "--omegas",
            "1",
        ],
    ];
    let mut identical = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "2")] {
            let out = dir.join(format!("det_{k}_{run}.out"));
            let out_s = out.display().to_string();
            let mut args = cmd.clone();
            args.extend(["--seed", "0", "--jobs", jobs, "--out", &out_s]);
            let (code, _) = multiree(&args);
            outputs.push((code, fs::read(&out).unwrap_or_default()));
        }
        if outputs[0].0 == 0 && outputs[0] == outputs[1] && !outputs[0].1.is_empty() {
            identical += 1;
        }
    }
    Check::new(
        identical == commands.len(),
        format!(
            "{identical}/{} commands produced byte-identical result files on repeat",
            commands.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("Bell state E_R", c1_bell),
        ("Bell-diagonal family vs grid oracle", c2_bell_diagonal),
        ("separable soundness", c3_separable),
        ("separable state with matching marginals", c4_lemma_omega),
        ("truncation pipeline", c5_truncation),
        ("trace and gentle-measurement bounds", c6_trace_bounds),
        ("continuity-bound dominance", c7_continuity),
        ("oscillator F-functions", c8_oscillator),
        ("energy-constrained E_R sweep", c9_energy_sweep),
        ("lower-bound consistency", c10_lower_bounds),
        ("data processing", c11_data_processing),
        ("determinism", c12_determinism),
    ];
    let mut failed = Vec::new();
    let total = Instant::now();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let c = run();
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: {} [{:.1} s]",
            k + 1,
            c.detail,
            start.elapsed().as_secs_f64()
        );
        if !c.pass {
            failed.push(k + 1);
        }
    }
    let elapsed: Duration = total.elapsed();
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s",
        criteria.len() - failed.len(),
        criteria.len(),
        elapsed.as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
