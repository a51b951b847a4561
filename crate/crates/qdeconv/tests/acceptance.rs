//! Acceptance suite: runs every criterion at its stated tolerance and budget
//! and prints one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qdeconv::bench::{prepare, sweep_circuits};
use qdeconv::{depth_scaling_sweep, run_experiment, qcv, ExperimentConfig, Method};
use qdeconv_core::deconv::opt::{js_gradient, js_hessian, trust_region_restart};
use qdeconv_core::deconv::poly::{
    draws_for_partition, factorize_pmf, recombine_with, PolyDeconvolver, RootGroup,
};
use qdeconv_core::pmf::{convolve, convolve_all, convolve_slices, discretize, js_cost};
use qdeconv_core::prep::{build_adder, build_gr, build_pipeline, AdderLayout};
use qdeconv_core::rng::{stream_rng, ChaCha8Rng};
use qdeconv_core::sim::{run, run_from};
use qdeconv_core::{
    Circuit, DeconvProblem, DiscretizationRule, DistributionSpec, Gate, GateBasis, McryMode,
    OptimizerConfig, Pmf,
};
use rand::Rng;

type Outcome = Result<String, String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0xacce)
}

fn interior_pmf(r: &mut ChaCha8Rng, len: usize) -> Pmf {
    Pmf::from_weights((0..len).map(|_| r.random_range(0.05..1.0)).collect()).unwrap()
}

fn any_pmf(r: &mut ChaCha8Rng, len: usize) -> Pmf {
    loop {
        let w: Vec<f64> = (0..len)
            .map(|_| if r.random_bool(0.25) { 0.0 } else { r.random::<f64>() })
            .collect();
        if w.iter().any(|&x| x > 0.0) {
            return Pmf::from_weights(w).unwrap();
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn adder_oracle() -> Outcome {
    let mut cases = 0;
    for b in 1..=3usize {
        for a in 1..=b {
            let circuit = build_adder(a, b).map_err(|e| e.to_string())?;
            let layout = AdderLayout::new(
                (0..a).collect(),
                (a..a + b).collect(),
                (a + b..a + 2 * b).collect(),
            )
            .unwrap();
            for i in 0..1usize << a {
                for j in 0..1usize << b {
                    let state = run_from(&circuit, i | j << a).unwrap();
                    let (out, amp) = state
                        .amplitudes()
                        .iter()
                        .enumerate()
                        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                        .unwrap();
                    let sum = layout
                        .sum_qubits()
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (bit, &q)| acc | (out >> q & 1) << bit);
                    if amp.re != 1.0 || amp.im != 0.0 || sum != i + j {
                        return Err(format!("a={a} b={b}: {i}+{j} read {sum} with amplitude {amp}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} basis inputs, every sum exact with amplitude 1"))
}

fn convolution_theorem() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for pair in 0..100 {
        let (l1, l2) = (r.random_range(1..=8), r.random_range(1..=8));
        let q1 = interior_pmf(&mut r, l1);
        let q2 = interior_pmf(&mut r, l2);
        let mode = if pair % 2 == 0 { McryMode::NoAncilla } else { McryMode::VChain };
        let c = build_pipeline(&[q1.clone(), q2.clone()], mode).map_err(|e| e.to_string())?;
        let got = run(&c).unwrap().marginal(c.measured()).unwrap();
        let want = convolve(&q1, &q2).padded(got.len());
        worst = worst.max(max_abs_diff(&got, &want));
    }
    check(worst < 1e-10, format!("100 pairs, worst entry error {worst:.1e} (tol 1e-10)"))
}

fn gr_fidelity() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let pmf = any_pmf(&mut r, [2, 4, 8, 16][trial % 4]);
        for mode in [McryMode::NoAncilla, McryMode::VChain] {
            let c = build_gr(&pmf, mode);
            let got = run(&c).unwrap().marginal(c.measured()).unwrap();
            worst = worst.max(max_abs_diff(&got, &pmf));
        }
    }
    check(worst < 1e-12, format!("200 PMFs x 2 modes, worst error {worst:.1e} (tol 1e-12)"))
}

fn derivative_oracle() -> Outcome {
    let h = 1e-6;
    let rel = |got: &[f64], want: &[f64]| {
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-8);
        max_abs_diff(got, want) / scale
    };
    let (mut grad_worst, mut hess_worst) = (0.0f64, 0.0f64);
    let mut r = rng(4);
    for _ in 0..100 {
        let (n1, n2) = (r.random_range(2..=8), r.random_range(2..=8));
        let q1 = interior_pmf(&mut r, n1).into_vec();
        let q2 = interior_pmf(&mut r, n2).into_vec();
        let target = interior_pmf(&mut r, n1 + n2 - 1).into_vec();
        let x: Vec<f64> = q1.iter().chain(&q2).copied().collect();
        let n = x.len();
        let cost = |x: &[f64]| js_cost(&target, &convolve_slices(&x[..n1], &x[n1..])).unwrap();
        let grad = |x: &[f64]| js_gradient(&x[..n1], &x[n1..], &target).unwrap();
        let shifted = |j: usize, d: f64| {
            let mut y = x.clone();
            y[j] += d;
            y
        };
        let fd: Vec<f64> = (0..n)
            .map(|j| (cost(&shifted(j, h)) - cost(&shifted(j, -h))) / (2.0 * h))
            .collect();
        grad_worst = grad_worst.max(rel(&grad(&x), &fd));

        let hess = js_hessian(&q1, &q2, &target).unwrap();
        let (mut got, mut want) = (Vec::new(), Vec::new());
        for j in 0..n {
            let (gu, gd) = (grad(&shifted(j, h)), grad(&shifted(j, -h)));
            for i in 0..n {
                want.push((gu[i] - gd[i]) / (2.0 * h));
                got.push(hess[(i, j)]);
            }
        }
        hess_worst = hess_worst.max(rel(&got, &want));
    }
    check(
        grad_worst < 1e-6 && hess_worst < 1e-4,
        format!("100 points, gradient rel {grad_worst:.1e} (tol 1e-6), Hessian rel {hess_worst:.1e} (tol 1e-4)"),
    )
}

/// Successful restarts out of 10 on the planted instance for `len x len`.
fn planted(len: usize) -> usize {
    let mut r = rng(5);
    let a = interior_pmf(&mut r, len);
    let b = interior_pmf(&mut r, len);
    let target = convolve(&a, &b);
    let problem = DeconvProblem::new(target.clone(), len, len).unwrap();
    let config = OptimizerConfig::default();
    (0..10)
        .filter(|&restart| {
            let result = trust_region_restart(&problem, &config, restart).unwrap();
            let back = convolve(&result.factors[0], &result.factors[1]);
            result.final_cost < 1e-8 && max_abs_diff(&back, &target) < 1e-4
        })
        .count()
}

fn planted_deconvolution() -> Outcome {
    let (s4, s8) = (planted(4), planted(8));
    check(s4 >= 8 && s8 >= 8, format!("4x4: {s4}/10, 8x8: {s8}/10 restarts reach cost < 1e-8 (need 8/10 each)"))
}

/// Block of each root group in the published degree {4, 4, 9, 14} split.
fn published_block(g: &RootGroup) -> usize {
    let near = |x: f64| (g.re() - x).abs() < 1e-3;
    if near(0.17504) || near(-0.56316) {
        0
    } else if near(0.68209) || near(-0.71212) {
        1
    } else if near(-1.0) || near(-0.92518) || near(-0.20876) || near(0.53027) || near(0.77690) {
        2
    } else {
        3
    }
}

fn appendix_factorization() -> Outcome {
    let spec = DistributionSpec::gaussian(0.0, 1.0, 32).with_rule(DiscretizationRule::CellIntegral);
    let target = discretize(&spec).unwrap();
    let best = factorize_pmf(&target, 1000, 0).map_err(|e| e.to_string())?;
    let round_trip = max_abs_diff(&best.product(), &target);
    let positive = best.factors.iter().flat_map(|f| f.iter()).all(|&c| c > 0.0);
    let degree_sum: usize = best.degrees.iter().sum();
    let main = best.len() >= 4 && degree_sum == 31 && positive && round_trip <= 1e-8;

    // reachability: search 1000-restart batches in seed order
    let solver = PolyDeconvolver::new(&target).unwrap();
    let wanted = [4, 4, 9, 14];
    let start = Instant::now();
    let mut hit = None;
    let mut searched = 0u64;
    'search: for seed in 0u64.. {
        for restart in 0..1000 {
            searched += 1;
            if let Ok(f) = solver.attempt(seed, restart) {
                let mut d = f.degrees.clone();
                d.sort_unstable();
                if d == wanted {
                    hit = Some((seed, restart));
                    break 'search;
                }
            }
        }
        if start.elapsed() > Duration::from_secs(240) {
            break;
        }
    }

    // the published split replayed through scripted draws
    let (b1, b2) = solver.baskets();
    let scripted = draws_for_partition(b1, b2, &published_block).and_then(|draws| {
        let mut script = draws.into_iter();
        recombine_with(b1, b2, &mut |_| script.next().unwrap())
            .ok()
            .and_then(|f| solver.verify(f).ok())
    });
    let quartic = [1.0, 0.77623, 1.60569, 0.77623, 1.0];
    let published_quartic = scripted.as_ref().is_some_and(|f| {
        f.factors.iter().any(|c| {
            let scaled: Vec<f64> = c.iter().map(|v| v / c[0]).collect();
            scaled.len() == 5 && max_abs_diff(&scaled, &quartic) < 1e-5
        })
    });

    let detail = format!(
        "seed 0 x 1000 restarts -> degrees {:?}, round trip {round_trip:.1e}; degrees {{4,4,9,14}} {}; published split replays with quartic (1, 0.77623, 1.60569, ...): {published_quartic}",
        best.degrees,
        match hit {
            Some((s, r)) => format!("first observed at seed {s} restart {r} ({searched} restarts searched, none in the seed-0 batch)", ),
            None => format!("not observed in {searched} restarts"),
        }
    );
    check(main && hit.is_some() && published_quartic, detail)
}

fn table_ordering() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for spec in [
        DistributionSpec::gaussian(0.0, 1.0, 7),
        DistributionSpec::gaussian(0.0, 1.0, 15),
        DistributionSpec::laplace(0.0, 1.0, 7),
        DistributionSpec::laplace(0.0, 1.0, 15),
    ] {
        for basis in [GateBasis::Coarse, GateBasis::Hardware] {
            let mut cfg = ExperimentConfig::new(spec);
            cfg.basis = basis;
            let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let get = |m| report.method(m).unwrap();
            let (d, g, v) = (get(Method::Deconvolution), get(Method::Gr), get(Method::GrVChain));
            ok &= d.circuit_depth < g.circuit_depth && d.circuit_depth < v.circuit_depth;
            ok &= report.methods.iter().all(|m| m.qcv == qcv(m.active_qubits, m.circuit_depth));
            if spec.points == 15 && basis == GateBasis::Coarse {
                ok &= d.qcv < g.qcv && d.qcv < v.qcv;
            }
            lines.push(format!(
                "{:?}{} {:?}: depth {}/{}/{} qcv {}/{}/{}",
                spec.family, spec.points, basis, d.circuit_depth, g.circuit_depth, v.circuit_depth, d.qcv, g.qcv, v.qcv
            ));
        }
    }
    let detail = format!(
        "Deconvolution/GR/GRVChain; QCV minimum asserted in the coarse basis at 15 points (hardware shown for reference): {}",
        lines.join("; ")
    );
    check(ok, detail)
}

fn shot_level_js() -> Outcome {
    let spec = DistributionSpec::gaussian(0.0, 1.0, 7);
    let mut js = Vec::new();
    let mut residual_gap = 0.0f64;
    for seed in 0..10 {
        let mut cfg = ExperimentConfig::new(spec);
        cfg.methods = vec![Method::Deconvolution];
        cfg.seed = seed;
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let m = &report.methods[0];
        js.push(m.js_distance);
        residual_gap = residual_gap.max((m.exact_js_distance - m.deconvolution_residual.unwrap()).abs());
    }
    js.sort_by(f64::total_cmp);
    let median = 0.5 * (js[4] + js[5]);

    // exact marginal against the factors' convolution
    let cfg = ExperimentConfig::new(spec);
    let prepared = prepare(Method::Deconvolution, &discretize(&spec).unwrap(), &cfg).map_err(|e| e.to_string())?;
    let marginal = run(&prepared.circuit).unwrap().marginal(prepared.circuit.measured()).unwrap();
    let product = convolve_all(prepared.factors.as_ref().unwrap()).unwrap();
    let conv_gap = max_abs_diff(&marginal, &product.padded(marginal.len()));
    check(
        median < 1e-2 && residual_gap < 1e-9 && conv_gap < 1e-10,
        format!(
            "2048 shots x 10 seeds, median JS {median:.2e} (tol 1e-2); exact JS vs residual gap {residual_gap:.1e} (tol 1e-9); marginal vs convolution {conv_gap:.1e}"
        ),
    )
}

/// The two-qubit loader built gate by gate: Ry, X-conjugated controlled Ry,
/// controlled Ry, each controlled Ry written as Ry CX Ry CX.
fn hand_built_two_qubit(p: &[f64]) -> Circuit {
    let angle = |left: f64, total: f64| if total > 0.0 { 2.0 * (left / total).sqrt().acos() } else { 0.0 };
    let top = angle(p[0] + p[1], 1.0);
    let low = angle(p[0], p[0] + p[1]);
    let high = angle(p[2], p[2] + p[3]);
    let cry = |t: f64| [Gate::ry(0, t / 2.0), Gate::cx(1, 0), Gate::ry(0, -t / 2.0), Gate::cx(1, 0)];
    let mut c = Circuit::new(2);
    c.push(Gate::ry(1, top)).unwrap();
    c.push(Gate::X(1)).unwrap();
    c.extend(cry(low)).unwrap();
    c.push(Gate::X(1)).unwrap();
    c.extend(cry(high)).unwrap();
    c
}

fn scaling_claim() -> Outcome {
    let rows = depth_scaling_sweep(&[3, 4, 5, 6, 7, 8], GateBasis::Hardware).map_err(|e| e.to_string())?;
    let depth = |n: usize, m: &str| rows.iter().find(|r| r.n == n && r.method == m).unwrap().depth;
    let always_lower = (3..=8).all(|n| depth(n, "deconv-gr") < depth(n, "gr"));
    let ratio = depth(8, "deconv-gr") as f64 / depth(8, "gr") as f64;

    let target = discretize(&DistributionSpec::gaussian(0.0, 1.0, 3)).unwrap().padded(4);
    let hand = hand_built_two_qubit(&target);
    let hand_ok = max_abs_diff(&run(&hand).unwrap().probabilities(), &target) < 1e-12;
    let built = &sweep_circuits(2).map_err(|e| e.to_string())?[0].1;
    let (d_built, d_hand) = (built.transpiled_depth(GateBasis::Hardware), hand.transpile(GateBasis::Hardware).depth());
    check(
        always_lower && ratio <= 0.6 && hand_ok && d_built == d_hand,
        format!(
            "deconvolved < direct for n = 3..8: {always_lower}; ratio at n = 8: {ratio:.3} (need <= 0.6); n = 2 depth {d_built} vs hand-built {d_hand}"
        ),
    )
}

fn cli(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qdeconv"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = r#"{"distribution":{"family":"laplace","location":0,"scale":1,"points":15,"halfWidth":3},"seed":9}"#;
    std::fs::write(dir.path().join("bench.json"), config).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("target.json"), cli(&["discretize", "--points", "15"], dir.path())?)
        .map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("circuit.json"), cli(&["build", "--method", "deconv"], dir.path())?)
        .map_err(|e| e.to_string())?;

    let commands: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["discretize", "--family", "laplace", "--points", "15"], vec![]),
        (vec!["deconvolve", "--pmf", "target.json", "--seed", "3", "--trace", "trace.csv"], vec!["trace.csv"]),
        (vec!["deconvolve", "--method", "poly", "--points", "32", "--rule", "cell-integral"], vec![]),
        (vec!["build", "--method", "deconv", "--basis", "hardware", "--points", "15"], vec![]),
        (vec!["build", "--method", "gr", "--basis", "coarse"], vec![]),
        (vec!["build", "--method", "gr-vchain", "--qasm"], vec![]),
        (vec!["simulate", "--circuit", "circuit.json", "--shots", "2048", "--seed", "42", "--shot-log", "shots.csv"], vec!["shots.csv"]),
        (vec!["bench", "--config", "bench.json", "--csv", "table.csv", "--js-sqrt"], vec!["table.csv"]),
        (vec!["sweep", "--n-min", "2", "--n-max", "6"], vec![]),
    ];
    for (args, files) in &commands {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let mut bytes = cli(args, dir.path())?;
            for f in files {
                bytes.extend(std::fs::read(dir.path().join(f)).map_err(|e| e.to_string())?);
                std::fs::remove_file(dir.path().join(f)).map_err(|e| e.to_string())?;
            }
            runs.push(bytes);
        }
        if runs[0] != runs[1] || runs[0].is_empty() {
            return Err(format!("{} differs between runs", args.join(" ")));
        }
    }
    Ok(format!("{} commands byte-identical across two runs (stdout and side files)", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("adder oracle", 5, adder_oracle),
        ("convolution theorem", 30, convolution_theorem),
        ("GR fidelity", 60, gr_fidelity),
        ("derivative oracle", 10, derivative_oracle),
        ("planted deconvolution", 120, planted_deconvolution),
        ("degree-31 factorization", 300, appendix_factorization),
        ("table ordering", 60, table_ordering),
        ("shot-level JS", 30, shot_level_js),
        ("scaling claim", 120, scaling_claim),
        ("determinism", 120, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name} ({:.2} s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
