//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use ishida_core::exterior::wedge_dim;
use ishida_core::homology::{
    betti_numbers, euler_oracle, verify_phi_transfer, verify_vanishing, ComputeOptions, Regime, Report, Verdict,
};
use ishida_core::ishida::{build_ishida, star_shift_iso};
use ishida_core::kcomplex::{build_k, total_cohomology_check};
use ishida_core::linalg::LatticeVector;
use ishida_core::polyhedral::io::save_fan;
use ishida_core::polyhedral::{gamma_pi, hirzebruch_fan, product_fan, projective_space_fan, star_removal, Cone, Fan};
use ishida_core::random::{case_rng, fuzz, random_complete_rank2, random_simplicial_cone, random_vector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn opts() -> ComputeOptions {
    ComputeOptions { threads: 1, ..Default::default() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expect_pass(label: &str, report: &Report) -> Result<(), String> {
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ensure(report.verdict == Verdict::Pass, || {
        format!("{label}: {} {:?} {}", report.verdict.as_str(), failed, report.reason.clone().unwrap_or_default())
    })
}

fn p1() -> Fan {
    projective_space_fan(1)
}

fn p1xp1() -> Fan {
    product_fan(&p1(), &p1())
}

fn half_plane() -> Fan {
    let rays = [[1, 0], [0, 1], [-1, 0]].map(|r| LatticeVector::from_i64s(&r));
    Fan::from_ray_indices(2, &rays, &[vec![0, 1], vec![1, 2]]).unwrap()
}

fn random_complete_corpus() -> Vec<Fan> {
    (0..20).map(|i| random_complete_rank2(&mut case_rng(2024, i), 1 + i as usize % 6)).collect()
}

fn named_complete_fans() -> Vec<(String, Fan)> {
    let mut fans = vec![
        ("P1".to_string(), p1()),
        ("P2".into(), projective_space_fan(2)),
        ("P3".into(), projective_space_fan(3)),
        ("P1xP1".into(), p1xp1()),
    ];
    fans.extend((0..=3).map(|a| (format!("F{a}"), hirzebruch_fan(a))));
    fans
}

fn cone_corpus() -> Vec<Cone> {
    let mut cones = Vec::new();
    for r in 1..=5usize {
        for k in 0..=r {
            let coords: Vec<LatticeVector> = (0..k).map(|i| LatticeVector::unit(r, i)).collect();
            cones.push(Cone::new(r, &coords).unwrap());
        }
        for i in 0..24u64 {
            let mut rng = case_rng(100 + r as u64, i);
            let k = 1 + (i as usize) % r;
            cones.push(random_simplicial_cone(&mut rng, r, k, 3));
        }
    }
    cones.sort();
    cones.dedup();
    cones
}

fn criterion_1() -> Outcome {
    let cones = cone_corpus();
    ensure(cones.len() >= 100, || format!("corpus has only {} cones", cones.len()))?;
    let non_coordinate = cones.iter().filter(|c| c.rays().iter().any(|v| v.entries().iter().filter(|e| **e != BigInt::from(0)).count() > 1)).count();
    ensure(non_coordinate > 0, || "no non-coordinate rays in the corpus".into())?;
    for cone in &cones {
        let fan = gamma_pi(cone);
        let r = fan.rank();
        let report = verify_vanishing(&fan, &Regime::Cone, opts());
        expect_pass(&cone.to_string(), &report)?;
        let table = report.table.as_ref().ok_or("report has no table")?;
        for p in 0..=r {
            ensure(table.rank_at(p, 0) == wedge_dim(r - cone.dim(), p as isize), || format!("{cone}: H^0(Λ^{p}) rank"))?;
            for q in 1..=r {
                ensure(table.rank_at(p, q) == 0, || format!("{cone}: H^{q}(Λ^{p}) nonzero"))?;
            }
        }
    }
    Ok(format!("{} cones, {} with non-coordinate rays", cones.len(), non_coordinate))
}

fn check_complete(name: &str, fan: &Fan) -> Result<(), String> {
    let report = verify_vanishing(fan, &Regime::CompleteSimplicial, opts());
    expect_pass(name, &report)?;
    let table = report.table.as_ref().ok_or("report has no table")?;
    let r = fan.rank();
    ensure(table.off_diagonal().is_empty(), || format!("{name}: off-diagonal classes {:?}", table.off_diagonal()))?;
    let h = table.diagonal();
    ensure((0..=r).all(|p| h[p] == h[r - p]), || format!("{name}: h = {h:?} is not symmetric"))?;
    ensure(h[0] == 1 && h[r] == 1, || format!("{name}: h_0, h_r = {}, {}", h[0], h[r]))?;
    let betti = table.betti.as_ref().ok_or("no Betti numbers")?;
    ensure(betti.iter().skip(1).step_by(2).all(|&b| b == 0), || format!("{name}: odd Betti {betti:?}"))?;
    for (p, &hp) in h.iter().enumerate() {
        let chi = euler_oracle(fan, p).map_err(|e| e.to_string())?;
        let sign = if p % 2 == 0 { 1 } else { -1 };
        ensure(hp as i64 == sign * chi, || format!("{name}: h_{p} = {hp}, Euler oracle {chi}"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let named = named_complete_fans();
    for (name, fan) in &named {
        check_complete(name, fan)?;
    }
    let random = random_complete_corpus();
    for (i, fan) in random.iter().enumerate() {
        check_complete(&format!("random #{i} ({} rays)", fan.rays().len()), fan)?;
    }
    Ok(format!("{} named fans, {} random complete rank-2 fans", named.len(), random.len()))
}

fn criterion_3() -> Outcome {
    let golden: Vec<(&str, Fan, Vec<usize>)> = vec![
        ("P2", projective_space_fan(2), vec![1, 0, 1, 0, 1]),
        ("F0", hirzebruch_fan(0), vec![1, 0, 2, 0, 1]),
        ("F1", hirzebruch_fan(1), vec![1, 0, 2, 0, 1]),
        ("F2", hirzebruch_fan(2), vec![1, 0, 2, 0, 1]),
        ("F3", hirzebruch_fan(3), vec![1, 0, 2, 0, 1]),
        ("P3", projective_space_fan(3), vec![1, 0, 1, 0, 1, 0, 1]),
        ("P1xP1", p1xp1(), vec![1, 0, 2, 0, 1]),
    ];
    for (name, fan, expected) in &golden {
        for (l, &b) in expected.iter().enumerate() {
            let oracle = if l % 2 == 1 {
                0
            } else {
                let p = l / 2;
                let chi = euler_oracle(fan, p).map_err(|e| e.to_string())?;
                (if p % 2 == 0 { chi } else { -chi }) as usize
            };
            ensure(oracle == b, || format!("{name}: golden b_{l} = {b} but the Euler oracle gives {oracle}"))?;
        }
        let table = betti_numbers(fan, true).map_err(|e| e.to_string())?;
        ensure(table.betti.as_ref() == Some(expected), || format!("{name}: Betti {:?}, expected {expected:?}", table.betti))?;
    }
    Ok(format!("{} golden Betti vectors", golden.len()))
}

fn check_noncomplete(name: &str, report: &Report) -> Result<(), String> {
    expect_pass(name, report)?;
    let table = report.table.as_ref().ok_or("report has no table")?;
    ensure(table.off_diagonal().is_empty(), || format!("{name}: off-diagonal classes {:?}", table.off_diagonal()))?;
    let betti = table.betti.as_ref().ok_or("no Betti numbers")?;
    ensure(betti.iter().skip(1).step_by(2).all(|&b| b == 0), || format!("{name}: odd Betti {betti:?}"))?;
    if report.theorem == "thm4.2" {
        ensure(
            report.checks.iter().any(|c| c.name.starts_with("chi_p(Star) + chi_p(delta)") && c.passed),
            || format!("{name}: Euler additivity not checked"),
        )?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    check_noncomplete("half-plane", &verify_vanishing(&half_plane(), &Regime::ConvexSupport, opts()))?;
    let mut bases = named_complete_fans();
    bases.extend(random_complete_corpus().into_iter().take(4).enumerate().map(|(i, f)| (format!("random #{i}"), f)));
    let mut count = 0;
    for (name, tilde) in &bases {
        for rho in tilde.cones_of_dim(1) {
            let delta = star_removal(tilde, rho).map_err(|e| e.to_string())?;
            let label = format!("{name} minus star of {}", tilde.cone(rho));
            check_noncomplete(&label, &verify_vanishing(&delta, &Regime::StarRemoval { tilde: tilde.clone(), rho }, opts()))?;
            count += 1;
        }
    }
    ensure(count >= 10, || format!("only {count} star-removal fans"))?;
    Ok(format!("half-plane and {count} star-removal fans"))
}

fn criterion_5() -> Outcome {
    let bases = [("P1", p1()), ("P1xP1", p1xp1()), ("P2", projective_space_fan(2))];
    let mut count = 0;
    for (name, base) in &bases {
        let n = base.rays().len();
        let mut etas = vec![vec![BigInt::from(0); n]];
        for i in 0..2 {
            etas.push(random_vector(&mut case_rng(55, count + i), n, 3).entries().to_vec());
        }
        for eta in &etas {
            let label = format!("{name} eta {eta:?}");
            let report = verify_phi_transfer(base, eta, opts());
            expect_pass(&label, &report)?;
            let graphs = ishida_core::polyhedral::graph_fans(base, eta).map_err(|e| e.to_string())?;
            for p in 0..=graphs.phi_tilde.rank() {
                let shift = star_shift_iso(&graphs.phi_tilde, graphs.rho, p).map_err(|e| format!("{label}: {e}"))?;
                shift.check_commutes().map_err(|e| format!("{label}: {e}"))?;
            }
            count += 1;
        }
    }
    ensure(count >= 9, || format!("only {count} combinations"))?;
    Ok(format!("{count} base/eta combinations"))
}

fn criterion_6() -> Outcome {
    let fans = [("P1", p1()), ("P2", projective_space_fan(2)), ("P1xP1", p1xp1())];
    let mut degrees = 0;
    for (name, fan) in &fans {
        for p in 0..=fan.rank() {
            build_k(fan, p).and_then(|k| k.check_identities()).map_err(|e| format!("{name} p={p}: {e}"))?;
            let check = total_cohomology_check(fan, p).map_err(|e| format!("{name} p={p}: {e}"))?;
            ensure(check.total == check.ishida, || format!("{name} p={p}: total {:?} vs Ishida {:?}", check.total, check.ishida))?;
            let direct = ishida_core::homology::rational_ranks(&build_ishida(fan, p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let (low, high) = check.total.split_at(direct.len());
            ensure(low == direct.as_slice() && high.iter().all(|&h| h == 0), || format!("{name} p={p}: total {:?} vs direct {direct:?}", check.total))?;
            ensure(check.rows_ok && check.columns_ok, || format!("{name} p={p}: rows {} columns {}", check.rows_ok, check.columns_ok))?;
            degrees += 1;
        }
    }
    Ok(format!("{} fans, {degrees} values of p", fans.len()))
}

fn criterion_7() -> Outcome {
    let plan = [(1usize, 40u64), (2, 60), (3, 60), (4, 40)];
    let mut total = 0;
    for (rank, count) in plan {
        let cases = fuzz(7, count, rank).map_err(|e| e.to_string())?;
        if let Some(bad) = cases.iter().find(|c| !c.failures.is_empty()) {
            return Err(format!("seed 7 rank {rank} case {}: {:?}\n{}", bad.index, bad.failures, save_fan(&bad.fan)));
        }
        total += cases.len();
    }
    ensure(total >= 200, || format!("only {total} fuzzed fans"))?;
    Ok(format!("{total} fuzzed fans (seed 7, ranks 1-4)"))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ishida")).args(args).env("ISHIDA_THREADS", "2").output().expect("run the CLI");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let write = |name: &str, text: &str| std::fs::write(Path::new(&path(name)), text).map_err(|e| e.to_string());

    for (file, args) in [("p2.json", vec!["build", "pr", "2"]), ("f1.json", vec!["build", "hirzebruch", "1"]), ("g.json", vec!["build", "gamma", "--rays", "1,0;1,2"])] {
        let (code, text) = run_cli(&args);
        ensure(code == 0, || format!("{args:?} exited {code}"))?;
        write(file, &text)?;
        let (code, _) = run_cli(&["validate", &path(file)]);
        ensure(code == 0, || format!("validate after {args:?} exited {code}"))?;
    }
    write("half.json", &save_fan(&half_plane()))?;

    let (pass, first) = run_cli(&["verify", &path("p2.json"), "--theorem", "prop4.1"]);
    ensure(pass == 0, || format!("prop4.1 on P2 exited {pass}"))?;
    let (_, second) = run_cli(&["verify", &path("p2.json"), "--theorem", "prop4.1"]);
    ensure(first == second, || "verify output is not deterministic".into())?;
    let (fail, _) = run_cli(&["verify", &path("p2.json"), "--theorem", "prop4.1", "--inject-fault"]);
    ensure(fail == 1, || format!("fault-injected run exited {fail}"))?;
    let (violation, _) = run_cli(&["verify", &path("half.json"), "--theorem", "prop4.1"]);
    ensure(violation == 2, || format!("prop4.1 on the half-plane exited {violation}"))?;
    let (cor, _) = run_cli(&["verify", &path("half.json"), "--theorem", "cor4.4"]);
    ensure(cor == 0, || format!("cor4.4 on the half-plane exited {cor}"))?;
    Ok("build->validate 0, PASS 0, injected FAIL 1, hypothesis violation 2".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("cone acyclicity", Duration::from_secs(10), criterion_1),
        ("complete simplicial vanishing and duality", Duration::from_secs(30), criterion_2),
        ("Betti golden values", Duration::from_secs(30), criterion_3),
        ("non-complete vanishing", Duration::from_secs(20), criterion_4),
        ("graph fans and star shift", Duration::from_secs(30), criterion_5),
        ("K double complex", Duration::from_secs(30), criterion_6),
        ("property suite", Duration::from_secs(60), criterion_7),
        ("CLI contract", Duration::from_secs(60), criterion_8),
    ];
    let mut all_passed = true;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.1?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                all_passed = false;
                println!("criterion {}: FAIL  {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
