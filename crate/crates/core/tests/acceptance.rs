//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails when any check fails, except checks listed as known
//! deviations (explained in the project notes); those still print FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rssp_core::cost::Mode;
use rssp_core::em::{em_solve, join_level, two_phase_join, EmParams, Keyed};
use rssp_core::exact::{brute_force, meet_in_middle};
use rssp_core::harness::{
    gap_grid, run_experiment, ExperimentConfig, GammaCheckConfig, Heuristic1Config, WalkCheckConfig,
};
use rssp_core::optimizer::{optimize, reproduce_table1, OptimizeOptions};
use rssp_core::rng::{Purpose, SeedStream};
use rssp_core::walk::spectral_gap_exact;
use rssp_core::{generate_instance, BinVector};

struct Check {
    label: String,
    pass: bool,
    /// Expected to fail; does not fail the suite.
    known: bool,
}

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, checks: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, pass: bool, label: impl Into<String>) {
        self.checks.push(Check { label: label.into(), pass, known: false });
    }

    fn known(&mut self, pass: bool, label: impl Into<String>) {
        self.checks.push(Check { label: label.into(), pass, known: true });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.check(took < limit, format!("runtime {:.1}s < {}s", took.as_secs_f64(), limit.as_secs()));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn blocking(&self) -> bool {
        self.checks.iter().any(|c| !c.pass && !c.known)
    }

    fn print(&self) {
        let status = if self.passed() {
            "PASS"
        } else if self.blocking() {
            "FAIL"
        } else {
            "FAIL (known deviation)"
        };
        println!("criterion {} {status}: {}", self.id, self.title);
        for c in &self.checks {
            let mark = match (c.pass, c.known) {
                (true, _) => "ok",
                (false, true) => "known-fail",
                (false, false) => "FAIL",
            };
            println!("    [{mark}] {}", c.label);
        }
        for n in &self.notes {
            println!("    note: {n}");
        }
    }
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn c1() -> Criterion {
    let mut c = Criterion::new(1, "depth-4 quantum optimum");
    let start = Instant::now();
    let r = optimize(4, Mode::Quantum, 1e-4, &OptimizeOptions::default()).expect("optimizer runs");
    c.within(start, Duration::from_secs(60));
    c.check(near(r.t, 0.2090, 0.002), format!("T = {:.5} vs 0.2090 +- 0.002", r.t));
    c.check(near(r.params.beta, 0.9412, 0.01), format!("beta = {:.5} vs 0.9412 +- 0.01", r.params.beta));
    // the quoted alpha = 0.188 is incompatible with L0 = H(alpha)/2 = T
    c.known(
        near(r.params.alpha, 0.188, 0.01),
        format!("alpha = {:.5} vs 0.188 +- 0.01", r.params.alpha),
    );
    for (k, (&got, want)) in r.params.lambda.iter().zip([0.184, 0.209, 0.188]).enumerate() {
        c.check(near(got, want, 0.01), format!("lambda_{} = {got:.5} vs {want} +- 0.01", k + 1));
    }
    c.note(format!(
        "L0 = H(alpha)/2 = {:.5} at the optimum; H(0.188)/2 = 0.3486 would exceed T",
        r.breakdown.exponents.l0
    ));
    c
}

fn c2_c3() -> (Criterion, Criterion) {
    let mut c = Criterion::new(2, "Table 1 reproduction, d = 3..8");
    let start = Instant::now();
    let rows = reproduce_table1(1e-4, &OptimizeOptions::default()).expect("table runs");
    c.within(start, Duration::from_secs(600));
    for r in &rows {
        c.check(
            near(r.t_quantum, r.paper_t_quantum, 0.002),
            format!("d={} quantum {:.5} vs {:.4}", r.depth, r.t_quantum, r.paper_t_quantum),
        );
        c.check(
            near(r.t_classical, r.paper_t_classical, 0.002),
            format!("d={} classical {:.5} vs {:.4}", r.depth, r.t_classical, r.paper_t_classical),
        );
    }
    let best = rows.iter().min_by(|a, b| a.t_quantum.total_cmp(&b.t_quantum)).unwrap();
    c.check(best.depth == 4, format!("quantum minimum over depths at d = {}", best.depth));
    for r in &rows {
        c.note(format!("d={} beta {:.5} (table {:.4})", r.depth, r.beta, r.paper_beta));
    }

    let mut c3 = Criterion::new(3, "classical depth-4 optimum rounds to 0.266");
    let d4 = rows.iter().find(|r| r.depth == 4).unwrap();
    let rounded = (d4.t_classical * 1000.0).round() / 1000.0;
    c3.check(rounded == 0.266, format!("T = {:.5} rounds to {rounded:.3}", d4.t_classical));
    c3.check(near(d4.t_classical, 0.2659, 0.002), format!("T = {:.5} vs 0.2659", d4.t_classical));
    (c, c3)
}

fn c4() -> Criterion {
    let mut c = Criterion::new(4, "solver correctness on planted instances");
    let start = Instant::now();
    let params = EmParams { level0_size: Some(16), ..EmParams::new(0.125, vec![1, 2, 2]).with_retries(10) };
    let streams = SeedStream::new(4);
    for (n, count) in [(16usize, 100u32), (20, 50)] {
        let results: Vec<(bool, bool, bool)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let seed: u64 = streams.rng(Purpose::Instance, n as u32 * 1000 + i).gen();
                let (inst, _) = generate_instance(n, seed).unwrap();
                let em = em_solve(&inst, &params, &mut streams.rng(Purpose::Solver, n as u32 * 1000 + i)).unwrap();
                let em_ok = em.is_none_or(|x| inst.is_solution(&x));
                let any = !brute_force(&inst, false).unwrap().is_empty();
                let mitm = meet_in_middle(&inst).unwrap();
                let agree = mitm.is_some() == any && mitm.is_none_or(|x| inst.verify(&x).unwrap());
                (em_ok, agree, em.is_some())
            })
            .collect();
        let em_ok = results.iter().filter(|r| r.0).count();
        let agree = results.iter().filter(|r| r.1).count();
        let found = results.iter().filter(|r| r.2).count();
        c.check(em_ok == count as usize, format!("n={n}: {em_ok}/{count} em outputs verify with weight n/2"));
        c.check(agree == count as usize, format!("n={n}: {agree}/{count} mitm agrees with brute force"));
        c.note(format!("n={n}: em returned a solution on {found}/{count}"));
    }
    c.within(start, Duration::from_secs(300));
    c
}

fn c5(dir: &std::path::Path) -> Criterion {
    let mut c = Criterion::new(5, "Heuristic 1 at n = 32, beta = 1 (soft gate)");
    let cfg = Heuristic1Config::default();
    let s = run_experiment(&ExperimentConfig::Heuristic1(cfg.clone()), dir).expect("experiment runs");
    let mean = s.metrics["mean_representations"].as_f64().unwrap();
    c.check(s.metrics["emc_feasible"] == true, format!("alpha {} l {:?} satisfies the EMC constraints", cfg.alpha, cfg.l));
    c.check(dir.join("heuristic1.csv").exists(), "distribution written to heuristic1.csv");
    // asymptotic constraints leave too few representations at n = 32
    c.known(mean >= 0.5, format!("mean count {mean:.3} over {} runs >= 0.5", cfg.runs));

    let small = Heuristic1Config { n: 16, alpha: 0.125, l: vec![1, 2, 2], level0_size: Some(16), ..cfg };
    let s16 = run_experiment(&ExperimentConfig::Heuristic1(small), &dir.join("n16")).expect("experiment runs");
    c.note(format!(
        "context n=16, alpha 0.125, l (1,2,2): mean {:.2}, {} of 100 runs hold a solution",
        s16.metrics["mean_representations"].as_f64().unwrap(),
        s16.metrics["runs_with_solution"]
    ));
    c
}

fn c6(dir: &std::path::Path) -> Criterion {
    let mut c = Criterion::new(6, "walk coherence, n = 16, r = 8, 100 steps, 20 seeds");
    let start = Instant::now();
    let s = run_experiment(&ExperimentConfig::Walkcheck(WalkCheckConfig::default()), dir).expect("experiment runs");
    c.within(start, Duration::from_secs(120));
    for name in ["incremental_equals_rebuild", "set_count", "a_b_mirror"] {
        let a = s.assertion(name).expect("assertion present");
        c.check(a.passed, format!("{name}: {}", a.detail));
    }
    c.check(s.metrics["compared"] == 20, format!("{} of 20 seeds compared", s.metrics["compared"]));
    c
}

fn c7() -> Criterion {
    let mut c = Criterion::new(7, "Johnson graph spectral gaps");
    let g42 = spectral_gap_exact(4, 2, 1).unwrap();
    let g52 = spectral_gap_exact(5, 2, 1).unwrap();
    let g52m2 = spectral_gap_exact(5, 2, 2).unwrap();
    c.check(near(g42, 1.0, 1e-9), format!("delta(J(4,2)) = {g42:.12}"));
    c.check(near(g52, 5.0 / 6.0, 1e-9), format!("delta(J(5,2)) = {g52:.12}"));
    c.check(g52m2 >= 0.5 * g52 - 1e-12, format!("delta(J^2(5,2)) = {g52m2:.12} >= {:.12}", 0.5 * g52));
    let grid = gap_grid(64);
    let bad: Vec<_> = grid
        .par_iter()
        .filter(|&&(n, r)| spectral_gap_exact(n, r, 1).unwrap() < 1.0 / r as f64 - 1e-12)
        .collect();
    c.check(bad.is_empty(), format!("delta(J(N,r)) >= 1/r on all {} graphs with C(N,r) <= 64", grid.len()));
    c
}

fn c8(dir: &std::path::Path) -> Criterion {
    let mut c = Criterion::new(8, "level-2 filter rate 1 - alpha^2 at n = 32");
    let s = run_experiment(&ExperimentConfig::Gammacheck(GammaCheckConfig::default()), dir).expect("experiment runs");
    for a in s.assertions.iter().filter(|a| a.name.starts_with("level2")) {
        c.check(a.passed, format!("{}: {}", a.name, a.detail));
    }
    c.check(s.assertions.len() == 3, "alphas 0.1, 0.2, 0.3 covered");
    c.note(format!("level-3 data supports the {} gamma reading", s.metrics["level3_supports"].as_str().unwrap()));
    c
}

fn random_list(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<Keyed> {
    (0..len)
        .map(|_| {
            let bits = rng.gen::<u64>() & ((1u64 << n) - 1) & rng.gen::<u64>();
            (rng.gen::<u64>() & ((1u64 << n) - 1), BinVector::from_bits(bits, n).unwrap())
        })
        .collect()
}

fn c9() -> Criterion {
    let mut c = Criterion::new(9, "fused join equals two-phase join");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut equal = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(4..=24);
        let (a, b) = (rng.gen_range(0..=128), rng.gen_range(0..=128));
        let left = random_list(&mut rng, n, a);
        let right = random_list(&mut rng, n, b);
        let bits = rng.gen_range(0..=4u32).min(n as u32);
        let residue = rng.gen::<u64>() & ((1u64 << bits) - 1);
        let mut fused = join_level(&left, &right, bits, residue, n).unwrap().merged;
        let mut naive = two_phase_join(&left, &right, bits, residue, n);
        fused.sort();
        naive.sort();
        equal += (fused == naive) as usize;
    }
    c.check(equal == 1000, format!("{equal}/1000 random list pairs identical"));
    c
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let total = Instant::now();
    let mut all = vec![c1()];
    let (c2, c3) = c2_c3();
    all.push(c2);
    all.push(c3);
    all.push(c4());
    all.push(c5(&dir.path().join("heuristic1")));
    all.push(c6(&dir.path().join("walkcheck")));
    all.push(c7());
    all.push(c8(&dir.path().join("gammacheck")));
    all.push(c9());
    all.sort_by_key(|c| c.id);
    println!();
    for c in &all {
        c.print();
    }
    let passed = all.iter().filter(|c| c.passed()).count();
    let blocking: Vec<u32> = all.iter().filter(|c| c.blocking()).map(|c| c.id).collect();
    println!(
        "\nacceptance: {passed}/{} criteria pass in {:.1}s; unexpected failures: {:?}",
        all.len(),
        total.elapsed().as_secs_f64(),
        blocking
    );
    if blocking.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
