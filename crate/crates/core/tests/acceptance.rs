//! Acceptance suite. Runs every criterion at its stated scale and
//! tolerance, prints one PASS/FAIL line each, and exits non-zero if any
//! criterion fails.

mod common;

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use monocf::baselines::{ball_search, validate_local_trace};
use monocf::bench::{run_bench, Algo, BenchConfig, BenchReport};
use monocf::certificates::{certificate_complexity, minimal_certificates, restrict_until_constant, sensitivity};
use monocf::counterfactual::find_optimal_with_stats;
use monocf::general::{find_optimal_general, general_sensitivity, reduce, GeneralOracle};
use monocf::idt::materialize;
use monocf::model_core::{Dictator, RestrictedModel};
use monocf::{find_minimal, find_optimal, Certificate, Idt, Instance, Model, Oracle, Restriction, SearchConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ceil_log2(d: usize) -> u64 {
    (usize::BITS - (d.max(1) - 1).leading_zeros()) as u64
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let n = 500;
    for t in 0..n {
        let d = rng.gen_range(1..=12);
        let f = random_nonconstant_dnf(&mut rng, d);
        let x = random_instance(&mut rng, d);
        let (optima, dist) = bf_optimal(&f, &x).ok_or("generator produced a constant model")?;
        let r = find_optimal(&Oracle::new(&f), &x, &SearchConfig::default()).map_err(|e| e.to_string())?;
        ensure(r.distance == dist && r.optima == optima.iter().cloned().collect::<Vec<_>>(), || {
            format!("model {t} ({f:?}) at {x}: got {:?} at {}, expected {:?} at {dist}", r.optima, r.distance, optima)
        })?;
    }
    Ok(format!("{n}/{n} random DNFs (d <= 12) match brute force exactly"))
}

fn find_minimal_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let n = 300;
    let mut nonempty = 0;
    for t in 0..n {
        let d = rng.gen_range(2..=10);
        let f = random_nonconstant_dnf(&mut rng, d);
        let o = Oracle::new(&f);
        let idt = Idt::new(&o);
        let (rho, aux) = random_path(&idt, &mut rng, d);
        let x = random_instance(&mut rng, d);
        let k = rng.gen_range(0..=d);
        let got = find_minimal(&idt, &rho, &x, k, &aux).map_err(|e| e.to_string())?;
        let want = bf_minimal(&f, &rho, &x, k);
        ensure(got == want, || format!("triple {t}: rho {rho}, x {x}, k {k}: got {got:?}, expected {want:?}"))?;
        nonempty += !want.is_empty() as usize;
    }
    Ok(format!("{n}/{n} (model, rho, k) triples (d <= 10) exact; {nonempty} with non-empty answers"))
}

fn idt_exactness_and_depth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let models = zoo(&mut rng, 12);
    let mut worst = (0usize, 0usize);
    for (name, f) in &models {
        let o = Oracle::new(f.as_ref());
        let tree = materialize(&Idt::new(&o)).map_err(|e| format!("{name}: {e}"))?;
        for x in cube(f.dimension()) {
            ensure(tree.evaluate(&x) == f.evaluate(&x), || format!("{name}: tree disagrees with f at {x}"))?;
        }
        let s = bf_sensitivity(f.as_ref());
        ensure(tree.depth() <= 2 * s * s, || format!("{name}: depth {} > 2·S² = {}", tree.depth(), 2 * s * s))?;
        if tree.depth() * worst.1.max(1) > worst.0 * (2 * s * s).max(1) {
            worst = (tree.depth(), 2 * s * s);
        }
    }
    Ok(format!(
        "{} zoo models (d <= 12) exact on every cube point; tightest depth/bound {}/{}",
        models.len(),
        worst.0,
        worst.1
    ))
}

fn sensitivity_equals_certificate_complexity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let n = 120;
    for t in 0..n {
        let d = rng.gen_range(1..=10);
        let f = random_dnf(&mut rng, d);
        let s = bf_sensitivity(&f);
        let (c0, c1) = bf_cert_complexity(&f);
        ensure(s == c0.max(c1), || format!("model {t}: S = {s} but C = {}", c0.max(c1)))?;
        let lib = certificate_complexity(&f).map_err(|e| e.to_string())?;
        ensure(lib.c == s && lib.c0 == c0 && lib.c1 == c1, || format!("model {t}: library measures {lib:?} disagree"))?;
        let certs = minimal_certificates(&f).map_err(|e| e.to_string())?;
        for (a, va) in &certs {
            for (b, vb) in &certs {
                if va & !vb {
                    let clash = (0..d).any(|i| matches!((a.get(i), b.get(i)), (Some(p), Some(q)) if p != q));
                    ensure(clash, || format!("model {t}: 1-certificate {a} and 0-certificate {b} are compatible"))?;
                }
            }
        }
    }
    Ok(format!("{n} models (d <= 10): S = C and all minimal 0/1-certificate pairs intersect"))
}

fn restriction_constancy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let n = 1000;
    let mut max_ratio = (0usize, 1usize);
    for t in 0..n {
        let d = rng.gen_range(1..=10);
        let f = random_dnf(&mut rng, d);
        let s = bf_sensitivity(&f);
        let o = Oracle::new(&f);
        let mut pick = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut chooser = |c: &Certificate, _: &Restriction| (0..c.len()).map(|_| pick.gen_bool(0.5)).collect();
        let steps = restrict_until_constant(&o, s, &mut chooser).map_err(|e| format!("run {t}: {e}"))?;
        ensure(steps.len() <= 2 * s, || format!("run {t}: {} blocks with S = {s}", steps.len()))?;
        if let Some((_, last)) = steps.last() {
            ensure(is_constant(&RestrictedModel::new(&f, last.clone())), || format!("run {t}: not constant at the end"))?;
        }
        let (c0, c1) = bf_cert_complexity(&f);
        let mut prev = c0 + c1;
        for (_, rho) in &steps {
            let (a, b) = bf_cert_complexity(&RestrictedModel::new(&f, rho.clone()));
            ensure(a + b < prev, || format!("run {t}: C0+C1 went {prev} -> {} under {rho}", a + b))?;
            prev = a + b;
        }
        if s > 0 && steps.len() * max_ratio.1 > max_ratio.0 * 2 * s {
            max_ratio = (steps.len(), 2 * s);
        }
    }
    Ok(format!(
        "{n} runs (d <= 10): zero violations; most blocks used vs 2S: {}/{}",
        max_ratio.0, max_ratio.1
    ))
}

fn general_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let models = general_zoo(&mut rng, 80);
    let mut points = 0;
    for (m, f) in models.iter().enumerate() {
        let s = general_sensitivity(f.as_ref()).map_err(|e| e.to_string())?;
        let all = general_cube(f.space().values(), f.dimension());
        let step = 1 + all.len() / 64;
        for x in all.iter().step_by(step) {
            let (sets, dist) = bf_general_diff_sets(f.as_ref(), x).ok_or("constant general model")?;
            let r = find_optimal_general(&GeneralOracle::new(f.as_ref()), x, &SearchConfig::default())
                .map_err(|e| e.to_string())?;
            ensure(r.distance == dist && r.diff_sets == sets.iter().cloned().collect::<Vec<_>>(), || {
                format!("model {m} at {x}: got {:?}, expected {sets:?}", r.diff_sets)
            })?;
            let o = GeneralOracle::new(f.as_ref());
            let fx = reduce(&o, x).map_err(|e| e.to_string())?;
            let sx = sensitivity(&fx).map_err(|e| e.to_string())?;
            ensure(sx <= s, || format!("model {m} at {x}: S(f_x) = {sx} > S(f) = {s}"))?;
            points += 1;
        }
    }
    Ok(format!("{} general models (|X| <= 4, d <= 6), {points} instances: exact, S(f_x) <= S(f)", models.len()))
}

fn median(report: &BenchReport, algo: Algo, d: usize) -> Result<f64, String> {
    report
        .cells
        .iter()
        .find(|c| c.algo == algo && c.params.d == d)
        .map(|c| c.queries.median)
        .ok_or_else(|| format!("no cell for {algo:?} at d={d}"))
}

fn query_scaling() -> Outcome {
    let cfg = BenchConfig::from_json(
        r#"{"family":"planted","d":[32,64,128,256],"S":[8],"delta":[2],"algos":["idt","ball"],"trials":50,"seed":7}"#,
    )
    .map_err(|e| e.to_string())?;
    let report = run_bench(&cfg).map_err(|e| e.to_string())?;
    for c in &report.cells {
        ensure(c.errors == 0 && c.success_rate == 1.0, || format!("{:?} at d={}: {c:?}", c.algo, c.params.d))?;
    }
    let curve = |algo| -> Result<Vec<f64>, String> { [32, 64, 128, 256].iter().map(|&d| median(&report, algo, d)).collect() };
    let idt = curve(Algo::Idt)?;
    let ball = curve(Algo::Ball)?;
    let (ri, rb) = (idt[3] / idt[0], ball[3] / ball[0]);
    let detail = format!("medians idt {idt:?} (x{ri:.2}), ball {ball:?} (x{rb:.1})");
    ensure(ri <= 5.0 && rb >= 50.0, || detail.clone())?;
    Ok(detail)
}

fn query_budgets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let models = zoo(&mut rng, 12);
    let mut runs = 0;
    let mut tightest = 0.0f64;
    for (name, f) in &models {
        let d = f.dimension();
        let s = bf_sensitivity(f.as_ref()) as u64;
        let log = ceil_log2(d);
        let h = 2 * s * s;
        let xs: Vec<Instance> = if d <= 8 {
            cube(d)
        } else {
            (0..64).map(|_| random_instance(&mut rng, d)).collect()
        };
        for x in xs {
            let o = Oracle::new(f.as_ref());
            let (r, stats) = find_optimal_with_stats(&o, &x, &SearchConfig::default()).map_err(|e| format!("{name}: {e}"))?;
            ensure(stats.idt.max_is_leaf_queries == 2, || format!("{name}: is_leaf spent {}", stats.idt.max_is_leaf_queries))?;
            let refill_cap = 2 * s * log + 2;
            ensure(stats.idt.max_refill_queries <= refill_cap, || {
                format!("{name}: refill spent {} > {refill_cap}", stats.idt.max_refill_queries)
            })?;
            for (k, pass) in stats.passes.iter().enumerate() {
                let cap = (h + 1).saturating_pow(k as u32 + 1).saturating_mul(2);
                ensure(pass.calls <= cap && pass.idt_calls <= cap && pass.hybrid_queries <= cap, || {
                    format!("{name} at {x}, pass {}: {pass:?} over 2(h+1)^k = {cap}", k + 1)
                })?;
            }
            let bound = 4u128
                .saturating_mul((2 * s as u128 * s as u128 + 1).saturating_pow(r.distance as u32 + 1))
                .saturating_mul(2 * s as u128 * log as u128 + 4);
            ensure(r.queries as u128 <= bound, || format!("{name} at {x}: {} queries > {bound}", r.queries))?;
            tightest = tightest.max(r.queries as f64 / bound as f64);
            runs += 1;
        }
    }
    Ok(format!(
        "{} zoo models, {runs} runs: zero violations; max queries/end-to-end bound = {tightest:.4}",
        models.len()
    ))
}

fn local_search() -> Outcome {
    let trials = 1000;
    let cfg = BenchConfig::from_json(&format!(
        r#"{{"family":"dictator","d":[200],"algos":["ball-budget","random-probe","random-walk"],"trials":{trials},"seed":9,"budget":20,"check_locality":true}}"#
    ))
    .map_err(|e| e.to_string())?;
    let report = run_bench(&cfg).map_err(|e| e.to_string())?;
    let p = 20.0 / 200.0;
    let limit = p + 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let mut rates = Vec::new();
    for c in &report.cells {
        ensure(c.errors == 0, || format!("{:?}: {} errors", c.algo, c.errors))?;
        ensure(c.success_rate <= limit, || format!("{:?}: success {} > {limit:.4}", c.algo, c.success_rate))?;
        ensure(c.nonlocal_rate == Some(0.0), || format!("{:?}: non-local queries", c.algo))?;
        rates.push(format!("{:?}={}", c.algo, c.success_rate));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let runs = 300;
    let mut nonlocal = 0;
    for _ in 0..runs {
        let d = rng.gen_range(8..=64);
        let f = Dictator::new(d, rng.gen_range(0..d)).map_err(|e| e.to_string())?;
        let x = random_instance(&mut rng, d);
        let o = Oracle::new(&f).with_trace();
        ball_search(&o, &x).map_err(|e| e.to_string())?;
        ensure(validate_local_trace(&o.trace(), &x), || format!("ball search trace not local at d={d}"))?;
        let o = Oracle::new(&f).with_trace();
        find_optimal(&o, &x, &SearchConfig::default()).map_err(|e| e.to_string())?;
        nonlocal += !validate_local_trace(&o.trace(), &x) as usize;
    }
    let frac = nonlocal as f64 / runs as f64;
    ensure(frac >= 0.9, || format!("only {frac:.3} of find_optimal traces are non-local"))?;
    Ok(format!(
        "success {} <= {limit:.4}; {runs}/{runs} ball traces local; {:.1}% find_optimal traces non-local",
        rates.join(", "),
        100.0 * frac
    ))
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_monocf")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("wall_time_ms");
    Ok(v)
}

fn cli_round_trip() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut confirmed = 0;
    let mut models = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for path in &paths {
        let m = path.display().to_string();
        let spec: Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let d = spec["d"].as_u64().ok_or("model without d")? as usize;
        let built = monocf::ModelSpec::load(path).and_then(|s| s.build()).map_err(|e| e.to_string())?;
        if is_constant(built.as_ref()) {
            continue;
        }
        models += 1;
        for _ in 0..4 {
            let x = random_instance(&mut rng, d).to_string();
            for algo in ["idt", "ball"] {
                let args = ["explain", "--model", &m, "--instance", &x, "--algo", algo, "--seed", "11"];
                let a = run_cli(&args)?;
                let b = run_cli(&args)?;
                ensure(serde_json::to_string(&a).ok() == serde_json::to_string(&b).ok(), || {
                    format!("{m} {x} {algo}: reports differ")
                })?;
                for y in a["results"]["optima"].as_array().ok_or("no optima")? {
                    let y = y.as_str().ok_or("optimum is not a string")?;
                    let v = run_cli(&["verify", "--model", &m, "--instance", &x, "--candidate", y])?;
                    let r = &v["results"];
                    ensure(r["counterfactual"] == true && r["minimal"] == true && r["optimal"] == true, || {
                        format!("{m} {x}: verify rejected {y}: {r}")
                    })?;
                    confirmed += 1;
                }
            }
        }
    }
    let general = dir.join("general").join("threshold.json").display().to_string();
    let a = run_cli(&["explain-general", "--model", &general, "--instance", "0,1"])?;
    let b = run_cli(&["explain-general", "--model", &general, "--instance", "0,1"])?;
    ensure(a == b, || "explain-general reports differ".into())?;
    Ok(format!("{models} bundled models: {confirmed} optima verified; repeated runs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence, 60),
        ("FindMinimal correctness", find_minimal_correctness, 60),
        ("IDT exactness and depth", idt_exactness_and_depth, 120),
        ("sensitivity equals certificate complexity; certificates intersect", sensitivity_equals_certificate_complexity, 120),
        ("restriction-sequence constancy", restriction_constancy, 60),
        ("general-feature reduction", general_reduction, 60),
        ("query-scaling separation", query_scaling, 600),
        ("per-operation query budgets", query_budgets, 120),
        ("local-search phenomena", local_search, 120),
        ("CLI round-trip and determinism", cli_round_trip, 30),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(*limit) => Err(format!("{detail}; took {took:.1?}, limit {limit}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({took:.1?})", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why} ({took:.1?})", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
