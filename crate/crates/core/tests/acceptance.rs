//! One test per acceptance criterion. Each prints a single PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::fs;
use std::path::Path;

use num_rational::Ratio;
use sdof_core::channel::{
    check_assumption1, interleave_expand, sample_channel_vector, BlockChannel, ChannelVector,
    CompoundPair, FadingModel, NormBounds,
};
use sdof_core::dof::{
    converse_sdof_bound, sdof_remark4, theoretical_sdof, verify_model, Verification, VerifyOptions,
};
use sdof_core::exec::Execution;
use sdof_core::experiment::{render_csv, render_verdict, run_suite, Overrides};
use sdof_core::linalg::{trace_re, RANK_TOL};
use sdof_core::precoding::{
    make_an_precoder, make_offset_scheme, make_repetition_precoder, transmit_covariance,
    PrecodingScheme,
};
use sdof_core::rate::{
    mc_mutual_information_oracle, mi_eavesdropper, mi_legitimate, secrecy_rate,
    worst_case_secrecy_rate, SearchBudget,
};

const SEED: u64 = 42;

fn grid() -> Vec<f64> {
    (4..=10).map(|e| 10f64.powi(e)).collect()
}

fn report(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion:>2}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn sweep(model: FadingModel, m: usize) -> Verification {
    let opts = VerifyOptions::default();
    assert!(opts.budget.n_random <= 200);
    verify_model(model, m, &grid(), SEED, &opts).unwrap()
}

fn vector(m: usize, seed: u64) -> ChannelVector {
    sample_channel_vector(m, NormBounds::default(), seed).unwrap()
}

fn varying(m: usize, t: usize, seed: u64) -> BlockChannel {
    BlockChannel::new((0..t as u64).map(|i| vector(m, seed + i)).collect(), (0..t).collect()).unwrap()
}

#[test]
fn criterion_01_different_coherence_formula() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for m in 1..=4usize {
        for q in 2..=5usize {
            for model in [
                FadingModel::DifferentCoherence { t_r: q, t_e: 1 },
                FadingModel::DifferentCoherence { t_r: 1, t_e: q },
                FadingModel::DifferentCoherence { t_r: 3 * q, t_e: 3 },
            ] {
                let expect = Ratio::new((m.min(q) - 1) as i64, q as i64);
                let theory = theoretical_sdof(model, m).unwrap();
                let converse = converse_sdof_bound(model, m).unwrap();
                checked += 1;
                if theory != expect || converse != expect {
                    bad.push(format!("{model} m={m}: theory {theory}, converse {converse}, expected {expect}"));
                }
            }
        }
    }
    report(1, bad.is_empty(), &format!("{checked} models checked exactly; mismatches {bad:?}"));
}

#[test]
fn criterion_02_offset_formula() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for t in 2..=6usize {
        for delta in 1..t {
            for m in 2..=4 {
                let model = FadingModel::Offset { t, delta };
                let expect = Ratio::new(delta.min(t - delta) as i64, t as i64);
                let theory = theoretical_sdof(model, m).unwrap();
                let converse = converse_sdof_bound(model, m).unwrap();
                checked += 1;
                if theory != expect || converse != expect {
                    bad.push(format!("{model} m={m}: theory {theory}, converse {converse}, expected {expect}"));
                }
            }
        }
    }
    report(2, bad.is_empty(), &format!("{checked} offset models checked exactly; mismatches {bad:?}"));
}

#[test]
fn criterion_03_artificial_noise_slope() {
    let v = sweep(FadingModel::DifferentCoherence { t_r: 2, t_e: 1 }, 2);
    let ok = (v.estimate.slope - 0.5).abs() <= 0.05;
    report(3, ok, &format!("AN T_r=2T_e m=2: slope {:.4} (target 0.5 +/- 0.05)", v.estimate.slope));
}

#[test]
fn criterion_04_repetition_slope_and_eavesdropper() {
    let model = FadingModel::DifferentCoherence { t_r: 1, t_e: 2 };
    let v = sweep(model, 2);
    let slope_ok = (v.estimate.slope - 0.5).abs() <= 0.05;

    let rep = make_repetition_precoder(2, 2).unwrap();
    let mut worst_rel: f64 = 0.0;
    for (i, &p) in grid().iter().enumerate() {
        let g = vector(2, 500 + i as u64);
        let searched = worst_case_secrecy_rate(&rep, model, p, &SearchBudget::default(), SEED).unwrap();
        let found_g = searched.pair.eve.block(0).clone();
        for g in [g, found_g] {
            let eve = BlockChannel::constant(g.clone(), 2).unwrap();
            let mi = mi_eavesdropper(&rep, &eve, p).unwrap();
            let expect = (1.0 + p * g.norm_sqr() / 2.0).log2();
            worst_rel = worst_rel.max((mi - expect).abs() / expect);
        }
    }
    let mi_ok = worst_rel <= 1e-9;
    report(
        4,
        slope_ok && mi_ok,
        &format!(
            "Repetition T_e=2T_r m=2: slope {:.4} (target 0.5 +/- 0.05); eavesdropper MI max rel error {worst_rel:.2e} (limit 1e-9)",
            v.estimate.slope
        ),
    );
}

#[test]
fn criterion_05_offset_slopes() {
    let a = sweep(FadingModel::Offset { t: 4, delta: 1 }, 2);
    let b = sweep(FadingModel::Offset { t: 4, delta: 2 }, 2);
    let ok = (a.estimate.slope - 0.25).abs() <= 0.05 && (b.estimate.slope - 0.5).abs() <= 0.05;
    report(
        5,
        ok,
        &format!(
            "Offset(4,1): slope {:.4} (target 0.25); Offset(4,2): slope {:.4} (target 0.5); tolerance 0.05",
            a.estimate.slope, b.estimate.slope
        ),
    );
}

#[test]
fn criterion_06_zero_secrecy_degenerates() {
    let mut models: Vec<(FadingModel, usize)> = (2..=6).map(|t| (FadingModel::Offset { t, delta: 0 }, 2)).collect();
    models.extend([
        (FadingModel::DifferentCoherence { t_r: 2, t_e: 1 }, 1),
        (FadingModel::DifferentCoherence { t_r: 1, t_e: 2 }, 1),
        (FadingModel::DifferentCoherence { t_r: 3, t_e: 1 }, 1),
        (FadingModel::Offset { t: 4, delta: 1 }, 1),
        (FadingModel::Offset { t: 4, delta: 2 }, 1),
    ]);
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for &(model, m) in &models {
        let v = sweep(model, m);
        worst = worst.max(v.estimate.slope.abs());
        if v.theory != Ratio::new(0, 1) || v.estimate.slope.abs() > 0.05 {
            bad.push(format!("{model} m={m}: theory {}, slope {:.4}", v.theory, v.estimate.slope));
        }
    }
    report(
        6,
        bad.is_empty(),
        &format!("{} degenerate models, theory 0, max |slope| {worst:.4}; failures {bad:?}", models.len()),
    );
}

#[test]
fn criterion_07_oracle_equivalence() {
    let configs: Vec<(&str, PrecodingScheme, BlockChannel, f64)> = vec![
        ("AN(2,2) legit P=100", make_an_precoder(2, 2, 1).unwrap(), BlockChannel::constant(vector(2, 1), 2).unwrap(), 100.0),
        ("AN(2,2) eve P=100", make_an_precoder(2, 2, 1).unwrap(), varying(2, 2, 10), 100.0),
        ("AN(2,2) eve P=10", make_an_precoder(2, 2, 2).unwrap(), varying(2, 2, 20), 10.0),
        ("AN(3,3) legit P=30", make_an_precoder(3, 3, 3).unwrap(), BlockChannel::constant(vector(3, 30), 3).unwrap(), 30.0),
        ("AN(2,3) eve P=50", make_an_precoder(2, 3, 4).unwrap(), varying(2, 3, 40), 50.0),
        ("Rep(2,2) legit P=100", make_repetition_precoder(2, 2).unwrap(), varying(2, 2, 50), 100.0),
        ("Rep(2,2) eve P=100", make_repetition_precoder(2, 2).unwrap(), BlockChannel::constant(vector(2, 60), 2).unwrap(), 100.0),
        ("Rep(3,3) legit P=20", make_repetition_precoder(3, 3).unwrap(), varying(3, 3, 70), 20.0),
        ("Offset(4,1) legit P=100", make_offset_scheme(4, 1, 2, 5).unwrap(), BlockChannel::constant(vector(2, 80), 4).unwrap(), 100.0),
        ("Offset(4,2) eve P=100", make_offset_scheme(4, 2, 2, 6).unwrap(),
            BlockChannel::new(vec![vector(2, 90), vector(2, 91)], vec![0, 0, 1, 1]).unwrap(), 100.0),
        ("Offset(3,1) eve P=10", make_offset_scheme(3, 1, 2, 7).unwrap(),
            BlockChannel::new(vec![vector(2, 95), vector(2, 96)], vec![0, 1, 1]).unwrap(), 10.0),
    ];
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (i, (label, scheme, channel, p)) in configs.iter().enumerate() {
        let exact = mi_legitimate(scheme, channel, *p).unwrap();
        let mc = mc_mutual_information_oracle(scheme, channel, *p, 1_000_000, 1000 + i as u64).unwrap();
        let rel = (mc - exact).abs() / exact;
        worst = worst.max(rel);
        if rel > 0.01 {
            bad.push(format!("{label}: closed form {exact:.5}, oracle {mc:.5}"));
        }
    }
    report(
        7,
        bad.is_empty() && configs.len() >= 10,
        &format!("{} configurations at 1e6 samples, max rel error {worst:.2e} (limit 1e-2); failures {bad:?}", configs.len()),
    );
}

#[test]
fn criterion_08_property_suites() {
    let mut failures = Vec::new();

    // rank invariants
    let mut rank_fail = 0;
    for seed in 0..100u64 {
        for m in 1..=4 {
            for k in 1..=m {
                let vs: Vec<_> = (0..k as u64).map(|i| vector(m, seed * 100 + i)).collect();
                let c = check_assumption1(&vs, m, RANK_TOL).unwrap();
                if !c.satisfied || c.rank != k {
                    rank_fail += 1;
                }
            }
            let vs: Vec<_> = (0..m as u64 + 2).map(|i| vector(m, seed * 100 + 50 + i)).collect();
            if check_assumption1(&vs, m, RANK_TOL).unwrap().rank != m {
                rank_fail += 1;
            }
        }
    }
    if rank_fail > 0 {
        failures.push(format!("rank: {rank_fail} failures"));
    }

    // power feasibility
    let mut schemes = Vec::new();
    for m in 1..=4 {
        for q in 1..=4 {
            schemes.push(make_an_precoder(m, q, (m * 10 + q) as u64).unwrap());
            schemes.push(make_repetition_precoder(m, q).unwrap());
        }
        for t in 2..=6 {
            for d in 1..t {
                schemes.push(make_offset_scheme(t, d, m, (t * 10 + d) as u64).unwrap());
            }
        }
    }
    let mut power_fail = 0;
    for s in &schemes {
        for p in [0.0, 0.5, 3.0, 1e4, 1e10] {
            let tr = trace_re(&transmit_covariance(s, p).unwrap());
            if tr > s.t_blocks() as f64 * p * (1.0 + 1e-12) {
                power_fail += 1;
            }
        }
    }
    if power_fail > 0 {
        failures.push(format!("power: {power_fail} failures"));
    }

    // MI nonnegativity and monotonicity
    let mut mi_fail = 0;
    for (k, s) in schemes.iter().enumerate() {
        let ch = varying(s.m(), s.t_blocks(), 7000 + 10 * k as u64);
        let mut last = 0.0;
        for e in -3..=10 {
            let mi = mi_legitimate(s, &ch, 10f64.powi(e)).unwrap();
            if mi < 0.0 || mi < last - 1e-9 {
                mi_fail += 1;
            }
            last = mi;
        }
    }
    if mi_fail > 0 {
        failures.push(format!("mutual information: {mi_fail} failures"));
    }

    // interleaving invariance
    let mut inter_fail = 0;
    let mut models = Vec::new();
    for q in 1..=5 {
        models.push(FadingModel::DifferentCoherence { t_r: q, t_e: 1 });
        models.push(FadingModel::DifferentCoherence { t_r: 1, t_e: q });
    }
    for t in 2..=6 {
        for d in 0..t {
            models.push(FadingModel::Offset { t, delta: d });
        }
    }
    for &model in &models {
        for m in 1..=4 {
            let base = theoretical_sdof(model, m).unwrap();
            for k in 1..=10 {
                let expanded = interleave_expand(model, std::num::NonZeroUsize::new(k).unwrap());
                if theoretical_sdof(expanded, m).unwrap() != base {
                    inter_fail += 1;
                }
            }
        }
    }
    if inter_fail > 0 {
        failures.push(format!("interleaving: {inter_fail} failures"));
    }

    // channel identity collapse
    let mut collapse_fail = 0;
    for (k, s) in schemes.iter().enumerate() {
        let h = varying(s.m(), s.t_blocks(), 9000 + 10 * k as u64);
        let pair = CompoundPair::new(h.clone(), h).unwrap();
        for p in [1.0, 1e5, 1e10] {
            if secrecy_rate(s, &pair, p).unwrap() != 0.0 {
                collapse_fail += 1;
            }
        }
    }
    if collapse_fail > 0 {
        failures.push(format!("identity collapse: {collapse_fail} failures"));
    }

    report(
        8,
        failures.is_empty(),
        &format!(
            "rank (100 seeds), power ({} schemes), MI grids, interleaving 1..10, H == G collapse; failures {failures:?}",
            schemes.len()
        ),
    );
}

#[test]
fn criterion_09_block_size_optimizer() {
    let c = sdof_remark4(5, 2).unwrap();
    let headline = c.value == Ratio::new(2, 5) && c.best_l == 2;
    let mut bad = Vec::new();
    for m in 1..=4usize {
        for q in 2..=5usize {
            let theory = theoretical_sdof(FadingModel::DifferentCoherence { t_r: q, t_e: 1 }, m).unwrap();
            let r = sdof_remark4(q, m).unwrap();
            if r.value < theory {
                bad.push(format!("q={q} m={m}: {} < {theory}", r.value));
            }
        }
    }
    report(
        9,
        headline && bad.is_empty(),
        &format!("sdof_remark4(5,2) = {} with best_l = {}; dominance violations {bad:?}", c.value, c.best_l),
    );
}

const SUITE: &str = r#"
[[experiment]]
name = "an"
seed = 42
m = 2
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "different_coherence", t_r = 2, t_e = 1 }

[[experiment]]
name = "repetition"
seed = 42
m = 2
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "different_coherence", t_r = 1, t_e = 2 }

[[experiment]]
name = "offset_4_1"
seed = 42
m = 2
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "offset", t = 4, delta = 1 }

[[experiment]]
name = "offset_4_2"
seed = 42
m = 2
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "offset", t = 4, delta = 2 }

[[experiment]]
name = "offset_4_0"
seed = 42
m = 2
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "offset", t = 4, delta = 0 }

[[experiment]]
name = "single_antenna"
seed = 42
m = 1
power_grid = { log10_min = 4, log10_max = 10, points = 7 }
model = { kind = "different_coherence", t_r = 2, t_e = 1 }
"#;

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_10_reproducibility() {
    let tmp = tempfile::tempdir().unwrap();
    let suite = tmp.path().join("suite.toml");
    fs::write(&suite, SUITE).unwrap();
    let mut trees = Vec::new();
    let mut all_pass = true;
    for run in ["a", "b"] {
        let root = tmp.path().join(run);
        fs::create_dir_all(&root).unwrap();
        let overrides = Overrides { output: Some(root.join("out").display().to_string()), ..Overrides::default() };
        let report = run_suite(&suite, &overrides).unwrap();
        all_pass &= report.all_pass && report.exit_code() == 0;
        trees.push(read_tree(&root));
    }
    let runs_identical = trees[0] == trees[1] && trees[0].len() == 13;

    let mut exec_identical = true;
    for (model, m) in [
        (FadingModel::DifferentCoherence { t_r: 2, t_e: 1 }, 2),
        (FadingModel::Offset { t: 4, delta: 1 }, 2),
    ] {
        let render = |execution| {
            let opts = VerifyOptions { execution, ..VerifyOptions::default() };
            let v = verify_model(model, m, &grid(), SEED, &opts).unwrap();
            (render_csv(&v), render_verdict(&v.verdict))
        };
        exec_identical &= render(Execution::Sequential) == render(Execution::Parallel);
    }
    report(
        10,
        runs_identical && exec_identical && all_pass,
        &format!(
            "six-config suite: {} files byte-identical across runs {runs_identical}, all pass {all_pass}; sequential == parallel {exec_identical}",
            trees[0].len()
        ),
    );
}
