//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use ergodiclab::averagers::{
    adjoint_average_schedule, entangled_average, entangled_average_oracle,
    mean_ergodic_average_schedule, rank_one_factorized_weak_average, AverageMode, OperatorChain,
    ORACLE_BUDGET,
};
use ergodiclab::dynamics::{trace_pairing_convergence, CompactSystem};
use ergodiclab::experiments::{render_csv, run_experiment, ExperimentConfig};
use ergodiclab::furstenberg::{
    diam_limit_check, tensor_fixed_projection, v_matrix, CyclicSystem,
};
use ergodiclab::limits::{
    cesaro_error_bound, conditional_expectation, entangled_limit, mean_ergodic_limit,
};
use ergodiclab::measure_model::{
    g_limit, g_n_value, recurrence_scan_measure, MeasureVector, RankOneChainSpec, SpectralMeasure,
    TrigPoly, WeakMixingModel,
};
use ergodiclab::num_core::random::{
    gaussian_matrix, haar_unitary_with, random_low_rank, random_unit_vector,
};
use ergodiclab::num_core::{singular_values, stream_rng, ComplexMatrix};
use ergodiclab::spectral::{enumerate_partitions, Partition, SlotPattern, UnitaryOperator};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// `[8, 16, …, 4096]`.
fn schedule() -> Vec<usize> {
    (3..=12).map(|k| 1usize << k).collect()
}

fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).unwrap()[0]
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: f64, limit: f64) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.1}s, limit {limit}s"))
}

fn min_gap_to_one(u: &UnitaryOperator) -> f64 {
    u.angles()
        .iter()
        .map(|&t| (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t)).norm())
        .fold(f64::INFINITY, f64::min)
}

fn min_pair_gap(u: &UnitaryOperator) -> f64 {
    let a = u.angles();
    let mut gap = f64::INFINITY;
    for i in 0..a.len() {
        for j in 0..i {
            gap = gap.min((Complex64::from_polar(1.0, a[i]) - Complex64::from_polar(1.0, a[j])).norm());
        }
    }
    gap
}

/// Haar unitary for `seed`, redrawn until `accept` holds. Returns the
/// unitary and the number of redraws.
fn haar_with_gap(dim: usize, seed: u64, accept: impl Fn(&UnitaryOperator) -> bool) -> (UnitaryOperator, usize) {
    let mut rng = stream_rng(seed, 0);
    for redraws in 0.. {
        let u = UnitaryOperator::from_matrix(haar_unitary_with(dim, &mut rng).unwrap()).unwrap();
        if accept(&u) {
            return (u, redraws);
        }
    }
    unreachable!()
}

fn mean_ergodic_bound() -> Check {
    let start = Instant::now();
    let sched = schedule();
    let results: Vec<Result<(f64, usize), String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let dim = 1 + (i as usize % 16);
            let (u, redraws) = haar_with_gap(dim, 1000 + i, |u| min_gap_to_one(u) >= 0.1);
            let limit = mean_ergodic_limit(&u);
            let means = mean_ergodic_average_schedule(&u, &sched).unwrap();
            let mut worst_ratio: f64 = 0.0;
            for (mean, &n) in means.iter().zip(&sched) {
                let err = op_norm(&(mean - &limit));
                let bound = u
                    .angles()
                    .iter()
                    .map(|&t| 2.0 / (n as f64 * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t)).norm()))
                    .fold(0.0, f64::max);
                ensure(err <= bound + 1e-9, || {
                    format!("instance {i} (dim {dim}) N={n}: error {err:e} > bound {bound:e}")
                })?;
                worst_ratio = worst_ratio.max(err / bound);
            }
            Ok((worst_ratio, redraws))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut redraws = 0;
    for r in results {
        let (w, d) = r?;
        worst = worst.max(w);
        redraws += d;
    }
    let secs = start.elapsed().as_secs_f64();
    within(secs, 30.0)?;
    Ok(format!("100 unitaries, max error/bound {worst:.3}, {redraws} redraws, {secs:.1}s"))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut cases = Vec::new();
    let mut skipped = 0;
    for m in 1..=4 {
        for partition in enumerate_partitions(m).unwrap() {
            for dim in 1..=4usize {
                for n in [1usize, 2, 4, 8, 16, 32] {
                    for seed in 0..5u64 {
                        let tuples = (n as f64).powi(partition.blocks() as i32) * m as f64;
                        if tuples > ORACLE_BUDGET {
                            skipped += 1;
                            continue;
                        }
                        cases.push((partition.clone(), dim, n, seed));
                    }
                }
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|(partition, dim, n, seed)| {
            let mut rng = stream_rng(*seed + 97 * *dim as u64, 1);
            let u = haar_unitary_with(*dim, &mut rng).unwrap();
            let ops = (1..partition.slots())
                .map(|_| random_low_rank(*dim, *dim, &mut rng))
                .collect();
            let chain = OperatorChain::from_matrix(u, partition.clone(), ops).unwrap();
            let fast = entangled_average(&chain, *n, &AverageMode::Matrix).unwrap();
            let slow = entangled_average_oracle(&chain, *n, &AverageMode::Matrix).unwrap();
            let diff = fast.matrix().max_abs_diff(slow.matrix());
            if diff <= 1e-10 {
                Ok(diff)
            } else {
                Err(format!("partition {partition} dim {dim} N={n} seed {seed}: {diff:e}"))
            }
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    let secs = start.elapsed().as_secs_f64();
    within(secs, 60.0)?;
    Ok(format!(
        "{} cases, max elementwise difference {worst:.1e}, {skipped} cases over the oracle budget skipped, {secs:.1}s",
        cases.len()
    ))
}

fn entangled_limit_check() -> Check {
    let u = UnitaryOperator::diagonal(&[0.0, PI / 2.0, PI]).unwrap();
    let partition = Partition::new(vec![1, 2, 1, 2]).unwrap();
    let pattern = SlotPattern::from_partition(&partition);
    let mut sched: Vec<usize> = (1..=64).collect();
    sched.extend([128, 256, 512, 1024, 2048, 4096]);
    let mut worst_final: f64 = 0.0;
    for seed in 0..3u64 {
        let mut rng = stream_rng(seed, 1);
        let ops: Vec<ComplexMatrix> = (0..3).map(|_| random_low_rank(3, 2, &mut rng)).collect();
        let norms: Vec<f64> = ops.iter().map(op_norm).collect();
        let limit = entangled_limit(&u, &partition, &ops).unwrap();
        let chain = OperatorChain::new(&u, partition.clone(), ops).unwrap();
        let errors: Vec<(usize, f64, f64)> = sched
            .par_iter()
            .map(|&n| {
                let avg = entangled_average(&chain, n, &AverageMode::Matrix).unwrap();
                let err = op_norm(&(avg.matrix() - &limit));
                (n, err, cesaro_error_bound(&u, &pattern, &norms, n).unwrap())
            })
            .collect();
        for &(n, err, bound) in &errors {
            ensure(err <= bound + 1e-9, || format!("seed {seed} N={n}: {err:e} > bound {bound:e}"))?;
        }
        let last = errors.last().unwrap().1;
        ensure(last <= 1e-2, || format!("seed {seed}: error {last:e} at N=4096"))?;
        worst_final = worst_final.max(last);
    }

    // diag(1, -1): every even N closes whole periods.
    let flip = UnitaryOperator::diagonal(&[0.0, PI]).unwrap();
    let mut rng = stream_rng(9, 1);
    let ops: Vec<ComplexMatrix> = (0..3).map(|_| random_low_rank(2, 2, &mut rng)).collect();
    let limit = entangled_limit(&flip, &partition, &ops).unwrap();
    let chain = OperatorChain::new(&flip, partition, ops).unwrap();
    let norms: Vec<f64> = chain.operators().iter().map(op_norm).collect();
    let mut flip_worst: f64 = 0.0;
    for n in (2..=64).step_by(2) {
        // Zero analytically; the computed mean still carries summation roundoff.
        let bound = cesaro_error_bound(&flip, &pattern, &norms, n).unwrap();
        ensure(bound == 0.0, || format!("diag(1,-1) N={n}: bound {bound:e} is not zero"))?;
        let avg = entangled_average(&chain, n, &AverageMode::Matrix).unwrap();
        flip_worst = flip_worst.max(op_norm(&(avg.matrix() - &limit)));
    }
    ensure(flip_worst <= 1e-14, || format!("diag(1,-1) error {flip_worst:e} at an even N"))?;
    Ok(format!(
        "max error at N=4096 {worst_final:.1e}; diag(1,-1) bound 0 and error {flip_worst:.1e} at even N"
    ))
}

fn rank_one_factorization() -> Check {
    let pairs: Vec<Vec<Partition>> = [2, 4, 6]
        .iter()
        .map(|&m| {
            enumerate_partitions(m)
                .unwrap()
                .into_iter()
                .filter(|p| p.is_pair_partition())
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = stream_rng(4000 + i, 1);
        let family = &pairs[i as usize % 3];
        let partition = family[rng.random_range(0..family.len())].clone();
        let dim = rng.random_range(2..=5);
        let n = rng.random_range(1..=24);
        let u = haar_unitary_with(dim, &mut rng).unwrap();
        let ops = (1..partition.slots())
            .map(|_| {
                let a = random_unit_vector(dim, &mut rng);
                let b = random_unit_vector(dim, &mut rng);
                ComplexMatrix::outer(&a, &b)
            })
            .collect();
        let x = random_unit_vector(dim, &mut rng);
        let y = random_unit_vector(dim, &mut rng);
        let chain = OperatorChain::from_matrix(u, partition.clone(), ops).unwrap();
        let fast = rank_one_factorized_weak_average(&chain, &x, &y, n).unwrap();
        let slow = entangled_average_oracle(&chain, n, &AverageMode::Weak { x, y })
            .unwrap()
            .scalar();
        let diff = (fast - slow).norm();
        ensure(diff <= 1e-9, || format!("instance {i} ({partition}, N={n}): {diff:e}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("50 instances, max difference {worst:.1e}"))
}

/// Unitary with repeated eigenvalues in a Haar basis.
fn degenerate_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryOperator {
    let distinct = rng.random_range(1..=dim);
    let offset = rng.random_range(0.0..TAU);
    let angles: Vec<f64> = (0..dim)
        .map(|i| offset + TAU * (i % distinct) as f64 / distinct as f64)
        .collect();
    let v = haar_unitary_with(dim, rng).unwrap();
    UnitaryOperator::conjugated(&v, &angles).unwrap()
}

fn conditional_expectation_check() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = stream_rng(5000 + i, 1);
        let dim = 1 + (i as usize % 12);
        let u = degenerate_unitary(dim, &mut rng);
        let a = gaussian_matrix(dim, dim, &mut rng);
        let e = |m: &ComplexMatrix| conditional_expectation(&u, m).unwrap();
        let ea = e(&a);
        let b1 = e(&gaussian_matrix(dim, dim, &mut rng));
        let b2 = e(&gaussian_matrix(dim, dim, &mut rng));
        let h = &a + &a.adjoint();
        let eh = e(&h);
        let checks = [
            ("idempotence", e(&ea).max_abs_diff(&ea)),
            ("contraction", (op_norm(&ea) - op_norm(&a)).max(0.0)),
            ("bimodule", e(&b1.matmul(&a).matmul(&b2)).max_abs_diff(&b1.matmul(&ea).matmul(&b2))),
            ("hermiticity", eh.max_abs_diff(&eh.adjoint())),
            ("adjoint", e(&a.adjoint()).max_abs_diff(&ea.adjoint())),
            ("unit", e(&ComplexMatrix::identity(dim)).max_abs_diff(&ComplexMatrix::identity(dim))),
        ];
        for (name, err) in checks {
            ensure(err <= 1e-10, || format!("pair {i} (dim {dim}): {name} off by {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("100 pairs, max defect {worst:.1e}"))
}

fn adjoint_average_check() -> Check {
    let sched = schedule();
    let pattern = SlotPattern::from_exponents(&[1, -1]).unwrap();
    let mut worst_final: f64 = 0.0;
    let mut redraws = 0;
    for i in 0..20u64 {
        let (u, r) = haar_with_gap(8, 6000 + i, |u| min_pair_gap(u) >= 0.1);
        redraws += r;
        let a = random_low_rank(8, 8, &mut stream_rng(6000 + i, 1));
        let a_norm = op_norm(&a);
        let limit = conditional_expectation(&u, &a).unwrap();
        let means = adjoint_average_schedule(&u, &a, &sched).unwrap();
        for (mean, &n) in means.iter().zip(&sched) {
            let err = op_norm(&(mean - &limit));
            let bound = cesaro_error_bound(&u, &pattern, &[a_norm], n).unwrap();
            ensure(err <= bound + 1e-9, || format!("instance {i} N={n}: {err:e} > bound {bound:e}"))?;
            if n == 4096 {
                ensure(err <= 1e-2, || format!("instance {i}: error {err:e} at N=4096"))?;
                worst_final = worst_final.max(err);
            }
        }
    }
    Ok(format!("20 instances, max error at N=4096 {worst_final:.1e}, {redraws} redraws"))
}

fn furstenberg_cyclic() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for p in (3..=31).step_by(2) {
        let system = CyclicSystem::new(p).unwrap();
        let mut rng = stream_rng(7000 + p as u64, 1);
        for _ in 0..20 {
            let diag: Vec<Complex64> = (0..p)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let a = ComplexMatrix::from_diagonal(&diag);
            let x = random_unit_vector(p, &mut rng);
            let check = diam_limit_check(&system, &a, &x, p).unwrap();
            let err = (&check.average - &check.limit)
                .as_slice()
                .iter()
                .fold(0.0, |m: f64, z| m.max(z.norm()));
            ensure(err <= 1e-12, || format!("p={p}: average differs from V(AΩ⊗x) by {err:e}"))?;
            worst = worst.max(err);
        }
        let v = v_matrix(&system);
        let proj = tensor_fixed_projection(&system).unwrap();
        let err = v.adjoint().matmul(&v).max_abs_diff(&proj);
        ensure(err <= 1e-12, || format!("p={p}: V*V differs from the fixed projection by {err:e}"))?;
        let rank = proj.trace().re;
        ensure((rank - p as f64).abs() <= 1e-12, || format!("p={p}: projection has trace {rank}"))?;
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    within(secs, 10.0)?;
    Ok(format!("p = 3..31, max difference {worst:.1e}, {secs:.1}s"))
}

fn trace_pairing() -> Check {
    let sched = schedule();
    let mut worst: f64 = 0.0;
    let mut redraws = 0;
    for i in 0..50u64 {
        let dim = 2 + (i as usize % 9);
        let (u, r) = haar_with_gap(dim, 8000 + i, |u| min_pair_gap(u) >= 0.1);
        redraws += r;
        let mut rng = stream_rng(8000 + i, 1);
        let t = gaussian_matrix(dim, dim, &mut rng);
        let a = gaussian_matrix(dim, dim, &mut rng);
        let report = trace_pairing_convergence(&CompactSystem::new(u), &t, &a, &sched).unwrap();
        ensure(report.within_bounds(1e-9), || format!("triple {i} (dim {dim}) exceeds ‖T‖₁·bound"))?;
        let last = report.values.last().unwrap().norm() / (report.trace_norm * report.operator_norm);
        ensure(last < 1e-2, || format!("triple {i}: relative value {last:e} at N=4096"))?;
        worst = worst.max(last);
    }
    Ok(format!("50 triples, max |Tr| / (‖T‖₁‖A‖) at N=4096 {worst:.1e}, {redraws} redraws"))
}

fn density(terms: &[(i64, f64)]) -> TrigPoly {
    let t: Vec<(i64, Complex64)> = terms.iter().map(|&(k, c)| (k, Complex64::new(c / TAU, 0.0))).collect();
    TrigPoly::from_terms(&t)
}

fn measure_model_gn() -> Check {
    let cfg = ExperimentConfig::from_path(&configs_dir().join("measure_gn_cos.json")).map_err(|e| e.to_string())?;
    let measures: Vec<SpectralMeasure> = cfg.build_measures().map_err(|e| e.to_string())?;
    let exponents = cfg.exponents().map_err(|e| e.to_string())?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    for row in &report.rows {
        let g = g_n_value(&measures, &exponents, row.n).unwrap();
        let want = 1.0 / row.n as f64;
        ensure((g - want).norm() <= 1e-12 && (row.weak_error - want).abs() <= 1e-12, || {
            format!("N={}: G_N = {g}, row {:e}", row.n, row.weak_error)
        })?;
    }

    // Atoms at rational angles: G_N hits the limit once N closes every period.
    let mut atomic_worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = stream_rng(9000 + seed, 1);
        let orders = [3usize, 4, 5];
        let k = rng.random_range(2..=3);
        let measures: Vec<SpectralMeasure> = (0..k)
            .map(|j| {
                let q = orders[j];
                let atoms = (0..q).map(|a| (TAU * a as f64 / q as f64, rng.random_range(0.1..1.0))).collect();
                SpectralMeasure::new(atoms, TrigPoly::zero()).unwrap()
            })
            .collect();
        let exps: Vec<i64> = (0..k).map(|_| rng.random_range(1..=3)).collect();
        let lcm = if k == 2 { 12 } else { 60 };
        let limit = g_limit(&measures, &exps).unwrap();
        for mult in 1..=3 {
            let err = (g_n_value(&measures, &exps, lcm * mult).unwrap() - limit).norm();
            ensure(err <= 1e-12, || format!("atomic seed {seed} N={}: off by {err:e}", lcm * mult))?;
            atomic_worst = atomic_worst.max(err);
        }
    }

    // Atomless densities.
    let densities = [
        density(&[(-1, 0.5), (0, 1.0), (1, 0.5)]),
        density(&[(-2, 0.3), (-1, 0.2), (0, 1.0), (1, 0.2), (2, 0.3)]),
        density(&[(-3, 0.25), (0, 1.0), (3, 0.25)]),
    ];
    let continuous: Vec<SpectralMeasure> = densities
        .iter()
        .map(|d| SpectralMeasure::new(Vec::new(), d.clone()).unwrap())
        .collect();
    let mut atomless_worst: f64 = 0.0;
    for exps in [vec![1, 2, 3], vec![1, 1, 1], vec![2, -1, 1]] {
        let limit = g_limit(&continuous, &exps).unwrap();
        ensure(limit == Complex64::new(0.0, 0.0), || format!("atomless limit {limit}"))?;
        let g = g_n_value(&continuous, &exps, 1 << 14).unwrap().norm();
        ensure(g <= 1e-2, || format!("atomless exponents {exps:?}: |G_N| = {g:e}"))?;
        atomless_worst = atomless_worst.max(g);
    }
    Ok(format!(
        "{} rows equal 1/N; atomic max error {atomic_worst:.1e}; atomless |G_(2^14)| ≤ {atomless_worst:.1e}",
        report.rows.len()
    ))
}

fn recurrence() -> Check {
    let model = WeakMixingModel::new(density(&[(-1, 0.5), (0, 1.0), (1, 0.5)])).unwrap();
    let cont = |terms: &[(i64, f64)]| {
        let t: Vec<(i64, Complex64)> = terms.iter().map(|&(k, c)| (k, Complex64::new(c, 0.0))).collect();
        TrigPoly::from_terms(&t)
    };
    // ω(A) = 0.3 + 0.4·0.5 = 0.5, with cross terms that mix Ω and its complement.
    let spec = RankOneChainSpec {
        omega_weight: Complex64::new(0.3, 0.0),
        terms: vec![(
            MeasureVector::new(vec![Complex64::new(0.5, 0.0)], cont(&[(0, -0.3), (1, 0.4)])),
            MeasureVector::new(vec![Complex64::new(0.4, 0.0)], cont(&[(-2, 0.2), (1, 0.3)])),
        )],
        exponents: vec![1, 2],
    };
    let omega = spec.omega_value(&model).unwrap();
    ensure((omega - 0.5).norm() <= 1e-15, || format!("ω(A) = {omega}"))?;
    let scan = recurrence_scan_measure(&model, &spec, 1 << 14).unwrap();
    let last = *scan.trace.last().unwrap();
    let err = (last - 0.125).norm();
    ensure(err <= 1e-2, || format!("|s_(2^14) - 0.125| = {err:e}"))?;
    let n0 = scan.n0.ok_or("no recurrence threshold")?;

    let trivial = RankOneChainSpec {
        omega_weight: Complex64::new(1.0, 0.0),
        terms: Vec::new(),
        exponents: vec![1, 2],
    };
    let flat = recurrence_scan_measure(&model, &trivial, 1 << 10).unwrap();
    ensure(flat.trace.iter().all(|&s| s == Complex64::new(1.0, 0.0)), || {
        "Ω-projection gives s_N ≠ 1".into()
    })?;
    Ok(format!("|s_(2^14) - 0.125| = {err:.1e}, N_0 = {n0}; Ω-projection gives s_N = 1"))
}

fn determinism() -> Check {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let mut names = Vec::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for path in paths {
        let cfg = ExperimentConfig::from_path(&path).map_err(|e| e.to_string())?;
        let run = |pool: &rayon::ThreadPool, tag: &str| -> Result<Vec<u8>, String> {
            let report = pool.install(|| run_experiment(&cfg)).map_err(|e| e.to_string())?;
            let out = dir.path().join(format!("{tag}.csv"));
            ergodiclab::emit_csv(&report, &out).map_err(|e| e.to_string())?;
            std::fs::read(&out).map_err(|e| e.to_string())
        };
        let a = run(&one, "a")?;
        let b = run(&eight, "b")?;
        let c = run(&eight, "c")?;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        ensure(a == b && b == c, || format!("{name}: CSV differs between runs"))?;
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        ensure(render_csv(&report).as_bytes() == a.as_slice(), || format!("{name}: file differs from rendered CSV"))?;
        names.push(name);
    }
    Ok(format!("{} shipped configs byte-identical at 1 and 8 threads", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("mean ergodic bound", mean_ergodic_bound),
        ("oracle equivalence", oracle_equivalence),
        ("entangled limit", entangled_limit_check),
        ("rank-one factorization", rank_one_factorization),
        ("conditional expectation", conditional_expectation_check),
        ("adjoint average bound", adjoint_average_check),
        ("cyclic model diagonal limit", furstenberg_cyclic),
        ("trace pairing", trace_pairing),
        ("measure model G_N", measure_model_gn),
        ("recurrence", recurrence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
