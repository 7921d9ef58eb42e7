use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use motlab::lattice::{enumerate_tree, lift, LatticeParams, LiftOptions};
use motlab::measures::{DiscreteMeasure, Peacock};
use motlab::pathspace::{rho_t, Jump, MarginalFn, Payoff, StepPath, TimeGrid};
use motlab::penalized::dn_convergence_experiment;
use motlab::transport::{leaf_values, stability_sweep, Arith, SolverConfig};
use motlab::ExecMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn peacock() -> Peacock {
    let on = |xs: &[f64], ws: &[f64]| DiscreteMeasure::on_line(xs, ws).unwrap();
    Peacock::new(
        vec![0.0, 0.5, 1.0],
        vec![
            on(&[2.0], &[1.0]),
            on(&[1.0, 2.0, 3.0], &[0.25, 0.5, 0.25]),
            on(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.125, 0.1875, 0.375, 0.1875, 0.125]),
        ],
    )
    .unwrap()
}

fn corpus(len: usize) -> Vec<StepPath> {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    (0..len)
        .map(|_| {
            let mut ts: Vec<u32> = (0..r.gen_range(0..=5)).map(|_| r.gen_range(1..1024)).collect();
            ts.sort_unstable();
            ts.dedup();
            let jumps = ts
                .into_iter()
                .map(|q| Jump { t: f64::from(q) / 1024.0, value: vec![r.gen_range(0.0..3.0)] })
                .collect();
            StepPath::new(vec![r.gen_range(0.0..3.0)], jumps).unwrap()
        })
        .collect()
}

fn stability(c: &mut Criterion) {
    let p = peacock();
    let xi = Payoff::MarginalGrid { times: p.times().to_vec(), func: MarginalFn::AbsIncrement { from: 1, to: 2 } };
    let cfg = SolverConfig::Marginal { arith: Arith::Float };
    let radii = [0.2, 0.1, 0.05, 0.025, 0.0];
    let seeds: Vec<u64> = (1..=8).collect();
    let mut g = c.benchmark_group("stability_sweep");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| stability_sweep(black_box(&p), &xi, &cfg, &radii, &seeds, 1e-6, mode).unwrap())
        });
    }
    g.finish();
}

fn lift_corpus(c: &mut Criterion) {
    let paths = corpus(64);
    let grid = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
    let mut g = c.benchmark_group("lift_corpus");
    g.sample_size(10);
    for n in [4u32, 6] {
        for (name, mode) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| {
                    mode.map(&paths, |w| {
                        let lifted = lift(w, n, &grid, LiftOptions::default()).unwrap();
                        rho_t(w, &lifted.path.to_step_path().unwrap(), &grid).unwrap()
                    })
                })
            });
        }
    }
    g.finish();
}

fn penalized(c: &mut Criterion) {
    let mut params = LatticeParams::new(2, 1, vec![0.0, 0.5, 1.0], 2.0, 1);
    params.root = Some(vec![1.0]);
    let tree = enumerate_tree(&params).unwrap();
    let xi = Payoff::MarginalGrid { times: vec![1.0], func: MarginalFn::Call { index: 0, coord: 0, strike: 1.0 } };
    let vals: Vec<f64> = leaf_values(&tree, &xi).unwrap().into_iter().map(|v| v / 2.0).collect();
    let ns: Vec<f64> = (0..8).map(|k| f64::from(k) * 0.5).collect();
    let mut g = c.benchmark_group("dn_sweep");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| dn_convergence_experiment(&tree, black_box(&vals), &ns, 1e-8, mode).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, stability, lift_corpus, penalized);
criterion_main!(benches);
