use criterion::{criterion_group, criterion_main, Criterion};
use iontrap_cli::config::EtaRange;
use iontrap_cli::figure::{crossings, figure_points, FigureSpec};
use iontrap_core::Branch;

fn spec(rabi: f64) -> FigureSpec {
    FigureSpec {
        rabi,
        etas: EtaRange::DEFAULT.points(),
        branches: Branch::BOTH.to_vec(),
        oracle_cutoff: None,
    }
}

fn sweep(c: &mut Criterion) {
    let s = spec(3.0);
    c.bench_function("figure/omega3", |b| b.iter(|| figure_points(&s).unwrap()));
    c.bench_function("crossings/omega3", |b| b.iter(|| crossings(&s).unwrap()));
}

criterion_group!(benches, sweep);
criterion_main!(benches);
