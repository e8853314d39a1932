use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tritronq_core::Rational;

use tritronq_core::exact_scalars::q;
use tritronq_core::pieces::{x0_plus_r, y0_d23_poly};
use tritronq_core::{par, Ball};

const PREC: u32 = 256;

// one grid cell: enclose y0 over [a, b] through its midpoint and the radius
fn cell(a: &Rational, b: &Rational) -> Ball {
    let p = y0_d23_poly();
    let mid = Rational::from(a + b) / 2u32;
    let half = Rational::from(b - a) / 2u32;
    let t = Ball::from_rational(&Rational::from(&mid - &p.center), PREC).add_error_rational(&half);
    p.eval_ball(&t).unwrap()
}

fn cells(n: usize) -> Vec<(Rational, Rational)> {
    let lo = x0_plus_r();
    let w = Rational::from(q(11, 2) - &lo) / n as u32;
    (0..n)
        .map(|i| (Rational::from(&lo + Rational::from(&w * i as u32)), Rational::from(&lo + Rational::from(&w * (i + 1) as u32))))
        .collect()
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid_cells");
    for n in [64usize, 512] {
        let grid = cells(n);
        g.bench_with_input(BenchmarkId::new("sequential", n), &grid, |bch, grid| {
            bch.iter(|| grid.iter().map(|(a, b)| cell(a, b)).collect::<Vec<_>>())
        });
        g.bench_with_input(BenchmarkId::new(if par::is_parallel() { "rayon" } else { "fallback" }, n), &grid, |bch, grid| {
            bch.iter(|| par::map(grid, |(a, b)| cell(a, b)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
