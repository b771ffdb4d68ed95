use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sudoku_bounds::{
    admissibility_matrix, best_decomposition, bregman_minc_bound, composite_bound, count_solutions,
    herzberg_bound, make_layout, partly_filled_bound, permanent_naive, permanent_ryser, Grid,
    LayoutKind, PartlyFilledSpec,
};
use sudoku_bounds_bench::{diagonal_block_matrix, first_row_grid};

fn permanents(c: &mut Criterion) {
    let mut group = c.benchmark_group("permanent");
    for k in [2usize, 3, 4] {
        let a = diagonal_block_matrix(k);
        group.bench_with_input(BenchmarkId::new("ryser", 3 * k), &a, |b, a| {
            b.iter(|| permanent_ryser(black_box(a)).unwrap())
        });
        if 3 * k <= 9 {
            group.bench_with_input(BenchmarkId::new("naive", 3 * k), &a, |b, a| {
                b.iter(|| permanent_naive(black_box(a)).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("bregman_minc", 3 * k), &a, |b, a| {
            b.iter(|| bregman_minc_bound(black_box(a)))
        });
    }
    let g = first_row_grid();
    group.bench_function("admissibility_row2", |b| {
        b.iter(|| permanent_ryser(&admissibility_matrix(black_box(&g), 1).unwrap()).unwrap())
    });
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    c.bench_function("herzberg_bound/3", |b| {
        b.iter(|| herzberg_bound(black_box(3)).unwrap())
    });
    let spec = PartlyFilledSpec::new(3, 2, 2).unwrap();
    c.bench_function("partly_filled_bound/3,2,2", |b| {
        b.iter(|| partly_filled_bound(black_box(&spec)))
    });
    let big = PartlyFilledSpec::new(32, 16, 16).unwrap();
    c.bench_function("partly_filled_bound/32,16,16", |b| {
        b.iter(|| partly_filled_bound(black_box(&big)).ln())
    });
}

fn coupling(c: &mut Criterion) {
    let mut group = c.benchmark_group("best_decomposition");
    for kind in [LayoutKind::Shogun, LayoutKind::Sumo, LayoutKind::Stair(12)] {
        let layout = make_layout(kind).unwrap();
        group.bench_function(kind.to_string(), |b| {
            b.iter(|| {
                let d = best_decomposition(black_box(&layout), true).unwrap();
                composite_bound(&d, true).unwrap().ln_value
            })
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let empty = Grid::empty(2).unwrap();
    c.bench_function("count_solutions/n2", |b| {
        b.iter(|| count_solutions(black_box(&empty)).unwrap())
    });
}

criterion_group!(benches, permanents, closed_form, coupling, counting);
criterion_main!(benches);
