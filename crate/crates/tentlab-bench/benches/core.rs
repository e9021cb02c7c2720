use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tentlab_bench::{tent, GOLDEN, TRIBONACCI};
use tentlab_core::glue::fiber_arc;
use tentlab_core::ilim::fiber;
use tentlab_core::measure::{density_grid, density_markov};
use tentlab_core::outside::{classify, sweep, TentType};
use tentlab_core::verify::GRID_TOL;

fn heights(c: &mut Criterion) {
    let g = tent(GOLDEN);
    let t = tent(TRIBONACCI);
    c.bench_function("classify/golden", |b| b.iter(|| classify(black_box(&g), 1000).unwrap()));
    c.bench_function("classify/tribonacci", |b| b.iter(|| classify(black_box(&t), 1000).unwrap()));
    let mut grp = c.benchmark_group("sweep");
    grp.sample_size(10);
    grp.bench_function("1.45..1.99/50", |b| b.iter(|| sweep("1.45", "1.99", 50, 400, 256).unwrap()));
    grp.finish();
}

fn densities(c: &mut Criterion) {
    let g = tent(GOLDEN);
    let f = tent("dec:\"1.62\"");
    c.bench_function("density/markov/golden", |b| b.iter(|| density_markov(black_box(&g)).unwrap()));
    let mut grp = c.benchmark_group("density/grid");
    grp.sample_size(10);
    for cells in [1usize << 10, 1 << 12] {
        grp.bench_function(format!("1.62/{cells}"), |b| b.iter(|| density_grid(&f, cells, GRID_TOL, 100_000).unwrap()));
    }
    grp.finish();
}

fn fibers(c: &mut Criterion) {
    let g = tent(GOLDEN);
    let x = g.param().from_f64(0.6123);
    let d = density_markov(&g).unwrap();
    for r in [8usize, 12] {
        c.bench_function(&format!("fiber/golden/r{r}"), |b| b.iter(|| fiber(&g, black_box(&x), r).unwrap()));
    }
    c.bench_function("fiber_arc/golden/r10", |b| {
        b.iter(|| fiber_arc(&g, &d, TentType::RationalEndpointMinus, black_box(&x), 10).unwrap())
    });
}

criterion_group!(benches, heights, densities, fibers);
criterion_main!(benches);
