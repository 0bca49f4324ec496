//! Microbenchmarks for the hydrodynamic building blocks: one segment
//! kernel evaluation, assembling (and factoring) the pair's mobility
//! system, and back-substituting for the nodal force densities.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::{Point3, Vector3};
use stokeswim_core::geometry::mount_pair;
use stokeswim_core::rss::{regularization_radius, segment_blocks, MobilitySystem};
use stokeswim_core::{DiscreteFlagellum, Handedness, HelixSpec};

fn table_spec() -> HelixSpec {
    HelixSpec {
        helix_radius: 6.36e-3,
        pitch: 31.8e-3,
        length: 95.4e-3,
        cross_section_radius: 1.58e-3,
        handedness: Handedness::Right,
        axis_origin: Point3::origin(),
        angular_speed: 29.32,
    }
}

fn pair() -> [DiscreteFlagellum; 2] {
    let spec = table_spec();
    mount_pair(&[spec, spec], 22e-3, 5e-3).expect("reference pair discretizes")
}

fn segment_kernel(c: &mut Criterion) {
    let start = Point3::new(0.0, 0.0, 0.0);
    let end = Point3::new(4.8e-3, 1.1e-3, -0.9e-3);
    let measure = Point3::new(2.1e-2, 1.3e-2, -3.5e-3);
    let reg = regularization_radius(1.58e-3);
    c.bench_function("segment_blocks", |b| {
        b.iter(|| segment_blocks(black_box(&start), &end, &measure, reg).unwrap())
    });
}

fn mobility(c: &mut Criterion) {
    let tails = pair();
    let chains: Vec<Vec<Point3<f64>>> = tails.iter().map(|t| t.nodes().to_vec()).collect();
    let reg = regularization_radius(1.58e-3);

    c.bench_function("mobility_assemble_and_factor_pair", |b| {
        b.iter(|| MobilitySystem::assemble(black_box(&chains), 1.0, reg).unwrap())
    });

    let system = MobilitySystem::assemble(&chains, 1.0, reg).unwrap();
    let velocities: Vec<Vector3<f64>> = tails
        .iter()
        .zip([29.32, -29.32])
        .flat_map(|(tail, rate)| tail.spin_velocities(rate))
        .collect();
    c.bench_function("mobility_solve_pair", |b| {
        b.iter(|| system.solve(black_box(&velocities)).unwrap())
    });
}

criterion_group!(benches, segment_kernel, mobility);
criterion_main!(benches);
