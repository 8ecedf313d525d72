use conedist_core::distance::{verify_equalities, Mode, SolveConfig};
use conedist_core::testgen::surjective_exact_instance;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn random_exact_instances_four_way() {
    let mut rng = StdRng::seed_from_u64(99991);
    let cfg = SolveConfig::<f64> {
        budget: 48,
        seed: 11,
        ..SolveConfig::default()
    };
    let mut worst_gap: f64 = 0.0;
    let mut inf_count = 0;
    let mut failures = 0_usize;
    let start = std::time::Instant::now();
    for trial in 0..200 {
        let inst = surjective_exact_instance::<f64>(&mut rng, 3, 2, false);
        let report = match verify_equalities(&inst.f, &inst.blocks, Mode::Exact, 1e-5, &cfg) {
            Ok(r) => r,
            Err(e) => panic!("trial {trial}: {e}\nA = {:?}\ncone rays {:?}", inst.f.matrix, inst.f.cone.rays()),
        };
        let q = report.quantities;
        if q.dual.is_infinite() {
            inf_count += 1;
        } else {
            worst_gap = worst_gap
                .max(q.rank_one.gap(q.dual))
                .max(q.phi_inf.gap(q.dual));
        }
        if !report.all_passed() {
            eprintln!(
                "trial {trial} FAIL: q1={} q2={} q3={} q4={} singular={:?} checks={:?}",
                q.general_upper,
                q.rank_one,
                q.dual,
                q.phi_inf,
                inst.f.is_singular().unwrap(),
                report.failures().iter().map(|c| c.name.clone()).collect::<Vec<_>>()
            );
            failures += 1;
        }
    }
    eprintln!("total failures: {failures}");
    eprintln!(
        "200 instances in {:.1}s, worst finite gap {worst_gap:.2e}, {} infinite",
        start.elapsed().as_secs_f64(),
        inf_count
    );
    panic!("inspect timings");
}
