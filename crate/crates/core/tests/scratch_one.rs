use conedist_core::distance::{distance_dual, dual_built_assignment, Mode, SolveConfig};
use conedist_core::testgen::surjective_exact_instance;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn dissect_trial_130() {
    let mut rng = StdRng::seed_from_u64(99991);
    let cfg = SolveConfig::<f64> { budget: 48, seed: 11, ..SolveConfig::default() };
    for trial in 0..=130 {
        let inst = surjective_exact_instance::<f64>(&mut rng, 3, 2, false);
        if trial < 130 { continue; }
        eprintln!("A = {:?} cone_class={:?}", inst.f.matrix, inst.f.cone.class());
        eprintln!("rays: {:?}", inst.f.cone.rays());
        for b in &inst.blocks {
            eprintln!("block {}: P={:?} Q={:?} U={:?}({}) V={:?}({})", b.index, b.p, b.q, b.u_space.norm, b.u_space.dim, b.v_space.norm, b.v_space.dim);
        }
        let (alpha, cert) = distance_dual(&inst.f, &inst.blocks, Mode::Exact, &cfg).unwrap();
        let cert = cert.unwrap();
        eprintln!("alpha = {alpha} residual = {:e} y*={:?} z={:?} u*={:?}", cert.residual, cert.y_star, cert.z, cert.u_star);
        let built = dual_built_assignment(&inst.f, &inst.blocks, &cert).unwrap();
        if let Some(b) = &built {
            let pert = inst.f.perturb(&inst.blocks, b).unwrap();
            eprintln!("built size={} nonsurj={} singpt={:?}", b.size, !pert.is_surjective().unwrap(), pert.singular_point().unwrap());
            eprintln!("A' = {:?}", pert.matrix);
            for r in inst.f.cone.rays() {
                eprintln!("  A'r = {:?} for ray {:?}  Qr = {:?}", pert.matrix.matvec(r), r, inst.blocks[0].q.matvec(r));
            }
            if let Some(xs) = pert.singular_point().unwrap() {
                eprintln!("Q singpt = {:?}", inst.blocks[0].q.matvec(&xs));
            }
        } else { eprintln!("no dual-built"); }
        let (q2, c2) = conedist_core::distance::search_rank_one(&inst.f, &inst.blocks, Mode::Exact, &cfg, Some(&cert)).unwrap();
        eprintln!("q2 = {q2} cert = {}", c2.is_some());
    }
    panic!("inspect");
}
