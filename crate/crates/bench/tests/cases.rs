use mixed_rod::solver::SolverConfig;
use rod_bench::cases::{bent_cantilever, elastica, spiral};
use rod_bench::run::{convergence_study, solve_case};

#[test]
fn elastica_mesh_is_uniform() {
    let c = elastica(20).unwrap();
    assert_eq!(c.model.elements.len(), 20);
    assert!(c.model.elements.iter().all(|e| (e.length - 5.0).abs() < 1e-12));
}

#[test]
fn arc_frames_follow_the_chords() {
    let n = 8;
    let c = bent_cantilever(n).unwrap();
    let half = 0.5 * std::f64::consts::FRAC_PI_4 / n as f64;
    for e in &c.model.elements {
        let [a, b] = e.nodes.map(|k| c.model.nodes[k].position);
        let chord = (b - a).scale(1.0 / e.length);
        for f in &e.frames {
            let angle = f.column(0).dot(&chord).clamp(-1.0, 1.0).acos();
            assert!(angle <= half + 1e-12, "element {}: {angle} > {half}", e.id);
        }
    }
}

#[test]
fn spiral_on_a_fine_mesh() {
    let r = solve_case(spiral(100).unwrap(), &SolverConfig::default()).unwrap();
    assert!(r.failure().is_none());
    assert!(r.result.steps[0].iterations <= 5, "{}", r.result.steps[0].iterations);
}

#[test]
fn rolling_error_falls_by_the_square_of_the_refinement() {
    let r = convergence_study("rolling", &[5, 160], &SolverConfig::default()).unwrap();
    let ratio = r.errors[0] / r.errors[1];
    assert!((ratio / 1024.0 - 1.0).abs() < 0.3, "{ratio}");
}
