//! Reproduction gate. Runs every numerical target in sequence, prints one
//! PASS/FAIL line per target and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bellforge_core::functional::{
    builtin_chsh, builtin_cuboct, builtin_icodod, dot_functional, load_appendix_matrix,
    BellFunctional,
};
use bellforge_core::localbound::{
    local_bound, local_bound_graycode, local_bound_graycode_with, LocalBoundOptions,
};
use bellforge_core::polyhedra::{
    named_vertex_set, truncated_icosahedron, Orientation, Solid, UnitVec3, PHI,
};
use bellforge_core::quantum::{
    chsh_measurements, correlation_point_maxent, cuboct_measurements, quantum_value_at,
    quantum_value_designed, seesaw_max, SeeSawConfig,
};
use bellforge_core::report::{buckyball_local_closed_form, table1};
use bellforge_core::robustness::{
    critical_visibility, gilbert_separate, mix_white_noise, robustness_search, GilbertConfig,
    RobustnessConfig,
};
use bellforge_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(checks: &[(bool, String)]) -> Self {
        Outcome {
            pass: checks.iter().all(|(ok, _)| *ok),
            detail: checks
                .iter()
                .map(|(ok, msg)| if *ok { msg.clone() } else { format!("{msg} [failed]") })
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

fn close(value: f64, expected: f64, tol: f64) -> bool {
    (value - expected).abs() < tol
}

fn within(elapsed: Duration, budget: Duration) -> (bool, String) {
    (
        elapsed <= budget,
        format!("{:.2} s of {} s", elapsed.as_secs_f64(), budget.as_secs()),
    )
}

fn cube_octahedron() -> Outcome {
    let start = Instant::now();
    let f = builtin_cuboct();
    let local = local_bound(&f).unwrap().value;
    let (a, b) = cuboct_measurements();
    let designed = quantum_value_at(&f, &a.vertices, &b.vertices).unwrap();
    let seesaw = seesaw_max(&f, &SeeSawConfig::default()).unwrap().value;
    let target = 16.0 * 3f64.sqrt();
    Outcome::new(&[
        (local == 24.0, format!("local {local}")),
        (close(designed, target, 1e-9), format!("designed quantum {designed:.12}")),
        (close(seesaw, target, 1e-8), format!("see-saw {seesaw:.12}")),
        within(start.elapsed(), Duration::from_secs(1)),
    ])
}

fn icosahedron_dodecahedron() -> Outcome {
    let start = Instant::now();
    let f = builtin_icodod();
    let local = local_bound(&f).unwrap().value;
    let seesaw = seesaw_max(&f, &SeeSawConfig::default()).unwrap().value;
    let target = 2.0 * (45.0 + 60.0 * PHI).sqrt();
    Outcome::new(&[
        (local == 20.0, format!("local {local}")),
        (close(seesaw, target, 1e-6), format!("see-saw {seesaw:.9} vs {target:.9}")),
        within(start.elapsed(), Duration::from_secs(5)),
    ])
}

fn platonic_table() -> Outcome {
    let start = Instant::now();
    let rows = table1(Orientation::Polar, &LocalBoundOptions::default(), None).unwrap();
    let mut checks = Vec::new();
    for r in &rows {
        let n = (r.alice.vertex_count() * r.bob.vertex_count()) as f64 / 3.0;
        let q_ok = close(r.row.quantum, n, 1e-9)
            && close(r.row.quantum, r.reference_quantum_value(), 1e-9);
        let l_ok = r.relative_local_error <= 0.01 && !r.orientation_divergent;
        if !q_ok || !l_ok {
            checks.push((
                false,
                format!(
                    "{}: local {:.4} vs {}, quantum {:.6} vs {}",
                    r.row.label, r.row.local, r.reference_local, r.row.quantum, r.reference_quantum
                ),
            ));
        }
    }
    let worst = rows
        .iter()
        .map(|r| r.relative_local_error)
        .fold(0.0, f64::max);
    checks.push((rows.len() == 15, format!("{} pairs", rows.len())));
    checks.push((true, format!("quantum column exact, worst local deviation {:.3}%", 100.0 * worst)));
    checks.push(within(start.elapsed(), Duration::from_secs(600)));
    Outcome::new(&checks)
}

fn buckyball() -> Outcome {
    let start = Instant::now();
    let set = named_vertex_set("buckyball30", Orientation::Canonical).unwrap();
    let f = dot_functional(&set, &set).unwrap();
    let r = local_bound_graycode_with(&f, &LocalBoundOptions::serial()).unwrap();
    let elapsed = start.elapsed();
    let q = quantum_value_designed(&set, &set).unwrap();
    let expected = buckyball_local_closed_form();
    Outcome::new(&[
        (close(r.value, expected, 1e-3), format!("local {:.6} vs {expected:.6}", r.value)),
        (r.enumerated_count == 1 << 29, format!("{} strategies", r.enumerated_count)),
        (close(q, 300.0, 1e-9), format!("quantum {q}")),
        within(elapsed, Duration::from_secs(1800)),
    ])
}

fn appendix() -> Outcome {
    let start = Instant::now();
    let f = load_appendix_matrix().unwrap();
    let local = local_bound_graycode(&f).unwrap().value;
    let q = seesaw_max(&f, &SeeSawConfig::default()).unwrap().value;
    let v = critical_visibility(local, q).unwrap().visibility;
    Outcome::new(&[
        (close(local, 145.0181, 0.005), format!("local {local:.6}")),
        (close(q, 205.5873, 0.01), format!("quantum {q:.6}")),
        (close(v, 0.7054, 0.0005) && v < std::f64::consts::FRAC_1_SQRT_2, format!("visibility {v:.6}")),
        within(start.elapsed(), Duration::from_secs(1800)),
    ])
}

fn chsh() -> Outcome {
    let f = builtin_chsh();
    let local = local_bound(&f).unwrap().value;
    let (a, b) = chsh_measurements();
    let q = quantum_value_at(&f, &a.vertices, &b.vertices).unwrap();
    let seesaw = seesaw_max(&f, &SeeSawConfig::with_dim(2)).unwrap().value;
    let v = critical_visibility(local, q).unwrap().visibility;
    let dot = dot_functional(&a, &b).unwrap();
    let scaled = dot.coeffs().map(|c| c * 2f64.sqrt());
    let diff = scaled.sub(f.coeffs()).max_abs();
    Outcome::new(&[
        (close(local, 2.0, 1e-9), format!("local {local}")),
        (close(q, 2.0 * 2f64.sqrt(), 1e-9), format!("quantum {q:.12}")),
        (close(seesaw, 2.0 * 2f64.sqrt(), 1e-9), format!("see-saw {seesaw:.12}")),
        (close(v, std::f64::consts::FRAC_1_SQRT_2, 1e-9), format!("visibility {v:.12}")),
        (diff < 1e-12, format!("√2 · dot construction matches within {diff:.1e}")),
    ])
}

fn random_functional(rng: &mut ChaCha8Rng) -> BellFunctional {
    let n_a = rng.gen_range(1..=12);
    let n_b = rng.gen_range(1..=14);
    let m = Matrix::from_fn(n_a, n_b, |_, _| rng.gen_range(-1.0..=1.0));
    BellFunctional::new("random", m).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut route_mismatch, mut parallel_mismatch) = (0, 0);
    let total = 250;
    let parallel = LocalBoundOptions {
        threads: Some(4),
        partition_bits: 3,
        ..LocalBoundOptions::default()
    };
    for _ in 0..total {
        let f = random_functional(&mut rng);
        let direct = local_bound(&f).unwrap();
        let gray = local_bound_graycode_with(&f, &LocalBoundOptions::serial()).unwrap();
        let par = local_bound_graycode_with(&f, &parallel).unwrap();
        if direct.value != gray.value || direct.witness != gray.witness {
            route_mismatch += 1;
        }
        if par != gray {
            parallel_mismatch += 1;
        }
    }
    Outcome::new(&[
        (route_mismatch == 0, format!("Gray code vs direct: {route_mismatch}/{total} differ")),
        (parallel_mismatch == 0, format!("parallel vs serial: {parallel_mismatch}/{total} differ")),
    ])
}

fn geometry() -> Outcome {
    let mut sets: Vec<_> = Solid::ALL
        .iter()
        .flat_map(|s| [s.vertices(), s.vertices_oriented(Orientation::Polar)])
        .collect();
    sets.push(truncated_icosahedron());
    let mut checks = Vec::new();
    let norm_err = sets
        .iter()
        .flat_map(|s| s.vertices.iter())
        .map(|v| (v.dot(v) - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push((norm_err < 1e-12, format!("unit norms within {norm_err:.1e}")));
    let iso = sets.iter().map(|s| s.isotropy_defect()).fold(0.0, f64::max);
    checks.push((iso < 1e-9, format!("isotropy defect {iso:.1e}")));
    // The dual has one vertex per face: V − E + F = 2.
    let dual_ok = Solid::ALL.iter().all(|s| {
        let set = s.vertices();
        let faces = 2 + set.nearest_neighbor_edges() - set.len();
        s.dual().dual() == *s && s.dual().vertex_count() == faces
    });
    checks.push((dual_ok, "duality is an involution".into()));
    let star_ok = sets
        .iter()
        .flat_map(|s| s.vertices.iter())
        .all(|v: &UnitVec3| v.star().star() == *v);
    checks.push((star_ok, "star is an involution".into()));
    Outcome::new(&checks)
}

fn gilbert() -> Outcome {
    let start = Instant::now();
    let (a, b) = chsh_measurements();
    let p = correlation_point_maxent(&a, &b).unwrap();
    let cfg = GilbertConfig {
        max_iter: 200,
        ..GilbertConfig::default()
    };
    let g = gilbert_separate(&p, &cfg).unwrap();
    let q = seesaw_max(&g.hyperplane, &SeeSawConfig::with_dim(3)).unwrap().value;
    let v = critical_visibility(g.certified_local, q).unwrap().visibility;
    let inside = gilbert_separate(&mix_white_noise(&p, 0.70).unwrap(), &cfg).unwrap();

    let bucky = named_vertex_set("buckyball30", Orientation::Canonical).unwrap();
    let search = RobustnessConfig {
        max_rounds: 10,
        patience: 10,
        ..RobustnessConfig::default()
    };
    let trace = robustness_search(&bucky, &bucky, &search).unwrap();
    let monotone = trace.best_history.windows(2).all(|w| w[1] <= w[0]);
    let best_matches = trace.rounds.iter().map(|r| r.visibility).fold(1.0, f64::min)
        == trace.best_visibility;
    let mut certified = true;
    for r in &trace.rounds {
        let exact = local_bound_graycode(&r.functional).unwrap().value;
        certified &= (exact - r.local).abs() <= 1e-9 * exact.abs().max(1.0);
        certified &= r.quantum > r.local;
    }
    Outcome::new(&[
        (g.separated && g.iterations <= 200, format!("CHSH point separated after {} iterations", g.iterations)),
        (v <= 0.708, format!("hyperplane visibility {v:.6}")),
        (!inside.separated, "point at v = 0.70 not separated".into()),
        (trace.rounds.len() == 10, format!("{} buckyball rounds", trace.rounds.len())),
        (monotone && best_matches, format!("best visibility {:.6}, monotone", trace.best_visibility)),
        (certified, "every round's local bound re-certified by enumeration".into()),
        within(start.elapsed(), Duration::from_secs(7200)),
    ])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("cube-octahedron inequality", cube_octahedron),
        ("icosahedron-dodecahedron inequality", icosahedron_dodecahedron),
        ("Platonic table", platonic_table),
        ("buckyball inequality", buckyball),
        ("30-setting noise-robust inequality", appendix),
        ("CHSH", chsh),
        ("oracle equivalence", oracle_equivalence),
        ("geometry invariants", geometry),
        ("separating-hyperplane search", gilbert),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {}. {name} ({:.1} s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        failed += usize::from(!outcome.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
