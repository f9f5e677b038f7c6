use bellforge_core::functional::{
    builtin, builtin_icodod, dot_functional, load_functional, resolve_functional, save_functional,
    BUILTINS,
};
use bellforge_core::localbound::{local_bound, local_bound_graycode};
use bellforge_core::polyhedra::{named_vertex_set, Orientation, VertexSet};
use bellforge_core::quantum::{icodod_measurements, quantum_value_at, seesaw_max, SeeSawConfig};
use bellforge_core::robustness::{gilbert_separate, GilbertConfig};
use bellforge_core::{Error, SeeSawResult};

#[test]
fn build_save_load_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let cube = named_vertex_set("cube", Orientation::Canonical).unwrap();
    let oct = named_vertex_set("octahedron", Orientation::Canonical).unwrap();
    let f = dot_functional(&cube, &oct).unwrap();
    save_functional(&f, &path).unwrap();
    let g = load_functional(&path).unwrap();
    assert_eq!(f, g);
    let r = local_bound(&g).unwrap();
    assert!((r.value - 8.0 * 3f64.sqrt()).abs() < 1e-9);
    let resolved = resolve_functional(path.to_str().unwrap()).unwrap();
    assert_eq!(resolved, g);
}

#[test]
fn vertex_set_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bucky.json");
    let set = named_vertex_set("buckyball30", Orientation::Canonical).unwrap();
    set.save(&path).unwrap();
    let back = VertexSet::load(&path).unwrap();
    assert_eq!(set, back);
}

#[test]
fn every_builtin_resolves() {
    for name in BUILTINS {
        let f = builtin(name).unwrap();
        assert_eq!(resolve_functional(name).unwrap(), f);
    }
    assert!(matches!(resolve_functional("no-such-thing"), Err(Error::Io { .. } | Error::InvalidInput(_))));
}

#[test]
fn seesaw_recovers_designed_measurements() {
    let f = builtin_icodod();
    let (a, b) = icodod_measurements();
    let designed = quantum_value_at(&f, &a.vertices, &b.vertices).unwrap();
    let q: SeeSawResult = seesaw_max(&f, &SeeSawConfig::default()).unwrap();
    assert!((q.value - designed).abs() < 1e-9);
    let (qa, qb) = q.bloch_measurements().unwrap();
    assert!((quantum_value_at(&f, &qa, &qb).unwrap() - q.value).abs() < 1e-9);
}

#[test]
fn gilbert_on_designed_point_improves_visibility() {
    let (a, b) = icodod_measurements();
    let p = bellforge_core::quantum::correlation_point_maxent(&a, &b).unwrap();
    let g = gilbert_separate(&p, &GilbertConfig::default()).unwrap();
    assert!(g.separated);
    let exact = local_bound_graycode(&g.hyperplane).unwrap().value;
    assert_eq!(exact, g.certified_local);
    // The hyperplane is tuned to this exact point, so at this point it
    // tolerates at least as much noise as the inequality the point came from.
    let original = builtin_icodod();
    let v_orig = 20.0 / original.value_at(p.entries()).unwrap();
    let v_new = g.certified_local / g.target_value;
    assert!(v_new <= v_orig + 1e-9, "{v_new} vs {v_orig}");
}
