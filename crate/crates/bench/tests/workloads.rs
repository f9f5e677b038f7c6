use bellforge_bench::{appendix_block, seesaw_config, serial_local};
use bellforge_core::functional::load_appendix_matrix;
use bellforge_core::localbound::{local_bound_graycode_with, local_bound_with};
use bellforge_core::quantum::seesaw_max;

#[test]
fn block_is_leading_submatrix() {
    let full = load_appendix_matrix().unwrap();
    let f = appendix_block(12, 30).unwrap();
    assert_eq!((f.n_a(), f.n_b()), (12, 30));
    for i in 0..12 {
        for j in 0..30 {
            assert_eq!(f.get(i, j), full.get(i, j));
        }
    }
    assert_eq!(appendix_block(40, 40).unwrap().n_a(), 30);
}

#[test]
fn benchmarked_routes_agree() {
    let f = appendix_block(12, 30).unwrap();
    let gray = local_bound_graycode_with(&f, &serial_local()).unwrap();
    let direct = local_bound_with(&f, &serial_local()).unwrap();
    assert_eq!(gray, direct);
}

#[test]
fn seesaw_workload_is_deterministic() {
    let f = appendix_block(8, 8).unwrap();
    let a = seesaw_max(&f, &seesaw_config(4)).unwrap();
    let b = seesaw_max(&f, &seesaw_config(4)).unwrap();
    assert_eq!(a.value, b.value);
}
