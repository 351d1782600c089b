//! Closed forms on E = F_p² with p ≡ 3 (mod 4), where every nonzero circle
//! has p + 1 points and every count factors.

use dilation_core::configcount::{count_s_k, count_v, Method};
use dilation_core::families::{simplex_group_bound, GroupChoice};
use dilation_core::geometry::{distance_set, quotient_set};
use dilation_core::simgraph::build_similarity_graph;
use dilation_core::{PointSet, Prime, Ratio};

fn plane(p: u64) -> PointSet {
    PointSet::full_space(Prime::new(p).unwrap(), 2).unwrap()
}

#[test]
fn walk_pairs_factor() {
    for p in [3u128, 7] {
        let set = plane(p as u64);
        // Each step: p − 1 nonzero lengths t, then p + 1 choices on each side.
        let per_step = (p - 1) * (p + 1) * (p + 1);
        for r in Ratio::all(set.prime()) {
            for k in 1..=3 {
                let want = p.pow(4) * per_step.pow(k as u32);
                for method in [Method::NuIdentity, Method::WalkDp] {
                    assert_eq!(count_s_k(&set, r, k, method).unwrap().value, want, "p={p} k={k} {method}");
                }
            }
            assert_eq!(count_v(&set, r).value, p.pow(4) * per_step);
        }
    }
}

#[test]
fn similarity_graph_is_regular() {
    let set = plane(7);
    let g = build_similarity_graph(&set, Ratio::from_int(set.prime(), 3).unwrap()).unwrap();
    assert!(g.degrees().iter().all(|&d| d == 6 * 8 * 8));
}

#[test]
fn distances_cover_field() {
    for p in [3u64, 7, 11] {
        let set = plane(p);
        assert_eq!(distance_set(&set).len(), p as usize);
        assert_eq!(quotient_set(&set).unwrap().len(), p as usize);
    }
}

#[test]
fn group_sum_on_full_plane() {
    // λ ≡ p² for every θ and z, so Σ_θ Σ_z λ³ = |O_2|·p⁸.
    let set = plane(3);
    let one = Ratio::from_int(set.prime(), 1).unwrap();
    let gb = simplex_group_bound(&set, one, GroupChoice::Full).unwrap();
    assert_eq!(gb.group_order, 8);
    assert_eq!(gb.sum_pow_m, 8 * 3u128.pow(8));
    assert!(gb.hoelder_holds() && gb.plane_cube_bound_holds());
}

#[test]
fn point_file_round_trip() {
    let set = plane(3);
    let back = PointSet::parse(&set.to_text()).unwrap();
    assert_eq!(back.points(), set.points());
}
