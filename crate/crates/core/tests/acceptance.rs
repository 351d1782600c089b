//! Acceptance suite: one PASS/FAIL line per criterion, with wall time
//! against a fixed budget. Every comparison is exact; the only tolerance is
//! the time budget. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use dilation_core::configcount::{count_c, count_s_k, nu_product_sum, Method};
use dilation_core::families::{
    count_4cycle_families, count_degenerate_2path_parts, lambda_slices_direct, lambda_sums, simplex_group_bound,
    verify_2path_inclusion_exclusion, GroupChoice,
};
use dilation_core::geometry::{sphere_points, sphere_size_formula, SphereSpec};
use dilation_core::orthogonal::{
    enumerate_orthogonal, enumerate_orthogonal_brute, orthogonal_group_order, rotation_from_pair, scaled_apply,
    so2_elements,
};
use dilation_core::pattern::{find_witness, Pattern};
use dilation_core::simgraph::{build_similarity_graph, ms_lower_bound, verify_bipartite_double_count, DenseGraph};
use dilation_core::verify::{check_claim, check_quotient_claims, check_theorem, four_cycle_threshold, Claim, Status};
use dilation_core::{Point, PointSet, Prime, Ratio};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn random_set(p: Prime, d: usize, n: usize, rng: &mut ChaCha8Rng) -> PointSet {
    PointSet::random(p, d, n, rng).unwrap()
}

/// The shared instance family: 120 seeded (E, r) with |E| ≤ 10 and
/// p ∈ {3, 7, 11}, d = 2.
fn instances() -> Vec<(PointSet, Ratio)> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    (0..120)
        .map(|i| {
            let p = [3u64, 7, 11][i % 3];
            let pr = prime(p);
            let n = rng.gen_range(1..=10.min(p as usize * p as usize));
            let set = random_set(pr, 2, n, &mut rng);
            let r = Ratio::from_int(pr, rng.gen_range(1..p)).unwrap();
            (set, r)
        })
        .collect()
}

fn sphere_sizes() -> Outcome {
    let mut checked = 0;
    for (d, p) in [(2, 3), (2, 7), (2, 11), (2, 19), (4, 3), (4, 5)] {
        let pr = prime(p);
        for t in pr.elements() {
            let spec = SphereSpec { t, d, prime: pr };
            let got = sphere_points(spec).map_err(|e| e.to_string())?.len() as u128;
            let want = sphere_size_formula(spec).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("|S_{t}| in F_{p}^{d}: {got} vs {want}"))?;
            if d == 2 && p % 4 == 3 && !t.is_zero() {
                ensure(got == p as u128 + 1, || format!("|S_{t}| = {got} != p+1 at p={p}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} spheres"))
}

fn orthogonal_orders() -> Outcome {
    for (d, p, want) in [(2, 3, 8u64), (2, 7, 16), (2, 11, 24), (2, 5, 8), (2, 13, 24), (3, 3, 48)] {
        let got = enumerate_orthogonal_brute(d, prime(p)).map_err(|e| e.to_string())?.len() as u64;
        ensure(got == want, || format!("|O_{d}(F_{p})| brute = {got}, want {want}"))?;
        ensure(orthogonal_group_order(d, prime(p)) == BigUint::from(want), || format!("formula O_{d}(F_{p})"))?;
    }
    // 5^9 matrices exceed the brute-force guard; the frame search enumerates
    // every orthonormal frame instead.
    let got = enumerate_orthogonal(3, prime(5)).map_err(|e| e.to_string())?.len();
    ensure(got == 240, || format!("|O_3(F_5)| = {got}, want 2·5·24 = 240"))?;
    Ok("O_2 at p=3,5,7,11,13; O_3 at p=3 (brute), p=5 (frame search)".into())
}

fn rotation_from_pairs() -> Outcome {
    let mut pairs = 0;
    for p in [7u64, 11] {
        let pr = prime(p);
        let so2 = so2_elements(pr);
        let nonzero: Vec<Point> = (1..p * p).map(|i| Point::from_index(pr, 2, i)).collect();
        for r in Ratio::squares(pr) {
            let s = r.sqrt().unwrap();
            for v in &nonzero {
                for u in &nonzero {
                    let nu = dilation_core::geometry::norm(pr, u);
                    let nv = dilation_core::geometry::norm(pr, v);
                    if nu != pr.mul(r.value(), nv) {
                        continue;
                    }
                    let theta = rotation_from_pair(pr, u, v, r).map_err(|e| e.to_string())?;
                    ensure(theta.is_rotation(), || format!("det != 1 for u={u}, v={v}"))?;
                    ensure(&scaled_apply(pr, &theta, s, v).unwrap() == u, || format!("u != √rθv for u={u}, v={v}"))?;
                    let matches = so2.iter().filter(|t| &scaled_apply(pr, t, s, v).unwrap() == u).count();
                    ensure(matches == 1, || format!("{matches} rotations map v={v} to u={u}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} (u, v, r) triples"))
}

fn cross_method(inst: &[(PointSet, Ratio)]) -> Outcome {
    for (set, r) in inst {
        for k in 1..=3 {
            let brute = count_s_k(set, *r, k, Method::Brute).map_err(|e| e.to_string())?.value;
            let nu = count_s_k(set, *r, k, Method::NuIdentity).map_err(|e| e.to_string())?.value;
            let dp = count_s_k(set, *r, k, Method::WalkDp).map_err(|e| e.to_string())?.value;
            let literal = nu_product_sum(set, *r, k).map_err(|e| e.to_string())?;
            ensure(brute == nu && nu == dp && dp == literal, || {
                format!("S_{k} p={} n={} r={r}: {brute} {nu} {dp} {literal}", set.prime().p(), set.len())
            })?;
        }
        let brute = count_c(set, *r, Method::Brute).map_err(|e| e.to_string())?.value;
        let mu = count_c(set, *r, Method::MuIdentity).map_err(|e| e.to_string())?.value;
        ensure(brute == mu, || format!("C p={} n={} r={r}: {brute} vs {mu}", set.prime().p(), set.len()))?;
    }
    Ok(format!("{} instances, S_1..S_3 and C", inst.len()))
}

fn identities(inst: &[(PointSet, Ratio)]) -> Outcome {
    let mut thetas = 0;
    let mut run = |set: &PointSet, r: Ratio| -> Result<(), String> {
        let tag = || format!("p={} d={} n={} r={r}", set.prime().p(), set.dim(), set.len());
        let d = set.dim();
        if d == 2 {
            let parts = count_degenerate_2path_parts(set, r).map_err(|e| e.to_string())?;
            ensure(parts.consistent(), || format!("degenerate closed forms {}: {parts:?}", tag()))?;
            let ie = verify_2path_inclusion_exclusion(set, r).map_err(|e| e.to_string())?;
            ensure(ie.holds(), || format!("inclusion-exclusion {}: {ie:?}", tag()))?;
            let g = build_similarity_graph(set, r).map_err(|e| e.to_string())?;
            let s1 = count_s_k(set, r, 1, Method::Brute).unwrap().value;
            ensure(2 * g.edge_count() == s1, || format!("2e(G) != |S_1| {}", tag()))?;
            let fc = count_4cycle_families(set, r).map_err(|e| e.to_string())?;
            ensure(fc.decomposition_holds(), || format!("4-cycle decomposition {}: {fc:?}", tag()))?;
        }
        // The λ identities need √r; nonsquare instances use r = 1 instead.
        let rs = if r.is_square() { r } else { Ratio::from_int(set.prime(), 1).unwrap() };
        let group = enumerate_orthogonal(d, set.prime()).unwrap();
        let mut sum_direct = 0;
        for theta in group.iter() {
            let sums = lambda_sums(set, rs, theta).map_err(|e| e.to_string())?;
            let direct = lambda_slices_direct(set, rs, theta).map_err(|e| e.to_string())?;
            let n2 = (set.len() * set.len()) as u128;
            ensure(direct.lambda == sums.sum_pow_m, || format!("|Λ_θ| {}", tag()))?;
            ensure(direct.pair_slices.iter().all(|s| s.2 == sums.sum_pow_d), || format!("v_k=v_l slices {}", tag()))?;
            ensure(direct.all_equal == n2, || format!("all-equal slice {}", tag()))?;
            ensure(direct.n_theta == sums.n_theta, || format!("N_θ {}", tag()))?;
            if d == 2 {
                ensure(sums.plane_identity_holds(set.len()), || format!("N = Λ − 3Σλ² + 2|E|² {}", tag()))?;
            }
            sum_direct += direct.lambda;
            thetas += 1;
        }
        let gb = simplex_group_bound(set, rs, GroupChoice::Full).map_err(|e| e.to_string())?;
        ensure(gb.sum_pow_m == sum_direct, || format!("Σ_θ |Λ_θ| {}", tag()))?;
        Ok(())
    };
    for (set, r) in inst {
        run(set, *r)?;
    }
    // Slices with d + 1 = 4 vertices exercise the general |A_kl| = Σλ^d.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in [4, 6, 8] {
        let set = random_set(prime(3), 3, n, &mut rng);
        run(&set, Ratio::from_int(prime(3), 1).unwrap())?;
    }
    Ok(format!("{} instances plus 3 in F_3^3, {thetas} (instance, θ) pairs", inst.len()))
}

fn lemma_inequalities(inst: &[(PointSet, Ratio)]) -> Outcome {
    let mut verdicts = 0;
    for (set, r) in inst {
        let mut check = |claim: Claim, r: Ratio| -> Result<(), String> {
            let v = check_claim(claim, set, r, 2, 0).map_err(|e| e.to_string())?;
            ensure(v.status == Status::Holds, || format!("{v:?}"))?;
            verdicts += 1;
            Ok(())
        };
        for claim in [Claim::S1LowerBound, Claim::CLowerBound, Claim::Nu2Bound, Claim::DegenerateSandwich] {
            check(claim, *r)?;
        }
        for all_r in Ratio::all(set.prime()) {
            check(Claim::S2LowerBound, all_r)?;
        }
    }
    Ok(format!("{verdicts} verdicts, 0 violations"))
}

fn two_paths_at_seven() -> Outcome {
    let pr = prime(7);
    let mut rng = ChaCha8Rng::seed_from_u64(1500);
    let c = Pattern::walk_pair(2).x_distinct(0, 2).y_distinct(0, 2);
    for i in 0..200 {
        let set = random_set(pr, 2, 20, &mut rng);
        for r in Ratio::all(pr) {
            let hyp = check_theorem(Claim::TwoPathsExist, &set, r, 0, i).map_err(|e| e.to_string())?;
            ensure(hyp.status == Status::Holds, || format!("sample {i}: {hyp:?}"))?;
            let w = find_witness(&c, &set, r, i).map_err(|e| e.to_string())?;
            ensure(w.is_some(), || format!("sample {i} r={r}: no C(r) witness"))?;
        }
    }
    Ok("200 sets x 6 ratios".into())
}

fn triangles_and_simplices() -> Outcome {
    let pr = prime(7);
    let mut rng = ChaCha8Rng::seed_from_u64(1700);
    for i in 0..100 {
        let set = random_set(pr, 2, 21, &mut rng);
        for r in [1, 2, 4] {
            let r = Ratio::from_int(pr, r).unwrap();
            let v = check_theorem(Claim::TrianglesExist, &set, r, 0, i).map_err(|e| e.to_string())?;
            ensure(v.status == Status::Holds, || format!("sample {i}: {v:?}"))?;
        }
    }
    let p3 = prime(3);
    let cube = PointSet::full_space(p3, 3).unwrap();
    let one = Ratio::from_int(p3, 1).unwrap();
    let v = check_theorem(Claim::SimplicesExist, &cube, one, 0, 5).map_err(|e| e.to_string())?;
    ensure(v.status == Status::Holds, || format!("F_3^3 witness: {v:?}"))?;
    let gb = simplex_group_bound(&cube, one, GroupChoice::Full).map_err(|e| e.to_string())?;
    ensure(gb.group_order == 48, || format!("|O_3(F_3)| = {}", gb.group_order))?;
    ensure(gb.certified_count() > 0, || "group-sum bound is zero".into())?;
    Ok(format!("100 sets x 3 ratios; F_3^3 group-sum bound {}", gb.n_theta_bound()))
}

fn walk_lower_bound() -> Outcome {
    let pr = prime(7);
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    for i in 0..50 {
        let set = random_set(pr, 2, 15, &mut rng);
        for r in Ratio::all(pr) {
            let v = check_theorem(Claim::WalkLowerBound, &set, r, 3, 0).map_err(|e| e.to_string())?;
            ensure(v.status == Status::Holds, || format!("sample {i}: {v:?}"))?;
        }
    }
    Ok("50 sets x 6 ratios, |S_3| > 15^8/21^3".into())
}

fn four_cycles() -> Outcome {
    let mut primes = 0;
    for p in (3..=47u64).filter(|&p| Prime::new(p).is_ok()) {
        let t = four_cycle_threshold(p as u32);
        ensure(t > (p * p) as u128, || format!("p={p}: threshold {t} <= p^2"))?;
        primes += 1;
    }
    for p in [3u64, 7] {
        let pr = prime(p);
        let full = PointSet::full_space(pr, 2).unwrap();
        let one = Ratio::from_int(pr, 1).unwrap();
        let v = check_theorem(Claim::FourCyclesExist, &full, one, 0, 1).map_err(|e| e.to_string())?;
        ensure(v.status == Status::Vacuous, || format!("p={p}: {v:?}"))?;
        ensure(v.params.contains_key("unsatisfiable"), || format!("p={p}: no certificate"))?;
        ensure(v.conclusion_holds, || format!("p={p}: no 4-cycle pair in the full plane"))?;
    }
    Ok(format!("{primes} primes certified unsatisfiable; witnesses at p=3,7"))
}

fn mulholland_smith(inst: &[(PointSet, Ratio)]) -> Outcome {
    let mut graphs = 0;
    for g in DenseGraph::all_labeled(5) {
        for k in [2usize, 3, 4] {
            let walks = BigRational::from_integer(g.count_walks(k).into());
            let bound = ms_lower_bound(5, g.edge_count(), k as u32);
            ensure(walks >= bound, || format!("{g:?} k={k}: {walks} < {bound}"))?;
            ensure((walks == bound) == g.is_regular(), || format!("{g:?} k={k}: equality vs regularity"))?;
        }
        graphs += 1;
    }
    for (set, r) in inst {
        for k in [2, 3] {
            let v = check_claim(Claim::WalkPowerBound, set, *r, k, 0).map_err(|e| e.to_string())?;
            ensure(v.status == Status::Holds, || format!("{v:?}"))?;
        }
    }
    Ok(format!("{graphs} graphs x k=2,3,4; walk-power bound on {} instances", inst.len()))
}

fn quotients() -> Outcome {
    for (p, d) in [(3u64, 2), (7, 2), (11, 2), (3, 4)] {
        let set = PointSet::full_space(prime(p), d).unwrap();
        let v = check_quotient_claims(&set).map_err(|e| e.to_string())?;
        ensure(v.conclusion_holds && v.params["quotient_size"] == p.to_string(), || format!("{v:?}"))?;
        if d == 4 {
            ensure(v.status == Status::Holds, || format!("F_3^4 hypothesis should hold: {v:?}"))?;
        }
    }
    Ok("full planes p=3,7,11 and F_3^4".into())
}

fn double_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2300);
    let mut runs = 0;
    for p in [3u64, 7] {
        let pr = prime(p);
        for n in 1..=6 {
            for _ in 0..4 {
                let set = random_set(pr, 2, n, &mut rng);
                for r in Ratio::all(pr) {
                    let dc = verify_bipartite_double_count(&set, r).map_err(|e| e.to_string())?;
                    ensure(dc.identities_hold(), || format!("p={p} n={n} r={r}: {dc:?}"))?;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} (E, r) pairs"))
}

fn main() {
    let inst = instances();
    type Criterion<'a> = (&'a str, u64, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("AC01 sphere-sizes", 5, Box::new(sphere_sizes)),
        ("AC02 orthogonal-orders", 30, Box::new(orthogonal_orders)),
        ("AC03 rotation-from-pair", 60, Box::new(rotation_from_pairs)),
        ("AC04 cross-method-counts", 120, Box::new(|| cross_method(&inst))),
        ("AC05 exact-identities", 120, Box::new(|| identities(&inst))),
        ("AC06 lemma-inequalities", 120, Box::new(|| lemma_inequalities(&inst))),
        ("AC07 two-paths-p7", 300, Box::new(two_paths_at_seven)),
        ("AC08 triangles-simplices", 600, Box::new(triangles_and_simplices)),
        ("AC09 walk-lower-bound-p7", 120, Box::new(walk_lower_bound)),
        ("AC10 four-cycles-vacuous", 60, Box::new(four_cycles)),
        ("AC11 walk-count-bounds", 120, Box::new(|| mulholland_smith(&inst))),
        ("AC12 quotient-sets", 60, Box::new(quotients)),
        ("AC13 double-counts", 60, Box::new(double_counts)),
    ];
    let mut failed = 0;
    for (label, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over time budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{label}: {status} ({:.2}s / {budget}s) {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 13 criteria passed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
