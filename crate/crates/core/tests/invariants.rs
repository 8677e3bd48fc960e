//! Structural invariants cross-checked against raw definitions at small
//! chain sizes: the ideal-prefix equivalence, the non-constant criterion,
//! restriction/inversion stability, oracle lattice sanity, choice-function
//! independence, and the empirical records the criteria do not assert.

use std::collections::BTreeMap;

use chainmorph::enumerate::{
    build_monoid, enumerate_class, green_oracle, regular_oracle, GreenRelation,
    DEFAULT_MAX_CANDIDATES,
};
use chainmorph::finite::{
    classify, find_ideals, glued_point, invert, is_ideal, is_orientation_preserving, restrict,
    ClassTag, IdealSet, PartialMap,
};
use chainmorph::green::{green_check_op, is_completable};
use chainmorph::regularity::{
    build_op_inverse_with, reg_op_for_finite_map, verify_inner_inverse, ChoiceFunction,
};
use chainmorph::suites::GOLDEN_COUNTS;
use chainmorph::symbolic::{
    bounded_mirror_map, compose_symbolic, is_orientation_preserving_symbolic, irregular_squash_map,
    wrapped_regular_map,
};

fn members(tag: ClassTag, n: usize) -> Vec<PartialMap> {
    enumerate_class(tag, n, DEFAULT_MAX_CANDIDATES).unwrap()
}

fn subsets_of(dom: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in dom {
        let mut more: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.append(&mut more);
    }
    out
}

/// The raw definition: any nonempty subset of the domain satisfying order
/// preservation on both parts and the order/value separation.
fn raw_is_ideal(alpha: &PartialMap, subset: &[usize]) -> bool {
    if subset.is_empty() {
        return false;
    }
    let rest: Vec<usize> =
        alpha.dom().into_iter().filter(|x| !subset.contains(x)).collect();
    let op_on = |elems: &[usize]| is_orientation_preserving_free_check(alpha, elems);
    if !op_on(subset) || !op_on(&rest) {
        return false;
    }
    subset.iter().all(|&a| {
        rest.iter().all(|&b| {
            a <= b && alpha.apply(a).unwrap() >= alpha.apply(b).unwrap()
        })
    })
}

fn is_orientation_preserving_free_check(alpha: &PartialMap, elems: &[usize]) -> bool {
    let mut sorted = elems.to_vec();
    sorted.sort_unstable();
    sorted
        .windows(2)
        .all(|w| alpha.apply(w[0]).unwrap() <= alpha.apply(w[1]).unwrap())
}

#[test]
fn prefix_ideals_match_all_subsets_definition() {
    for n in 1..=4 {
        for alpha in members(ClassTag::PT, n) {
            if alpha.is_empty_map() {
                continue;
            }
            let by_prefix: Vec<Vec<usize>> =
                find_ideals(&alpha).iter().map(|y| y.elems().to_vec()).collect();
            let mut by_subsets: Vec<Vec<usize>> = subsets_of(&alpha.dom())
                .into_iter()
                .filter(|s| raw_is_ideal(&alpha, s))
                .collect();
            by_subsets.sort_by_key(|s| (s.len(), s.clone()));
            assert_eq!(by_prefix, by_subsets, "ideal mismatch for {alpha}");
        }
    }
}

#[test]
fn non_constant_criterion() {
    // A map with a proper nonempty ideal is non-constant iff some ideal
    // element maps strictly above some non-ideal element.
    for n in 1..=5 {
        for alpha in members(ClassTag::POP, n) {
            for y in find_ideals(&alpha) {
                if y.is_empty() || y.elems().len() == alpha.dom_size() {
                    continue;
                }
                let rest: Vec<usize> =
                    alpha.dom().into_iter().filter(|&x| !y.contains(x)).collect();
                let exists_drop = y.elems().iter().any(|&a| {
                    rest.iter()
                        .any(|&b| alpha.apply(a).unwrap() > alpha.apply(b).unwrap())
                });
                assert_eq!(!alpha.is_constant(), exists_drop, "lemma fails for {alpha}");
            }
        }
    }
}

#[test]
fn glued_point_structure() {
    for n in 1..=5 {
        for alpha in members(ClassTag::POP, n) {
            for y in find_ideals(&alpha) {
                let y_img: Vec<usize> =
                    y.elems().iter().map(|&x| alpha.apply(x).unwrap()).collect();
                let rest_img: Vec<usize> = alpha
                    .dom()
                    .into_iter()
                    .filter(|&x| !y.contains(x))
                    .map(|x| alpha.apply(x).unwrap())
                    .collect();
                let common: Vec<usize> =
                    y_img.iter().filter(|v| rest_img.contains(v)).copied().collect();
                let m = glued_point(&alpha, &y).unwrap();
                match m {
                    None => assert!(common.is_empty()),
                    Some(m) => {
                        assert!(common.iter().all(|&v| v == m));
                        assert_eq!(y_img.iter().min(), Some(&m));
                        assert_eq!(rest_img.iter().max(), Some(&m));
                    }
                }
            }
        }
    }
}

#[test]
fn restriction_and_inversion_stability() {
    for n in 1..=5 {
        let all_subsets = subsets_of(&(1..=n).collect::<Vec<_>>());
        for alpha in members(ClassTag::POP, n) {
            for subset in &all_subsets {
                assert!(
                    is_orientation_preserving(&restrict(&alpha, subset)),
                    "restriction of {alpha} to {subset:?} left the class"
                );
            }
        }
        for alpha in members(ClassTag::POPI, n) {
            let inv = invert(&alpha).unwrap();
            assert!(is_orientation_preserving(&inv), "inverse of {alpha} left the class");
            if ClassTag::POI.contains(&alpha) {
                assert!(ClassTag::POI.contains(&inv), "inverse of {alpha} left POI");
            }
        }
    }
}

#[test]
fn oracle_lattice_sanity() {
    for tag in [ClassTag::OP, ClassTag::PO, ClassTag::POP, ClassTag::POI, ClassTag::POPI] {
        for n in 1..=4 {
            let table = build_monoid(tag, n, DEFAULT_MAX_CANDIDATES).unwrap();
            let l = green_oracle(&table, GreenRelation::L);
            let r = green_oracle(&table, GreenRelation::R);
            let h = green_oracle(&table, GreenRelation::H);
            let d = green_oracle(&table, GreenRelation::D);
            let j = green_oracle(&table, GreenRelation::J);
            let k = table.len();
            for i in 0..k {
                for jdx in 0..k {
                    let same = |o: &chainmorph::enumerate::GreenOracleResult| {
                        o.same_class(i, jdx)
                    };
                    assert_eq!(same(&h), same(&l) && same(&r), "H = L ∧ R in {tag}_{n}");
                    assert!(!same(&l) || same(&d), "L ⊆ D in {tag}_{n}");
                    assert!(!same(&r) || same(&d), "R ⊆ D in {tag}_{n}");
                    assert!(!same(&d) || same(&j), "D ⊆ J in {tag}_{n}");
                    // Finite semigroups: D = J.
                    assert_eq!(same(&d), same(&j), "D = J in {tag}_{n}");
                }
            }
        }
    }
}

#[test]
fn oracle_l_is_image_equality_and_r_is_kernel_equality_in_op() {
    for n in 1..=4 {
        let table = build_monoid(ClassTag::OP, n, DEFAULT_MAX_CANDIDATES).unwrap();
        let l = green_oracle(&table, GreenRelation::L);
        let r = green_oracle(&table, GreenRelation::R);
        let k = table.len();
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (&table.elements()[i], &table.elements()[j]);
                assert_eq!(l.same_class(i, j), a.image() == b.image());
                assert_eq!(r.same_class(i, j), a.kernel() == b.kernel());
            }
        }
    }
}

#[test]
fn count_monotonicity_and_containments() {
    let table: BTreeMap<&str, [u64; 5]> =
        GOLDEN_COUNTS.iter().map(|(t, c)| (t.name(), *c)).collect();
    for counts in table.values() {
        for w in counts.windows(2) {
            assert!(w[0] <= w[1], "counts must be monotone in n");
        }
    }
    for n in 0..5 {
        assert!(table["O"][n] <= table["OP"][n]);
        assert!(table["OP"][n] <= table["T"][n]);
        assert!(table["POI"][n] <= table["POPI"][n]);
        assert!(table["POPI"][n] <= table["POP"][n]);
        assert!(table["POP"][n] <= table["PT"][n]);
        assert!(table["O"][n] <= table["PO"][n]);
        assert!(table["PO"][n] <= table["POP"][n]);
    }
}

#[test]
fn partial_classes_are_regular_monoids() {
    // Every element of the partial orientation/order classes has an inner
    // inverse found by exhaustive search.
    for tag in [ClassTag::PO, ClassTag::POP, ClassTag::POI, ClassTag::POPI] {
        for n in 1..=4 {
            let table = build_monoid(tag, n, DEFAULT_MAX_CANDIDATES).unwrap();
            for idx in 0..table.len() {
                assert!(
                    regular_oracle(&table, idx).is_some(),
                    "no inner inverse for {} in {tag}_{n}",
                    table.elements()[idx]
                );
            }
        }
    }
}

#[test]
fn criterion_matches_regular_oracle_on_finite_chains() {
    for n in 1..=4 {
        let table = build_monoid(ClassTag::OP, n, DEFAULT_MAX_CANDIDATES).unwrap();
        for idx in 0..table.len() {
            let alpha = &table.elements()[idx];
            let verdict = reg_op_for_finite_map(alpha).unwrap().verdict;
            let witness = regular_oracle(&table, idx);
            assert!(verdict, "criterion must hold on finite chains for {alpha}");
            assert!(witness.is_some(), "oracle found no inner inverse for {alpha}");
        }
    }
}

/// Every ideal-preferring choice function yields a valid inverse, not just
/// the canonical smallest one. Exhaustive at n ≤ 3, sampled at n = 4.
#[test]
fn choice_function_independence() {
    use rand::{Rng, SeedableRng};
    for n in 1..=4usize {
        let exhaustive = n <= 3;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for alpha in members(ClassTag::OP, n) {
            for ideal in find_ideals(&alpha) {
                let options: Vec<(usize, Vec<usize>)> = alpha
                    .image()
                    .into_iter()
                    .map(|x| {
                        let in_ideal: Vec<usize> = ideal
                            .elems()
                            .iter()
                            .copied()
                            .filter(|&z| alpha.apply(z) == Some(x))
                            .collect();
                        let any: Vec<usize> = (1..=n)
                            .filter(|&z| alpha.apply(z) == Some(x))
                            .collect();
                        (x, if in_ideal.is_empty() { any } else { in_ideal })
                    })
                    .collect();
                let assignments: Vec<BTreeMap<usize, usize>> = if exhaustive {
                    let mut acc = vec![BTreeMap::new()];
                    for (x, opts) in &options {
                        let mut next = Vec::new();
                        for partial in &acc {
                            for &z in opts {
                                let mut m = partial.clone();
                                m.insert(*x, z);
                                next.push(m);
                            }
                        }
                        acc = next;
                    }
                    acc
                } else {
                    (0..8)
                        .map(|_| {
                            options
                                .iter()
                                .map(|(x, opts)| (*x, opts[rng.gen_range(0..opts.len())]))
                                .collect()
                        })
                        .collect()
                };
                for z_of in assignments {
                    let choice = ChoiceFunction::from_choices(&alpha, &ideal, z_of).unwrap();
                    let beta = build_op_inverse_with(&alpha, &ideal, &choice).unwrap();
                    assert!(
                        verify_inner_inverse(&alpha, &beta).unwrap(),
                        "choice-dependent failure for {alpha}"
                    );
                    assert!(ClassTag::OP.contains(&beta), "β left the class for {alpha}");
                }
            }
        }
    }
}

#[test]
fn green_witnesses_replay() {
    use chainmorph::finite::{compose as comp, restrict};
    for n in 1..=3 {
        let maps = members(ClassTag::OP, n);
        for a in &maps {
            for b in &maps {
                let r = green_check_op(a, b, GreenRelation::R).unwrap();
                if r.holds {
                    // Extensions λ of θ and γ of θ⁻¹ give β = αλ and α = βγ.
                    let lambda = &r.witnesses[0].extension;
                    let gamma = &r.witnesses[1].extension;
                    assert!(ClassTag::OP.contains(lambda));
                    assert!(ClassTag::OP.contains(gamma));
                    assert_eq!(&comp(a, lambda).unwrap(), b);
                    assert_eq!(&comp(b, gamma).unwrap(), a);
                }
                let d = green_check_op(a, b, GreenRelation::D).unwrap();
                if d.holds {
                    // The first witness extends a bijection Im(α) → Im(β); the
                    // second extends its inverse.
                    let w1 = &d.witnesses[0].extension;
                    let w2 = &d.witnesses[1].extension;
                    assert!(ClassTag::OP.contains(w1));
                    assert!(ClassTag::OP.contains(w2));
                    let theta = restrict(w1, &a.image());
                    assert!(theta.is_injective());
                    assert_eq!(theta.image(), b.image());
                    let back = restrict(w2, &b.image());
                    assert_eq!(invert(&theta).unwrap(), back);
                }
            }
        }
    }
}

#[test]
fn d_and_j_criteria_agree_in_op() {
    for n in 1..=3 {
        let maps = members(ClassTag::OP, n);
        for a in &maps {
            for b in &maps {
                let d = green_check_op(a, b, GreenRelation::D).unwrap().holds;
                let j = green_check_op(a, b, GreenRelation::J).unwrap().holds;
                assert_eq!(d, j, "D ≠ J criteria on {a}, {b}");
            }
        }
    }
}

/// Empirical record, not an assertion: the construction guarantees
/// `αβα = α`; whether `βαβ = β` also holds is only observed.
#[test]
fn mutual_inverse_empirical_record() {
    use chainmorph::regularity::build_op_inverse;
    for n in 1..=4 {
        let mut mutual = 0u64;
        let mut total = 0u64;
        for alpha in members(ClassTag::OP, n) {
            for ideal in find_ideals(&alpha) {
                let beta = build_op_inverse(&alpha, &ideal).unwrap();
                total += 1;
                if verify_inner_inverse(&beta, &alpha).unwrap() {
                    mutual += 1;
                }
            }
        }
        println!("record: βαβ = β for {mutual}/{total} constructed inverses in OP_{n}");
    }
}

/// Empirical record, not an assertion: whether every orientation-preserving
/// partial injection on X_n is completable in the full class.
#[test]
fn completability_empirical_record() {
    for n in 1..=5 {
        let mut all = true;
        let mut first_gap = None;
        for theta in members(ClassTag::POPI, n) {
            if is_completable(&theta, ClassTag::OP).unwrap().is_none() {
                all = false;
                if first_gap.is_none() {
                    first_gap = Some(theta.to_string());
                }
            }
        }
        println!(
            "record: every POPI_{n} map completable in OP_{n}: {all}{}",
            first_gap.map(|g| format!(" (first gap: {g})")).unwrap_or_default()
        );
    }
}

#[test]
fn ideal_validation_rejects_non_ideals() {
    let chain = chainmorph::chain::FiniteChain::new(3).unwrap();
    let alpha = PartialMap::full(chain, &[2, 3, 1]).unwrap();
    assert!(is_ideal(&alpha, &IdealSet::new(vec![1, 2])));
    assert!(!is_ideal(&alpha, &IdealSet::new(vec![1])));
    assert!(!is_ideal(&alpha, &IdealSet::new(vec![2, 3])));
}

#[test]
fn symbolic_closure_on_curated_pairs() {
    use chainmorph::chain::rat;
    let curated = [irregular_squash_map(), bounded_mirror_map(), wrapped_regular_map()];
    for a in &curated {
        for b in &curated {
            let product = compose_symbolic(a, b).unwrap();
            assert!(
                is_orientation_preserving_symbolic(&product).is_some(),
                "symbolic product left the class"
            );
            // Pointwise agreement with direct evaluation on a probe grid.
            for k in -25i64..25 {
                let x = rat(3 * k + 1, 7);
                let direct = b.eval(&a.eval(&x).unwrap()).unwrap();
                assert_eq!(product.eval(&x), Some(direct), "probe {x}");
            }
        }
    }
}

#[test]
fn classify_is_consistent_with_class_lattice() {
    for n in 1..=4 {
        for alpha in members(ClassTag::PT, n) {
            let tags = classify(&alpha);
            let has = |t: ClassTag| tags.contains(&t);
            assert!(has(ClassTag::PT));
            if has(ClassTag::O) {
                assert!(has(ClassTag::OP) && has(ClassTag::PO) && has(ClassTag::T));
            }
            if has(ClassTag::OP) {
                assert!(has(ClassTag::POP) && has(ClassTag::T));
            }
            if has(ClassTag::PO) {
                assert!(has(ClassTag::POP));
            }
            if has(ClassTag::POI) {
                assert!(has(ClassTag::PO) && has(ClassTag::I) && has(ClassTag::POPI));
            }
            if has(ClassTag::POPI) {
                assert!(has(ClassTag::POP) && has(ClassTag::I));
            }
        }
    }
}
