use allocflow_core::optimizer::partial_bound;
use allocflow_core::*;
use proptest::prelude::*;

fn small(n: usize, seed: u64) -> (ProblemInstance, Model) {
    let inst = random_instance(n, &RandomParams::default(), seed);
    let model = Model::new(&inst, DEFAULT_FLOW_CAP).unwrap();
    (inst, model)
}

fn kinds() -> impl Strategy<Value = ObjectiveKind> {
    prop_oneof![
        Just(ObjectiveKind::Distance),
        Just(ObjectiveKind::TimeMax),
        Just(ObjectiveKind::TimeTotal),
        Just(ObjectiveKind::Memory),
    ]
}

/// Every completion of `prefix` (in branching order), by exhaustive extension.
fn completions(model: &Model, prefix: &[usize]) -> Vec<Vec<usize>> {
    let order = model.branch_order();
    let mut out = vec![prefix.to_vec()];
    for &a in &order[prefix.len()..] {
        out = out
            .into_iter()
            .flat_map(|p| {
                model.allowed(a).iter().map(move |&n| {
                    let mut q = p.clone();
                    q.push(n);
                    q
                })
            })
            .collect();
    }
    out
}

fn to_assignment(model: &Model, by_order: &[usize]) -> Vec<usize> {
    let mut assign = vec![0; by_order.len()];
    for (depth, &a) in model.branch_order().iter().enumerate() {
        assign[a] = by_order[depth];
    }
    assign
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn branch_and_bound_matches_enumeration(n in 1usize..=8, seed in any::<u64>(), kind in kinds()) {
        let (inst, model) = small(n, seed);
        let o = Objective::new(kind, &inst);
        let bb = solve_branch_bound(&model, &o, None).unwrap();
        let bf = solve_bruteforce(&model, &o, DEFAULT_ENUMERATION_CAP, 1).unwrap();
        prop_assert_eq!(bb.cost.distance, bf.cost.distance);
        prop_assert_eq!(&bb.placement, &bf.placement);
        prop_assert_eq!(evaluate(&model, &bb.placement, &o).unwrap(), bb.cost);
    }

    #[test]
    fn baseline_search_matches_enumeration(n in 1usize..=7, seed in any::<u64>()) {
        let (_, model) = small(n, seed);
        let bb = solve_baseline(&model).unwrap();
        let bf = solve_baseline_bruteforce(&model, DEFAULT_ENUMERATION_CAP, 2).unwrap();
        prop_assert_eq!(&bb.placement, &bf.placement);
        prop_assert_eq!(bb.cost.time_seconds, bf.cost.time_seconds);
    }

    #[test]
    fn initial_guess_does_not_change_the_answer(n in 1usize..=6, seed in any::<u64>(), pick in any::<u64>()) {
        let (inst, model) = small(n, seed);
        let o = Objective::distance(&inst);
        let guess = model.placement(&model.assignment_at(pick as u128 % model.placement_count()));
        let a = solve_branch_bound(&model, &o, Some(&guess)).unwrap();
        let b = solve_branch_bound(&model, &o, None).unwrap();
        prop_assert_eq!(a.placement, b.placement);
    }

    #[test]
    fn partial_bounds_are_admissible_and_monotone(n in 1usize..=6, seed in any::<u64>(), pick in any::<u64>(), kind in kinds()) {
        let (inst, model) = small(n, seed);
        let o = Objective::new(kind, &inst);
        let full = model.assignment_at(pick as u128 % model.placement_count());
        let by_order: Vec<usize> = model.branch_order().iter().map(|&a| full[a]).collect();
        let mut previous: Option<optimizer::PartialBound> = None;
        for len in 0..=n {
            let bound = partial_bound(&model, &o, &by_order[..len]);
            for completion in completions(&model, &by_order[..len]) {
                let cost = evaluate(&model, &model.placement(&to_assignment(&model, &completion)), &o).unwrap();
                prop_assert!(bound.memory_bits <= cost.memory_bits);
                prop_assert!(bound.time_seconds <= cost.time_seconds * (1.0 + 1e-12) + 1e-12);
            }
            if let Some(p) = previous {
                prop_assert!(bound.memory_bits >= p.memory_bits);
                prop_assert!(bound.time_seconds >= p.time_seconds * (1.0 - 1e-12) - 1e-12);
            }
            previous = Some(bound);
        }
    }
}

#[test]
fn repeated_solves_are_identical() {
    let (inst, model) = small(8, 99);
    let o = Objective::distance(&inst);
    let a = solve_branch_bound(&model, &o, None).unwrap();
    let b = solve_branch_bound(&model, &o, None).unwrap();
    assert_eq!(a.placement, b.placement);
    assert_eq!(a.explored_nodes, b.explored_nodes);
}

#[test]
fn forced_locations_are_respected() {
    let mut inst = fixtures::table4(1.0);
    inst.algorithms[2].allowed_locations = Some(vec!["edge".into()]);
    let model = Model::new(&inst, DEFAULT_FLOW_CAP).unwrap();
    let r = solve_branch_bound(&model, &Objective::distance(&inst), None).unwrap();
    assert_eq!(r.placement.get("A2"), Some("edge"));
}

#[test]
fn unbounded_algorithms_go_to_the_cloud() {
    let mut inst = fixtures::table4(6.0);
    inst.algorithms[3].memory.growth_per_step = [0, 1 << 20, 0];
    let model = Model::new(&inst, DEFAULT_FLOW_CAP).unwrap();
    let r = solve_branch_bound(&model, &Objective::new(ObjectiveKind::TimeMax, &inst), None).unwrap();
    assert_eq!(r.placement.get("A3"), Some("cloud"));
}
