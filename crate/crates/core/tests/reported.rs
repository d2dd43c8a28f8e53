//! Published values for the worked examples and experiments.

use allocflow_core::comm::expected_link_seconds;
use allocflow_core::time::SegmentKind;
use allocflow_core::*;

fn model(inst: &ProblemInstance) -> Model {
    Model::new(inst, DEFAULT_FLOW_CAP).unwrap()
}

#[test]
fn sorting_robot_local_versus_offloaded() {
    let inst = fixtures::example1();
    let m = model(&inst);
    let ours = solve_branch_bound(&m, &Objective::distance(&inst), None).unwrap();
    assert_eq!(ours.placement.get("sort"), Some("edge"));
    assert_eq!(ours.cost.time_seconds, 5.0);
    let base = solve_baseline(&m).unwrap();
    assert_eq!(base.placement.get("sort"), Some("cloud"));
    assert_eq!(base.cost.time_seconds, 4.0);
    assert_eq!(baseline_overall(&m, &base.placement).unwrap(), 7.0);
}

#[test]
fn example2_at_x_one_runs_on_fog_in_four_seconds() {
    let inst = fixtures::example2(1.0);
    let m = model(&inst);
    let r = solve_bruteforce(&m, &Objective::distance(&inst), 100, 1).unwrap();
    assert_eq!(r.placement.get("sort"), Some("fog"));
    assert_eq!(r.cost.time_seconds, 4.0);
}

#[test]
fn table4_return_surpluses() {
    for (d, surplus) in [(1.0, 2.0), (2.0, 4.0), (4.0, 4.0), (6.0, 0.0)] {
        let m = model(&fixtures::table4(d));
        let base = solve_baseline(&m).unwrap();
        let overall = baseline_overall(&m, &base.placement).unwrap();
        assert_eq!(overall - base.cost.time_seconds, surplus, "d={d}");
    }
}

#[test]
fn realworld_memory_is_all_outputs() {
    let inst = fixtures::realworld();
    let m = model(&inst);
    let r = solve_branch_bound(&m, &Objective::distance(&inst), None).unwrap();
    assert_eq!(r.cost.memory_bytes(), 594_304.0);
    assert!((r.cost.memory_mb() - 0.5668).abs() < 1e-4);
}

fn folded_mean_oracle(mu: f64, sigma: f64) -> f64 {
    // mu * (1 - 2 Phi(-mu / sigma)) + sigma sqrt(2 / pi) exp(-mu^2 / 2 sigma^2)
    let phi = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
    mu * (1.0 - 2.0 * phi(-mu / sigma)) + sigma * (2.0 / std::f64::consts::PI).sqrt() * (-mu * mu / (2.0 * sigma * sigma)).exp()
}

#[test]
fn realworld_all_fog_time_by_segment_sum() {
    let inst = fixtures::realworld();
    let m = model(&inst);
    let fog = Placement::uniform(&inst, "fog1");
    let cost = evaluate(&m, &fog, &Objective::distance(&inst)).unwrap();

    let up = 0.447 + folded_mean_oracle(0.182, 0.111);
    let down = 0.475 + folded_mean_oracle(0.187, 0.397);
    let via_a3: f64 = 0.153 + 1.538 + 4.1e-4 + 1.3e-4 + 4.01e-3;
    let via_a4 = 0.153 + 1.538 + 7.74e-5 + 1.94e-5 + 1.3e-4 + 4.01e-3;
    let expected = up + via_a3.max(via_a4) + down;
    assert!((cost.time_seconds - expected).abs() < 1e-12, "{} vs {expected}", cost.time_seconds);
    assert_eq!(cost.memory_bytes(), 594_304.0);

    let link = inst.comm.iter().find(|l| l.from == "edge" && l.to == "fog1").unwrap();
    assert!((expected_link_seconds(link, 0) - up).abs() < 1e-15);
}

#[test]
fn fog_flow_breakdown() {
    let inst = fixtures::table4(2.0);
    let m = model(&inst);
    let r = solve_branch_bound(&m, &Objective::distance(&inst), None).unwrap();
    let long = r.per_flow.iter().find(|f| f.flow.ids() == ["Data", "A1", "A3"]).unwrap();
    assert_eq!(long.seconds_of(SegmentKind::RequestHop), 2.0);
    assert_eq!(long.seconds_of(SegmentKind::Exec), 4.0);
    assert_eq!(long.seconds_of(SegmentKind::ReturnHop), 2.0);
    assert_eq!(long.total_seconds, 8.0);
}
