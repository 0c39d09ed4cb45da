mod common;

use proptest::prelude::*;

use common::{random_feasible_plan, random_instance, rel_close, rng};
use mrta::constructive::construct;
use mrta::feasibility::{check_feasibility, CheckMode};
use mrta::generator::{generate, GeneratorConfig, ProblemClass};
use mrta::io::{parse_instance, serialize_instance, InstanceRef, PlanFile, SolverInfo};
use mrta::local_search::{improve, SearchConfig};
use mrta::objective::evaluate_plan;
use mrta::schedule::simulate;

#[test]
fn every_benchmark_class_solves_and_verifies() {
    for class in ProblemClass::BENCHMARK {
        let instance = generate(&GeneratorConfig::new(class, 77)).unwrap();
        let built = construct(&instance).unwrap();
        let improved = improve(&built.plan, &instance, &SearchConfig::default()).unwrap();
        assert!(improved.objective.total <= built.objective.total);
        let file = PlanFile::build(&improved.plan, &instance, InstanceRef::of(&instance, None), SolverInfo::default()).unwrap();
        let reread = PlanFile::from_json(&file.to_json()).unwrap();
        let report = reread.verify(&instance).unwrap();
        assert!(report.ok(), "{class}: {:?}", report.problems);
        assert_eq!(reread.mission_plan().unwrap(), improved.plan);
    }
}

#[test]
fn instance_files_survive_a_round_trip_unchanged() {
    for class in ProblemClass::BENCHMARK {
        let instance = generate(&GeneratorConfig::new(class, 3)).unwrap();
        let text = serialize_instance(&instance);
        let back = parse_instance(&text).unwrap();
        assert_eq!(serialize_instance(&back), text);
        let a = construct(&instance).unwrap();
        let b = construct(&back).unwrap();
        assert_eq!(a.plan, b.plan);
    }
}

#[test]
fn random_plans_replay_from_the_plan_file() {
    let mut r = rng(91);
    for n in 1..=10 {
        let instance = random_instance(&mut r, n, 0.2);
        let plan = random_feasible_plan(&mut r, &instance);
        let file = PlanFile::build(&plan, &instance, InstanceRef::of(&instance, None), SolverInfo::default()).unwrap();
        let schedule = simulate(&plan.augment(instance.precedence()), &instance).unwrap();
        assert_eq!(file.schedule, schedule);
        let report = file.verify(&instance).unwrap();
        assert!(report.ok(), "{:?}", report.problems);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_output_is_feasible_and_consistent(seed in any::<u64>(), n in 1usize..=9, arc_p in 0.0f64..0.4) {
        let mut r = rng(seed);
        let instance = random_instance(&mut r, n, arc_p);
        let built = construct(&instance).unwrap();
        let improved = improve(&built.plan, &instance, &SearchConfig::default()).unwrap();
        for plan in [&built.plan, &improved.plan] {
            prop_assert!(plan.is_complete());
            prop_assert!(check_feasibility(plan, &instance, CheckMode::Complete).unwrap().feasible());
        }
        let fresh = evaluate_plan(&improved.plan, &instance).unwrap();
        prop_assert!(rel_close(fresh.total, improved.objective.total, 1e-12));
        prop_assert!(improved.objective.total <= built.objective.total + 1e-9);
    }

    #[test]
    fn random_feasible_plans_are_feasible(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let instance = random_instance(&mut r, n, 0.25);
        let plan = random_feasible_plan(&mut r, &instance);
        prop_assert!(check_feasibility(&plan, &instance, CheckMode::Complete).unwrap().feasible());
    }
}
