mod common;

use common::spec;
use mdmsop_core::generate::{random_covering_arrangement, random_gtsp, random_instance};
use mdmsop_core::ilp::counts;
use mdmsop_core::{
    build_model, check_against_model, evaluate, is_valid, Arrangement, BudgetMode, MdmsopInstance,
    ModelChecker, ProfitRule, SecVariant, VarKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn counts_follow_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let m = rng.gen_range(1..=4);
        let base = random_gtsp(&mut rng, "c", (m, 9), (m, 20), 100);
        let (n, r) = (base.n_nodes(), base.n_sets());
        let mode = if rng.gen() {
            BudgetMode::Cumulative
        } else {
            BudgetMode::Individual
        };
        let inst = MdmsopInstance::adapt(base, m, ProfitRule::G2, mode, 0.25, 100).unwrap();
        let mtz = build_model(&inst, SecVariant::Mtz);
        let gav = build_model(&inst, SecVariant::Gavish);
        for model in [&mtz, &gav] {
            assert_eq!(model.count_vars('x'), counts::x(n, m));
            assert_eq!(model.count_vars('y'), counts::y(n, m));
            assert_eq!(model.count_vars('z'), counts::z(r, m));
            assert_eq!(model.objective.len(), m * (r + m));
            let common = model.constraints.iter().filter(|c| !c.is_sec()).count();
            assert_eq!(
                common,
                counts::common(n, m, r, mode == BudgetMode::Individual)
            );
        }
        assert_eq!(mtz.count_vars('u'), counts::u_mtz(n, m));
        assert_eq!(gav.count_vars('u'), counts::u_gavish(n, m));
        assert_eq!(mtz.count_family("mtz"), counts::mtz(n, m));
        assert_eq!(gav.count_family("flow_cap"), counts::gavish_capacity(n, m));
        assert_eq!(gav.count_family("flow_bal"), counts::gavish_balance(n));
        assert!(mtz
            .variables
            .iter()
            .filter(|v| v.name.starts_with("u_"))
            .all(|v| v.kind == VarKind::Integer));
        assert!(gav
            .variables
            .iter()
            .filter(|v| v.name.starts_with("u_"))
            .all(|v| v.kind == VarKind::Continuous));
        // outside the SEC block the two models are identical
        let strip = |model: &mdmsop_core::IlpModel| {
            model
                .constraints
                .iter()
                .filter(|c| !c.is_sec())
                .cloned()
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&mtz), strip(&gav));
    }
}

#[test]
fn valid_arrangements_satisfy_both_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen = 0;
    while seen < 300 {
        let mode = if seen % 2 == 0 {
            BudgetMode::Cumulative
        } else {
            BudgetMode::Individual
        };
        let inst = random_instance(&mut rng, &spec(2, 7, 12, mode, ProfitRule::G2));
        let arr = random_covering_arrangement(&mut rng, 2, inst.r());
        if !is_valid(&arr, &inst).is_valid() {
            continue;
        }
        seen += 1;
        for sec in [SecVariant::Mtz, SecVariant::Gavish] {
            let v = check_against_model(&arr, &inst, sec);
            assert!(v.is_satisfied(), "{sec} {arr}: {v:?}");
            assert_eq!(v.objective, evaluate(&arr, &inst).profit);
        }
    }
}

#[test]
fn invalid_arrangements_name_the_broken_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..200 {
        let inst = random_instance(
            &mut rng,
            &spec(2, 7, 12, BudgetMode::Cumulative, ProfitRule::G2),
        );
        let mut checker = ModelChecker::new(&inst, SecVariant::Mtz);
        let r = inst.r();

        let mut lonely = Arrangement::unvisited(2, r);
        *lonely.row_mut(0) = (1..=r).collect();
        lonely.bucket_mut().clear();
        let v = checker.check_routes(&evaluate(&lonely, &inst).routes);
        assert!(
            v.violates("inflow") && v.violates("outflow"),
            "instance {k}"
        );

        let mut twice = random_covering_arrangement(&mut rng, 2, r);
        let q = twice.row(0)[0];
        twice.row_mut(1).push(q);
        let v = checker.check_routes(&evaluate(&twice, &inst).routes);
        assert!(v.violates("excl"), "instance {k}");

        let tight = MdmsopInstance::adapt(
            inst.base().clone(),
            2,
            ProfitRule::G2,
            BudgetMode::Individual,
            0.25,
            4,
        )
        .unwrap();
        let all = Arrangement::from_rows(vec![(1..r).collect(), vec![r], vec![]]);
        let costs = evaluate(&all, &tight).per_traveler_cost;
        let v = check_against_model(&all, &tight, SecVariant::Gavish);
        for (t, &c) in costs.iter().enumerate() {
            assert_eq!(
                v.violates(&format!("tour_budget_{}", t + 1)),
                c > tight.budget()
            );
        }
    }
}
