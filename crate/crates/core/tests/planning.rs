mod common;

use std::cmp::Ordering;

use common::{domain, random_text, rng};
use hapx_core::controller::{Event, Session};
use hapx_core::planner::{
    compare_candidates, exo_budget, select_best, BudgetMode, PlanQuality, PlannerSession,
    SearchConfig,
};
use hapx_core::sim::{SimConfig, SimWorld};
use hapx_core::{EpistemicTree, NodeId};
use proptest::prelude::*;

fn quality() -> impl Strategy<Value = (PlanQuality, String)> {
    (0usize..3, 0usize..=100, 0usize..=100, 0usize..6, "[ab]{0,2}").prop_map(
        |(num_exo, strength, m_value, num_actions, text)| {
            let q = PlanQuality { num_exo, strength, m_value, num_actions };
            (q, text)
        },
    )
}

fn config(exo_n: usize, division: bool, max_horizon: usize) -> SearchConfig {
    SearchConfig {
        exo_n,
        mode: if division { BudgetMode::Division } else { BudgetMode::Modulo },
        max_horizon,
        node_limit: Some(200_000),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_is_a_total_order(cands in prop::collection::vec(quality(), 1..8)) {
        let key = |i: usize| (&cands[i].0, cands[i].1.as_str());
        for i in 0..cands.len() {
            for j in 0..cands.len() {
                prop_assert_eq!(compare_candidates(key(i), key(j)), compare_candidates(key(j), key(i)).reverse());
                for k in 0..cands.len() {
                    if compare_candidates(key(i), key(j)) != Ordering::Greater
                        && compare_candidates(key(j), key(k)) != Ordering::Greater
                    {
                        prop_assert_ne!(compare_candidates(key(i), key(k)), Ordering::Greater);
                    }
                }
            }
        }
        let best = select_best(&cands).unwrap();
        for j in 0..cands.len() {
            prop_assert_ne!(compare_candidates(key(best), key(j)), Ordering::Greater);
        }
    }

    #[test]
    fn plans_respect_the_budget_and_reach_the_goal(
        seed in any::<u64>(),
        exo_n in 1usize..=3,
        division in any::<bool>(),
    ) {
        let d = domain(&random_text(&mut rng(seed), true));
        let Ok(base) = EpistemicTree::new(d.clone()) else { return Ok(()); };
        let cfg = config(exo_n, division, 3);
        let mut session = PlannerSession::new(base.clone(), NodeId::ROOT, cfg.clone());
        for h in 0..=3 {
            session.set_horizon(h);
            let (plans, _) = session.enumerate(8);
            for plan in plans {
                prop_assert_eq!(plan.horizon, h);
                prop_assert!(plan.num_exo(&d) <= exo_budget(h, &cfg));
                let induced = plan.induce(&base, 0).unwrap();
                let reached = (0..=h).any(|t| {
                    induced.leaves(t).into_iter().any(|b| induced.weak_goal_known(NodeId::new(t, b)))
                });
                prop_assert!(reached, "plan misses the goal:\n{}", plan.serialize(&d));
            }
        }
    }

    #[test]
    fn runs_keep_executions_and_replay_exactly(seed in any::<u64>()) {
        let d = domain(&random_text(&mut rng(seed), false));
        let Ok(mut world) = SimWorld::new(d.clone(), SimConfig::new(&d, Vec::new())) else {
            return Ok(());
        };
        let cfg = config(1, false, 4);
        let Ok(mut session) = Session::new(d.clone(), cfg.clone()) else { return Ok(()); };
        if session.run(&mut world, 200).is_err() {
            return Ok(());
        }
        for event in session.log() {
            if let Event::Exec { action, node } = event {
                let applied = session.tree().occurrences().get(node);
                prop_assert!(applied.is_some_and(|acts| acts.contains(action)));
            }
        }
        let log = session.render_log();
        let replayed = Session::replay(d.clone(), cfg, &log).unwrap();
        prop_assert_eq!(replayed.render_log(), log);
        prop_assert_eq!(replayed.tree(), session.tree());
    }
}
