#![allow(dead_code)]

use std::fmt::Write;
use std::sync::Arc;

use hapx_core::lang::{ground, parse};
use hapx_core::{EpistemicTree, FluentId, GroundDomain, Lit, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn domain(text: &str) -> Arc<GroundDomain> {
    Arc::new(ground(&parse(text).expect("parses")).expect("grounds"))
}

fn lit(f: usize, v: bool) -> String {
    if v {
        format!("(f{f})")
    } else {
        format!("(not (f{f}))")
    }
}

/// Propositional domain text with up to 4 fluents and 4 actions; some
/// actions are exogenous, at most one senses.
pub fn random_text(rng: &mut impl Rng, with_exogenous: bool) -> String {
    let n = rng.gen_range(2..=4);
    let mut t = String::from("(define (domain rnd) (:predicates");
    for f in 0..n {
        write!(t, " (f{f})").unwrap();
    }
    t.push(')');
    let sensing = rng.gen_bool(0.5);
    for a in 0..rng.gen_range(1..=4) {
        write!(t, " (:action a{a}").unwrap();
        if with_exogenous && a > 0 && rng.gen_bool(0.3) {
            t.push_str(" :exogenous");
        }
        if rng.gen_bool(0.3) {
            let f = rng.gen_range(0..n);
            write!(t, " :executable {}", lit(f, rng.gen_bool(0.5))).unwrap();
        }
        if sensing && a == 0 {
            write!(t, " :observe (f{})", rng.gen_range(0..n)).unwrap();
        } else {
            let mut fs: Vec<usize> = (0..n).collect();
            fs.shuffle(rng);
            t.push_str(" :effect (and");
            for &f in &fs[..rng.gen_range(1..=2)] {
                let c = (f + 1 + rng.gen_range(0..n - 1)) % n;
                if rng.gen_bool(0.5) {
                    write!(t, " (when {} {})", lit(c, rng.gen_bool(0.5)), lit(f, rng.gen_bool(0.6))).unwrap();
                } else {
                    write!(t, " {}", lit(f, rng.gen_bool(0.6))).unwrap();
                }
            }
            t.push(')');
        }
        t.push(')');
    }
    t.push_str(")\n(define (problem p) (:domain rnd) (:init");
    let mut initial = vec![None; n];
    for (f, value) in initial.iter_mut().enumerate() {
        *value = [Some(true), Some(false), None][rng.gen_range(0..3)];
        if let Some(v) = *value {
            write!(t, " {}", lit(f, v)).unwrap();
        }
    }
    t.push(')');
    let goal = rng.gen_range(0..n);
    let wanted = initial[goal].map_or_else(|| rng.gen_bool(0.7), |v| !v);
    write!(t, " (:goal weak {})", lit(goal, wanted)).unwrap();
    if rng.gen_bool(0.5) {
        write!(t, " (:goal maintenance {})", lit(rng.gen_range(0..n), true)).unwrap();
    }
    t.push(')');
    t
}

/// A replayable list of narrative operations.
#[derive(Clone, Debug)]
pub enum Op {
    Apply { action: usize, step: usize, branch: usize },
    Sense { fluent: usize, value: bool, step: usize },
}

pub fn random_ops(rng: &mut impl Rng, horizon: usize) -> Vec<Op> {
    (0..rng.gen_range(1..=6))
        .map(|_| {
            if rng.gen_bool(0.2) {
                Op::Sense {
                    fluent: rng.gen_range(0..4),
                    value: rng.gen_bool(0.5),
                    step: rng.gen_range(0..=horizon),
                }
            } else {
                Op::Apply {
                    action: rng.gen_range(0..4),
                    step: rng.gen_range(0..horizon),
                    branch: rng.gen_range(0..3),
                }
            }
        })
        .collect()
}

/// Applies `ops`, skipping the ones the kernel rejects.
pub fn narrate(domain: &Arc<GroundDomain>, horizon: usize, ops: &[Op]) -> Option<EpistemicTree> {
    let mut tree = EpistemicTree::new(domain.clone()).ok()?.extend_to(horizon).ok()?;
    let actions: Vec<_> = domain.action_ids().collect();
    for op in ops {
        let next = match *op {
            Op::Apply { action, step, branch } => {
                tree.apply_action(actions[action % actions.len()], NodeId::new(step, branch))
            }
            Op::Sense { fluent, value, step } => {
                let f = FluentId((fluent % domain.num_fluents()) as u32);
                tree.integrate_sensed(Lit::new(f, value), step)
            }
        };
        if let Ok(t) = next {
            tree = t;
        }
    }
    Some(tree)
}
