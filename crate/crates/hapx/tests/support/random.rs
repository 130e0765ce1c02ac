//! Small random domains and narratives.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use hapx_core::{EpistemicTree, NodeId};

fn lit_text(f: usize, positive: bool) -> String {
    if positive {
        format!("(f{f})")
    } else {
        format!("(not (f{f}))")
    }
}

fn conj(lits: &[(usize, bool)]) -> String {
    let parts: Vec<String> = lits.iter().map(|&(f, v)| lit_text(f, v)).collect();
    format!("(and {})", parts.join(" "))
}

/// Up to `max` literals over distinct fluents, excluding `skip`.
fn random_lits(rng: &mut impl Rng, fluents: usize, max: usize, skip: Option<usize>) -> Vec<(usize, bool)> {
    let mut pool: Vec<usize> = (0..fluents).filter(|f| Some(*f) != skip).collect();
    pool.shuffle(rng);
    let k = rng.gen_range(0..=max.min(pool.len()));
    pool[..k].iter().map(|&f| (f, rng.gen_bool(0.5))).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_fluents: usize,
    pub max_actions: usize,
    pub maintenance: bool,
}

/// A domain over propositional fluents `f0..`, with at most one sensing
/// action, random conditional effects and a weak goal.
pub fn random_domain(rng: &mut impl Rng, shape: Shape) -> String {
    let n = rng.gen_range(2..=shape.max_fluents);
    let k = rng.gen_range(1..=shape.max_actions);
    let sensing = rng.gen_bool(0.6);
    let mut text = String::from("(define (domain rnd) (:predicates");
    for f in 0..n {
        write!(text, " (f{f})").unwrap();
    }
    text.push(')');
    for a in 0..k {
        write!(text, " (:action a{a}").unwrap();
        let exec = if rng.gen_bool(0.3) {
            random_lits(rng, n, 1, None)
        } else {
            Vec::new()
        };
        if !exec.is_empty() {
            write!(text, " :executable {}", conj(&exec)).unwrap();
        }
        if sensing && a == 0 {
            write!(text, " :observe (f{})", rng.gen_range(0..n)).unwrap();
        } else {
            let mut targets: Vec<usize> = (0..n).collect();
            targets.shuffle(rng);
            let eps = rng.gen_range(1..=2);
            let mut parts = Vec::new();
            for &f in &targets[..eps] {
                let conds = random_lits(rng, n, 2, Some(f));
                let eff = lit_text(f, rng.gen_bool(0.6));
                if conds.is_empty() {
                    parts.push(eff);
                } else {
                    parts.push(format!("(when {} {eff})", conj(&conds)));
                }
            }
            write!(text, " :effect (and {})", parts.join(" ")).unwrap();
        }
        text.push(')');
    }
    text.push_str(")\n(define (problem p) (:domain rnd) (:init");
    let mut unknown = Vec::new();
    let mut initial = vec![None; n];
    for (f, value) in initial.iter_mut().enumerate() {
        match rng.gen_range(0..3) {
            0 => *value = Some(true),
            1 => *value = Some(false),
            _ => unknown.push(f),
        }
        if let Some(v) = *value {
            write!(text, " {}", lit_text(f, v)).unwrap();
        }
    }
    if unknown.len() >= 2 && rng.gen_bool(0.3) {
        write!(text, " (oneof (f{}) (f{}))", unknown[0], unknown[1]).unwrap();
    }
    text.push(')');
    // The goal never holds initially, so planning has something to do.
    let goal = rng.gen_range(0..n);
    let wanted = initial[goal].map_or_else(|| rng.gen_bool(0.7), |v| !v);
    write!(text, " (:goal weak {})", lit_text(goal, wanted)).unwrap();
    if shape.maintenance {
        for (f, v) in random_lits(rng, n, 2, None) {
            write!(text, " (:goal maintenance {})", lit_text(f, v)).unwrap();
        }
    }
    text.push(')');
    text
}

/// Random actions at random nodes and random sensed values up to
/// `horizon`; operations the kernel rejects are skipped.
pub fn random_narrative(rng: &mut impl Rng, tree: EpistemicTree, horizon: usize) -> EpistemicTree {
    let mut tree = tree.extend_to(horizon).expect("extending a fresh tree");
    let actions: Vec<_> = tree.domain().action_ids().collect();
    for _ in 0..rng.gen_range(1..=6) {
        let next = if rng.gen_bool(0.2) {
            let f = rng.gen_range(0..tree.domain().num_fluents());
            let lit = hapx_core::Lit::new(hapx_core::FluentId(f as u32), rng.gen_bool(0.5));
            tree.integrate_sensed(lit, rng.gen_range(0..=horizon))
        } else {
            let node = NodeId::new(rng.gen_range(0..horizon), rng.gen_range(0..tree.branch_count()));
            tree.apply_action(*actions.choose(rng).unwrap(), node)
        };
        if let Ok(t) = next {
            tree = t;
        }
    }
    tree
}
