//! Possible-world semantics, exhaustive plan search and quality recounts.

use hapx_core::{EpistemicTree, GroundDomain, Lit, NodeId};

use super::Facts;

pub type World = Vec<bool>;

fn holds(w: &World, l: Lit) -> bool {
    w[l.fluent.0 as usize] == l.positive
}

/// Every complete initial state allowed by the initial literals and the
/// exactly-one groups.
pub fn initial_worlds(domain: &GroundDomain) -> Vec<World> {
    let n = domain.num_fluents();
    assert!(n <= 16, "too many fluents to enumerate");
    (0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<World>())
        .filter(|w| domain.init.iter().all(|l| holds(w, *l)))
        .filter(|w| {
            domain
                .oneof
                .iter()
                .all(|g| g.iter().filter(|l| holds(w, **l)).count() == 1)
        })
        .collect()
}

/// Applies every effect whose conditions hold in `w`, all evaluated on `w`.
pub fn successor(domain: &GroundDomain, w: &World, actions: &[&str]) -> World {
    let mut next = w.clone();
    for name in actions {
        let a = domain.find_action(name).expect("known action");
        for ep in &domain.action(a).eps {
            if ep.conditions.iter().all(|c| holds(w, *c)) {
                next[ep.effect.fluent.0 as usize] = ep.effect.positive;
            }
        }
    }
    next
}

/// Checks every knowledge fact of `tree` against brute-force possible
/// worlds. Returns the number of facts checked.
pub fn check_soundness(tree: &EpistemicTree) -> Result<usize, String> {
    let domain = tree.domain();
    let facts = Facts::from_lines(&tree.trace_lines());
    let worlds = initial_worlds(domain);
    let lit = |s: &str| domain.parse_lit(s).unwrap_or_else(|| panic!("bad literal {s}"));
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<(Lit, usize)>> =
        Default::default();
    for (l, t, t1, b) in &facts.knows {
        groups.entry((*b, *t1)).or_default().push((lit(l), *t));
    }
    let mut checked = 0;
    for (&(b, t1), known) in &groups {
        let computer = facts.knowledge_owner(b, t1);
        for w0 in &worlds {
            let mut states = vec![w0.clone()];
            for s in 0..t1 {
                let next = successor(domain, &states[s], &facts.actions_at(computer, s));
                states.push(next);
            }
            let consistent = (0..=t1).all(|s| {
                let k = facts.knowledge_owner(b, s);
                let sres_ok = facts
                    .sres
                    .iter()
                    .filter(|(_, t, br)| *t == s && *br == k)
                    .all(|(l, _, _)| holds(&states[s], lit(l)));
                let sensed_ok = !facts.valid.contains(&(s, k))
                    || tree
                        .sensed()
                        .iter()
                        .filter(|((t, _), _)| *t == s)
                        .all(|(&(_, f), &v)| holds(&states[s], Lit::new(f, v)));
                sres_ok && sensed_ok
            });
            if !consistent {
                continue;
            }
            for &(l, t) in known {
                checked += 1;
                if !holds(&states[t], l) {
                    return Err(format!(
                        "knows({},{t},{t1},{b}) fails in world {w0:?}\n{}",
                        domain.lit_name(l),
                        tree.trace()
                    ));
                }
            }
        }
    }
    Ok(checked)
}

/// Smallest step at which some reachable node knows the weak goal, trying
/// every endogenous action (or none) at every node without pruning.
pub fn min_weak_horizon(tree: &EpistemicTree, max: usize) -> Option<usize> {
    (0..=max).find(|&d| reach(tree, NodeId::ROOT, d))
}

fn reach(tree: &EpistemicTree, node: NodeId, depth: usize) -> bool {
    if tree.weak_goal_known(node) {
        return true;
    }
    let domain = tree.domain();
    let applied: Vec<EpistemicTree> = domain
        .action_ids()
        .filter(|a| !domain.action(*a).exogenous)
        .filter_map(|a| tree.apply_action(a, node).ok())
        .collect();
    if applied.iter().any(|t| t.weak_goal_known(node)) {
        return true;
    }
    if node.step == depth {
        return false;
    }
    std::iter::once(tree.clone()).chain(applied).any(|t| {
        let before = tree.branch_count();
        let Ok(t) = t.extend_to(node.step + 1) else {
            return false;
        };
        let next = node.step + 1;
        std::iter::once(node.branch)
            .chain(before..t.branch_count())
            .map(|b| NodeId::new(next, b))
            .filter(|n| t.is_valid(*n))
            .any(|n| reach(&t, n, depth))
    })
}

/// Strength and m-value recounted from trace facts at horizon `h`.
pub fn recount_quality(facts: &Facts, h: usize, goals: &[String], maintenance: &[String]) -> (usize, usize) {
    let leaves: Vec<usize> = facts
        .valid
        .iter()
        .filter(|(t, _)| *t == h)
        .map(|(_, b)| *b)
        .collect();
    let knows = |l: &String, t: usize, b: usize| facts.knows.contains(&(l.clone(), t, t, b));
    let reached = leaves
        .iter()
        .filter(|&&b| goals.iter().all(|g| knows(g, h, b)))
        .count();
    let strength = 100 * reached / leaves.len();
    if maintenance.is_empty() {
        return (strength, 100);
    }
    let nodes: Vec<&(usize, usize)> = facts.valid.iter().filter(|(t, _)| *t <= h).collect();
    let held: usize = nodes
        .iter()
        .map(|&&(t, b)| maintenance.iter().filter(|m| knows(m, t, b)).count())
        .sum();
    (strength, 100 * held / nodes.len())
}
