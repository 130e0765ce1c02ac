//! Fixpoint saturation of one epistemic layer.
//!
//! A layer holds, for a fixed epistemic step `t1`, the literals known about
//! every step `0..=t1`. The transitions between consecutive steps are given
//! as the applied effects at each step.

use alloc::vec::Vec;

use crate::lang::{GroundEp, Lit};
use crate::litset::LitSet;

fn blocked(ep: &GroundEp, known: &LitSet) -> bool {
    ep.conditions.iter().any(|c| known.contains(c.complement()))
}

/// Saturates `steps` (about-steps `0..=t1`) under effect projection,
/// positive and negative postdiction, forward and backward inertia, and
/// exclusive-or completion at step 0. `eps[s]` lists the effects applied
/// at step `s`; `eps.len()` must equal `steps.len() - 1`.
pub(crate) fn saturate(steps: &mut [LitSet], eps: &[Vec<&GroundEp>], oneof: &[Vec<Lit>]) {
    debug_assert_eq!(eps.len() + 1, steps.len());
    let Some(first) = steps.first() else {
        return;
    };
    let mut fwd_block = first.clone();
    let mut bwd_block = first.clone();
    let mut changed = true;
    while changed {
        changed = false;
        changed |= complete_oneof(&mut steps[0], oneof);
        for (s, applied) in eps.iter().enumerate() {
            let (lo, hi) = steps.split_at_mut(s + 1);
            let cur = &mut lo[s];
            let next = &mut hi[0];

            fwd_block.clear();
            bwd_block.clear();
            for ep in applied {
                if !blocked(ep, cur) {
                    fwd_block.insert(ep.effect.complement());
                    bwd_block.insert(ep.effect);
                }
            }
            changed |= next.union_masked(cur, &fwd_block);
            changed |= cur.union_masked(next, &bwd_block);

            for ep in applied {
                if ep.conditions.iter().all(|c| cur.contains(*c)) {
                    changed |= next.insert(ep.effect);
                }
                if next.contains(ep.effect)
                    && cur.contains(ep.effect.complement())
                    && applied.iter().filter(|o| o.effect == ep.effect).count() == 1
                {
                    for c in &ep.conditions {
                        changed |= cur.insert(*c);
                    }
                }
                if next.contains(ep.effect.complement()) {
                    let mut open = ep.conditions.iter().filter(|c| !cur.contains(**c));
                    if let (Some(c), None) = (open.next(), open.next()) {
                        changed |= cur.insert(c.complement());
                    }
                }
            }
        }
    }
}

fn complete_oneof(init: &mut LitSet, groups: &[Vec<Lit>]) -> bool {
    let mut changed = false;
    for group in groups {
        if let Some(t) = group.iter().find(|l| init.contains(**l)) {
            for l in group {
                if l != t {
                    changed |= init.insert(l.complement());
                }
            }
            continue;
        }
        let mut open = group.iter().filter(|l| !init.contains(l.complement()));
        if let (Some(last), None) = (open.next(), open.next()) {
            changed |= init.insert(*last);
        }
    }
    changed
}
