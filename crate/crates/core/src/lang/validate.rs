use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;
use super::ground::{ground, GroundAction};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Require every exogenous action to have exactly one unconditional effect.
    pub strict_exogenous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// Two exogenous ground actions share an effect literal.
    ExogenousOverlap {
        first: String,
        second: String,
        effect: String,
    },
    /// Strict mode: an exogenous schema that is not a single unconditional effect.
    ExogenousNotSimple { action: String },
    /// An action senses a fluent it also changes.
    SensedEffect { action: String, fluent: String },
    UndeclaredObject { object: String, context: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ExogenousOverlap {
                first,
                second,
                effect,
            } => write!(
                f,
                "overlapping exogenous effects: {first} and {second} both cause {effect}"
            ),
            Violation::ExogenousNotSimple { action } => write!(
                f,
                "exogenous action {action} must have exactly one unconditional effect"
            ),
            Violation::SensedEffect { action, fluent } => {
                write!(f, "action {action} both senses and changes {fluent}")
            }
            Violation::UndeclaredObject { object, context } => {
                write!(f, "undeclared object `{object}` in {context}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Sorted and free of duplicates.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(src: &Source, opts: &ValidateOptions) -> ValidationReport {
    let mut found = BTreeSet::new();
    let declared: BTreeSet<&str> = src.problem.objects.iter().map(|(o, _)| o.as_str()).collect();

    let check_atom = |atom: &Atom, context: &str, found: &mut BTreeSet<Violation>| {
        for t in &atom.args {
            if let Term::Const(c) = t {
                if !declared.contains(c.as_str()) {
                    found.insert(Violation::UndeclaredObject {
                        object: c.clone(),
                        context: context.to_string(),
                    });
                }
            }
        }
    };

    for a in &src.domain.actions {
        let ctx = alloc::format!("action {}", a.name);
        for ep in &a.effects {
            for c in &ep.conditions {
                check_atom(&c.atom, &ctx, &mut found);
            }
            check_atom(&ep.effect.atom, &ctx, &mut found);
        }
        for o in &a.observes {
            check_atom(o, &ctx, &mut found);
            if a.effects.iter().any(|ep| ep.effect.atom == *o) {
                found.insert(Violation::SensedEffect {
                    action: a.name.clone(),
                    fluent: o.predicate.clone(),
                });
            }
        }
        for l in &a.executable {
            check_atom(&l.atom, &ctx, &mut found);
        }
        if opts.strict_exogenous
            && a.exogenous
            && (a.effects.len() != 1 || !a.effects[0].conditions.is_empty())
        {
            found.insert(Violation::ExogenousNotSimple {
                action: a.name.clone(),
            });
        }
    }
    let p = &src.problem;
    let sections: [(&str, &[LitTemplate]); 3] = [
        ("init", &p.init),
        ("weak goal", &p.weak_goals),
        ("maintenance goal", &p.maintenance_goals),
    ];
    for (ctx, lits) in sections {
        for l in lits {
            check_atom(&l.atom, ctx, &mut found);
        }
    }
    for grp in &p.oneof {
        for l in grp {
            check_atom(&l.atom, "oneof", &mut found);
        }
    }

    // Overlap is a property of ground instances. Schemas whose parameter
    // types have no objects have no instances and are left out.
    if !found
        .iter()
        .any(|v| matches!(v, Violation::UndeclaredObject { .. }))
    {
        let types: BTreeSet<&str> = p.objects.iter().map(|(_, t)| t.as_str()).collect();
        let mut exo_only = Source {
            domain: src.domain.clone(),
            problem: ProblemSpec {
                objects: p.objects.clone(),
                ..ProblemSpec::default()
            },
        };
        exo_only.domain.actions.retain(|a| {
            a.exogenous && a.params.iter().all(|v| types.contains(v.ty.as_str()))
        });
        if let Ok(g) = ground(&exo_only) {
            let actions: Vec<&GroundAction> = g.actions().iter().collect();
            for (i, a) in actions.iter().enumerate() {
                for b in &actions[i + 1..] {
                    for ep in &a.eps {
                        if b.has_effect(ep.effect) {
                            let (x, y) = (a.to_string(), b.to_string());
                            let (first, second) = if x <= y { (x, y) } else { (y, x) };
                            found.insert(Violation::ExogenousOverlap {
                                first,
                                second,
                                effect: g.lit_name(ep.effect),
                            });
                        }
                    }
                }
            }
        }
    }

    ValidationReport {
        violations: found.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    const HEAD: &str = "(define (domain d) (:types Door) (:predicates (open ?d - Door) (mon_open ?d - Door))";
    const PROBLEM: &str = "(define (problem p) (:domain d) (:objects d1 d2 d3 - Door))";

    fn check(actions: &str, strict: bool) -> ValidationReport {
        let text = alloc::format!("{HEAD} {actions}) {PROBLEM}");
        validate(
            &parse(&text).unwrap(),
            &ValidateOptions {
                strict_exogenous: strict,
            },
        )
    }

    #[test]
    fn overlapping_exogenous_effects() {
        let r = check(
            "(:action exoClosed :parameters (?d - Door) :exogenous :effect (not (open ?d)))
             (:action slam :exogenous :effect (not (open d3)))",
            false,
        );
        assert_eq!(
            r.violations,
            alloc::vec![Violation::ExogenousOverlap {
                first: "exoClosed(d3)".into(),
                second: "slam".into(),
                effect: "-open(d3)".into(),
            }]
        );
    }

    #[test]
    fn single_exogenous_action_is_clean() {
        let r = check(
            "(:action exoClosed :parameters (?d - Door) :exogenous :effect (not (open ?d)))",
            true,
        );
        assert!(r.is_clean(), "{:?}", r.violations);
    }

    #[test]
    fn empty_domain_is_clean() {
        let src = parse("(define (domain e))").unwrap();
        assert!(validate(&src, &ValidateOptions::default()).is_clean());
    }

    #[test]
    fn strict_mode_and_sensing_overlap() {
        let r = check(
            "(:action gust :parameters (?d - Door) :exogenous
                :effect (and (open ?d) (mon_open ?d)))
             (:action peek :parameters (?d - Door) :effect (open ?d) :observe (open ?d))",
            true,
        );
        assert!(r.violations.contains(&Violation::ExogenousNotSimple {
            action: "gust".into()
        }));
        assert!(r.violations.contains(&Violation::SensedEffect {
            action: "peek".into(),
            fluent: "open".into()
        }));
    }

    #[test]
    fn undeclared_objects_are_reported() {
        let text = alloc::format!(
            "{HEAD}) (define (problem p) (:domain d) (:objects d1 - Door) (:init (open d9)))"
        );
        let r = validate(&parse(&text).unwrap(), &ValidateOptions::default());
        assert_eq!(r.violations.len(), 1);
    }
}
