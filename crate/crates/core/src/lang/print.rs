use alloc::string::String;
use core::fmt::Write;

use super::ast::*;

fn term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => {
            out.push('?');
            out.push_str(v);
        }
        Term::Const(c) => out.push_str(c),
    }
}

fn atom(out: &mut String, a: &Atom) {
    out.push('(');
    out.push_str(&a.predicate);
    for t in &a.args {
        out.push(' ');
        term(out, t);
    }
    out.push(')');
}

fn literal(out: &mut String, l: &LitTemplate) {
    if l.positive {
        atom(out, &l.atom);
    } else {
        out.push_str("(not ");
        atom(out, &l.atom);
        out.push(')');
    }
}

fn conjunction(out: &mut String, ls: &[LitTemplate]) {
    out.push_str("(and");
    for l in ls {
        out.push(' ');
        literal(out, l);
    }
    out.push(')');
}

fn typed(out: &mut String, vars: &[TypedVar]) {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "?{} - {}", v.name, v.ty);
    }
}

/// Renders a source back into the surface syntax. The output reparses to a
/// structurally equal `Source`.
pub fn pretty_print(src: &Source) -> String {
    let mut out = String::new();
    let d = &src.domain;
    let _ = writeln!(out, "(define (domain {})", d.name);
    out.push_str("  (:types");
    for t in &d.types {
        out.push(' ');
        out.push_str(t);
    }
    out.push_str(")\n  (:predicates");
    for p in &d.predicates {
        let _ = write!(out, "\n    ({}", p.name);
        if !p.params.is_empty() {
            out.push(' ');
            typed(&mut out, &p.params);
        }
        out.push(')');
    }
    out.push(')');
    for a in &d.actions {
        let _ = write!(out, "\n  (:action {}", a.name);
        out.push_str("\n    :parameters (");
        typed(&mut out, &a.params);
        out.push(')');
        if a.exogenous {
            out.push_str("\n    :exogenous");
        }
        if !a.executable.is_empty() {
            out.push_str("\n    :executable ");
            conjunction(&mut out, &a.executable);
        }
        out.push_str("\n    :effect (and");
        for ep in &a.effects {
            out.push(' ');
            if ep.conditions.is_empty() {
                literal(&mut out, &ep.effect);
            } else {
                out.push_str("(when ");
                conjunction(&mut out, &ep.conditions);
                out.push(' ');
                literal(&mut out, &ep.effect);
                out.push(')');
            }
        }
        out.push(')');
        for o in &a.observes {
            out.push_str("\n    :observe ");
            atom(&mut out, o);
        }
        out.push(')');
    }
    out.push_str(")\n");

    let p = &src.problem;
    if *p != ProblemSpec::default() {
        let _ = writeln!(out, "(define (problem {})", p.name);
        if !p.domain.is_empty() {
            let _ = writeln!(out, "  (:domain {})", p.domain);
        }
        out.push_str("  (:objects");
        for (o, t) in &p.objects {
            let _ = write!(out, " {o} - {t}");
        }
        out.push_str(")\n  (:init");
        for l in &p.init {
            out.push(' ');
            literal(&mut out, l);
        }
        for g in &p.oneof {
            out.push_str(" (oneof");
            for l in g {
                out.push(' ');
                literal(&mut out, l);
            }
            out.push(')');
        }
        out.push(')');
        for g in &p.weak_goals {
            out.push_str("\n  (:goal weak ");
            literal(&mut out, g);
            out.push(')');
        }
        for g in &p.maintenance_goals {
            out.push_str("\n  (:goal maintenance ");
            literal(&mut out, g);
            out.push(')');
        }
        out.push_str(")\n");
    }
    out
}
