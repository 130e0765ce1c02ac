use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentId(pub u32);

/// A ground literal: a fluent with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub fluent: FluentId,
    pub positive: bool,
}

impl Lit {
    pub fn pos(fluent: FluentId) -> Self {
        Lit {
            fluent,
            positive: true,
        }
    }

    pub fn neg(fluent: FluentId) -> Self {
        Lit {
            fluent,
            positive: false,
        }
    }

    pub fn new(fluent: FluentId, positive: bool) -> Self {
        Lit { fluent, positive }
    }

    #[inline]
    pub fn complement(self) -> Self {
        Lit {
            fluent: self.fluent,
            positive: !self.positive,
        }
    }

    /// Dense index: positive literal at `2f`, negative at `2f + 1`.
    #[inline]
    pub fn index(self) -> usize {
        self.fluent.0 as usize * 2 + usize::from(!self.positive)
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        Lit {
            fluent: FluentId((i / 2) as u32),
            positive: i.is_multiple_of(2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundFluent {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundFluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_call(f, &self.predicate, &self.args)
    }
}

fn write_call(f: &mut impl fmt::Write, name: &str, args: &[String]) -> fmt::Result {
    f.write_str(name)?;
    if !args.is_empty() {
        f.write_char('(')?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            f.write_str(a)?;
        }
        f.write_char(')')?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundEp {
    pub conditions: Vec<Lit>,
    pub effect: Lit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub eps: Vec<GroundEp>,
    pub observes: Vec<FluentId>,
    pub executable: Vec<Lit>,
    pub exogenous: bool,
}

impl GroundAction {
    pub fn has_effect(&self, lit: Lit) -> bool {
        self.eps.iter().any(|ep| ep.effect == lit)
    }

    pub fn is_sensing(&self) -> bool {
        !self.observes.is_empty()
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_call(f, &self.name, &self.args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundError {
    EmptyType { ty: String, action: String },
    UnknownObject(String),
    ObjectType { object: String, expected: String },
    UnboundVariable(String),
}

impl fmt::Display for GroundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundError::EmptyType { ty, action } => {
                write!(f, "no objects of type `{ty}` to instantiate `{action}`")
            }
            GroundError::UnknownObject(o) => write!(f, "undeclared object `{o}`"),
            GroundError::ObjectType { object, expected } => {
                write!(f, "object `{object}` is not of type `{expected}`")
            }
            GroundError::UnboundVariable(v) => write!(f, "unbound variable `?{v}`"),
        }
    }
}

impl core::error::Error for GroundError {}

/// The fully instantiated planning problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundDomain {
    fluents: Vec<GroundFluent>,
    fluent_index: BTreeMap<GroundFluent, FluentId>,
    actions: Vec<GroundAction>,
    pub init: Vec<Lit>,
    pub oneof: Vec<Vec<Lit>>,
    pub weak_goals: Vec<Lit>,
    pub maintenance_goals: Vec<Lit>,
    /// `(f, mon_f)` pairs for fluents with a monitoring pseudo-fluent.
    monitors: Vec<(FluentId, FluentId)>,
}

impl GroundDomain {
    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    pub fn fluents(&self) -> &[GroundFluent] {
        &self.fluents
    }

    pub fn fluent(&self, id: FluentId) -> &GroundFluent {
        &self.fluents[id.0 as usize]
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.0 as usize]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn lit_name(&self, lit: Lit) -> String {
        if lit.positive {
            self.fluent(lit.fluent).to_string()
        } else {
            format!("-{}", self.fluent(lit.fluent))
        }
    }

    pub fn action_name(&self, id: ActionId) -> String {
        self.action(id).to_string()
    }

    pub fn fluent_id(&self, f: &GroundFluent) -> Option<FluentId> {
        self.fluent_index.get(f).copied()
    }

    /// Looks up a fluent written as `name(a,b)`, `(name a b)` or `name`.
    pub fn find_fluent(&self, text: &str) -> Option<FluentId> {
        self.fluent_id(&parse_call(text)?)
    }

    /// Parses `open(d1)`, `-open(d1)`, `¬open(d1)` or `(not (open d1))`.
    pub fn parse_lit(&self, text: &str) -> Option<Lit> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix('-').or_else(|| t.strip_prefix('¬')) {
            return self.find_fluent(rest).map(Lit::neg);
        }
        if let Some(inner) = t
            .strip_prefix("(not")
            .and_then(|r| r.trim_end().strip_suffix(')'))
        {
            return self.find_fluent(inner).map(Lit::neg);
        }
        self.find_fluent(t).map(Lit::pos)
    }

    /// Looks up a ground action written as `name(a,b)`.
    pub fn find_action(&self, text: &str) -> Option<ActionId> {
        let call = parse_call(text)?;
        self.actions
            .iter()
            .position(|a| a.name == call.predicate && a.args == call.args)
            .map(|i| ActionId(i as u32))
    }

    /// The `mon_f` pseudo-fluent monitoring `f`, if the domain has one.
    pub fn monitor_of(&self, f: FluentId) -> Option<FluentId> {
        self.monitors.iter().find(|(m, _)| *m == f).map(|(_, mon)| *mon)
    }

    pub fn monitors(&self) -> &[(FluentId, FluentId)] {
        &self.monitors
    }

    /// A fluent no action changes or senses.
    pub fn is_static(&self, f: FluentId) -> bool {
        !self
            .actions
            .iter()
            .any(|a| a.observes.contains(&f) || a.eps.iter().any(|ep| ep.effect.fluent == f))
    }

    /// Drops ground actions whose executability mentions a static literal
    /// that is not initially known; they can never become executable.
    pub fn prune_static(&self) -> GroundDomain {
        let init: BTreeSet<Lit> = self.init.iter().copied().collect();
        let keep = |a: &GroundAction| {
            a.executable
                .iter()
                .all(|l| !self.is_static(l.fluent) || init.contains(l))
        };
        GroundDomain {
            actions: self.actions.iter().filter(|a| keep(a)).cloned().collect(),
            ..self.clone()
        }
    }
}

/// `name(a,b)` or `(name a b)` or `name`.
fn parse_call(text: &str) -> Option<GroundFluent> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let mut parts = inner.split_whitespace();
        let predicate = parts.next()?.to_string();
        return Some(GroundFluent {
            predicate,
            args: parts.map(String::from).collect(),
        });
    }
    match t.find('(') {
        Some(open) => {
            let predicate = t[..open].trim().to_string();
            let args = t[open + 1..].strip_suffix(')')?;
            let args = if args.trim().is_empty() {
                Vec::new()
            } else {
                args.split(',').map(|a| a.trim().to_string()).collect()
            };
            Some(GroundFluent { predicate, args })
        }
        None if !t.is_empty() => Some(GroundFluent {
            predicate: t.to_string(),
            args: Vec::new(),
        }),
        None => None,
    }
}

type Binding<'a> = BTreeMap<&'a str, &'a str>;

struct Grounder<'a> {
    object_types: BTreeMap<&'a str, &'a str>,
    seen: BTreeSet<GroundFluent>,
}

impl<'a> Grounder<'a> {
    fn fluent(&mut self, atom: &Atom, binding: &Binding<'_>) -> Result<GroundFluent, GroundError> {
        let mut args = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match t {
                Term::Var(v) => args.push(
                    binding
                        .get(v.as_str())
                        .ok_or_else(|| GroundError::UnboundVariable(v.clone()))?
                        .to_string(),
                ),
                Term::Const(c) => {
                    if !self.object_types.contains_key(c.as_str()) {
                        return Err(GroundError::UnknownObject(c.clone()));
                    }
                    args.push(c.clone())
                }
            }
        }
        let f = GroundFluent {
            predicate: atom.predicate.clone(),
            args,
        };
        self.seen.insert(f.clone());
        Ok(f)
    }

    fn lit(
        &mut self,
        l: &LitTemplate,
        binding: &Binding<'_>,
    ) -> Result<(GroundFluent, bool), GroundError> {
        Ok((self.fluent(&l.atom, binding)?, l.positive))
    }
}

/// A ground literal before fluent ids are assigned.
type PendingLit = (GroundFluent, bool);

struct PendingAction {
    name: String,
    args: Vec<String>,
    eps: Vec<(Vec<PendingLit>, PendingLit)>,
    observes: Vec<GroundFluent>,
    executable: Vec<(GroundFluent, bool)>,
    exogenous: bool,
}

/// Instantiates every schema over all type-consistent object tuples (plain
/// Cartesian product; see [`GroundDomain::prune_static`] for pruning).
pub fn ground(src: &Source) -> Result<GroundDomain, GroundError> {
    let problem = &src.problem;
    let mut by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut object_types = BTreeMap::new();
    for (o, t) in &problem.objects {
        by_type.entry(t.as_str()).or_default().push(o.as_str());
        object_types.insert(o.as_str(), t.as_str());
    }
    let mut g = Grounder {
        object_types,
        seen: BTreeSet::new(),
    };

    let mut pending = Vec::new();
    let mut seen_actions = BTreeSet::new();
    for schema in &src.domain.actions {
        let mut domains: Vec<&[&str]> = Vec::new();
        for p in &schema.params {
            let objs = by_type.get(p.ty.as_str()).map(Vec::as_slice).unwrap_or(&[]);
            if objs.is_empty() {
                return Err(GroundError::EmptyType {
                    ty: p.ty.clone(),
                    action: schema.name.clone(),
                });
            }
            domains.push(objs);
        }
        let mut counters = vec![0usize; domains.len()];
        loop {
            let binding: Binding<'_> = schema
                .params
                .iter()
                .zip(&counters)
                .enumerate()
                .map(|(i, (p, &c))| (p.name.as_str(), domains[i][c]))
                .collect();
            let args: Vec<String> = counters
                .iter()
                .enumerate()
                .map(|(i, &c)| domains[i][c].to_string())
                .collect();
            if seen_actions.insert((schema.name.clone(), args.clone())) {
                let mut eps = Vec::new();
                for ep in &schema.effects {
                    let conds = ep
                        .conditions
                        .iter()
                        .map(|c| g.lit(c, &binding))
                        .collect::<Result<Vec<_>, _>>()?;
                    eps.push((conds, g.lit(&ep.effect, &binding)?));
                }
                let observes = schema
                    .observes
                    .iter()
                    .map(|a| g.fluent(a, &binding))
                    .collect::<Result<Vec<_>, _>>()?;
                let executable = schema
                    .executable
                    .iter()
                    .map(|l| g.lit(l, &binding))
                    .collect::<Result<Vec<_>, _>>()?;
                pending.push(PendingAction {
                    name: schema.name.clone(),
                    args,
                    eps,
                    observes,
                    executable,
                    exogenous: schema.exogenous,
                });
            }
            // odometer increment, last parameter fastest
            let mut done = true;
            for i in (0..counters.len()).rev() {
                counters[i] += 1;
                if counters[i] < domains[i].len() {
                    done = false;
                    break;
                }
                counters[i] = 0;
            }
            if done {
                break;
            }
        }
    }

    let empty = Binding::new();
    let mut problem_lits = |ls: &[LitTemplate]| -> Result<Vec<(GroundFluent, bool)>, GroundError> {
        ls.iter().map(|l| g.lit(l, &empty)).collect()
    };
    let init = problem_lits(&problem.init)?;
    let oneof = problem
        .oneof
        .iter()
        .map(|grp| problem_lits(grp))
        .collect::<Result<Vec<_>, _>>()?;
    let weak = problem_lits(&problem.weak_goals)?;
    let maint = problem_lits(&problem.maintenance_goals)?;
    // check constant argument types against predicate declarations
    for f in &g.seen {
        if let Some(decl) = src.domain.predicate(&f.predicate) {
            for (arg, slot) in f.args.iter().zip(&decl.params) {
                if g.object_types.get(arg.as_str()) != Some(&slot.ty.as_str()) {
                    return Err(GroundError::ObjectType {
                        object: arg.clone(),
                        expected: slot.ty.clone(),
                    });
                }
            }
        }
    }

    let fluents: Vec<GroundFluent> = g.seen.into_iter().collect();
    let fluent_index: BTreeMap<GroundFluent, FluentId> = fluents
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), FluentId(i as u32)))
        .collect();
    let id = |f: &GroundFluent| fluent_index[f];
    let lit = |(f, p): &(GroundFluent, bool)| Lit::new(id(f), *p);
    let actions = pending
        .into_iter()
        .map(|a| GroundAction {
            name: a.name,
            args: a.args,
            eps: a
                .eps
                .iter()
                .map(|(c, e)| GroundEp {
                    conditions: c.iter().map(lit).collect(),
                    effect: lit(e),
                })
                .collect(),
            observes: a.observes.iter().map(id).collect(),
            executable: a.executable.iter().map(lit).collect(),
            exogenous: a.exogenous,
        })
        .collect();
    let monitors = fluents
        .iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let base = f.predicate.strip_prefix("mon_")?;
            let target = GroundFluent {
                predicate: base.to_string(),
                args: f.args.clone(),
            };
            fluent_index
                .get(&target)
                .map(|t| (*t, FluentId(i as u32)))
        })
        .collect();

    Ok(GroundDomain {
        init: init.iter().map(lit).collect(),
        oneof: oneof.iter().map(|g| g.iter().map(lit).collect()).collect(),
        weak_goals: weak.iter().map(lit).collect(),
        maintenance_goals: maint.iter().map(lit).collect(),
        fluents,
        fluent_index,
        actions,
        monitors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    const DOORS: &str = "(define (domain d) (:types Door Robot Room)
      (:predicates (open ?d - Door) (ab_doOpen ?d - Door) (mon_open ?d - Door)
                   (at ?r - Robot ?x - Room))
      (:action doOpen :parameters (?d - Door) :effect when ¬ab_doOpen (open ?d))
      (:action monOpen :parameters (?d - Door) :effect (mon_open ?d) :observe (open ?d))
      (:action drive :parameters (?robo - Robot ?door - Door ?from ?to - Room)
         :precondition (and (at ?robo ?from) (open ?door))
         :effect (and (at ?robo ?to) (not (at ?robo ?from))))
      (:action noop))";

    fn problem(objects: &str) -> String {
        format!("{DOORS} (define (problem p) (:domain d) (:objects {objects}) (:init (not (open d1))))")
    }

    #[test]
    fn cardinalities() {
        let src = parse(&problem(
            "d1 d2 d3 d4 d5 - Door chair - Robot bed c1 c2 off liv bath - Room",
        ))
        .unwrap();
        let g = ground(&src).unwrap();
        let count = |n: &str| g.actions().iter().filter(|a| a.name == n).count();
        assert_eq!(count("doOpen"), 5);
        assert_eq!(count("drive"), 180);
        assert_eq!(count("noop"), 1);
        let names: BTreeSet<String> = g.actions().iter().map(|a| a.to_string()).collect();
        assert_eq!(names.len(), g.actions().len());
        assert_eq!(g.action_name(ActionId(0)), "doOpen(d1)");
        assert_eq!(
            g.monitor_of(g.find_fluent("open(d2)").unwrap()),
            g.find_fluent("mon_open(d2)")
        );
    }

    #[test]
    fn three_doors() {
        let src = parse(&problem("d1 d2 d3 - Door chair - Robot r - Room")).unwrap();
        let g = ground(&src).unwrap();
        let opens: Vec<_> = g.actions().iter().filter(|a| a.name == "doOpen").collect();
        assert_eq!(opens.len(), 3);
        let ab = g.find_fluent("ab_doOpen(d3)").unwrap();
        assert_eq!(opens[2].eps[0].conditions, vec![Lit::neg(ab)]);
        assert_eq!(g.parse_lit("-open(d1)"), Some(Lit::neg(g.find_fluent("(open d1)").unwrap())));
        assert_eq!(g.find_action("doOpen(d2)"), Some(ActionId(1)));
    }

    #[test]
    fn empty_type_is_an_error() {
        let src = parse(&problem("d1 - Door chair - Robot")).unwrap();
        assert!(matches!(ground(&src), Err(GroundError::EmptyType { .. })));
    }
}
