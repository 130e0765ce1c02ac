use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// `?x`, stored without the question mark.
    Var(String),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LitTemplate {
    pub atom: Atom,
    pub positive: bool,
}

impl LitTemplate {
    pub fn complement(&self) -> Self {
        LitTemplate {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedVar {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedVar>,
}

/// One conditional effect of an action. `index` is the position within the
/// action, contiguous from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectProposition {
    pub index: usize,
    pub conditions: Vec<LitTemplate>,
    pub effect: LitTemplate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub effects: Vec<EffectProposition>,
    /// Knowledge propositions: fluents whose value the action senses.
    pub observes: Vec<Atom>,
    pub executable: Vec<LitTemplate>,
    pub exogenous: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DomainDef {
    pub name: String,
    pub types: Vec<String>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainDef {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: String,
    /// Objects with their type, in declaration order.
    pub objects: Vec<(String, String)>,
    pub init: Vec<LitTemplate>,
    pub oneof: Vec<Vec<LitTemplate>>,
    pub weak_goals: Vec<LitTemplate>,
    pub maintenance_goals: Vec<LitTemplate>,
}

/// A parsed source file: one domain and (optionally) one problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Source {
    pub domain: DomainDef,
    pub problem: ProblemSpec,
}
