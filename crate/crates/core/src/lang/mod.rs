//! The domain language: s-expression reader, schema AST, parser, printer,
//! validation and grounding.

mod ast;
mod ground;
mod parse;
mod print;
mod sexpr;
mod validate;

pub use ast::{
    ActionSchema, Atom, DomainDef, EffectProposition, LitTemplate, PredicateDecl, ProblemSpec,
    Source, Term, TypedVar,
};
pub use ground::{
    ground, ActionId, FluentId, GroundAction, GroundDomain, GroundEp, GroundError, GroundFluent,
    Lit,
};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use print::pretty_print;
pub use sexpr::Pos;
pub use validate::{validate, ValidateOptions, ValidationReport, Violation};
