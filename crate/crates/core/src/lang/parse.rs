use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;
use super::sexpr::{read_all, Pos, Sexpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownKeyword(String),
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    UndeclaredType(String),
    UndeclaredPredicate(String),
    UnboundVariable(String),
    TypeMismatch {
        predicate: String,
        variable: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        ParseError { kind, pos }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownKeyword(k) => write!(f, "unknown keyword `{k}`"),
            ParseErrorKind::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "`{predicate}` expects {expected} argument(s), found {found}"
            ),
            ParseErrorKind::UndeclaredType(t) => write!(f, "undeclared type `{t}`"),
            ParseErrorKind::UndeclaredPredicate(p) => write!(f, "undeclared predicate `{p}`"),
            ParseErrorKind::UnboundVariable(v) => write!(f, "unbound variable `?{v}`"),
            ParseErrorKind::TypeMismatch {
                predicate,
                variable,
            } => write!(f, "variable `?{variable}` has the wrong type for `{predicate}`"),
        }
    }
}

impl core::error::Error for ParseError {}

type Result<T> = core::result::Result<T, ParseError>;

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax(msg.into()), pos)
}

/// Parses a source text holding one `(define (domain ..))` form and at most
/// one `(define (problem ..))` form.
pub fn parse(text: &str) -> Result<Source> {
    let forms = read_all(text)?;
    let mut domain_form = None;
    let mut problem_form = None;
    for form in &forms {
        let items = form
            .list()
            .filter(|_| form.head() == Some("define"))
            .ok_or_else(|| syntax(form.pos(), "expected a (define ...) form"))?;
        let header = items
            .get(1)
            .ok_or_else(|| syntax(form.pos(), "define without header"))?;
        match header.head() {
            Some("domain") if domain_form.is_none() => domain_form = Some(form),
            Some("problem") if problem_form.is_none() => problem_form = Some(form),
            Some("domain") | Some("problem") => {
                return Err(syntax(header.pos(), "duplicate define form"))
            }
            Some(other) => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownKeyword(other.to_string()),
                    header.pos(),
                ))
            }
            None => return Err(syntax(header.pos(), "malformed define header")),
        }
    }
    let domain_form = domain_form.ok_or_else(|| syntax(Pos::default(), "no domain definition"))?;
    let domain = parse_domain(domain_form)?;
    let problem = match problem_form {
        Some(p) => parse_problem(p, &domain)?,
        None => ProblemSpec::default(),
    };
    Ok(Source { domain, problem })
}

fn header_name(form: &Sexpr) -> Result<String> {
    let header = &form.list().unwrap()[1];
    header
        .list()
        .and_then(|h| h.get(1))
        .and_then(Sexpr::symbol)
        .map(String::from)
        .ok_or_else(|| syntax(header.pos(), "missing name in define header"))
}

fn parse_domain(form: &Sexpr) -> Result<DomainDef> {
    let mut domain = DomainDef {
        name: header_name(form)?,
        ..DomainDef::default()
    };
    let sections = &form.list().unwrap()[2..];
    // declarations first so that actions may precede them in the file
    for section in sections {
        let items = section
            .list()
            .ok_or_else(|| syntax(section.pos(), "expected a section"))?;
        match section.head() {
            Some(":types") => {
                for t in &items[1..] {
                    let name = t
                        .symbol()
                        .ok_or_else(|| syntax(t.pos(), "type names must be symbols"))?;
                    if name == "-" {
                        return Err(syntax(t.pos(), "type hierarchies are not supported"));
                    }
                    if !domain.types.iter().any(|x| x == name) {
                        domain.types.push(name.into());
                    }
                }
            }
            Some(":predicates") => {
                for p in &items[1..] {
                    let decl = p
                        .list()
                        .filter(|l| !l.is_empty())
                        .ok_or_else(|| syntax(p.pos(), "expected (predicate ?x - Type ...)"))?;
                    let name = decl[0]
                        .symbol()
                        .ok_or_else(|| syntax(p.pos(), "predicate name must be a symbol"))?;
                    let params = typed_vars(&decl[1..], p.pos(), &domain.types)?;
                    domain.predicates.push(PredicateDecl {
                        name: name.into(),
                        params,
                    });
                }
            }
            Some(":requirements") | Some(":action") => {}
            Some(other) => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownKeyword(other.into()),
                    section.pos(),
                ))
            }
            None => return Err(syntax(section.pos(), "expected a keyword section")),
        }
    }
    for section in sections {
        if section.head() == Some(":action") {
            let action = parse_action(section, &domain)?;
            domain.actions.push(action);
        }
    }
    Ok(domain)
}

fn typed_vars(items: &[Sexpr], pos: Pos, types: &[String]) -> Result<Vec<TypedVar>> {
    let mut out = Vec::new();
    for (name, ty, p) in typed_names(items, pos)? {
        let name = name
            .strip_prefix('?')
            .ok_or_else(|| syntax(p, format!("expected a variable, found `{name}`")))?;
        check_type(&ty, types, p)?;
        out.push(TypedVar {
            name: name.into(),
            ty,
        });
    }
    Ok(out)
}

fn check_type(ty: &str, types: &[String], pos: Pos) -> Result<()> {
    if types.iter().any(|t| t == ty) {
        Ok(())
    } else {
        Err(ParseError::new(ParseErrorKind::UndeclaredType(ty.into()), pos))
    }
}

/// `a b - T c - U` into `[(a,T),(b,T),(c,U)]`.
fn typed_names(items: &[Sexpr], pos: Pos) -> Result<Vec<(String, String, Pos)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = items[i]
            .symbol()
            .ok_or_else(|| syntax(items[i].pos(), "expected a name"))?;
        if s == "-" {
            let ty = items
                .get(i + 1)
                .and_then(Sexpr::symbol)
                .ok_or_else(|| syntax(items[i].pos(), "expected a type after '-'"))?;
            if pending.is_empty() {
                return Err(syntax(items[i].pos(), "type without names"));
            }
            for (n, p) in pending.drain(..) {
                out.push((n, ty.into(), p));
            }
            i += 2;
        } else {
            pending.push((s.into(), items[i].pos()));
            i += 1;
        }
    }
    if let Some((n, p)) = pending.first() {
        let _ = pos;
        return Err(syntax(*p, format!("missing type for `{n}`")));
    }
    Ok(out)
}

/// Parsing context for literals: the domain plus the enclosing action's
/// parameters, if any.
struct LitCtx<'a> {
    domain: &'a DomainDef,
    params: Option<&'a [TypedVar]>,
}

impl LitCtx<'_> {
    fn literal(&self, e: &Sexpr) -> Result<LitTemplate> {
        if e.head() == Some("not") {
            let items = e.list().unwrap();
            if items.len() != 2 {
                return Err(syntax(e.pos(), "(not ...) takes exactly one literal"));
            }
            return Ok(self.literal(&items[1])?.complement());
        }
        Ok(LitTemplate {
            atom: self.atom(e)?,
            positive: true,
        })
    }

    fn atom(&self, e: &Sexpr) -> Result<Atom> {
        let (name, arg_exprs): (&str, &[Sexpr]) = match e {
            Sexpr::Symbol(s, _) => (s, &[]),
            Sexpr::List(items, _) => {
                let name = items
                    .first()
                    .and_then(Sexpr::symbol)
                    .ok_or_else(|| syntax(e.pos(), "expected an atom"))?;
                (name, &items[1..])
            }
        };
        if matches!(name, "and" | "when" | "oneof" | "not") {
            return Err(syntax(e.pos(), format!("`{name}` is not allowed here")));
        }
        let decl = self.domain.predicate(name).ok_or_else(|| {
            ParseError::new(ParseErrorKind::UndeclaredPredicate(name.into()), e.pos())
        })?;
        // A bare predicate symbol inside an action with matching parameter
        // types is shorthand for the predicate applied to those parameters.
        if e.symbol().is_some() && !decl.params.is_empty() {
            if let Some(params) = self.params {
                let same = params.len() == decl.params.len()
                    && params.iter().zip(&decl.params).all(|(a, b)| a.ty == b.ty);
                if same {
                    return Ok(Atom {
                        predicate: name.into(),
                        args: params.iter().map(|p| Term::Var(p.name.clone())).collect(),
                    });
                }
            }
        }
        if arg_exprs.len() != decl.params.len() {
            return Err(ParseError::new(
                ParseErrorKind::ArityMismatch {
                    predicate: name.into(),
                    expected: decl.params.len(),
                    found: arg_exprs.len(),
                },
                e.pos(),
            ));
        }
        let mut args = Vec::with_capacity(arg_exprs.len());
        for (a, slot) in arg_exprs.iter().zip(&decl.params) {
            let s = a
                .symbol()
                .ok_or_else(|| syntax(a.pos(), "arguments must be symbols"))?;
            if let Some(var) = s.strip_prefix('?') {
                let param = self
                    .params
                    .and_then(|ps| ps.iter().find(|p| p.name == var))
                    .ok_or_else(|| {
                        ParseError::new(ParseErrorKind::UnboundVariable(var.into()), a.pos())
                    })?;
                if param.ty != slot.ty {
                    return Err(ParseError::new(
                        ParseErrorKind::TypeMismatch {
                            predicate: name.into(),
                            variable: var.into(),
                        },
                        a.pos(),
                    ));
                }
                args.push(Term::Var(var.into()));
            } else {
                args.push(Term::Const(s.into()));
            }
        }
        Ok(Atom {
            predicate: name.into(),
            args,
        })
    }

    /// A single literal or an `(and ...)` of literals.
    fn conjunction(&self, e: &Sexpr, out: &mut Vec<LitTemplate>) -> Result<()> {
        if e.head() == Some("and") {
            for item in &e.list().unwrap()[1..] {
                self.conjunction(item, out)?;
            }
            Ok(())
        } else {
            out.push(self.literal(e)?);
            Ok(())
        }
    }

    fn effects(&self, items: &[Sexpr], out: &mut Vec<EffectProposition>) -> Result<()> {
        let mut i = 0;
        while i < items.len() {
            let e = &items[i];
            if e.symbol() == Some("when") {
                let (cond, lit) = match (items.get(i + 1), items.get(i + 2)) {
                    (Some(c), Some(l)) => (c, l),
                    _ => return Err(syntax(e.pos(), "`when` needs a condition and an effect")),
                };
                self.push_ep(cond, lit, out)?;
                i += 3;
                continue;
            }
            match e.head() {
                Some("when") => {
                    let l = e.list().unwrap();
                    if l.len() != 3 {
                        return Err(syntax(e.pos(), "(when condition effect)"));
                    }
                    self.push_ep(&l[1], &l[2], out)?;
                }
                Some("and") => self.effects(&e.list().unwrap()[1..], out)?,
                _ => {
                    let effect = self.literal(e)?;
                    out.push(EffectProposition {
                        index: out.len(),
                        conditions: Vec::new(),
                        effect,
                    });
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn push_ep(&self, cond: &Sexpr, lit: &Sexpr, out: &mut Vec<EffectProposition>) -> Result<()> {
        let mut conditions = Vec::new();
        self.conjunction(cond, &mut conditions)?;
        let effect = self.literal(lit)?;
        out.push(EffectProposition {
            index: out.len(),
            conditions,
            effect,
        });
        Ok(())
    }
}

fn parse_action(section: &Sexpr, domain: &DomainDef) -> Result<ActionSchema> {
    let items = section.list().unwrap();
    let name = items
        .get(1)
        .and_then(Sexpr::symbol)
        .ok_or_else(|| syntax(section.pos(), "action needs a name"))?;
    // split the body into keyword groups
    let mut groups: Vec<(&str, Pos, &[Sexpr])> = Vec::new();
    let mut i = 2;
    while i < items.len() {
        let kw = items[i]
            .symbol()
            .filter(|s| s.starts_with(':'))
            .ok_or_else(|| syntax(items[i].pos(), "expected an action keyword"))?;
        let start = i + 1;
        let mut end = start;
        while end < items.len() && !items[end].symbol().is_some_and(|s| s.starts_with(':')) {
            end += 1;
        }
        groups.push((kw, items[i].pos(), &items[start..end]));
        i = end;
    }

    let mut params = Vec::new();
    for (kw, pos, body) in &groups {
        if *kw == ":parameters" {
            let list = match body {
                [one] => one
                    .list()
                    .ok_or_else(|| syntax(*pos, ":parameters expects a list"))?,
                _ => return Err(syntax(*pos, ":parameters expects one list")),
            };
            params = typed_vars(list, *pos, &domain.types)?;
        }
    }
    let ctx = LitCtx {
        domain,
        params: Some(&params),
    };
    let mut action = ActionSchema {
        name: name.into(),
        params: params.clone(),
        effects: Vec::new(),
        observes: Vec::new(),
        executable: Vec::new(),
        exogenous: false,
    };
    for (kw, pos, body) in groups {
        match kw {
            ":parameters" => {}
            ":effect" => ctx.effects(body, &mut action.effects)?,
            ":observe" => {
                for e in body {
                    let mut lits = Vec::new();
                    ctx.conjunction(e, &mut lits)?;
                    for l in lits {
                        if !l.positive {
                            return Err(syntax(e.pos(), ":observe takes fluents, not literals"));
                        }
                        action.observes.push(l.atom);
                    }
                }
            }
            ":executable" | ":precondition" => {
                for e in body {
                    ctx.conjunction(e, &mut action.executable)?;
                }
            }
            ":exogenous" => {
                if !body.is_empty() {
                    return Err(syntax(pos, ":exogenous is a flag and takes no value"));
                }
                action.exogenous = true;
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownKeyword(other.into()),
                    pos,
                ))
            }
        }
    }
    Ok(action)
}

fn parse_problem(form: &Sexpr, domain: &DomainDef) -> Result<ProblemSpec> {
    let mut problem = ProblemSpec {
        name: header_name(form)?,
        ..ProblemSpec::default()
    };
    let ctx = LitCtx {
        domain,
        params: None,
    };
    for section in &form.list().unwrap()[2..] {
        let items = section
            .list()
            .ok_or_else(|| syntax(section.pos(), "expected a section"))?;
        match section.head() {
            Some(":domain") => {
                problem.domain = items
                    .get(1)
                    .and_then(Sexpr::symbol)
                    .ok_or_else(|| syntax(section.pos(), "(:domain name)"))?
                    .into();
            }
            Some(":objects") => {
                for (name, ty, pos) in typed_names(&items[1..], section.pos())? {
                    check_type(&ty, &domain.types, pos)?;
                    problem.objects.push((name, ty));
                }
            }
            Some(":init") => {
                for e in &items[1..] {
                    if e.head() == Some("oneof") {
                        let members = &e.list().unwrap()[1..];
                        let mut group = Vec::new();
                        for m in members {
                            let lit = ctx.literal(m)?;
                            if group.contains(&lit) {
                                return Err(syntax(m.pos(), "duplicate literal in oneof"));
                            }
                            group.push(lit);
                        }
                        if group.len() < 2 {
                            return Err(syntax(e.pos(), "oneof needs at least two literals"));
                        }
                        problem.oneof.push(group);
                    } else {
                        ctx.conjunction(e, &mut problem.init)?;
                    }
                }
            }
            Some(":goal") => {
                let kind = items.get(1).and_then(Sexpr::symbol);
                let body = items
                    .get(2)
                    .filter(|_| items.len() == 3)
                    .ok_or_else(|| syntax(section.pos(), "(:goal weak|maintenance literal)"))?;
                let target = match kind {
                    Some("weak") => &mut problem.weak_goals,
                    Some("maintenance") => &mut problem.maintenance_goals,
                    Some(other) => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnknownKeyword(other.into()),
                            items[1].pos(),
                        ))
                    }
                    None => return Err(syntax(section.pos(), "goal kind missing")),
                };
                ctx.conjunction(body, target)?;
            }
            Some(other) => {
                let kw = if other == "oneof" {
                    "oneof (only allowed inside :init)"
                } else {
                    other
                };
                return Err(ParseError::new(
                    ParseErrorKind::UnknownKeyword(kw.into()),
                    section.pos(),
                ));
            }
            None => return Err(syntax(section.pos(), "expected a keyword section")),
        }
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const HEADER: &str = "(define (domain doors) (:types Door)
        (:predicates (open ?d - Door) (ab_doOpen ?d - Door))";

    fn with_actions(actions: &str) -> String {
        format!("{HEADER} {actions})")
    }

    #[test]
    fn do_open_listing() {
        let src = parse(&with_actions(
            "(:action doOpen :parameters (?d - Door) :effect when ¬ab_doOpen (open ?d))",
        ))
        .unwrap();
        let a = &src.domain.actions[0];
        assert_eq!(a.effects.len(), 1);
        let ep = &a.effects[0];
        assert_eq!(ep.index, 0);
        let d = Term::Var("d".into());
        assert_eq!(
            ep.conditions,
            vec![LitTemplate {
                atom: Atom {
                    predicate: "ab_doOpen".into(),
                    args: vec![d.clone()]
                },
                positive: false
            }]
        );
        assert_eq!(
            ep.effect,
            LitTemplate {
                atom: Atom {
                    predicate: "open".into(),
                    args: vec![d]
                },
                positive: true
            }
        );
    }

    #[test]
    fn sense_open_listing() {
        let src = parse(&with_actions(
            "(:action senseOpen :parameters (?d - Door) :observe (open ?d))",
        ))
        .unwrap();
        let a = &src.domain.actions[0];
        assert!(a.effects.is_empty());
        assert_eq!(a.observes.len(), 1);
        assert_eq!(a.observes[0].predicate, "open");
    }

    #[test]
    fn empty_effect_block() {
        let src = parse(&with_actions("(:action wait :effect)")).unwrap();
        assert!(src.domain.actions[0].effects.is_empty());
        assert!(src.domain.actions[0].params.is_empty());
    }

    #[test]
    fn precondition_is_executable() {
        let a = parse(&with_actions(
            "(:action a :parameters (?d - Door) :precondition (and (open ?d) (not (ab_doOpen ?d))))",
        ))
        .unwrap();
        let b = parse(&with_actions(
            "(:action a :parameters (?d - Door) :executable (and (open ?d) (not (ab_doOpen ?d))))",
        ))
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.domain.actions[0].executable.len(), 2);
    }

    #[test]
    fn exogenous_flag_and_parenthesized_when() {
        let src = parse(&with_actions(
            "(:action exoClosed :parameters (?d - Door) :exogenous :effect (and (when (and) (not (open ?d)))))",
        ))
        .unwrap();
        let a = &src.domain.actions[0];
        assert!(a.exogenous);
        assert!(a.effects[0].conditions.is_empty());
        assert!(!a.effects[0].effect.positive);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse(&with_actions("(:action a :parameters (?d - Door) :effect (open ?d ?d))"))
            .unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 1, found: 2, .. }));
        assert_eq!(e.pos.line, 2);

        let e = parse(&with_actions("(:action a :parameters (?r - Robot))")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredType("Robot".into()));

        let e = parse(&with_actions("(:action a :cost 3)")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownKeyword(":cost".into()));

        let e = parse(&with_actions("(:action a :effect (open ?x))")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnboundVariable("x".into()));

        assert!(matches!(
            parse("(define (domain x) (:types A)").unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
    }

    #[test]
    fn problem_sections() {
        let text = format!(
            "{} (define (problem p) (:domain doors) (:objects d1 d2 - Door)
               (:init (not (open d1)) (oneof (open d2) (ab_doOpen d2)))
               (:goal weak (open d1))
               (:goal maintenance (not (ab_doOpen d1))))",
            with_actions("")
        );
        let src = parse(&text).unwrap();
        let p = &src.problem;
        assert_eq!(p.objects.len(), 2);
        assert_eq!(p.init.len(), 1);
        assert_eq!(p.oneof[0].len(), 2);
        assert_eq!(p.weak_goals.len(), 1);
        assert_eq!(p.maintenance_goals.len(), 1);

        let bad = format!(
            "{} (define (problem p) (:objects d1 - Door) (:goal strong (open d1)))",
            with_actions("")
        );
        assert!(matches!(
            parse(&bad).unwrap_err().kind,
            ParseErrorKind::UnknownKeyword(_)
        ));
        let bad = format!(
            "{} (define (problem p) (:objects d1 - Door) (oneof (open d1) (not (open d1))))",
            with_actions("")
        );
        assert!(parse(&bad).is_err());
    }
}
