use super::*;
use crate::lang::{ground, parse};

const SRC: &str = "
(define (domain doors) (:types Door)
  (:predicates (open ?d - Door) (ab_doOpen ?d - Door) (mon_open ?d - Door))
  (:action doOpen :parameters (?d - Door) :effect when ¬ab_doOpen (open ?d))
  (:action senseOpen :parameters (?d - Door) :observe (open ?d))
  (:action monOpen :parameters (?d - Door) :effect (mon_open ?d) :observe (open ?d))
  (:action exoClosed :parameters (?d - Door) :exogenous :effect (not (open ?d))))
(define (problem p) (:domain doors) (:objects d1 d2 d3 - Door)
  (:init (not (open d1)) (not (open d2)) (open d3)))";

fn world(script: Vec<ScriptedEvent>) -> (Arc<GroundDomain>, SimWorld) {
    let d = Arc::new(ground(&parse(SRC).unwrap()).unwrap());
    let w = SimWorld::new(d.clone(), SimConfig::new(&d, script)).unwrap();
    (d, w)
}

fn act(d: &GroundDomain, s: &str) -> ActionId {
    d.find_action(s).unwrap()
}

#[test]
fn abnormal_door_stays_closed() {
    let (d, mut w) = world(Vec::new());
    let ab = d.find_fluent("ab_doOpen(d1)").unwrap();
    let (_, mut w2) = world(vec![ScriptedEvent {
        step: 0,
        kind: EventKind::Abnormality {
            fluent: ab,
            value: true,
        },
    }]);
    w2.execute(act(&d, "doOpen(d1)")).unwrap();
    let sensed = w2.execute(act(&d, "senseOpen(d1)")).unwrap();
    assert_eq!(sensed, [(d.parse_lit("-open(d1)").unwrap(), 1)]);

    w.execute(act(&d, "doOpen(d2)")).unwrap();
    assert!(w.state().holds(d.parse_lit("open(d2)").unwrap()));
    let sensed = w.execute(act(&d, "senseOpen(d3)")).unwrap();
    assert_eq!(sensed, [(d.parse_lit("open(d3)").unwrap(), 1)]);
}

#[test]
fn monitored_exogenous_change_is_reported_next_step() {
    let (d, mut w) = world(Vec::new());
    let close = act(&d, "exoClosed(d3)");
    let (_, mut scripted) = world(vec![ScriptedEvent {
        step: 1,
        kind: EventKind::Exogenous(close),
    }]);
    assert!(scripted.observe_monitored().is_empty());
    let sensed = scripted.execute(act(&d, "monOpen(d3)")).unwrap();
    assert_eq!(sensed, [(d.parse_lit("open(d3)").unwrap(), 0)]);
    assert_eq!(
        scripted.observe_monitored(),
        [(d.parse_lit("open(d3)").unwrap(), 1)]
    );
    scripted.execute(act(&d, "doOpen(d2)")).unwrap();
    assert_eq!(
        scripted.observe_monitored(),
        [(d.parse_lit("-open(d3)").unwrap(), 2)]
    );

    // unmonitored change: state flips, nothing reported
    w.inject(ScriptedEvent {
        step: 0,
        kind: EventKind::Exogenous(close),
    })
    .unwrap();
    assert!(w.state().holds(d.parse_lit("-open(d3)").unwrap()));
    assert!(w.observe_monitored().is_empty());
}

#[test]
fn dump_is_sorted_and_total() {
    let (d, w) = world(Vec::new());
    let dump = w.state().dump(&d);
    let lines: Vec<&str> = dump.lines().collect();
    assert_eq!(lines.len(), d.num_fluents());
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    assert!(lines.contains(&"open(d3)=true"));
}
