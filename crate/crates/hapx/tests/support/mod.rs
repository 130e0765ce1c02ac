//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;
pub mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use hapx_core::lang::{ground, parse};
use hapx_core::GroundDomain;

pub fn domain_from(text: &str) -> Arc<GroundDomain> {
    let src = parse(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    Arc::new(ground(&src).unwrap_or_else(|e| panic!("{e}\n{text}")))
}

/// The tree facts, read back from the textual trace rather than through
/// the kernel's query methods.
#[derive(Debug, Default)]
pub struct Facts {
    /// `(literal, t, t1, branch)`
    pub knows: BTreeSet<(String, usize, usize, usize)>,
    /// `(action, t, branch)`
    pub occ: Vec<(String, usize, usize)>,
    /// `(literal, t, branch)`
    pub sres: BTreeSet<(String, usize, usize)>,
    pub valid: BTreeSet<(usize, usize)>,
    /// child -> (fork step, parent)
    pub forks: BTreeMap<usize, (usize, usize)>,
}

/// Splits `name(a,b(c),d)` into `name` and its top-level arguments.
pub fn split_fact(line: &str) -> (&str, Vec<&str>) {
    let open = line.find('(').expect("fact has arguments");
    let name = &line[..open];
    let inner = &line[open + 1..line.len() - 1];
    let mut args = Vec::new();
    let (mut depth, mut start) = (0, 0);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(&inner[start..]);
    (name, args)
}

impl Facts {
    pub fn from_lines(lines: &[String]) -> Self {
        let mut f = Facts::default();
        let n = |s: &str| s.parse::<usize>().expect("numeric argument");
        for line in lines {
            let (name, a) = split_fact(line);
            match name {
                "knows" => {
                    f.knows.insert((a[0].to_string(), n(a[1]), n(a[2]), n(a[3])));
                }
                "occ" => f.occ.push((a[0].to_string(), n(a[1]), n(a[2]))),
                "sRes" => {
                    f.sres.insert((a[0].to_string(), n(a[1]), n(a[2])));
                }
                "uBr" => {
                    f.valid.insert((n(a[0]), n(a[1])));
                }
                "nextBr" => {
                    f.forks.insert(n(a[2]), (n(a[0]), n(a[1])));
                }
                "brInvalid" => {}
                other => panic!("unexpected fact {other}"),
            }
        }
        f
    }

    /// The branch whose actions drive the transition out of step `s` on
    /// branch `b`: a child shares its ancestors' actions up to its fork.
    pub fn action_owner(&self, mut b: usize, s: usize) -> usize {
        while let Some(&(fork, parent)) = self.forks.get(&b) {
            if s > fork {
                break;
            }
            b = parent;
        }
        b
    }

    /// The branch that computed branch `b`'s knowledge at epistemic step
    /// `t1`: before its fork a child reuses its ancestors' knowledge.
    pub fn knowledge_owner(&self, mut b: usize, t1: usize) -> usize {
        while let Some(&(fork, parent)) = self.forks.get(&b) {
            if t1 >= fork {
                break;
            }
            b = parent;
        }
        b
    }

    pub fn actions_at(&self, b: usize, s: usize) -> Vec<&str> {
        let owner = self.action_owner(b, s);
        self.occ
            .iter()
            .filter(|(_, t, br)| *t == s && *br == owner)
            .map(|(a, _, _)| a.as_str())
            .collect()
    }
}
