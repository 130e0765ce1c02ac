use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{EpistemicTree, NodeId};

impl EpistemicTree {
    /// Every fact of the tree as one line, sorted lexicographically.
    pub fn trace_lines(&self) -> Vec<String> {
        let d = self.domain();
        let mut out = Vec::new();
        for (node, acts) in self.occurrences() {
            for a in acts {
                out.push(format!("occ({},{},{})", d.action_name(*a), node.step, node.branch));
            }
        }
        for b in 0..self.branch_count() {
            for (t1, layer) in self.layers(b) {
                for (t, known) in layer.iter().enumerate() {
                    for l in known.iter() {
                        out.push(format!("knows({},{t},{t1},{b})", d.lit_name(l)));
                    }
                }
            }
            for t in 0..=self.horizon() {
                let node = NodeId::new(t, b);
                for l in self.sensing_results(node) {
                    out.push(format!("sRes({},{t},{b})", d.lit_name(l)));
                }
                if self.is_valid(node) {
                    out.push(format!("uBr({t},{b})"));
                }
            }
        }
        for f in self.forks() {
            out.push(format!("nextBr({},{},{})", f.step, f.parent, f.child));
        }
        for n in self.invalidations() {
            out.push(format!("brInvalid({},{})", n.step, n.branch));
        }
        out.sort();
        out
    }

    /// The trace as newline-terminated text.
    pub fn trace(&self) -> String {
        let mut s = String::new();
        for line in self.trace_lines() {
            s.push_str(&line);
            s.push('\n');
        }
        s
    }
}
