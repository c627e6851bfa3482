//! Control-flow graphs, post-dominator trees and control dependence for single bodies.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::lang::{Block, StmtId, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "stmt", rename_all = "kebab-case")]
pub enum CfgNode {
    Entry,
    Stmt(StmtId),
    /// Initializer of a `for` statement.
    ForInit(StmtId),
    /// Update of a `for` statement.
    ForStep(StmtId),
    Exit,
}

impl CfgNode {
    /// Statement a node belongs to; `None` for the synthetic entry and exit.
    pub fn stmt(self) -> Option<StmtId> {
        match self {
            CfgNode::Stmt(s) | CfgNode::ForInit(s) | CfgNode::ForStep(s) => Some(s),
            CfgNode::Entry | CfgNode::Exit => None,
        }
    }
}

/// How `return` is lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnEdges {
    /// `return` jumps to the exit node: the real control flow.
    ToExit,
    /// `return` falls through to its lexical successor. Used for control dependence,
    /// which then coincides with the syntactic nesting of statements.
    Structured,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cfg {
    /// Header number of the body this graph belongs to.
    pub entry_number: StmtId,
    pub nodes: Vec<CfgNode>,
    pub succ: Vec<Vec<usize>>,
}

pub const ENTRY: usize = 0;
pub const EXIT: usize = 1;

struct Builder {
    nodes: Vec<CfgNode>,
    succ: Vec<Vec<usize>>,
    returns: ReturnEdges,
}

impl Builder {
    fn node(&mut self, n: CfgNode) -> usize {
        self.nodes.push(n);
        self.succ.push(Vec::new());
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    /// Lowers `block` so that control continues at `cont`; returns the first node.
    fn seq(&mut self, block: &[crate::lang::Stmt], cont: usize) -> usize {
        // Allocate in source order so node ids are stable, then wire back to front.
        let firsts: Vec<usize> = block.iter().map(|s| self.alloc(s)).collect();
        let mut next = cont;
        for (s, &first) in block.iter().zip(&firsts).rev() {
            self.wire(s, first, next);
            next = first;
        }
        next
    }

    /// Allocates the header node(s) of `s`; returns its first node.
    fn alloc(&mut self, s: &crate::lang::Stmt) -> usize {
        match &s.kind {
            StmtKind::For { init, .. } => {
                let first = if init.is_some() { Some(self.node(CfgNode::ForInit(s.number))) } else { None };
                let cond = self.node(CfgNode::Stmt(s.number));
                first.unwrap_or(cond)
            }
            _ => self.node(CfgNode::Stmt(s.number)),
        }
    }

    fn find(&self, n: CfgNode) -> usize {
        self.nodes.iter().position(|&m| m == n).expect("node allocated before wiring")
    }

    fn wire(&mut self, s: &crate::lang::Stmt, first: usize, cont: usize) {
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                let t = self.seq(then_branch, cont);
                self.edge(first, t);
                match else_branch {
                    Some(e) => {
                        let e = self.seq(e, cont);
                        self.edge(first, e);
                    }
                    None => self.edge(first, cont),
                }
            }
            StmtKind::While { body, .. } => {
                let b = self.seq(body, first);
                self.edge(first, b);
                self.edge(first, cont);
            }
            StmtKind::For { init, step, body, .. } => {
                let cond = self.find(CfgNode::Stmt(s.number));
                if init.is_some() {
                    self.edge(first, cond);
                }
                let back = if step.is_some() {
                    let st = self.node(CfgNode::ForStep(s.number));
                    self.edge(st, cond);
                    st
                } else {
                    cond
                };
                let b = self.seq(body, back);
                self.edge(cond, b);
                self.edge(cond, cont);
            }
            StmtKind::Return(_) if self.returns == ReturnEdges::ToExit => self.edge(first, EXIT),
            _ => self.edge(first, cont),
        }
    }
}

/// Builds the CFG of one body. Node 0 is the entry, node 1 the exit.
pub fn build_cfg(entry_number: StmtId, body: &Block, returns: ReturnEdges) -> Cfg {
    let mut b = Builder { nodes: Vec::new(), succ: Vec::new(), returns };
    b.node(CfgNode::Entry);
    b.node(CfgNode::Exit);
    let first = b.seq(body, EXIT);
    b.edge(ENTRY, first);
    Cfg { entry_number, nodes: b.nodes, succ: b.succ }
}

impl Cfg {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn preds(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.nodes.len()];
        for (from, succ) in self.succ.iter().enumerate() {
            for &to in succ {
                preds[to].push(from);
            }
        }
        preds
    }

    /// Immediate post-dominator of every node (`None` for the exit), computed with
    /// the iterative dominator algorithm on the reversed graph.
    pub fn post_dominators(&self) -> Vec<Option<usize>> {
        let n = self.nodes.len();
        let preds = self.preds();
        // Reverse graph: successors are CFG predecessors. Postorder DFS from EXIT over it.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = vec![(EXIT, 0usize)];
        seen[EXIT] = true;
        while let Some((v, i)) = stack.pop() {
            if i < preds[v].len() {
                stack.push((v, i + 1));
                let w = preds[v][i];
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut idom: Vec<Option<usize>> = vec![None; n];
        idom[EXIT] = Some(EXIT);
        let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
            while a != b {
                while rank[a] < rank[b] {
                    a = idom[a].expect("processed node");
                }
                while rank[b] < rank[a] {
                    b = idom[b].expect("processed node");
                }
            }
            a
        };
        let mut changed = true;
        while changed {
            changed = false;
            for &v in order.iter().rev() {
                if v == EXIT {
                    continue;
                }
                // predecessors in the reversed graph are CFG successors
                let mut new = None;
                for &s in &self.succ[v] {
                    if idom[s].is_some() {
                        new = Some(match new {
                            None => s,
                            Some(cur) => intersect(&idom, s, cur),
                        });
                    }
                }
                if new.is_some() && idom[v] != new {
                    idom[v] = new;
                    changed = true;
                }
            }
        }
        idom[EXIT] = None;
        idom
    }

    /// Control-dependence parents of every node, including the synthetic entry,
    /// computed on the graph augmented with an entry→exit edge. Self-dependences
    /// (loop headers) are dropped.
    pub fn control_dependences(&self) -> Vec<BTreeSet<usize>> {
        let mut aug = self.clone();
        if !aug.succ[ENTRY].contains(&EXIT) {
            aug.succ[ENTRY].push(EXIT);
        }
        let ipdom = aug.post_dominators();
        let mut deps = vec![BTreeSet::new(); self.nodes.len()];
        for (a, succ) in aug.succ.iter().enumerate() {
            for &b in succ {
                let stop = ipdom[a];
                let mut runner = Some(b);
                while let Some(r) = runner {
                    if Some(r) == stop {
                        break;
                    }
                    if r != a {
                        deps[r].insert(a);
                    }
                    runner = ipdom[r];
                }
            }
        }
        deps
    }

    pub fn reaches_exit_from_all(&self) -> bool {
        let preds = self.preds();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![EXIT];
        seen[EXIT] = true;
        while let Some(v) = stack.pop() {
            for &p in &preds[v] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_source, PRIME_EXAMPLE};

    fn isprime_cfg(returns: ReturnEdges) -> Cfg {
        let unit = parse_source("p.maj", PRIME_EXAMPLE).unwrap();
        let m = unit.method("isprime").unwrap();
        build_cfg(m.number, &m.body, returns)
    }

    fn edges(cfg: &Cfg) -> BTreeSet<(CfgNode, CfgNode)> {
        let mut out = BTreeSet::new();
        for (a, succ) in cfg.succ.iter().enumerate() {
            for &b in succ {
                out.insert((cfg.nodes[a], cfg.nodes[b]));
            }
        }
        out
    }

    #[test]
    fn isprime_cfg_shape() {
        use CfgNode::*;
        let cfg = isprime_cfg(ReturnEdges::ToExit);
        let expected: BTreeSet<_> = [
            (Entry, ForInit(7)),
            (ForInit(7), Stmt(7)),
            (Stmt(7), Stmt(8)),
            (Stmt(7), Stmt(10)),
            (Stmt(8), Stmt(9)),
            (Stmt(8), ForStep(7)),
            (ForStep(7), Stmt(7)),
            (Stmt(9), Exit),
            (Stmt(10), Exit),
        ]
        .into_iter()
        .collect();
        assert_eq!(edges(&cfg), expected);
        assert!(cfg.reaches_exit_from_all());
    }

    #[test]
    fn empty_body_is_entry_to_exit() {
        let cfg = build_cfg(1, &Vec::new(), ReturnEdges::ToExit);
        assert_eq!(cfg.nodes, [CfgNode::Entry, CfgNode::Exit]);
        assert_eq!(cfg.succ[ENTRY], [EXIT]);
    }

    #[test]
    fn straight_line_is_a_path() {
        let unit =
            parse_source("s.maj", "class A { static int x; static void main() { x = 1; x = 2; x = 3; } }").unwrap();
        let m = unit.method("main").unwrap();
        let cfg = build_cfg(m.number, &m.body, ReturnEdges::ToExit);
        // three statements plus the exit, reached from the entry
        assert_eq!(cfg.len(), 5);
        let path: Vec<CfgNode> = {
            let mut v = vec![cfg.nodes[ENTRY]];
            let mut cur = ENTRY;
            while cur != EXIT {
                assert_eq!(cfg.succ[cur].len(), 1);
                cur = cfg.succ[cur][0];
                v.push(cfg.nodes[cur]);
            }
            v
        };
        use CfgNode::*;
        assert_eq!(path, [Entry, Stmt(2), Stmt(3), Stmt(4), Exit]);
    }

    #[test]
    fn post_dominators_of_isprime() {
        let cfg = isprime_cfg(ReturnEdges::ToExit);
        let ipdom = cfg.post_dominators();
        let at = |n: CfgNode| cfg.nodes.iter().position(|&m| m == n).unwrap();
        use CfgNode::*;
        assert_eq!(ipdom[at(Stmt(9))], Some(EXIT));
        assert_eq!(ipdom[at(Stmt(8))], Some(EXIT));
        assert_eq!(ipdom[at(ForStep(7))], Some(at(Stmt(7))));
        assert_eq!(ipdom[at(Stmt(7))], Some(EXIT));
        assert_eq!(ipdom[EXIT], None);
    }

    #[test]
    fn structured_control_dependence_is_syntactic() {
        let cfg = isprime_cfg(ReturnEdges::Structured);
        let deps = cfg.control_dependences();
        let at = |n: CfgNode| cfg.nodes.iter().position(|&m| m == n).unwrap();
        use CfgNode::*;
        let parents = |n| deps[at(n)].iter().map(|&i| cfg.nodes[i]).collect::<Vec<_>>();
        assert_eq!(parents(Stmt(7)), [Entry]);
        assert_eq!(parents(Stmt(8)), [Stmt(7)]);
        assert_eq!(parents(Stmt(9)), [Stmt(8)]);
        assert_eq!(parents(Stmt(10)), [Entry]);
        assert_eq!(parents(ForStep(7)), [Stmt(7)]);
    }
}
