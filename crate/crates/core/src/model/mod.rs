//! Static facts about a checked program: def/use sets, control-flow graphs,
//! control dependence and reaching definitions.

pub mod cfg;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::lang::{walk_stmts, BodyRef, Expr, PrintPart, Scope, SourceUnit, Stmt, StmtId, StmtKind, Var};
use cfg::{build_cfg, Cfg, CfgNode, ReturnEdges, ENTRY};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StmtDefUse {
    pub defs: BTreeSet<Var>,
    pub uses: BTreeSet<Var>,
}

/// Per-statement def/use sets and their inversions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefUseInfo {
    pub per_stmt: BTreeMap<StmtId, StmtDefUse>,
    pub def_set: BTreeMap<Var, BTreeSet<StmtId>>,
    pub use_set: BTreeMap<Var, BTreeSet<StmtId>>,
}

impl DefUseInfo {
    fn from_per_stmt(per_stmt: BTreeMap<StmtId, StmtDefUse>) -> Self {
        let mut def_set: BTreeMap<Var, BTreeSet<StmtId>> = BTreeMap::new();
        let mut use_set: BTreeMap<Var, BTreeSet<StmtId>> = BTreeMap::new();
        for (&s, du) in &per_stmt {
            for v in &du.defs {
                def_set.entry(v.clone()).or_default().insert(s);
            }
            for v in &du.uses {
                use_set.entry(v.clone()).or_default().insert(s);
            }
        }
        DefUseInfo { per_stmt, def_set, use_set }
    }

    /// Rebuilds per-statement sets from the inverted maps.
    pub fn invert(&self) -> BTreeMap<StmtId, StmtDefUse> {
        let mut out: BTreeMap<StmtId, StmtDefUse> = self.per_stmt.keys().map(|&s| (s, StmtDefUse::default())).collect();
        for (v, stmts) in &self.def_set {
            for s in stmts {
                out.entry(*s).or_default().defs.insert(v.clone());
            }
        }
        for (v, stmts) in &self.use_set {
            for s in stmts {
                out.entry(*s).or_default().uses.insert(v.clone());
            }
        }
        out
    }

    pub fn get(&self, stmt: StmtId) -> Option<&StmtDefUse> {
        self.per_stmt.get(&stmt)
    }

    /// Resolves a variable name used or defined at `stmt`; locals shadow statics.
    /// The flag is true when the statement uses the variable.
    pub fn criterion_var(&self, stmt: StmtId, name: &str) -> Option<(Var, bool)> {
        let du = self.per_stmt.get(&stmt)?;
        for var in [Var::local(name), Var::global(name)] {
            if du.uses.contains(&var) {
                return Some((var, true));
            }
            if du.defs.contains(&var) {
                return Some((var, false));
            }
        }
        None
    }
}

/// Static facts for one method, constructor or advice body.
#[derive(Debug, Clone)]
pub struct BodyModel {
    pub number: StmtId,
    pub owner: String,
    pub aspect_side: bool,
    /// The real control flow (`return` jumps to the exit).
    pub cfg: Cfg,
    /// Control-dependence parent of every statement in the body.
    pub control_parent: BTreeMap<StmtId, StmtId>,
    /// For each statement and each local it reads: the statements whose definition may reach it.
    /// The body header stands for definitions of formals.
    pub reaching: BTreeMap<StmtId, BTreeMap<Var, BTreeSet<StmtId>>>,
    /// Every `return` statement of the body.
    pub returns: Vec<StmtId>,
}

#[derive(Debug, Clone)]
pub struct ProgramModel {
    pub def_use: DefUseInfo,
    pub bodies: Vec<BodyModel>,
    /// Control-dependence parent of every numbered construct except method and aspect headers.
    pub control_parent: BTreeMap<StmtId, StmtId>,
    /// Header number of the body (or aspect) containing each numbered construct.
    pub owner: BTreeMap<StmtId, StmtId>,
    pub predicates: BTreeSet<StmtId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("statement {stmt}: expected exactly one control-dependence parent, found {found:?}")]
    ControlParents { stmt: StmtId, found: Vec<StmtId> },
    #[error("body {body}: a node cannot reach the exit")]
    NoExit { body: StmtId },
}

fn formal_vars(body: &BodyRef<'_>) -> BTreeSet<Var> {
    body.formals().into_iter().map(|p| Var::local(p.name.clone())).collect()
}

/// Def/use sets of a statement, including all parts of a `for` header.
pub fn stmt_def_use(s: &Stmt) -> StmtDefUse {
    let mut du = StmtDefUse::default();
    let reads = |e: &Expr, into: &mut BTreeSet<Var>| into.extend(e.reads());
    match &s.kind {
        StmtKind::VarDecl { name, init, .. } => {
            du.defs.insert(Var::local(name.clone()));
            if let Some(e) = init {
                reads(e, &mut du.uses);
            }
        }
        StmtKind::Assign { target, value } => {
            du.defs.insert(target.var());
            reads(value, &mut du.uses);
        }
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => reads(cond, &mut du.uses),
        StmtKind::For { init, cond, step, .. } => {
            if let Some(i) = init {
                du.defs.insert(i.target.var());
                reads(&i.value, &mut du.uses);
            }
            reads(cond, &mut du.uses);
            if let Some(st) = step {
                du.defs.insert(st.target.var());
                reads(&st.value, &mut du.uses);
            }
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                reads(e, &mut du.uses);
            }
        }
        StmtKind::Print(parts) => {
            for p in parts {
                if let PrintPart::Value(e) = p {
                    reads(e, &mut du.uses);
                }
            }
        }
        StmtKind::Expr(e) => reads(e, &mut du.uses),
    }
    du
}

/// Defs and uses of one CFG node.
fn node_def_use(node: CfgNode, stmts: &BTreeMap<StmtId, &Stmt>, formals: &BTreeSet<Var>) -> StmtDefUse {
    let mut du = StmtDefUse::default();
    match node {
        CfgNode::Entry => du.defs = formals.clone(),
        CfgNode::Exit => {}
        CfgNode::Stmt(s) => match &stmts[&s].kind {
            StmtKind::For { cond, .. } => du.uses.extend(cond.reads()),
            _ => du = stmt_def_use(stmts[&s]),
        },
        CfgNode::ForInit(s) => {
            if let StmtKind::For { init: Some(i), .. } = &stmts[&s].kind {
                du.defs.insert(i.target.var());
                du.uses.extend(i.value.reads());
            }
        }
        CfgNode::ForStep(s) => {
            if let StmtKind::For { step: Some(st), .. } = &stmts[&s].kind {
                du.defs.insert(st.target.var());
                du.uses.extend(st.value.reads());
            }
        }
    }
    du
}

/// Reaching definitions of locals over the real CFG, aggregated per statement.
fn reaching_definitions(
    cfg: &Cfg,
    stmts: &BTreeMap<StmtId, &Stmt>,
    formals: &BTreeSet<Var>,
) -> BTreeMap<StmtId, BTreeMap<Var, BTreeSet<StmtId>>> {
    let n = cfg.len();
    let du: Vec<StmtDefUse> = cfg.nodes.iter().map(|&node| node_def_use(node, stmts, formals)).collect();
    let site = |i: usize| cfg.nodes[i].stmt().unwrap_or(cfg.entry_number);
    // Facts are (var, defining node).
    type Fact = (Var, usize);
    let preds = cfg.preds();
    let mut out: Vec<BTreeSet<Fact>> = vec![BTreeSet::new(); n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            let mut inn: BTreeSet<Fact> = BTreeSet::new();
            for &p in &preds[i] {
                inn.extend(out[p].iter().cloned());
            }
            let local_defs: Vec<&Var> = du[i].defs.iter().filter(|v| v.scope == Scope::Local).collect();
            let mut new: BTreeSet<Fact> = inn.into_iter().filter(|(v, _)| !local_defs.contains(&v)).collect();
            for v in local_defs {
                new.insert((v.clone(), i));
            }
            if new != out[i] {
                out[i] = new;
                changed = true;
            }
        }
    }
    let mut result: BTreeMap<StmtId, BTreeMap<Var, BTreeSet<StmtId>>> = BTreeMap::new();
    for i in 0..n {
        let Some(stmt) = cfg.nodes[i].stmt() else { continue };
        let entry = result.entry(stmt).or_default();
        let mut inn: BTreeSet<&Fact> = BTreeSet::new();
        for &p in &preds[i] {
            inn.extend(out[p].iter());
        }
        for v in du[i].uses.iter().filter(|v| v.scope == Scope::Local) {
            let defs = entry.entry(v.clone()).or_default();
            for (dv, d) in &inn {
                if dv == v {
                    defs.insert(site(*d));
                }
            }
        }
    }
    result
}

impl ProgramModel {
    pub fn build(unit: &SourceUnit) -> Result<ProgramModel, ModelError> {
        let mut per_stmt: BTreeMap<StmtId, StmtDefUse> = BTreeMap::new();
        let mut control_parent = BTreeMap::new();
        let mut owner = BTreeMap::new();
        let mut predicates = BTreeSet::new();
        let mut bodies = Vec::new();

        for body in unit.bodies() {
            let number = body.number();
            let formals = formal_vars(&body);
            per_stmt.insert(number, StmtDefUse { defs: formals.clone(), uses: BTreeSet::new() });
            owner.insert(number, number);
            let mut stmts: BTreeMap<StmtId, &Stmt> = BTreeMap::new();
            let mut returns = Vec::new();
            walk_stmts(body.body(), &mut |s| {
                stmts.insert(s.number, s);
                if matches!(s.kind, StmtKind::Return(_)) {
                    returns.push(s.number);
                }
            });
            for (&n, s) in &stmts {
                per_stmt.insert(n, stmt_def_use(s));
                owner.insert(n, number);
                if s.kind.is_predicate() {
                    predicates.insert(n);
                }
            }

            let cfg = build_cfg(number, body.body(), ReturnEdges::ToExit);
            if !cfg.reaches_exit_from_all() {
                return Err(ModelError::NoExit { body: number });
            }
            let structured = build_cfg(number, body.body(), ReturnEdges::Structured);
            let deps = structured.control_dependences();
            let mut parents: BTreeMap<StmtId, BTreeSet<StmtId>> = BTreeMap::new();
            for (i, node) in structured.nodes.iter().enumerate() {
                let Some(s) = node.stmt() else { continue };
                let set = parents.entry(s).or_default();
                for &p in &deps[i] {
                    let ps = if p == ENTRY { number } else { structured.nodes[p].stmt().expect("statement node") };
                    if ps != s {
                        set.insert(ps);
                    }
                }
            }
            let mut body_parent = BTreeMap::new();
            for (s, ps) in parents {
                if ps.len() != 1 {
                    return Err(ModelError::ControlParents { stmt: s, found: ps.into_iter().collect() });
                }
                let p = *ps.iter().next().expect("one parent");
                body_parent.insert(s, p);
                control_parent.insert(s, p);
            }
            let reaching = reaching_definitions(&cfg, &stmts, &formals);
            bodies.push(BodyModel {
                number,
                owner: body.owner_name(),
                aspect_side: body.is_aspect_side(),
                cfg,
                control_parent: body_parent,
                reaching,
                returns,
            });
        }
        for a in &unit.aspects {
            per_stmt.insert(a.number, StmtDefUse::default());
            owner.insert(a.number, a.number);
            for p in &a.pointcuts {
                let params = p.params.iter().map(|x| Var::local(x.name.clone())).collect();
                per_stmt.insert(p.number, StmtDefUse { defs: params, uses: BTreeSet::new() });
                owner.insert(p.number, a.number);
                control_parent.insert(p.number, a.number);
            }
        }
        Ok(ProgramModel { def_use: DefUseInfo::from_per_stmt(per_stmt), bodies, control_parent, owner, predicates })
    }

    pub fn body(&self, number: StmtId) -> Option<&BodyModel> {
        self.bodies.iter().find(|b| b.number == number)
    }

    pub fn body_of(&self, stmt: StmtId) -> Option<&BodyModel> {
        self.body(*self.owner.get(&stmt)?)
    }

    /// JSON debug dump: statement number → control parent, defs, uses.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            stmt: StmtId,
            parent: Option<StmtId>,
            defs: Vec<String>,
            uses: Vec<String>,
            owner: Option<StmtId>,
            #[serde(skip_serializing_if = "Option::is_none")]
            reaching: Option<BTreeMap<String, BTreeSet<StmtId>>>,
        }
        let fmt = |vs: &BTreeSet<Var>| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>();
        let rows: Vec<Row> = self
            .def_use
            .per_stmt
            .iter()
            .map(|(&s, du)| Row {
                stmt: s,
                parent: self.control_parent.get(&s).copied(),
                defs: fmt(&du.defs),
                uses: fmt(&du.uses),
                owner: self.owner.get(&s).copied(),
                reaching: self
                    .body_of(s)
                    .and_then(|b| b.reaching.get(&s))
                    .filter(|r| !r.is_empty())
                    .map(|r| r.iter().map(|(v, d)| (v.to_string(), d.clone())).collect()),
            })
            .collect();
        serde_json::json!({ "statements": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_source, PRIME_EXAMPLE};

    fn prime() -> ProgramModel {
        ProgramModel::build(&parse_source("p.maj", PRIME_EXAMPLE).unwrap()).unwrap()
    }

    fn set(vs: &[Var]) -> BTreeSet<Var> {
        vs.iter().cloned().collect()
    }

    #[test]
    fn def_use_of_prime() {
        let m = prime();
        let du = |s| m.def_use.get(s).unwrap().clone();
        assert_eq!(du(2).defs, set(&[Var::global("n")]));
        assert_eq!(du(2).uses, set(&[Var::local("args")]));
        assert!(du(8).defs.is_empty());
        assert_eq!(du(8).uses, set(&[Var::local("n"), Var::local("i")]));
        assert_eq!(du(1).defs, set(&[Var::local("args")]));
        assert_eq!(du(15).defs, set(&[Var::local("n"), Var::local("result")]));
        assert_eq!(du(3).uses, set(&[Var::global("n")]));
    }

    #[test]
    fn self_increment_defines_and_uses() {
        let unit = parse_source("x.maj", "class A { static void main() { int x = 0; x = x + 1; } }").unwrap();
        let m = ProgramModel::build(&unit).unwrap();
        let du = m.def_use.get(3).unwrap();
        assert_eq!(du.defs, set(&[Var::local("x")]));
        assert_eq!(du.uses, set(&[Var::local("x")]));
        assert_eq!(m.body(1).unwrap().reaching[&3][&Var::local("x")], BTreeSet::from([2]));
    }

    #[test]
    fn inversion_round_trips() {
        let m = prime();
        assert_eq!(m.def_use.invert(), m.def_use.per_stmt);
    }

    #[test]
    fn control_parents_of_prime() {
        let m = prime();
        let expected = [(2, 1), (3, 1), (4, 3), (5, 3), (7, 6), (8, 7), (9, 8), (10, 6), (12, 11), (14, 13), (16, 15)];
        for (s, p) in expected {
            assert_eq!(m.control_parent.get(&s), Some(&p), "parent of {s}");
        }
        assert_eq!(m.control_parent.len(), expected.len());
    }

    #[test]
    fn reaching_definitions_in_loop() {
        let m = prime();
        let body = m.body(6).unwrap();
        assert_eq!(body.reaching[&8][&Var::local("i")], BTreeSet::from([7]));
        assert_eq!(body.reaching[&8][&Var::local("n")], BTreeSet::from([6]));
        assert_eq!(body.reaching[&7][&Var::local("i")], BTreeSet::from([7]));
        assert_eq!(body.returns, [9, 10]);
    }

    #[test]
    fn json_dump_lists_every_statement() {
        let json = prime().to_json();
        let rows = json["statements"].as_array().unwrap();
        assert_eq!(rows.len(), 16);
        assert_eq!(rows[7]["stmt"], 8);
        assert_eq!(rows[7]["parent"], 7);
    }
}
