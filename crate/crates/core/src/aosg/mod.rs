//! The aspect-oriented system dependence graph: dependence graphs of the base
//! code and the aspect code, joined at matched call sites.

mod build;
mod export;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::lang::{StmtId, Var};

pub use build::{build_adg, build_sdg, match_join_points, weave, MatchedCall, PartialGraph, VertexKey};

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VertexKind {
    MethodEntry,
    AdviceEntry,
    AspectEntry,
    PointcutStart,
    Statement,
    Predicate,
    CallSite,
    ActualIn,
    ActualOut,
    FormalIn,
    FormalOut,
    CNode,
}

impl VertexKind {
    pub fn is_parameter(self) -> bool {
        matches!(self, VertexKind::ActualIn | VertexKind::ActualOut | VertexKind::FormalIn | VertexKind::FormalOut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeKind {
    ControlDep,
    DataDep,
    Call,
    ParamIn,
    ParamOut,
    Summary,
    AspectMembership,
    AdviceEdge,
    /// Call edge from a `new` expression into the constructor entry.
    MethodEntryEdge,
    /// Completion of advice code flowing through a C-node into the woven call.
    WeavingOrder,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Base,
    Aspect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub stmt: Option<StmtId>,
    /// Header number of the body, aspect or pointcut the vertex belongs to.
    pub owner: StmtId,
    pub side: Side,
    pub key: VertexKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub kind: EdgeKind,
    pub var: Option<Var>,
    pub static_mark: bool,
}

/// A call site matched by a pointcut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinPointMatch {
    pub site: VertexId,
    pub site_stmt: StmtId,
    pub call_index: u32,
    pub pointcut: VertexId,
    pub pointcut_stmt: StmtId,
    /// (actual argument position, pointcut parameter position)
    pub bindings: Vec<(u32, u32)>,
    pub before: Option<VertexId>,
    pub after: Option<VertexId>,
    pub cnode: VertexId,
}

/// One call or `new` expression inside a statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallSiteInfo {
    pub stmt: StmtId,
    pub index: u32,
    /// Entry vertex of the callee; `None` for `new` on a class without constructor.
    pub callee: Option<VertexId>,
    pub callee_stmt: Option<StmtId>,
    pub is_new: bool,
    pub actual_in: Vec<VertexId>,
    pub actual_out: VertexId,
    pub join_point: Option<usize>,
}

/// Parameter vertices of a body or pointcut.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Formals {
    pub formal_in: Vec<VertexId>,
    pub formal_out: Option<VertexId>,
}

#[derive(Debug)]
pub struct Aosg {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    stmt_vertex: Vec<Option<VertexId>>,
    call_sites: BTreeMap<(StmtId, u32), CallSiteInfo>,
    matches: Vec<JoinPointMatch>,
    formals: BTreeMap<StmtId, Formals>,
    edge_index: HashMap<(VertexId, VertexId, EdgeKind, Option<Var>), EdgeId>,
    edge_visits: AtomicU64,
}

impl Clone for Aosg {
    fn clone(&self) -> Self {
        Aosg {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
            stmt_vertex: self.stmt_vertex.clone(),
            call_sites: self.call_sites.clone(),
            matches: self.matches.clone(),
            formals: self.formals.clone(),
            edge_index: self.edge_index.clone(),
            edge_visits: AtomicU64::new(self.edge_visits.load(Ordering::Relaxed)),
        }
    }
}

impl Aosg {
    fn touch(&self, n: u64) {
        self.edge_visits.fetch_add(n, Ordering::Relaxed);
    }

    /// Number of edge accesses made through this graph since construction.
    pub fn edge_visits(&self) -> u64 {
        self.edge_visits.load(Ordering::Relaxed)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id as usize]
    }

    /// All edges; counts as a visit of each.
    pub fn edges(&self) -> &[Edge] {
        self.touch(self.edges.len() as u64);
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        self.touch(1);
        &self.edges[id as usize]
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        let ids = &self.out_adj[v as usize];
        self.touch(ids.len() as u64);
        ids.iter().map(move |&e| &self.edges[e as usize])
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        let ids = &self.in_adj[v as usize];
        self.touch(ids.len() as u64);
        ids.iter().map(move |&e| &self.edges[e as usize])
    }

    pub fn find_edge(&self, from: VertexId, to: VertexId, kind: EdgeKind, var: Option<&Var>) -> Option<EdgeId> {
        self.touch(1);
        self.edge_index.get(&(from, to, kind, var.cloned())).copied()
    }

    /// The statement or header vertex of a statement number.
    pub fn stmt_vertex(&self, stmt: StmtId) -> Option<VertexId> {
        self.stmt_vertex.get(stmt as usize).copied().flatten()
    }

    pub fn stmt_count(&self) -> StmtId {
        self.stmt_vertex.len().saturating_sub(1) as StmtId
    }

    pub fn call_site(&self, stmt: StmtId, index: u32) -> Option<&CallSiteInfo> {
        self.call_sites.get(&(stmt, index))
    }

    pub fn call_sites(&self) -> impl Iterator<Item = &CallSiteInfo> {
        self.call_sites.values()
    }

    pub fn join_points(&self) -> &[JoinPointMatch] {
        &self.matches
    }

    pub fn formals(&self, header: StmtId) -> Option<&Formals> {
        self.formals.get(&header)
    }

    /// Builds both sides, matches join points and weaves them together.
    pub fn build(unit: &crate::lang::SourceUnit, model: &crate::model::ProgramModel) -> Aosg {
        let sdg = build_sdg(unit, model);
        let adg = build_adg(unit, model);
        let matches = match_join_points(unit);
        weave(sdg, adg, &matches)
    }

    pub fn static_marks(&self) -> Vec<bool> {
        self.edges.iter().map(|e| e.static_mark).collect()
    }
}

#[cfg(test)]
mod tests;
