use std::fmt::Write;

use serde::Serialize;

use super::{Aosg, VertexKey, VertexKind};

impl Aosg {
    fn vertex_label(&self, id: super::VertexId) -> String {
        let v = self.vertex(id);
        match v.key {
            VertexKey::Stmt { stmt } => format!("{stmt} {:?}", v.kind),
            VertexKey::ActualIn { stmt, index, pos } => format!("ActualIn {stmt}#{index}[{pos}]"),
            VertexKey::ActualOut { stmt, index } => format!("ActualOut {stmt}#{index}"),
            VertexKey::FormalIn { header, pos } => format!("FormalIn {header}[{pos}]"),
            VertexKey::FormalOut { header } => format!("FormalOut {header}"),
            VertexKey::CNode { stmt, index } => format!("C {stmt}#{index}"),
        }
    }

    /// Graphviz rendering. Vertices and edges appear in id order; marked edges are
    /// solid and unmarked ones dashed. `marks` overrides the static marks.
    pub fn to_dot(&self, marks: Option<&[bool]>) -> String {
        let mut out = String::from("digraph aosg {\n  node [fontname=\"monospace\"];\n");
        for v in self.vertices() {
            let shape = match v.kind {
                VertexKind::CNode => "diamond",
                k if k.is_parameter() => "ellipse",
                VertexKind::MethodEntry
                | VertexKind::AdviceEntry
                | VertexKind::AspectEntry
                | VertexKind::PointcutStart => "doubleoctagon",
                _ => "box",
            };
            let _ = writeln!(out, "  v{} [label=\"{}\", shape={shape}];", v.id, self.vertex_label(v.id));
        }
        for e in self.edges() {
            let marked = marks.map_or(e.static_mark, |m| m[e.id as usize]);
            let style = if marked { "solid" } else { "dashed" };
            let label = match &e.var {
                Some(v) => format!("{} {}", e.kind, v),
                None => e.kind.to_string(),
            };
            let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\", style={style}];", e.from, e.to);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct V {
            id: u32,
            kind: VertexKind,
            stmt: Option<u32>,
            owner: u32,
            label: String,
        }
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct E {
            id: u32,
            from: u32,
            to: u32,
            kind: super::EdgeKind,
            static_mark: bool,
            var: Option<String>,
        }
        let vertices: Vec<V> = self
            .vertices()
            .iter()
            .map(|v| V { id: v.id, kind: v.kind, stmt: v.stmt, owner: v.owner, label: self.vertex_label(v.id) })
            .collect();
        let edges: Vec<E> = self
            .edges()
            .iter()
            .map(|e| E {
                id: e.id,
                from: e.from,
                to: e.to,
                kind: e.kind,
                static_mark: e.static_mark,
                var: e.var.as_ref().map(|v| v.to_string()),
            })
            .collect();
        serde_json::json!({ "vertices": vertices, "edges": edges, "joinPoints": self.join_points() })
    }
}
