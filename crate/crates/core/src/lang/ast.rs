//! Syntax tree for MiniAJ.
//!
//! Every numbered construct (method and constructor headers, statements, aspect
//! headers, pointcuts, advice headers) carries its statement number. Numbers are
//! handed out in source order starting at 1 by the parser.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::token::Span;

/// Statement number assigned by the parser.
pub type StmtId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Bool,
    Void,
    /// Instance of the program's class.
    Class(String),
    /// `String[]`, only legal as the parameter of `main`.
    StrArray,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("boolean"),
            Type::Void => f.write_str("void"),
            Type::Class(name) => f.write_str(name),
            Type::StrArray => f.write_str("String[]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// A static field of the class; one cell for the whole run.
    Static,
    /// A parameter or local; one cell per activation.
    Local,
}

/// A resolved variable identity. Static fields and locals may share a name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub scope: Scope,
}

impl Var {
    pub fn local(name: impl Into<String>) -> Var {
        Var { name: name.into(), scope: Scope::Local }
    }

    pub fn global(name: impl Into<String>) -> Var {
        Var { name: name.into(), scope: Scope::Static }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scope {
            Scope::Static => write!(f, "static {}", self.name),
            Scope::Local => f.write_str(&self.name),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Param {
    pub ty: Type,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
    pub classes: Vec<ClassDecl>,
    pub aspects: Vec<AspectDecl>,
    /// Highest statement number handed out.
    pub stmt_count: StmtId,
}

#[derive(Debug, Clone)]
pub struct FieldDecl {
    pub ty: Type,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ClassDecl {
    pub name: String,
    pub static_fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub constructor: Option<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub is_static: bool,
    pub body: Block,
    pub number: StmtId,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct AspectDecl {
    pub name: String,
    pub pointcuts: Vec<PointcutDecl>,
    pub advices: Vec<AdviceDecl>,
    pub number: StmtId,
    pub span: Span,
}

/// `call(ret Class.method(types)) && args(names)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallDesignator {
    pub ret: Type,
    pub class: String,
    pub method: String,
    pub param_types: Vec<Type>,
    /// Pointcut parameter bound at each argument position.
    pub args: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PointcutDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub designator: CallDesignator,
    pub number: StmtId,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdviceKind {
    Before,
    AfterReturning,
}

#[derive(Debug, Clone)]
pub struct AdviceDecl {
    pub kind: AdviceKind,
    pub params: Vec<Param>,
    /// `returning(T name)`; present exactly for after-returning advice.
    pub result: Option<Param>,
    pub pointcut: String,
    /// Names passed to the pointcut, positionally bound to its parameters.
    pub pointcut_args: Vec<String>,
    pub body: Block,
    pub number: StmtId,
    pub span: Span,
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone)]
pub struct Stmt {
    pub number: StmtId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone)]
pub struct ForInit {
    /// `Some` for `int i = e`, `None` for `i = e`.
    pub decl: Option<Type>,
    pub target: VarRef,
    pub value: Expr,
}

#[derive(Debug, Clone)]
pub struct Update {
    pub target: VarRef,
    pub value: Expr,
}

#[derive(Debug, Clone)]
pub enum PrintPart {
    Text(String),
    Value(Expr),
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    VarDecl {
        ty: Type,
        name: String,
        init: Option<Expr>,
    },
    Assign {
        target: VarRef,
        value: Expr,
    },
    If {
        cond: Expr,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    For {
        init: Option<Box<ForInit>>,
        cond: Expr,
        step: Option<Box<Update>>,
        body: Block,
    },
    Return(Option<Expr>),
    Print(Vec<PrintPart>),
    /// A call or `new` evaluated for its effect.
    Expr(Expr),
}

impl StmtKind {
    pub fn is_predicate(&self) -> bool {
        matches!(self, StmtKind::If { .. } | StmtKind::While { .. } | StmtKind::For { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            StmtKind::VarDecl { .. } => "decl",
            StmtKind::Assign { .. } => "assign",
            StmtKind::If { .. } => "if",
            StmtKind::While { .. } => "while",
            StmtKind::For { .. } => "for",
            StmtKind::Return(_) => "return",
            StmtKind::Print(_) => "print",
            StmtKind::Expr(_) => "expr",
        }
    }
}

/// Variable occurrence; `scope` is filled in by name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRef {
    pub name: String,
    pub scope: Scope,
}

impl VarRef {
    pub fn var(&self) -> Var {
        Var { name: self.name.clone(), scope: self.scope }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone)]
pub struct CallExpr {
    pub class: Option<String>,
    pub method: String,
    pub args: Vec<Expr>,
    /// Position of this call among the calls of its statement, in preorder.
    pub index: u32,
}

#[derive(Debug, Clone)]
pub struct NewExpr {
    pub class: String,
    pub args: Vec<Expr>,
    pub index: u32,
}

#[derive(Debug, Clone)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(VarRef),
    /// `Integer.parseInt(args[k])`: the k-th command-line argument.
    ArgRead(u32),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(CallExpr),
    New(NewExpr),
}

impl Expr {
    /// Visits this expression and its subexpressions in preorder.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Unary(_, e) => e.walk(f),
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Call(c) => c.args.iter().for_each(|a| a.walk(f)),
            Expr::New(n) => n.args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        match self {
            Expr::Unary(_, e) => e.walk_mut(f),
            Expr::Binary(_, l, r) => {
                l.walk_mut(f);
                r.walk_mut(f);
            }
            Expr::Call(c) => c.args.iter_mut().for_each(|a| a.walk_mut(f)),
            Expr::New(n) => n.args.iter_mut().for_each(|a| a.walk_mut(f)),
            _ => {}
        }
    }

    /// Variables read anywhere in the expression, including inside call arguments.
    /// `ArgRead` counts as a read of the local `args`.
    pub fn reads(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            Expr::Var(v) => out.push(v.var()),
            Expr::ArgRead(_) => out.push(Var::local("args")),
            _ => {}
        });
        out
    }
}

impl Stmt {
    /// Expressions evaluated directly by this statement (not by nested statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl { init, .. } => init.iter().collect(),
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For { init, cond, step, .. } => {
                let mut v = Vec::new();
                if let Some(i) = init {
                    v.push(&i.value);
                }
                v.push(cond);
                if let Some(s) = step {
                    v.push(&s.value);
                }
                v
            }
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Print(parts) => parts
                .iter()
                .filter_map(|p| match p {
                    PrintPart::Value(e) => Some(e),
                    PrintPart::Text(_) => None,
                })
                .collect(),
            StmtKind::Expr(e) => vec![e],
        }
    }

    pub fn own_exprs_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            StmtKind::VarDecl { init, .. } => init.iter_mut().collect(),
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For { init, cond, step, .. } => {
                let mut v = Vec::new();
                if let Some(i) = init {
                    v.push(&mut i.value);
                }
                v.push(cond);
                if let Some(s) = step {
                    v.push(&mut s.value);
                }
                v
            }
            StmtKind::Return(e) => e.iter_mut().collect(),
            StmtKind::Print(parts) => parts
                .iter_mut()
                .filter_map(|p| match p {
                    PrintPart::Value(e) => Some(e),
                    PrintPart::Text(_) => None,
                })
                .collect(),
            StmtKind::Expr(e) => vec![e],
        }
    }

    /// Nested statement blocks, in source order.
    pub fn children(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                let mut v = vec![then_branch];
                if let Some(e) = else_branch {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => vec![body],
            _ => Vec::new(),
        }
    }

    /// All call and `new` expressions of this statement, ordered by call index.
    pub fn calls(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for e in self.own_exprs() {
            e.walk(&mut |x| {
                if matches!(x, Expr::Call(_) | Expr::New(_)) {
                    out.push(x);
                }
            });
        }
        out
    }
}

/// Calls `f` on every statement of `block`, descending into nested blocks, in source order.
pub fn walk_stmts<'a>(block: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in block {
        f(s);
        for child in s.children() {
            walk_stmts(child, f);
        }
    }
}

/// A method, constructor or advice: anything with a body that runs in its own activation.
#[derive(Debug, Clone, Copy)]
pub enum BodyRef<'a> {
    Method(&'a ClassDecl, &'a MethodDecl),
    Constructor(&'a ClassDecl, &'a MethodDecl),
    Advice(&'a AspectDecl, &'a AdviceDecl),
}

impl<'a> BodyRef<'a> {
    pub fn number(&self) -> StmtId {
        match self {
            BodyRef::Method(_, m) | BodyRef::Constructor(_, m) => m.number,
            BodyRef::Advice(_, a) => a.number,
        }
    }

    pub fn body(&self) -> &'a Block {
        match self {
            BodyRef::Method(_, m) | BodyRef::Constructor(_, m) => &m.body,
            BodyRef::Advice(_, a) => &a.body,
        }
    }

    pub fn is_aspect_side(&self) -> bool {
        matches!(self, BodyRef::Advice(..))
    }

    /// Variables bound on entry: formals, plus the result binding for after-returning advice.
    pub fn formals(&self) -> Vec<&'a Param> {
        match self {
            BodyRef::Method(_, m) | BodyRef::Constructor(_, m) => m.params.iter().collect(),
            BodyRef::Advice(_, a) => a.params.iter().chain(a.result.iter()).collect(),
        }
    }

    pub fn return_type(&self) -> Type {
        match self {
            BodyRef::Method(_, m) => m.ret.clone(),
            BodyRef::Constructor(..) | BodyRef::Advice(..) => Type::Void,
        }
    }

    pub fn owner_name(&self) -> String {
        match self {
            BodyRef::Method(c, m) => format!("{}.{}", c.name, m.name),
            BodyRef::Constructor(c, _) => format!("{}.<init>", c.name),
            BodyRef::Advice(a, adv) => {
                let kind = match adv.kind {
                    AdviceKind::Before => "before",
                    AdviceKind::AfterReturning => "after",
                };
                format!("{}.{}@{}", a.name, kind, adv.number)
            }
        }
    }
}

impl SourceUnit {
    pub fn class(&self) -> Option<&ClassDecl> {
        self.classes.first()
    }

    /// Every executable body in source order.
    pub fn bodies(&self) -> Vec<BodyRef<'_>> {
        let mut out = Vec::new();
        for c in &self.classes {
            let mut members: Vec<BodyRef<'_>> = c.methods.iter().map(|m| BodyRef::Method(c, m)).collect();
            if let Some(ctor) = &c.constructor {
                members.push(BodyRef::Constructor(c, ctor));
            }
            members.sort_by_key(|b| b.number());
            out.extend(members);
        }
        for a in &self.aspects {
            out.extend(a.advices.iter().map(|adv| BodyRef::Advice(a, adv)));
        }
        out
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.class()?.methods.iter().find(|m| m.name == name)
    }

    pub fn pointcut(&self, number: StmtId) -> Option<(&AspectDecl, &PointcutDecl)> {
        self.aspects.iter().find_map(|a| a.pointcuts.iter().find(|p| p.number == number).map(|p| (a, p)))
    }
}
