//! Name resolution and static checks run after parsing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::*;
use super::{FrontendError, SemanticKind};

type CResult<T> = Result<T, FrontendError>;

fn err(kind: SemanticKind, stmt: Option<StmtId>, line: u32, message: impl Into<String>) -> FrontendError {
    FrontendError::semantic(kind, stmt, line, message)
}

#[derive(Clone)]
struct Signature {
    params: Vec<Type>,
    ret: Type,
}

struct Globals {
    class: Option<String>,
    statics: HashMap<String, Type>,
    methods: HashMap<String, Signature>,
    constructor: Option<Vec<Type>>,
}

/// Lexically scoped local environment for one body.
struct Env<'g> {
    globals: &'g Globals,
    scopes: Vec<HashMap<String, Type>>,
    ret: Type,
    has_args: bool,
    read_only: Option<String>,
}

impl Env<'_> {
    fn lookup(&self, name: &str) -> Option<(Scope, Type)> {
        for scope in self.scopes.iter().rev() {
            if let Some(t) = scope.get(name) {
                return Some((Scope::Local, t.clone()));
            }
        }
        self.globals.statics.get(name).map(|t| (Scope::Static, t.clone()))
    }

    fn declare(&mut self, name: &str, ty: Type, stmt: StmtId, line: u32) -> CResult<()> {
        if self.scopes.iter().any(|s| s.contains_key(name)) {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(stmt),
                line,
                format!("local `{name}` is already declared"),
            ));
        }
        self.scopes.last_mut().expect("scope stack is never empty").insert(name.to_string(), ty);
        Ok(())
    }
}

pub(crate) fn check(unit: &mut SourceUnit) -> CResult<()> {
    if unit.classes.len() > 1 {
        let c = &unit.classes[1];
        return Err(err(SemanticKind::Unsupported, None, c.span.line, "at most one class may be declared"));
    }
    let globals = collect_globals(unit)?;
    let mut aspect_names = BTreeSet::new();
    for a in &unit.aspects {
        if !aspect_names.insert(a.name.clone()) || globals.class.as_deref() == Some(a.name.as_str()) {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(a.number),
                a.span.line,
                format!("`{}` is declared more than once", a.name),
            ));
        }
    }

    if let Some(class) = unit.classes.first_mut() {
        let class_name = class.name.clone();
        for m in class.methods.iter_mut() {
            check_method(&globals, &class_name, m, false)?;
        }
        if let Some(ctor) = class.constructor.as_mut() {
            check_method(&globals, &class_name, ctor, true)?;
        }
    }

    let mut designators: Vec<(StmtId, u32, (String, String))> = Vec::new();
    for aspect in unit.aspects.iter_mut() {
        check_aspect(&globals, aspect, &mut designators)?;
    }
    designators.sort();
    for (i, (number, line, key)) in designators.iter().enumerate() {
        if designators[..i].iter().any(|(_, _, k)| k == key) {
            return Err(err(
                SemanticKind::Ambiguous,
                Some(*number),
                *line,
                format!("another pointcut already selects calls to {}.{}", key.0, key.1),
            ));
        }
    }
    Ok(())
}

fn collect_globals(unit: &SourceUnit) -> CResult<Globals> {
    let mut g = Globals { class: None, statics: HashMap::new(), methods: HashMap::new(), constructor: None };
    let Some(class) = unit.classes.first() else {
        return Ok(g);
    };
    g.class = Some(class.name.clone());
    for f in &class.static_fields {
        match f.ty {
            Type::Int | Type::Bool => {}
            _ => {
                return Err(err(
                    SemanticKind::Unsupported,
                    None,
                    f.span.line,
                    format!("static field `{}` must be int or boolean", f.name),
                ))
            }
        }
        if g.statics.insert(f.name.clone(), f.ty.clone()).is_some() {
            return Err(err(
                SemanticKind::DuplicateName,
                None,
                f.span.line,
                format!("static field `{}` is declared more than once", f.name),
            ));
        }
    }
    for m in &class.methods {
        if m.name == class.name {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(m.number),
                m.span.line,
                "a method may not share the class name",
            ));
        }
        let sig = Signature { params: m.params.iter().map(|p| p.ty.clone()).collect(), ret: m.ret.clone() };
        if g.methods.insert(m.name.clone(), sig).is_some() {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(m.number),
                m.span.line,
                format!("method `{}` is declared more than once", m.name),
            ));
        }
        check_signature_types(&class.name, m)?;
    }
    if let Some(ctor) = &class.constructor {
        check_signature_types(&class.name, ctor)?;
        g.constructor = Some(ctor.params.iter().map(|p| p.ty.clone()).collect());
    }
    Ok(g)
}

fn check_signature_types(class: &str, m: &MethodDecl) -> CResult<()> {
    let is_main = m.name == "main";
    if is_main {
        let ok_params = m.params.is_empty() || (m.params.len() == 1 && m.params[0].ty == Type::StrArray);
        if !m.is_static || m.ret != Type::Void || !ok_params {
            return Err(err(
                SemanticKind::Type,
                Some(m.number),
                m.span.line,
                "main must be `static void main(String[] args)` or `static void main()`",
            ));
        }
    }
    let mut names = BTreeSet::new();
    for p in &m.params {
        if p.ty == Type::StrArray && !is_main {
            return Err(err(SemanticKind::Type, Some(m.number), m.span.line, "String[] is only allowed for main"));
        }
        if p.ty == Type::Void {
            return Err(err(SemanticKind::Type, Some(m.number), m.span.line, "parameters cannot be void"));
        }
        check_type_exists(class, &p.ty, m.number, m.span.line)?;
        if !names.insert(p.name.as_str()) {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(m.number),
                m.span.line,
                format!("parameter `{}` is declared more than once", p.name),
            ));
        }
    }
    check_type_exists(class, &m.ret, m.number, m.span.line)
}

fn check_type_exists(class: &str, ty: &Type, stmt: StmtId, line: u32) -> CResult<()> {
    match ty {
        Type::Class(name) if name != class => {
            Err(err(SemanticKind::Undeclared, Some(stmt), line, format!("unknown type `{name}`")))
        }
        _ => Ok(()),
    }
}

fn check_method(globals: &Globals, class: &str, m: &mut MethodDecl, is_ctor: bool) -> CResult<()> {
    let mut params = HashMap::new();
    let mut has_args = false;
    for p in &m.params {
        if p.ty == Type::StrArray && p.name == "args" {
            has_args = true;
        }
        params.insert(p.name.clone(), p.ty.clone());
    }
    let ret = if is_ctor { Type::Void } else { m.ret.clone() };
    let mut env = Env { globals, scopes: vec![params], ret: ret.clone(), has_args, read_only: None };
    check_block(&mut env, &mut m.body)?;
    if ret != Type::Void && !block_returns(&m.body) {
        return Err(err(
            SemanticKind::MissingReturn,
            Some(m.number),
            m.span.line,
            format!("method `{}.{}` may finish without returning a value", class, m.name),
        ));
    }
    Ok(())
}

/// True if every path through the block ends in `return`.
pub(crate) fn block_returns(block: &[Stmt]) -> bool {
    block.last().is_some_and(stmt_returns)
}

fn stmt_returns(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { then_branch, else_branch: Some(else_branch), .. } => {
            block_returns(then_branch) && block_returns(else_branch)
        }
        _ => false,
    }
}

fn check_block(env: &mut Env<'_>, block: &mut [Stmt]) -> CResult<()> {
    env.scopes.push(HashMap::new());
    let len = block.len();
    for i in 0..len {
        if i + 1 < len && stmt_returns(&block[i]) {
            let next = &block[i + 1];
            return Err(err(SemanticKind::Unreachable, Some(next.number), next.span.line, "statement is unreachable"));
        }
        check_stmt(env, &mut block[i])?;
    }
    env.scopes.pop();
    Ok(())
}

fn expect_type(found: &Type, wanted: &Type, number: StmtId, line: u32, what: &str) -> CResult<()> {
    if found == wanted {
        Ok(())
    } else {
        Err(err(SemanticKind::Type, Some(number), line, format!("{what} has type {found}, expected {wanted}")))
    }
}

fn resolve_target(env: &Env<'_>, target: &mut VarRef, stmt_no: StmtId, line: u32) -> CResult<Type> {
    if env.read_only.as_deref() == Some(target.name.as_str()) {
        return Err(err(
            SemanticKind::Type,
            Some(stmt_no),
            line,
            format!("the returned value `{}` cannot be assigned", target.name),
        ));
    }
    let (scope, ty) = env.lookup(&target.name).ok_or_else(|| {
        err(SemanticKind::Undeclared, Some(stmt_no), line, format!("undeclared variable `{}`", target.name))
    })?;
    if ty == Type::StrArray {
        return Err(err(SemanticKind::Type, Some(stmt_no), line, "the argument array cannot be assigned"));
    }
    target.scope = scope;
    Ok(ty)
}

fn check_stmt(env: &mut Env<'_>, stmt: &mut Stmt) -> CResult<()> {
    let number = stmt.number;
    let line = stmt.span.line;
    match &mut stmt.kind {
        StmtKind::VarDecl { ty, name, init } => {
            if *ty == Type::Void || *ty == Type::StrArray {
                return Err(err(SemanticKind::Type, Some(number), line, format!("cannot declare a {ty} variable")));
            }
            check_type_exists(env.globals.class.as_deref().unwrap_or(""), ty, number, line)?;
            match init {
                Some(e) => {
                    let t = check_expr(env, e, number, line, false)?;
                    expect_type(&t, ty, number, line, "initializer")?;
                }
                None if matches!(ty, Type::Class(_)) => {
                    return Err(err(
                        SemanticKind::Unsupported,
                        Some(number),
                        line,
                        "object variables must be initialized",
                    ))
                }
                None => {}
            }
            env.declare(name, ty.clone(), number, line)?;
        }
        StmtKind::Assign { target, value } => {
            let t = check_expr(env, value, number, line, false)?;
            let want = resolve_target(env, target, number, line)?;
            expect_type(&t, &want, number, line, "assigned value")?;
        }
        StmtKind::If { cond, then_branch, else_branch } => {
            let t = check_expr(env, cond, number, line, false)?;
            expect_type(&t, &Type::Bool, number, line, "condition")?;
            check_block(env, then_branch)?;
            if let Some(e) = else_branch {
                check_block(env, e)?;
            }
        }
        StmtKind::While { cond, body } => {
            let t = check_expr(env, cond, number, line, false)?;
            expect_type(&t, &Type::Bool, number, line, "condition")?;
            check_block(env, body)?;
        }
        StmtKind::For { init, cond, step, body } => {
            env.scopes.push(HashMap::new());
            if let Some(init) = init {
                let t = check_expr(env, &mut init.value, number, line, false)?;
                match &init.decl {
                    Some(ty) => {
                        if matches!(ty, Type::Void | Type::StrArray | Type::Class(_)) {
                            return Err(err(
                                SemanticKind::Type,
                                Some(number),
                                line,
                                "loop variable must be int or boolean",
                            ));
                        }
                        expect_type(&t, ty, number, line, "loop initializer")?;
                        env.declare(&init.target.name, ty.clone(), number, line)?;
                        init.target.scope = Scope::Local;
                    }
                    None => {
                        let want = resolve_target(env, &mut init.target, number, line)?;
                        expect_type(&t, &want, number, line, "loop initializer")?;
                    }
                }
            }
            let t = check_expr(env, cond, number, line, false)?;
            expect_type(&t, &Type::Bool, number, line, "condition")?;
            if let Some(step) = step {
                let t = check_expr(env, &mut step.value, number, line, false)?;
                let want = resolve_target(env, &mut step.target, number, line)?;
                expect_type(&t, &want, number, line, "loop update")?;
            }
            check_block(env, body)?;
            env.scopes.pop();
        }
        StmtKind::Return(value) => match (value, env.ret.clone()) {
            (None, Type::Void) => {}
            (None, ret) => {
                return Err(err(SemanticKind::Type, Some(number), line, format!("missing return value of type {ret}")))
            }
            (Some(_), Type::Void) => {
                return Err(err(SemanticKind::Type, Some(number), line, "cannot return a value here"));
            }
            (Some(e), ret) => {
                let t = check_expr(env, e, number, line, false)?;
                expect_type(&t, &ret, number, line, "returned value")?;
            }
        },
        StmtKind::Print(parts) => {
            for part in parts {
                if let PrintPart::Value(e) = part {
                    let t = check_expr(env, e, number, line, false)?;
                    if !matches!(t, Type::Int | Type::Bool) {
                        return Err(err(
                            SemanticKind::Type,
                            Some(number),
                            line,
                            format!("cannot print a value of type {t}"),
                        ));
                    }
                }
            }
        }
        StmtKind::Expr(e) => {
            check_expr(env, e, number, line, true)?;
        }
    }
    Ok(())
}

fn check_args(env: &Env<'_>, args: &mut [Expr], params: &[Type], what: &str, number: StmtId, line: u32) -> CResult<()> {
    if args.len() != params.len() {
        return Err(err(
            SemanticKind::ArityMismatch,
            Some(number),
            line,
            format!("{what} takes {} argument(s), {} given", params.len(), args.len()),
        ));
    }
    for (i, (a, p)) in args.iter_mut().zip(params).enumerate() {
        let t = check_expr(env, a, number, line, false)?;
        if &t != p {
            return Err(err(
                SemanticKind::Type,
                Some(number),
                line,
                format!("argument {} of {what} has type {t}, expected {p}", i + 1),
            ));
        }
    }
    Ok(())
}

fn check_expr(env: &Env<'_>, e: &mut Expr, number: StmtId, line: u32, void_ok: bool) -> CResult<Type> {
    let mismatch = |msg: String| err(SemanticKind::Type, Some(number), line, msg);
    Ok(match e {
        Expr::Int(_) => Type::Int,
        Expr::Bool(_) => Type::Bool,
        Expr::Var(v) => {
            let (scope, ty) = env.lookup(&v.name).ok_or_else(|| {
                err(SemanticKind::Undeclared, Some(number), line, format!("undeclared variable `{}`", v.name))
            })?;
            if ty == Type::StrArray {
                return Err(mismatch("the argument array can only be read through `args[k]`".into()));
            }
            v.scope = scope;
            ty
        }
        Expr::ArgRead(_) => {
            if !env.has_args {
                return Err(err(
                    SemanticKind::Undeclared,
                    Some(number),
                    line,
                    "command-line arguments are only available in `main(String[] args)`",
                ));
            }
            Type::Int
        }
        Expr::Unary(op, inner) => {
            let t = check_expr(env, inner, number, line, false)?;
            let want = match op {
                UnaryOp::Neg => Type::Int,
                UnaryOp::Not => Type::Bool,
            };
            if t != want {
                return Err(mismatch(format!("operand has type {t}, expected {want}")));
            }
            want
        }
        Expr::Binary(op, l, r) => {
            let lt = check_expr(env, l, number, line, false)?;
            let rt = check_expr(env, r, number, line, false)?;
            use BinaryOp::*;
            match op {
                Add | Sub | Mul | Div | Rem | Lt | Le | Gt | Ge => {
                    if lt != Type::Int || rt != Type::Int {
                        return Err(mismatch(format!("`{}` needs int operands, found {lt} and {rt}", op.symbol())));
                    }
                    if matches!(op, Add | Sub | Mul | Div | Rem) {
                        Type::Int
                    } else {
                        Type::Bool
                    }
                }
                Eq | Ne => {
                    if lt != rt || !matches!(lt, Type::Int | Type::Bool) {
                        return Err(mismatch(format!("cannot compare {lt} with {rt}")));
                    }
                    Type::Bool
                }
                And | Or => {
                    if lt != Type::Bool || rt != Type::Bool {
                        return Err(mismatch(format!("`{}` needs boolean operands", op.symbol())));
                    }
                    Type::Bool
                }
            }
        }
        Expr::Call(call) => {
            let class = env.globals.class.as_deref();
            if let Some(q) = &call.class {
                if Some(q.as_str()) != class {
                    return Err(err(SemanticKind::Undeclared, Some(number), line, format!("unknown class `{q}`")));
                }
            }
            let sig = env.globals.methods.get(&call.method).cloned().ok_or_else(|| {
                err(SemanticKind::Undeclared, Some(number), line, format!("undeclared method `{}`", call.method))
            })?;
            if sig.params.contains(&Type::StrArray) {
                return Err(mismatch("main cannot be called".into()));
            }
            check_args(env, &mut call.args, &sig.params, &format!("`{}`", call.method), number, line)?;
            if sig.ret == Type::Void && !void_ok {
                return Err(mismatch(format!("`{}` returns no value", call.method)));
            }
            sig.ret
        }
        Expr::New(n) => {
            if env.globals.class.as_deref() != Some(n.class.as_str()) {
                return Err(err(SemanticKind::Undeclared, Some(number), line, format!("unknown class `{}`", n.class)));
            }
            let params = env.globals.constructor.clone().unwrap_or_default();
            check_args(env, &mut n.args, &params, "the constructor", number, line)?;
            Type::Class(n.class.clone())
        }
    })
}

fn check_aspect(
    globals: &Globals,
    aspect: &mut AspectDecl,
    designators: &mut Vec<(StmtId, u32, (String, String))>,
) -> CResult<()> {
    let mut pointcuts: BTreeMap<String, (Vec<Type>, Type)> = BTreeMap::new();
    for pc in &aspect.pointcuts {
        let line = pc.span.line;
        let d = &pc.designator;
        if pointcuts.contains_key(&pc.name) {
            return Err(err(
                SemanticKind::DuplicateName,
                Some(pc.number),
                line,
                format!("pointcut `{}` is declared more than once", pc.name),
            ));
        }
        let mut names = BTreeSet::new();
        for p in &pc.params {
            if !names.insert(p.name.as_str()) {
                return Err(err(
                    SemanticKind::DuplicateName,
                    Some(pc.number),
                    line,
                    format!("parameter `{}` is declared more than once", p.name),
                ));
            }
        }
        if globals.class.as_deref() != Some(d.class.as_str()) {
            return Err(err(SemanticKind::Undeclared, Some(pc.number), line, format!("unknown class `{}`", d.class)));
        }
        let sig = globals.methods.get(&d.method).ok_or_else(|| {
            err(SemanticKind::Undeclared, Some(pc.number), line, format!("undeclared method `{}`", d.method))
        })?;
        if sig.params != d.param_types || sig.ret != d.ret {
            return Err(err(
                SemanticKind::Type,
                Some(pc.number),
                line,
                format!("designator signature does not match method `{}`", d.method),
            ));
        }
        if !(d.args.is_empty() && pc.params.is_empty()) {
            if d.args.len() != d.param_types.len() || d.args.len() != pc.params.len() {
                return Err(err(
                    SemanticKind::ArityMismatch,
                    Some(pc.number),
                    line,
                    format!(
                        "`args` binds {} name(s) but the pointcut has {} parameter(s) and the method {}",
                        d.args.len(),
                        pc.params.len(),
                        d.param_types.len()
                    ),
                ));
            }
            let mut seen = BTreeSet::new();
            for (pos, name) in d.args.iter().enumerate() {
                let Some(p) = pc.params.iter().find(|p| &p.name == name) else {
                    return Err(err(
                        SemanticKind::Undeclared,
                        Some(pc.number),
                        line,
                        format!("`{name}` is not a parameter of pointcut `{}`", pc.name),
                    ));
                };
                if !seen.insert(name.as_str()) {
                    return Err(err(
                        SemanticKind::DuplicateName,
                        Some(pc.number),
                        line,
                        format!("`{name}` is bound twice in `args`"),
                    ));
                }
                if p.ty != d.param_types[pos] {
                    return Err(err(
                        SemanticKind::Type,
                        Some(pc.number),
                        line,
                        format!("`{name}` has type {}, argument {} has type {}", p.ty, pos + 1, d.param_types[pos]),
                    ));
                }
            }
        }
        designators.push((pc.number, line, (d.class.clone(), d.method.clone())));
        let ordered: Vec<Type> = pc.params.iter().map(|p| p.ty.clone()).collect();
        pointcuts.insert(pc.name.clone(), (ordered, d.ret.clone()));
    }

    let mut taken: BTreeSet<(String, bool)> = BTreeSet::new();
    for adv in aspect.advices.iter_mut() {
        let line = adv.span.line;
        let (pc_types, ret) = pointcuts.get(&adv.pointcut).cloned().ok_or_else(|| {
            err(
                SemanticKind::Undeclared,
                Some(adv.number),
                line,
                format!("pointcut `{}` is not declared in aspect `{}`", adv.pointcut, aspect.name),
            )
        })?;
        let is_before = adv.kind == AdviceKind::Before;
        if !taken.insert((adv.pointcut.clone(), is_before)) {
            return Err(err(
                SemanticKind::Ambiguous,
                Some(adv.number),
                line,
                format!(
                    "pointcut `{}` already has {} advice",
                    adv.pointcut,
                    if is_before { "before" } else { "after" }
                ),
            ));
        }
        let mut names = BTreeSet::new();
        for p in adv.params.iter().chain(adv.result.iter()) {
            if !names.insert(p.name.clone()) {
                return Err(err(
                    SemanticKind::DuplicateName,
                    Some(adv.number),
                    line,
                    format!("parameter `{}` is declared more than once", p.name),
                ));
            }
            if matches!(p.ty, Type::Void | Type::StrArray) {
                return Err(err(
                    SemanticKind::Type,
                    Some(adv.number),
                    line,
                    format!("parameter `{}` cannot be {}", p.name, p.ty),
                ));
            }
        }
        if adv.pointcut_args.len() != pc_types.len() {
            return Err(err(
                SemanticKind::ArityMismatch,
                Some(adv.number),
                line,
                format!(
                    "pointcut `{}` takes {} argument(s), {} given",
                    adv.pointcut,
                    pc_types.len(),
                    adv.pointcut_args.len()
                ),
            ));
        }
        let mut bound = BTreeSet::new();
        for (pos, name) in adv.pointcut_args.iter().enumerate() {
            let Some(p) = adv.params.iter().find(|p| &p.name == name) else {
                return Err(err(
                    SemanticKind::Undeclared,
                    Some(adv.number),
                    line,
                    format!("`{name}` is not a parameter of this advice"),
                ));
            };
            if !bound.insert(name.as_str()) {
                return Err(err(
                    SemanticKind::DuplicateName,
                    Some(adv.number),
                    line,
                    format!("`{name}` is bound twice"),
                ));
            }
            if p.ty != pc_types[pos] {
                return Err(err(
                    SemanticKind::Type,
                    Some(adv.number),
                    line,
                    format!("`{name}` has type {}, pointcut parameter {} has type {}", p.ty, pos + 1, pc_types[pos]),
                ));
            }
        }
        if let Some(p) = adv.params.iter().find(|p| !bound.contains(p.name.as_str())) {
            return Err(err(
                SemanticKind::ArityMismatch,
                Some(adv.number),
                line,
                format!("advice parameter `{}` is not bound by the pointcut", p.name),
            ));
        }
        if let Some(r) = &adv.result {
            if ret == Type::Void || r.ty != ret {
                return Err(err(
                    SemanticKind::Type,
                    Some(adv.number),
                    line,
                    format!("returning binding has type {}, the advised method returns {ret}", r.ty),
                ));
            }
        }
        let scope: HashMap<String, Type> =
            adv.params.iter().chain(adv.result.iter()).map(|p| (p.name.clone(), p.ty.clone())).collect();
        let mut env = Env {
            globals,
            scopes: vec![scope],
            ret: Type::Void,
            has_args: false,
            read_only: adv.result.as_ref().map(|r| r.name.clone()),
        };
        check_block(&mut env, &mut adv.body)?;
    }
    Ok(())
}
