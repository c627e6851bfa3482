//! Canonical source rendering. Re-parsing the output yields the same tree and numbering.

use std::fmt::Write;

use super::ast::*;

pub fn pretty(unit: &SourceUnit) -> String {
    let mut out = Printer { out: String::new(), indent: 0 };
    for class in &unit.classes {
        out.class(class);
    }
    for aspect in &unit.aspects {
        out.aspect(aspect);
    }
    out.out
}

/// Renders an expression with the minimal parentheses needed to re-parse it.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

struct Printer {
    out: String,
    indent: usize,
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.ty, p.name)).collect::<Vec<_>>().join(", ")
}

fn quote(text: &str) -> String {
    let mut s = String::from('"');
    for c in text.chars() {
        match c {
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

const UNARY_PREC: u8 = 7;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(..) => UNARY_PREC,
        _ => UNARY_PREC + 1,
    }
}

fn write_expr(s: &mut String, e: &Expr, min_prec: u8) {
    let paren = expr_prec(e) < min_prec;
    if paren {
        s.push('(');
    }
    match e {
        Expr::Int(v) => {
            let _ = write!(s, "{v}");
        }
        Expr::Bool(b) => {
            let _ = write!(s, "{b}");
        }
        Expr::Var(v) => s.push_str(&v.name),
        Expr::ArgRead(k) => {
            let _ = write!(s, "Integer.parseInt(args[{k}])");
        }
        Expr::Unary(op, inner) => {
            s.push(match op {
                UnaryOp::Neg => '-',
                UnaryOp::Not => '!',
            });
            // nested unary operators get parentheses so `-` `-` never fuses into `--`
            write_expr(s, inner, UNARY_PREC + 1);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            write_expr(s, l, p);
            let _ = write!(s, " {} ", op.symbol());
            write_expr(s, r, p + 1);
        }
        Expr::Call(c) => {
            if let Some(q) = &c.class {
                s.push_str(q);
                s.push('.');
            }
            s.push_str(&c.method);
            write_args(s, &c.args);
        }
        Expr::New(n) => {
            s.push_str("new ");
            s.push_str(&n.class);
            write_args(s, &n.args);
        }
    }
    if paren {
        s.push(')');
    }
}

fn write_args(s: &mut String, args: &[Expr]) {
    s.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_expr(s, a, 0);
    }
    s.push(')');
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn class(&mut self, c: &ClassDecl) {
        self.line(&format!("class {} {{", c.name));
        self.indent += 1;
        for f in &c.static_fields {
            self.line(&format!("static {} {};", f.ty, f.name));
        }
        let mut members: Vec<(&MethodDecl, bool)> = c.methods.iter().map(|m| (m, false)).collect();
        if let Some(ctor) = &c.constructor {
            members.push((ctor, true));
        }
        members.sort_by_key(|(m, _)| m.number);
        for (m, is_ctor) in members {
            let header = if is_ctor {
                format!("{}({}) {{", c.name, params(&m.params))
            } else {
                let stat = if m.is_static { "static " } else { "" };
                format!("{stat}{} {}({}) {{", m.ret, m.name, params(&m.params))
            };
            self.line(&header);
            self.body(&m.body);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn aspect(&mut self, a: &AspectDecl) {
        self.line(&format!("aspect {} {{", a.name));
        self.indent += 1;
        let mut items: Vec<(StmtId, Result<&PointcutDecl, &AdviceDecl>)> = a
            .pointcuts
            .iter()
            .map(|p| (p.number, Ok(p)))
            .chain(a.advices.iter().map(|adv| (adv.number, Err(adv))))
            .collect();
        items.sort_by_key(|(n, _)| *n);
        for (_, item) in items {
            match item {
                Ok(pc) => {
                    let d = &pc.designator;
                    let types = d.param_types.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
                    let mut text = format!(
                        "pointcut {}({}): call({} {}.{}({}))",
                        pc.name,
                        params(&pc.params),
                        d.ret,
                        d.class,
                        d.method,
                        types
                    );
                    if !d.args.is_empty() {
                        let _ = write!(text, " && args({})", d.args.join(", "));
                    }
                    text.push(';');
                    self.line(&text);
                }
                Err(adv) => {
                    let head = match (&adv.kind, &adv.result) {
                        (AdviceKind::AfterReturning, Some(r)) => {
                            format!("after({}) returning({} {})", params(&adv.params), r.ty, r.name)
                        }
                        _ => format!("before({})", params(&adv.params)),
                    };
                    self.line(&format!("{head}: {}({}) {{", adv.pointcut, adv.pointcut_args.join(", ")));
                    self.body(&adv.body);
                }
            }
        }
        self.indent -= 1;
        self.line("}");
    }

    /// Statements of a block followed by the closing brace.
    fn body(&mut self, block: &[Stmt]) {
        self.indent += 1;
        for s in block {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { ty, name, init } => match init {
                Some(e) => self.line(&format!("{ty} {name} = {};", expr_to_string(e))),
                None => self.line(&format!("{ty} {name};")),
            },
            StmtKind::Assign { target, value } => self.line(&format!("{} = {};", target.name, expr_to_string(value))),
            StmtKind::If { cond, then_branch, else_branch } => {
                self.line(&format!("if ({}) {{", expr_to_string(cond)));
                match else_branch {
                    Some(e) => {
                        self.indent += 1;
                        for s in then_branch {
                            self.stmt(s);
                        }
                        self.indent -= 1;
                        self.line("} else {");
                        self.body(e);
                    }
                    None => self.body(then_branch),
                }
            }
            StmtKind::While { cond, body } => {
                self.line(&format!("while ({}) {{", expr_to_string(cond)));
                self.body(body);
            }
            StmtKind::For { init, cond, step, body } => {
                let init = match init {
                    Some(i) => match &i.decl {
                        Some(t) => format!("{t} {} = {}", i.target.name, expr_to_string(&i.value)),
                        None => format!("{} = {}", i.target.name, expr_to_string(&i.value)),
                    },
                    None => String::new(),
                };
                let step = match step {
                    Some(u) => format!("{} = {}", u.target.name, expr_to_string(&u.value)),
                    None => String::new(),
                };
                self.line(&format!("for ({init}; {}; {step}) {{", expr_to_string(cond)));
                self.body(body);
            }
            StmtKind::Return(None) => self.line("return;"),
            StmtKind::Return(Some(e)) => self.line(&format!("return {};", expr_to_string(e))),
            StmtKind::Print(parts) => {
                let starts_with_text = matches!(parts.first(), Some(PrintPart::Text(_)));
                let mut text = String::new();
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        text.push_str(" + ");
                    }
                    match part {
                        PrintPart::Text(t) => text.push_str(&quote(t)),
                        PrintPart::Value(e) => {
                            let min = if starts_with_text { BinaryOp::Mul.precedence() } else { 0 };
                            write_expr(&mut text, e, min);
                        }
                    }
                }
                self.line(&format!("System.out.println({text});"));
            }
            StmtKind::Expr(e) => self.line(&format!("{};", expr_to_string(e))),
        }
    }
}
