use super::ast::*;
use super::token::{Span, Token, TokenKind};
use super::{FrontendError, SemanticKind};

/// Recursive-descent parser. Statement numbers are handed out as numbered
/// constructs are reached, so numbering follows source order.
pub(crate) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    next_number: StmtId,
}

type PResult<T> = Result<T, FrontendError>;

impl<'t> Parser<'t> {
    pub(crate) fn new(tokens: &'t [Token]) -> Self {
        Parser { tokens, pos: 0, next_number: 1 }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => self.tokens.last().map(|t| t.span).unwrap_or(Span { line: 1, col: 1, end_line: 1 }),
        }
    }

    fn prev_span(&self) -> Span {
        self.pos.checked_sub(1).and_then(|i| self.tokens.get(i)).map(|t| t.span).unwrap_or_default()
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == name)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let span = self.span();
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        FrontendError::Syntax {
            line: span.line,
            col: span.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            let span = self.span();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.error(&[&kind.to_string()]))
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                let span = self.span();
                self.pos += 1;
                Ok((name, span))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.at_ident(word) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    fn number(&mut self) -> StmtId {
        let n = self.next_number;
        self.next_number += 1;
        n
    }

    pub(crate) fn parse_unit(mut self, path: &str, text: &str) -> PResult<SourceUnit> {
        let mut classes = Vec::new();
        let mut aspects = Vec::new();
        while self.peek().is_some() {
            let start = self.span();
            while self.eat(&TokenKind::KwPublic) {}
            match self.peek() {
                Some(TokenKind::KwClass) => classes.push(self.class_decl(start)?),
                Some(TokenKind::KwAspect) => aspects.push(self.aspect_decl(start)?),
                _ => return Err(self.error(&["`class`", "`aspect`"])),
            }
        }
        Ok(SourceUnit {
            path: path.to_string(),
            text: text.to_string(),
            classes,
            aspects,
            stmt_count: self.next_number - 1,
        })
    }

    fn class_decl(&mut self, start: Span) -> PResult<ClassDecl> {
        self.expect(TokenKind::KwClass)?;
        let (name, _) = self.expect_ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut class =
            ClassDecl { name, static_fields: Vec::new(), methods: Vec::new(), constructor: None, span: start };
        while !self.eat(&TokenKind::RBrace) {
            if self.peek().is_none() {
                return Err(self.error(&["`}`"]));
            }
            self.member(&mut class)?;
        }
        class.span = start.to(self.prev_span());
        Ok(class)
    }

    fn member(&mut self, class: &mut ClassDecl) -> PResult<()> {
        let start = self.span();
        let mut is_static = false;
        loop {
            match self.peek() {
                Some(TokenKind::KwPublic) | Some(TokenKind::KwPrivate) => self.pos += 1,
                Some(TokenKind::KwStatic) => {
                    is_static = true;
                    self.pos += 1
                }
                _ => break,
            }
        }
        if self.at_ident(&class.name) && self.peek_at(1) == Some(&TokenKind::LParen) {
            let number = self.number();
            self.pos += 1;
            let params = self.params()?;
            let body = self.block()?;
            if class.constructor.is_some() {
                return Err(FrontendError::semantic(
                    SemanticKind::DuplicateName,
                    Some(number),
                    start.line,
                    format!("class `{}` declares more than one constructor", class.name),
                ));
            }
            class.constructor = Some(MethodDecl {
                name: class.name.clone(),
                params,
                ret: Type::Void,
                is_static: false,
                body,
                number,
                span: start.to(self.prev_span()),
            });
            return Ok(());
        }
        let ty = self.ty()?;
        let (name, _) = self.expect_ident()?;
        if self.at(&TokenKind::LParen) {
            let number = self.number();
            let params = self.params()?;
            let body = self.block()?;
            class.methods.push(MethodDecl {
                name,
                params,
                ret: ty,
                is_static,
                body,
                number,
                span: start.to(self.prev_span()),
            });
            return Ok(());
        }
        if self.at(&TokenKind::Assign) {
            return Err(FrontendError::semantic(
                SemanticKind::Unsupported,
                None,
                start.line,
                format!("field `{name}` has an initializer; assign it in a method instead"),
            ));
        }
        self.expect(TokenKind::Semi).map_err(|_| self.error(&["`(`", "`;`"]))?;
        if !is_static {
            return Err(FrontendError::semantic(
                SemanticKind::Unsupported,
                None,
                start.line,
                format!("instance field `{name}` is not supported; declare it static"),
            ));
        }
        class.static_fields.push(FieldDecl { ty, name, span: start });
        Ok(())
    }

    fn ty(&mut self) -> PResult<Type> {
        let ty = match self.peek() {
            Some(TokenKind::KwInt) => Type::Int,
            Some(TokenKind::KwBoolean) => Type::Bool,
            Some(TokenKind::KwVoid) => Type::Void,
            Some(TokenKind::Ident(name)) if name == "String" => {
                self.pos += 1;
                self.expect(TokenKind::LBracket)?;
                self.expect(TokenKind::RBracket)?;
                return Ok(Type::StrArray);
            }
            Some(TokenKind::Ident(name)) => Type::Class(name.clone()),
            _ => return Err(self.error(&["type"])),
        };
        self.pos += 1;
        Ok(ty)
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            // `String args[]` is accepted alongside `String[] args`.
            let ty = if self.at_ident("String") && self.peek_at(1) != Some(&TokenKind::LBracket) {
                self.pos += 1;
                let (name, _) = self.expect_ident()?;
                self.expect(TokenKind::LBracket)?;
                self.expect(TokenKind::RBracket)?;
                params.push(Param { ty: Type::StrArray, name });
                None
            } else {
                Some(self.ty()?)
            };
            if let Some(ty) = ty {
                let (name, _) = self.expect_ident()?;
                params.push(Param { ty, name });
            }
            if self.eat(&TokenKind::RParen) {
                return Ok(params);
            }
            self.expect(TokenKind::Comma).map_err(|_| self.error(&["`,`", "`)`"]))?;
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        self.expect(TokenKind::LParen)?;
        let mut out = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.expect_ident()?.0);
            if self.eat(&TokenKind::RParen) {
                return Ok(out);
            }
            self.expect(TokenKind::Comma).map_err(|_| self.error(&["`,`", "`)`"]))?;
        }
    }

    fn aspect_decl(&mut self, start: Span) -> PResult<AspectDecl> {
        let number = self.number();
        self.expect(TokenKind::KwAspect)?;
        let (name, _) = self.expect_ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut aspect = AspectDecl { name, pointcuts: Vec::new(), advices: Vec::new(), number, span: start };
        loop {
            let item_start = self.span();
            while self.eat(&TokenKind::KwPublic) || self.eat(&TokenKind::KwPrivate) {}
            match self.peek() {
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(TokenKind::KwPointcut) => {
                    let pc = self.pointcut(item_start)?;
                    aspect.pointcuts.push(pc);
                }
                Some(TokenKind::KwBefore) | Some(TokenKind::KwAfter) => {
                    let adv = self.advice(item_start)?;
                    aspect.advices.push(adv);
                }
                _ => return Err(self.error(&["`pointcut`", "`before`", "`after`", "`}`"])),
            }
        }
        aspect.span = start.to(self.prev_span());
        Ok(aspect)
    }

    fn pointcut(&mut self, start: Span) -> PResult<PointcutDecl> {
        let number = self.number();
        self.expect(TokenKind::KwPointcut)?;
        let (name, _) = self.expect_ident()?;
        let params = self.params()?;
        self.expect(TokenKind::Colon)?;
        self.expect(TokenKind::KwCall)?;
        self.expect(TokenKind::LParen)?;
        let ret = self.ty()?;
        let (class, _) = self.expect_ident()?;
        self.expect(TokenKind::Dot)?;
        let (method, _) = self.expect_ident()?;
        self.expect(TokenKind::LParen)?;
        let mut param_types = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                param_types.push(self.ty()?);
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma).map_err(|_| self.error(&["`,`", "`)`"]))?;
            }
        }
        self.expect(TokenKind::RParen)?;
        let args = if self.eat(&TokenKind::AndAnd) {
            self.expect_word("args")?;
            self.ident_list()?
        } else {
            Vec::new()
        };
        self.expect(TokenKind::Semi).map_err(|_| self.error(&["`&&`", "`;`"]))?;
        Ok(PointcutDecl {
            name,
            params,
            designator: CallDesignator { ret, class, method, param_types, args },
            number,
            span: start.to(self.prev_span()),
        })
    }

    fn advice(&mut self, start: Span) -> PResult<AdviceDecl> {
        let number = self.number();
        let kind = if self.eat(&TokenKind::KwBefore) {
            AdviceKind::Before
        } else {
            self.expect(TokenKind::KwAfter)?;
            AdviceKind::AfterReturning
        };
        let params = self.params()?;
        let result = if kind == AdviceKind::AfterReturning {
            self.expect(TokenKind::KwReturning)?;
            self.expect(TokenKind::LParen)?;
            let ty = self.ty()?;
            let (name, _) = self.expect_ident()?;
            self.expect(TokenKind::RParen)?;
            Some(Param { ty, name })
        } else {
            None
        };
        self.expect(TokenKind::Colon)?;
        let (pointcut, _) = self.expect_ident()?;
        let pointcut_args = self.ident_list()?;
        let header_end = self.prev_span();
        let body = self.block()?;
        Ok(AdviceDecl { kind, params, result, pointcut, pointcut_args, body, number, span: start.to(header_end) })
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.peek().is_none() {
                return Err(self.error(&["`}`"]));
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    /// Body of `if`/`while`/`for`: a braced block or a single statement.
    fn branch(&mut self) -> PResult<Block> {
        if self.at(&TokenKind::LBrace) {
            self.block()
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let number = self.number();
        let kind = match self.peek() {
            Some(TokenKind::KwIf) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let header_end = self.prev_span();
                let then_branch = self.branch()?;
                let else_branch = if self.eat(&TokenKind::KwElse) { Some(self.branch()?) } else { None };
                let mut stmt =
                    Stmt { number, span: start.to(header_end), kind: StmtKind::If { cond, then_branch, else_branch } };
                assign_call_indices(&mut stmt);
                return Ok(stmt);
            }
            Some(TokenKind::KwWhile) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let header_end = self.prev_span();
                let body = self.branch()?;
                let mut stmt = Stmt { number, span: start.to(header_end), kind: StmtKind::While { cond, body } };
                assign_call_indices(&mut stmt);
                return Ok(stmt);
            }
            Some(TokenKind::KwFor) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let init = if self.at(&TokenKind::Semi) { None } else { Some(self.for_init()?) };
                self.expect(TokenKind::Semi)?;
                let cond = self.expr()?;
                self.expect(TokenKind::Semi)?;
                let step = if self.at(&TokenKind::RParen) { None } else { Some(self.update()?) };
                self.expect(TokenKind::RParen)?;
                let header_end = self.prev_span();
                let body = self.branch()?;
                let mut stmt = Stmt {
                    number,
                    span: start.to(header_end),
                    kind: StmtKind::For { init: init.map(Box::new), cond, step: step.map(Box::new), body },
                };
                assign_call_indices(&mut stmt);
                return Ok(stmt);
            }
            Some(TokenKind::KwReturn) => {
                self.pos += 1;
                let value = if self.at(&TokenKind::Semi) { None } else { Some(self.expr()?) };
                StmtKind::Return(value)
            }
            Some(TokenKind::KwInt) | Some(TokenKind::KwBoolean) => self.var_decl()?,
            Some(TokenKind::Ident(_)) => {
                let next = self.peek_at(1).cloned();
                match next {
                    _ if self.at_print() => self.print()?,
                    Some(TokenKind::Ident(_)) => self.var_decl()?,
                    Some(TokenKind::Assign) | Some(TokenKind::PlusPlus) | Some(TokenKind::MinusMinus) => {
                        let u = self.update()?;
                        StmtKind::Assign { target: u.target, value: u.value }
                    }
                    _ => self.expr_stmt()?,
                }
            }
            Some(TokenKind::KwNew) | Some(TokenKind::LParen) => self.expr_stmt()?,
            _ => return Err(self.error(&["statement"])),
        };
        self.expect(TokenKind::Semi)?;
        let mut stmt = Stmt { number, span: start.to(self.prev_span()), kind };
        assign_call_indices(&mut stmt);
        Ok(stmt)
    }

    fn at_print(&self) -> bool {
        if self.at_ident("print") && self.peek_at(1) == Some(&TokenKind::LParen) {
            return true;
        }
        let sys = matches!(self.peek(), Some(TokenKind::Ident(s)) if s == "System" || s == "system");
        sys && self.peek_at(1) == Some(&TokenKind::Dot)
            && matches!(self.peek_at(2), Some(TokenKind::Ident(s)) if s == "out")
    }

    fn print(&mut self) -> PResult<StmtKind> {
        if self.at_ident("print") {
            self.pos += 1;
        } else {
            self.pos += 1;
            self.expect(TokenKind::Dot)?;
            self.expect_word("out")?;
            self.expect(TokenKind::Dot)?;
            self.expect_word("println")?;
        }
        self.expect(TokenKind::LParen)?;
        let mut parts = Vec::new();
        if let Some(TokenKind::Str(_)) = self.peek() {
            loop {
                match self.peek() {
                    Some(TokenKind::Str(s)) => {
                        parts.push(PrintPart::Text(s.clone()));
                        self.pos += 1;
                    }
                    _ => parts.push(PrintPart::Value(self.binary(BinaryOp::Mul.precedence())?)),
                }
                if !self.eat(&TokenKind::Plus) {
                    break;
                }
            }
        } else {
            parts.push(PrintPart::Value(self.expr()?));
        }
        self.expect(TokenKind::RParen)?;
        Ok(StmtKind::Print(parts))
    }

    fn var_decl(&mut self) -> PResult<StmtKind> {
        let ty = self.ty()?;
        let (name, _) = self.expect_ident()?;
        let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
        Ok(StmtKind::VarDecl { ty, name, init })
    }

    fn for_init(&mut self) -> PResult<ForInit> {
        let decl = match self.peek() {
            Some(TokenKind::KwInt) | Some(TokenKind::KwBoolean) => Some(self.ty()?),
            _ => None,
        };
        let (name, _) = self.expect_ident()?;
        self.expect(TokenKind::Assign)?;
        let value = self.expr()?;
        Ok(ForInit { decl, target: VarRef { name, scope: Scope::Local }, value })
    }

    /// `x = e`, `x++` or `x--`.
    fn update(&mut self) -> PResult<Update> {
        let (name, _) = self.expect_ident()?;
        let target = VarRef { name: name.clone(), scope: Scope::Local };
        let value = match self.peek() {
            Some(TokenKind::Assign) => {
                self.pos += 1;
                self.expr()?
            }
            Some(TokenKind::PlusPlus) | Some(TokenKind::MinusMinus) => {
                let op = if self.at(&TokenKind::PlusPlus) { BinaryOp::Add } else { BinaryOp::Sub };
                self.pos += 1;
                Expr::Binary(op, Box::new(Expr::Var(target.clone())), Box::new(Expr::Int(1)))
            }
            _ => return Err(self.error(&["`=`", "`++`", "`--`"])),
        };
        Ok(Update { target, value })
    }

    fn expr_stmt(&mut self) -> PResult<StmtKind> {
        let expr = self.expr()?;
        match expr {
            Expr::Call(_) | Expr::New(_) => Ok(StmtKind::Expr(expr)),
            _ => Err(self.error(&["`=`", "call"])),
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek()? {
            TokenKind::OrOr => BinaryOp::Or,
            TokenKind::AndAnd => BinaryOp::And,
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Slash => BinaryOp::Div,
            TokenKind::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op().filter(|op| op.precedence() >= min_prec) {
            self.pos += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&TokenKind::Bang) {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat(&TokenKind::Minus) {
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            self.expect(TokenKind::Comma).map_err(|_| self.error(&["`,`", "`)`"]))?;
        }
    }

    /// `args[k]`
    fn arg_index(&mut self) -> PResult<Expr> {
        self.expect_word("args")?;
        self.expect(TokenKind::LBracket)?;
        let index = match self.bump().map(|t| &t.kind) {
            Some(TokenKind::Int(v)) if *v >= 0 && *v <= u32::MAX as i64 => *v as u32,
            _ => {
                self.pos -= 1;
                return Err(self.error(&["argument index"]));
            }
        };
        self.expect(TokenKind::RBracket)?;
        Ok(Expr::ArgRead(index))
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(TokenKind::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(TokenKind::KwTrue) => {
                self.pos += 1;
                Ok(Expr::Bool(true))
            }
            Some(TokenKind::KwFalse) => {
                self.pos += 1;
                Ok(Expr::Bool(false))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::KwNew) => {
                self.pos += 1;
                let (class, _) = self.expect_ident()?;
                let args = self.call_args()?;
                Ok(Expr::New(NewExpr { class, args, index: 0 }))
            }
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                if name == "args" && self.peek_at(1) == Some(&TokenKind::LBracket) {
                    return self.arg_index();
                }
                if name == "parseInt" && self.peek_at(1) == Some(&TokenKind::LParen) {
                    self.pos += 1;
                    self.expect(TokenKind::LParen)?;
                    let e = self.arg_index()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(e);
                }
                if name == "Integer" && self.peek_at(1) == Some(&TokenKind::Dot) {
                    self.pos += 2;
                    self.expect_word("parseInt")?;
                    self.expect(TokenKind::LParen)?;
                    let e = self.arg_index()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(e);
                }
                self.pos += 1;
                if self.eat(&TokenKind::Dot) {
                    let (method, _) = self.expect_ident()?;
                    let args = self.call_args()?;
                    return Ok(Expr::Call(CallExpr { class: Some(name), method, args, index: 0 }));
                }
                if self.at(&TokenKind::LParen) {
                    let args = self.call_args()?;
                    return Ok(Expr::Call(CallExpr { class: None, method: name, args, index: 0 }));
                }
                Ok(Expr::Var(VarRef { name, scope: Scope::Local }))
            }
            _ => Err(self.error(&["expression"])),
        }
    }
}

/// Numbers the calls of one statement 0, 1, 2, ... in preorder.
fn assign_call_indices(stmt: &mut Stmt) {
    let mut next = 0;
    for e in stmt.own_exprs_mut() {
        e.walk_mut(&mut |x| match x {
            Expr::Call(c) => {
                c.index = next;
                next += 1;
            }
            Expr::New(n) => {
                n.index = next;
                next += 1;
            }
            _ => {}
        });
    }
}
