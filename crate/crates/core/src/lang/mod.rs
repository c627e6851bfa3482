//! MiniAJ front end: lexer, parser, static checks, statement numbering and pretty printing.

pub mod ast;
mod check;
mod parser;
mod pretty;
pub mod token;

use serde::Serialize;

pub use ast::*;
pub use pretty::{expr_to_string, pretty};
pub use token::{tokenize, Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemanticKind {
    DuplicateName,
    ArityMismatch,
    Undeclared,
    Type,
    MissingReturn,
    Unreachable,
    Ambiguous,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("{line}:{col}: {message}")]
    Lex { line: u32, col: u32, message: String },
    #[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Syntax { line: u32, col: u32, expected: Vec<String>, found: String },
    #[error("line {line}: {message}")]
    Semantic { kind: SemanticKind, stmt: Option<StmtId>, line: u32, message: String },
}

impl FrontendError {
    pub(crate) fn semantic(kind: SemanticKind, stmt: Option<StmtId>, line: u32, message: impl Into<String>) -> Self {
        FrontendError::Semantic { kind, stmt, line, message: message.into() }
    }

    pub fn line(&self) -> u32 {
        match self {
            FrontendError::Lex { line, .. }
            | FrontendError::Syntax { line, .. }
            | FrontendError::Semantic { line, .. } => *line,
        }
    }
}

/// Parses a token stream into a checked, numbered and name-resolved tree.
pub fn parse(tokens: &[Token]) -> Result<SourceUnit, FrontendError> {
    parse_with_source(tokens, "", "")
}

fn parse_with_source(tokens: &[Token], path: &str, text: &str) -> Result<SourceUnit, FrontendError> {
    let mut unit = parser::Parser::new(tokens).parse_unit(path, text)?;
    check::check(&mut unit)?;
    Ok(unit)
}

/// Tokenizes and parses `text`, recording `path` and the text on the result.
pub fn parse_source(path: &str, text: &str) -> Result<SourceUnit, FrontendError> {
    let tokens = tokenize(text)?;
    parse_with_source(&tokens, path, text)
}

/// A construct that carries a statement number.
pub trait Numbered {
    fn number(&self) -> StmtId;
}

impl Numbered for Stmt {
    fn number(&self) -> StmtId {
        self.number
    }
}

impl Numbered for MethodDecl {
    fn number(&self) -> StmtId {
        self.number
    }
}

impl Numbered for AspectDecl {
    fn number(&self) -> StmtId {
        self.number
    }
}

impl Numbered for PointcutDecl {
    fn number(&self) -> StmtId {
        self.number
    }
}

impl Numbered for AdviceDecl {
    fn number(&self) -> StmtId {
        self.number
    }
}

pub fn number_of(node: &impl Numbered) -> StmtId {
    node.number()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberedKind {
    Method,
    Constructor,
    Aspect,
    Pointcut,
    Before,
    After,
    Decl,
    Assign,
    If,
    While,
    For,
    Return,
    Print,
    Expr,
}

impl NumberedKind {
    fn of_stmt(kind: &StmtKind) -> Self {
        match kind {
            StmtKind::VarDecl { .. } => NumberedKind::Decl,
            StmtKind::Assign { .. } => NumberedKind::Assign,
            StmtKind::If { .. } => NumberedKind::If,
            StmtKind::While { .. } => NumberedKind::While,
            StmtKind::For { .. } => NumberedKind::For,
            StmtKind::Return(_) => NumberedKind::Return,
            StmtKind::Print(_) => NumberedKind::Print,
            StmtKind::Expr(_) => NumberedKind::Expr,
        }
    }

    pub fn is_header(self) -> bool {
        matches!(
            self,
            NumberedKind::Method
                | NumberedKind::Constructor
                | NumberedKind::Aspect
                | NumberedKind::Pointcut
                | NumberedKind::Before
                | NumberedKind::After
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumberedEntry {
    pub number: StmtId,
    pub kind: NumberedKind,
    pub line: u32,
    pub end_line: u32,
    /// Enclosing method, constructor or advice (or the construct itself for headers).
    pub owner: String,
    pub aspect_side: bool,
}

/// Every numbered construct of a unit, indexed by number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StmtTable {
    entries: Vec<NumberedEntry>,
}

impl StmtTable {
    pub fn new(unit: &SourceUnit) -> Self {
        let mut entries = Vec::new();
        for body in unit.bodies() {
            let (kind, span) = match body {
                BodyRef::Method(_, m) => (NumberedKind::Method, m.span),
                BodyRef::Constructor(_, m) => (NumberedKind::Constructor, m.span),
                BodyRef::Advice(_, a) => (
                    match a.kind {
                        AdviceKind::Before => NumberedKind::Before,
                        AdviceKind::AfterReturning => NumberedKind::After,
                    },
                    a.span,
                ),
            };
            let owner = body.owner_name();
            let aspect_side = body.is_aspect_side();
            entries.push(NumberedEntry {
                number: body.number(),
                kind,
                line: span.line,
                end_line: span.line,
                owner: owner.clone(),
                aspect_side,
            });
            walk_stmts(body.body(), &mut |s| {
                entries.push(NumberedEntry {
                    number: s.number,
                    kind: NumberedKind::of_stmt(&s.kind),
                    line: s.span.line,
                    end_line: s.span.end_line,
                    owner: owner.clone(),
                    aspect_side,
                })
            });
        }
        for a in &unit.aspects {
            entries.push(NumberedEntry {
                number: a.number,
                kind: NumberedKind::Aspect,
                line: a.span.line,
                end_line: a.span.line,
                owner: a.name.clone(),
                aspect_side: true,
            });
            for p in &a.pointcuts {
                entries.push(NumberedEntry {
                    number: p.number,
                    kind: NumberedKind::Pointcut,
                    line: p.span.line,
                    end_line: p.span.end_line,
                    owner: format!("{}.{}", a.name, p.name),
                    aspect_side: true,
                });
            }
        }
        entries.sort_by_key(|e| e.number);
        StmtTable { entries }
    }

    pub fn entries(&self) -> &[NumberedEntry] {
        &self.entries
    }

    pub fn get(&self, number: StmtId) -> Option<&NumberedEntry> {
        let i = number.checked_sub(1)? as usize;
        self.entries.get(i).filter(|e| e.number == number)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Numbers whose construct starts on `line`.
    pub fn on_line(&self, line: u32) -> Vec<StmtId> {
        self.entries.iter().filter(|e| e.line == line).map(|e| e.number).collect()
    }
}

/// The running example: a primality check with before and after-returning advice.
pub const PRIME_EXAMPLE: &str = include_str!("prime.maj");

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> SourceUnit {
        parse_source("t.maj", src).unwrap_or_else(|e| panic!("{e}"))
    }

    fn semantic_kind(src: &str) -> SemanticKind {
        match parse_source("t.maj", src) {
            Err(FrontendError::Semantic { kind, .. }) => kind,
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn prime_example_shape() {
        let unit = parse_ok(PRIME_EXAMPLE);
        assert_eq!(unit.classes.len(), 1);
        assert_eq!(unit.classes[0].methods.len(), 2);
        assert_eq!(unit.aspects.len(), 1);
        assert_eq!(unit.aspects[0].pointcuts.len(), 1);
        assert_eq!(unit.aspects[0].advices.len(), 2);
        assert_eq!(unit.stmt_count, 16);
        let table = StmtTable::new(&unit);
        let numbers: Vec<_> = table.entries().iter().map(|e| e.number).collect();
        assert_eq!(numbers, (1..=16).collect::<Vec<_>>());
    }

    #[test]
    fn prime_example_numbers() {
        let unit = parse_ok(PRIME_EXAMPLE);
        let aspect = &unit.aspects[0];
        assert_eq!(number_of(aspect), 11);
        assert_eq!(number_of(&aspect.pointcuts[0]), 12);
        assert_eq!(number_of(&aspect.advices[0]), 13);
        assert_eq!(number_of(&aspect.advices[1]), 15);
        assert_eq!(number_of(&aspect.advices[1].body[0]), 16);
        let main = unit.method("main").unwrap();
        assert_eq!(number_of(main), 1);
        assert_eq!(number_of(&main.body[0]), 2);
        let isprime = unit.method("isprime").unwrap();
        assert_eq!(number_of(isprime), 6);
        let table = StmtTable::new(&unit);
        let kinds: Vec<_> = table.entries().iter().map(|e| e.kind).collect();
        use NumberedKind::*;
        assert_eq!(
            kinds,
            [
                Method, Assign, If, Print, Print, Method, For, If, Return, Return, Aspect, Pointcut, Before, Print,
                After, Print
            ]
        );
    }

    #[test]
    fn straight_line_numbering() {
        let unit = parse_ok("class A { static int x; static void main() { x = 1; x = x + 1; x = x * 2; } }");
        let main = unit.method("main").unwrap();
        let nums: Vec<_> = main.body.iter().map(number_of).collect();
        assert_eq!(nums, [2, 3, 4]);
        assert_eq!(number_of(main), 1);
    }

    #[test]
    fn empty_program() {
        let unit = parse_ok("");
        assert!(unit.classes.is_empty() && unit.aspects.is_empty());
        assert_eq!(unit.stmt_count, 0);
    }

    #[test]
    fn after_without_returning_is_syntax_error() {
        let src = PRIME_EXAMPLE.replace("returning(boolean result)", "");
        match parse_source("t.maj", &src) {
            Err(FrontendError::Syntax { expected, .. }) => {
                assert_eq!(expected, ["`returning`"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scopes_are_resolved() {
        let unit = parse_ok(PRIME_EXAMPLE);
        let main = unit.method("main").unwrap();
        match &main.body[0].kind {
            StmtKind::Assign { target, .. } => assert_eq!(target.scope, Scope::Static),
            other => panic!("{other:?}"),
        }
        let isprime = unit.method("isprime").unwrap();
        match &isprime.body[0].kind {
            StmtKind::For { cond, .. } => {
                let reads = cond.reads();
                assert!(reads.contains(&Var::local("n")) && reads.contains(&Var::local("i")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn call_indices_follow_preorder() {
        let unit =
            parse_ok("class A { static int f(int x) { return x; } static void main() { int y = f(f(1)) + f(2); } }");
        let main = unit.method("main").unwrap();
        let idx: Vec<u32> = main.body[0]
            .calls()
            .iter()
            .map(|e| match e {
                Expr::Call(c) => c.index,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(idx, [0, 1, 2]);
    }

    #[test]
    fn semantic_errors() {
        assert_eq!(semantic_kind("class A { static int x; static int x; }"), SemanticKind::DuplicateName);
        assert_eq!(
            semantic_kind("class A { static void main() { int y = 1; int y = 2; } }"),
            SemanticKind::DuplicateName
        );
        assert_eq!(semantic_kind("class A { static void main() { y = 2; } }"), SemanticKind::Undeclared);
        assert_eq!(semantic_kind("class A { static void main() { int y = true; } }"), SemanticKind::Type);
        assert_eq!(semantic_kind("class A { static int f() { int y = 1; } }"), SemanticKind::MissingReturn);
        assert_eq!(semantic_kind("class A { static int f() { return 1; return 2; } }"), SemanticKind::Unreachable);
        let bad_args = PRIME_EXAMPLE.replace("&& args(n)", "&& args(n, n)");
        assert_eq!(semantic_kind(&bad_args), SemanticKind::ArityMismatch);
        let twice = PRIME_EXAMPLE.replace(
            "public pointcut primeoperation",
            "pointcut other(int m): call(boolean Prime.isprime(int)) && args(m);\n    public pointcut primeoperation",
        );
        assert_eq!(semantic_kind(&twice), SemanticKind::Ambiguous);
        let assign_result = PRIME_EXAMPLE
            .replace("System.out.println(\"Showing", "result = false;\n        System.out.println(\"Showing");
        assert_eq!(semantic_kind(&assign_result), SemanticKind::Type);
    }

    #[test]
    fn pretty_round_trip_prime() {
        let unit = parse_ok(PRIME_EXAMPLE);
        let printed = pretty(&unit);
        let again = parse_ok(&printed);
        assert_eq!(pretty(&again), printed);
        let strip = |t: StmtTable| t.entries().iter().map(|e| (e.number, e.kind, e.owner.clone())).collect::<Vec<_>>();
        assert_eq!(strip(StmtTable::new(&again)), strip(StmtTable::new(&unit)));
    }

    #[test]
    fn pretty_parenthesizes_minimally() {
        let unit = parse_ok(
            "class A { static void main() { int a = (1 + 2) * 3 - (4 - 5) - -6; boolean b = !(a < 2) || a == 3 && true; System.out.println(\"v\" + (a + 1) + a * 2); } }",
        );
        let printed = pretty(&unit);
        assert!(printed.contains("int a = (1 + 2) * 3 - (4 - 5) - -6;"), "{printed}");
        assert!(printed.contains("boolean b = !(a < 2) || a == 3 && true;"), "{printed}");
        assert!(printed.contains("System.out.println(\"v\" + (a + 1) + a * 2);"), "{printed}");
    }
}
