//! Random MiniAJ programs for differential and scaling tests.
//!
//! Generated programs always type-check and always terminate: methods only
//! call methods declared after them, advice only calls methods declared after
//! the one it advises, and every loop runs a bounded counter that nothing
//! else assigns.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::StmtId;

const CLASS: &str = "P";

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Upper bound on numbered constructs, headers included.
    pub max_stmts: StmtId,
    pub with_aspect: bool,
    /// Number of command-line integers the program reads.
    pub inputs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { max_stmts: 40, with_aspect: true, inputs: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub source: String,
    pub input: Vec<i64>,
    pub has_aspect: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Void,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Bool => "boolean",
            Ty::Void => "void",
        }
    }
}

#[derive(Debug, Clone)]
struct Method {
    name: String,
    ret: Ty,
    params: Vec<(String, Ty)>,
}

#[derive(Debug, Clone)]
struct Local {
    name: String,
    ty: Ty,
    assignable: bool,
}

struct Body {
    scopes: Vec<Vec<Local>>,
    /// Methods this body may call, by index.
    callable: Vec<usize>,
    in_main: bool,
    ret: Option<Ty>,
    budget: u32,
}

impl Body {
    fn visible(&self, ty: Ty) -> Vec<String> {
        self.scopes.iter().flatten().filter(|l| l.ty == ty).map(|l| l.name.clone()).collect()
    }

    fn targets(&self, ty: Ty) -> Vec<String> {
        self.scopes.iter().flatten().filter(|l| l.ty == ty && l.assignable).map(|l| l.name.clone()).collect()
    }
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    methods: Vec<Method>,
    inputs: usize,
    fresh: u32,
}

const STATICS: [(&str, Ty); 3] = [("g0", Ty::Int), ("g1", Ty::Int), ("b0", Ty::Bool)];

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn int_expr(&mut self, b: &Body, depth: u32) -> String {
        let vars = b.visible(Ty::Int);
        let calls = self.callable_returning(b, Ty::Int);
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            return match self.rng.gen_range(0..10) {
                0..=2 => self.rng.gen_range(-3..12).to_string(),
                3 if b.in_main => format!("Integer.parseInt(args[{}])", self.rng.gen_range(0..self.inputs)),
                _ if !vars.is_empty() => vars.choose(self.rng).unwrap().clone(),
                _ => self.rng.gen_range(0..9).to_string(),
            };
        }
        match self.rng.gen_range(0..10) {
            0..=4 => {
                let op = ["+", "-", "*", "+"].choose(self.rng).unwrap();
                format!("{} {op} {}", self.int_expr(b, depth - 1), self.int_operand(b, depth - 1))
            }
            5 => {
                let op = if self.rng.gen_bool(0.5) { "/" } else { "%" };
                format!("{} {op} {}", self.int_operand(b, depth - 1), self.rng.gen_range(1..6))
            }
            6 => format!("-{}", self.int_operand(b, depth - 1)),
            _ if !calls.is_empty() => {
                let m = *calls.choose(self.rng).unwrap();
                self.call(b, m, depth - 1)
            }
            _ => self.int_expr(b, depth - 1),
        }
    }

    /// An int expression safe to use as a right operand without parentheses.
    fn int_operand(&mut self, b: &Body, depth: u32) -> String {
        wrap(&self.int_expr(b, depth))
    }

    fn bool_expr(&mut self, b: &Body, depth: u32) -> String {
        let vars = b.visible(Ty::Bool);
        let calls = self.callable_returning(b, Ty::Bool);
        if depth == 0 || self.rng.gen_bool(0.2) {
            return match self.rng.gen_range(0..4) {
                0 if !vars.is_empty() => vars.choose(self.rng).unwrap().clone(),
                1 => ["true", "false"].choose(self.rng).unwrap().to_string(),
                _ => format!("{} < {}", self.int_operand(b, 0), self.int_operand(b, 0)),
            };
        }
        match self.rng.gen_range(0..10) {
            0..=4 => {
                let op = ["<", "<=", ">", ">=", "==", "!="].choose(self.rng).unwrap();
                format!("{} {op} {}", self.int_operand(b, depth - 1), self.int_operand(b, depth - 1))
            }
            5 | 6 => {
                let op = if self.rng.gen_bool(0.5) { "&&" } else { "||" };
                format!("({}) {op} ({})", self.bool_expr(b, depth - 1), self.bool_expr(b, depth - 1))
            }
            7 => format!("!({})", self.bool_expr(b, depth - 1)),
            _ if !calls.is_empty() => {
                let m = *calls.choose(self.rng).unwrap();
                self.call(b, m, depth - 1)
            }
            _ if !vars.is_empty() => vars.choose(self.rng).unwrap().clone(),
            _ => self.bool_expr(b, depth - 1),
        }
    }

    fn callable_returning(&self, b: &Body, ty: Ty) -> Vec<usize> {
        b.callable.iter().copied().filter(|&m| self.methods[m].ret == ty).collect()
    }

    fn call(&mut self, b: &Body, m: usize, depth: u32) -> String {
        let params = self.methods[m].params.clone();
        let args: Vec<String> = params
            .iter()
            .map(|(_, ty)| match ty {
                Ty::Bool => self.bool_expr(b, depth.min(1)),
                _ => self.int_expr(b, depth.min(1)),
            })
            .collect();
        format!("{}({})", self.methods[m].name, args.join(", "))
    }

    fn value(&mut self, b: &Body, ty: Ty) -> String {
        match ty {
            Ty::Bool => self.bool_expr(b, 2),
            _ => self.int_expr(b, 2),
        }
    }

    /// Emits statements until the body's budget is spent or the block ends.
    /// A `return` may end the block only when `can_return` is set.
    fn block(&mut self, b: &mut Body, out: &mut String, indent: usize, nested: bool, can_return: bool) {
        b.scopes.push(Vec::new());
        let pad = "    ".repeat(indent);
        let mut emitted = 0;
        while b.budget > 0 {
            if nested && emitted > 0 && self.rng.gen_bool(0.4) {
                break;
            }
            emitted += 1;
            b.budget -= 1;
            let roll = self.rng.gen_range(0..100);
            match roll {
                0..=21 => {
                    let ty = if self.rng.gen_bool(0.8) { Ty::Int } else { Ty::Bool };
                    let name = self.name("v");
                    let e = self.value(b, ty);
                    let _ = writeln!(out, "{pad}{} {name} = {e};", ty.name());
                    b.scopes.last_mut().unwrap().push(Local { name, ty, assignable: true });
                }
                22..=45 => {
                    let ty = if self.rng.gen_bool(0.8) { Ty::Int } else { Ty::Bool };
                    let targets = b.targets(ty);
                    let Some(t) = targets.choose(self.rng).cloned() else {
                        b.budget += 1;
                        emitted -= 1;
                        continue;
                    };
                    let e = self.value(b, ty);
                    let _ = writeln!(out, "{pad}{t} = {e};");
                }
                46..=57 if b.budget > 0 => {
                    let c = self.bool_expr(b, 2);
                    // only an if without else may return early, so no if ever returns on both paths
                    let has_else = self.rng.gen_bool(0.4);
                    let _ = writeln!(out, "{pad}if ({c}) {{");
                    self.block(b, out, indent + 1, true, !has_else);
                    if has_else && b.budget > 0 {
                        let _ = writeln!(out, "{pad}}} else {{");
                        self.block(b, out, indent + 1, true, false);
                    }
                    let _ = writeln!(out, "{pad}}}");
                }
                58..=63 if b.budget > 0 => {
                    let i = self.name("i");
                    let bound = self.rng.gen_range(1..4);
                    let _ = writeln!(out, "{pad}for (int {i} = 0; {i} < {bound}; {i}++) {{");
                    b.scopes.push(vec![Local { name: i, ty: Ty::Int, assignable: false }]);
                    self.block(b, out, indent + 1, true, true);
                    b.scopes.pop();
                    let _ = writeln!(out, "{pad}}}");
                }
                64..=67 if b.budget > 2 => {
                    let c = self.name("c");
                    let bound = self.rng.gen_range(1..4);
                    let _ = writeln!(out, "{pad}int {c} = 0;");
                    b.scopes.last_mut().unwrap().push(Local { name: c.clone(), ty: Ty::Int, assignable: false });
                    let guard = self.bool_expr(b, 1);
                    let _ = writeln!(out, "{pad}while ({c} < {bound} && ({guard})) {{");
                    b.budget -= 2;
                    self.block(b, out, indent + 1, true, false);
                    let _ = writeln!(out, "{pad}    {c} = {c} + 1;");
                    let _ = writeln!(out, "{pad}}}");
                }
                68..=81 => {
                    let e = self.int_expr(b, 2);
                    if self.rng.gen_bool(0.5) {
                        let _ = writeln!(out, "{pad}System.out.println(\"at {}: \" + {});", self.fresh, wrap(&e));
                    } else {
                        let _ = writeln!(out, "{pad}System.out.println({e});");
                    }
                }
                82..=89 if !b.callable.is_empty() => {
                    let m = *b.callable.choose(self.rng).unwrap();
                    let c = self.call(b, m, 1);
                    let _ = writeln!(out, "{pad}{c};");
                }
                90..=93 if can_return && b.ret.is_some() => {
                    let ty = b.ret.unwrap();
                    match ty {
                        Ty::Void => {
                            let _ = writeln!(out, "{pad}return;");
                        }
                        _ => {
                            let e = self.value(b, ty);
                            let _ = writeln!(out, "{pad}return {e};");
                        }
                    }
                    break;
                }
                _ => {
                    let t = STATICS[self.rng.gen_range(0..2)].0;
                    let e = self.int_expr(b, 1);
                    let _ = writeln!(out, "{pad}{t} = {t} + {};", wrap(&e));
                }
            }
        }
        b.scopes.pop();
    }

    fn statics_scope() -> Vec<Local> {
        STATICS.iter().map(|&(n, ty)| Local { name: n.to_string(), ty, assignable: true }).collect()
    }

    fn body_text(&mut self, b: &mut Body, indent: usize) -> String {
        let mut out = String::new();
        self.block(b, &mut out, indent, false, false);
        if let Some(ty @ (Ty::Int | Ty::Bool)) = b.ret {
            let e = self.value(b, ty);
            let _ = writeln!(out, "{}return {e};", "    ".repeat(indent));
        }
        out
    }
}

fn wrap(e: &str) -> String {
    if e.contains(' ') || e.starts_with('-') {
        format!("({e})")
    } else {
        e.to_string()
    }
}

/// Splits `total` into `parts` shares, each at least `min`.
fn split<R: Rng>(rng: &mut R, total: u32, parts: usize, min: u32) -> Vec<u32> {
    let mut shares = vec![min; parts];
    let mut rest = total.saturating_sub(min * parts as u32);
    while rest > 0 {
        shares[rng.gen_range(0..parts)] += 1;
        rest -= 1;
    }
    shares
}

/// A random well-typed, terminating program with at most `cfg.max_stmts` numbered constructs.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> Program {
    let inputs = cfg.inputs.max(1);
    let n_methods = rng.gen_range(usize::from(cfg.with_aspect)..=3);
    let mut methods = Vec::new();
    for i in 0..n_methods {
        let ret = *[Ty::Int, Ty::Int, Ty::Bool, Ty::Void].choose(rng).unwrap();
        let params = (0..rng.gen_range(0..=2))
            .map(|k| (format!("p{k}"), if rng.gen_bool(0.85) { Ty::Int } else { Ty::Bool }))
            .collect();
        methods.push(Method { name: format!("f{i}"), ret, params });
    }
    let with_ctor = rng.gen_bool(0.3);

    // aspects advise a subset of the methods, at most one pointcut per method
    let mut advised: Vec<(usize, bool, bool)> = Vec::new();
    if cfg.with_aspect {
        let mut order: Vec<usize> = (0..n_methods).collect();
        order.shuffle(rng);
        let count = rng.gen_range(1..=n_methods.min(2));
        for &m in &order[..count] {
            let can_after = methods[m].ret != Ty::Void;
            let before = !can_after || rng.gen_bool(0.7);
            let after = can_after && (!before || rng.gen_bool(0.6));
            advised.push((m, before, after));
        }
    }
    let split_aspects = advised.len() == 2 && rng.gen_bool(0.5);

    let advice_count: usize = advised.iter().map(|&(_, b, a)| usize::from(b) + usize::from(a)).sum();
    let aspect_headers = if advised.is_empty() {
        0
    } else if split_aspects {
        2
    } else {
        1
    };
    let headers = 1 + n_methods + usize::from(with_ctor) + aspect_headers + advised.len() + advice_count;
    let returns: u32 = methods.iter().filter(|m| m.ret != Ty::Void).count() as u32;
    let bodies = 1 + n_methods + usize::from(with_ctor) + advice_count;
    let free = cfg.max_stmts.saturating_sub(headers as u32 + returns);
    let mut shares = split(rng, free.max(bodies as u32), bodies, 1).into_iter();
    let mut main_budget = shares.next().unwrap();

    let mut g = Gen { rng, methods: methods.clone(), inputs, fresh: 0 };
    let mut src = String::new();
    let _ = writeln!(src, "class {CLASS} {{");
    for (n, ty) in STATICS {
        let _ = writeln!(src, "    static {} {n};", ty.name());
    }

    for (i, m) in methods.iter().enumerate() {
        let mut scope = Gen::<R>::statics_scope();
        scope.extend(m.params.iter().map(|(n, ty)| Local { name: n.clone(), ty: *ty, assignable: true }));
        let mut b = Body {
            scopes: vec![scope],
            callable: (i + 1..n_methods).collect(),
            in_main: false,
            ret: Some(m.ret),
            budget: shares.next().unwrap(),
        };
        let params: Vec<String> = m.params.iter().map(|(n, ty)| format!("{} {n}", ty.name())).collect();
        let text = g.body_text(&mut b, 2);
        let _ = writeln!(src, "\n    static {} {}({}) {{", m.ret.name(), m.name, params.join(", "));
        src.push_str(&text);
        let _ = writeln!(src, "    }}");
    }

    if with_ctor {
        let mut scope = Gen::<R>::statics_scope();
        scope.push(Local { name: "k".into(), ty: Ty::Int, assignable: true });
        let mut b = Body {
            scopes: vec![scope],
            callable: (0..n_methods).collect(),
            in_main: false,
            ret: Some(Ty::Void),
            budget: shares.next().unwrap(),
        };
        let text = g.body_text(&mut b, 2);
        let _ = writeln!(src, "\n    {CLASS}(int k) {{");
        src.push_str(&text);
        let _ = writeln!(src, "    }}");
    }

    // main opens with the first input and a call to every advised method
    let mut scope = Gen::<R>::statics_scope();
    scope.push(Local { name: "x0".into(), ty: Ty::Int, assignable: true });
    let mut b = Body { scopes: vec![scope], callable: (0..n_methods).collect(), in_main: true, ret: None, budget: 0 };
    let mut main = String::from("        int x0 = Integer.parseInt(args[0]);\n");
    main_budget = main_budget.saturating_sub(1);
    for &(m, _, _) in &advised {
        if main_budget == 0 {
            break;
        }
        main_budget -= 1;
        let c = g.call(&b, m, 1);
        match methods[m].ret {
            Ty::Void => {
                let _ = writeln!(main, "        {c};");
            }
            _ => {
                let _ = writeln!(main, "        System.out.println({c});");
            }
        }
    }
    if with_ctor && main_budget > 0 {
        main_budget -= 1;
        let e = g.int_expr(&b, 1);
        let _ = writeln!(main, "        {CLASS} o = new {CLASS}({e});");
    }
    b.budget = main_budget;
    main.push_str(&g.body_text(&mut b, 2));
    let _ = writeln!(src, "\n    public static void main(String[] args) {{");
    src.push_str(&main);
    let _ = writeln!(src, "    }}\n}}");

    let groups: Vec<&[(usize, bool, bool)]> = if split_aspects {
        advised.chunks(1).collect()
    } else if advised.is_empty() {
        vec![]
    } else {
        vec![&advised[..]]
    };
    for (k, group) in groups.into_iter().enumerate() {
        let _ = writeln!(src, "\naspect A{k} {{");
        for &(m, before, after) in group {
            let method = &methods[m];
            let pc = format!("pc{m}");
            let typed: Vec<String> = method.params.iter().map(|(n, ty)| format!("{} {n}", ty.name())).collect();
            let names: Vec<&str> = method.params.iter().map(|(n, _)| n.as_str()).collect();
            let types: Vec<&str> = method.params.iter().map(|(_, ty)| ty.name()).collect();
            let args = if names.is_empty() { String::new() } else { format!(" && args({})", names.join(", ")) };
            let _ = writeln!(
                src,
                "    pointcut {pc}({}): call({} {CLASS}.{}({})){args};",
                typed.join(", "),
                method.ret.name(),
                method.name,
                types.join(", ")
            );
            for is_after in [false, true] {
                if (is_after && !after) || (!is_after && !before) {
                    continue;
                }
                let mut scope = Gen::<R>::statics_scope();
                scope.extend(method.params.iter().map(|(n, ty)| Local { name: n.clone(), ty: *ty, assignable: true }));
                let mut returning = String::new();
                if is_after {
                    scope.push(Local { name: "res".into(), ty: method.ret, assignable: false });
                    returning = format!(" returning({} res)", method.ret.name());
                }
                let mut b = Body {
                    scopes: vec![scope],
                    callable: (m + 1..n_methods).collect(),
                    in_main: false,
                    ret: None,
                    budget: shares.next().unwrap(),
                };
                let text = g.body_text(&mut b, 2);
                let kind = if is_after { "after" } else { "before" };
                let _ = writeln!(src, "    {kind}({}){returning}: {pc}({}) {{", typed.join(", "), names.join(", "));
                src.push_str(&text);
                let _ = writeln!(src, "    }}");
            }
        }
        let _ = writeln!(src, "}}");
    }

    let input = (0..inputs).map(|_| g.rng.gen_range(-3..30)).collect();
    Program { source: src, input, has_aspect: !advised.is_empty() }
}

/// Straight-line `main` of `n` statements, each defining a variable from the previous one.
pub fn straight_line(n: usize) -> String {
    let mut src = String::from("class Chain {\n    public static void main(String[] args) {\n");
    src.push_str("        int v1 = Integer.parseInt(args[0]);\n");
    for i in 2..=n {
        let _ = writeln!(src, "        int v{i} = v{} + {i};", i - 1);
    }
    src.push_str("    }\n}\n");
    src
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_parse_within_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..300 {
            let cfg = SynthConfig { with_aspect: i % 2 == 0, ..SynthConfig::default() };
            let p = random_program(&mut rng, &cfg);
            let unit = parse_source("gen.maj", &p.source).unwrap_or_else(|e| panic!("{e}\n{}", p.source));
            assert!(unit.stmt_count <= 40, "{} constructs\n{}", unit.stmt_count, p.source);
            assert_eq!(p.has_aspect, cfg.with_aspect);
            assert_eq!(unit.aspects.is_empty(), !p.has_aspect);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = random_program(&mut ChaCha8Rng::seed_from_u64(5), &SynthConfig::default());
        let b = random_program(&mut ChaCha8Rng::seed_from_u64(5), &SynthConfig::default());
        assert_eq!(a.source, b.source);
        assert_eq!(a.input, b.input);
    }

    #[test]
    fn chain_has_n_statements() {
        let unit = parse_source("chain.maj", &straight_line(50)).unwrap();
        assert_eq!(unit.stmt_count, 51);
    }
}
