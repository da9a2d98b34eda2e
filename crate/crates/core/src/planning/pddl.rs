//! STRIPS subset of PDDL: typed objects, positive preconditions, add and
//! delete effects. Everything is case-folded to lowercase.

use std::collections::{BTreeMap, HashMap};

use super::PlanningError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn line(&self) -> usize {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) => *l,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            Sexp::Atom(..) => None,
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> PlanningError {
    PlanningError::Syntax {
        line,
        message: msg.into(),
    }
}

fn parse_sexp(text: &str) -> Result<Sexp, PlanningError> {
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '\n' => line += 1,
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                if done.is_some() {
                    return Err(syntax(line, "text after the top-level expression"));
                }
                stack.push((Vec::new(), line));
            }
            ')' => {
                let (items, start) = stack.pop().ok_or_else(|| syntax(line, "unbalanced `)`"))?;
                let node = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => done = Some(node),
                }
            }
            c if c.is_whitespace() => {}
            c => {
                let mut tok = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    tok.push(n);
                    chars.next();
                }
                let node = Sexp::Atom(tok.to_lowercase(), line);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => return Err(syntax(line, format!("unexpected token `{tok}`"))),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(syntax(*start, "unclosed `(`"));
    }
    done.ok_or_else(|| syntax(line, "empty input"))
}

/// Predicate applied to parameters or objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSchema {
    pub predicate: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    /// `(name, type)` pairs; variables keep their leading `?`.
    pub parameters: Vec<(String, String)>,
    pub pre: Vec<AtomSchema>,
    pub add: Vec<AtomSchema>,
    pub del: Vec<AtomSchema>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    /// Parent of each declared type; `object` is the root.
    pub types: BTreeMap<String, String>,
    pub predicates: BTreeMap<String, Vec<String>>,
    pub constants: Vec<(String, String)>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    /// Whether `sub` equals `sup` or is declared below it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut t = sub;
        for _ in 0..=self.types.len() {
            if t == sup {
                return true;
            }
            match self.types.get(t) {
                Some(parent) => t = parent,
                None => return false,
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<(String, String)>,
    pub init: Vec<AtomSchema>,
    pub goal: Vec<AtomSchema>,
}

/// Parsed domain and problem together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedTask {
    pub domain: Domain,
    pub problem: Problem,
}

impl LiftedTask {
    /// Constants followed by problem objects, duplicates removed.
    pub fn objects(&self) -> Vec<(String, String)> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (o, t) in self.domain.constants.iter().chain(&self.problem.objects) {
            if seen.insert(o.clone(), ()).is_none() {
                out.push((o.clone(), t.clone()));
            }
        }
        out
    }
}

const SUPPORTED: &[&str] = &[":strips", ":typing"];

/// `a b - t c - u d` into `[(a,t),(b,t),(c,u),(d,object)]`.
fn typed_list(items: &[Sexp]) -> Result<Vec<(String, String)>, PlanningError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let tok = items[i]
            .atom()
            .ok_or_else(|| syntax(items[i].line(), "expected a name in typed list"))?;
        if tok == "-" {
            let ty = items
                .get(i + 1)
                .and_then(Sexp::atom)
                .ok_or_else(|| syntax(items[i].line(), "missing type after `-`"))?;
            out.extend(pending.drain(..).map(|n| (n, ty.to_string())));
            i += 2;
        } else {
            pending.push(tok.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| (n, "object".to_string())));
    Ok(out)
}

fn parse_atom(e: &Sexp) -> Result<AtomSchema, PlanningError> {
    let items = e.list().ok_or_else(|| syntax(e.line(), "expected an atom"))?;
    let head = items
        .first()
        .and_then(Sexp::atom)
        .ok_or_else(|| syntax(e.line(), "expected a predicate name"))?;
    match head {
        "not" => return Err(PlanningError::Unsupported("negative literals".into())),
        "and" | "or" | "imply" | "exists" | "forall" | "when" | "=" | "increase" | "decrease"
        | "assign" | "scale-up" | "scale-down" => {
            return Err(PlanningError::Unsupported(format!("`{head}` expressions")))
        }
        _ => {}
    }
    let args = items[1..]
        .iter()
        .map(|a| {
            a.atom()
                .map(str::to_string)
                .ok_or_else(|| syntax(a.line(), "nested term in atom"))
        })
        .collect::<Result<_, _>>()?;
    Ok(AtomSchema {
        predicate: head.to_string(),
        args,
    })
}

/// Conjunction of positive atoms; `()` and `(and)` are empty.
fn parse_conjunction(e: &Sexp) -> Result<Vec<AtomSchema>, PlanningError> {
    let items = e.list().ok_or_else(|| syntax(e.line(), "expected a formula"))?;
    match items.first().and_then(Sexp::atom) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => items[1..].iter().map(parse_atom).collect(),
        Some("not") => Err(PlanningError::Unsupported("negative preconditions".into())),
        _ => Ok(vec![parse_atom(e)?]),
    }
}

fn parse_effect(e: &Sexp) -> Result<(Vec<AtomSchema>, Vec<AtomSchema>), PlanningError> {
    let items = e.list().ok_or_else(|| syntax(e.line(), "expected an effect"))?;
    let parts: Vec<&Sexp> = match items.first().and_then(Sexp::atom) {
        None if items.is_empty() => Vec::new(),
        Some("and") => items[1..].iter().collect(),
        _ => vec![e],
    };
    let mut add = Vec::new();
    let mut del = Vec::new();
    for p in parts {
        let inner = p.list().ok_or_else(|| syntax(p.line(), "expected an effect literal"))?;
        if inner.first().and_then(Sexp::atom) == Some("not") {
            if inner.len() != 2 {
                return Err(syntax(p.line(), "`not` takes one atom"));
            }
            del.push(parse_atom(&inner[1])?);
        } else {
            add.push(parse_atom(p)?);
        }
    }
    Ok((add, del))
}

fn define_body<'a>(root: &'a Sexp, kind: &str) -> Result<(String, &'a [Sexp]), PlanningError> {
    let items = root.list().ok_or_else(|| syntax(root.line(), "expected (define ...)"))?;
    if items.first().and_then(Sexp::atom) != Some("define") {
        return Err(syntax(root.line(), "expected (define ...)"));
    }
    let header = items
        .get(1)
        .and_then(Sexp::list)
        .ok_or_else(|| syntax(root.line(), format!("expected ({kind} <name>)")))?;
    match (header.first().and_then(Sexp::atom), header.get(1).and_then(Sexp::atom)) {
        (Some(k), Some(name)) if k == kind => Ok((name.to_string(), &items[2..])),
        _ => Err(syntax(root.line(), format!("expected ({kind} <name>)"))),
    }
}

fn section(e: &Sexp) -> Result<(&str, &[Sexp]), PlanningError> {
    let items = e.list().ok_or_else(|| syntax(e.line(), "expected a section"))?;
    let key = items
        .first()
        .and_then(Sexp::atom)
        .ok_or_else(|| syntax(e.line(), "expected a section keyword"))?;
    Ok((key, &items[1..]))
}

pub fn parse_domain(text: &str) -> Result<Domain, PlanningError> {
    let root = parse_sexp(text)?;
    let (name, body) = define_body(&root, "domain")?;
    let mut domain = Domain {
        name,
        types: BTreeMap::new(),
        predicates: BTreeMap::new(),
        constants: Vec::new(),
        actions: Vec::new(),
    };
    for e in body {
        let (key, rest) = section(e)?;
        match key {
            ":requirements" => {
                for r in rest {
                    let r = r.atom().ok_or_else(|| syntax(e.line(), "bad requirement"))?;
                    if !SUPPORTED.contains(&r) {
                        return Err(PlanningError::Unsupported(format!("requirement {r}")));
                    }
                }
            }
            ":types" => {
                for (t, parent) in typed_list(rest)? {
                    domain.types.insert(t, parent);
                }
            }
            ":constants" => domain.constants = typed_list(rest)?,
            ":predicates" => {
                for p in rest {
                    let items = p.list().ok_or_else(|| syntax(p.line(), "bad predicate"))?;
                    let pname = items
                        .first()
                        .and_then(Sexp::atom)
                        .ok_or_else(|| syntax(p.line(), "bad predicate"))?;
                    let params = typed_list(&items[1..])?;
                    domain
                        .predicates
                        .insert(pname.to_string(), params.into_iter().map(|(_, t)| t).collect());
                }
            }
            ":action" => domain.actions.push(parse_action(e.line(), rest)?),
            ":functions" | ":derived" | ":durative-action" => {
                return Err(PlanningError::Unsupported(key.to_string()))
            }
            other => return Err(syntax(e.line(), format!("unknown domain section `{other}`"))),
        }
    }
    check_domain(&domain)?;
    Ok(domain)
}

fn parse_action(line: usize, rest: &[Sexp]) -> Result<ActionSchema, PlanningError> {
    let name = rest
        .first()
        .and_then(Sexp::atom)
        .ok_or_else(|| syntax(line, "action without a name"))?;
    let mut action = ActionSchema {
        name: name.to_string(),
        parameters: Vec::new(),
        pre: Vec::new(),
        add: Vec::new(),
        del: Vec::new(),
    };
    let mut i = 1;
    while i < rest.len() {
        let key = rest[i]
            .atom()
            .ok_or_else(|| syntax(rest[i].line(), "expected an action keyword"))?;
        let value = rest
            .get(i + 1)
            .ok_or_else(|| syntax(rest[i].line(), format!("`{key}` without a value")))?;
        match key {
            ":parameters" => {
                let items = value.list().ok_or_else(|| syntax(value.line(), "bad parameters"))?;
                action.parameters = typed_list(items)?;
            }
            ":precondition" => action.pre = parse_conjunction(value)?,
            ":effect" => (action.add, action.del) = parse_effect(value)?,
            other => return Err(syntax(rest[i].line(), format!("unknown action keyword `{other}`"))),
        }
        i += 2;
    }
    Ok(action)
}

fn check_type(domain: &Domain, t: &str) -> Result<(), PlanningError> {
    if t == "object" || domain.types.contains_key(t) {
        Ok(())
    } else {
        Err(PlanningError::UndefinedType(t.to_string()))
    }
}

fn check_arity(domain: &Domain, atom: &AtomSchema) -> Result<(), PlanningError> {
    let params = domain
        .predicates
        .get(&atom.predicate)
        .ok_or_else(|| PlanningError::UndefinedPredicate(atom.predicate.clone()))?;
    if params.len() != atom.args.len() {
        return Err(PlanningError::ArityMismatch {
            predicate: atom.predicate.clone(),
            expected: params.len(),
            found: atom.args.len(),
        });
    }
    Ok(())
}

fn check_domain(domain: &Domain) -> Result<(), PlanningError> {
    for parent in domain.types.values() {
        check_type(domain, parent)?;
    }
    for ts in domain.predicates.values() {
        for t in ts {
            check_type(domain, t)?;
        }
    }
    for (_, t) in &domain.constants {
        check_type(domain, t)?;
    }
    for a in &domain.actions {
        for (_, t) in &a.parameters {
            check_type(domain, t)?;
        }
        for atom in a.pre.iter().chain(&a.add).chain(&a.del) {
            check_arity(domain, atom)?;
            for arg in &atom.args {
                let known = if arg.starts_with('?') {
                    a.parameters.iter().any(|(p, _)| p == arg)
                } else {
                    domain.constants.iter().any(|(c, _)| c == arg)
                };
                if !known {
                    return Err(PlanningError::UndefinedObject(format!("{arg} in action {}", a.name)));
                }
            }
        }
    }
    Ok(())
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, PlanningError> {
    let root = parse_sexp(text)?;
    let (name, body) = define_body(&root, "problem")?;
    let mut problem = Problem {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    for e in body {
        let (key, rest) = section(e)?;
        match key {
            ":domain" => {
                problem.domain = rest
                    .first()
                    .and_then(Sexp::atom)
                    .ok_or_else(|| syntax(e.line(), "bad :domain"))?
                    .to_string();
            }
            ":requirements" => {
                for r in rest {
                    let r = r.atom().ok_or_else(|| syntax(e.line(), "bad requirement"))?;
                    if !SUPPORTED.contains(&r) {
                        return Err(PlanningError::Unsupported(format!("requirement {r}")));
                    }
                }
            }
            ":objects" => problem.objects = typed_list(rest)?,
            ":init" => problem.init = rest.iter().map(parse_atom).collect::<Result<_, _>>()?,
            ":goal" => {
                let g = rest.first().ok_or_else(|| syntax(e.line(), "empty :goal"))?;
                problem.goal = parse_conjunction(g)?;
            }
            ":metric" => return Err(PlanningError::Unsupported(":metric".into())),
            other => return Err(syntax(e.line(), format!("unknown problem section `{other}`"))),
        }
    }
    if problem.domain != domain.name {
        return Err(syntax(
            root.line(),
            format!("problem is for domain `{}`, not `{}`", problem.domain, domain.name),
        ));
    }
    let objects: HashMap<&str, &str> = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|(o, t)| (o.as_str(), t.as_str()))
        .collect();
    for (_, t) in &problem.objects {
        check_type(domain, t)?;
    }
    for atom in problem.init.iter().chain(&problem.goal) {
        check_arity(domain, atom)?;
        for arg in &atom.args {
            if !objects.contains_key(arg.as_str()) {
                return Err(PlanningError::UndefinedObject(arg.clone()));
            }
        }
    }
    Ok(problem)
}

pub fn parse_pddl(domain_text: &str, problem_text: &str) -> Result<LiftedTask, PlanningError> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem(problem_text, &domain)?;
    Ok(LiftedTask { domain, problem })
}

#[cfg(test)]
mod tests {
    use super::super::testdata::{BLOCKS_DOMAIN, BLOCKS_PROBLEM_3};
    use super::*;

    #[test]
    fn blocksworld_parses() {
        let task = parse_pddl(BLOCKS_DOMAIN, BLOCKS_PROBLEM_3).unwrap();
        let names: Vec<&str> = task.domain.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["pick-up", "put-down", "stack", "unstack"]);
        assert_eq!(task.domain.predicates.len(), 5);
        assert_eq!(task.problem.objects.len(), 3);
        assert_eq!(task.problem.goal.len(), 2);
        let stack = &task.domain.actions[2];
        assert_eq!(stack.pre.len(), 2);
        assert_eq!(stack.add.len(), 3);
        assert_eq!(stack.del.len(), 2);
    }

    #[test]
    fn one_action_domain() {
        let d = parse_domain(
            "(define (domain toy) (:requirements :strips) (:predicates (g))
               (:action go :parameters () :precondition () :effect (g)))",
        )
        .unwrap();
        assert_eq!(d.actions.len(), 1);
        assert!(d.actions[0].pre.is_empty());
        assert_eq!(d.actions[0].add.len(), 1);
    }

    #[test]
    fn rejects_unsupported_features() {
        let adl = "(define (domain d) (:requirements :adl) (:predicates (p)))";
        assert!(matches!(parse_domain(adl), Err(PlanningError::Unsupported(_))));
        let neg = "(define (domain d) (:predicates (p))
                   (:action a :parameters () :precondition (not (p)) :effect (p)))";
        assert!(matches!(parse_domain(neg), Err(PlanningError::Unsupported(_))));
        let cond = "(define (domain d) (:predicates (p))
                   (:action a :parameters () :precondition () :effect (when (p) (p))))";
        assert!(matches!(parse_domain(cond), Err(PlanningError::Unsupported(_))));
    }

    #[test]
    fn rejects_bad_references() {
        let arity = "(define (domain d) (:predicates (p ?x))
                     (:action a :parameters (?x) :precondition (p ?x ?x) :effect (p ?x)))";
        assert!(matches!(
            parse_domain(arity),
            Err(PlanningError::ArityMismatch { expected: 1, found: 2, .. })
        ));
        let undefined = "(define (domain d) (:predicates (p))
                     (:action a :parameters () :precondition (q) :effect (p)))";
        assert_eq!(parse_domain(undefined), Err(PlanningError::UndefinedPredicate("q".into())));
        let ty = "(define (domain d) (:requirements :typing) (:predicates (p ?x - thing)))";
        assert_eq!(parse_domain(ty), Err(PlanningError::UndefinedType("thing".into())));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert!(matches!(
            parse_domain("(define (domain d)\n(:predicates (p)"),
            Err(PlanningError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_domain(")"), Err(PlanningError::Syntax { .. })));
    }

    #[test]
    fn case_and_comments_ignored() {
        let d = parse_domain("; header\n(DEFINE (Domain D) (:PREDICATES (P)))").unwrap();
        assert_eq!(d.name, "d");
        assert!(d.predicates.contains_key("p"));
    }

    #[test]
    fn type_hierarchy() {
        let d = parse_domain(
            "(define (domain d) (:requirements :typing) (:types block - thing thing)
               (:predicates (p ?x - thing)))",
        )
        .unwrap();
        assert!(d.is_subtype("block", "thing"));
        assert!(d.is_subtype("block", "object"));
        assert!(!d.is_subtype("thing", "block"));
    }
}
