use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    NonNegative,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<S> {
    pub name: String,
    pub terms: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn lhs(&self, x: &[S]) -> S {
        self.terms
            .iter()
            .fold(S::zero(), |acc, (j, c)| acc + c.clone() * x[*j].clone())
    }

    /// Signed slack: non-negative iff the constraint holds.
    pub fn slack(&self, x: &[S]) -> S {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Ge => lhs - self.rhs.clone(),
            Relation::Le => self.rhs.clone() - lhs,
            Relation::Eq => -(lhs - self.rhs.clone()).abs(),
        }
    }
}

/// A linear program over named variables with dense objective and sparse
/// constraint rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<S> {
    sense: Sense,
    names: Vec<String>,
    bounds: Vec<Bound>,
    objective: Vec<S>,
    constraints: Vec<Constraint<S>>,
    index: HashMap<String, usize>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            names: Vec::new(),
            bounds: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        bound: Bound,
        cost: S,
    ) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::InvalidParameter(format!(
                "duplicate variable `{name}`"
            )));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.bounds.push(bound);
        self.objective.push(cost);
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, S)>,
        relation: Relation,
        rhs: S,
    ) -> Result<()> {
        let name = name.into();
        if let Some((j, _)) = terms.iter().find(|(j, _)| *j >= self.names.len()) {
            return Err(Error::InvalidParameter(format!(
                "constraint `{name}` references undeclared variable {j}"
            )));
        }
        self.constraints.push(Constraint {
            name,
            terms,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn objective(&self) -> &[S] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn evaluate(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// Names of the constraints (and bounds) violated by more than `tol`.
    pub fn violations(&self, x: &[S], tol: &S) -> Vec<String> {
        let neg_tol = -tol.clone();
        let mut out: Vec<String> = self
            .bounds
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(_, (b, v))| **b == Bound::NonNegative && **v < neg_tol)
            .map(|(j, _)| format!("{} >= 0", self.names[j]))
            .collect();
        out.extend(
            self.constraints
                .iter()
                .filter(|c| c.slack(x) < neg_tol)
                .map(|c| c.name.clone()),
        );
        out
    }

    /// Deterministic text form. The first line is the objective, the second
    /// lists every variable in index order, an optional `free:` line names
    /// the unbounded ones, and each further line is one constraint.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let head = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let obj: Vec<(usize, S)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect();
        let _ = writeln!(out, "{head}: {}", self.render_terms(&obj));
        let _ = writeln!(out, "vars: {}", self.names.join(" "));
        let free: Vec<&str> = self
            .names
            .iter()
            .zip(&self.bounds)
            .filter(|(_, b)| **b == Bound::Free)
            .map(|(n, _)| n.as_str())
            .collect();
        if !free.is_empty() {
            let _ = writeln!(out, "free: {}", free.join(" "));
        }
        for c in &self.constraints {
            let _ = writeln!(
                out,
                "{}: {} {} {}",
                c.name,
                self.render_terms(&c.terms),
                c.relation.symbol(),
                c.rhs.to_exact_text()
            );
        }
        out
    }

    fn render_terms(&self, terms: &[(usize, S)]) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .iter()
            .map(|(j, c)| format!("{}*{}", c.to_exact_text(), self.names[*j]))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let (ln, first) = lines
            .next()
            .ok_or_else(|| err(0, "empty document".into()))?;
        let (head, obj_text) = first
            .split_once(':')
            .ok_or_else(|| err(ln, "missing objective".into()))?;
        let sense = match head.trim() {
            "min" => Sense::Minimize,
            "max" => Sense::Maximize,
            other => return Err(err(ln, format!("unknown sense `{other}`"))),
        };
        let mut lp = LinearProgram::new(sense);
        let (ln_vars, vars) = lines
            .next()
            .ok_or_else(|| err(ln + 1, "missing vars line".into()))?;
        let vars = vars
            .strip_prefix("vars:")
            .ok_or_else(|| err(ln_vars, "expected `vars:`".into()))?;
        for name in vars.split_whitespace() {
            lp.add_variable(name, Bound::NonNegative, S::zero())
                .map_err(|e| err(ln_vars, e.to_string()))?;
        }
        for (j, c) in lp.parse_terms(obj_text).map_err(|m| err(ln, m))? {
            lp.objective[j] = c;
        }
        for (ln, line) in lines {
            if let Some(free) = line.strip_prefix("free:") {
                for name in free.split_whitespace() {
                    let j = lp
                        .variable(name)
                        .ok_or_else(|| err(ln, format!("unknown variable `{name}`")))?;
                    lp.bounds[j] = Bound::Free;
                }
                continue;
            }
            let (name, body) = line
                .split_once(": ")
                .ok_or_else(|| err(ln, "expected `name: ...`".into()))?;
            let (lhs, relation, rhs) = [
                (" >= ", Relation::Ge),
                (" <= ", Relation::Le),
                (" = ", Relation::Eq),
            ]
            .into_iter()
            .find_map(|(sym, rel)| body.rsplit_once(sym).map(|(l, r)| (l, rel, r)))
            .ok_or_else(|| err(ln, "missing relation".into()))?;
            let terms = lp.parse_terms(lhs).map_err(|m| err(ln, m))?;
            let rhs = S::parse_exact_text(rhs).map_err(|e| err(ln, e.to_string()))?;
            lp.add_constraint(name.trim(), terms, relation, rhs)?;
        }
        Ok(lp)
    }

    fn parse_terms(&self, text: &str) -> std::result::Result<Vec<(usize, S)>, String> {
        let text = text.trim();
        if text == "0" {
            return Ok(Vec::new());
        }
        text.split(" + ")
            .map(|term| {
                let (coef, name) = term
                    .trim()
                    .split_once('*')
                    .ok_or_else(|| format!("bad term `{term}`"))?;
                let j = self
                    .variable(name)
                    .ok_or_else(|| format!("unknown variable `{name}`"))?;
                let c = S::parse_exact_text(coef).map_err(|e| e.to_string())?;
                Ok((j, c))
            })
            .collect()
    }
}
