//! CNF formulas in DIMACS form and their AND/NOT circuits.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("missing problem line")]
    MissingProblemLine,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: literal {literal} out of range for {vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        vars: usize,
    },
}

/// Clauses of signed 1-based variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, CnfError> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::Parse {
                    line: i + 1,
                    message: "empty clause".into(),
                });
            }
            if let Some(&l) = clause
                .iter()
                .find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars)
            {
                return Err(CnfError::LiteralOutOfRange {
                    line: i + 1,
                    literal: l.into(),
                    vars: num_vars,
                });
            }
        }
        Ok(Self { num_vars, clauses })
    }

    /// `assignment[v - 1]` is the value of variable `v`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Every satisfying assignment, in binary counting order.
    pub fn satisfying(&self) -> Vec<Vec<bool>> {
        assert!(self.num_vars <= 20, "too many variables to enumerate");
        (0u32..1 << self.num_vars)
            .map(|m| {
                (0..self.num_vars)
                    .map(|v| m >> v & 1 == 1)
                    .collect::<Vec<_>>()
            })
            .filter(|a| self.eval(a))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = i + 1;
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let bad = || CnfError::Parse {
                line: ln,
                message: "malformed problem line".into(),
            };
            if header.is_some() || toks.len() != 3 || toks[0] != "cnf" {
                return Err(bad());
            }
            let n = toks[1].parse().map_err(|_| bad())?;
            let m = toks[2].parse().map_err(|_| bad())?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or(CnfError::MissingProblemLine)?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| CnfError::Parse {
                line: ln,
                message: format!("malformed literal {tok:?}"),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(CnfError::Parse {
                        line: ln,
                        message: "empty clause".into(),
                    });
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(CnfError::LiteralOutOfRange {
                    line: ln,
                    literal: lit,
                    vars: n,
                });
            } else {
                current.push(lit as i32);
            }
        }
    }
    let (n, _) = header.ok_or(CnfError::MissingProblemLine)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    CnfFormula::new(n, clauses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Input(usize),
    Not(usize),
    And(usize, usize),
    /// Only for a formula without clauses.
    Const(bool),
}

/// Nodes refer to earlier nodes only; `output` is the single result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub num_vars: usize,
    pub nodes: Vec<Node>,
    pub output: usize,
}

impl Circuit {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        let mut vals: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Input(x) => assignment[x - 1],
                Node::Not(a) => !vals[a],
                Node::And(a, b) => vals[a] && vals[b],
                Node::Const(b) => b,
            };
            vals.push(v);
        }
        vals[self.output]
    }

    fn push(&mut self, node: Node) -> usize {
        if let Some(i) = self.nodes.iter().position(|n| *n == node) {
            return i;
        }
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn negate(&mut self, a: usize) -> usize {
        match self.nodes[a] {
            Node::Not(inner) => inner,
            _ => self.push(Node::Not(a)),
        }
    }

    /// Leaves of a left-deep AND chain rooted at `root`, in order.
    pub fn and_leaves(&self, root: usize) -> Vec<usize> {
        match self.nodes[root] {
            Node::And(a, b) => {
                let mut v = self.and_leaves(a);
                v.push(b);
                v
            }
            _ => vec![root],
        }
    }
}

/// Output is an AND chain over clauses; each clause is NOT(AND over the
/// negated literals), with double negations folded away.
pub fn cnf_to_circuit(f: &CnfFormula) -> Circuit {
    let mut c = Circuit {
        num_vars: f.num_vars,
        nodes: Vec::new(),
        output: 0,
    };
    if f.clauses.is_empty() {
        c.output = c.push(Node::Const(true));
        return c;
    }
    let mut clause_nodes = Vec::new();
    for clause in &f.clauses {
        let negated: Vec<usize> = clause
            .iter()
            .map(|&l| {
                let x = c.push(Node::Input(l.unsigned_abs() as usize));
                if l > 0 {
                    c.negate(x)
                } else {
                    x
                }
            })
            .collect();
        let inner = c.chain_fresh(&negated);
        clause_nodes.push(c.negate(inner));
    }
    c.output = c.chain_fresh(&clause_nodes);
    c
}

impl Circuit {
    /// Like `chain`, but every AND node is new so that each clause keeps its
    /// own gates.
    fn chain_fresh(&mut self, items: &[usize]) -> usize {
        let mut acc = items[0];
        for &x in &items[1..] {
            self.nodes.push(Node::And(acc, x));
            acc = self.nodes.len() - 1;
        }
        acc
    }
}
