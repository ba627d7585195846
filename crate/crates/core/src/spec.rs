//! Line-oriented text format for algebras, connections, forms and cochains.
//!
//! ```text
//! # comment
//! algebra l dim 4
//! e1 e2 -> 1 e3
//! params
//! t : positive
//! connection
//! e2 e2 -> (t+1)/4 e3
//! ```
//!
//! Blocks start with `algebra`, `params`, `connection`, `omega`, `cocycle` or
//! `ideal`; text after the keyword on the same line is read as the first
//! entry. Lines in the algebra block may carry a `bracket` prefix.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_traits::Zero;

use crate::cohomology::TwoCochain;
use crate::connection::FlatConnection;
use crate::expr::{tokenize, Assignment, EvalError, Expr, ExprError, Parser, Token};
use crate::extension::SymplecticLieAlgebra;
use crate::lie::{LieAlgebra, LieError};
use crate::linalg::{format_rational, parse_rational, RatMatrix, Rational, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub kind: SpecErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("basis index `{token}` out of range for dimension {dim}")]
    IndexOutOfRange { token: String, dim: usize },
    #[error("undeclared parameter `{0}`")]
    UndeclaredParameter(String),
    #[error("block `{0}` appears twice")]
    DuplicateBlock(String),
    #[error("missing `algebra NAME dim N` header")]
    MissingAlgebra,
}

/// `coef · b_index`, index 0-based in the block's target space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: Expr,
    pub index: usize,
}

/// `e_i e_j -> Σ terms`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    Free,
    Positive,
    Nonzero,
    PositiveNonzero,
    Excluded(Vec<Rational>),
    Greater(Rational),
    Less(Rational),
    /// Value must differ from an expression in the other parameters.
    Differs(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamSpec {
    Value(Rational),
    Constraint(Constraint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamDecl {
    pub name: String,
    pub spec: ParamSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaEntry {
    pub i: usize,
    pub j: usize,
    pub coef: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecFile {
    pub name: String,
    pub dim: usize,
    pub brackets: Vec<Cell>,
    pub params: Vec<ParamDecl>,
    pub connection: Option<Vec<Cell>>,
    pub omega: Option<Vec<OmegaEntry>>,
    /// Targets index the dual basis `e^1..e^n`.
    pub cocycle: Option<Vec<Cell>>,
    pub ideal: Option<Vec<Vec<Term>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Algebra,
    Params,
    Connection,
    Omega,
    Cocycle,
    Ideal,
}

impl Block {
    fn keyword(self) -> &'static str {
        match self {
            Block::Algebra => "algebra",
            Block::Params => "params",
            Block::Connection => "connection",
            Block::Omega => "omega",
            Block::Cocycle => "cocycle",
            Block::Ideal => "ideal",
        }
    }

    fn from_keyword(word: &str) -> Option<Block> {
        Some(match word {
            "algebra" => Block::Algebra,
            "params" => Block::Params,
            "connection" => Block::Connection,
            "omega" => Block::Omega,
            "cocycle" => Block::Cocycle,
            "ideal" => Block::Ideal,
            _ => return None,
        })
    }
}

/// A duplicated `(i, j)` cell with every value it was given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub i: usize,
    pub j: usize,
    pub values: Vec<String>,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(e{},e{}) assigned {}", self.i + 1, self.j + 1, self.values.join(" and "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("conflicting assignments: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Conflict(Vec<Conflict>),
    #[error("file has no {0} block")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

struct LineCtx<'a> {
    line: usize,
    /// Char offset of `text` within the physical line.
    offset: usize,
    text: &'a str,
}

impl LineCtx<'_> {
    fn err(&self, column: usize, kind: SpecErrorKind) -> SpecError {
        SpecError {
            line: self.line,
            column: self.offset + column,
            kind,
        }
    }

    fn syntax(&self, column: usize, msg: impl Into<String>) -> SpecError {
        self.err(column, SpecErrorKind::Syntax(msg.into()))
    }

    fn expr_err(&self, e: ExprError) -> SpecError {
        self.err(e.column, SpecErrorKind::Syntax(e.message))
    }
}

/// How basis tokens in a slot map to indices.
#[derive(Clone, Copy)]
enum Slot {
    /// `e_k` in `1..=dim`, or `e^k` as `dim/2 + k` when `dim` is even.
    Ambient(usize),
    /// Only `e^k`, `k` in `1..=dim`.
    Dual(usize),
}

fn resolve(ctx: &LineCtx, col: usize, index: usize, dual: bool, slot: Slot) -> Result<usize, SpecError> {
    let token = if dual { format!("e^{index}") } else { format!("e{index}") };
    let (ok, base, dim) = match slot {
        Slot::Ambient(dim) if !dual => (index >= 1 && index <= dim, 0, dim),
        Slot::Ambient(dim) => (dim % 2 == 0 && index >= 1 && index <= dim / 2, dim / 2, dim),
        Slot::Dual(dim) if dual => (index >= 1 && index <= dim, 0, dim),
        Slot::Dual(_) => {
            return Err(ctx.syntax(col, format!("expected a dual basis vector `e^k`, found `{token}`")))
        }
    };
    if !ok {
        return Err(ctx.err(col, SpecErrorKind::IndexOutOfRange { token, dim }));
    }
    Ok(base + index - 1)
}

fn basis_token(p: &mut Parser, ctx: &LineCtx, slot: Slot) -> Result<usize, SpecError> {
    let col = p.column();
    match p.next() {
        Some(Token::Basis { index, dual }) => resolve(ctx, col, index, dual, slot),
        _ => Err(ctx.syntax(col, "expected a basis vector")),
    }
}

/// `coef tok (+|- coef tok)*` until end of line.
fn terms(p: &mut Parser, ctx: &LineCtx, slot: Slot) -> Result<Vec<Term>, SpecError> {
    let mut out = Vec::new();
    let mut negate = false;
    loop {
        let coef = p.expr().map_err(|e| ctx.expr_err(e))?;
        let coef = if negate { negated(coef) } else { coef };
        let index = basis_token(p, ctx, slot)?;
        out.push(Term { coef, index });
        match p.peek() {
            None => return Ok(out),
            Some(Token::Op('+')) => negate = false,
            Some(Token::Op('-')) => negate = true,
            _ => return Err(ctx.syntax(p.column(), "expected `+`, `-` or end of line")),
        }
        p.next();
    }
}

fn negated(e: Expr) -> Expr {
    match e {
        Expr::Num(r) => Expr::Num(-r),
        other => Expr::Neg(Box::new(other)),
    }
}

fn cell(ctx: &LineCtx, left: Slot, right: Slot) -> Result<Cell, SpecError> {
    let tokens = tokenize(ctx.text).map_err(|e| ctx.expr_err(e))?;
    let arrow = arrow_position(&tokens).ok_or_else(|| ctx.syntax(1, "expected `X Y -> ...`"))?;
    let mut p = Parser::new(&tokens[..arrow], ctx.text.chars().count());
    let i = basis_token(&mut p, ctx, left)?;
    let j = basis_token(&mut p, ctx, left)?;
    if !p.at_end() {
        return Err(ctx.syntax(p.column(), "expected `->`"));
    }
    if i == j {
        return Err(ctx.syntax(1, "a cell needs two different basis vectors"));
    }
    let mut p = Parser::new(&tokens[arrow + 1..], ctx.text.chars().count());
    let terms = terms(&mut p, ctx, right)?;
    Ok(Cell { i, j, terms })
}

fn connection_cell(ctx: &LineCtx, dim: usize) -> Result<Cell, SpecError> {
    let tokens = tokenize(ctx.text).map_err(|e| ctx.expr_err(e))?;
    let arrow = arrow_position(&tokens).ok_or_else(|| ctx.syntax(1, "expected `X Y -> ...`"))?;
    let mut p = Parser::new(&tokens[..arrow], ctx.text.chars().count());
    let i = basis_token(&mut p, ctx, Slot::Ambient(dim))?;
    let j = basis_token(&mut p, ctx, Slot::Ambient(dim))?;
    if !p.at_end() {
        return Err(ctx.syntax(p.column(), "expected `->`"));
    }
    let mut p = Parser::new(&tokens[arrow + 1..], ctx.text.chars().count());
    let terms = terms(&mut p, ctx, Slot::Ambient(dim))?;
    Ok(Cell { i, j, terms })
}

fn arrow_position(tokens: &[(usize, Token)]) -> Option<usize> {
    tokens.iter().position(|(_, t)| *t == Token::Arrow)
}

fn omega_entry(ctx: &LineCtx, dim: usize) -> Result<OmegaEntry, SpecError> {
    let tokens = tokenize(ctx.text).map_err(|e| ctx.expr_err(e))?;
    let arrow = arrow_position(&tokens).ok_or_else(|| ctx.syntax(1, "expected `X Y -> coef`"))?;
    let mut p = Parser::new(&tokens[..arrow], ctx.text.chars().count());
    let i = basis_token(&mut p, ctx, Slot::Ambient(dim))?;
    let j = basis_token(&mut p, ctx, Slot::Ambient(dim))?;
    if i == j {
        return Err(ctx.syntax(1, "ω vanishes on the diagonal"));
    }
    let mut p = Parser::new(&tokens[arrow + 1..], ctx.text.chars().count());
    let coef = p.expr().map_err(|e| ctx.expr_err(e))?;
    if !p.at_end() {
        return Err(ctx.syntax(p.column(), "trailing input"));
    }
    Ok(OmegaEntry { i, j, coef })
}

fn ideal_vector(ctx: &LineCtx, dim: usize) -> Result<Vec<Term>, SpecError> {
    let tokens = tokenize(ctx.text).map_err(|e| ctx.expr_err(e))?;
    let mut p = Parser::new(&tokens, ctx.text.chars().count());
    terms(&mut p, ctx, Slot::Ambient(dim))
}

/// Comma-separated vectors such as `e^1, e^2` or `1 e1 - 2 e^3`, with `e^k`
/// read as `dim/2 + k`. Line 1, columns count from the start of `text`.
pub fn parse_vector_list(text: &str, dim: usize) -> Result<Vec<Vector>, SpecError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let lead = item.chars().take_while(|c| c.is_whitespace()).count();
        let ctx = LineCtx {
            line: 1,
            offset: offset + lead,
            text: item.trim(),
        };
        offset += item.chars().count() + 1;
        let tokens = tokenize(ctx.text).map_err(|e| ctx.expr_err(e))?;
        if let [(col, Token::Basis { index, dual })] = tokens.as_slice() {
            let k = resolve(&ctx, col + 1, *index, *dual, Slot::Ambient(dim))?;
            out.push(crate::linalg::unit(dim, k));
            continue;
        }
        let terms = ideal_vector(&ctx, dim)?;
        out.push(terms_vector(dim, &terms, &Assignment::new()).map_err(|e| ctx.syntax(1, e.to_string()))?);
    }
    Ok(out)
}

fn param_decl(ctx: &LineCtx) -> Result<ParamDecl, SpecError> {
    let text = ctx.text;
    let (sep_pos, sep) = text
        .char_indices()
        .find(|(_, c)| *c == '=' || *c == ':')
        .ok_or_else(|| ctx.syntax(1, "expected `name = value` or `name : constraint`"))?;
    let name = text[..sep_pos].trim();
    if !is_identifier(name) {
        return Err(ctx.syntax(1, format!("invalid parameter name `{name}`")));
    }
    let rest = &text[sep_pos + 1..];
    let rest_col = text[..sep_pos + 1].chars().count() + 1 + (rest.len() - rest.trim_start().len());
    let rest = rest.trim();
    let spec = if sep == '=' {
        ParamSpec::Value(parse_rational(rest).map_err(|e| ctx.syntax(rest_col, e.0))?)
    } else {
        ParamSpec::Constraint(constraint(ctx, rest, rest_col)?)
    };
    Ok(ParamDecl {
        name: name.to_string(),
        spec,
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let starts = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_');
    let is_basis = s.strip_prefix('e').is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()));
    starts && chars.all(|c| c.is_alphanumeric() || c == '_') && !is_basis && s != "e"
}

fn constraint(ctx: &LineCtx, text: &str, col: usize) -> Result<Constraint, SpecError> {
    let (word, arg) = match text.split_once(char::is_whitespace) {
        Some((w, a)) => (w, a.trim()),
        None => (text, ""),
    };
    let arg_col = col + text.len() - arg.len();
    let rational = |s: &str| parse_rational(s.trim()).map_err(|e| ctx.syntax(arg_col, e.0));
    let bare = |c: Constraint| {
        if arg.is_empty() {
            Ok(c)
        } else {
            Err(ctx.syntax(arg_col, format!("`{word}` takes no argument")))
        }
    };
    match word {
        "free" => bare(Constraint::Free),
        "positive" => bare(Constraint::Positive),
        "nonzero" => bare(Constraint::Nonzero),
        "positive_nonzero" => bare(Constraint::PositiveNonzero),
        "excluded" => {
            let values = arg.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
            Ok(Constraint::Excluded(values))
        }
        "greater" => Ok(Constraint::Greater(rational(arg)?)),
        "less" => Ok(Constraint::Less(rational(arg)?)),
        "differs" => {
            let e = crate::expr::parse_expr(arg).map_err(|e| ctx.syntax(arg_col + e.column - 1, e.message))?;
            Ok(Constraint::Differs(e))
        }
        _ => Err(ctx.syntax(col, format!("unknown constraint `{word}`"))),
    }
}

/// Strips comments and returns `(line number, text)` for nonblank lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((n + 1, line))
    })
}

/// Parses a single document.
pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    parse_lines(content_lines(text).collect())
}

/// Parses a file holding several documents, each starting at an `algebra`
/// header. Line numbers refer to the whole file.
pub fn parse_documents(text: &str) -> Result<Vec<SpecFile>, SpecError> {
    let mut groups: Vec<Vec<(usize, &str)>> = Vec::new();
    for (n, line) in content_lines(text) {
        if line.split_whitespace().next() == Some("algebra") || groups.is_empty() {
            groups.push(Vec::new());
        }
        groups.last_mut().expect("pushed above").push((n, line));
    }
    groups.into_iter().map(parse_lines).collect()
}

fn parse_lines(lines: Vec<(usize, &str)>) -> Result<SpecFile, SpecError> {
    let mut spec = SpecFile::default();
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();
    let mut block: Option<Block> = None;
    let mut locations: Vec<(usize, usize, Expr)> = Vec::new();

    for (line_no, raw) in lines {
        let indent = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        let first = trimmed.split_whitespace().next().unwrap_or("");
        let mut ctx = LineCtx {
            line: line_no,
            offset: raw[..indent].chars().count(),
            text: trimmed,
        };

        if let Some(b) = Block::from_keyword(first) {
            if !seen.insert(b.keyword()) {
                return Err(ctx.err(1, SpecErrorKind::DuplicateBlock(b.keyword().into())));
            }
            if b != Block::Algebra && block.is_none() {
                return Err(ctx.err(1, SpecErrorKind::MissingAlgebra));
            }
            block = Some(b);
            let rest = trimmed[first.len()..].trim_start();
            let skipped = trimmed.len() - rest.len();
            ctx.offset += trimmed[..skipped].chars().count();
            ctx.text = rest;
            match b {
                Block::Algebra => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    match words.as_slice() {
                        [name, "dim", d] => {
                            spec.name = name.to_string();
                            spec.dim = d.parse().map_err(|_| ctx.syntax(1, format!("bad dimension `{d}`")))?;
                        }
                        _ => return Err(ctx.syntax(1, "expected `algebra NAME dim N`")),
                    }
                    continue;
                }
                Block::Connection => spec.connection = Some(Vec::new()),
                Block::Omega => spec.omega = Some(Vec::new()),
                Block::Cocycle => spec.cocycle = Some(Vec::new()),
                Block::Ideal => spec.ideal = Some(Vec::new()),
                Block::Params => {}
            }
            if rest.is_empty() {
                continue;
            }
        }

        let Some(b) = block else {
            return Err(ctx.err(1, SpecErrorKind::MissingAlgebra));
        };
        let dim = spec.dim;
        match b {
            Block::Algebra => {
                if let Some(rest) = ctx.text.strip_prefix("bracket") {
                    let skip = ctx.text.len() - rest.trim_start().len();
                    ctx.offset += skip;
                    ctx.text = rest.trim_start();
                }
                let c = cell(&ctx, Slot::Ambient(dim), Slot::Ambient(dim))?;
                record_exprs(&mut locations, &ctx, c.terms.iter().map(|t| &t.coef));
                spec.brackets.push(c);
            }
            Block::Params => {
                let decl = param_decl(&ctx)?;
                if let ParamSpec::Constraint(Constraint::Differs(e)) = &decl.spec {
                    record_exprs(&mut locations, &ctx, std::iter::once(e));
                }
                spec.params.push(decl);
            }
            Block::Connection => {
                let c = connection_cell(&ctx, dim)?;
                record_exprs(&mut locations, &ctx, c.terms.iter().map(|t| &t.coef));
                spec.connection.as_mut().expect("opened").push(c);
            }
            Block::Omega => {
                let e = omega_entry(&ctx, dim)?;
                record_exprs(&mut locations, &ctx, std::iter::once(&e.coef));
                spec.omega.as_mut().expect("opened").push(e);
            }
            Block::Cocycle => {
                let c = cell(&ctx, Slot::Ambient(dim), Slot::Dual(dim))?;
                record_exprs(&mut locations, &ctx, c.terms.iter().map(|t| &t.coef));
                spec.cocycle.as_mut().expect("opened").push(c);
            }
            Block::Ideal => {
                let v = ideal_vector(&ctx, dim)?;
                record_exprs(&mut locations, &ctx, v.iter().map(|t| &t.coef));
                spec.ideal.as_mut().expect("opened").push(v);
            }
        }
    }
    if block.is_none() {
        return Err(SpecError {
            line: 1,
            column: 1,
            kind: SpecErrorKind::MissingAlgebra,
        });
    }

    let declared: BTreeSet<&str> = spec.params.iter().map(|p| p.name.as_str()).collect();
    for (line, column, e) in &locations {
        if let Some(v) = e.variables().into_iter().find(|v| !declared.contains(v.as_str())) {
            return Err(SpecError {
                line: *line,
                column: *column,
                kind: SpecErrorKind::UndeclaredParameter(v),
            });
        }
    }
    Ok(spec)
}

fn record_exprs<'a>(
    out: &mut Vec<(usize, usize, Expr)>,
    ctx: &LineCtx,
    exprs: impl Iterator<Item = &'a Expr>,
) {
    for e in exprs {
        if !e.variables().is_empty() {
            out.push((ctx.line, ctx.offset + 1, e.clone()));
        }
    }
}

impl SpecFile {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        SpecFile {
            name: name.into(),
            dim,
            ..Default::default()
        }
    }

    /// Fixed parameter values (`t = 1/3`).
    pub fn fixed_values(&self) -> Assignment {
        self.params
            .iter()
            .filter_map(|p| match &p.spec {
                ParamSpec::Value(v) => Some((p.name.clone(), v.clone())),
                ParamSpec::Constraint(_) => None,
            })
            .collect()
    }

    fn token(&self, index: usize) -> String {
        if self.omega.is_some() && self.dim.is_multiple_of(2) && index >= self.dim / 2 {
            format!("e^{}", index - self.dim / 2 + 1)
        } else {
            format!("e{}", index + 1)
        }
    }

    fn write_terms(&self, out: &mut String, terms: &[Term], dual: bool) {
        let parts: Vec<String> = terms
            .iter()
            .map(|t| {
                let tok = if dual { format!("e^{}", t.index + 1) } else { self.token(t.index) };
                format!("{} {}", t.coef, tok)
            })
            .collect();
        out.push_str(&parts.join(" + "));
    }

    fn write_cells(&self, out: &mut String, cells: &[Cell], dual: bool) {
        for c in cells {
            let _ = write!(out, "{} {} -> ", self.token(c.i), self.token(c.j));
            self.write_terms(out, &c.terms, dual);
            out.push('\n');
        }
    }

    /// Canonical text; `parse_spec(serialize(s)) == s`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "algebra {} dim {}", self.name, self.dim);
        self.write_cells(&mut out, &self.brackets, false);
        if !self.params.is_empty() {
            out.push_str("params\n");
            for p in &self.params {
                match &p.spec {
                    ParamSpec::Value(v) => {
                        let _ = writeln!(out, "{} = {}", p.name, format_rational(v));
                    }
                    ParamSpec::Constraint(c) => {
                        let _ = writeln!(out, "{} : {}", p.name, c);
                    }
                }
            }
        }
        if let Some(cells) = &self.connection {
            out.push_str("connection\n");
            self.write_cells(&mut out, cells, false);
        }
        if let Some(entries) = &self.omega {
            out.push_str("omega\n");
            for e in entries {
                let _ = writeln!(out, "{} {} -> {}", self.token(e.i), self.token(e.j), e.coef);
            }
        }
        if let Some(cells) = &self.cocycle {
            out.push_str("cocycle\n");
            self.write_cells(&mut out, cells, true);
        }
        if let Some(vectors) = &self.ideal {
            out.push_str("ideal\n");
            for v in vectors {
                self.write_terms(&mut out, v, false);
                out.push('\n');
            }
        }
        out
    }

    pub fn algebra(&self, env: &Assignment) -> Result<LieAlgebra, BuildError> {
        let tensor = cells_tensor(self.dim, self.dim, &self.brackets, env, true)?;
        Ok(LieAlgebra::from_tensor(self.name.clone(), self.dim, tensor)?)
    }

    /// Duplicated `(i, j)` cells of the connection block.
    pub fn connection_conflicts(&self) -> Vec<Conflict> {
        self.connection.as_deref().map(|c| conflicts(c, self)).unwrap_or_default()
    }

    pub fn connection(&self, env: &Assignment) -> Result<FlatConnection, BuildError> {
        let cells = self.connection.as_ref().ok_or(BuildError::Missing("connection"))?;
        let found = conflicts(cells, self);
        if !found.is_empty() {
            return Err(BuildError::Conflict(found));
        }
        let gamma = cells_tensor(self.dim, self.dim, cells, env, false)?;
        let base = self.algebra(env)?;
        let params = self
            .params
            .iter()
            .filter_map(|p| env.get(&p.name).map(|v| (p.name.clone(), v.clone())))
            .collect();
        FlatConnection::new(base, gamma)
            .map(|c| c.with_params(params))
            .map_err(|e| BuildError::Invalid(e.to_string()))
    }

    pub fn cocycle(&self, env: &Assignment) -> Result<TwoCochain, BuildError> {
        let cells = self.cocycle.as_ref().ok_or(BuildError::Missing("cocycle"))?;
        let tensor = cells_tensor(self.dim, self.dim, cells, env, true)?;
        TwoCochain::from_tensor(self.dim, tensor).map_err(|e| BuildError::Invalid(e.to_string()))
    }

    pub fn omega(&self, env: &Assignment) -> Result<RatMatrix, BuildError> {
        let entries = self.omega.as_ref().ok_or(BuildError::Missing("omega"))?;
        let n = self.dim;
        let mut m = RatMatrix::zeros(n, n);
        for e in entries {
            let v = e.coef.eval(env)?;
            m[(e.i, e.j)] += &v;
            m[(e.j, e.i)] -= &v;
        }
        Ok(m)
    }

    pub fn ideal(&self, env: &Assignment) -> Result<Subspace, BuildError> {
        let vectors = self.ideal.as_ref().ok_or(BuildError::Missing("ideal"))?;
        let vs = vectors
            .iter()
            .map(|terms| terms_vector(self.dim, terms, env))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subspace::span(self.dim, &vs))
    }

    pub fn symplectic(&self, env: &Assignment) -> Result<SymplecticLieAlgebra, BuildError> {
        let mut s = SymplecticLieAlgebra::new(self.algebra(env)?, self.omega(env)?);
        if self.ideal.is_some() {
            s.lagrangian_ideal = Some(self.ideal(env)?);
        }
        Ok(s)
    }

    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        let mut spec = SpecFile::new(alg.name(), n);
        spec.brackets = tensor_cells(n, n, alg.tensor(), true);
        spec
    }

    pub fn from_connection(conn: &FlatConnection) -> Self {
        let mut spec = Self::from_algebra(conn.base());
        spec.params = conn
            .params()
            .iter()
            .map(|(name, v)| ParamDecl {
                name: name.clone(),
                spec: ParamSpec::Value(v.clone()),
            })
            .collect();
        spec.connection = Some(tensor_cells(conn.dim(), conn.dim(), conn.gamma(), false));
        spec
    }

    pub fn with_cocycle(mut self, alpha: &TwoCochain) -> Self {
        self.cocycle = Some(tensor_cells(alpha.dim(), alpha.dim(), alpha.tensor(), true));
        self
    }

    pub fn from_symplectic(s: &SymplecticLieAlgebra) -> Self {
        let m = s.dim();
        let mut spec = Self::from_algebra(&s.algebra);
        let mut entries = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let v = &s.omega[(i, j)];
                if !v.is_zero() {
                    entries.push(OmegaEntry {
                        i,
                        j,
                        coef: Expr::Num(v.clone()),
                    });
                }
            }
        }
        spec.omega = Some(entries);
        spec.ideal = s.lagrangian_ideal.as_ref().map(|j| {
            j.basis()
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(index, x)| Term {
                            coef: Expr::Num(x.clone()),
                            index,
                        })
                        .collect()
                })
                .collect()
        });
        spec
    }
}

fn conflicts(cells: &[Cell], spec: &SpecFile) -> Vec<Conflict> {
    let mut out: Vec<Conflict> = Vec::new();
    for (p, c) in cells.iter().enumerate() {
        if out.iter().any(|d| (d.i, d.j) == (c.i, c.j)) {
            continue;
        }
        let same: Vec<&Cell> = cells[p..].iter().filter(|d| (d.i, d.j) == (c.i, c.j)).collect();
        if same.len() > 1 {
            out.push(Conflict {
                i: c.i,
                j: c.j,
                values: same
                    .iter()
                    .map(|d| {
                        let mut s = String::new();
                        spec.write_terms(&mut s, &d.terms, false);
                        s
                    })
                    .collect(),
            });
        }
    }
    out
}

fn terms_vector(dim: usize, terms: &[Term], env: &Assignment) -> Result<Vector, EvalError> {
    let mut v = vec![Rational::zero(); dim];
    for t in terms {
        v[t.index] += t.coef.eval(env)?;
    }
    Ok(v)
}

/// Dense `dim × dim × target` tensor from cells; with `antisymmetric`
/// each cell also sets its `(j, i)` partner.
fn cells_tensor(
    dim: usize,
    target: usize,
    cells: &[Cell],
    env: &Assignment,
    antisymmetric: bool,
) -> Result<Vec<Rational>, BuildError> {
    let mut t = vec![Rational::zero(); dim * dim * target];
    for c in cells {
        let v = terms_vector(target, &c.terms, env)?;
        for (k, x) in v.into_iter().enumerate() {
            if antisymmetric {
                t[(c.j * dim + c.i) * target + k] -= &x;
            }
            t[(c.i * dim + c.j) * target + k] += x;
        }
    }
    Ok(t)
}

fn tensor_cells(dim: usize, target: usize, t: &[Rational], antisymmetric: bool) -> Vec<Cell> {
    let mut out = Vec::new();
    for i in 0..dim {
        let start = if antisymmetric { i + 1 } else { 0 };
        for j in start..dim {
            let terms: Vec<Term> = (0..target)
                .filter_map(|k| {
                    let v = &t[(i * dim + j) * target + k];
                    (!v.is_zero()).then(|| Term {
                        coef: Expr::Num(v.clone()),
                        index: k,
                    })
                })
                .collect();
            if !terms.is_empty() {
                out.push(Cell { i, j, terms });
            }
        }
    }
    out
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Free => f.write_str("free"),
            Constraint::Positive => f.write_str("positive"),
            Constraint::Nonzero => f.write_str("nonzero"),
            Constraint::PositiveNonzero => f.write_str("positive_nonzero"),
            Constraint::Excluded(vs) => {
                let list: Vec<String> = vs.iter().map(format_rational).collect();
                write!(f, "excluded {}", list.join(", "))
            }
            Constraint::Greater(r) => write!(f, "greater {}", format_rational(r)),
            Constraint::Less(r) => write!(f, "less {}", format_rational(r)),
            Constraint::Differs(e) => write!(f, "differs {e}"),
        }
    }
}
