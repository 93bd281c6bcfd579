//! Text format for circuits, matrix products, branching programs,
//! formulas, algebras, and polynomials.
//!
//! A document is a sequence of `;`-terminated statements. `#` starts a
//! line comment. The first two statements are always
//!
//! ```text
//! field 101;
//! kind sps;
//! ```
//!
//! followed by kind-specific statements:
//!
//! * `poly`: one `poly 3*x1^2*x2 + z + 7;` statement.
//! * `sps`: one `summand <linear> | <linear> | ...;` per summand.
//! * `seq`: `k 2;`, one `matrix e11 | e12 | e21 | e22;` per factor
//!   (row-major), optional `lmask`/`rmask` with `k*k` scalars.
//! * `abp`: `levels 1 2 2 1;`, then `edge <gap> <from> <to> : <linear>;`
//!   per edge (all indices 0-based; labels must be homogeneous).
//! * `formula`: one `formula (mul (add x1 x2) 3*x3);` statement in
//!   parenthesized prefix form; leaves are `7`, `x2`, or `7*x2`.
//! * `algebra`: `dim k;`, `identity c1 .. ck;`, one `mul i j : c1 .. ck;`
//!   per basis pair, then optionally `vars n;` and one
//!   `term <k coords> | <k coords> | ...;` per product term (`n+1`
//!   coordinate groups: constant slot first).
//! * `lowered`: `source n=2 d=2 s=1 zero=0;`, a 2x2 `seq` body without
//!   masks, and a final `L <linear> | ...;` (or `L;` when empty).
//!
//! Numbers are canonical residues; the renderer never emits `-`, but the
//! parser accepts it. Rendering then parsing reproduces every structure
//! exactly, and rendering is deterministic.

use crate::algebra::{AlgebraBasis, AlgebraElement, AlgebraTermCircuit};
use crate::circuit::{
    Abp, AbpEdge, DepthThreeCircuit, Formula, FormulaNode, LinearMatrix, LinearMatrixSequence,
};
use crate::error::Error;
use crate::field::Field;
use crate::poly::{LinearFunction, Monomial, SparsePoly, Z_VAR};
use crate::transforms::LoweredU2;

/// A parsed artifact: the coefficient field plus one payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub field: Field,
    pub body: DocBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocBody {
    Poly(SparsePoly),
    Sps(DepthThreeCircuit),
    Seq(LinearMatrixSequence),
    Abp(Abp),
    Formula(Formula),
    Algebra { basis: AlgebraBasis, circuit: Option<AlgebraTermCircuit> },
    Lowered(LoweredU2),
}

impl DocBody {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DocBody::Poly(_) => "poly",
            DocBody::Sps(_) => "sps",
            DocBody::Seq(_) => "seq",
            DocBody::Abp(_) => "abp",
            DocBody::Formula(_) => "formula",
            DocBody::Algebra { .. } => "algebra",
            DocBody::Lowered(_) => "lowered",
        }
    }
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if ch.is_whitespace() {
            chars.next();
            col += 1;
        } else if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
        } else if ch.is_ascii_digit() {
            let start = col;
            let mut value: u64 = 0;
            while let Some(&c) = chars.peek() {
                let Some(d) = c.to_digit(10) else { break };
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(u64::from(d)))
                    .ok_or(Error::Parse {
                        line,
                        col: start,
                        msg: "number does not fit in 64 bits".to_string(),
                    })?;
                chars.next();
                col += 1;
            }
            out.push(Token { tok: Tok::Int(value), line, col: start });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = col;
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(name), line, col: start });
        } else if ";|:+-*^()=".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), line, col });
            chars.next();
            col += 1;
        } else {
            return Err(Error::Parse {
                line,
                col,
                msg: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        let (line, col) = self.here();
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Sym(s)) if *s == c)
    }

    fn at_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), Error> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), Error> {
        if self.at_ident(name) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected '{name}'"))
        }
    }

    fn take_ident(&mut self) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected a name"),
        }
    }

    fn take_int(&mut self) -> Result<u64, Error> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => self.fail("expected a number"),
        }
    }

    fn take_usize(&mut self) -> Result<usize, Error> {
        let v = self.take_int()?;
        usize::try_from(v).or_else(|_| self.fail("index out of range"))
    }

    /// `x<k>` (k >= 1) or `z`.
    fn var_index(&self, name: &str) -> Option<u32> {
        if name == "z" {
            return Some(Z_VAR);
        }
        let digits = name.strip_prefix('x')?;
        if digits.is_empty() || digits.starts_with('0') {
            return None;
        }
        digits.parse::<u32>().ok().filter(|&v| v >= 1)
    }

    /// One product of integer and `var[^exp]` factors joined by `*`.
    fn parse_term(&mut self, field: Field) -> Result<(u64, Monomial), Error> {
        let mut coeff = 1 % field.modulus();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut first = true;
        loop {
            match self.peek() {
                Some(Tok::Int(v)) => {
                    coeff = field.mul(coeff, field.reduce(*v));
                    self.pos += 1;
                }
                Some(Tok::Ident(name)) => {
                    let Some(v) = self.var_index(name) else {
                        return self.fail(format!("'{name}' is not a variable"));
                    };
                    self.pos += 1;
                    let exp = if self.eat_sym('^') {
                        let e = self.take_int()?;
                        u32::try_from(e).or_else(|_| self.fail("exponent too large"))?
                    } else {
                        1
                    };
                    pairs.push((v, exp));
                }
                _ if first => return self.fail("expected a term"),
                _ => unreachable!("loop exits after any non-factor token"),
            }
            first = false;
            if !self.eat_sym('*') {
                break;
            }
        }
        Ok((coeff, Monomial::from_pairs(&pairs)))
    }

    /// Sum of terms with `+`/`-` separators and an optional leading `-`.
    fn parse_poly(&mut self, field: Field) -> Result<SparsePoly, Error> {
        let mut poly = SparsePoly::zero(field);
        let mut negate = self.eat_sym('-');
        loop {
            let (coeff, monomial) = self.parse_term(field)?;
            poly.add_term(monomial, if negate { field.neg(coeff) } else { coeff });
            if self.eat_sym('+') {
                negate = false;
            } else if self.eat_sym('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(poly)
    }

    /// A polynomial restricted to degree <= 1 with no repeated variables.
    fn parse_linear(&mut self, field: Field) -> Result<LinearFunction, Error> {
        let poly = self.parse_poly(field)?;
        let mut out = LinearFunction::zero(field);
        for (m, c) in poly.terms() {
            match m.pairs() {
                [] => out.set_constant(c),
                [(v, 1)] => out.set_coeff(*v, c),
                _ => return self.fail("expected a linear expression"),
            }
        }
        Ok(out)
    }

    fn parse_formula_node(&mut self, field: Field) -> Result<FormulaNode, Error> {
        if self.eat_sym('(') {
            let op = self.take_ident()?;
            let a = self.parse_formula_node(field)?;
            let b = self.parse_formula_node(field)?;
            self.expect_sym(')')?;
            match op.as_str() {
                "add" => Ok(FormulaNode::Add(Box::new(a), Box::new(b))),
                "mul" => Ok(FormulaNode::Mul(Box::new(a), Box::new(b))),
                _ => self.fail(format!("unknown operation '{op}'; use add or mul")),
            }
        } else {
            match self.peek() {
                Some(Tok::Int(v)) => {
                    let coeff = field.reduce(*v);
                    self.pos += 1;
                    if self.eat_sym('*') {
                        let name = self.take_ident()?;
                        match self.var_index(&name) {
                            Some(v) => Ok(FormulaNode::Leaf { coeff, var: Some(v) }),
                            None => self.fail(format!("'{name}' is not a variable")),
                        }
                    } else {
                        Ok(FormulaNode::Leaf { coeff, var: None })
                    }
                }
                Some(Tok::Ident(name)) => {
                    let name = name.clone();
                    match self.var_index(&name) {
                        Some(v) => {
                            self.pos += 1;
                            Ok(FormulaNode::Leaf { coeff: 1 % field.modulus(), var: Some(v) })
                        }
                        None => self.fail(format!("'{name}' is not a variable")),
                    }
                }
                _ => self.fail("expected a leaf or '('"),
            }
        }
    }

    /// `k 2;` plus matrix and optional mask statements.
    fn parse_seq(&mut self, field: Field, allow_masks: bool) -> Result<LinearMatrixSequence, Error> {
        self.expect_ident("k")?;
        let k = self.take_usize()?;
        if k == 0 {
            return self.fail("matrix dimension must be positive");
        }
        self.expect_sym(';')?;
        let mut matrices = Vec::new();
        let mut left_mask = None;
        let mut right_mask = None;
        loop {
            if self.at_ident("matrix") {
                self.pos += 1;
                let mut entries = Vec::with_capacity(k * k);
                entries.push(self.parse_linear(field)?);
                while self.eat_sym('|') {
                    entries.push(self.parse_linear(field)?);
                }
                self.expect_sym(';')?;
                if entries.len() != k * k {
                    return self.fail(format!(
                        "matrix needs {} entries, found {}",
                        k * k,
                        entries.len()
                    ));
                }
                matrices.push(LinearMatrix::new(k, entries));
            } else if self.at_ident("lmask") || self.at_ident("rmask") {
                let which = self.take_ident()?;
                if !allow_masks {
                    return self.fail("masks are not allowed here");
                }
                let mut scalars = Vec::with_capacity(k * k);
                for _ in 0..k * k {
                    scalars.push(field.reduce(self.take_int()?));
                }
                self.expect_sym(';')?;
                if which == "lmask" {
                    left_mask = Some(scalars);
                } else {
                    right_mask = Some(scalars);
                }
            } else {
                break;
            }
        }
        if matrices.is_empty() {
            return self.fail("a sequence needs at least one matrix");
        }
        let mut seq = LinearMatrixSequence::new(field, k, matrices);
        seq.left_mask = left_mask;
        seq.right_mask = right_mask;
        Ok(seq)
    }

    fn parse_abp(&mut self, field: Field) -> Result<Abp, Error> {
        self.expect_ident("levels")?;
        let mut levels = Vec::new();
        while let Some(Tok::Int(_)) = self.peek() {
            levels.push(self.take_usize()?);
        }
        self.expect_sym(';')?;
        if levels.len() < 2 {
            return self.fail("a branching program needs at least two levels");
        }
        if levels[0] != 1 || *levels.last().unwrap() != 1 {
            return self.fail("source and sink levels must hold exactly one vertex");
        }
        if levels.iter().any(|&c| c == 0) {
            return self.fail("levels cannot be empty");
        }
        let mut gaps: Vec<Vec<AbpEdge>> = vec![Vec::new(); levels.len() - 1];
        while self.at_ident("edge") {
            self.pos += 1;
            let gap = self.take_usize()?;
            let from = self.take_usize()?;
            let to = self.take_usize()?;
            self.expect_sym(':')?;
            let label = self.parse_linear(field)?;
            self.expect_sym(';')?;
            if gap >= gaps.len() {
                return self.fail(format!("gap {gap} out of range"));
            }
            if from >= levels[gap] || to >= levels[gap + 1] {
                return self.fail("edge endpoint out of range");
            }
            if !label.is_homogeneous() {
                return self.fail("edge labels must be homogeneous");
            }
            gaps[gap].push(AbpEdge { from, to, label });
        }
        Ok(Abp::new(field, levels, gaps))
    }

    fn parse_algebra(
        &mut self,
        field: Field,
    ) -> Result<(AlgebraBasis, Option<AlgebraTermCircuit>), Error> {
        self.expect_ident("dim")?;
        let dim = self.take_usize()?;
        if dim == 0 {
            return self.fail("dimension must be positive");
        }
        self.expect_sym(';')?;
        self.expect_ident("identity")?;
        let identity = self.take_coords(field, dim)?;
        self.expect_sym(';')?;
        let mut table: Vec<Option<Vec<u64>>> = vec![None; dim * dim];
        while self.at_ident("mul") {
            self.pos += 1;
            let i = self.take_usize()?;
            let j = self.take_usize()?;
            if i >= dim || j >= dim {
                return self.fail("basis index out of range");
            }
            self.expect_sym(':')?;
            let coords = self.take_coords(field, dim)?;
            self.expect_sym(';')?;
            if table[i * dim + j].replace(coords).is_some() {
                return self.fail(format!("product {i} {j} given twice"));
            }
        }
        let mut structure = Vec::with_capacity(dim * dim);
        for (pos, row) in table.into_iter().enumerate() {
            match row {
                Some(r) => structure.push(r),
                None => {
                    return self.fail(format!(
                        "missing product {} {}",
                        pos / dim,
                        pos % dim
                    ))
                }
            }
        }
        let basis = AlgebraBasis::new(field, dim, structure, identity)?;
        let circuit = if self.at_ident("vars") {
            self.pos += 1;
            let n = self.take_usize()?;
            let n = u32::try_from(n).or_else(|_| self.fail("too many variables"))?;
            self.expect_sym(';')?;
            let mut terms = Vec::new();
            while self.at_ident("term") {
                self.pos += 1;
                let mut groups = Vec::new();
                groups.push(AlgebraElement::new(self.take_coords(field, dim)?));
                while self.eat_sym('|') {
                    groups.push(AlgebraElement::new(self.take_coords(field, dim)?));
                }
                self.expect_sym(';')?;
                if groups.len() != n as usize + 1 {
                    return self.fail(format!(
                        "term needs {} coordinate groups, found {}",
                        n + 1,
                        groups.len()
                    ));
                }
                terms.push(groups);
            }
            Some(AlgebraTermCircuit::new(basis.clone(), n, terms))
        } else {
            None
        };
        Ok((basis, circuit))
    }

    fn take_coords(&mut self, field: Field, dim: usize) -> Result<Vec<u64>, Error> {
        let mut coords = Vec::with_capacity(dim);
        for _ in 0..dim {
            coords.push(field.reduce(self.take_int()?));
        }
        Ok(coords)
    }

    fn parse_lowered(&mut self, field: Field) -> Result<LoweredU2, Error> {
        self.expect_ident("source")?;
        let read = |p: &mut Parser, key: &str| -> Result<u64, Error> {
            p.expect_ident(key)?;
            p.expect_sym('=')?;
            p.take_int()
        };
        let n = read(self, "n")?;
        let n = u32::try_from(n).or_else(|_| self.fail("too many variables"))?;
        let d = usize::try_from(read(self, "d")?).or_else(|_| self.fail("degree out of range"))?;
        let s = usize::try_from(read(self, "s")?).or_else(|_| self.fail("fanin out of range"))?;
        let zero = match read(self, "zero")? {
            0 => false,
            1 => true,
            _ => return self.fail("zero must be 0 or 1"),
        };
        self.expect_sym(';')?;
        let seq = self.parse_seq(field, false)?;
        if seq.k != 2 {
            return self.fail("lowered sequences are 2x2");
        }
        self.expect_ident("L")?;
        let mut l_factors = Vec::new();
        if !self.at_sym(';') {
            l_factors.push(self.parse_linear(field)?);
            while self.eat_sym('|') {
                l_factors.push(self.parse_linear(field)?);
            }
        }
        self.expect_sym(';')?;
        Ok(LoweredU2 { seq, l_factors, n, d, s, syntactic_zero: zero })
    }
}

/// Parses one artifact document. Grammar errors carry line and column;
/// semantic failures (a composite modulus, an invalid algebra table)
/// surface as their own error kinds.
pub fn parse_document(text: &str) -> Result<Document, Error> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0 };
    p.expect_ident("field")?;
    let modulus = p.take_int()?;
    p.expect_sym(';')?;
    let field = Field::new(modulus)?;
    p.expect_ident("kind")?;
    let kind = p.take_ident()?;
    p.expect_sym(';')?;
    let body = match kind.as_str() {
        "poly" => {
            p.expect_ident("poly")?;
            let poly = p.parse_poly(field)?;
            p.expect_sym(';')?;
            DocBody::Poly(poly)
        }
        "sps" => {
            let mut products = Vec::new();
            while p.at_ident("summand") {
                p.pos += 1;
                let mut factors = vec![p.parse_linear(field)?];
                while p.eat_sym('|') {
                    factors.push(p.parse_linear(field)?);
                }
                p.expect_sym(';')?;
                products.push(factors);
            }
            if products.is_empty() {
                return p.fail("a circuit needs at least one summand");
            }
            DocBody::Sps(DepthThreeCircuit::new(field, products))
        }
        "seq" => DocBody::Seq(p.parse_seq(field, true)?),
        "abp" => DocBody::Abp(p.parse_abp(field)?),
        "formula" => {
            p.expect_ident("formula")?;
            let root = p.parse_formula_node(field)?;
            p.expect_sym(';')?;
            DocBody::Formula(Formula { field, root })
        }
        "algebra" => {
            let (basis, circuit) = p.parse_algebra(field)?;
            DocBody::Algebra { basis, circuit }
        }
        "lowered" => DocBody::Lowered(p.parse_lowered(field)?),
        other => return p.fail(format!("unknown kind '{other}'")),
    };
    if p.peek().is_some() {
        return p.fail("unexpected trailing input");
    }
    Ok(Document { field, body })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn var_name(v: u32) -> String {
    if v == Z_VAR {
        "z".to_string()
    } else {
        format!("x{v}")
    }
}

/// Canonical linear form: constant first when nonzero, then variables by
/// ascending index with `z` in front (it is variable 0), unit
/// coefficients bare. The zero function renders as `0`.
pub fn render_linear(l: &LinearFunction) -> String {
    let mut parts = Vec::new();
    if l.constant_term() != 0 {
        parts.push(l.constant_term().to_string());
    }
    for (v, c) in l.coeff_pairs() {
        if c == 1 {
            parts.push(var_name(v));
        } else {
            parts.push(format!("{c}*{}", var_name(v)));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Canonical polynomial: terms in descending graded-lexicographic order,
/// factors within a monomial by ascending variable index with `z` last.
pub fn render_poly(p: &SparsePoly) -> String {
    let terms = p.terms_graded_lex();
    if terms.is_empty() {
        return "0".to_string();
    }
    let rendered: Vec<String> = terms
        .into_iter()
        .map(|(m, c)| {
            let mut factors = Vec::new();
            if c != 1 || m.is_unit() {
                factors.push(c.to_string());
            }
            let mut pairs: Vec<(u32, u32)> = m.pairs().to_vec();
            // z (index 0) ranks last in the term order; print it last too
            pairs.sort_by_key(|&(v, _)| if v == Z_VAR { u64::from(u32::MAX) + 1 } else { u64::from(v) });
            for (v, e) in pairs {
                if e == 1 {
                    factors.push(var_name(v));
                } else {
                    factors.push(format!("{}^{e}", var_name(v)));
                }
            }
            factors.join("*")
        })
        .collect();
    rendered.join(" + ")
}

fn render_formula_node(field: Field, node: &FormulaNode) -> String {
    match node {
        FormulaNode::Leaf { coeff, var } => {
            let c = field.reduce(*coeff);
            match var {
                None => c.to_string(),
                Some(v) if c == 1 => var_name(*v),
                Some(v) => format!("{c}*{}", var_name(*v)),
            }
        }
        FormulaNode::Add(a, b) => format!(
            "(add {} {})",
            render_formula_node(field, a),
            render_formula_node(field, b)
        ),
        FormulaNode::Mul(a, b) => format!(
            "(mul {} {})",
            render_formula_node(field, a),
            render_formula_node(field, b)
        ),
    }
}

fn render_seq_into(out: &mut String, seq: &LinearMatrixSequence) {
    out.push_str(&format!("k {};\n", seq.k));
    for m in &seq.matrices {
        let entries: Vec<String> = (0..seq.k)
            .flat_map(|i| (0..seq.k).map(move |j| (i, j)))
            .map(|(i, j)| render_linear(m.get(i, j)))
            .collect();
        out.push_str(&format!("matrix {};\n", entries.join(" | ")));
    }
    let scalars = |mask: &[u64]| {
        mask.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
    };
    if let Some(mask) = &seq.left_mask {
        out.push_str(&format!("lmask {};\n", scalars(mask)));
    }
    if let Some(mask) = &seq.right_mask {
        out.push_str(&format!("rmask {};\n", scalars(mask)));
    }
}

fn coords_string(coords: &[u64]) -> String {
    coords.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

/// Renders a document in the canonical form that [`parse_document`]
/// reads back exactly. Deterministic: equal documents render to equal
/// bytes.
pub fn render_document(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str(&format!("field {};\n", doc.field.modulus()));
    out.push_str(&format!("kind {};\n", doc.body.kind_name()));
    match &doc.body {
        DocBody::Poly(p) => {
            out.push_str(&format!("poly {};\n", render_poly(p)));
        }
        DocBody::Sps(c) => {
            for product in &c.products {
                let factors: Vec<String> = product.iter().map(render_linear).collect();
                out.push_str(&format!("summand {};\n", factors.join(" | ")));
            }
        }
        DocBody::Seq(seq) => render_seq_into(&mut out, seq),
        DocBody::Abp(abp) => {
            let levels: Vec<String> = abp.levels.iter().map(usize::to_string).collect();
            out.push_str(&format!("levels {};\n", levels.join(" ")));
            for (g, edges) in abp.gaps.iter().enumerate() {
                for e in edges {
                    out.push_str(&format!(
                        "edge {g} {} {} : {};\n",
                        e.from,
                        e.to,
                        render_linear(&e.label)
                    ));
                }
            }
        }
        DocBody::Formula(f) => {
            out.push_str(&format!("formula {};\n", render_formula_node(f.field, &f.root)));
        }
        DocBody::Algebra { basis, circuit } => {
            let k = basis.dim();
            out.push_str(&format!("dim {k};\n"));
            out.push_str(&format!("identity {};\n", coords_string(&basis.one().coords)));
            for i in 0..k {
                for j in 0..k {
                    out.push_str(&format!(
                        "mul {i} {j} : {};\n",
                        coords_string(basis.structure_row(i, j))
                    ));
                }
            }
            if let Some(c) = circuit {
                out.push_str(&format!("vars {};\n", c.n));
                for term in &c.terms {
                    let groups: Vec<String> =
                        term.iter().map(|a| coords_string(&a.coords)).collect();
                    out.push_str(&format!("term {};\n", groups.join(" | ")));
                }
            }
        }
        DocBody::Lowered(low) => {
            out.push_str(&format!(
                "source n={} d={} s={} zero={};\n",
                low.n,
                low.d,
                low.s,
                u8::from(low.syntactic_zero)
            ));
            render_seq_into(&mut out, &low.seq);
            if low.l_factors.is_empty() {
                out.push_str("L;\n");
            } else {
                let factors: Vec<String> = low.l_factors.iter().map(render_linear).collect();
                out.push_str(&format!("L {};\n", factors.join(" | ")));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::transforms::{local_ring_reduction, sps_to_u2};

    fn f101() -> Field {
        Field::new(101).unwrap()
    }

    fn roundtrip(doc: &Document) {
        let text = render_document(doc);
        let back = parse_document(&text).unwrap_or_else(|e| {
            panic!("failed to reparse:\n{text}\nerror: {e}");
        });
        assert_eq!(*doc, back, "mismatch for:\n{text}");
        // rendering is stable under a second pass
        assert_eq!(text, render_document(&back));
    }

    fn random_linear(field: Field, rng: &mut SplitMix64, n: u32) -> LinearFunction {
        let p = field.modulus();
        let pairs: Vec<(u32, u64)> = (1..=n)
            .filter_map(|v| (rng.next_below(2) == 0).then(|| (v, rng.next_below(p))))
            .collect();
        LinearFunction::from_parts(field, rng.next_below(p), &pairs)
    }

    fn random_sps(field: Field, rng: &mut SplitMix64, n: u32, d: usize, s: usize) -> DepthThreeCircuit {
        let products = (0..s)
            .map(|_| (0..d).map(|_| random_linear(field, rng, n)).collect())
            .collect();
        DepthThreeCircuit::new(field, products)
    }

    #[test]
    fn parses_a_simple_circuit() {
        let text = "\
# two summands over F_101
field 101;
kind sps;
summand 3 + 2*x1 | x2;
summand x3 + 100*x1;
";
        let doc = parse_document(text).unwrap();
        let DocBody::Sps(c) = &doc.body else { panic!("wrong kind") };
        assert_eq!(c.fanin(), 2);
        assert_eq!(c.products[0][0].constant_term(), 3);
        assert_eq!(c.products[0][0].coeff(1), 2);
        assert_eq!(c.products[1][0].coeff(1), 100);
    }

    #[test]
    fn minus_signs_and_odd_spacing_are_accepted() {
        let text = "field 5;\nkind poly;\npoly - x1 * x2 + 3 - 2*x1^2 ;\n";
        let doc = parse_document(text).unwrap();
        let DocBody::Poly(p) = &doc.body else { panic!("wrong kind") };
        let f = Field::new(5).unwrap();
        let mut expect = SparsePoly::zero(f);
        expect.add_term(Monomial::from_pairs(&[(1, 1), (2, 1)]), 4);
        expect.add_term(Monomial::unit(), 3);
        expect.add_term(Monomial::from_pairs(&[(1, 2)]), 3);
        assert_eq!(*p, expect);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let text = "field 101;\nkind sps;\nsummand x1 + ;\n";
        match parse_document(text) {
            Err(Error::Parse { line: 3, col: 14, msg }) => {
                assert!(msg.contains("term"), "unexpected message: {msg}");
            }
            other => panic!("expected a positioned error, got {other:?}"),
        }
        // unknown characters are rejected at their position
        assert!(matches!(
            parse_document("field 101;\nkind poly;\npoly 3 % 4;\n"),
            Err(Error::Parse { line: 3, col: 8, .. })
        ));
        // composite moduli fail with the dedicated error
        assert_eq!(parse_document("field 91;\nkind poly;\npoly 1;\n"), Err(Error::NotPrime(91)));
    }

    #[test]
    fn nonlinear_summands_are_rejected() {
        let text = "field 101;\nkind sps;\nsummand x1*x2;\n";
        assert!(matches!(parse_document(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn invalid_algebra_tables_fail_validation() {
        // e1 is claimed as identity but e1*e1 = 0
        let text = "field 101;\nkind algebra;\ndim 1;\nidentity 1;\nmul 0 0 : 0;\n";
        assert_eq!(parse_document(text), Err(Error::BadIdentity { i: 0 }));
        // incomplete tables are a parse error
        let text = "field 101;\nkind algebra;\ndim 2;\nidentity 1 0;\nmul 0 0 : 1 0;\n";
        assert!(matches!(parse_document(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn poly_roundtrip_random() {
        let f = f101();
        let mut rng = SplitMix64::new(0x90_0009);
        for _ in 0..30 {
            let mut p = SparsePoly::zero(f);
            for _ in 0..rng.next_below(6) {
                let pairs: Vec<(u32, u32)> = (0..=3)
                    .filter_map(|v| {
                        (rng.next_below(2) == 0).then(|| (v, 1 + rng.next_below(3) as u32))
                    })
                    .collect();
                p.add_term(Monomial::from_pairs(&pairs), rng.next_below(101));
            }
            roundtrip(&Document { field: f, body: DocBody::Poly(p) });
        }
    }

    #[test]
    fn sps_and_lowered_roundtrip_random() {
        let f = f101();
        let mut rng = SplitMix64::new(0xA0_000A);
        for _ in 0..20 {
            let c = random_sps(f, &mut rng, 3, 2, 2);
            roundtrip(&Document { field: f, body: DocBody::Sps(c.clone()) });
            let low = sps_to_u2(&c);
            roundtrip(&Document { field: f, body: DocBody::Lowered(low) });
        }
    }

    #[test]
    fn seq_roundtrip_with_masks() {
        let f = f101();
        let mut rng = SplitMix64::new(0xB0_000B);
        for _ in 0..10 {
            let matrices: Vec<LinearMatrix> = (0..3)
                .map(|_| {
                    LinearMatrix::new(
                        2,
                        (0..4).map(|_| random_linear(f, &mut rng, 2)).collect(),
                    )
                })
                .collect();
            let mut seq = LinearMatrixSequence::new(f, 2, matrices);
            if rng.next_below(2) == 0 {
                seq.left_mask = Some(vec![1, 0, 0, 0]);
                seq.right_mask = Some(vec![0, 0, 0, 1]);
            }
            roundtrip(&Document { field: f, body: DocBody::Seq(seq) });
        }
    }

    #[test]
    fn abp_roundtrip_from_lowering() {
        let f = f101();
        let mut rng = SplitMix64::new(0xC0_000C);
        for _ in 0..10 {
            let c = random_sps(f, &mut rng, 2, 2, 2);
            let abp = crate::transforms::homogenize_and_abp(&sps_to_u2(&c).seq).unwrap();
            roundtrip(&Document { field: f, body: DocBody::Abp(abp) });
        }
    }

    #[test]
    fn formula_roundtrip() {
        let f = f101();
        fn random_node(rng: &mut SplitMix64, depth: u32) -> FormulaNode {
            if depth == 0 || rng.next_below(3) == 0 {
                FormulaNode::Leaf {
                    coeff: rng.next_below(101),
                    var: match rng.next_below(4) {
                        0 => None,
                        1 => Some(Z_VAR),
                        v => Some(v as u32),
                    },
                }
            } else if rng.next_below(2) == 0 {
                FormulaNode::Add(
                    Box::new(random_node(rng, depth - 1)),
                    Box::new(random_node(rng, depth - 1)),
                )
            } else {
                FormulaNode::Mul(
                    Box::new(random_node(rng, depth - 1)),
                    Box::new(random_node(rng, depth - 1)),
                )
            }
        }
        let mut rng = SplitMix64::new(0xD0_000D);
        for _ in 0..20 {
            let formula = Formula { field: f, root: random_node(&mut rng, 3) };
            roundtrip(&Document { field: f, body: DocBody::Formula(formula) });
        }
    }

    #[test]
    fn algebra_roundtrip_with_circuit() {
        let f = f101();
        let mut rng = SplitMix64::new(0xE0_000E);
        let c = random_sps(f, &mut rng, 2, 2, 2);
        let (basis, circuit) = local_ring_reduction(&c).unwrap();
        roundtrip(&Document {
            field: f,
            body: DocBody::Algebra { basis: basis.clone(), circuit: Some(circuit) },
        });
        roundtrip(&Document { field: f, body: DocBody::Algebra { basis, circuit: None } });
    }

    #[test]
    fn rendered_linear_forms_are_canonical() {
        let f = f101();
        assert_eq!(render_linear(&LinearFunction::zero(f)), "0");
        assert_eq!(render_linear(&LinearFunction::constant(f, 7)), "7");
        let l = LinearFunction::from_parts(f, 3, &[(1, 2), (3, 1), (Z_VAR, 5)]);
        assert_eq!(render_linear(&l), "3 + 5*z + 2*x1 + x3");
        let mut p = SparsePoly::zero(f);
        p.add_term(Monomial::from_pairs(&[(1, 1), (Z_VAR, 2)]), 1);
        p.add_term(Monomial::from_pairs(&[(2, 1)]), 9);
        assert_eq!(render_poly(&p), "x1*z^2 + 9*x2");
    }
}
