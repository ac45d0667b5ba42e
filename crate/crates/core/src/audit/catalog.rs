//! The identity catalog: a plain-text list of identities, one per line.
//!
//! ```text
//! # comment
//! id : lhs == rhs
//! id : lhs == rhs ; cleared = 1 - q^2 ; q = -1
//! ```
//! `cleared` names the scalar denominator that was multiplied through;
//! `q = 1` / `q = -1` request a specialization instead of formal `q`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentScalar;
use crate::symbolic::{expand_free, parse, Expr, FreePoly, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Free,
    Quotient,
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Specialization {
    FormalQ,
    QAtN,
    QEq1,
    QEqMinus1,
}

impl Specialization {
    /// The rational value substituted for `q`, if any.
    pub fn value(self) -> Option<BigRational> {
        match self {
            Specialization::QEq1 => Some(BigRational::from_integer(BigInt::from(1))),
            Specialization::QEqMinus1 => Some(BigRational::from_integer(BigInt::from(-1))),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityEntry {
    pub id: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub strategy: Strategy,
    pub specialization: Specialization,
    /// Denominator multiplied through both sides, when the printed form has one.
    pub denominator: Option<LaurentScalar>,
}

impl IdentityEntry {
    pub fn denominator_cleared(&self) -> bool {
        self.denominator.is_some()
    }

    /// Points among `q = 1`, `q = −1` where the cleared denominator vanishes.
    pub fn degenerate_at(&self) -> Vec<String> {
        let Some(d) = &self.denominator else {
            return Vec::new();
        };
        [(1, "q=1"), (-1, "q=-1")]
            .into_iter()
            .filter(|(v, _)| d.specialize(&BigRational::from_integer(BigInt::from(*v))).is_zero())
            .map(|(_, s)| s.to_string())
            .collect()
    }

    pub fn residual_expr(&self) -> Expr {
        Expr::sub(self.lhs.clone(), self.rhs.clone())
    }

    /// Catalog line that parses back to this entry.
    pub fn to_line(&self) -> String {
        let mut s = format!("{} : {} == {}", self.id, self.lhs, self.rhs);
        if let Some(d) = &self.denominator {
            let _ = write!(s, " ; cleared = {d}");
        }
        match self.specialization {
            Specialization::QEq1 => s.push_str(" ; q = 1"),
            Specialization::QEqMinus1 => s.push_str(" ; q = -1"),
            _ => {}
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: duplicate identity id `{id}`")]
    Duplicate { line: usize, id: String },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Catalog {
    pub entries: Vec<IdentityEntry>,
}

fn classify(lhs: &Expr, rhs: &Expr) -> Result<Strategy, String> {
    let mut gens = lhs.generators();
    gens.extend(rhs.generators());
    if lhs.has_functions() || rhs.has_functions() {
        return Ok(Strategy::Matrix);
    }
    if gens.iter().all(|g| g.is_free()) {
        return Ok(Strategy::Free);
    }
    if gens.iter().all(|g| !g.is_free()) {
        if gens.iter().all(|g| g.is_quotient()) {
            return Ok(Strategy::Quotient);
        }
        return Ok(Strategy::Matrix);
    }
    Err("free generators cannot be mixed with ladder operators".into())
}

fn scalar_of(e: &Expr) -> Option<LaurentScalar> {
    let p: FreePoly = expand_free(e).ok()?;
    match p.len() {
        0 => Some(LaurentScalar::zero()),
        1 => {
            let (w, c) = p.terms().next()?;
            w.0.is_empty().then(|| c.clone())
        }
        _ => None,
    }
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let mut entries: Vec<IdentityEntry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let syntax = |message: &str| CatalogError::Syntax {
                line,
                message: message.to_string(),
            };
            let (id, rest) = body.split_once(':').ok_or_else(|| syntax("missing `:` after the identity id"))?;
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(syntax("identity id must be a single non-empty token"));
            }
            let mut parts = rest.split(';');
            let eq = parts.next().unwrap_or_default();
            let (lhs_s, rhs_s) = eq.split_once("==").ok_or_else(|| syntax("missing `==`"))?;
            let pe = |source| CatalogError::Parse { line, source };
            let lhs = parse(lhs_s.trim()).map_err(pe)?;
            let rhs = parse(rhs_s.trim()).map_err(pe)?;
            let strategy = classify(&lhs, &rhs).map_err(|m| syntax(&m))?;
            let mut specialization = match strategy {
                Strategy::Matrix => Specialization::QAtN,
                _ => Specialization::FormalQ,
            };
            let mut denominator = None;
            for attr in parts {
                let (key, value) = attr.split_once('=').ok_or_else(|| syntax("attribute needs `key = value`"))?;
                match (key.trim(), value.trim()) {
                    ("q", "1") if strategy == Strategy::Free => specialization = Specialization::QEq1,
                    ("q", "-1") if strategy == Strategy::Free => specialization = Specialization::QEqMinus1,
                    ("q", _) => return Err(syntax("`q` may only be set to 1 or -1 on free identities")),
                    ("cleared", v) => {
                        let e = parse(v).map_err(pe)?;
                        let d = scalar_of(&e).ok_or_else(|| syntax("cleared denominator must be a scalar"))?;
                        if d.is_zero() {
                            return Err(syntax("cleared denominator is zero"));
                        }
                        denominator = Some(d);
                    }
                    (k, _) => return Err(syntax(&format!("unknown attribute `{k}`"))),
                }
            }
            if entries.iter().any(|e| e.id == id) {
                return Err(CatalogError::Duplicate { line, id: id.into() });
            }
            entries.push(IdentityEntry {
                id: id.to_string(),
                lhs,
                rhs,
                strategy,
                specialization,
                denominator,
            });
        }
        Ok(Catalog { entries })
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| e.to_line() + "\n").collect()
    }

    pub fn get(&self, id: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The built-in catalog.
    pub fn standard() -> Catalog {
        Catalog::parse(&standard_catalog_text()).expect("built-in catalog parses")
    }
}

fn u(i: usize) -> String {
    format!("u{i}")
}

fn mono(parts: &[String]) -> String {
    let v: Vec<&str> = parts.iter().map(|s| s.as_str()).filter(|s| !s.is_empty()).collect();
    if v.is_empty() {
        "1".to_string()
    } else {
        v.join(" ")
    }
}

fn pw(x: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => x.to_string(),
        e => format!("{x}^{e}"),
    }
}

fn range(a: usize, b: usize) -> Vec<String> {
    (a..=b).map(u).collect()
}

/// `[[u1, u2]_n, u3]_n …` over `u1 … uk`.
fn nested(names: &[String], tag: &str) -> String {
    let mut acc = names[0].clone();
    for x in &names[1..] {
        acc = format!("[{acc}, {x}]{tag}");
    }
    acc
}

/// Product expansion of `[u1…uk, v1…vl]` as a double sum of plain commutators.
fn product_expansion(us: &[String], vs: &[String]) -> Vec<String> {
    let mut terms = Vec::new();
    for i in 0..us.len() {
        for j in 0..vs.len() {
            let mut parts: Vec<String> = us[..i].to_vec();
            parts.extend(vs[..j].iter().cloned());
            parts.push(format!("[{}, {}]", us[i], vs[j]));
            parts.extend(vs[j + 1..].iter().cloned());
            parts.extend(us[i + 1..].iter().cloned());
            terms.push(mono(&parts));
        }
    }
    terms
}

fn eps_sum(tag: &str, anti: bool) -> String {
    let (o, c) = if anti { ("{", "}") } else { ("[", "]") };
    let t = if anti { "" } else { tag };
    let term = |i: usize, j: usize, k: usize| format!("{o}{o}u{i}, u{j}{c}{t}, u{k}{c}{t}");
    format!(
        "{} + {} + {} - {} - {} - {}",
        term(1, 2, 3),
        term(2, 3, 1),
        term(3, 1, 2),
        term(2, 1, 3),
        term(3, 2, 1),
        term(1, 3, 2)
    )
}

/// Text of the built-in catalog.
pub fn standard_catalog_text() -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };

    line("# bracket of an operator with itself and with a c-number".into());
    line("II.self : [u, u]_n == (1 - q) u^2".into());
    line("II.cnum.1 : [u, 5/3]_n == (1 - q) 5/3 u".into());
    line("II.cnum.2 : [5/3, u]_n == (1 - q) 5/3 u".into());
    line("# linearity and reordering".into());
    line("II.lin.1 : [u + v, w]_n == [u, w]_n + [v, w]_n".into());
    line("II.lin.2 : [u - v, w]_n == [u, w]_n - [v, w]_n".into());
    line("II.lin.3 : [w, u + v]_n == [w, u]_n + [w, v]_n".into());
    line("II.lin.4 : [w, u - v]_n == [w, u]_n - [w, v]_n".into());
    line("II.lin.5 : [u, 5/3 v]_n == 5/3 [u, v]_n".into());
    line("II.lin.6 : [5/3 u, v]_n == 5/3 [u, v]_n".into());
    line("II.swap : [u, v]_n == -q^-1 [v, u]_n - (q - q^-1) v u".into());
    line("II.comm : [u, v]_n - [v, u]_n == (1 + q) [u, v]".into());
    line("II.anti : [u, v]_n + [v, u]_n == (1 - q) {u, v}".into());

    line("# bracket of products".into());
    for k in 1..=3 {
        for l in 1..=(4 - k) {
            let us = range(1, k);
            let vs = range(k + 1, k + l);
            let mut rhs = product_expansion(&us, &vs);
            rhs.push(format!("(1 - q) {} {}", mono(&vs), mono(&us)));
            line(format!("II.prod.{k}.{l} : [{}, {}]_n == {}", mono(&us), mono(&vs), rhs.join(" + ")));
        }
    }

    line("# two-fold brackets".into());
    line("II.twofold.sym : [[u, v]_n, w]_n + [[w, u]_n, v]_n + [[v, w]_n, u]_n + [[v, u]_n, w]_n + [[w, v]_n, u]_n + [[u, w]_n, v]_n == (1 - q)^2 (u v w + w u v + v w u + v u w + w v u + u w v)".into());
    line("II.twofold.jacobi : [[u, v]_n, w]_n + [[w, u]_n, v]_n + [[v, w]_n, u]_n - [[v, u]_n, w]_n - [[w, v]_n, u]_n - [[u, w]_n, v]_n == (1 - q^2) (u v w + w u v + v w u - v u w - w v u - u w v)".into());

    line("# k-fold nesting and split products under permutation and cyclic sums".into());
    for k in 2..=4 {
        let us = range(1, k);
        line(format!(
            "II.nest.{k} : sumperm({}) == (1 - q)^{} sumperm({})",
            nested(&us, "_n"),
            k - 1,
            mono(&us)
        ));
    }
    for k in 2..=4 {
        let us = range(1, k);
        for i in 1..k {
            let br = format!("[{}, {}]_n", mono(&us[..i]), mono(&us[i..]));
            line(format!("II.perm.{k}.{i} : sumperm({br}) == (1 - q) sumperm({})", mono(&us)));
            line(format!("II.cyc.{k}.{i} : sumcyc({br}) == (1 - q) sumcyc({})", mono(&us)));
        }
    }
    for k in 3..=4 {
        let us = range(1, k);
        for i in 1..k - 1 {
            let a = format!("[{}, {}]_n", mono(&us[..i]), mono(&us[i..]));
            let b = format!("[{}, {}]_n", mono(&us[..i + 1]), mono(&us[i + 1..]));
            line(format!("II.comma.perm.{k}.{i} : sumperm({a}) == sumperm({b})"));
            line(format!("II.comma.cyc.{k}.{i} : sumcyc({a}) == sumcyc({b})"));
        }
    }

    line("# product with a single operator".into());
    for k in 1..=3 {
        let us = range(1, k);
        let left: Vec<String> = (0..k)
            .map(|i| {
                let mut p = us[..i].to_vec();
                p.push(format!("[{}, v]", us[i]));
                p.extend(us[i + 1..].iter().cloned());
                mono(&p)
            })
            .collect();
        line(format!(
            "A.left.{k} : [{}, v]_n == {} + (1 - q) v {}",
            mono(&us),
            left.join(" + "),
            mono(&us)
        ));
        let right: Vec<String> = (0..k)
            .map(|i| {
                let mut p = us[..i].to_vec();
                p.push(format!("[v, {}]", us[i]));
                p.extend(us[i + 1..].iter().cloned());
                mono(&p)
            })
            .collect();
        line(format!(
            "A.right.{k} : [v, {}]_n == {} + (1 - q) {} v",
            mono(&us),
            right.join(" + "),
            mono(&us)
        ));
    }

    line("# powers".into());
    for k in 1..=3 {
        for l in 1..=(4 - k) {
            let mut terms = Vec::new();
            for i in 1..=k {
                for j in 1..=l {
                    terms.push(mono(&[pw("u", i - 1), pw("v", j - 1), "[u, v]".into(), pw("v", l - j), pw("u", k - i)]));
                }
            }
            line(format!(
                "A.pow.{k}.{l} : [{}, {}]_n == {} + (1 - q) {}",
                pw("u", k),
                pw("v", l),
                terms.join(" + "),
                mono(&[pw("v", l), pw("u", k)])
            ));
        }
    }
    for k in 1..=3 {
        for m in 1..=(4 - k) {
            let us = vec!["u".to_string(); k];
            let vs = vec!["v".to_string(); m];
            let nest = format!("[{}, {}]_n", nested(&us, "_n"), nested(&vs, "_n"));
            let e = k + m - 2;
            if e == 0 {
                line(format!("A.nestpow.{k}.{m} : [{}, {}]_n == {nest}", pw("u", k), pw("v", m)));
            } else {
                line(format!(
                    "A.nestpow.{k}.{m} : (1 - q)^{e} [{}, {}]_n == {nest} ; cleared = (1 - q)^{e}",
                    pw("u", k),
                    pw("v", m)
                ));
            }
        }
    }
    for k in 1..=3 {
        let uk1 = mono(&[pw("u", k - 1)]);
        line(format!(
            "A.split.1.{k} : [{}, v]_n + [{}, u]_n == [{uk1}, u]_n v + [{uk1}, v]_n u",
            pw("u", k),
            mono(&[pw("u", k - 1), "v".into()])
        ));
        line(format!(
            "A.split.2.{k} : [v, {}]_n + [u, {}]_n == v [u, {uk1}]_n + u [v, {uk1}]_n",
            pw("u", k),
            mono(&["v".into(), pw("u", k - 1)])
        ));
    }

    line("# small products".into());
    line("A.uv.1 : [u v, w]_n == u [v, w] + [u, w] v + (1 - q) w u v".into());
    line("A.uv.2 : [w, u v]_n == [w, u] v + u [w, v] + (1 - q) u v w".into());
    line("A.uvw.1 : [u v w, o]_n == [u, o] v w + u [v, o] w + u v [w, o] + (1 - q) o u v w".into());
    line("A.uvw.2 : [o, u v w]_n == [o, u] v w + u [o, v] w + u v [o, w] + (1 - q) u v w o".into());
    line("A.uvwo.1 : (1 - q^2) [u v, w o]_n == [[u, v]_n, [w, o]_n]_n + q [[v, u]_n, [w, o]_n]_n + q [[u, v]_n, [o, w]_n]_n + q^2 [[v, u]_n, [o, w]_n]_n ; cleared = 1 - q^2".into());
    line("A.uvwo.2 : [u v, w o]_n == u [v, w]_n o + q u w [v, o] + q [u, w] o v + q w [u, o] v".into());

    line("# commutator limit".into());
    for k in 1..=3 {
        for l in 1..=(4 - k) {
            let us = range(1, k);
            let vs = range(k + 1, k + l);
            let rhs = product_expansion(&us, &vs);
            line(format!("L.comm.prod.{k}.{l} : [{}, {}]_n == {} ; q = 1", mono(&us), mono(&vs), rhs.join(" + ")));
        }
    }
    line("L.comm.abs : sumperm([[u1, u2]_n, u3]_n) == 0 ; q = 1".into());
    line(format!("L.comm.jacobi : {} == 0 ; q = 1", eps_sum("_n", false)));
    for k in 2..=4 {
        line(format!("L.comm.nest.{k} : sumperm({}) == 0 ; q = 1", nested(&range(1, k), "_n")));
    }
    for k in 2..=4 {
        let us = range(1, k);
        for i in 1..k {
            let br = format!("[{}, {}]_n", mono(&us[..i]), mono(&us[i..]));
            line(format!("L.comm.perm.{k}.{i} : sumperm({br}) == 0 ; q = 1"));
            line(format!("L.comm.cyc.{k}.{i} : sumcyc({br}) == 0 ; q = 1"));
        }
    }

    line("# anticommutator limit".into());
    for k in 1..=3 {
        for l in 1..=(4 - k) {
            let us = range(1, k);
            let vs = range(k + 1, k + l);
            let mut rhs = product_expansion(&us, &vs);
            rhs.push(format!("2 {} {}", mono(&vs), mono(&us)));
            line(format!("L.anti.prod.{k}.{l} : [{}, {}]_n == {} ; q = -1", mono(&us), mono(&vs), rhs.join(" + ")));
        }
    }
    line("L.anti.abs : sumperm([[u1, u2]_n, u3]_n) == 4 sumperm(u1 u2 u3) ; q = -1".into());
    line(format!("L.anti.eps : {} == 0 ; q = -1", eps_sum("_n", false)));
    for k in 2..=4 {
        let us = range(1, k);
        line(format!(
            "L.anti.nest.{k} : sumperm({}) == {} sumperm({}) ; q = -1",
            nested(&us, "_n"),
            1u32 << (k - 1),
            mono(&us)
        ));
    }
    for k in 2..=4 {
        let us = range(1, k);
        for i in 1..k {
            let br = format!("[{}, {}]_n", mono(&us[..i]), mono(&us[i..]));
            line(format!("L.anti.perm.{k}.{i} : sumperm({br}) == 2 sumperm({}) ; q = -1", mono(&us)));
            line(format!("L.anti.cyc.{k}.{i} : sumcyc({br}) == 2 sumcyc({}) ; q = -1", mono(&us)));
        }
    }

    line("# ladder operator relations".into());
    line("B.def : [b, adag]_n == 1".into());
    line("B.num.adag : [N, adag] == adag".into());
    line("B.num.b : [N, b] == -b".into());
    line("B.nbr.1 : [N, adag]_n == ((1 - q) N + q) adag".into());
    line("B.nbr.2 : [adag, N]_n == ((1 - q) N - 1) adag".into());
    line("B.nbr.3 : [N, b]_n == ((1 - q) N - q) b".into());
    line("B.nbr.4 : [b, N]_n == ((1 - q) N + 1) b".into());
    line("B.phase.left : [N b, adag b] == phase(N-1) N b".into());
    line("B.phase.right : [N b, adag b] == N b phase(N-1)".into());
    for k in 1..=3 {
        let ak = pw("adag", k);
        let bk = pw("b", k);
        line(format!("B.adagk.1.{k} : [{ak} b, adag]_n == {ak}"));
        line(format!("B.adagk.2.{k} : [b {ak}, adag]_n == {ak}"));
        line(format!("B.bk.1.{k} : [b, adag {bk}]_n == {bk}"));
        line(format!("B.bk.2.{k} : [b, {bk} adag]_n == {bk}"));
    }
    line("B.sq.1 : [adag b^2, adag]_n == (1 + q) adag b".into());
    line("B.sq.2 : [b, adag^2 b]_n == (1 + q) adag b".into());
    line("B.arcsin : narcsin() == N".into());
    line("B.arcsin.adag : [narcsin(), adag] == adag".into());
    line("B.arcsin.b : [narcsin(), b] == -b".into());
    line("B.conj.1 : adag a == bdag b".into());
    line("B.conj.2 : a adag == b bdag".into());
    out
}
