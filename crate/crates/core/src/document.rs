//! Definition files: named blocks of algebroids, maps, homotopies, matrix
//! Lie algebras, paths and retractions.
//!
//! ```text
//! # comment
//! [algebroid M]
//! tangent = x1, x2
//!
//! [algebroid so3]
//! rank = 3
//! [e2,e3] = e1
//! [e3,e1] = e2
//! [e1,e2] = e3
//!
//! [homotopy H]
//! source = M
//! target = M
//! phi = (1 - t)*x1, (1 - t)*x2
//! ```
//!
//! A line whose `]` is followed by `=` is an entry, not a header. Values
//! use the polynomial grammar. Blocks may reference each other in any
//! order; references are resolved after the whole file is read.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebroid::LieAlgebroid;
use crate::bundlemap::{BundleMap, SupportedSection};
use crate::error::Error;
use crate::groupcase::MatrixLieAlgebra;
use crate::homotopy::{NaturalHomotopy, Piece};
use crate::poly::{parse_poly, Polynomial, Ring};
use crate::tangentcase::{homotopy_from_map, tangent_algebroid_on, SubalgebroidPresentation};

/// A diagnostic pointing into the source file (1-based; column 0 when the
/// whole line is meant).
#[derive(Debug, Clone, PartialEq)]
pub struct DocError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            return f.write_str(&self.message);
        }
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for DocError {}

type DResult<T> = std::result::Result<T, DocError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockKind {
    Algebroid,
    Map,
    Homotopy,
    LieAlg,
    Path,
    Retraction,
}

impl BlockKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "algebroid" => BlockKind::Algebroid,
            "map" => BlockKind::Map,
            "homotopy" => BlockKind::Homotopy,
            "liealg" => BlockKind::LieAlg,
            "path" => BlockKind::Path,
            "retraction" => BlockKind::Retraction,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Algebroid => "algebroid",
            BlockKind::Map => "map",
            BlockKind::Homotopy => "homotopy",
            BlockKind::LieAlg => "liealg",
            BlockKind::Path => "path",
            BlockKind::Retraction => "retraction",
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    /// 1-based column of the value's first byte.
    column: usize,
}

impl Entry {
    fn err(&self, message: impl Into<String>) -> DocError {
        DocError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Maps a library error to this entry, placing syntax errors inside
    /// the value.
    fn lib_err(&self, e: Error) -> DocError {
        match e {
            Error::Syntax { offset, message } => DocError {
                line: self.line,
                column: self.column + offset,
                message: format!("syntax error: {message}"),
            },
            other => self.err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
struct RawBlock {
    kind: BlockKind,
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl RawBlock {
    fn err(&self, message: impl Into<String>) -> DocError {
        DocError {
            line: self.line,
            column: 0,
            message: format!("[{} {}]: {}", self.kind.name(), self.name, message.into()),
        }
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&self, key: &str) -> DResult<&Entry> {
        self.get(key).ok_or_else(|| self.err(format!("missing `{key}`")))
    }

    /// Entries `prefix[i]` as `(i − 1, entry)`.
    fn indexed(&self, prefix: &str) -> DResult<Vec<(usize, &Entry)>> {
        let mut out = Vec::new();
        for e in &self.entries {
            if let Some(rest) = e.key.strip_prefix(prefix).and_then(|r| r.strip_prefix('[')) {
                if rest.contains('[') {
                    continue;
                }
                let idx = rest
                    .strip_suffix(']')
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| e.err(format!("bad index in `{}`", e.key)))?;
                out.push((idx - 1, e));
            }
        }
        Ok(out)
    }

    /// Entries `prefix[i][j]` as `(i − 1, j − 1, entry)`.
    fn indexed2(&self, prefix: &str) -> DResult<Vec<(usize, usize, &Entry)>> {
        let mut out = Vec::new();
        for e in &self.entries {
            let Some(rest) = e.key.strip_prefix(prefix) else { continue };
            let parts: Vec<&str> = rest
                .split(['[', ']'])
                .filter(|s| !s.trim().is_empty())
                .collect();
            if !rest.starts_with('[') || parts.len() != 2 || rest.matches('[').count() != 2 {
                continue;
            }
            let parse = |s: &str| s.trim().parse::<usize>().ok().filter(|&i| i >= 1);
            match (parse(parts[0]), parse(parts[1])) {
                (Some(i), Some(j)) => out.push((i - 1, j - 1, e)),
                _ => return Err(e.err(format!("bad index in `{}`", e.key))),
            }
        }
        Ok(out)
    }

    fn check_keys(&self, allowed: &dyn Fn(&str) -> bool) -> DResult<()> {
        for e in &self.entries {
            if !allowed(&e.key) {
                return Err(DocError {
                    line: e.line,
                    column: 1,
                    message: format!("unknown key `{}` in {} block", e.key, self.kind.name()),
                });
            }
        }
        Ok(())
    }
}

/// A path in a matrix Lie algebra with optional endpoint morphisms.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub liealg: String,
    pub theta: Vec<Polynomial>,
    pub phi0: Option<DMatrix<f64>>,
    pub phi1: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct RetractionSpec {
    pub homotopy: String,
    pub presentation: SubalgebroidPresentation,
    pub samples: Vec<Vec<f64>>,
}

/// Four homotopies `H0, H1: A_M → A_N`, `K0, K1: A_N → A_P` whose
/// interchange law a homotopy block asked for.
#[derive(Debug, Clone)]
pub struct Interchange {
    pub h0: String,
    pub h1: String,
    pub k0: String,
    pub k1: String,
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    order: Vec<(BlockKind, String)>,
    pub algebroids: BTreeMap<String, Arc<LieAlgebroid>>,
    pub maps: BTreeMap<String, BundleMap>,
    pub homotopies: BTreeMap<String, NaturalHomotopy>,
    pub liealgs: BTreeMap<String, MatrixLieAlgebra>,
    pub paths: BTreeMap<String, PathSpec>,
    pub retractions: BTreeMap<String, RetractionSpec>,
    /// Homotopy blocks built by `vertical`, `horizontal` or `interchange`.
    pub composites: BTreeSet<String>,
    pub interchanges: BTreeMap<String, Interchange>,
}

impl Document {
    /// Block names of one kind in file order.
    pub fn names(&self, kind: BlockKind) -> Vec<&str> {
        self.order
            .iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, n)| n.as_str())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn parse_file(path: &Path) -> DResult<Document> {
        let text = std::fs::read_to_string(path).map_err(|e| DocError {
            line: 0,
            column: 0,
            message: format!("cannot read file: {e}"),
        })?;
        parse_document(&text)
    }
}

fn split_lines(text: &str) -> DResult<Vec<RawBlock>> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let is_header = trimmed.starts_with('[')
            && trimmed.ends_with(']')
            && !trimmed[..trimmed.len() - 1].contains(']');
        if is_header {
            let inner: Vec<&str> = trimmed[1..trimmed.len() - 1].split_whitespace().collect();
            let [kind, name] = inner.as_slice() else {
                return Err(DocError {
                    line,
                    column: lead + 1,
                    message: "block header must read `[kind name]`".into(),
                });
            };
            let kind = BlockKind::parse(kind).ok_or_else(|| DocError {
                line,
                column: lead + 2,
                message: format!("unknown block kind `{kind}`"),
            })?;
            if let Some(prev) = blocks.iter().find(|b| b.name == *name) {
                return Err(DocError {
                    line,
                    column: lead + 1,
                    message: format!("block name `{name}` already used on line {}", prev.line),
                });
            }
            blocks.push(RawBlock {
                kind,
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = content.find('=').ok_or_else(|| DocError {
            line,
            column: lead + 1,
            message: "expected `key = value` or a `[kind name]` header".into(),
        })?;
        let key = content[..eq].trim().to_string();
        let value_raw = &content[eq + 1..];
        let value = value_raw.trim().to_string();
        let column = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
        let block = blocks.last_mut().ok_or_else(|| DocError {
            line,
            column: lead + 1,
            message: "entry outside of any block".into(),
        })?;
        if key.is_empty() {
            return Err(DocError {
                line,
                column: lead + 1,
                message: "empty key".into(),
            });
        }
        if let Some(prev) = block.entries.iter().find(|e| e.key == key) {
            return Err(DocError {
                line,
                column: lead + 1,
                message: format!("`{key}` already set on line {}", prev.line),
            });
        }
        block.entries.push(Entry {
            key,
            value,
            line,
            column,
        });
    }
    Ok(blocks)
}

fn list(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Comma-separated polynomials, with syntax errors located in the line.
fn poly_list(e: &Entry, ring: &Ring) -> DResult<Vec<Polynomial>> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in e.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        if !item.is_empty() {
            let p = parse_poly(item, ring).map_err(|x| match x {
                Error::Syntax { offset, message } => DocError {
                    line: e.line,
                    column: e.column + start + lead + offset,
                    message: format!("syntax error: {message}"),
                },
                other => e.err(other.to_string()),
            })?;
            out.push(p);
        }
        start += part.len() + 1;
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    BigRational::from_str(s.trim()).ok()
}

fn parse_matrix(e: &Entry, rows: usize, cols: usize) -> DResult<Vec<Vec<BigRational>>> {
    let m: Vec<Vec<BigRational>> = e
        .value
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| parse_rational(s).ok_or_else(|| e.err(format!("`{s}` is not a rational number"))))
                .collect::<DResult<Vec<_>>>()
        })
        .collect::<DResult<_>>()?;
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(e.err(format!("expected a {rows}x{cols} matrix (rows separated by `;`)")));
    }
    Ok(m)
}

fn to_f64_matrix(m: &[Vec<BigRational>]) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), m.first().map_or(0, Vec::len), |i, j| {
        m[i][j].to_f64().unwrap_or(f64::NAN)
    })
}

struct Resolver<'a> {
    raw: &'a [RawBlock],
    doc: Document,
    in_progress: BTreeSet<String>,
}

/// Parses a document from text. See the module docs for the format.
pub fn parse_document(text: &str) -> DResult<Document> {
    let raw = split_lines(text)?;
    let mut r = Resolver {
        raw: &raw,
        doc: Document {
            order: raw.iter().map(|b| (b.kind, b.name.clone())).collect(),
            ..Document::default()
        },
        in_progress: BTreeSet::new(),
    };
    for kind in [
        BlockKind::LieAlg,
        BlockKind::Algebroid,
        BlockKind::Map,
        BlockKind::Homotopy,
        BlockKind::Path,
        BlockKind::Retraction,
    ] {
        for b in raw.iter().filter(|b| b.kind == kind) {
            r.resolve(b)?;
        }
    }
    Ok(r.doc)
}

impl<'a> Resolver<'a> {
    fn find(&self, kind: BlockKind, name: &str, from: &Entry) -> DResult<&'a RawBlock> {
        self.raw
            .iter()
            .find(|b| b.kind == kind && b.name == name)
            .ok_or_else(|| from.err(format!("undefined {} `{name}`", kind.name())))
    }

    fn resolve(&mut self, b: &RawBlock) -> DResult<()> {
        let done = match b.kind {
            BlockKind::Algebroid => self.doc.algebroids.contains_key(&b.name),
            BlockKind::Map => self.doc.maps.contains_key(&b.name),
            BlockKind::Homotopy => self.doc.homotopies.contains_key(&b.name),
            BlockKind::LieAlg => self.doc.liealgs.contains_key(&b.name),
            BlockKind::Path => self.doc.paths.contains_key(&b.name),
            BlockKind::Retraction => self.doc.retractions.contains_key(&b.name),
        };
        if done {
            return Ok(());
        }
        if !self.in_progress.insert(b.name.clone()) {
            return Err(b.err("circular reference"));
        }
        match b.kind {
            BlockKind::LieAlg => {
                let g = self.liealg(b)?;
                self.doc.liealgs.insert(b.name.clone(), g);
            }
            BlockKind::Algebroid => {
                let a = self.algebroid(b)?;
                self.doc.algebroids.insert(b.name.clone(), Arc::new(a));
            }
            BlockKind::Map => {
                let m = self.map(b)?;
                self.doc.maps.insert(b.name.clone(), m);
            }
            BlockKind::Homotopy => {
                let h = self.homotopy(b)?;
                self.doc.homotopies.insert(b.name.clone(), h);
            }
            BlockKind::Path => {
                let p = self.path(b)?;
                self.doc.paths.insert(b.name.clone(), p);
            }
            BlockKind::Retraction => {
                let r = self.retraction(b)?;
                self.doc.retractions.insert(b.name.clone(), r);
            }
        }
        self.in_progress.remove(&b.name);
        Ok(())
    }

    fn algebroid_ref(&mut self, e: &Entry) -> DResult<Arc<LieAlgebroid>> {
        let raw = self.find(BlockKind::Algebroid, &e.value, e)?;
        self.resolve(raw)?;
        Ok(self.doc.algebroids[&e.value].clone())
    }

    fn map_ref(&mut self, e: &Entry, name: &str) -> DResult<BundleMap> {
        let raw = self.find(BlockKind::Map, name, e)?;
        self.resolve(raw)?;
        Ok(self.doc.maps[name].clone())
    }

    fn homotopy_ref(&mut self, e: &Entry, name: &str) -> DResult<NaturalHomotopy> {
        let raw = self.find(BlockKind::Homotopy, name, e)?;
        self.resolve(raw)?;
        Ok(self.doc.homotopies[name].clone())
    }

    fn liealg(&mut self, b: &RawBlock) -> DResult<MatrixLieAlgebra> {
        b.check_keys(&|k| k == "n" || k.starts_with("basis["))?;
        let basis_entries = b.indexed("basis")?;
        if basis_entries.is_empty() {
            return Err(b.err("no basis matrices"));
        }
        let n = match b.get("n") {
            Some(e) => e.value.parse::<usize>().map_err(|_| e.err("`n` must be a positive integer"))?,
            None => basis_entries[0].1.value.split(';').count(),
        };
        let r = basis_entries.len();
        let mut basis = vec![None; r];
        for (a, e) in basis_entries {
            if a >= r {
                return Err(e.err(format!("basis indices must run 1..{r}")));
            }
            basis[a] = Some(parse_matrix(e, n, n)?);
        }
        let basis = basis.into_iter().map(Option::unwrap).collect();
        MatrixLieAlgebra::new(n, basis).map_err(|e| b.err(e.to_string()))
    }

    fn algebroid(&mut self, b: &RawBlock) -> DResult<LieAlgebroid> {
        if let Some(e) = b.get("tangent") {
            b.check_keys(&|k| k == "tangent")?;
            return tangent_algebroid_on(&list(&e.value)).map_err(|x| e.lib_err(x));
        }
        if let Some(e) = b.get("liealg") {
            b.check_keys(&|k| k == "liealg")?;
            let raw = self.find(BlockKind::LieAlg, &e.value, e)?;
            self.resolve(raw)?;
            return Ok(self.doc.liealgs[&e.value].to_algebroid());
        }
        b.check_keys(&|k| k == "coords" || k == "rank" || k.starts_with("anchor[") || k.starts_with('['))?;
        let coords: Vec<&str> = b.get("coords").map_or(Vec::new(), |e| list(&e.value));
        let rank_e = b.require("rank")?;
        let rank: usize = rank_e.value.parse().map_err(|_| rank_e.err("`rank` must be a non-negative integer"))?;
        let mut a = LieAlgebroid::new(coords.iter().copied(), rank).map_err(|e| b.err(e.to_string()))?;
        let ring = a.ring().clone();
        for (idx, e) in b.indexed("anchor")? {
            if idx >= rank {
                return Err(e.err(format!("frame index {} exceeds rank {rank}", idx + 1)));
            }
            let row = poly_list(e, &ring)?;
            if row.len() != coords.len() {
                return Err(e.err(format!("anchor needs {} components, got {}", coords.len(), row.len())));
            }
            a.set_anchor(idx, row).map_err(|x| e.lib_err(x))?;
        }
        let frame: Vec<String> = (1..=rank).map(|i| format!("e{i}")).collect();
        let mut ext_vars: Vec<String> = ring.vars().to_vec();
        ext_vars.extend(frame.iter().cloned());
        let ext = Ring::with_max_degree(ext_vars, ring.max_degree() + 1);
        for e in b.entries.iter().filter(|e| e.key.starts_with('[')) {
            let names: Vec<&str> = e.key[1..e.key.len() - 1].split(',').map(str::trim).collect();
            let idx = |s: &str| frame.iter().position(|f| f == s);
            let (Some(x), Some(y), 2) = (
                names.first().and_then(|s| idx(s)),
                names.get(1).and_then(|s| idx(s)),
                names.len(),
            ) else {
                return Err(DocError {
                    line: e.line,
                    column: 1,
                    message: format!("bracket key must read `[ei,ej]` with frame symbols e1..e{rank}"),
                });
            };
            let rhs = parse_poly(&e.value, &ext).map_err(|x| e.lib_err(x))?;
            let mut comps = Vec::with_capacity(rank);
            let mut rebuilt = Polynomial::zero(&ext);
            for f in &frame {
                let coeff = rhs.diff(f).map_err(|x| e.lib_err(x))?;
                let fi = ext.index_of(f).unwrap();
                if frame.iter().any(|g| coeff.contains_var(ext.index_of(g).unwrap())) {
                    return Err(e.err("bracket must be linear in the frame symbols"));
                }
                rebuilt += &(&coeff * &Polynomial::var_at(&ext, fi));
                comps.push(coeff.embed(&ring).map_err(|x| e.lib_err(x))?);
            }
            if rebuilt != rhs {
                return Err(e.err("bracket must be a combination of e1..e{rank} with no constant part"));
            }
            a.set_bracket(x, y, comps).map_err(|x| e.lib_err(x))?;
        }
        Ok(a)
    }

    fn map(&mut self, b: &RawBlock) -> DResult<BundleMap> {
        let source = self.algebroid_ref(b.require("source")?)?;
        let target = self.algebroid_ref(b.require("target")?)?;
        let tcoords: Vec<String> = target.coords().to_vec();
        b.check_keys(&|k| {
            k == "source" || k == "target" || k == "Phi" || k.starts_with("Phi[") || tcoords.iter().any(|c| c == k)
        })?;
        let ring = source.ring().clone();
        let zero = Polynomial::zero(&ring);
        let mut base = vec![zero.clone(); target.base_dim()];
        let mut fiber = vec![vec![zero; source.rank()]; target.rank()];
        if let Some(e) = b.get("Phi") {
            if e.value != "identity" {
                return Err(e.err("only `Phi = identity` is recognised"));
            }
            if source.base_dim() != target.base_dim() || source.rank() != target.rank() {
                return Err(e.err("identity needs equal dimensions and ranks"));
            }
            let id = BundleMap::identity(source.clone());
            base = id.base_map().to_vec();
            fiber = id.fiber().to_vec();
        }
        for (j, c) in tcoords.iter().enumerate() {
            if let Some(e) = b.get(c) {
                base[j] = parse_poly(&e.value, &ring).map_err(|x| e.lib_err(x))?;
            }
        }
        for (i, j, e) in b.indexed2("Phi")? {
            if i >= target.rank() || j >= source.rank() {
                return Err(e.err(format!("Phi is {}x{}", target.rank(), source.rank())));
            }
            fiber[i][j] = parse_poly(&e.value, &ring).map_err(|x| e.lib_err(x))?;
        }
        BundleMap::new(source, target, base, fiber).map_err(|e| b.err(e.to_string()))
    }

    fn two_names<'e>(&self, e: &'e Entry, n: usize) -> DResult<Vec<&'e str>> {
        let names = list(&e.value);
        if names.len() != n {
            return Err(e.err(format!("expected {n} homotopy names")));
        }
        Ok(names)
    }

    fn homotopy(&mut self, b: &RawBlock) -> DResult<NaturalHomotopy> {
        if let Some(e) = b.get("vertical").or(b.get("horizontal")) {
            b.check_keys(&|k| k == "vertical" || k == "horizontal")?;
            if b.entries.len() != 1 {
                return Err(b.err("use either `vertical` or `horizontal`"));
            }
            let names = self.two_names(e, 2)?;
            let h = self.homotopy_ref(e, names[0])?;
            let k = self.homotopy_ref(e, names[1])?;
            let out = if e.key == "vertical" {
                h.compose_vertical(&k)
            } else {
                h.compose_horizontal(&k)
            };
            self.doc.composites.insert(b.name.clone());
            return out.map_err(|x| e.lib_err(x));
        }
        if let Some(e) = b.get("interchange") {
            b.check_keys(&|k| k == "interchange")?;
            let n = self.two_names(e, 4)?;
            let hs = n
                .iter()
                .map(|name| self.homotopy_ref(e, name))
                .collect::<DResult<Vec<_>>>()?;
            let lhs = hs[0]
                .compose_horizontal(&hs[2])
                .and_then(|a| a.compose_vertical(&hs[1].compose_horizontal(&hs[3])?))
                .map_err(|x| e.lib_err(x))?;
            self.doc.composites.insert(b.name.clone());
            self.doc.interchanges.insert(
                b.name.clone(),
                Interchange {
                    h0: n[0].into(),
                    h1: n[1].into(),
                    k0: n[2].into(),
                    k1: n[3].into(),
                },
            );
            return Ok(lhs);
        }
        if b.get("piece").is_some() || b.entries.iter().any(|e| e.key.starts_with("piece[")) {
            return self.pieces(b);
        }
        b.check_keys(&|k| matches!(k, "map" | "source" | "target" | "phi") || k.starts_with("theta["))?;
        let (map, mut theta) = if let Some(e) = b.get("map") {
            if b.get("phi").is_some() || b.get("source").is_some() {
                return Err(e.err("give either `map` or `source`/`target`/`phi`"));
            }
            let map = self.map_ref(e, &e.value.clone())?;
            let zero = Polynomial::zero(map.source().ring());
            let n = map.target().rank();
            (map, vec![zero; n])
        } else {
            let source = self.algebroid_ref(b.require("source")?)?;
            let target = self.algebroid_ref(b.require("target")?)?;
            let e = b.require("phi")?;
            let phi = poly_list(e, source.ring())?;
            let h = homotopy_from_map(source, target, phi).map_err(|x| e.lib_err(x))?;
            let piece = h.single().expect("homotopy_from_map gives one piece");
            (piece.map().clone(), piece.section().components().to_vec())
        };
        for (i, e) in b.indexed("theta")? {
            if i >= theta.len() {
                return Err(e.err(format!("theta has {} components", theta.len())));
            }
            theta[i] = parse_poly(&e.value, map.source().ring()).map_err(|x| e.lib_err(x))?;
        }
        let section = SupportedSection::new(&map, theta).map_err(|e| b.err(e.to_string()))?;
        NaturalHomotopy::new(map, section).map_err(|e| b.err(e.to_string()))
    }

    /// `piece[k] = a, b, H` lines, `H` a smooth homotopy read in global time.
    fn pieces(&mut self, b: &RawBlock) -> DResult<NaturalHomotopy> {
        b.check_keys(&|k| k.starts_with("piece["))?;
        let mut entries = b.indexed("piece")?;
        entries.sort_by_key(|(i, _)| *i);
        let mut pieces = Vec::new();
        for (_, e) in entries {
            let parts = list(&e.value);
            let [a, c, name] = parts.as_slice() else {
                return Err(e.err("a piece reads `start, end, homotopy`"));
            };
            let a = parse_rational(a).ok_or_else(|| e.err(format!("`{a}` is not a rational number")))?;
            let c = parse_rational(c).ok_or_else(|| e.err(format!("`{c}` is not a rational number")))?;
            let h = self.homotopy_ref(e, name)?;
            let p = h.single().map_err(|x| e.lib_err(x))?;
            pieces.push(Piece::new(a, c, p.map().clone(), p.section().clone()).map_err(|x| e.lib_err(x))?);
        }
        NaturalHomotopy::from_pieces(pieces).map_err(|e| b.err(e.to_string()))
    }

    fn path(&mut self, b: &RawBlock) -> DResult<PathSpec> {
        b.check_keys(&|k| matches!(k, "liealg" | "phi0" | "phi1") || k.starts_with("theta["))?;
        let e = b.require("liealg")?;
        let raw = self.find(BlockKind::LieAlg, &e.value, e)?;
        self.resolve(raw)?;
        let g = &self.doc.liealgs[&e.value];
        let r = g.dim();
        let ring = Ring::new(["t"]);
        let mut theta = vec![Polynomial::zero(&ring); r];
        for (i, e) in b.indexed("theta")? {
            if i >= r {
                return Err(e.err(format!("the algebra has dimension {r}")));
            }
            theta[i] = parse_poly(&e.value, &ring).map_err(|x| e.lib_err(x))?;
        }
        let matrix = |key: &str| -> DResult<Option<DMatrix<f64>>> {
            match b.get(key) {
                None => Ok(None),
                Some(e) if e.value == "identity" => Ok(Some(DMatrix::identity(r, r))),
                Some(e) => Ok(Some(to_f64_matrix(&parse_matrix(e, r, r)?))),
            }
        };
        Ok(PathSpec {
            liealg: e.value.clone(),
            theta,
            phi0: matrix("phi0")?,
            phi1: matrix("phi1")?,
        })
    }

    fn retraction(&mut self, b: &RawBlock) -> DResult<RetractionSpec> {
        b.check_keys(&|k| matches!(k, "homotopy" | "R" | "AR" | "samples"))?;
        let e = b.require("homotopy")?;
        let h = self.homotopy_ref(e, &e.value.clone())?;
        let ambient = h.source().clone();
        let r_e = b.require("R")?;
        let mut words = r_e.value.split_whitespace();
        let dropped = match words.next() {
            Some("zero") => words
                .map(|w| {
                    ambient
                        .coords()
                        .iter()
                        .position(|c| c == w.trim_matches(','))
                        .ok_or_else(|| r_e.err(format!("unknown coordinate `{w}`")))
                })
                .collect::<DResult<Vec<_>>>()?,
            Some("all") if words.next().is_none() => Vec::new(),
            _ => return Err(r_e.err("R reads `zero x1 x2 ...` or `all`")),
        };
        let ar = b.require("AR")?;
        let mut words = ar.value.split_whitespace();
        if words.next() != Some("span") {
            return Err(ar.err("AR reads `span e1 e2 ...`"));
        }
        let frame = words
            .map(|w| {
                w.trim_matches(',')
                    .strip_prefix('e')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= ambient.rank())
                    .map(|i| i - 1)
                    .ok_or_else(|| ar.err(format!("`{w}` is not a frame element e1..e{}", ambient.rank())))
            })
            .collect::<DResult<Vec<_>>>()?;
        let presentation = SubalgebroidPresentation::new(ambient.clone(), &dropped, &frame).map_err(|x| b.err(x.to_string()))?;
        let samples = match b.get("samples") {
            None => Vec::new(),
            Some(e) => e
                .value
                .split(';')
                .map(|pt| {
                    let coords = list(pt.trim().trim_start_matches('(').trim_end_matches(')'))
                        .iter()
                        .map(|s| {
                            parse_rational(s)
                                .and_then(|q| q.to_f64())
                                .ok_or_else(|| e.err(format!("`{s}` is not a rational number")))
                        })
                        .collect::<DResult<Vec<_>>>()?;
                    if coords.len() != ambient.base_dim() {
                        return Err(e.err(format!("sample points need {} coordinates", ambient.base_dim())));
                    }
                    Ok(coords)
                })
                .collect::<DResult<Vec<_>>>()?,
        };
        Ok(RetractionSpec {
            homotopy: e.value.clone(),
            presentation,
            samples,
        })
    }
}

/// Generator-level test forms on an algebroid: coordinates, frame
/// covectors, coordinate multiples of covectors and pairwise wedges.
pub fn generator_forms(a: &LieAlgebroid) -> Vec<crate::exterior::AlgebroidForm> {
    use crate::exterior::AlgebroidForm;
    let ring = a.ring();
    let r = a.rank();
    let mut out = Vec::new();
    for j in 0..a.base_dim() {
        out.push(AlgebroidForm::function(Polynomial::var_at(ring, j), r));
    }
    for b in 0..r {
        out.push(AlgebroidForm::covector(ring, r, b));
    }
    for j in 0..a.base_dim() {
        for b in 0..r {
            out.push(AlgebroidForm::monomial(Polynomial::var_at(ring, j), r, &[b]));
        }
    }
    for b in 0..r {
        for c in b + 1..r {
            out.push(AlgebroidForm::monomial(Polynomial::one(ring), r, &[b, c]));
        }
    }
    out
}
