//! A JSON text format for every structure the crate computes with, and the reports
//! emitted by the command-line driver.
//!
//! A document lists its graded spaces and multilinear maps once, by identifier, and a
//! tagged `structure` section refers to them. Coefficients are strings in canonical
//! form (residues mod `p`, `num/den` over the rationals), so writing a parsed
//! document reproduces it byte for byte.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dga::{Dga, DgaError};
use crate::field::{Field, FieldError};
use crate::graded::{ChainComplex, GradedError, GradedSpace, Grading, MultiMap};
use crate::structures::{AlgebraMorphism, AnAlgebra, AnModule, AnMorphism, Side, StructureError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown {kind} identifier {id}")]
    Missing { kind: &'static str, id: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
}

pub const FORMAT: &str = "stasheff-structure";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldDoc {
    Prime(u32),
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowDoc {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradingDoc {
    Integer,
    Periodic(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub id: String,
    pub label: String,
    pub grading: GradingDoc,
    pub window: Option<WindowDoc>,
    /// `(name, degree)` pairs in basis order.
    pub basis: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    /// Basis names of the input tuple.
    pub input: Vec<String>,
    /// `(coefficient, output basis name)` pairs.
    pub output: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub id: String,
    pub name: String,
    pub inputs: Vec<String>,
    pub target: String,
    pub degree: i64,
    pub valid: Option<WindowDoc>,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub name: String,
    pub space: String,
    pub ops: Vec<String>,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub name: String,
    pub space: String,
    pub side: Side,
    pub ops: Vec<String>,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaDoc {
    pub name: String,
    pub space: String,
    pub d: String,
    pub mu: String,
    pub unit: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureDoc {
    Dga(DgaDoc),
    AnAlgebra(AlgebraDoc),
    AnModule {
        algebra: AlgebraDoc,
        module: ModuleDoc,
    },
    AnMorphism {
        algebra: AlgebraDoc,
        source: ModuleDoc,
        target: ModuleDoc,
        name: String,
        comps: Vec<String>,
        order: usize,
    },
    /// A morphism of A_n-algebras from a minimal model into a DGA.
    AlgebraMorphism {
        source: AlgebraDoc,
        target: DgaDoc,
        name: String,
        comps: Vec<String>,
        order: usize,
    },
    /// A chain complex: a space and a degree -1 differential.
    Complex {
        space: String,
        d: String,
    },
    /// A linear map between spaces, such as a tower attaching map.
    ChainMap {
        map: String,
    },
}

/// The on-disk document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub format: String,
    pub version: u32,
    pub field: FieldDoc,
    pub window: Option<WindowDoc>,
    pub spaces: Vec<SpaceDoc>,
    pub maps: Vec<MapDoc>,
    pub structure: StructureDoc,
}

/// Any structure a document can hold.
#[derive(Clone, Debug)]
pub enum Structure {
    Dga(Dga),
    AnAlgebra(AnAlgebra),
    AnModule(AnModule),
    AnMorphism(AnMorphism),
    AlgebraMorphism(AlgebraMorphism),
    Complex(ChainComplex),
    ChainMap(MultiMap),
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Dga(_) => "dga",
            Structure::AnAlgebra(_) => "an_algebra",
            Structure::AnModule(_) => "an_module",
            Structure::AnMorphism(_) => "an_morphism",
            Structure::AlgebraMorphism(_) => "algebra_morphism",
            Structure::Complex(_) => "complex",
            Structure::ChainMap(_) => "chain_map",
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Structure::Dga(a) => a.field(),
            Structure::AnAlgebra(a) => a.field(),
            Structure::AnModule(x) => x.field(),
            Structure::AnMorphism(g) => g.field(),
            Structure::AlgebraMorphism(f) => f.source.field(),
            Structure::Complex(c) => c.space.field(),
            Structure::ChainMap(m) => m.field(),
        }
    }
}

fn window_doc(w: Option<(i64, i64)>) -> Option<WindowDoc> {
    w.map(|(lo, hi)| WindowDoc { lo, hi })
}

fn window_of(w: &Option<WindowDoc>) -> Option<(i64, i64)> {
    w.as_ref().map(|w| (w.lo, w.hi))
}

/// Collects spaces and maps, assigning identifiers in order of first use.
struct Writer {
    spaces: Vec<SpaceDoc>,
    maps: Vec<MapDoc>,
    space_ids: Vec<(Arc<GradedSpace>, String)>,
}

impl Writer {
    fn new() -> Self {
        Writer { spaces: Vec::new(), maps: Vec::new(), space_ids: Vec::new() }
    }

    fn space(&mut self, s: &Arc<GradedSpace>) -> String {
        if let Some((_, id)) = self.space_ids.iter().find(|(t, _)| Arc::ptr_eq(t, s) || **t == **s) {
            return id.clone();
        }
        let id = format!("s{}", self.spaces.len());
        self.spaces.push(SpaceDoc {
            id: id.clone(),
            label: s.label().to_string(),
            grading: match s.grading() {
                Grading::Integer => GradingDoc::Integer,
                Grading::Periodic(p) => GradingDoc::Periodic(p),
            },
            window: window_doc(s.window()),
            basis: (0..s.dim()).map(|i| (s.name(i).to_string(), s.degree(i))).collect(),
        });
        self.space_ids.push((s.clone(), id.clone()));
        id
    }

    fn map(&mut self, m: &MultiMap) -> String {
        let inputs: Vec<String> = m.inputs().iter().map(|s| self.space(s)).collect();
        let target = self.space(m.target());
        let id = format!("m{}", self.maps.len());
        let entries = m
            .entries()
            .iter()
            .map(|(t, v)| EntryDoc {
                input: t.iter().zip(m.inputs()).map(|(i, s)| s.name(*i).to_string()).collect(),
                output: v.iter().map(|(o, c)| (c.to_text(), m.target().name(*o).to_string())).collect(),
            })
            .collect();
        self.maps.push(MapDoc {
            id: id.clone(),
            name: m.name().to_string(),
            inputs,
            target,
            degree: m.degree(),
            valid: window_doc(m.valid()),
            entries,
        });
        id
    }

    fn algebra(&mut self, r: &AnAlgebra) -> AlgebraDoc {
        let space = self.space(&r.space);
        let ops = trimmed(r.ops()).iter().map(|m| self.map(m)).collect();
        AlgebraDoc { name: r.name.clone(), space, ops, order: r.order }
    }

    fn module(&mut self, x: &AnModule) -> ModuleDoc {
        let space = self.space(&x.space);
        let ops = trimmed(x.ops()).iter().map(|m| self.map(m)).collect();
        ModuleDoc { name: x.name.clone(), space, side: x.side, ops, order: x.order }
    }

    fn dga(&mut self, a: &Dga) -> DgaDoc {
        let space = self.space(&a.space);
        let d = self.map(&a.d);
        let mu = self.map(&a.mu);
        let unit = a.unit.iter().map(|(i, c)| (c.to_text(), a.space.name(*i).to_string())).collect();
        DgaDoc { name: a.name.clone(), space, d, mu, unit }
    }
}

/// Serializes a structure with an optional certified window.
pub fn to_file(s: &Structure, window: Option<(i64, i64)>) -> StructureFile {
    let mut w = Writer::new();
    let structure = match s {
        Structure::Dga(a) => StructureDoc::Dga(w.dga(a)),
        Structure::AnAlgebra(r) => StructureDoc::AnAlgebra(w.algebra(r)),
        Structure::AnModule(x) => {
            let algebra = w.algebra(&x.algebra);
            StructureDoc::AnModule { algebra, module: w.module(x) }
        }
        Structure::AnMorphism(g) => {
            let algebra = w.algebra(&g.source.algebra);
            let source = w.module(&g.source);
            let target = w.module(&g.target);
            let comps = g.comps().iter().map(|m| w.map(m)).collect();
            StructureDoc::AnMorphism { algebra, source, target, name: g.name.clone(), comps, order: g.order }
        }
        Structure::AlgebraMorphism(f) => {
            let source = w.algebra(&f.source);
            let target = DgaDoc {
                name: f.target.name.clone(),
                space: w.space(&f.target.space),
                d: w.map(&f.target.op_or_zero(1)),
                mu: w.map(&f.target.op_or_zero(2)),
                unit: Vec::new(),
            };
            let comps = f.comps().iter().map(|m| w.map(m)).collect();
            StructureDoc::AlgebraMorphism { source, target, name: f.name.clone(), comps, order: f.order }
        }
        Structure::Complex(c) => {
            let space = w.space(&c.space);
            StructureDoc::Complex { space, d: w.map(&c.d) }
        }
        Structure::ChainMap(m) => StructureDoc::ChainMap { map: w.map(m) },
    };
    StructureFile {
        format: FORMAT.into(),
        version: VERSION,
        field: match s.field() {
            Field::Prime(p) => FieldDoc::Prime(p),
            Field::Rational => FieldDoc::Rational,
        },
        window: window_doc(window),
        spaces: w.spaces,
        maps: w.maps,
        structure,
    }
}

/// Canonical text: pretty-printed JSON with a trailing newline.
pub fn to_text(f: &StructureFile) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("documents serialize");
    s.push('\n');
    s
}

pub fn serialize(s: &Structure, window: Option<(i64, i64)>) -> String {
    to_text(&to_file(s, window))
}

struct Reader<'a> {
    file: &'a StructureFile,
    field: Field,
    spaces: HashMap<String, Arc<GradedSpace>>,
    maps: HashMap<&'a str, &'a MapDoc>,
}

impl<'a> Reader<'a> {
    fn new(file: &'a StructureFile) -> Result<Self, IoError> {
        if file.format != FORMAT || file.version != VERSION {
            return Err(IoError::Invalid(format!("unsupported format {} version {}", file.format, file.version)));
        }
        let field = match file.field {
            FieldDoc::Prime(p) => Field::prime(p)?,
            FieldDoc::Rational => Field::Rational,
        };
        let mut spaces = HashMap::new();
        for s in &file.spaces {
            let grading = match s.grading {
                GradingDoc::Integer => Grading::Integer,
                GradingDoc::Periodic(p) if p > 0 => Grading::Periodic(p),
                GradingDoc::Periodic(p) => return Err(IoError::Invalid(format!("period {p} must be positive"))),
            };
            let g = GradedSpace::new(s.label.clone(), field, grading, s.basis.clone(), window_of(&s.window))?;
            if spaces.insert(s.id.clone(), g.shared()).is_some() {
                return Err(IoError::Invalid(format!("duplicate space identifier {}", s.id)));
            }
        }
        let mut maps = HashMap::new();
        for m in &file.maps {
            if maps.insert(m.id.as_str(), m).is_some() {
                return Err(IoError::Invalid(format!("duplicate map identifier {}", m.id)));
            }
        }
        Ok(Reader { file, field, spaces, maps })
    }

    fn space(&self, id: &str) -> Result<Arc<GradedSpace>, IoError> {
        self.spaces.get(id).cloned().ok_or_else(|| IoError::Missing { kind: "space", id: id.into() })
    }

    fn map(&self, id: &str) -> Result<MultiMap, IoError> {
        let doc = self.maps.get(id).ok_or_else(|| IoError::Missing { kind: "map", id: id.into() })?;
        let inputs: Vec<Arc<GradedSpace>> = doc.inputs.iter().map(|s| self.space(s)).collect::<Result<_, _>>()?;
        let target = self.space(&doc.target)?;
        let mut m = MultiMap::zero(doc.name.clone(), inputs.clone(), target.clone(), doc.degree);
        m.set_valid(window_of(&doc.valid));
        for e in &doc.entries {
            if e.input.len() != inputs.len() {
                return Err(IoError::Invalid(format!("map {}: entry of the wrong arity", doc.id)));
            }
            let tuple: Vec<usize> = e.input.iter().zip(&inputs).map(|(n, s)| s.find(n)).collect::<Result<_, _>>()?;
            if m.entries().contains_key(&tuple) {
                return Err(IoError::Invalid(format!("map {}: repeated input {:?}", doc.id, e.input)));
            }
            let mut v = Vec::new();
            for (c, o) in &e.output {
                v.push((target.find(o)?, self.field.parse(c)?));
            }
            m.set(tuple, crate::linalg::from_pairs(v))?;
        }
        Ok(m)
    }

    fn algebra(&self, a: &AlgebraDoc) -> Result<AnAlgebra, IoError> {
        let ops = a.ops.iter().map(|id| self.map(id)).collect::<Result<_, _>>()?;
        Ok(AnAlgebra::new(a.name.clone(), self.space(&a.space)?, ops, a.order)?)
    }

    fn module(&self, h: &Arc<AnAlgebra>, x: &ModuleDoc) -> Result<AnModule, IoError> {
        let ops = x.ops.iter().map(|id| self.map(id)).collect::<Result<_, _>>()?;
        Ok(AnModule::new(x.name.clone(), h.clone(), self.space(&x.space)?, x.side, ops, x.order)?)
    }

    fn dga(&self, a: &DgaDoc) -> Result<Dga, IoError> {
        let space = self.space(&a.space)?;
        let mut unit = Vec::new();
        for (c, n) in &a.unit {
            unit.push((space.find(n)?, self.field.parse(c)?));
        }
        Ok(Dga::new(a.name.clone(), space, self.map(&a.d)?, self.map(&a.mu)?, crate::linalg::from_pairs(unit))?)
    }

    fn structure(&self) -> Result<Structure, IoError> {
        Ok(match &self.file.structure {
            StructureDoc::Dga(a) => Structure::Dga(self.dga(a)?),
            StructureDoc::AnAlgebra(a) => Structure::AnAlgebra(self.algebra(a)?),
            StructureDoc::AnModule { algebra, module } => {
                let h = Arc::new(self.algebra(algebra)?);
                Structure::AnModule(self.module(&h, module)?)
            }
            StructureDoc::AnMorphism { algebra, source, target, name, comps, order } => {
                let h = Arc::new(self.algebra(algebra)?);
                let x = Arc::new(self.module(&h, source)?);
                let y = Arc::new(self.module(&h, target)?);
                let comps = comps.iter().map(|id| self.map(id)).collect::<Result<_, _>>()?;
                Structure::AnMorphism(AnMorphism::new(name.clone(), x, y, comps, *order)?)
            }
            StructureDoc::AlgebraMorphism { source, target, name, comps, order } => {
                let h = Arc::new(self.algebra(source)?);
                let space = self.space(&target.space)?;
                let a = AnAlgebra::new(target.name.clone(), space, vec![self.map(&target.d)?, self.map(&target.mu)?], 2)?;
                let comps = comps.iter().map(|id| self.map(id)).collect::<Result<_, _>>()?;
                Structure::AlgebraMorphism(AlgebraMorphism::new(name.clone(), h, Arc::new(a), comps, *order)?)
            }
            StructureDoc::Complex { space, d } => Structure::Complex(ChainComplex { space: self.space(space)?, d: self.map(d)? }),
            StructureDoc::ChainMap { map } => Structure::ChainMap(self.map(map)?),
        })
    }
}

/// Parses a document and rebuilds its structure; returns the declared window too.
pub fn parse(text: &str) -> Result<(Structure, Option<(i64, i64)>), IoError> {
    let file: StructureFile = serde_json::from_str(text)?;
    let r = Reader::new(&file)?;
    Ok((r.structure()?, window_of(&file.window)))
}

macro_rules! expect_kind {
    ($fn:ident, $variant:ident, $ty:ty, $name:literal) => {
        pub fn $fn(s: Structure) -> Result<$ty, IoError> {
            let found = s.kind();
            match s {
                Structure::$variant(v) => Ok(v),
                _ => Err(IoError::WrongKind { expected: $name, found }),
            }
        }
    };
}

expect_kind!(expect_dga, Dga, Dga, "dga");
expect_kind!(expect_algebra, AnAlgebra, AnAlgebra, "an_algebra");
expect_kind!(expect_module, AnModule, AnModule, "an_module");
expect_kind!(expect_morphism, AnMorphism, AnMorphism, "an_morphism");

/// Machine-readable outcome of a CLI command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: crate::structures::Verdict,
    pub certified: Option<WindowDoc>,
    pub first_failure: Option<crate::structures::Failure>,
    pub details: serde_json::Value,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

// Trailing zero operations are implied by the order and left out of the document.
fn trimmed(ops: &[MultiMap]) -> &[MultiMap] {
    let keep = ops.iter().rposition(|m| !m.is_zero()).map_or(0, |i| i + 1).max(2.min(ops.len()));
    &ops[..keep]
}
