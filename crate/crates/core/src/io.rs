//! JSON file formats.
//!
//! Complex numbers are `[re, im]`; matrices are row-major arrays of rows.
//! Output is canonical: object keys sorted, floating-point values written with
//! 17 significant digits, so equal values always serialize to equal bytes.

use crate::dynamics::{DensityMatrix, SpectralFunction, StateVector};
use crate::error::{Error, Result};
use crate::fhlogic::{Atom, FHOperator, FiniteSupportVector, SymbolicSubspace};
use crate::finitary::{EigenSystem, HermitianMatrix, Polynomial, ValueTable};
use crate::linalg::{c64, CMatrix, CVector, C64};
use crate::measurement::{Frame, LabelSet, ObjectSet, PartialLabeling, PartitionPlus};
use crate::socks::{FlipAction, SignedTensor, TruncatedFockVector};
use num_rational::Rational64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub type ComplexDoc = [f64; 2];
pub type VectorDoc = Vec<ComplexDoc>;
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;

/// Parses `text` into `T`; schema violations report a JSON pointer.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = pointer(e.path());
        Error::validation(format!("schema error at '{pointer}': {}", e.inner()))
    })?;
    de.end()
        .map_err(|e| Error::validation(format!("trailing input: {e}")))?;
    Ok(value)
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::validation(format!("cannot serialize: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', 2 * n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").expect("write to string"),
            (_, Some(u)) => write!(out, "{u}").expect("write to string"),
            _ => write_f64(out, n.as_f64().expect("finite number")),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// 17 significant digits in scientific notation.
fn write_f64(out: &mut String, x: f64) {
    let x = if x == 0.0 { 0.0 } else { x };
    write!(out, "{x:.16e}").expect("write to string");
}

/// A value with a JSON document form.
pub trait JsonForm: Sized {
    type Doc: Serialize + DeserializeOwned;
    fn to_doc(&self) -> Self::Doc;
    fn from_doc(doc: Self::Doc) -> Result<Self>;
}

pub fn load<T: JsonForm>(text: &str) -> Result<T> {
    T::from_doc(parse(text)?)
}

pub fn save<T: JsonForm>(value: &T) -> Result<String> {
    to_canonical_string(&value.to_doc())
}

pub fn complex_from_doc(z: ComplexDoc) -> C64 {
    c64(z[0], z[1])
}

pub fn complex_to_doc(z: C64) -> ComplexDoc {
    [z.re, z.im]
}

pub fn vector_from_doc(v: &[ComplexDoc]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&z| complex_from_doc(z)))
}

pub fn vector_to_doc(v: &CVector) -> VectorDoc {
    v.iter().map(|&z| complex_to_doc(z)).collect()
}

pub fn matrix_from_doc(rows: &MatrixDoc) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if let Some(k) = rows.iter().position(|r| r.len() != m) {
        return Err(Error::validation(format!(
            "row {k} has {} entries, expected {m}",
            rows[k].len()
        )));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| complex_from_doc(rows[i][j])))
}

pub fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_doc(m[(i, j)])).collect())
        .collect()
}

impl JsonForm for HermitianMatrix {
    type Doc = MatrixDoc;

    fn to_doc(&self) -> MatrixDoc {
        matrix_to_doc(self.matrix())
    }

    fn from_doc(doc: MatrixDoc) -> Result<Self> {
        HermitianMatrix::new(matrix_from_doc(&doc)?)
    }
}

/// An eigenvalue: a real number, or `[re, im]` (rejected unless real).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Real(f64),
    Complex(ComplexDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub value: ScalarDoc,
    pub vector: VectorDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSystemDoc {
    pub ambient_dim: usize,
    pub pairs: Vec<PairDoc>,
}

impl JsonForm for EigenSystem {
    type Doc = EigenSystemDoc;

    fn to_doc(&self) -> EigenSystemDoc {
        EigenSystemDoc {
            ambient_dim: self.dim(),
            pairs: self
                .pairs()
                .iter()
                .map(|p| PairDoc {
                    value: ScalarDoc::Real(p.value),
                    vector: vector_to_doc(&p.vector),
                })
                .collect(),
        }
    }

    fn from_doc(doc: EigenSystemDoc) -> Result<Self> {
        let pairs = doc
            .pairs
            .iter()
            .map(|p| {
                let value = match p.value {
                    ScalarDoc::Real(x) => c64(x, 0.0),
                    ScalarDoc::Complex(z) => complex_from_doc(z),
                };
                (value, vector_from_doc(&p.vector))
            })
            .collect();
        EigenSystem::from_eigenpairs(pairs, doc.ambient_dim)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub vector: VectorDoc,
}

impl JsonForm for StateVector {
    type Doc = StateDoc;

    fn to_doc(&self) -> StateDoc {
        StateDoc {
            vector: vector_to_doc(self.vector()),
        }
    }

    fn from_doc(doc: StateDoc) -> Result<Self> {
        StateVector::new(vector_from_doc(&doc.vector))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityDoc {
    pub matrix: MatrixDoc,
}

impl JsonForm for DensityMatrix {
    type Doc = DensityDoc;

    fn to_doc(&self) -> DensityDoc {
        DensityDoc {
            matrix: matrix_to_doc(self.matrix()),
        }
    }

    fn from_doc(doc: DensityDoc) -> Result<Self> {
        DensityMatrix::new(matrix_from_doc(&doc.matrix)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    /// Defaults to every non-distinguished element of the blocks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<Vec<String>>,
    pub distinguished: String,
    pub blocks: Vec<Vec<String>>,
}

impl JsonForm for PartitionPlus {
    type Doc = PartitionDoc;

    fn to_doc(&self) -> PartitionDoc {
        PartitionDoc {
            objects: Some(self.objects().elements().to_vec()),
            distinguished: self.objects().distinguished().to_string(),
            blocks: self.named_blocks(),
        }
    }

    fn from_doc(doc: PartitionDoc) -> Result<Self> {
        let objects = match doc.objects {
            Some(list) => list,
            None => doc
                .blocks
                .iter()
                .flatten()
                .filter(|name| **name != doc.distinguished)
                .cloned()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        PartitionPlus::from_names(ObjectSet::new(objects, doc.distinguished)?, &doc.blocks)
    }
}

/// Objects, the distinguished element and labels; `label_ranks` (rationals
/// such as `"1/2"`) makes the labels totally ordered.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub objects: Vec<String>,
    pub distinguished: String,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_ranks: Option<Vec<String>>,
}

impl JsonForm for Frame {
    type Doc = FrameDoc;

    fn to_doc(&self) -> FrameDoc {
        FrameDoc {
            objects: self.objects().elements().to_vec(),
            distinguished: self.objects().distinguished().to_string(),
            labels: self.labels().values().to_vec(),
            label_ranks: self
                .labels()
                .ranks()
                .map(|r| r.iter().map(|q| q.to_string()).collect()),
        }
    }

    fn from_doc(doc: FrameDoc) -> Result<Self> {
        let objects = ObjectSet::new(doc.objects, doc.distinguished)?;
        let labels = match doc.label_ranks {
            None => LabelSet::new(doc.labels)?,
            Some(ranks) => {
                if ranks.len() != doc.labels.len() {
                    return Err(Error::validation(format!(
                        "{} ranks for {} labels",
                        ranks.len(),
                        doc.labels.len()
                    )));
                }
                let mut values = Vec::with_capacity(ranks.len());
                for (name, rank) in doc.labels.into_iter().zip(ranks) {
                    let q: Rational64 = rank
                        .parse()
                        .map_err(|_| Error::validation(format!("invalid rational rank {rank:?}")))?;
                    values.push((name, q));
                }
                LabelSet::ordered(values)?
            }
        };
        Ok(Frame::new(objects, labels))
    }
}

/// `{"entries": {"object": "label", ...}}`
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingDoc {
    pub entries: BTreeMap<String, String>,
}

pub fn labeling_from_doc(frame: &Frame, doc: &LabelingDoc) -> Result<PartialLabeling> {
    let pairs: Vec<(&str, &str)> = doc
        .entries
        .iter()
        .map(|(x, y)| (x.as_str(), y.as_str()))
        .collect();
    frame.labeling(&pairs)
}

pub fn labeling_to_doc(frame: &Frame, f: &PartialLabeling) -> LabelingDoc {
    LabelingDoc {
        entries: f
            .entries()
            .iter()
            .map(|(&x, &y)| {
                (
                    frame.objects().elements()[x].clone(),
                    frame.labels().values()[y].clone(),
                )
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockDoc {
    pub coeffs: VectorDoc,
}

impl JsonForm for TruncatedFockVector {
    type Doc = FockDoc;

    fn to_doc(&self) -> FockDoc {
        FockDoc {
            coeffs: self.coeffs().iter().map(|&z| complex_to_doc(z)).collect(),
        }
    }

    fn from_doc(doc: FockDoc) -> Result<Self> {
        TruncatedFockVector::new(doc.coeffs.iter().map(|&z| complex_from_doc(z)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    #[serde(rename = "N")]
    pub n: usize,
    pub table: VectorDoc,
}

impl JsonForm for SignedTensor {
    type Doc = TensorDoc;

    fn to_doc(&self) -> TensorDoc {
        TensorDoc {
            n: self.n(),
            table: self.table().iter().map(|&z| complex_to_doc(z)).collect(),
        }
    }

    fn from_doc(doc: TensorDoc) -> Result<Self> {
        SignedTensor::new(doc.n, doc.table.iter().map(|&z| complex_from_doc(z)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipsDoc {
    pub pairs: Vec<usize>,
}

impl JsonForm for FlipAction {
    type Doc = FlipsDoc;

    fn to_doc(&self) -> FlipsDoc {
        FlipsDoc {
            pairs: self.pairs().iter().copied().collect(),
        }
    }

    fn from_doc(doc: FlipsDoc) -> Result<Self> {
        Ok(FlipAction::new(doc.pairs))
    }
}

fn atoms_from_names(names: &[String]) -> Result<Vec<Atom>> {
    names.iter().map(|s| s.parse()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FhDoc {
    pub support: Vec<String>,
    #[serde(rename = "F")]
    pub f: MatrixDoc,
    pub tail: ComplexDoc,
}

impl JsonForm for FHOperator {
    type Doc = FhDoc;

    fn to_doc(&self) -> FhDoc {
        FhDoc {
            support: self.support().iter().map(|a| a.to_string()).collect(),
            f: matrix_to_doc(self.matrix()),
            tail: complex_to_doc(self.tail()),
        }
    }

    fn from_doc(doc: FhDoc) -> Result<Self> {
        let support = atoms_from_names(&doc.support)?;
        let k = support.len();
        let matrix = if doc.f.is_empty() {
            CMatrix::zeros(0, 0)
        } else {
            matrix_from_doc(&doc.f)?
        };
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::validation(format!(
                "F is {}x{} for a support of {k} atoms",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        FHOperator::new(support, matrix, complex_from_doc(doc.tail))
    }
}

/// Finite-support vector: `{"a1": [re, im], ...}`.
pub type SparseDoc = BTreeMap<String, ComplexDoc>;

pub fn sparse_from_doc(doc: &SparseDoc) -> Result<FiniteSupportVector> {
    let mut entries = Vec::with_capacity(doc.len());
    for (name, &z) in doc {
        entries.push((name.parse::<Atom>()?, complex_from_doc(z)));
    }
    Ok(FiniteSupportVector::new(entries))
}

pub fn sparse_to_doc(v: &FiniteSupportVector) -> SparseDoc {
    v.entries()
        .iter()
        .map(|(a, &z)| (a.to_string(), complex_to_doc(z)))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceDoc {
    pub finite: Vec<SparseDoc>,
    pub cofinite_excluding: Option<Vec<String>>,
}

impl JsonForm for SymbolicSubspace {
    type Doc = SubspaceDoc;

    fn to_doc(&self) -> SubspaceDoc {
        SubspaceDoc {
            finite: self.finite_part().iter().map(sparse_to_doc).collect(),
            cofinite_excluding: self
                .cofinite_excluding()
                .map(|e| e.iter().map(|a| a.to_string()).collect()),
        }
    }

    fn from_doc(doc: SubspaceDoc) -> Result<Self> {
        let finite = doc.finite.iter().map(sparse_from_doc).collect::<Result<_>>()?;
        let excluded = match doc.cofinite_excluding {
            Some(names) => Some(atoms_from_names(&names)?.into_iter().collect()),
            None => None,
        };
        SymbolicSubspace::new(finite, excluded)
    }
}

/// Exactly one of `points` (`[[x, f(x)], ...]`) or `poly` (ascending
/// coefficients).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<f64>>,
}

impl JsonForm for SpectralFunction {
    type Doc = FunctionDoc;

    fn to_doc(&self) -> FunctionDoc {
        match self {
            SpectralFunction::Poly(p) => FunctionDoc {
                points: None,
                poly: Some(p.coeffs().to_vec()),
            },
            SpectralFunction::Table(t) => FunctionDoc {
                points: Some(t.points.iter().map(|&(x, y)| [x, y]).collect()),
                poly: None,
            },
        }
    }

    fn from_doc(doc: FunctionDoc) -> Result<Self> {
        match (doc.points, doc.poly) {
            (Some(points), None) => Ok(SpectralFunction::Table(ValueTable {
                points: points.into_iter().map(|[x, y]| (x, y)).collect(),
            })),
            (None, Some(c)) => Ok(SpectralFunction::Poly(Polynomial::new(c))),
            _ => Err(Error::validation(
                "function needs exactly one of 'points' or 'poly'",
            )),
        }
    }
}
