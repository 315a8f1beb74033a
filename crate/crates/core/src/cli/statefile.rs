//! JSON state files.
//!
//! ```json
//! {"kind": "pure", "dims": [2, 2],
//!  "data": [["7.0710678118654757e-1", "0.0000000000000000e0"], ...],
//!  "meta": {}}
//! ```
//!
//! Complex entries are `[re, im]` pairs of decimal strings with 17
//! significant digits, which round-trip every `f64` exactly. Plain JSON
//! numbers are accepted on input. `data` is a vector for `pure`, a list of
//! rows for `density`, a list of basis columns for `subspace` and, for
//! `product_basis`, one list of local factors per state.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::constructions::ProductBasis;
use crate::error::Error;
use crate::linalg::{ComplexMatrix, DimVec, C64};
use crate::states::{DensityOperator, ProductState, PureState, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Pure,
    Density,
    ProductBasis,
    Subspace,
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateKind::Pure => "pure",
            StateKind::Density => "density",
            StateKind::ProductBasis => "product_basis",
            StateKind::Subspace => "subspace",
        })
    }
}

/// One complex number on the wire.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry(pub C64);

pub fn format_decimal(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&format_decimal(self.0.re))?;
        seq.serialize_element(&format_decimal(self.0.im))?;
        seq.end()
    }
}

struct Decimal(f64);

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Decimal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a decimal string or number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Decimal, E> {
                let x: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| E::custom(format!("invalid decimal {v:?}")))?;
                if !x.is_finite() {
                    return Err(E::custom(format!("non-finite value {v:?}")));
                }
                Ok(Decimal(x))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Decimal, E> {
                Ok(Decimal(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Decimal, E> {
                Ok(Decimal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Decimal, E> {
                Ok(Decimal(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Entry;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [re, im] pair")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Entry, A::Error> {
                let re: Decimal = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: Decimal = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Entry(C64::new(re.0, im.0)))
            }
        }
        d.deserialize_seq(V)
    }
}

/// Parsed file. Entries keep the nesting of their kind.
#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Vector(Vec<Entry>),
    Rows(Vec<Vec<Entry>>),
    Factors(Vec<Vec<Vec<Entry>>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub kind: StateKind,
    pub dims: Vec<usize>,
    pub data: StateData,
    pub meta: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Wire<'a, D> {
    kind: StateKind,
    dims: &'a [usize],
    data: D,
    meta: &'a BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Header {
    kind: StateKind,
    #[allow(dead_code)]
    dims: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Typed<D> {
    #[allow(dead_code)]
    kind: StateKind,
    dims: Vec<usize>,
    data: D,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

/// Malformed input: syntax or shape, with position and JSON path.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}, at {}: {}",
            self.line, self.column, self.path, self.message
        )
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) if e.line() > 0 => s[..i].to_string(),
        _ => s,
    }
}

fn typed<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            line: inner.line(),
            column: inner.column(),
            path,
            message: strip_position(&inner),
        }
    })?;
    de.end().map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: strip_position(&e),
    })?;
    Ok(value)
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let header: Header = typed(text)?;
        let (dims, data, meta) = match header.kind {
            StateKind::Pure => {
                let t: Typed<Vec<Entry>> = typed(text)?;
                (t.dims, StateData::Vector(t.data), t.meta)
            }
            StateKind::Density | StateKind::Subspace => {
                let t: Typed<Vec<Vec<Entry>>> = typed(text)?;
                (t.dims, StateData::Rows(t.data), t.meta)
            }
            StateKind::ProductBasis => {
                let t: Typed<Vec<Vec<Vec<Entry>>>> = typed(text)?;
                (t.dims, StateData::Factors(t.data), t.meta)
            }
        };
        Ok(Self {
            kind: header.kind,
            dims,
            data,
            meta,
        })
    }

    pub fn to_json(&self) -> String {
        let out = match &self.data {
            StateData::Vector(v) => serde_json::to_string_pretty(&self.wire(v)),
            StateData::Rows(v) => serde_json::to_string_pretty(&self.wire(v)),
            StateData::Factors(v) => serde_json::to_string_pretty(&self.wire(v)),
        };
        let mut s = out.expect("state files always serialize");
        s.push('\n');
        s
    }

    fn wire<'a, D>(&'a self, data: D) -> Wire<'a, D> {
        Wire {
            kind: self.kind,
            dims: &self.dims,
            data,
            meta: &self.meta,
        }
    }

    fn dim_vec(&self) -> Result<DimVec, Error> {
        DimVec::new(self.dims.clone())
    }

    fn expect_kind(&self, kind: StateKind) -> Result<(), Error> {
        if self.kind != kind {
            return Err(Error::InvalidState(format!(
                "expected a {kind} file, got {}",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            kind: StateKind::Pure,
            dims: psi.dims().as_slice().to_vec(),
            data: StateData::Vector(entries(psi.amplitudes())),
            meta: BTreeMap::new(),
        }
    }

    pub fn to_pure(&self) -> Result<PureState, Error> {
        self.expect_kind(StateKind::Pure)?;
        let StateData::Vector(v) = &self.data else {
            unreachable!("pure files carry vectors")
        };
        PureState::new(self.dim_vec()?, values(v))
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self {
            kind: StateKind::Density,
            dims: rho.dims().as_slice().to_vec(),
            data: StateData::Rows(matrix_rows(rho.matrix())),
            meta: BTreeMap::new(),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator, Error> {
        self.expect_kind(StateKind::Density)?;
        DensityOperator::new(self.dim_vec()?, self.rows_matrix()?)
    }

    /// Raw matrix of a density file, without the state checks.
    pub fn rows_matrix(&self) -> Result<ComplexMatrix, Error> {
        let StateData::Rows(rows) = &self.data else {
            return Err(Error::InvalidState(format!("{} file has no rows", self.kind)));
        };
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows of unequal length".into()));
        }
        ComplexMatrix::from_row_major(n, n, rows.iter().flat_map(|r| values(r)).collect())
    }

    pub fn from_subspace(sub: &Subspace) -> Self {
        Self {
            kind: StateKind::Subspace,
            dims: sub.dims().as_slice().to_vec(),
            data: StateData::Rows(sub.vectors().iter().map(|v| entries(v)).collect()),
            meta: BTreeMap::new(),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace, Error> {
        self.expect_kind(StateKind::Subspace)?;
        let StateData::Rows(cols) = &self.data else {
            unreachable!("subspace files carry rows")
        };
        let cols: Vec<Vec<C64>> = cols.iter().map(|c| values(c)).collect();
        Subspace::from_orthonormal(self.dim_vec()?, ComplexMatrix::from_columns(&cols)?)
    }

    /// Metadata records the construction, the orthogonality claim, the
    /// claimed complement dimension and the divided-out norms.
    pub fn from_product_basis(basis: &ProductBasis) -> Self {
        let mut meta = BTreeMap::new();
        meta.insert("construction".into(), basis.label().to_string());
        meta.insert("orthogonal".into(), basis.orthogonal().to_string());
        meta.insert(
            "claimed_complement_dim".into(),
            basis.claimed_complement_dim().to_string(),
        );
        meta.insert(
            "normalization".into(),
            basis
                .scale_factors()
                .iter()
                .map(|&x| format_decimal(x))
                .collect::<Vec<_>>()
                .join(","),
        );
        Self {
            kind: StateKind::ProductBasis,
            dims: basis.dims().as_slice().to_vec(),
            data: StateData::Factors(
                basis
                    .states()
                    .iter()
                    .map(|s| s.factors().iter().map(|f| entries(f)).collect())
                    .collect(),
            ),
            meta,
        }
    }

    pub fn to_product_basis(&self) -> Result<ProductBasis, Error> {
        self.expect_kind(StateKind::ProductBasis)?;
        let dims = self.dim_vec()?;
        let StateData::Factors(states) = &self.data else {
            unreachable!("product basis files carry factors")
        };
        let states = states
            .iter()
            .map(|s| ProductState::new(s.iter().map(|f| values(f)).collect()))
            .collect::<Result<Vec<_>, Error>>()?;
        let label = self.meta.get("construction").cloned().unwrap_or_default();
        let scales = match self.meta.get("normalization") {
            Some(s) if !s.is_empty() => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidState(format!("bad normalization entry {t:?}")))
                })
                .collect::<Result<Vec<_>, Error>>()?,
            _ => vec![1.0; states.len()],
        };
        let mut basis = ProductBasis::with_scale_factors(dims, states, scales, label)?;
        if let Some(flag) = self.meta.get("orthogonal") {
            let claim = flag
                .parse::<bool>()
                .map_err(|_| Error::InvalidState(format!("bad orthogonal flag {flag:?}")))?;
            basis = basis.with_orthogonal_claim(claim);
        }
        if let Some(c) = self.meta.get("claimed_complement_dim") {
            let claimed: usize = c
                .parse()
                .map_err(|_| Error::InvalidState(format!("bad claimed_complement_dim {c:?}")))?;
            if claimed != basis.claimed_complement_dim() {
                return Err(Error::InvalidState(format!(
                    "claimed complement dimension {claimed} but {} states in dimension {}",
                    basis.len(),
                    basis.dims().total()
                )));
            }
        }
        Ok(basis)
    }
}

fn entries(v: &[C64]) -> Vec<Entry> {
    v.iter().copied().map(Entry).collect()
}

fn values(v: &[Entry]) -> Vec<C64> {
    v.iter().map(|e| e.0).collect()
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    (0..m.rows()).map(|r| entries(m.row(r))).collect()
}
