//! The JSON instance document.
//!
//! ```json
//! {
//!   "format": 1,
//!   "varieties":     { "X": { "product_elliptic": 1 } },
//!   "brauer":        { "alpha": { "variety": "X", "n": 2, "e": [[0, 1], [1, 0]] } },
//!   "polarizations": { "L": { "variety": "X", "E": [[0, -1], [1, 0]] } },
//!   "morphisms":     { "f": { "kind": "hom", "source": "X", "target": "X", "matrix": [[2, 0], [0, 2]] } },
//!   "params":        { }
//! }
//! ```
//!
//! Matrix entries are JSON integers or strings `"p/q"`. A variety is
//! `{"J": …}`, `{"product_elliptic": g}` or `{"dual_of": name}`; a
//! polarization is `{"variety", "E"}` or `{"dual_of": name}`. Morphisms have
//! `kind` `hom` (between varieties) or `symplectic` (between the twisted
//! models of two Brauer entries).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use avsym_core::av::{
    product_elliptic, AbelianVarietyModel, BrauerRepresentative, Homomorphism, Polarization,
};
use avsym_core::lattice::{IntMatrix, RatMatrix};

use crate::CliError;

fn invalid(field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A morphism block after validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismBlock {
    Hom {
        source: String,
        target: String,
        hom: Homomorphism,
    },
    /// Between the twisted models of two Brauer entries; the symplectic
    /// conditions are checked when a command builds the models.
    Symplectic {
        source: String,
        target: String,
        matrix: IntMatrix,
    },
}

/// A validated instance document.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InstanceFile {
    pub varieties: BTreeMap<String, AbelianVarietyModel>,
    pub brauer: BTreeMap<String, (String, BrauerRepresentative)>,
    pub polarizations: BTreeMap<String, (String, Polarization)>,
    pub morphisms: BTreeMap<String, MorphismBlock>,
    pub params: Map<String, Value>,
}

pub fn parse_entry(v: &Value, field: &str) -> Result<BigRational, CliError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .or_else(|| n.as_u64().map(|u| BigRational::from_integer(u.into())))
            .ok_or_else(|| invalid(field, "entries must be integers or \"p/q\" strings, not floats")),
        Value::String(s) => {
            let s = s.trim();
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s, "1"),
            };
            let p: BigInt = p.parse().map_err(|_| invalid(field, format!("bad number {s:?}")))?;
            let q: BigInt = q.parse().map_err(|_| invalid(field, format!("bad number {s:?}")))?;
            if q.is_zero() {
                return Err(invalid(field, "zero denominator"));
            }
            Ok(BigRational::new(p, q))
        }
        _ => Err(invalid(field, "entries must be integers or \"p/q\" strings")),
    }
}

pub fn parse_rat_matrix(v: &Value, field: &str) -> Result<RatMatrix, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| invalid(field, "matrix must be an array of rows"))?;
    let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| invalid(format!("{field}[{i}]"), "row must be an array"))?;
        if row.len() != cols {
            return Err(invalid(format!("{field}[{i}]"), format!("row has {} entries, expected {cols}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            data.push(parse_entry(e, &format!("{field}[{i}][{j}]"))?);
        }
    }
    RatMatrix::new(rows.len(), cols, data).map_err(|e| invalid(field, e))
}

pub fn parse_int_matrix(v: &Value, field: &str) -> Result<IntMatrix, CliError> {
    parse_rat_matrix(v, field)?
        .to_int()
        .ok_or_else(|| invalid(field, "matrix must be integral"))
}

pub fn parse_int(v: &Value, field: &str) -> Result<BigInt, CliError> {
    let q = parse_entry(v, field)?;
    if !q.is_integer() {
        return Err(invalid(field, "expected an integer"));
    }
    Ok(q.to_integer())
}

pub fn parse_usize(v: &Value, field: &str) -> Result<usize, CliError> {
    parse_int(v, field)?
        .to_usize()
        .ok_or_else(|| invalid(field, "expected a nonnegative integer"))
}

pub fn rat_to_value(q: &BigRational) -> Value {
    if q.is_integer() {
        int_to_value(q.numer())
    } else {
        Value::String(q.to_string())
    }
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn int_to_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => json!(i),
        None => Value::String(n.to_string()),
    }
}

pub fn int_matrix_value(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(int_to_value).collect()))
            .collect(),
    )
}

pub fn rat_matrix_value(m: &RatMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(rat_to_value).collect()))
            .collect(),
    )
}

fn section<'a>(doc: &'a Map<String, Value>, key: &str) -> Result<Option<&'a Map<String, Value>>, CliError> {
    match doc.get(key) {
        None => Ok(None),
        Some(Value::Object(m)) => Ok(Some(m)),
        Some(_) => Err(invalid(key, "section must be an object")),
    }
}

fn obj<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| invalid(field, "expected an object"))
}

fn name<'a>(m: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a str, CliError> {
    m.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| invalid(format!("{field}.{key}"), "expected a name"))
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<InstanceFile, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let doc = doc
        .as_object()
        .ok_or_else(|| invalid("$", "document must be a JSON object"))?;
    match doc.get("format") {
        Some(v) if v.as_u64() == Some(1) => {}
        Some(_) => return Err(invalid("format", "unsupported format version (expected 1)")),
        None => return Err(invalid("format", "missing format version")),
    }
    for key in doc.keys() {
        if !["format", "varieties", "brauer", "polarizations", "morphisms", "params"].contains(&key.as_str()) {
            return Err(invalid(key.clone(), "unknown section"));
        }
    }
    let mut inst = InstanceFile::default();

    // Varieties; `dual_of` may refer to any other entry, resolved in rounds.
    if let Some(vs) = section(doc, "varieties")? {
        let mut pending: Vec<(&String, &Value)> = vs.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut still = Vec::new();
            for (k, v) in pending {
                let field = format!("varieties.{k}");
                let m = obj(v, &field)?;
                let model = if let Some(j) = m.get("J") {
                    let j = parse_rat_matrix(j, &format!("{field}.J"))?;
                    Some(AbelianVarietyModel::new(j).map_err(|e| invalid(format!("{field}.J"), e))?)
                } else if let Some(g) = m.get("product_elliptic") {
                    let g = parse_usize(g, &format!("{field}.product_elliptic"))?;
                    if g == 0 {
                        return Err(invalid(format!("{field}.product_elliptic"), "dimension must be positive"));
                    }
                    Some(product_elliptic(g))
                } else if let Some(d) = m.get("dual_of") {
                    let d = d.as_str().ok_or_else(|| invalid(format!("{field}.dual_of"), "expected a name"))?;
                    if !vs.contains_key(d) {
                        return Err(invalid(format!("{field}.dual_of"), format!("unknown variety {d:?}")));
                    }
                    inst.varieties.get(d).map(AbelianVarietyModel::dual)
                } else {
                    return Err(invalid(field, "expected one of J, product_elliptic, dual_of"));
                };
                match model {
                    Some(x) => {
                        inst.varieties.insert(k.clone(), x);
                    }
                    None => still.push((k, v)),
                }
            }
            if still.len() == before {
                return Err(invalid("varieties", "cyclic dual_of references"));
            }
            pending = still;
        }
    }

    let variety = |inst: &InstanceFile, m: &Map<String, Value>, field: &str| -> Result<(String, AbelianVarietyModel), CliError> {
        let n = name(m, "variety", field)?;
        inst.varieties
            .get(n)
            .cloned()
            .map(|x| (n.to_string(), x))
            .ok_or_else(|| invalid(format!("{field}.variety"), format!("unknown variety {n:?}")))
    };

    if let Some(bs) = section(doc, "brauer")? {
        for (k, v) in bs {
            let field = format!("brauer.{k}");
            let m = obj(v, &field)?;
            let (vn, x) = variety(&inst, m, &field)?;
            let n = parse_int(m.get("n").unwrap_or(&Value::Null), &format!("{field}.n"))?;
            if !n.is_positive() {
                return Err(invalid(format!("{field}.n"), "n must be positive"));
            }
            let e = parse_int_matrix(m.get("e").unwrap_or(&Value::Null), &format!("{field}.e"))?;
            if e.shape() != (x.rank(), x.rank()) {
                return Err(invalid(
                    format!("{field}.e"),
                    format!("shape {:?} does not match rank {}", e.shape(), x.rank()),
                ));
            }
            let b = BrauerRepresentative::new(x, n, e).map_err(|e| invalid(&field, e))?;
            inst.brauer.insert(k.clone(), (vn, b));
        }
    }

    if let Some(ps) = section(doc, "polarizations")? {
        let mut pending: Vec<(&String, &Value)> = ps.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut still = Vec::new();
            for (k, v) in pending {
                let field = format!("polarizations.{k}");
                let m = obj(v, &field)?;
                if let Some(d) = m.get("dual_of") {
                    let d = d.as_str().ok_or_else(|| invalid(format!("{field}.dual_of"), "expected a name"))?;
                    if !ps.contains_key(d) {
                        return Err(invalid(format!("{field}.dual_of"), format!("unknown polarization {d:?}")));
                    }
                    match inst.polarizations.get(d).cloned() {
                        Some((vn, l)) => {
                            let dual = l.dual_polarization();
                            // Name the dual variety if the document declares it.
                            let dn = inst
                                .varieties
                                .iter()
                                .find(|(_, x)| *x == dual.variety())
                                .map(|(n, _)| n.clone())
                                .unwrap_or_else(|| format!("{vn}^"));
                            inst.polarizations.insert(k.clone(), (dn, dual));
                        }
                        None => still.push((k, v)),
                    }
                    continue;
                }
                let (vn, x) = variety(&inst, m, &field)?;
                let e = parse_int_matrix(m.get("E").unwrap_or(&Value::Null), &format!("{field}.E"))?;
                let l = Polarization::new(x, e).map_err(|e| invalid(format!("{field}.E"), e))?;
                inst.polarizations.insert(k.clone(), (vn, l));
            }
            if still.len() == before {
                return Err(invalid("polarizations", "cyclic dual_of references"));
            }
            pending = still;
        }
    }

    if let Some(ms) = section(doc, "morphisms")? {
        for (k, v) in ms {
            let field = format!("morphisms.{k}");
            let m = obj(v, &field)?;
            let kind = m.get("kind").and_then(Value::as_str).unwrap_or("hom");
            let source = name(m, "source", &field)?.to_string();
            let target = name(m, "target", &field)?.to_string();
            let matrix = parse_int_matrix(m.get("matrix").unwrap_or(&Value::Null), &format!("{field}.matrix"))?;
            let block = match kind {
                "hom" => {
                    let lookup = |n: &str, key: &str| {
                        inst.varieties
                            .get(n)
                            .cloned()
                            .ok_or_else(|| invalid(format!("{field}.{key}"), format!("unknown variety {n:?}")))
                    };
                    let s = lookup(&source, "source")?;
                    let t = lookup(&target, "target")?;
                    let hom = Homomorphism::new(s, t, matrix).map_err(|e| invalid(format!("{field}.matrix"), e))?;
                    MorphismBlock::Hom { source, target, hom }
                }
                "symplectic" => {
                    let lookup = |n: &str, key: &str| {
                        inst.brauer
                            .get(n)
                            .map(|(_, b)| b.variety().rank())
                            .ok_or_else(|| invalid(format!("{field}.{key}"), format!("unknown Brauer entry {n:?}")))
                    };
                    let rs = lookup(&source, "source")?;
                    let rt = lookup(&target, "target")?;
                    if matrix.shape() != (2 * rt, 2 * rs) {
                        return Err(invalid(
                            format!("{field}.matrix"),
                            format!("shape {:?}, expected {:?}", matrix.shape(), (2 * rt, 2 * rs)),
                        ));
                    }
                    MorphismBlock::Symplectic { source, target, matrix }
                }
                other => return Err(invalid(format!("{field}.kind"), format!("unknown kind {other:?}"))),
            };
            inst.morphisms.insert(k.clone(), block);
        }
    }

    if let Some(p) = section(doc, "params")? {
        inst.params = p.clone();
    }
    Ok(inst)
}

impl InstanceFile {
    /// The normalized document: explicit `J` for every variety, reduced
    /// Brauer matrices, explicit `E` for every polarization.
    pub fn to_document(&self) -> Value {
        let varieties: Map<String, Value> = self
            .varieties
            .iter()
            .map(|(k, x)| (k.clone(), json!({ "J": rat_matrix_value(x.j()) })))
            .collect();
        let brauer: Map<String, Value> = self
            .brauer
            .iter()
            .map(|(k, (vn, b))| {
                (
                    k.clone(),
                    json!({ "variety": vn, "n": int_to_value(b.n()), "e": int_matrix_value(b.matrix()) }),
                )
            })
            .collect();
        let mut polarizations = Map::new();
        let mut extra_varieties = Map::new();
        for (k, (vn, l)) in &self.polarizations {
            if !self.varieties.contains_key(vn) {
                extra_varieties.insert(vn.clone(), json!({ "J": rat_matrix_value(l.variety().j()) }));
            }
            polarizations.insert(k.clone(), json!({ "variety": vn, "E": int_matrix_value(l.matrix()) }));
        }
        let mut varieties = varieties;
        varieties.extend(extra_varieties);
        let morphisms: Map<String, Value> = self
            .morphisms
            .iter()
            .map(|(k, m)| {
                let v = match m {
                    MorphismBlock::Hom { source, target, hom } => json!({
                        "kind": "hom", "source": source, "target": target,
                        "matrix": int_matrix_value(hom.matrix()),
                    }),
                    MorphismBlock::Symplectic { source, target, matrix } => json!({
                        "kind": "symplectic", "source": source, "target": target,
                        "matrix": int_matrix_value(matrix),
                    }),
                };
                (k.clone(), v)
            })
            .collect();
        json!({
            "format": 1,
            "varieties": varieties,
            "brauer": brauer,
            "polarizations": polarizations,
            "morphisms": morphisms,
            "params": self.params,
        })
    }

    /// The named entry, or the only entry when `param` is absent.
    pub fn pick<'a, T>(
        &self,
        map: &'a BTreeMap<String, T>,
        param: &str,
        section: &str,
    ) -> Result<(&'a String, &'a T), CliError> {
        match self.params.get(param) {
            Some(v) => {
                let n = v
                    .as_str()
                    .ok_or_else(|| invalid(format!("params.{param}"), "expected a name"))?;
                map.get_key_value(n)
                    .ok_or_else(|| invalid(format!("params.{param}"), format!("no {section} entry {n:?}")))
            }
            None if map.len() == 1 => Ok(map.iter().next().unwrap()),
            None => Err(invalid(
                format!("params.{param}"),
                format!("required: the {section} section has {} entries", map.len()),
            )),
        }
    }

    pub fn param(&self, key: &str) -> Result<&Value, CliError> {
        self.params
            .get(key)
            .ok_or_else(|| invalid(format!("params.{key}"), "missing parameter"))
    }

    pub fn param_opt(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }
}

