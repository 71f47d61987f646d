//! JSON instance and morphism files.
//!
//! Rationals are strings (`"3"`, `"-1/2"`). Emission is canonical: basis in
//! canonical order, every table sorted by basis index, fixed key order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dgbv::{DgbvInstance, InstanceBuilder};
use crate::error::{Error, Result};
use crate::graded::{format_scalar, parse_scalar, Scalar};
use crate::morphism::DgbvMorphism;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub field: String,
    #[serde(default)]
    pub name: String,
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default)]
    pub multiplication: Vec<(String, String, String, String)>,
    #[serde(default)]
    pub delta: Vec<(String, String, String)>,
    #[serde(default)]
    pub bv: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub format_version: u32,
    /// Instance names, checked against the loaded files when nonempty.
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub target: String,
    pub map: Vec<(String, String, String)>,
}

/// Pretty JSON with flat arrays and objects kept on one line.
pub fn to_json_rows<T: Serialize>(v: &T) -> String {
    let v = serde_json::to_value(v).expect("value serializes");
    let mut out = String::new();
    write_rows(&v, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Array(xs) => xs.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(m) => m.values().all(|x| !x.is_array() && !x.is_object()),
        _ => true,
    }
}

fn write_rows(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    if is_flat(v) && (indent > 0 || !v.is_object()) {
        let js = |x: &Value| serde_json::to_string(x).expect("value serializes");
        match v {
            Value::Array(xs) => {
                let parts: Vec<String> = xs.iter().map(js).collect();
                out.push_str(&format!("[{}]", parts.join(", ")));
            }
            Value::Object(m) => {
                let parts: Vec<String> = m.iter().map(|(k, x)| format!("{}: {}", js(&Value::from(k.as_str())), js(x))).collect();
                out.push_str(&format!("{{{}}}", parts.join(", ")));
            }
            _ => out.push_str(&js(v)),
        }
        return;
    }
    match v {
        Value::Array(xs) if xs.is_empty() => out.push_str("[]"),
        Value::Array(xs) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_rows(x, indent + 1, out);
                out.push_str(if i + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_rows(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        _ => unreachable!(),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn scalar(s: &str, ctx: &str) -> Result<Scalar> {
    parse_scalar(s).map_err(|e| Error::Parse(format!("{ctx}: {e}")))
}

fn check_header(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format_version {version}")));
    }
    Ok(())
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_instance(&self) -> Result<DgbvInstance> {
        check_header(self.format_version)?;
        if self.field != "Q" {
            return Err(Error::Parse(format!("unsupported field {:?}", self.field)));
        }
        let mut b = InstanceBuilder::new(self.name.clone());
        for e in &self.basis {
            b = b.basis(e.label.clone(), e.degree);
        }
        if let Some(u) = &self.unit {
            b = b.unit(u.clone());
        }
        for (k, (x, y, z, c)) in self.multiplication.iter().enumerate() {
            b = b.product(x, y, z, scalar(c, &format!("multiplication[{k}]"))?);
        }
        for (k, (f, t, c)) in self.delta.iter().enumerate() {
            b = b.delta(f, t, scalar(c, &format!("delta[{k}]"))?);
        }
        for (k, (f, t, c)) in self.bv.iter().enumerate() {
            b = b.bv(f, t, scalar(c, &format!("bv[{k}]"))?);
        }
        if let Some(entries) = &self.integral {
            b = b.zero_integral();
            for (k, (l, c)) in entries.iter().enumerate() {
                b = b.integral(l, scalar(c, &format!("integral[{k}]"))?);
            }
        }
        b.build().map_err(|e| match e {
            Error::Invalid(m) | Error::Grading(m) => Error::Parse(m),
            other => other,
        })
    }

    pub fn from_instance(a: &DgbvInstance) -> Self {
        let s = a.space();
        let n = a.dim();
        let label = |i: usize| s.label(i).to_string();
        let mut multiplication = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in a.product_basis(i, j).terms() {
                    multiplication.push((label(i), label(j), label(k), format_scalar(c)));
                }
            }
        }
        let op = |f: &dyn Fn(usize) -> crate::graded::Element| {
            let mut v = Vec::new();
            for i in 0..n {
                for (k, c) in f(i).terms() {
                    v.push((label(i), label(k), format_scalar(c)));
                }
            }
            v
        };
        let unit = a.unit().and_then(|u| {
            let t: Vec<_> = u.terms().collect();
            (t.len() == 1 && t[0].1 == &num_traits::One::one()).then(|| label(t[0].0))
        });
        InstanceFile {
            format_version: FORMAT_VERSION,
            field: "Q".into(),
            name: a.name().to_string(),
            basis: (0..n).map(|i| BasisEntry { label: label(i), degree: s.degree(i) }).collect(),
            unit,
            multiplication,
            delta: op(&|i| a.delta().image_of_basis(i)),
            bv: op(&|i| a.bv().image_of_basis(i)),
            integral: a.integral().map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|x| !num_traits::Zero::is_zero(x.1))
                    .map(|(i, c)| (label(i), format_scalar(c)))
                    .collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        to_json_rows(self)
    }
}

pub fn parse_instance(text: &str) -> Result<DgbvInstance> {
    InstanceFile::parse(text)?.to_instance()
}

pub fn emit_instance(a: &DgbvInstance) -> String {
    InstanceFile::from_instance(a).to_json()
}

impl MorphismFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_morphism(&self, source: Arc<DgbvInstance>, target: Arc<DgbvInstance>) -> Result<DgbvMorphism> {
        check_header(self.format_version)?;
        for (want, have, side) in [(&self.source, source.name(), "source"), (&self.target, target.name(), "target")] {
            if !want.is_empty() && want != have {
                return Err(Error::Parse(format!("{side} instance is {have:?}, morphism expects {want:?}")));
            }
        }
        let mut entries = Vec::with_capacity(self.map.len());
        for (k, (a, b, c)) in self.map.iter().enumerate() {
            entries.push((a.clone(), b.clone(), scalar(c, &format!("map[{k}]"))?));
        }
        DgbvMorphism::from_labels(source, target, &entries).map_err(|e| match e {
            Error::SpaceMismatch(m) | Error::Grading(m) => Error::Parse(m),
            other => other,
        })
    }

    pub fn from_morphism(m: &DgbvMorphism) -> Self {
        let (s, t) = (m.source.space(), m.target.space());
        let mut map = Vec::new();
        for i in 0..s.dim() {
            for (k, c) in m.map.image_of_basis(i).terms() {
                map.push((s.label(i).to_string(), t.label(k).to_string(), format_scalar(c)));
            }
        }
        MorphismFile {
            format_version: FORMAT_VERSION,
            source: m.source.name().to_string(),
            target: m.target.name().to_string(),
            map,
        }
    }

    pub fn to_json(&self) -> String {
        to_json_rows(self)
    }
}
