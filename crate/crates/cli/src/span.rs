//! Span files.
//!
//! ```json
//! {"A": "L1", "B": "L2", "C": "L2", "phiB": [0], "phiC": [1]}
//! ```
//!
//! `A`, `B` and `C` name algebras of the class directory or hold an algebra
//! object inline. `kind` is optional and inferred from the maps otherwise.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use serde_json::Value;

use amalgam_core::format::validate_algebra;
use amalgam_core::{Elem, FiniteAlgebra, Homomorphism, Span, SpanKind};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpanFile {
    #[serde(rename = "A")]
    a: Value,
    #[serde(rename = "B")]
    b: Value,
    #[serde(rename = "C")]
    c: Value,
    #[serde(rename = "phiB")]
    phi_b: Vec<Elem>,
    #[serde(rename = "phiC")]
    phi_c: Vec<Elem>,
    #[serde(default)]
    kind: Option<SpanKind>,
}

fn resolve(role: &str, v: &Value, class: &[FiniteAlgebra]) -> anyhow::Result<Arc<FiniteAlgebra>> {
    match v {
        Value::String(name) => {
            let mut hits = class.iter().filter(|a| a.name() == name);
            let first = hits
                .next()
                .ok_or_else(|| anyhow!("{role}: no algebra named `{name}` in the class directory"))?;
            if hits.next().is_some() {
                bail!("{role}: more than one algebra named `{name}` in the class directory");
            }
            Ok(Arc::new(first.clone()))
        }
        Value::Object(_) => {
            let raw = serde_json::from_value(v.clone()).with_context(|| role.to_string())?;
            Ok(Arc::new(validate_algebra(raw).with_context(|| role.to_string())?))
        }
        _ => bail!("{role}: expected an algebra name or an algebra object"),
    }
}

fn map(role: &str, image: Vec<Elem>, dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> anyhow::Result<Homomorphism> {
    if image.len() != dom.size() || image.iter().any(|&y| y >= cod.size()) {
        bail!(
            "{role}: expected {} entries below {}, got {:?}",
            dom.size(),
            cod.size(),
            image
        );
    }
    Ok(Homomorphism::new(image, cod.size()))
}

pub fn load_span(path: &Path, class: &[FiniteAlgebra]) -> anyhow::Result<Span> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: SpanFile = serde_json::from_str(&text).with_context(|| format!("{}", path.display()))?;
    let a = resolve("A", &file.a, class)?;
    let b = resolve("B", &file.b, class)?;
    let c = resolve("C", &file.c, class)?;
    let phi_b = map("phiB", file.phi_b, &a, &b)?;
    let phi_c = map("phiC", file.phi_c, &a, &c)?;
    let kind = file.kind.unwrap_or(if phi_c.is_injective() {
        SpanKind::DoublyInjective
    } else if phi_c.is_surjective() {
        SpanKind::InjectiveSurjective
    } else {
        SpanKind::Injective
    });
    Span::new(a, b, c, phi_b, phi_c, kind).with_context(|| format!("{}", path.display()))
}
