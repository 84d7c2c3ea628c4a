use serde::{Deserialize, Serialize};

use super::{GroupKind, GroupSpec};
use crate::error::{Error, Result};
use crate::exact::{format_rat, parse_rat, Rat, RatMatrix};

/// A matrix entry as written in a spec file: `"a/b"`, `"a"` or a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    fn to_rat(&self) -> Result<Rat> {
        match self {
            Entry::Text(s) => parse_rat(s),
            Entry::Number(n) => {
                let s = n.to_string();
                if s.contains(['.', 'e', 'E']) {
                    return Err(Error::Parse(format!("non-integer number {s} in matrix")));
                }
                parse_rat(&s)
            }
        }
    }
}

type EntryMatrix = Vec<Vec<Entry>>;

/// On-disk JSON form of a group:
/// `{ "kind": "SL"|"Sp", "degree": n, "generators": [...], "form": ..., "pi": [...], "dense": bool }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: GroupKind,
    pub degree: usize,
    pub generators: Vec<EntryMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<EntryMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<u64>>,
    #[serde(default)]
    pub dense: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn to_matrix(rows: &EntryMatrix, degree: usize) -> Result<RatMatrix> {
    if rows.len() != degree || rows.iter().any(|r| r.len() != degree) {
        return Err(Error::Parse(format!("expected a {degree}x{degree} matrix")));
    }
    let rats = rows
        .iter()
        .map(|r| r.iter().map(Entry::to_rat).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    RatMatrix::from_rows(rats)
}

fn from_matrix(m: &RatMatrix) -> EntryMatrix {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| Entry::Text(format_rat(x))).collect())
        .collect()
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn to_spec(&self) -> Result<GroupSpec> {
        if self.generators.is_empty() {
            return Err(Error::Parse("spec file lists no generators".into()));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| to_matrix(g, self.degree))
            .collect::<Result<Vec<_>>>()?;
        let form = self
            .form
            .as_ref()
            .map(|f| to_matrix(f, self.degree))
            .transpose()?;
        let pi = self.pi.as_ref().map(|v| v.iter().copied().collect());
        let spec = GroupSpec::new(self.kind, gens, form, pi, self.dense)?;
        Ok(match &self.name {
            Some(n) => spec.with_name(n.clone()),
            None => spec,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        Self {
            kind: spec.kind(),
            degree: spec.degree(),
            generators: spec.generators().iter().map(from_matrix).collect(),
            form: spec.form().map(from_matrix),
            pi: spec.pi().map(|s| s.iter().copied().collect()),
            dense: spec.density_asserted(),
            name: spec.name().map(str::to_owned),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn parses_strings_and_integers() {
        let text = r#"{
            "kind": "SL", "degree": 2,
            "generators": [[["0", 1], [-1, "0"]], [[0, "-11/3"], ["3/11", 1]]],
            "pi": [13633], "dense": true
        }"#;
        let spec = SpecFile::from_json(text).unwrap().to_spec().unwrap();
        assert_eq!(spec.mu().to_string(), "3*11");
        assert_eq!(spec.pi().unwrap().len(), 1);
    }

    #[test]
    fn huge_json_integers_are_exact() {
        let text = r#"{"kind":"SL","degree":2,"generators":[[[-23653189915040069676, 78121325235187312055],[-9796772300912447255, 32356601283956634324]]]}"#;
        let spec = SpecFile::from_json(text).unwrap().to_spec().unwrap();
        assert_eq!(spec.generators()[0], catalog::g3_generators()[0]);
    }

    #[test]
    fn export_roundtrips() {
        for id in ["G3", "H4sp:25/3:29/3", "H3:2/5"] {
            let spec = catalog::lookup(id).unwrap();
            let file = SpecFile::from_spec(&spec);
            let back = SpecFile::from_json(&file.to_json()).unwrap();
            assert_eq!(back, file);
            let spec2 = back.to_spec().unwrap();
            assert_eq!(spec2.generators(), spec.generators());
            assert_eq!(spec2.form(), spec.form());
            assert_eq!(spec2.pi(), spec.pi());
            assert_eq!(spec2.mu(), spec.mu());
        }
    }

    #[test]
    fn malformed_files() {
        assert!(SpecFile::from_json("{").is_err());
        let wrong_shape = r#"{"kind":"SL","degree":2,"generators":[[["1","0","0"],["0","1","0"]]]}"#;
        assert!(matches!(
            SpecFile::from_json(wrong_shape).unwrap().to_spec(),
            Err(Error::Parse(_))
        ));
        let float = r#"{"kind":"SL","degree":2,"generators":[[[1.5,0],[0,1]]]}"#;
        assert!(SpecFile::from_json(float).unwrap().to_spec().is_err());
    }
}
