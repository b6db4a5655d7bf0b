//! Box file format: a JSON document with fields `n`, `d`, `edges` (n
//! row-major d x d probability arrays) and an optional `label`.
//!
//! Probabilities round-trip bit-exactly: serialization uses the shortest
//! decimal that parses back to the identical double.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boxes::CycleBox;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoxFile {
    n: usize,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    edges: Vec<Vec<f64>>,
}

/// Serializes a box (with an optional label) to the file format.
pub fn to_json(b: &CycleBox, label: Option<&str>) -> String {
    let doc = BoxFile {
        n: b.n(),
        d: b.d(),
        label: label.map(str::to_owned),
        edges: (1..=b.n())
            .map(|k| b.edge(k).expect("edge index in range").to_vec())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("box serialization cannot fail") + "\n"
}

/// Parses a box document, validating at the user-data tolerance.
pub fn from_json(text: &str) -> Result<(CycleBox, Option<String>)> {
    let doc: BoxFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.edges.len() != doc.n {
        return Err(Error::Parse(format!(
            "field n = {} but {} edges given",
            doc.n,
            doc.edges.len()
        )));
    }
    let b = CycleBox::new(doc.d, doc.edges)?;
    Ok((b, doc.label))
}

pub fn read_box_file(path: &Path) -> Result<(CycleBox, Option<String>)> {
    let text = fs::read_to_string(path)?;
    from_json(&text)
}

pub fn write_box_file(path: &Path, b: &CycleBox, label: Option<&str>) -> Result<()> {
    write_atomic(path, &to_json(b, label))
}

/// Writes via a sibling temporary file and a rename, so a failed write never
/// leaves a partial document behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e.into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{isotropic_box, pr_box};
    use crate::sign::SignVector;
    use crate::vertex::random_ns_box;

    #[test]
    fn round_trip_is_bit_exact() {
        for seed in 0..10 {
            let b = random_ns_box(5, seed).unwrap();
            let (parsed, label) = from_json(&to_json(&b, None)).unwrap();
            assert!(label.is_none());
            for k in 1..=5 {
                let original = b.edge(k).unwrap();
                let back = parsed.edge(k).unwrap();
                for (x, y) in original.iter().zip(back) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn label_round_trips() {
        let g = SignVector::canonical(4).unwrap();
        let b = isotropic_box(4, 0.73, &g).unwrap();
        let (_, label) = from_json(&to_json(&b, Some("iso-0.73"))).unwrap();
        assert_eq!(label.as_deref(), Some("iso-0.73"));
    }

    #[test]
    fn parse_errors_carry_position_information() {
        let err = from_json("{\"n\": 4, \"d\": 2,\n  \"edges\": [[0.5]]").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "no position in: {msg}");
    }

    #[test]
    fn mismatched_edge_count_is_rejected() {
        let b = pr_box(&SignVector::canonical(4).unwrap()).unwrap();
        let text = to_json(&b, None).replace("\"n\": 4", "\"n\": 5");
        assert!(from_json(&text).is_err());
    }

    #[test]
    fn invalid_probabilities_are_rejected_on_load() {
        let text = r#"{"n":3,"d":2,"edges":[[0.6,0.6,-0.1,-0.1],[0.25,0.25,0.25,0.25],[0.25,0.25,0.25,0.25]]}"#;
        assert!(from_json(text).is_err());
    }

    #[test]
    fn atomic_write_reads_back() {
        let dir = std::env::temp_dir().join(format!("ncycle-io-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("box.json");
        let b = pr_box(&SignVector::canonical(4).unwrap()).unwrap();
        write_box_file(&path, &b, Some("pr")).unwrap();
        let (back, label) = read_box_file(&path).unwrap();
        assert_eq!(back, b);
        assert_eq!(label.as_deref(), Some("pr"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
