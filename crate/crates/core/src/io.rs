//! Report output and run configuration files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Pretty JSON with object keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `rank,count` rows for a rank distribution.
pub fn distribution_csv(dist: &[u128]) -> String {
    let mut s = String::from("rank,count\n");
    for (r, c) in dist.iter().enumerate() {
        s.push_str(&format!("{r},{c}\n"));
    }
    s
}

/// Path of the timing sidecar written next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".timing.json");
    path.with_file_name(name)
}

/// Writes `body` to `path` (stdout when absent). Elapsed time goes to a
/// sidecar file, or to stderr for stdout output, never into the body.
pub fn emit(body: &str, path: Option<&Path>, elapsed_ms: u128) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, body)?;
            let meta = to_sorted_json(&serde_json::json!({ "elapsed_ms": elapsed_ms }))?;
            fs::write(sidecar_path(p), meta)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            eprintln!("elapsed_ms: {elapsed_ms}");
        }
    }
    Ok(())
}

/// Settings a config file may carry; explicit flags override each one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub q: Option<u64>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub t: Option<u32>,
    pub s: Option<u32>,
    pub k: Option<u32>,
    pub mu: Option<u64>,
    pub nu: Option<u64>,
    pub u: Option<u32>,
    pub kind: Option<String>,
    pub modulus: Option<Vec<u32>>,
    pub max_codewords: Option<u128>,
    pub max_oracle: Option<u128>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

const CONFIG_KEYS: &[&str] = &[
    "q",
    "m",
    "n",
    "t",
    "s",
    "k",
    "mu",
    "nu",
    "u",
    "kind",
    "modulus",
    "max_codewords",
    "max_oracle",
    "jobs",
    "out",
    "format",
];

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
    if let Some(key) = obj.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(Error::UnknownKey(key.clone()));
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    parse_config(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_keys() {
        #[derive(Serialize)]
        struct R {
            zeta: u32,
            alpha: u32,
            mid: Vec<u32>,
        }
        let s = to_sorted_json(&R {
            zeta: 1,
            alpha: 2,
            mid: vec![],
        })
        .unwrap();
        let a = s.find("alpha").unwrap();
        let m = s.find("mid").unwrap();
        let z = s.find("zeta").unwrap();
        assert!(a < m && m < z);
    }

    #[test]
    fn csv_header() {
        assert_eq!(
            distribution_csv(&[1, 0, 15]),
            "rank,count\n0,1\n1,0\n2,15\n"
        );
    }

    #[test]
    fn config_keys() {
        assert_eq!(parse_config("{}").unwrap(), ConfigFile::default());
        let c = parse_config(r#"{"q": 2, "kind": "phi"}"#).unwrap();
        assert_eq!(c.q, Some(2));
        assert!(matches!(parse_config(r#"{"foo": 1}"#), Err(Error::UnknownKey(k)) if k == "foo"));
        assert!(matches!(parse_config("[1]"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_config(r#"{"q": "x"}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn sidecar_next_to_output() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit("{}\n", Some(&p), 12).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "{}\n");
        let meta = fs::read_to_string(sidecar_path(&p)).unwrap();
        assert!(meta.contains("\"elapsed_ms\": 12"));
    }
}
