//! On-disk genus catalogs: one JSON file per `(p, σ)` wrapping the catalog
//! document together with its SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use enriques_core::definite::GenusClassCatalog;
use enriques_core::pipeline::SupersingularParams;
use enriques_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn catalog_path(dir: &Path, params: &SupersingularParams) -> PathBuf {
    dir.join(format!("genus-p{}-s{}.json", params.p, params.sigma))
}

fn digest(doc: &Value) -> String {
    let text = serde_json::to_string(doc).expect("serializable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn encode(cat: &GenusClassCatalog, params: &SupersingularParams) -> Value {
    let doc = cat.to_json(params.to_json());
    json!({"sha256": digest(&doc), "catalog": doc})
}

pub fn decode(text: &str, params: &SupersingularParams) -> Result<GenusClassCatalog, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
    let doc = v.get("catalog").ok_or(Error::CacheCorrupt("missing catalog".into()))?;
    let sum = v.get("sha256").and_then(Value::as_str).ok_or(Error::CacheCorrupt("missing checksum".into()))?;
    if digest(doc) != sum {
        return Err(Error::CacheCorrupt("checksum mismatch".into()));
    }
    if doc.get("params") != Some(&params.to_json()) {
        return Err(Error::CacheCorrupt("catalog is for different parameters".into()));
    }
    let mut cat = GenusClassCatalog::from_json(doc)?;
    cat.sort_canonical();
    Ok(cat)
}

/// `Ok(None)` when no file exists; corrupt files are an error.
pub fn load(dir: &Path, params: &SupersingularParams) -> Result<Option<GenusClassCatalog>, CliError> {
    let path = catalog_path(dir, params);
    match fs::read_to_string(&path) {
        Ok(text) => decode(&text, params)
            .map(Some)
            .map_err(|e| CliError::Math(Error::CacheCorrupt(format!("{}: {e}", path.display())))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::io(path, e)),
    }
}

pub fn store(dir: &Path, params: &SupersingularParams, cat: &GenusClassCatalog) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = catalog_path(dir, params);
    let tmp = path.with_extension("json.tmp");
    let text = serde_json::to_string(&encode(cat, params)).expect("serializable");
    fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use enriques_core::definite::{GenusClass, Gram};

    fn sample() -> (GenusClassCatalog, SupersingularParams) {
        let e8 = Gram::new(
            8,
            enriques_core::lattice::standard_lattice(enriques_core::lattice::StandardLattice::E8)
                .unwrap()
                .positive_gram()
                .unwrap()
                .data()
                .to_vec(),
        )
        .unwrap();
        let cat = GenusClassCatalog {
            sign: -1,
            classes: vec![GenusClass::new(e8).unwrap()],
            primes: vec![3],
            lines_visited: 1,
            lines_total: 1120,
        };
        (cat, SupersingularParams::new(3, 1).unwrap())
    }

    #[test]
    fn roundtrip_and_tamper() {
        let (cat, params) = sample();
        let text = serde_json::to_string(&encode(&cat, &params)).unwrap();
        let back = decode(&text, &params).unwrap();
        assert_eq!(back.classes[0].gram, cat.classes[0].gram);
        assert_eq!(encode(&back, &params), encode(&cat, &params));
        let tampered = text.replacen("-2", "-4", 1);
        assert!(matches!(decode(&tampered, &params), Err(Error::CacheCorrupt(_))));
        let other = SupersingularParams::new(3, 2).unwrap();
        assert!(matches!(decode(&text, &other), Err(Error::CacheCorrupt(_))));
    }
}
