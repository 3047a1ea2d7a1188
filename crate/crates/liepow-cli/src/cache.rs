//! On-disk cache for dominant-multiplicity tables and Weyl orbits, one
//! file per (system, kind, weight) under a content-addressed name.  Each
//! file carries a checksum of its payload; a mismatch means corruption
//! and the entry is ignored, so the worst a damaged cache can do is
//! force a recomputation.  Writes go through a temporary file and an
//! atomic rename.

use liepow_core::{RootSystem, TypeLabel, Weight};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Payload {
    Freudenthal { table: Vec<(Vec<i64>, u64)> },
    Orbit { members: Vec<Vec<i64>> },
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    key: String,
    checksum: String,
    payload: Payload,
}

pub struct DiskCache {
    dir: PathBuf,
}

fn system_tag(label: TypeLabel, rank: usize) -> String {
    format!("{}{}", label.as_char(), rank)
}

fn coords_tag(w: &Weight) -> String {
    let parts: Vec<String> = w.0.iter().map(|c| c.to_string()).collect();
    parts.join(",")
}

fn payload_checksum(payload: &Payload) -> String {
    let bytes = serde_json::to_vec(payload).expect("payload serializes");
    let mut h = Sha256::new();
    h.update(&bytes);
    format!("{:x}", h.finalize())
}

fn entry_key(label: TypeLabel, rank: usize, kind: &str, w: &Weight) -> String {
    format!("{} {} {}", system_tag(label, rank), kind, coords_tag(w))
}

fn file_name(key: &str) -> String {
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    format!("{:x}.json", h.finalize())
}

impl DiskCache {
    pub fn new(dir: &Path) -> std::io::Result<DiskCache> {
        std::fs::create_dir_all(dir)?;
        Ok(DiskCache { dir: dir.to_path_buf() })
    }

    /// Seed the system's in-memory caches from every valid entry on
    /// disk that belongs to it.  Unreadable or corrupt files are
    /// skipped; they will simply be recomputed and rewritten.
    pub fn load_into(&self, rs: &Arc<RootSystem>, label: TypeLabel, rank: usize) {
        let mut names: Vec<PathBuf> = match std::fs::read_dir(&self.dir) {
            Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
            Err(_) => return,
        };
        names.sort();
        let prefix = format!("{} ", system_tag(label, rank));
        for path in names {
            let Ok(text) = std::fs::read_to_string(&path) else { continue };
            let Ok(file) = serde_json::from_str::<CacheFile>(&text) else { continue };
            if !file.key.starts_with(&prefix) {
                continue;
            }
            if payload_checksum(&file.payload) != file.checksum {
                continue;
            }
            // The key's own hash must match the filename, or the entry
            // was copied around and cannot be trusted to be ours.
            if path.file_name().map(|n| n.to_string_lossy().to_string()) != Some(file_name(&file.key)) {
                continue;
            }
            match file.payload {
                Payload::Freudenthal { table } => {
                    let parts: Vec<&str> = file.key.splitn(3, ' ').collect();
                    let Some(coords) = parts.get(2) else { continue };
                    let Some(lambda) = parse_coords(coords, rank) else { continue };
                    let map: BTreeMap<Weight, u64> =
                        table.into_iter().map(|(c, m)| (Weight(c), m)).collect();
                    if map.keys().any(|w| w.0.len() != rank) {
                        continue;
                    }
                    rs.seed_freudenthal(lambda, map);
                }
                Payload::Orbit { members } => {
                    let parts: Vec<&str> = file.key.splitn(3, ' ').collect();
                    let Some(coords) = parts.get(2) else { continue };
                    let Some(dominant) = parse_coords(coords, rank) else { continue };
                    let orbit: Vec<Weight> = members.into_iter().map(Weight).collect();
                    if orbit.iter().any(|w| w.0.len() != rank) {
                        continue;
                    }
                    rs.seed_orbit(dominant, orbit);
                }
            }
        }
    }

    /// Write back everything the system computed this run.
    pub fn store_from(&self, rs: &Arc<RootSystem>, label: TypeLabel, rank: usize) {
        for lambda in rs.cached_freudenthal_keys() {
            if let Ok(table) = rs.freudenthal(&lambda) {
                let payload = Payload::Freudenthal {
                    table: table.iter().map(|(w, &m)| (w.0.clone(), m)).collect(),
                };
                self.write_entry(entry_key(label, rank, "freudenthal", &lambda), payload);
            }
        }
        for dominant in rs.cached_orbit_keys() {
            if let Ok(orbit) = rs.weyl_orbit(&dominant) {
                let payload =
                    Payload::Orbit { members: orbit.iter().map(|w| w.0.clone()).collect() };
                self.write_entry(entry_key(label, rank, "orbit", &dominant), payload);
            }
        }
    }

    fn write_entry(&self, key: String, payload: Payload) {
        let checksum = payload_checksum(&payload);
        let file = CacheFile { key: key.clone(), checksum, payload };
        let Ok(bytes) = serde_json::to_vec_pretty(&file) else { return };
        let Ok(tmp) = tempfile::NamedTempFile::new_in(&self.dir) else { return };
        if std::io::Write::write_all(&mut tmp.as_file(), &bytes).is_err() {
            return;
        }
        let _ = tmp.persist(self.dir.join(file_name(&key)));
    }
}

fn parse_coords(s: &str, rank: usize) -> Option<Weight> {
    let coords: Option<Vec<i64>> = s.split(',').map(|t| t.trim().parse().ok()).collect();
    let coords = coords?;
    if coords.len() != rank {
        return None;
    }
    Some(Weight(coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use liepow_core::build_root_system;

    #[test]
    fn round_trip_and_corruption_detection() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path()).unwrap();
        let rs = Arc::new(build_root_system(TypeLabel::G, 2).unwrap());
        let l1 = Weight(vec![1, 0]);
        let table = rs.freudenthal(&l1).unwrap();
        rs.weyl_orbit(&l1).unwrap();
        cache.store_from(&rs, TypeLabel::G, 2);

        // A fresh system sees the entries without recomputing.
        let fresh = Arc::new(build_root_system(TypeLabel::G, 2).unwrap());
        cache.load_into(&fresh, TypeLabel::G, 2);
        assert!(fresh.cached_freudenthal_keys().contains(&l1));
        assert!(fresh.cached_orbit_keys().contains(&l1));
        assert_eq!(fresh.freudenthal(&l1).unwrap(), table);

        // Corrupt every file; the loader must reject them all.
        for entry in std::fs::read_dir(dir.path()).unwrap() {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            std::fs::write(&path, text.replace("1", "2")).unwrap();
        }
        let blank = Arc::new(build_root_system(TypeLabel::G, 2).unwrap());
        cache.load_into(&blank, TypeLabel::G, 2);
        assert!(blank.cached_freudenthal_keys().is_empty());
        assert!(blank.cached_orbit_keys().is_empty());
    }
}
