//! On-disk index container.
//!
//! Layout (all integers little-endian):
//! `"CTIX"` magic, `u32` format version, `u32` engine tag bitmask,
//! `u32` section count, then the section table (name length + name bytes,
//! `u64` offset, `u64` length, `u64` FNV-1a checksum), then the payloads.
//! Each section is a bincode-encoded structure; checksums are verified on
//! load before any payload is decoded.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::colored::ColoredEngine;
use crate::corpus::CategoryTree;
use crate::error::{Error, Result};
use crate::heavy::HeavyPathIndex;
use crate::index::CatIndex;
use crate::shaped::ShapedWaveletIndex;
use crate::text::{DocumentArray, SuffixIndex};
use crate::topo::LevelAncestorIndex;

pub const MAGIC: [u8; 4] = *b"CTIX";
pub const VERSION: u32 = 1;

pub const TAG_COLORED: u32 = 1;
pub const TAG_WAVELET: u32 = 2;
pub const TAG_HEAVY: u32 = 4;

fn fnv1a(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One entry of the section table, as seen when reading a container back.
#[derive(Debug, Clone)]
pub struct SectionInfo {
    pub name: String,
    pub len: u64,
    pub checksum: u64,
}

fn encode<T: Serialize>(name: &str, value: &T) -> Result<(String, Vec<u8>)> {
    let bytes = bincode::serialize(value)
        .map_err(|e| Error::MalformedIndex(format!("encoding {name}: {e}")))?;
    Ok((name.to_string(), bytes))
}

/// Serializes `index` to `path`. Returns the section table that was written,
/// so callers can report per-structure sizes.
pub fn write_index(path: &Path, index: &CatIndex) -> Result<Vec<SectionInfo>> {
    let meta = (index.sigma, index.num_docs, index.n, index.n_prime);
    let mut sections: Vec<(String, Vec<u8>)> = vec![
        encode("meta", &meta)?,
        encode("tree", &index.tree)?,
        encode("laq", &index.laq)?,
        encode("text", &index.text)?,
        encode("docs", &index.docs)?,
    ];
    let mut tag = 0u32;
    if let Some(e) = &index.colored {
        tag |= TAG_COLORED;
        sections.push(encode("colored", e)?);
    }
    if let Some(e) = &index.shaped {
        tag |= TAG_WAVELET;
        sections.push(encode("shaped", e)?);
    }
    if let Some(e) = &index.heavy {
        tag |= TAG_HEAVY;
        sections.push(encode("heavy", e)?);
    }

    let mut table_len = 0u64;
    for (name, _) in &sections {
        table_len += 4 + name.len() as u64 + 8 + 8 + 8;
    }
    let mut offset = 4 + 4 + 4 + 4 + table_len;

    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&tag.to_le_bytes())?;
    out.write_all(&(sections.len() as u32).to_le_bytes())?;
    let mut infos = Vec::with_capacity(sections.len());
    for (name, bytes) in &sections {
        out.write_all(&(name.len() as u32).to_le_bytes())?;
        out.write_all(name.as_bytes())?;
        out.write_all(&offset.to_le_bytes())?;
        out.write_all(&(bytes.len() as u64).to_le_bytes())?;
        let checksum = fnv1a(bytes);
        out.write_all(&checksum.to_le_bytes())?;
        infos.push(SectionInfo {
            name: name.clone(),
            len: bytes.len() as u64,
            checksum,
        });
        offset += bytes.len() as u64;
    }
    for (_, bytes) in &sections {
        out.write_all(bytes)?;
    }
    out.flush()?;
    Ok(infos)
}

struct RawContainer {
    tag: u32,
    sections: Vec<(SectionInfo, Vec<u8>)>,
}

impl RawContainer {
    fn take<T: DeserializeOwned>(&mut self, name: &str) -> Result<Option<T>> {
        let Some(pos) = self.sections.iter().position(|(i, _)| i.name == name) else {
            return Ok(None);
        };
        let (_, bytes) = self.sections.remove(pos);
        let value = bincode::deserialize(&bytes)
            .map_err(|e| Error::MalformedIndex(format!("decoding section {name}: {e}")))?;
        Ok(Some(value))
    }

    fn require<T: DeserializeOwned>(&mut self, name: &str) -> Result<T> {
        self.take(name)?
            .ok_or_else(|| Error::MalformedIndex(format!("missing section {name}")))
    }
}

fn read_raw(path: &Path) -> Result<RawContainer> {
    let mut file = BufReader::new(File::open(path)?);
    let mut buf = Vec::new();
    file.read_to_end(&mut buf)?;
    let bad = |msg: &str| Error::MalformedIndex(msg.to_string());

    if buf.len() < 16 {
        return Err(bad("file too short"));
    }
    if buf[0..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::MalformedIndex(format!(
            "unsupported format version {version}"
        )));
    }
    let tag = u32_at(8);
    let count = u32_at(12) as usize;

    let mut cursor = 16usize;
    let mut table = Vec::with_capacity(count);
    for _ in 0..count {
        if cursor + 4 > buf.len() {
            return Err(bad("truncated section table"));
        }
        let name_len = u32_at(cursor) as usize;
        cursor += 4;
        if name_len > 256 || cursor + name_len + 24 > buf.len() {
            return Err(bad("truncated section table"));
        }
        let name = std::str::from_utf8(&buf[cursor..cursor + name_len])
            .map_err(|_| bad("non-utf8 section name"))?
            .to_string();
        cursor += name_len;
        let u64_at = |i: usize| u64::from_le_bytes(buf[i..i + 8].try_into().unwrap());
        let offset = u64_at(cursor) as usize;
        let len = u64_at(cursor + 8) as usize;
        let checksum = u64_at(cursor + 16);
        cursor += 24;
        table.push((name, offset, len, checksum));
    }

    let mut sections = Vec::with_capacity(count);
    for (name, offset, len, checksum) in table {
        let end = offset
            .checked_add(len)
            .ok_or_else(|| bad("section out of bounds"))?;
        if end > buf.len() {
            return Err(bad("section out of bounds"));
        }
        let bytes = buf[offset..end].to_vec();
        if fnv1a(&bytes) != checksum {
            return Err(Error::MalformedIndex(format!(
                "checksum mismatch in section {name}"
            )));
        }
        sections.push((
            SectionInfo {
                name,
                len: len as u64,
                checksum,
            },
            bytes,
        ));
    }
    Ok(RawContainer { tag, sections })
}

/// Loads an index from `path`, verifying magic, version, and all checksums.
pub fn read_index(path: &Path) -> Result<CatIndex> {
    let mut raw = read_raw(path)?;
    let (sigma, num_docs, n, n_prime): (u8, u32, usize, usize) = raw.require("meta")?;
    let tree: CategoryTree = raw.require("tree")?;
    let laq: LevelAncestorIndex = raw.require("laq")?;
    let text: SuffixIndex = raw.require("text")?;
    let docs: DocumentArray = raw.require("docs")?;
    let colored: Option<ColoredEngine> = raw.take("colored")?;
    let shaped: Option<ShapedWaveletIndex> = raw.take("shaped")?;
    let heavy: Option<HeavyPathIndex> = raw.take("heavy")?;
    for (expect, present, name) in [
        (TAG_COLORED, colored.is_some(), "colored"),
        (TAG_WAVELET, shaped.is_some(), "shaped"),
        (TAG_HEAVY, heavy.is_some(), "heavy"),
    ] {
        if (raw.tag & expect != 0) != present {
            return Err(Error::MalformedIndex(format!(
                "engine tag disagrees with section {name}"
            )));
        }
    }
    Ok(CatIndex {
        sigma,
        num_docs,
        n,
        n_prime,
        tree,
        laq,
        text,
        docs,
        colored,
        shaped,
        heavy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::index::{BuildConfig, Engine};
    use std::io::{Seek, SeekFrom};

    fn sample_index() -> CatIndex {
        let corpus = Corpus::new(
            vec![b"ab".to_vec(), b"ba".to_vec(), b"aa".to_vec(), b"bb".to_vec()],
            None,
        )
        .unwrap();
        let tree = CategoryTree::new(
            vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)],
            vec![3, 4, 5, 6],
            4,
        )
        .unwrap();
        CatIndex::build(&corpus, tree, &BuildConfig::default()).unwrap()
    }

    #[test]
    fn roundtrip_identical_queries() {
        let idx = sample_index();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ctix");
        let infos = write_index(&path, &idx).unwrap();
        assert!(infos.iter().any(|s| s.name == "text"));
        let back = read_index(&path).unwrap();
        let mut s1 = idx.new_scratch();
        let mut s2 = back.new_scratch();
        for eng in [Engine::Colored, Engine::Wavelet, Engine::Heavy] {
            for lvl in 1..=3 {
                for p in [&b"a"[..], b"bb", b"ab", b"ba"] {
                    let r1 = idx.query(eng, p, lvl, &mut s1);
                    let r2 = back.query(eng, p, lvl, &mut s2);
                    match (r1, r2) {
                        (Ok(a), Ok(b)) => assert_eq!(a.nodes, b.nodes),
                        (Err(_), Err(_)) => {}
                        other => panic!("divergent results: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn bad_magic_rejected() {
        let idx = sample_index();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ctix");
        write_index(&path, &idx).unwrap();
        let mut f = std::fs::OpenOptions::new().write(true).open(&path).unwrap();
        f.write_all(b"NOPE").unwrap();
        assert!(matches!(read_index(&path), Err(Error::MalformedIndex(_))));
    }

    #[test]
    fn corrupted_payload_rejected() {
        let idx = sample_index();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ctix");
        write_index(&path, &idx).unwrap();
        let len = std::fs::metadata(&path).unwrap().len();
        let mut f = std::fs::OpenOptions::new()
            .read(true)
            .write(true)
            .open(&path)
            .unwrap();
        f.seek(SeekFrom::Start(len - 9)).unwrap();
        let mut b = [0u8; 1];
        f.read_exact(&mut b).unwrap();
        f.seek(SeekFrom::Start(len - 9)).unwrap();
        f.write_all(&[b[0] ^ 0xff]).unwrap();
        match read_index(&path) {
            Err(Error::MalformedIndex(m)) => assert!(m.contains("checksum"), "{m}"),
            Err(e) => panic!("unexpected error: {e}"),
            Ok(_) => panic!("corrupted index accepted"),
        }
    }

    #[test]
    fn truncated_rejected() {
        let idx = sample_index();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ctix");
        write_index(&path, &idx).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(read_index(&path), Err(Error::MalformedIndex(_))));
    }
}
