//! Packed stage archives.
//!
//! On disk: a 16-byte header (`N1LARC01`, rows as `u32` LE, max columns as
//! `u32` LE) followed by records, each a `u16` LE length and that many bytes
//! of [`CanonicalKey`]. Records are sorted, so archives of the same stage are
//! byte-identical across runs.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::config::{CanonicalKey, Configuration};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"N1LARC01";
pub const HEADER_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageArchive {
    rows: usize,
    max_cols: usize,
    count: usize,
    data: Vec<u8>,
}

impl StageArchive {
    pub fn from_sorted_keys<'a>(
        rows: usize,
        max_cols: usize,
        keys: impl Iterator<Item = &'a CanonicalKey>,
    ) -> Self {
        let mut data = Vec::new();
        let mut count = 0;
        for key in keys {
            let bytes = key.as_bytes();
            data.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
            data.extend_from_slice(bytes);
            count += 1;
        }
        StageArchive { rows, max_cols, count, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn max_cols(&self) -> usize {
        self.max_cols
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Raw key bytes of each record.
    pub fn iter(&self) -> Records<'_> {
        Records { data: &self.data }
    }

    pub fn keys(&self) -> impl Iterator<Item = CanonicalKey> + '_ {
        self.iter().map(|b| CanonicalKey::from_bytes(b.to_vec()).expect("archive records are checked on load"))
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.iter().map(crate::config::decode_key)
    }

    pub fn counts_by_cols(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for bytes in self.iter() {
            *out.entry(bytes[1] as usize).or_insert(0) += 1;
        }
        out
    }

    /// Records satisfying `keep`, order preserved.
    pub fn filter(&self, mut keep: impl FnMut(&[u8]) -> bool) -> StageArchive {
        let mut data = Vec::new();
        let mut count = 0;
        for bytes in self.iter().filter(|b| keep(b)) {
            data.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
            data.extend_from_slice(bytes);
            count += 1;
        }
        StageArchive { rows: self.rows, max_cols: self.max_cols, count, data }
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.rows as u32).to_le_bytes())?;
        w.write_all(&(self.max_cols as u32).to_le_bytes())?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|_| Error::Archive("truncated header".into()))?;
        if &header[..8] != MAGIC {
            return Err(Error::Archive("bad magic".into()));
        }
        let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let max_cols = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        let mut count = 0;
        let mut at = 0;
        while at < data.len() {
            if at + 2 > data.len() {
                return Err(Error::Archive("truncated record length".into()));
            }
            let len = u16::from_le_bytes([data[at], data[at + 1]]) as usize;
            let end = at + 2 + len;
            if end > data.len() {
                return Err(Error::Archive("truncated record".into()));
            }
            let key = CanonicalKey::from_bytes(data[at + 2..end].to_vec())?;
            if key.rows() != rows {
                return Err(Error::Archive(format!(
                    "record with {} rows in an archive of {rows}-row configurations",
                    key.rows()
                )));
            }
            count += 1;
            at = end;
        }
        Ok(StageArchive { rows, max_cols, count, data })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

pub struct Records<'a> {
    data: &'a [u8],
}

impl<'a> Iterator for Records<'a> {
    type Item = &'a [u8];

    fn next(&mut self) -> Option<&'a [u8]> {
        if self.data.len() < 2 {
            return None;
        }
        let len = u16::from_le_bytes([self.data[0], self.data[1]]) as usize;
        let (record, rest) = self.data[2..].split_at(len);
        self.data = rest;
        Some(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = Configuration::from_class_rows(5, [(0, [0, 1, 2]), (1, [2, 3, 4])]).unwrap();
        let b = Configuration::from_class_rows(6, [(0, [0, 1, 2]), (0, [3, 4, 5])]).unwrap();
        let mut keys = vec![a.key(), b.key()];
        keys.sort();
        let archive = StageArchive::from_sorted_keys(2, 6, keys.iter());
        let mut buf = Vec::new();
        archive.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(buf.len(), HEADER_LEN + 2 * 2 + a.key().as_bytes().len() + b.key().as_bytes().len());
        let back = StageArchive::read_from(&buf[..]).unwrap();
        assert_eq!(back, archive);
        assert_eq!(back.keys().collect::<Vec<_>>(), keys);
        assert_eq!(back.counts_by_cols(), BTreeMap::from([(5, 1), (6, 1)]));
    }

    #[test]
    fn rejects_garbage() {
        assert!(StageArchive::read_from(&b"N1LARC02\0\0\0\0\0\0\0\0"[..]).is_err());
        assert!(StageArchive::read_from(&b"N1LA"[..]).is_err());
        let mut buf = Vec::new();
        StageArchive::from_sorted_keys(1, 3, std::iter::once(&Configuration::seed().key()))
            .write_to(&mut buf)
            .unwrap();
        buf.pop();
        assert!(StageArchive::read_from(&buf[..]).is_err());
    }
}
