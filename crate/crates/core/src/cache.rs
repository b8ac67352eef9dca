//! CSV persistence for class inventories, with a one-line sidecar that
//! records the range and filter so a later run can extend the same file.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enumerate::{classes, ClassFilter, ClassInventory, ClassRecord};
use crate::error::{Error, Result};
use crate::forms::{BinaryCubicForm, Signature};

pub const INVENTORY_HEADER: &str = "a,b,c,d,disc,sig,content,aut,maximal,ntr";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    disc: i128,
    sig: String,
    content: u64,
    aut: u32,
    maximal: u8,
    ntr: u8,
}

impl From<&ClassRecord> for Row {
    fn from(r: &ClassRecord) -> Self {
        let [a, b, c, d] = r.form.coeffs();
        Row {
            a,
            b,
            c,
            d,
            disc: r.disc,
            sig: r.signature.label().into(),
            content: r.content,
            aut: r.aut,
            maximal: r.maximal as u8,
            ntr: r.ntr as u8,
        }
    }
}

fn flag(v: u8, line: usize) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::Parse(format!("row {line}: flag must be 0 or 1, got {v}"))),
    }
}

impl Row {
    fn into_record(self, line: usize) -> Result<ClassRecord> {
        let form = BinaryCubicForm::new(self.a, self.b, self.c, self.d);
        let disc = form.discriminant()?;
        if disc != self.disc {
            return Err(Error::Parse(format!("row {line}: stored disc {} but form has {disc}", self.disc)));
        }
        let signature = Signature::of_disc(disc).ok_or_else(|| Error::Parse(format!("row {line}: zero disc")))?;
        if signature.label() != self.sig {
            return Err(Error::Parse(format!("row {line}: signature {} disagrees with disc", self.sig)));
        }
        if form.content() != self.content {
            return Err(Error::Parse(format!("row {line}: wrong content {}", self.content)));
        }
        Ok(ClassRecord {
            form,
            disc,
            signature,
            content: self.content,
            aut: self.aut,
            maximal: flag(self.maximal, line)?,
            ntr: flag(self.ntr, line)?,
        })
    }
}

/// Range and filter of a stored inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryMeta {
    pub disc_lo: i128,
    pub disc_hi: i128,
    pub filter: String,
}

impl InventoryMeta {
    pub fn of(inv: &ClassInventory) -> Self {
        InventoryMeta { disc_lo: inv.disc_lo, disc_hi: inv.disc_hi, filter: inv.filter.clone() }
    }

    pub fn to_line(&self) -> String {
        format!("range={}..{} filter={}", self.disc_lo, self.disc_hi, self.filter)
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed inventory metadata: {line:?}"));
        let rest = line.trim().strip_prefix("range=").ok_or_else(bad)?;
        let (range, filter) = rest.split_once(" filter=").ok_or_else(bad)?;
        let (lo, hi) = parse_range(range)?;
        Ok(InventoryMeta { disc_lo: lo, disc_hi: hi, filter: filter.to_string() })
    }

    fn covers(&self, lo: i128, hi: i128) -> bool {
        self.disc_lo <= lo && hi <= self.disc_hi
    }
}

/// `lo..hi` with exclusive endpoints.
pub fn parse_range(s: &str) -> Result<(i128, i128)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| Error::Parse(format!("range {s:?} is not lo..hi")))?;
    let num = |t: &str| t.trim().parse::<i128>().map_err(|e| Error::Parse(format!("range {s:?}: {e}")));
    Ok((num(lo)?, num(hi)?))
}

/// Writes the header and one row per record. Lines starting with `#` may be
/// written before this by the caller; [`read_inventory`] skips them.
pub fn write_inventory<W: Write>(inv: &ClassInventory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(INVENTORY_HEADER.split(','))?;
    for r in &inv.records {
        w.serialize(Row::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses and validates rows: header, recomputed discriminants, flags and
/// sort order.
pub fn read_inventory<R: Read>(input: R, meta: &InventoryMeta) -> Result<ClassInventory> {
    let body: Vec<String> = BufReader::new(input)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.starts_with('#'))
        .collect();
    match body.first() {
        Some(h) if h.trim() == INVENTORY_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("unexpected inventory header {h:?}"))),
        None => return Err(Error::Parse("inventory file has no header".into())),
    }
    let joined = body.join("\n");
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(joined.as_bytes());
    let mut records: Vec<ClassRecord> = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let rec = row?.into_record(i + 2)?;
        if !(meta.disc_lo < rec.disc && rec.disc < meta.disc_hi) {
            return Err(Error::Parse(format!("row {}: disc {} outside {}", i + 2, rec.disc, meta.to_line())));
        }
        if let Some(prev) = records.last() {
            if prev.sort_key() >= rec.sort_key() {
                return Err(Error::Parse(format!("row {}: rows are not strictly sorted", i + 2)));
            }
        }
        records.push(rec);
    }
    Ok(ClassInventory { disc_lo: meta.disc_lo, disc_hi: meta.disc_hi, filter: meta.filter.clone(), records })
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn save(inv: &ClassInventory, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_inventory(inv, &mut buf)?;
    fs::write(path, buf)?;
    fs::write(sidecar_path(path), InventoryMeta::of(inv).to_line() + "\n")?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ClassInventory> {
    let meta = InventoryMeta::parse_line(&fs::read_to_string(sidecar_path(path))?)?;
    read_inventory(fs::File::open(path)?, &meta)
}

fn restrict(inv: ClassInventory, lo: i128, hi: i128) -> ClassInventory {
    let records = inv.records.into_iter().filter(|r| lo < r.disc && r.disc < hi).collect();
    ClassInventory { disc_lo: lo, disc_hi: hi, filter: inv.filter, records }
}

/// How [`resume`] obtained its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheUse {
    Fresh,
    Hit,
    Extended,
}

/// Inventory for `lo < Disc < hi`, reusing a compatible cache at `path`
/// (same filter, overlapping range) and enumerating only what is missing.
/// The widened result is written back.
pub fn resume(path: &Path, lo: i128, hi: i128, filter: &ClassFilter) -> Result<(ClassInventory, CacheUse)> {
    let wanted = filter.describe();
    let cached = if path.exists() && sidecar_path(path).exists() { Some(load(path)?) } else { None };
    let cached = cached.filter(|c| c.filter == wanted && c.disc_lo < hi && lo < c.disc_hi);
    let Some(cached) = cached else {
        let inv = classes(lo, hi, filter)?;
        save(&inv, path)?;
        return Ok((inv, CacheUse::Fresh));
    };
    let meta = InventoryMeta::of(&cached);
    if meta.covers(lo, hi) {
        return Ok((restrict(cached, lo, hi), CacheUse::Hit));
    }
    let (new_lo, new_hi) = (lo.min(meta.disc_lo), hi.max(meta.disc_hi));
    let mut records = cached.records;
    // cached covers lo_c < D < hi_c; fill lo < D ≤ lo_c and hi_c ≤ D < hi
    if new_lo < meta.disc_lo {
        records.extend(classes(new_lo, meta.disc_lo + 1, filter)?.records);
    }
    if meta.disc_hi < new_hi {
        records.extend(classes(meta.disc_hi - 1, new_hi, filter)?.records);
    }
    records.sort_by_key(|r| r.sort_key());
    let merged = ClassInventory { disc_lo: new_lo, disc_hi: new_hi, filter: wanted, records };
    save(&merged, path)?;
    Ok((restrict(merged, lo, hi), CacheUse::Extended))
}
