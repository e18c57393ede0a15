//! `SQGF1` field snapshots.
//!
//! One record is
//!
//! ```text
//! magic    5 bytes   b"SQGF1"
//! n        u64 LE    points per axis
//! length   f64 LE    box length
//! name_len u16 LE
//! name     name_len bytes of UTF-8
//! values   n*n f64 LE, row-major (x fastest)
//! ```
//!
//! Records may be concatenated; a flow map is stored as two records named
//! `DISP.x` and `DISP.y` holding its displacement components.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use crate::error::FieldError;
use crate::field::{ScalarField, VectorField2};
use crate::grid::Grid;

pub const MAGIC: &[u8; 5] = b"SQGF1";
pub const DISPLACEMENT_TAG: &str = "DISP";

pub fn write_field<W: Write>(w: &mut W, name: &str, f: &ScalarField) -> Result<(), FieldError> {
    let name_bytes = name.as_bytes();
    let name_len = u16::try_from(name_bytes.len())
        .map_err(|_| FieldError::Format(format!("field name too long ({} bytes)", name_bytes.len())))?;
    w.write_all(MAGIC)?;
    w.write_all(&(f.grid().n() as u64).to_le_bytes())?;
    w.write_all(&f.grid().length().to_le_bytes())?;
    w.write_all(&name_len.to_le_bytes())?;
    w.write_all(name_bytes)?;
    let mut buf = Vec::with_capacity(f.values().len() * 8);
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<bool, FieldError> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(false),
            Ok(0) => return Err(FieldError::Format("truncated record header".into())),
            Ok(k) => filled += k,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(true)
}

/// Read one record. Returns `None` at a clean end of stream. When `grid` is
/// given, the record must match it and the returned field shares its plans.
pub fn read_field<R: Read>(
    r: &mut R,
    grid: Option<&Grid>,
) -> Result<Option<(String, ScalarField)>, FieldError> {
    let mut magic = [0u8; 5];
    if !read_exact_or_eof(r, &mut magic)? {
        return Ok(None);
    }
    if &magic != MAGIC {
        return Err(FieldError::Format(format!("bad magic {magic:?}")));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    let mut name = vec![0u8; u16::from_le_bytes(b2) as usize];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|e| FieldError::Format(e.to_string()))?;
    let grid = match grid {
        Some(g) => {
            if g.n() != n || g.length().to_bits() != length.to_bits() {
                return Err(FieldError::Format(format!(
                    "record '{name}' is {n}x{n} on L = {length}, expected {}x{} on L = {}",
                    g.n(),
                    g.n(),
                    g.length()
                )));
            }
            g.clone()
        }
        None => Grid::new(n, length)?,
    };
    let mut raw = vec![0u8; n * n * 8];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Some((name, ScalarField::from_values(&grid, values)?)))
}

pub fn read_all<R: Read>(r: &mut R, grid: Option<&Grid>) -> Result<Vec<(String, ScalarField)>, FieldError> {
    let mut out = Vec::new();
    let mut shared = grid.cloned();
    while let Some((name, f)) = read_field(r, shared.as_ref())? {
        shared.get_or_insert_with(|| f.grid().clone());
        out.push((name, f));
    }
    Ok(out)
}

pub fn save_field(path: &Path, name: &str, f: &ScalarField) -> Result<(), FieldError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, name, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_fields(path: &Path) -> Result<Vec<(String, ScalarField)>, FieldError> {
    read_all(&mut BufReader::new(File::open(path)?), None)
}

/// Write the two components of a displacement field tagged `DISP`.
pub fn write_displacement<W: Write>(w: &mut W, d: &VectorField2) -> Result<(), FieldError> {
    write_field(w, &format!("{DISPLACEMENT_TAG}.x"), d.x())?;
    write_field(w, &format!("{DISPLACEMENT_TAG}.y"), d.y())
}

pub fn read_displacement<R: Read>(r: &mut R, grid: Option<&Grid>) -> Result<VectorField2, FieldError> {
    let mut next = |axis: &str| -> Result<ScalarField, FieldError> {
        let expected = format!("{DISPLACEMENT_TAG}.{axis}");
        match read_field(r, grid)? {
            Some((name, f)) if name == expected => Ok(f),
            Some((name, _)) => Err(FieldError::Format(format!("expected '{expected}', found '{name}'"))),
            None => Err(FieldError::Format(format!("missing '{expected}' record"))),
        }
    };
    let x = next("x")?;
    let y = next("y")?;
    let y = ScalarField::from_values(x.grid(), y.into_values())?;
    VectorField2::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), len in 0.1f64..100.0, name in "[a-zA-Z0-9_.]{0,24}") {
            let g = Grid::new(16, len).unwrap();
            let f = ScalarField::from_fn(&g, |x, y| {
                let h = (x * 12.9898 + y * 78.233 + seed as f64 * 1e-9).sin() * 43758.5453;
                h - h.floor() - 0.5
            });
            let mut buf = Vec::new();
            write_field(&mut buf, &name, &f).unwrap();
            let (back_name, back) = read_field(&mut buf.as_slice(), None).unwrap().unwrap();
            prop_assert_eq!(back_name, name);
            prop_assert_eq!(back.grid().length().to_bits(), len.to_bits());
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn header_layout() {
        let g = Grid::new(16, 2.0).unwrap();
        let f = ScalarField::constant(&g, 1.5);
        let mut buf = Vec::new();
        write_field(&mut buf, "theta", &f).unwrap();
        assert_eq!(&buf[..5], b"SQGF1");
        assert_eq!(u64::from_le_bytes(buf[5..13].try_into().unwrap()), 16);
        assert_eq!(f64::from_le_bytes(buf[13..21].try_into().unwrap()), 2.0);
        assert_eq!(u16::from_le_bytes(buf[21..23].try_into().unwrap()), 5);
        assert_eq!(&buf[23..28], b"theta");
        assert_eq!(buf.len(), 28 + 256 * 8);
        assert_eq!(f64::from_le_bytes(buf[28..36].try_into().unwrap()), 1.5);
    }

    #[test]
    fn rejects_garbage_and_truncation() {
        assert!(read_field(&mut &b"NOPE!aaaaaaaa"[..], None).is_err());
        let g = Grid::new(16, 2.0).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, "t", &ScalarField::zeros(&g)).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_field(&mut buf.as_slice(), None).is_err());
        assert!(read_field(&mut &b""[..], None).unwrap().is_none());
    }

    #[test]
    fn displacement_pair() {
        let g = Grid::new(16, 2.0).unwrap();
        let d = VectorField2::new(
            ScalarField::from_fn(&g, |x, _| x.sin()),
            ScalarField::from_fn(&g, |_, y| y.cos()),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_displacement(&mut buf, &d).unwrap();
        let back = read_displacement(&mut buf.as_slice(), Some(&g)).unwrap();
        assert_eq!(back, d);
        let names: Vec<String> = read_all(&mut buf.as_slice(), None)
            .unwrap()
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        assert_eq!(names, vec!["DISP.x", "DISP.y"]);
    }
}
