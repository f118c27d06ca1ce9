//! Snapshot persistence.
//!
//! Binary frame, all integers little-endian:
//!
//! | bytes | field |
//! |---|---|
//! | 4 | magic `FSEP` |
//! | 2 | format version (1) |
//! | 8 | `n` (u64) |
//! | 8 | window `lo` (i64) |
//! | 8 | window `hi` (i64) |
//! | 8 | macroscopic time (f64 bits) |
//! | 8·⌈(hi−lo)/64⌉ | occupancy words, site `lo + i` is bit `i % 64` of word `i / 64` |

use std::io::{self, Read, Write};

use bitvec::prelude::*;

use super::{Configuration, Window};

pub const FRAME_MAGIC: [u8; 4] = *b"FSEP";
pub const FRAME_VERSION: u16 = 1;

pub fn write_frame<W: Write>(out: &mut W, config: &Configuration, n: u64, time: f64) -> io::Result<()> {
    let w = config.window();
    out.write_all(&FRAME_MAGIC)?;
    out.write_all(&FRAME_VERSION.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&w.lo().to_le_bytes())?;
    out.write_all(&w.hi().to_le_bytes())?;
    out.write_all(&time.to_bits().to_le_bytes())?;
    let words = config.words();
    let needed = w.len().div_ceil(64);
    let tail = w.len() % 64;
    for (i, &word) in words[..needed].iter().enumerate() {
        let word = if i + 1 == needed && tail != 0 { word & ((1u64 << tail) - 1) } else { word };
        out.write_all(&word.to_le_bytes())?;
    }
    Ok(())
}

/// Reads one frame: `(n, time, configuration)`.
pub fn read_frame<R: Read>(input: &mut R) -> io::Result<(u64, f64, Configuration)> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if magic != FRAME_MAGIC {
        return Err(bad("bad frame magic"));
    }
    let mut b2 = [0u8; 2];
    input.read_exact(&mut b2)?;
    if u16::from_le_bytes(b2) != FRAME_VERSION {
        return Err(bad("unsupported frame version"));
    }
    let mut b8 = [0u8; 8];
    let mut next = |input: &mut R| -> io::Result<[u8; 8]> {
        input.read_exact(&mut b8)?;
        Ok(b8)
    };
    let n = u64::from_le_bytes(next(input)?);
    let lo = i64::from_le_bytes(next(input)?);
    let hi = i64::from_le_bytes(next(input)?);
    let time = f64::from_bits(u64::from_le_bytes(next(input)?));
    let window = Window::new(lo, hi).map_err(|e| bad(&e.to_string()))?;
    let mut words = Vec::with_capacity(window.len().div_ceil(64));
    for _ in 0..window.len().div_ceil(64) {
        words.push(u64::from_le_bytes(next(input)?));
    }
    let mut bits = BitVec::<u64, Lsb0>::from_vec(words);
    if bits[window.len()..].any() {
        return Err(bad("padding bits set"));
    }
    bits.truncate(window.len());
    Ok((n, time, Configuration::from_bits(window, bits)))
}

/// CSV rows `time,site` for every occupied site of every record.
pub fn write_site_list_csv<W: Write>(out: &mut W, times: &[f64], records: &[Configuration]) -> io::Result<()> {
    writeln!(out, "time,site")?;
    for (t, c) in times.iter().zip(records) {
        for x in c.occupied_sites() {
            writeln!(out, "{t},{x}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_roundtrip() {
        let w = Window::new(-70, 33).unwrap();
        let c = Configuration::from_sites(w, [-70, -3, 0, 5, 32]).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &c, 64, 0.125).unwrap();
        write_frame(&mut buf, &Configuration::full(w), 64, 0.25).unwrap();
        assert_eq!(buf.len(), 2 * (4 + 2 + 32 + 8 * 2));
        let mut r = &buf[..];
        let (n, t, back) = read_frame(&mut r).unwrap();
        assert_eq!((n, t), (64, 0.125));
        assert_eq!(back, c);
        let (_, t2, full) = read_frame(&mut r).unwrap();
        assert_eq!((t2, full.particle_count()), (0.25, 103));
        buf[0] = b'X';
        assert!(read_frame(&mut &buf[..]).is_err());
    }

    #[test]
    fn csv_rows() {
        let w = Window::symmetric(4).unwrap();
        let c = Configuration::from_sites(w, [-1, 2]).unwrap();
        let mut buf = Vec::new();
        write_site_list_csv(&mut buf, &[0.5], &[c]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,site\n0.5,-1\n0.5,2\n");
    }
}
