//! `MPOLAR1` binary snapshots.
//!
//! Layout (little-endian): the 8 magic bytes `MPOLAR1\0`, `u32 n`, `f64 L`,
//! `f64 time`, then six blocks of `n³` complex128 values (`re`, `im`) for
//! `u₁, u₂, u₃, w₁, w₂, w₃`, each block in lattice row-major order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{SpectralField, StateSpectral};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"MPOLAR1\0";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: StateSpectral,
}

pub fn write_snapshot<W: Write>(mut out: W, state: &StateSpectral, time: f64) -> Result<()> {
    let g = state.grid();
    let n = u32::try_from(g.n()).map_err(|_| Error::Format("grid too large".into()))?;
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&g.box_length().to_le_bytes())?;
    out.write_all(&time.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for field in [&state.u, &state.w] {
        for comp in field.components() {
            buf.clear();
            for z in comp {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad magic, not an MPOLAR1 file".into()));
    }
    let mut nb = [0u8; 4];
    input.read_exact(&mut nb)?;
    let n = u32::from_le_bytes(nb) as usize;
    let box_length = read_f64(&mut input)?;
    let time = read_f64(&mut input)?;
    let grid = GridSpec::new(n, box_length).map_err(|e| Error::Format(e.to_string()))?;

    let mut raw = vec![0u8; 16 * grid.len()];
    let mut comps: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    for _ in 0..6 {
        input.read_exact(&mut raw)?;
        comps.push(
            raw.chunks_exact(16)
                .map(|c| {
                    let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                    Complex64::new(re, im)
                })
                .collect(),
        );
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after snapshot payload".into()));
    }
    let mut it = comps.into_iter();
    let mut take3 = || -> [Vec<Complex64>; 3] {
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
    };
    let u = SpectralField::from_components(grid, take3())?;
    let w = SpectralField::from_components(grid, take3())?;
    Ok(Snapshot {
        time,
        state: StateSpectral::new(u, w)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_state() -> StateSpectral {
        let g = GridSpec::new(4, 1.5).unwrap();
        let u = SpectralField::from_fn(g, |i| {
            let x = i as f64;
            [0, 1, 2].map(|c| Complex64::new(x + c as f64, -x * 0.5))
        });
        let w = u.scale(-0.25);
        StateSpectral::new(u, w).unwrap()
    }

    #[test]
    fn header_layout() {
        let s = sample_state();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &s, 0.125).unwrap();
        assert_eq!(&bytes[..8], b"MPOLAR1\0");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 0.125);
        assert_eq!(bytes.len(), 28 + 6 * 64 * 16);
        // first payload value is u₁ at mode 0, second is u₁ at mode 1
        assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), 0.0);
        assert_eq!(f64::from_le_bytes(bytes[44..52].try_into().unwrap()), 1.0);
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let s = sample_state();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &s, 3.0).unwrap();
        let back = read_snapshot(bytes.as_slice()).unwrap();
        assert_eq!(back.time, 3.0);
        assert_eq!(back.state, s);
    }

    #[test]
    fn rejects_corrupt_input() {
        let s = sample_state();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &s, 0.0).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_snapshot(bad.as_slice()), Err(Error::Format(_))));
        assert!(read_snapshot(&bytes[..bytes.len() - 3]).is_err());
        let mut long = bytes.clone();
        long.push(0);
        assert!(read_snapshot(long.as_slice()).is_err());
    }
}
