//! State-vector snapshot file format.
//!
//! The layout is fixed and byte-exact:
//!
//! | offset | size        | content                                   |
//! |--------|-------------|-------------------------------------------|
//! | 0      | 4           | qubit count Q, u32 little endian          |
//! | 4      | 4           | lattice site count L, u32 little endian   |
//! | 8      | 8           | step index, u64 little endian             |
//! | 16     | 16 * 2^Q    | amplitudes: (re, im) f64 little endian,   |
//! |        |             | basis index ascending, qubit alpha on bit |
//! |        |             | alpha - 1 of the index                    |
//!
//! Total file size: 16 + 2^(Q+4) bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::engine::StateVector;
use crate::error::{Error, Result};
use crate::numerics::C64;

/// Snapshot header preceding the amplitude block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotHeader {
    pub qubits: u32,
    pub sites: u32,
    pub step: u64,
}

/// Serialize a snapshot into a byte vector.
pub fn snapshot_bytes(state: &StateVector, sites: u32, step: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + state.len() * 16);
    out.extend_from_slice(&(state.qubits() as u32).to_le_bytes());
    out.extend_from_slice(&sites.to_le_bytes());
    out.extend_from_slice(&step.to_le_bytes());
    for amp in state.amplitudes() {
        out.extend_from_slice(&amp.re.to_le_bytes());
        out.extend_from_slice(&amp.im.to_le_bytes());
    }
    out
}

pub fn write_snapshot(path: &Path, state: &StateVector, sites: u32, step: u64) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::SnapshotFormat(format!("create {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(&snapshot_bytes(state, sites, step))
        .map_err(|e| Error::SnapshotFormat(format!("write {}: {e}", path.display())))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, StateVector)> {
    let file = File::open(path)
        .map_err(|e| Error::SnapshotFormat(format!("open {}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::SnapshotFormat(format!("read {}: {e}", path.display())))?;
    parse_snapshot(&bytes)
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<(SnapshotHeader, StateVector)> {
    if bytes.len() < 16 {
        return Err(Error::SnapshotFormat(format!(
            "file too short for a header: {} bytes",
            bytes.len()
        )));
    }
    let qubits = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let sites = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let step = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if qubits == 0 || qubits > crate::engine::MAX_QUBITS as u32 {
        return Err(Error::SnapshotFormat(format!("bad qubit count {qubits}")));
    }
    let dim = 1usize << qubits;
    let want = 16 + dim * 16;
    if bytes.len() != want {
        return Err(Error::SnapshotFormat(format!(
            "expected {want} bytes for Q = {qubits}, got {}",
            bytes.len()
        )));
    }
    let mut amps = Vec::with_capacity(dim);
    for i in 0..dim {
        let at = 16 + i * 16;
        let re = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[at + 8..at + 16].try_into().unwrap());
        amps.push(C64::new(re, im));
    }
    let state = StateVector::from_amplitudes(amps, qubits as usize)?;
    Ok((
        SnapshotHeader {
            qubits,
            sites,
            step,
        },
        state,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_amplitudes() {
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[1] = C64::new(0.25, -0.5);
        amps[6] = C64::new(-0.125, 1.0);
        let state = StateVector::from_amplitudes(amps, 3).unwrap();
        let dir = std::env::temp_dir().join("qlg_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.qsv");
        write_snapshot(&path, &state, 0, 42).unwrap();
        let (header, back) = read_snapshot(&path).unwrap();
        assert_eq!(header.qubits, 3);
        assert_eq!(header.step, 42);
        assert_eq!(back, state);
    }

    #[test]
    fn byte_layout_is_pinned() {
        let mut amps = vec![C64::new(0.0, 0.0); 2];
        amps[0] = C64::new(1.0, 0.0);
        amps[1] = C64::new(-2.0, 0.5);
        let state = StateVector::from_amplitudes(amps, 1).unwrap();
        let bytes = snapshot_bytes(&state, 3, 0x0102030405060708);
        assert_eq!(bytes.len(), 16 + 2 * 16);
        assert_eq!(&bytes[0..4], &[1, 0, 0, 0]);
        assert_eq!(&bytes[4..8], &[3, 0, 0, 0]);
        assert_eq!(&bytes[8..16], &[8, 7, 6, 5, 4, 3, 2, 1]);
        assert_eq!(&bytes[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &0.0f64.to_le_bytes());
        assert_eq!(&bytes[32..40], &(-2.0f64).to_le_bytes());
        assert_eq!(&bytes[40..48], &0.5f64.to_le_bytes());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[0] = C64::new(1.0, 0.0);
        let state = StateVector::from_amplitudes(amps, 2).unwrap();
        let mut bytes = snapshot_bytes(&state, 1, 0);
        bytes.truncate(bytes.len() - 5);
        assert!(matches!(
            parse_snapshot(&bytes),
            Err(Error::SnapshotFormat(_))
        ));
    }
}
