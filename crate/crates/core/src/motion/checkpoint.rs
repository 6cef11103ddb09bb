//! `SMV1` parameter checkpoints: the 4 magic bytes followed by every
//! parameter as a little-endian `f64`, in declaration order.

use std::path::Path;

use super::model::MotionParams;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SMV1";

pub fn encode_checkpoint(params: &MotionParams) -> Vec<u8> {
    let values = params.flatten();
    let mut out = Vec::with_capacity(4 + 8 * values.len());
    out.extend_from_slice(MAGIC);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Loads a checkpoint into `params`, whose architecture must match.
pub fn decode_checkpoint(bytes: &[u8], params: &mut MotionParams) -> Result<()> {
    let body = bytes
        .strip_prefix(MAGIC.as_slice())
        .ok_or_else(|| Error::Checkpoint("missing SMV1 magic".into()))?;
    if body.len() % 8 != 0 {
        return Err(Error::Checkpoint(format!(
            "payload of {} bytes is not a whole number of f64 values",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if values.len() != params.param_count() {
        return Err(Error::Checkpoint(format!(
            "checkpoint holds {} parameters, model has {}",
            values.len(),
            params.param_count()
        )));
    }
    params.load_flat(&values)
}

pub fn save_checkpoint(path: &Path, params: &MotionParams) -> Result<()> {
    std::fs::write(path, encode_checkpoint(params)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path, params: &mut MotionParams) -> Result<()> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::MotionConfig;

    #[test]
    fn round_trip_and_errors() {
        let p = MotionParams::new(MotionConfig::tiny(), 4, 8, 11).unwrap();
        let bytes = encode_checkpoint(&p);
        assert_eq!(&bytes[..4], b"SMV1");
        assert_eq!(bytes.len(), 4 + 8 * p.param_count());
        assert_eq!(&bytes[4..12], &p.flatten()[0].to_le_bytes());

        let mut q = MotionParams::new(MotionConfig::tiny(), 4, 8, 12).unwrap();
        decode_checkpoint(&bytes, &mut q).unwrap();
        assert_eq!(p, q);

        assert!(decode_checkpoint(b"SMV2", &mut q).is_err());
        assert!(decode_checkpoint(&bytes[..bytes.len() - 3], &mut q).is_err());
        let mut other = MotionParams::new(MotionConfig::tiny(), 5, 8, 12).unwrap();
        assert!(decode_checkpoint(&bytes, &mut other).is_err());
    }
}
