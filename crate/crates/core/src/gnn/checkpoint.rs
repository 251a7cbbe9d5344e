//! Model checkpoints: four little-endian u64 shape fields
//! (input_dim, hidden, layers, output_dim) followed by the flat parameter
//! vector as little-endian f64.

use std::io::{Read, Write};

use super::gin::{GinModel, GinShape};
use crate::error::{arg_err, Result};

pub fn write_checkpoint<W: Write>(model: &GinModel, mut out: W) -> Result<()> {
    let s = model.shape();
    for x in [s.input_dim, s.hidden, s.num_layers, s.output_dim] {
        out.write_all(&(x as u64).to_le_bytes())?;
    }
    for p in model.params() {
        out.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<GinModel> {
    let mut word = [0u8; 8];
    let mut header = [0usize; 4];
    for h in &mut header {
        input.read_exact(&mut word)?;
        *h = u64::from_le_bytes(word) as usize;
    }
    let shape = GinShape::new(header[0], header[1], header[2], header[3]);
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if rest.len() != 8 * shape.num_params() {
        return arg_err(format!(
            "checkpoint body has {} bytes, shape needs {}",
            rest.len(),
            8 * shape.num_params()
        ));
    }
    let params = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    GinModel::from_flat(shape, params)
}
