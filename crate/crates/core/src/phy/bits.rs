use std::path::Path;

use rand::Rng;

use crate::{Error, Result};

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// Reads a payload from a text file of `0`/`1` characters; whitespace is ignored.
pub fn read_bits_file(path: &Path) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Config(format!(
                "{}: unexpected character {other:?} in bit file",
                path.display()
            ))),
        })
        .collect()
}
