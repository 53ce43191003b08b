//! JSON encodings shared by the public data types.
//!
//! A complex number is `[re, im]`. An `m x m` block is a flat row-major list
//! of `m^2` complex entries. Scalar lags may also be given as a bare number.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Real(f64),
    Complex([f64; 2]),
    Block(Vec<[f64; 2]>),
}

impl EntryJson {
    pub fn from_block(x: &CMat) -> Self {
        if x.nrows() == 1 {
            let z = x[(0, 0)];
            return EntryJson::Complex([z.re, z.im]);
        }
        let mut out = Vec::with_capacity(x.len());
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                out.push([x[(i, j)].re, x[(i, j)].im]);
            }
        }
        EntryJson::Block(out)
    }

    pub fn to_block(&self, m: usize) -> Result<CMat> {
        match self {
            EntryJson::Real(v) if m == 1 => Ok(CMat::from_element(1, 1, Complex64::new(*v, 0.0))),
            EntryJson::Complex([re, im]) if m == 1 => {
                Ok(CMat::from_element(1, 1, Complex64::new(*re, *im)))
            }
            EntryJson::Block(entries) if entries.len() == m * m => Ok(CMat::from_row_iterator(
                m,
                m,
                entries.iter().map(|&[re, im]| Complex64::new(re, im)),
            )),
            _ => Err(Error::DimensionMismatch(format!(
                "entry does not describe a {m}x{m} block"
            ))),
        }
    }
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pairs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_forms() {
        let e: EntryJson = serde_json::from_str("2.5").unwrap();
        assert_eq!(e.to_block(1).unwrap()[(0, 0)], Complex64::new(2.5, 0.0));
        let e: EntryJson = serde_json::from_str("[1.0, -0.5]").unwrap();
        assert_eq!(e.to_block(1).unwrap()[(0, 0)], Complex64::new(1.0, -0.5));
        let e: EntryJson = serde_json::from_str("[[1,0],[0,2],[0,-2],[3,0]]").unwrap();
        let b = e.to_block(2).unwrap();
        assert_eq!(b[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(b[(1, 0)], Complex64::new(0.0, -2.0));
        assert!(e.to_block(3).is_err());
        let round = EntryJson::from_block(&b);
        assert_eq!(round.to_block(2).unwrap(), b);
    }
}
