use std::fs;
use std::path::Path;

use avatar_core::zeta::ZeroList;

use crate::AvatarError;

/// Reads a zero file: one decimal ordinate per line, `#` comments allowed.
pub fn load_zeros(path: impl AsRef<Path>) -> Result<ZeroList, AvatarError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| AvatarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ZeroList::parse(&text).map_err(|source| AvatarError::ZeroFile {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroComparison {
    pub compared: usize,
    pub max_deviation: f64,
    /// 1-based index where the deviation peaks.
    pub at: usize,
}

/// Compares the common prefix of two zero lists.
pub fn compare_zeros(a: &ZeroList, b: &ZeroList) -> ZeroComparison {
    let mut out = ZeroComparison {
        compared: 0,
        max_deviation: 0.0,
        at: 0,
    };
    for (i, (x, y)) in a.ordinates.iter().zip(&b.ordinates).enumerate() {
        let d = (x - y).abs();
        out.compared += 1;
        if out.at == 0 || d > out.max_deviation {
            out.max_deviation = d;
            out.at = i + 1;
        }
    }
    out
}
