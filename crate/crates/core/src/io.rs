//! Number formatting and file output shared by the CSV writers.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        // normalize -0.0 so identical runs never differ in sign of zero
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

pub fn csv_line(values: &[f64]) -> String {
    let mut line = values.iter().map(|&v| fmt_real(v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| Error::Io {
            context: format!("creating {}", parent.display()),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(-0.0), "0");
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        assert_eq!(csv_line(&[0.5, -2.0]), "5.0000000000000000e-1,-2.0000000000000000e0\n");
    }

    proptest! {
        #[test]
        fn round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let back: f64 = fmt_real(v).parse().unwrap();
            prop_assert_eq!(back, v);
        }
    }
}
