//! SNR grid arguments: `lo:hi:step`, a comma list, or a single value.

use crate::CliError;

/// Parses a grid spec. `lo:hi:step` is inclusive of both ends; values are
/// computed as `lo + i·step` so no rounding accumulates.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("malformed grid '{spec}': {why}"));
    let num = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("values must be finite"))
        }
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected lo:hi:step"));
        }
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) {
            return Err(bad("step must be positive"));
        }
        if hi < lo {
            return Err(bad("hi below lo"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(bad("more than 10^6 points"));
        }
        Ok((0..count).map(|i| lo + i as f64 * step).collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(snr: f64) -> f64 {
    10.0 * snr.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let g = parse_grid("-20:20:0.5").unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], -20.0);
        assert_eq!(g[80], 20.0);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
        assert_eq!(parse_grid("5").unwrap(), vec![5.0]);
        assert_eq!(parse_grid("1,2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
    }

    #[test]
    fn malformed() {
        for s in ["", "1:2", "1:2:0", "2:1:0.5", "a:b:c", "1:2:3:4", "inf"] {
            assert!(matches!(parse_grid(s), Err(CliError::Usage(_))), "{s}");
        }
    }

    #[test]
    fn db_round_trip() {
        assert_eq!(db_to_linear(10.0), 10.0);
        assert!((linear_to_db(db_to_linear(-3.7)) + 3.7).abs() < 1e-12);
    }
}
