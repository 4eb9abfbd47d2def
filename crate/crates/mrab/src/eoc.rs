//! Estimated order of convergence: least-squares slope of `ln(err)` against
//! `ln(dt)` over a refinement sequence.

/// EOC fit outcome. `slope` is NaN when the errors sit at round-off level
/// (no meaningful order to report); `warnings` carries the diagnostics a
/// caller should surface.
#[derive(Debug, Clone, PartialEq)]
pub struct EocResult {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub warnings: Vec<String>,
}

/// Error floor below which a fit is meaningless: refining the step cannot
/// reduce errors made of accumulated round-off.
const ROUNDOFF_FLOOR: f64 = 1e-14;

/// Least-squares log-log slope over all provided points (three points is the
/// customary minimum). Non-monotone error sequences still get a slope, with
/// a warning; errors at round-off yield `slope = NaN`.
pub fn estimate_order(dts: &[f64], errors: &[f64]) -> EocResult {
    assert_eq!(dts.len(), errors.len(), "dt/error length mismatch");
    assert!(dts.len() >= 2, "EOC needs at least two points");
    let mut warnings = Vec::new();

    if errors.iter().any(|e| *e <= ROUNDOFF_FLOOR) {
        warnings.push(
            "errors at round-off level; order estimate is not meaningful".to_string(),
        );
        return EocResult {
            dts: dts.to_vec(),
            errors: errors.to_vec(),
            slope: f64::NAN,
            warnings,
        };
    }

    // Monotone refinement should give monotone errors; warn if it does not.
    let ordered: Vec<usize> = {
        let mut idx: Vec<usize> = (0..dts.len()).collect();
        idx.sort_by(|&i, &j| dts[j].total_cmp(&dts[i])); // coarsest first
        idx
    };
    let monotone = ordered
        .windows(2)
        .all(|w| errors[w[0]] >= errors[w[1]]);
    if !monotone {
        warnings.push("errors are not monotone under refinement".to_string());
    }

    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    EocResult {
        dts: dts.to_vec(),
        errors: errors.to_vec(),
        slope: sxy / sxx,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovered() {
        let dts = [0.1, 0.05, 0.025];
        let errors: Vec<f64> = dts.iter().map(|&d: &f64| 3.7 * d.powi(3)).collect();
        let r = estimate_order(&dts, &errors);
        assert!((r.slope - 3.0).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn roundoff_errors_give_nan_with_warning() {
        let r = estimate_order(&[0.1, 0.05, 0.025], &[1e-16, 3e-16, 2e-16]);
        assert!(r.slope.is_nan());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn non_monotone_warns_but_reports() {
        let r = estimate_order(&[0.1, 0.05, 0.025], &[1e-3, 2e-3, 0.5e-3]);
        assert!(!r.slope.is_nan());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn point_order_does_not_matter() {
        let dts = [0.025, 0.1, 0.05];
        let errors: Vec<f64> = dts.iter().map(|d| 2.0 * d * d).collect();
        let r = estimate_order(&dts, &errors);
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }
}
