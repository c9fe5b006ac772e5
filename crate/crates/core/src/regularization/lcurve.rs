use crate::error::{Error, Result};

/// Corner of a discrete L-curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LCurveCorner {
    /// Zero-based index into the input points.
    pub index: usize,
    /// Set when every interior point lies on the chord (no corner exists).
    pub flat: bool,
}

/// Triangle-method corner of `(residual_norm, solution_norm)` points.
///
/// Points are mapped to `(log ρ, log η)`; the corner is the interior point
/// farthest from the chord joining the first and last points.
pub fn lcurve_corner(points: &[(f64, f64)]) -> Result<LCurveCorner> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "L-curve needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(r, s)) = points
        .iter()
        .find(|&&(r, s)| !(r > 0.0 && s > 0.0) || !r.is_finite() || !s.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "L-curve norms must be positive and finite, got ({r}, {s})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(r, s)| (r.ln(), s.ln())).collect();
    let (x0, y0) = logs[0];
    let (x1, y1) = logs[logs.len() - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let chord = dx.hypot(dy);

    let distance = |&(x, y): &(f64, f64)| -> f64 {
        if chord > 0.0 {
            ((x - x0) * dy - (y - y0) * dx).abs() / chord
        } else {
            (x - x0).hypot(y - y0)
        }
    };
    let mut best = 1;
    let mut best_dist = f64::NEG_INFINITY;
    let mut scale = chord;
    for (i, p) in logs.iter().enumerate().take(logs.len() - 1).skip(1) {
        let d = distance(p);
        scale = scale.max((p.0 - x0).abs()).max((p.1 - y0).abs());
        if d > best_dist {
            best_dist = d;
            best = i;
        }
    }
    let flat = best_dist <= 1e-12 * scale.max(f64::MIN_POSITIVE);
    Ok(LCurveCorner {
        index: if flat { 1 } else { best },
        flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_l_picks_the_elbow() {
        let c = lcurve_corner(&[(10.0, 1.0), (1.0, 1.0), (1.0, 10.0)]).unwrap();
        assert_eq!(c, LCurveCorner { index: 1, flat: false });
    }

    #[test]
    fn collinear_points_are_flagged() {
        let pts: Vec<(f64, f64)> = (0..6).map(|k| (10f64.powi(-k), 10f64.powi(k))).collect();
        let c = lcurve_corner(&pts).unwrap();
        assert!(c.flat);
        assert_eq!(c.index, 1);
    }

    #[test]
    fn rejects_short_or_nonpositive_input() {
        assert!(lcurve_corner(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(lcurve_corner(&[(1.0, 1.0), (0.0, 2.0), (3.0, 1.0)]).is_err());
        assert!(lcurve_corner(&[(1.0, 1.0), (-1.0, 2.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn longer_l_curve() {
        // Residual falls quickly while the norm barely moves, then the norm blows up.
        let mut pts = Vec::new();
        for k in 0..8 {
            pts.push((10f64.powf(1.0 - 0.5 * k as f64), 1.0 + 0.01 * k as f64));
        }
        for k in 1..8 {
            pts.push((10f64.powf(-2.5 - 0.01 * k as f64), 1.07 * 10f64.powf(0.5 * k as f64)));
        }
        let c = lcurve_corner(&pts).unwrap();
        assert!(!c.flat);
        assert_eq!(c.index, 7);
    }
}
