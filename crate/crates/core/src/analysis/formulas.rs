//! Closed-form thresholds and constants. All logarithms are natural.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Base radius scale `(ln n / n^{h-1})^{1/(2h)}`, without constants.
pub fn threshold_radius(n: f64, h: usize) -> Result<f64> {
    if n.is_nan() || n < 2.0 {
        return Err(Error::Domain(format!(
            "threshold radius needs n >= 2, got {n}"
        )));
    }
    if h < 2 {
        return Err(Error::Domain(format!(
            "threshold radius needs h >= 2, got {h}"
        )));
    }
    let hf = h as f64;
    // log-space keeps n^{h-1} from overflowing
    let ln = (n.ln().ln() - (hf - 1.0) * n.ln()) / (2.0 * hf);
    Ok(ln.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    GeneralTheorem,
    TwoLayerSpecial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdConstants {
    pub h: usize,
    /// Above `b_lower · base` the graph is rainbow connected w.h.p.
    pub b_lower: f64,
    /// Below `c_upper · base` it is not.
    pub c_upper: f64,
    pub source: ConstantsSource,
}

/// Constants for `h >= 2`; the sharper two-layer values for `h = 2`.
pub fn theorem_constants(h: usize) -> Result<ThresholdConstants> {
    if h == 2 {
        return Ok(ThresholdConstants {
            h,
            b_lower: 0.68,
            c_upper: 0.56,
            source: ConstantsSource::TwoLayerSpecial,
        });
    }
    theorem_constants_general(h)
}

/// `b = (2^{2+3(h-1)} / π³)^{1/(2h)}`, `c = (2/(3π)) (1/(2π))^{h-1}`,
/// evaluated for any `h >= 2` (including the weaker `h = 2` values).
pub fn theorem_constants_general(h: usize) -> Result<ThresholdConstants> {
    if h < 2 {
        return Err(Error::Domain(format!(
            "threshold constants need h >= 2, got {h}"
        )));
    }
    let hf = h as f64;
    let b_lower = (((2.0 + 3.0 * (hf - 1.0)) * 2f64.ln() - 3.0 * PI.ln()) / (2.0 * hf)).exp();
    let c_upper = 2.0 / (3.0 * PI) * (1.0 / (2.0 * PI)).powf(hf - 1.0);
    Ok(ThresholdConstants {
        h,
        b_lower,
        c_upper,
        source: ConstantsSource::GeneralTheorem,
    })
}

/// A layer count that may be undefined for the given `(n, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum LayerCount {
    Defined {
        value: i64,
        quotient: f64,
    },
    Undefined {
        numerator: f64,
        denominator: f64,
        quotient: f64,
        reason: String,
    },
}

impl LayerCount {
    pub fn value(&self) -> Option<i64> {
        match self {
            LayerCount::Defined { value, .. } => Some(*value),
            LayerCount::Undefined { .. } => None,
        }
    }

    fn evaluate(numerator: f64, denominator: f64, round: fn(f64) -> f64) -> Self {
        let quotient = numerator / denominator;
        if denominator <= 0.0 {
            return LayerCount::Undefined {
                numerator,
                denominator,
                quotient,
                reason: format!("denominator {denominator} is not positive"),
            };
        }
        let value = round(quotient);
        if value <= 0.0 {
            return LayerCount::Undefined {
                numerator,
                denominator,
                quotient,
                reason: format!("layer count {value} is not positive"),
            };
        }
        LayerCount::Defined {
            value: value as i64,
            quotient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerBounds {
    /// Below `h0` layers the graph is w.h.p. not rainbow connected.
    pub h0: LayerCount,
    /// From `h1` layers on it is w.h.p. rainbow connected.
    pub h1: LayerCount,
}

/// Literal evaluation of the two layer-count expressions:
///
/// ```text
/// h0 = ⌊(ln n + ln ln n) / (2 ln r + ln n − ln 4 + ln 3π)⌋
/// h1 = ⌈(ln n + ln ln n − ln 2π³) / (2 ln r − ln n − ln 8)⌉
/// ```
///
/// For `r < 1` the `h1` denominator is always negative, so `h1` comes
/// back undefined; it is reported as such rather than reinterpreted.
pub fn corollary_layer_bounds(n: f64, r: f64) -> Result<LayerBounds> {
    if n.is_nan() || n < 3.0 {
        return Err(Error::Domain(format!("layer bounds need n >= 3, got {n}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!(
            "layer bounds need 0 < r < 1, got {r}"
        )));
    }
    let (ln_n, ln_r) = (n.ln(), r.ln());
    let lnln = ln_n.ln();
    let h0 = LayerCount::evaluate(
        ln_n + lnln,
        2.0 * ln_r + ln_n - 4f64.ln() + (3.0 * PI).ln(),
        f64::floor,
    );
    let h1 = LayerCount::evaluate(
        ln_n + lnln - (2.0 * PI.powi(3)).ln(),
        2.0 * ln_r - ln_n - 8f64.ln(),
        f64::ceil,
    );
    Ok(LayerBounds { h0, h1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceValues {
    /// Connectivity radius of a single layer, `sqrt((ln n − ln ln n)/(π n))`.
    pub r_c: f64,
    /// Single-layer graph diameter estimate `sqrt 2 / r`.
    pub diameter_estimate: f64,
}

pub fn reference_formulas(n: f64, r: f64) -> Result<ReferenceValues> {
    if n.is_nan() || n < 3.0 {
        return Err(Error::Domain(format!(
            "reference formulas need n >= 3, got {n}"
        )));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!(
            "reference formulas need r > 0, got {r}"
        )));
    }
    Ok(ReferenceValues {
        r_c: ((n.ln() - n.ln().ln()) / (PI * n)).sqrt(),
        diameter_estimate: std::f64::consts::SQRT_2 / r,
    })
}
