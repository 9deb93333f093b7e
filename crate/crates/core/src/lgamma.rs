//! Fast `f64` log-gamma for term-magnitude scans and the native tier. Kept
//! separate from `classical`, whose Lanczos implementation serves as an oracle.

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_2k / (2k (2k-1)), k = 1..=7
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// `ln Γ(x)` for `x > 0`, absolute error about `1e-15 · max(1, |ln Γ(x)|)`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut w = x;
    let mut shift = 1.0;
    while w < 16.0 {
        shift *= w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    let out = (w - 0.5) * w.ln() - w + HALF_LN_2PI + series * inv;
    if shift != 1.0 {
        out - shift.ln()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..30 {
            let got = ln_gamma(n as f64);
            assert!((got - fact.ln()).abs() < 1e-13 * fact.ln().max(1.0), "n={n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn half_integer() {
        let sqrt_pi_ln = 0.5 * std::f64::consts::PI.ln();
        assert!((ln_gamma(0.5) - sqrt_pi_ln).abs() < 1e-15);
    }
}
