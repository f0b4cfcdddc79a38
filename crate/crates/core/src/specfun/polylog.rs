//! Bose–Einstein functions `g_s(z) = Σ_{k≥1} z^k / k^s` for half-integer `s`.
//!
//! Near `z = 1` the defining series converges too slowly, so with
//! `μ = −ln z` we use the expansion
//! `g_s(e^{−μ}) = Γ(1−s)·μ^{s−1} + Σ_k ζ(s−k)(−μ)^k / k!`,
//! which needs zeta only at half-integers (and at 0).

use std::f64::consts::{LN_2, PI};

use super::PolylogOrder;
use crate::error::{Error, Result};

/// Number of zeta-coefficient terms in the expansion around `z = 1`.
const ROBINSON_TERMS: usize = 30;

/// Values at `s = 5/2, 3/2, …, −59/2`, computed offline in 40-digit
/// arithmetic and rounded to the nearest double.
const ZETA_HALF_INTEGERS: [f64; 33] = [
    1.341487257250917,
    2.612375348685488,
    -1.4603545088095868,
    -0.20788622497735457,
    -0.025485201889833036,
    0.008516928777850331,
    0.004441011335479432,
    -0.0030916692472158338,
    -0.0026714580198992244,
    0.0027467679395368687,
    0.00326903957260022,
    -0.00441603287300489,
    -0.006672172296466641,
    0.011146122473942813,
    0.02039697871594279,
    -0.04057496748119458,
    -0.08717525590621725,
    0.2011740493842269,
    0.4962712199120576,
    -1.303229250705114,
    -3.629759299774574,
    10.687327069021993,
    33.168325785694606,
    -108.21747505877606,
    -370.3018783754786,
    1326.0458117490157,
    4959.598315043044,
    -19338.94198837462,
    -78486.1485692177,
    331023.6487454503,
    1448811.3705827263,
    -6571686.491569958,
    -30854533.472396765,
];

/// Riemann zeta at the tabulated points: `s = 0` and half-integers from
/// `5/2` down to `−59/2`.
pub fn zeta_const(s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(-0.5);
    }
    let twice = 2.0 * s;
    let untabulated = || Error::domain("s", s, "{0} ∪ {5/2, 3/2, …, −59/2}");
    if twice.fract() != 0.0 || (twice as i64) % 2 == 0 {
        return Err(untabulated());
    }
    let index = (2.5 - s) as usize;
    if s > 2.5 || index >= ZETA_HALF_INTEGERS.len() {
        return Err(untabulated());
    }
    Ok(ZETA_HALF_INTEGERS[index])
}

fn gamma_one_minus(order: PolylogOrder) -> f64 {
    let sqrt_pi = PI.sqrt();
    match order {
        PolylogOrder::Half => sqrt_pi,
        PolylogOrder::ThreeHalves => -2.0 * sqrt_pi,
        PolylogOrder::FiveHalves => 4.0 * sqrt_pi / 3.0,
    }
}

/// `g_s(z)` for `z ∈ [0, 1]`.
pub fn polylog(order: PolylogOrder, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain("z", z, "[0, 1]"));
    }
    if z <= 0.5 {
        return Ok(polylog_direct(order, z));
    }
    polylog_neg_log(order, -(z - 1.0).ln_1p())
}

/// `g_s(e^{−μ})` for `μ ≥ 0`. Callers that already hold `ln z` avoid the
/// cancellation in `1 − z`.
pub fn polylog_neg_log(order: PolylogOrder, mu: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::domain("-ln z", mu, "[0, ∞)"));
    }
    if mu >= LN_2 {
        return Ok(polylog_direct(order, (-mu).exp()));
    }
    polylog_robinson(order, mu)
}

/// Defining series; fine for `z ≤ 1/2`, usable but slow up to `z ≈ 0.9`.
pub fn polylog_direct(order: PolylogOrder, z: f64) -> f64 {
    let s = order.s();
    let mut power = z;
    let mut sum = 0.0;
    for k in 1..100_000u32 {
        let term = power / f64::from(k).powf(s);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        power *= z;
    }
    sum
}

/// Expansion around `z = 1` in powers of `μ = −ln z`.
pub fn polylog_robinson(order: PolylogOrder, mu: f64) -> Result<f64> {
    let s = order.s();
    if mu == 0.0 {
        return match order {
            PolylogOrder::Half => Err(Error::Divergent("g_{1/2}(z) at z = 1")),
            _ => zeta_const(s),
        };
    }
    let mut sum = 0.0;
    let mut factor = 1.0; // (−μ)^k / k!
    for k in 0..ROBINSON_TERMS {
        sum += zeta_const(s - k as f64)? * factor;
        factor *= -mu / (k + 1) as f64;
    }
    Ok(gamma_one_minus(order) * mu.powf(s - 1.0) + sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ORDERS: [PolylogOrder; 3] = [PolylogOrder::Half, PolylogOrder::ThreeHalves, PolylogOrder::FiveHalves];

    #[test]
    fn table_lookup() {
        assert_eq!(zeta_const(1.5).unwrap(), 2.612_375_348_685_488);
        assert_eq!(zeta_const(2.5).unwrap(), 1.341_487_257_250_917);
        assert_eq!(zeta_const(0.0).unwrap(), -0.5);
        assert_eq!(zeta_const(-29.5).unwrap(), -30854533.472396765);
        for bad in [3.5, -30.5, 1.0, 0.25, -2.0] {
            assert!(zeta_const(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn endpoints() {
        assert_eq!(polylog(PolylogOrder::ThreeHalves, 0.0).unwrap(), 0.0);
        assert_eq!(polylog(PolylogOrder::ThreeHalves, 1.0).unwrap(), 2.612_375_348_685_488);
        assert_eq!(polylog(PolylogOrder::FiveHalves, 1.0).unwrap(), 1.341_487_257_250_917);
        assert!(matches!(polylog(PolylogOrder::Half, 1.0), Err(Error::Divergent(_))));
        assert!(polylog(PolylogOrder::Half, 1.5).is_err());
        assert!(polylog(PolylogOrder::Half, -0.1).is_err());
    }

    #[test]
    fn branches_agree_at_switch_point() {
        for order in ORDERS {
            let direct = polylog_direct(order, 0.5);
            let expanded = polylog_robinson(order, LN_2).unwrap();
            assert_relative_eq!(direct, expanded, max_relative = 1e-10);
        }
    }

    #[test]
    fn values_near_one_match_high_precision_reference() {
        // 30-digit references.
        let cases = [
            (PolylogOrder::Half, 0.99, 16.221830753428105),
            (PolylogOrder::ThreeHalves, 0.9, 1.6144385285663396),
            (PolylogOrder::FiveHalves, 0.999, 1.3389476332802495),
        ];
        for (order, z, reference) in cases {
            assert_relative_eq!(polylog(order, z).unwrap(), reference, max_relative = 1e-12);
        }
    }
}
