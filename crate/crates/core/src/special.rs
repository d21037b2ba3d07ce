//! Bessel functions of the first kind.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest |z| for which [`bessel_j`] is validated.
pub const BESSEL_MAX_ARG: f64 = 30.0;

/// First-kind Bessel function J_n(z) for integer order n ≥ 0 and |z| ≤ 30.
///
/// Miller's backward recurrence J_{k−1} = (2k/z)·J_k − J_{k+1}, started well
/// above max(n, |z|) and normalized with J_0 + 2·Σ J_{2k} = 1.  Absolute
/// error stays below 1e−13 in double precision over the validated range.
pub fn bessel_j<T: Real>(n: u32, z: T) -> Result<T> {
    if !z.is_finite() {
        return Err(Error::NonFinite("bessel argument"));
    }
    let max = T::lit(BESSEL_MAX_ARG);
    if z.abs() > max {
        return Err(Error::OutOfRange {
            value: z.to_f64().unwrap_or(f64::NAN),
            min: -BESSEL_MAX_ARG,
            max: BESSEL_MAX_ARG,
        });
    }
    let x = z.abs();
    if x == T::zero() {
        return Ok(if n == 0 { T::one() } else { T::zero() });
    }
    let odd_reflection = z < T::zero() && n % 2 == 1;
    let value = miller(n as usize, x);
    Ok(if odd_reflection { -value } else { value })
}

/// Miller recurrence for x > 0.
fn miller<T: Real>(n: usize, x: T) -> T {
    let reach = n.max(x.ceil().to_usize().unwrap_or(0));
    let mut start = reach + 16 + (40.0 * reach as f64).sqrt().ceil() as usize;
    start += start % 2;

    let two_over_x = T::lit(2.0) / x;
    let big = T::max_value().sqrt();
    let tiny = T::one() / big;

    let mut above = T::zero(); // J_{k+1}
    let mut current = tiny; // J_k, arbitrary scale
    let mut result = if start == n { current } else { T::zero() };
    let mut even_sum = T::zero(); // Σ J_{2k}, k ≥ 1
    for k in (1..=start).rev() {
        let below = two_over_x * T::count(k) * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order == n {
            result = current;
        }
        if order % 2 == 0 && order > 0 {
            even_sum = even_sum + current;
        }
        if current.abs() > big {
            above = above * tiny;
            current = current * tiny;
            result = result * tiny;
            even_sum = even_sum * tiny;
        }
    }
    let norm = current + T::lit(2.0) * even_sum;
    result / norm
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    /// Reference values computed with 40-digit arbitrary-precision arithmetic.
    const REFERENCE: &[(u32, f64, f64)] = &[
        (0, 0.1, 0.997501562066040032),
        (0, 1.0, 0.76519768655796655145),
        (0, 2.5, -0.048383776468197996327),
        (0, 7.3, 0.28821694763501439904),
        (0, 15.0, -0.014224472826780773234),
        (0, 22.2, -0.14142816590889507898),
        (0, 29.9, -0.097811150066062445526),
        (1, 0.1, 0.049937526036242000321),
        (1, 1.0, 0.44005058574493351596),
        (1, 2.5, 0.49709410246427403801),
        (1, 7.3, 0.082570430493257831051),
        (1, 15.0, 0.20510403861352276115),
        (1, 22.2, 0.089938651889385637575),
        (1, 29.9, -0.10991681070937225935),
        (2, 0.1, 0.001248958658799918984),
        (2, 1.0, 0.11490348493190048047),
        (2, 2.5, 0.44605905843961722674),
        (2, 7.3, -0.26559491188343691053),
        (2, 15.0, 0.04157167797525047472),
        (2, 22.2, 0.14953074716019108262),
        (2, 29.9, 0.090458855035335203749),
        (3, 0.1, 0.000020820315754756264895),
        (3, 1.0, 0.019563353982668405919),
        (3, 2.5, 0.21660039103911352477),
        (3, 7.3, -0.22810188905952463488),
        (3, 15.0, -0.19401825782012263456),
        (3, 22.2, -0.062996174923585441645),
        (3, 29.9, 0.12201832977764452798),
        (5, 0.1, 2.6030817909644415564e-9),
        (5, 1.0, 0.00024975773021123443138),
        (5, 2.5, 0.019501625134503219886),
        (5, 7.3, 0.31370617089730907746),
        (5, 15.0, 0.13045613456502955267),
        (5, 22.2, 0.0029757279387992260039),
        (5, 29.9, -0.13967012147474550433),
        (7, 0.1, 1.5496148676202279786e-13),
        (7, 1.0, 1.5023258174368082122e-6),
        (7, 2.5, 0.00077655318753348495405),
        (7, 7.3, 0.26430025130148603813),
        (7, 15.0, 0.034463655418959164923),
        (7, 22.2, 0.087779492803488260641),
        (7, 29.9, 0.14740035141145583608),
        (10, 0.1, 2.690532895434217073e-20),
        (10, 1.0, 2.630615123687453207e-10),
        (10, 2.5, 2.2247284173983832948e-6),
        (10, 7.3, 0.032111623954048501212),
        (10, 15.0, -0.090071811047659053964),
        (10, 22.2, -0.024397053685440000391),
        (10, 29.9, -0.12246321571885366157),
        (20, 1.0, 3.8735030085246577189e-25),
        (20, 7.3, 3.8026628466865908758e-8),
        (20, 15.0, 0.0073602340792234852583),
        (20, 22.2, 0.24329362091814760477),
        (20, 29.9, -0.0077622941535710424706),
        (40, 15.0, 3.0535352304890070935e-14),
        (40, 22.2, 3.503185287587905224e-8),
        (40, 29.9, 0.00032995554980086546451),
        (81, 0.1, 7.1341850345447467389e-227),
        (81, 22.2, 1.7755880489268963872e-37),
        (81, 29.9, 1.5089038009847921512e-27),
    ];

    /// Ascending power series Σ (−1)^k (z/2)^{2k+n} / (k!(k+n)!), accurate for small z.
    fn series(n: u32, z: f64) -> f64 {
        let half = z / 2.0;
        let mut term = (1..=n).fold(1.0, |t, j| t * half / j as f64);
        let mut sum = term;
        for k in 1..200 {
            term *= -half * half / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_high_precision_reference() {
        for &(n, z, expected) in REFERENCE {
            let got = bessel_j(n, z).unwrap();
            assert!((got - expected).abs() < 1e-13, "J_{n}({z}) = {got}, expected {expected}");
            if expected.abs() > 1e-200 {
                assert!(((got - expected) / expected).abs() < 1e-11, "relative J_{n}({z})");
            }
        }
    }

    #[test]
    fn matches_power_series_for_small_arguments() {
        for n in 0..12 {
            for i in 1..=40 {
                let z = 0.1 * i as f64;
                assert!((bessel_j(n, z).unwrap() - series(n, z)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        for n in 1..10 {
            assert_eq!(bessel_j(n, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn reflection_for_negative_arguments() {
        for n in 0..6 {
            let (p, m) = (bessel_j(n, 3.7).unwrap(), bessel_j(n, -3.7).unwrap());
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(m, sign * p);
        }
    }

    #[test]
    fn three_term_recurrence_holds() {
        for i in 1..=120 {
            let z = 0.25 * i as f64;
            for n in 1..45u32 {
                let lhs = bessel_j(n - 1, z).unwrap() + bessel_j(n + 1, z).unwrap();
                let rhs = 2.0 * n as f64 / z * bessel_j(n, z).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn first_maximum_of_j1() {
        // golden-section search for the maximum of J_1 on [1, 3]
        let (mut a, mut b) = (1.0f64, 3.0f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if bessel_j(1, c).unwrap() > bessel_j(1, d).unwrap() {
                b = d;
            } else {
                a = c;
            }
        }
        let zmax = 0.5 * (a + b);
        assert!((zmax - 1.841_183_781_340_659).abs() < 1e-7);
        assert!((bessel_j(1, zmax).unwrap() - 0.581_865_224_281_596_4).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_arguments() {
        assert!(matches!(bessel_j(1, 30.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(bessel_j(1, -31.0), Err(Error::OutOfRange { .. })));
        assert!(bessel_j(1, f64::NAN).is_err());
        assert!(bessel_j(1, 30.0).is_ok());
    }

    #[test]
    fn single_precision() {
        let j1 = bessel_j(1, 2.5f32).unwrap();
        assert!((j1 - 0.497_094_1).abs() < 1e-6);
        let j7 = bessel_j(7, 7.3f32).unwrap();
        assert!((j7 - 0.264_300_25).abs() < 1e-6);
    }
}
