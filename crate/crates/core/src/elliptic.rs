//! Jacobi elliptic functions and the complete elliptic integral of the first
//! kind. The modulus `k` is used throughout (not the parameter `m = k²`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::{Jet, LEN};

const MAX_AGM: usize = 64;

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Invalid(format!(
            "elliptic modulus {k} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    a
}

fn complement(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).sqrt()
}

/// Complete elliptic integral of the first kind `K(k)`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    if k == 1.0 {
        return Err(Error::Domain("K(k) diverges at k = 1".into()));
    }
    Ok(PI / (2.0 * agm(1.0, complement(k))))
}

/// `(sn, cn, dn)` at real argument `u`.
pub fn sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    check_modulus(k)?;
    if !u.is_finite() {
        return Err(Error::Domain(format!("non-finite elliptic argument {u}")));
    }
    Ok(sncndn_unchecked(u, k))
}

fn sncndn_unchecked(u: f64, k: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    if k == 1.0 {
        let s = 1.0 / u.cosh();
        return (u.tanh(), s, s);
    }
    // reduce into [-2K, 2K]
    let kk = PI / (2.0 * agm(1.0, complement(k)));
    let period = 4.0 * kk;
    let u = u - period * (u / period).round();

    // descending AGM (Abramowitz & Stegun 16.4)
    let mut a = [0.0; MAX_AGM + 1];
    let mut c = [0.0; MAX_AGM + 1];
    a[0] = 1.0;
    let mut b = complement(k);
    c[0] = k;
    let mut n = 0;
    while c[n].abs() > 1e-16 && n < MAX_AGM {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    let mut prev = phi;
    for j in (1..=n).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = if n == 0 { 1.0 } else { cn / (prev - phi).cos() };
    (sn, cn, dn)
}

/// `cn(u; k)`.
pub fn jacobi_cn(u: f64, k: f64) -> Result<f64> {
    sn_cn_dn(u, k).map(|(_, c, _)| c)
}

/// `sn(u; k)`.
pub fn jacobi_sn(u: f64, k: f64) -> Result<f64> {
    sn_cn_dn(u, k).map(|(s, _, _)| s)
}

/// Taylor expansions of `(sn, cn, dn)` composed with `u`, from the system
/// `sn' = cn dn`, `cn' = -sn dn`, `dn' = -k² sn cn`.
pub fn sn_cn_dn_jet(u: Jet, k: f64) -> (Jet, Jet, Jet) {
    let (s0, c0, d0) = sncndn_unchecked(u.value(), k);
    let mut s = [0.0; LEN];
    let mut c = [0.0; LEN];
    let mut d = [0.0; LEN];
    s[0] = s0;
    c[0] = c0;
    d[0] = d0;
    let conv =
        |x: &[f64; LEN], y: &[f64; LEN], n: usize| (0..=n).map(|i| x[i] * y[n - i]).sum::<f64>();
    for n in 0..LEN - 1 {
        let m = (n + 1) as f64;
        s[n + 1] = conv(&c, &d, n) / m;
        c[n + 1] = -conv(&s, &d, n) / m;
        d[n + 1] = -k * k * conv(&s, &c, n) / m;
    }
    (
        u.compose(&Jet::from_coeffs(s)),
        u.compose(&Jet::from_coeffs(c)),
        u.compose(&Jet::from_coeffs(d)),
    )
}

/// Half-period of `cn⁴` and `cn²` in the argument, `2K(k)`.
pub fn cn_power_period(k: f64) -> Result<f64> {
    elliptic_k(k).map(|kk| 2.0 * kk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn degenerate_moduli() {
        let u = PI / 3.0;
        assert!((jacobi_cn(u, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((jacobi_cn(0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(jacobi_cn(40.0, 1.0).unwrap() < 1e-15);
        assert_eq!(jacobi_cn(0.0, 0.37).unwrap(), 1.0);
    }

    #[test]
    fn k_values() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let k = elliptic_k(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((k - 1.854_074_677_301_371_9).abs() < 1e-14);
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(1.2).is_err());
    }

    #[test]
    fn cn_vanishes_at_quarter_period() {
        for &k in &[0.1, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.99] {
            let kk = elliptic_k(k).unwrap();
            assert!(jacobi_cn(kk, k).unwrap().abs() < 1e-13, "k={k}");
            assert!((jacobi_sn(kk, k).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn jet_matches_ode() {
        let k = 0.6;
        let (s, c, d) = sn_cn_dn_jet(Jet::var(0.8), k);
        assert!((s.d1() - c.value() * d.value()).abs() < 1e-14);
        assert!((c.d1() + s.value() * d.value()).abs() < 1e-14);
        assert!((d.d1() + k * k * s.value() * c.value()).abs() < 1e-14);
        // third derivative against finite differences of the value
        let h = 1e-3;
        let f = |u: f64| jacobi_cn(u, k).unwrap();
        let fd3 = (f(0.8 + 2.0 * h) - 2.0 * f(0.8 + h) + 2.0 * f(0.8 - h) - f(0.8 - 2.0 * h))
            / (2.0 * h * h * h);
        assert!((c.d(3) - fd3).abs() < 1e-5);
    }
}
