//! Random-coding exponents, the M-ary erasure channel closed form, and the
//! series comparing a quaternary erasure channel with its split into two
//! binary erasure channels.

use crate::csv::fmt_sig;
use crate::dmc::{check_prob, max_over_rho, Channel, InputDist};
use crate::error::{Error, Result};
use crate::numeric::golden_max;

/// A sampled curve: rate (or erasure probability) against exponent (or rate).
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentCurve {
    pub label: String,
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
}

impl ExponentCurve {
    pub fn new(label: impl Into<String>, abscissa: Vec<f64>, ordinate: Vec<f64>) -> Result<Self> {
        if abscissa.len() != ordinate.len() {
            return Err(Error::Dimension(format!("{} abscissae vs {} ordinates", abscissa.len(), ordinate.len())));
        }
        if abscissa.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Range("abscissa must be strictly increasing".into()));
        }
        Ok(Self { label: label.into(), abscissa, ordinate })
    }

    pub fn from_fn<F: FnMut(f64) -> Result<f64>>(label: &str, grid: &[f64], mut f: F) -> Result<Self> {
        let ys = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(label, grid.to_vec(), ys)
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }
}

/// Renders curves sharing one abscissa as CSV: header `x,<label>...`, one
/// row per abscissa, 12 significant digits, infinities as `inf`.
pub fn curves_to_csv(curves: &[ExponentCurve]) -> Result<String> {
    let first = curves.first().ok_or_else(|| Error::Dimension("no curves".into()))?;
    if curves.iter().any(|c| c.abscissa != first.abscissa) {
        return Err(Error::Dimension("curves do not share an abscissa".into()));
    }
    let mut out = String::from("x");
    for c in curves {
        out.push(',');
        out.push_str(&c.label);
    }
    out.push('\n');
    for (i, &x) in first.abscissa.iter().enumerate() {
        out.push_str(&fmt_sig(x));
        for c in curves {
            out.push(',');
            out.push_str(&fmt_sig(c.ordinate[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Complexity and reliability exponents of ML decoding at block length `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffFigures {
    pub block_length: usize,
    pub rate: f64,
    /// `log2` of the number of codewords, `N R`.
    pub complexity_exponent: f64,
    /// `N E_r`; the error probability behaves like `2^{-N E_r}`.
    pub error_exponent_bound: f64,
}

pub fn ml_tradeoff(block_length: usize, rate: f64, exponent: f64) -> Result<TradeoffFigures> {
    if block_length == 0 {
        return Err(Error::Range("block length must be >= 1".into()));
    }
    if !(rate >= 0.0) || !(exponent >= 0.0) {
        return Err(Error::Range("rate and exponent must be >= 0".into()));
    }
    let n = block_length as f64;
    Ok(TradeoffFigures { block_length, rate, complexity_exponent: n * rate, error_exponent_bound: n * exponent })
}

/// Binary divergence `D(delta || eps)` in bits, `0 log 0 = 0`; `+inf` when
/// `eps` is 0 or 1 and `delta` puts mass where `eps` has none.
pub fn divergence(delta: f64, eps: f64) -> Result<f64> {
    check_prob(delta, 0.0, 1.0, "delta")?;
    check_prob(eps, 0.0, 1.0, "eps")?;
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).log2()
        }
    };
    Ok(term(delta, eps) + term(1.0 - delta, 1.0 - eps))
}

/// `E_r(R, Q, W)`.
pub fn er_q(rate: f64, q: &InputDist, w: &Channel) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::Range(format!("rate {rate} must be >= 0")));
    }
    // Surface dimension errors before the search.
    w.e0(1.0, q)?;
    let (v, _) = max_over_rho(|rho| w.e0(rho, q).expect("checked"), rate);
    Ok(v)
}

/// `E_r(R, W) = max_Q E_r(R, Q, W)`.
///
/// The maximization over `Q` is done inside, at each `rho`, so the search is
/// over `max_Q E0(rho, Q, W) - rho R`. That function need not be concave in
/// `rho`, so a coarse scan brackets the maximum before golden-section.
pub fn er(rate: f64, w: &Channel) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::Range(format!("rate {rate} must be >= 0")));
    }
    let obj = |rho: f64| w.max_e0(rho).expect("rho in [0,1]").1 - rho * rate;
    const SCAN: usize = 20;
    let vals: Vec<f64> = (0..=SCAN).map(|i| obj(i as f64 / SCAN as f64)).collect();
    let (imax, _) =
        vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = imax.saturating_sub(1) as f64 / SCAN as f64;
    let hi = (imax + 1).min(SCAN) as f64 / SCAN as f64;
    let (_, v) = golden_max(obj, lo, hi, 1e-9);
    let v = v.max(vals[imax]);
    Ok(if v < 0.0 && v > -1e-12 { 0.0 } else { v })
}

fn check_mec(m: usize, eps: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::Range(format!("M = {m}, need M >= 2")));
    }
    check_prob(eps, 0.0, 1.0, "erasure probability")
}

/// Capacity `(1 - eps) log2 M` of the M-ary erasure channel.
pub fn mec_capacity(m: usize, eps: f64) -> Result<f64> {
    check_mec(m, eps)?;
    Ok((1.0 - eps) * (m as f64).log2())
}

/// Cutoff rate `log2 M - log2[1 + (M - 1) eps]` of the M-ary erasure channel.
pub fn mec_cutoff_rate(m: usize, eps: f64) -> Result<f64> {
    check_mec(m, eps)?;
    Ok((m as f64).log2() - (1.0 + (m as f64 - 1.0) * eps).log2())
}

/// Critical rate `C / [1 + (M - 1) eps]`.
pub fn critical_rate(m: usize, eps: f64) -> Result<f64> {
    let c = mec_capacity(m, eps)?;
    Ok(c / (1.0 + (m as f64 - 1.0) * eps))
}

/// Random-coding exponent of the M-ary erasure channel in closed form:
/// `R0 - R` up to the critical rate, `D(1 - R/log2 M || eps)` from there to
/// capacity.
pub fn mec_exponent(rate: f64, m: usize, eps: f64) -> Result<f64> {
    let c = mec_capacity(m, eps)?;
    const SLACK: f64 = 1e-12;
    if !(rate >= -SLACK && rate <= c + SLACK) {
        return Err(Error::Range(format!("rate {rate} outside [0, {c}]")));
    }
    let rate = rate.clamp(0.0, c);
    let rc = critical_rate(m, eps)?;
    if rate <= rc {
        Ok(mec_cutoff_rate(m, eps)? - rate)
    } else {
        let delta = (1.0 - rate / (m as f64).log2()).clamp(0.0, 1.0);
        divergence(delta, eps)
    }
}

/// Exponent curves for the quaternary erasure channel (`qec`) and for the
/// sum of two binary erasure channels each carrying half the rate
/// (`split_bec`, i.e. `2 E_r(R/2, BEC)`).
pub fn massey_curves(eps: f64, rates: &[f64]) -> Result<(ExponentCurve, ExponentCurve)> {
    let qec = ExponentCurve::from_fn("qec", rates, |r| mec_exponent(r, 4, eps))?;
    let split = ExponentCurve::from_fn("split_bec", rates, |r| Ok(2.0 * mec_exponent(r / 2.0, 2, eps)?))?;
    Ok((qec, split))
}

/// Capacity and cutoff rates of the QEC and of its BEC split against `eps`:
/// `C(QEC)`, `R0(QEC)`, `2 R0(BEC)` and the gain `2 R0(BEC) - R0(QEC)`.
pub fn massey_rate_curves(eps_grid: &[f64]) -> Result<Vec<ExponentCurve>> {
    let cap = ExponentCurve::from_fn("capacity_qec", eps_grid, |e| mec_capacity(4, e))?;
    let r0q = ExponentCurve::from_fn("r0_qec", eps_grid, |e| mec_cutoff_rate(4, e))?;
    let r0b = ExponentCurve::from_fn("r0_split_bec", eps_grid, |e| Ok(2.0 * mec_cutoff_rate(2, e)?))?;
    let gap = ExponentCurve::new(
        "gain",
        eps_grid.to_vec(),
        r0b.ordinate.iter().zip(&r0q.ordinate).map(|(a, b)| a - b).collect(),
    )?;
    Ok(vec![cap, r0q, r0b, gap])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_examples() {
        assert_eq!(divergence(0.25, 0.25).unwrap(), 0.0);
        assert!((divergence(0.1, 0.25).unwrap() - 0.104_538_155_761_678_2).abs() < 1e-12);
        assert!((divergence(1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(divergence(0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(divergence(0.0, 0.0).unwrap(), 0.0);
        assert!(divergence(1.2, 0.5).is_err());
    }

    #[test]
    fn er_q_examples() {
        let bec = Channel::bec(0.25).unwrap();
        let u = InputDist::uniform(2);
        let r0 = bec.e0(1.0, &u).unwrap();
        assert!((er_q(0.0, &u, &bec).unwrap() - r0).abs() < 1e-12);
        // Above the critical rate 0.6: divergence branch D(1 - R || eps).
        assert!((er_q(0.7, &u, &bec).unwrap() - 0.009_235_350_264_497_94).abs() < 1e-9);
        let i = bec.mutual_info(&u).unwrap();
        for r in [i, i + 0.01, 0.9999] {
            assert!(er_q(r, &u, &bec).unwrap().abs() < 1e-12);
        }
        assert!(er_q(-1.0, &u, &bec).is_err());
    }

    #[test]
    fn er_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        assert!((er(0.0, &bsc).unwrap() - bsc.cutoff_rate()).abs() < 1e-9);
        let u = InputDist::uniform(2);
        for r in [0.05, 0.2, 0.4] {
            let a = er(r, &bsc).unwrap();
            let b = er_q(r, &u, &bsc).unwrap();
            assert!(a >= b - 1e-12 && (a - b).abs() < 1e-9, "{r}: {a} vs {b}");
        }
        assert!(er(0.6, &bsc).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mec_examples() {
        for (m, eps) in [(2, 0.25), (4, 0.25), (8, 0.6)] {
            assert!((mec_exponent(0.0, m, eps).unwrap() - mec_cutoff_rate(m, eps).unwrap()).abs() < 1e-15);
            let c = mec_capacity(m, eps).unwrap();
            assert!(mec_exponent(c, m, eps).unwrap().abs() < 1e-12);
        }
        assert!((mec_exponent(0.7, 2, 0.25).unwrap() - 0.009_235_350_264_497_94).abs() < 1e-12);
        assert!(mec_exponent(0.9, 2, 0.25).is_err());
        assert!(mec_exponent(0.76, 2, 0.25).is_err());
    }

    #[test]
    fn critical_rate_examples() {
        assert!((critical_rate(2, 0.25).unwrap() - 0.6).abs() < 1e-15);
        assert!((critical_rate(4, 0.25).unwrap() - 1.5 / 1.75).abs() < 1e-15);
        assert!((critical_rate(4, 0.25).unwrap() - 0.857143).abs() < 1e-6);
        assert_eq!(critical_rate(8, 0.0).unwrap(), 3.0);
        // Inline QEC form 2(1 - eps)/(1 + 3 eps).
        for eps in [0.1, 0.3, 0.7] {
            assert!((critical_rate(4, eps).unwrap() - 2.0 * (1.0 - eps) / (1.0 + 3.0 * eps)).abs() < 1e-15);
        }
    }

    #[test]
    fn massey_curve_examples() {
        let (q, s) = massey_curves(0.25, &[0.0, 1.2]).unwrap();
        assert!((q.ordinate[0] - 1.192_645_077_942_395_8).abs() < 1e-12);
        assert!((s.ordinate[0] - 1.356_143_810_225_275_2).abs() < 1e-12);
        assert!((s.ordinate[1] - 2.0 * q.ordinate[1]).abs() < 1e-10);
        let (q0, s0) = massey_curves(0.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(q0.ordinate, vec![2.0, 1.0, 0.0]);
        assert_eq!(s0.ordinate, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn massey_rate_examples() {
        let c = massey_rate_curves(&[0.0, 0.25, 1.0]).unwrap();
        let at = |i: usize| -> Vec<f64> { c.iter().map(|s| s.ordinate[i]).collect() };
        assert_eq!(at(0), vec![2.0, 2.0, 2.0, 0.0]);
        let mid = at(1);
        assert!((mid[0] - 1.5).abs() < 1e-15);
        assert!((mid[1] - 1.192645).abs() < 1e-6);
        assert!((mid[2] - 1.356144).abs() < 1e-6);
        assert_eq!(&at(2)[1..3], &[0.0, 0.0]);
    }

    #[test]
    fn tradeoff_examples() {
        let t = ml_tradeoff(100, 0.5, 0.1).unwrap();
        assert_eq!(t.complexity_exponent, 50.0);
        assert!((t.error_exponent_bound - 10.0).abs() < 1e-12);
        assert_eq!(ml_tradeoff(10, 0.5, 0.0).unwrap().error_exponent_bound, 0.0);
        assert!(ml_tradeoff(0, 0.5, 0.1).is_err());
    }

    #[test]
    fn curve_validation_and_csv() {
        assert!(ExponentCurve::new("a", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(ExponentCurve::new("a", vec![0.0], vec![1.0, 2.0]).is_err());
        let a = ExponentCurve::new("a", vec![0.0, 0.5], vec![1.0, f64::INFINITY]).unwrap();
        let b = ExponentCurve::new("b", vec![0.0, 0.5], vec![0.25, 0.0]).unwrap();
        assert_eq!(curves_to_csv(&[a, b]).unwrap(), "x,a,b\n0,1,0.25\n0.5,inf,0\n");
    }
}
