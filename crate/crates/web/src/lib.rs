//! Browser bindings. Each export returns a flat `Float64Array` whose row
//! layout is given in its doc comment; `www/index.html` plots them.

use chansplit::exponents::{massey_curves, mec_capacity};
use chansplit::gf2::{basic_kernel, BitMatrix, GOLAY_DUAL_P};
use chansplit::split::{chain_rates, spectral_chain, ChainModel};
use chansplit::{Channel, InputDist, LabelMap, Result};
use wasm_bindgen::prelude::*;

fn js(e: chansplit::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn steps(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

/// Rows of `[rate, qec, split_bec]` on `points` rates from 0 to C(QEC).
pub fn exponent_rows(eps: f64, points: usize) -> Result<Vec<f64>> {
    let rates = steps(0.0, mec_capacity(4, eps)?, points);
    let (qec, split) = massey_curves(eps, &rates)?;
    Ok(rates.iter().zip(&qec.ordinate).zip(&split.ordinate).flat_map(|((r, a), b)| [*r, *a, *b]).collect())
}

/// Rows of `[eps, r0_base, r0_stage1, r0_stage2, normalized]` for two
/// copies of a BEC (`bsc = false`) or BSC combined by the 2x2 kernel.
pub fn split_rows(bsc: bool, points: usize) -> Result<Vec<f64>> {
    let hi = if bsc { 0.5 } else { 1.0 };
    let mut out = Vec::new();
    for eps in steps(0.0, hi, points) {
        let v = if bsc { Channel::bsc(eps)? } else { Channel::bec(eps)? };
        let base = v.e0(1.0, &InputDist::uniform(2))?;
        let r = chain_rates(&ChainModel::uniform(v, LabelMap::linear(basic_kernel())?)?)?;
        out.extend([eps, base, r.per_subchannel[0], r.per_subchannel[1], r.normalized]);
    }
    Ok(out)
}

/// Per-subchannel cutoff rates on a BSC, followed by the normalized sum.
/// `k` in 1..=4 selects the Kronecker power of the 2x2 kernel; `k = 0`
/// selects the bundled dual-Golay map.
pub fn allocation_rows(k: usize, eps: f64) -> Result<Vec<f64>> {
    let f = match k {
        0 => BitMatrix::from_generator(&GOLAY_DUAL_P.parse()?),
        1..=4 => basic_kernel().kron_power(k)?,
        _ => return Err(chansplit::Error::Range(format!("k = {k} outside 0..=4"))),
    };
    let r = spectral_chain(eps, &f)?;
    let mut out = r.per_subchannel;
    out.push(r.normalized);
    Ok(out)
}

#[wasm_bindgen]
pub fn exponents(eps: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    exponent_rows(eps, points).map_err(js)
}

#[wasm_bindgen]
pub fn split(bsc: bool, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    split_rows(bsc, points).map_err(js)
}

#[wasm_bindgen]
pub fn allocation(k: usize, eps: f64) -> std::result::Result<Vec<f64>, JsError> {
    allocation_rows(k, eps).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_rows_start_at_cutoff_rates() {
        let rows = exponent_rows(0.25, 11).unwrap();
        assert_eq!(rows.len(), 33);
        assert!((rows[1] - 1.192645).abs() < 1e-6);
        assert!((rows[2] - 1.356144).abs() < 1e-6);
        assert!((rows[30] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn split_rows_layout() {
        let rows = split_rows(false, 5).unwrap();
        assert_eq!(rows.len(), 25);
        let at = &rows[5..10];
        assert_eq!(at[0], 0.25);
        assert!((at[2] - 0.476439).abs() < 1e-6);
        assert!((at[3] - 0.912537).abs() < 1e-6);
        assert!(split_rows(true, 3).unwrap().chunks(5).all(|r| r[4] >= r[1] - 1e-12));
    }

    #[test]
    fn allocations() {
        let a = allocation_rows(1, 0.1).unwrap();
        assert_eq!(a.len(), 3);
        assert!((a[2] - 0.366985).abs() < 1e-6);
        assert_eq!(allocation_rows(4, 0.1).unwrap().len(), 17);
        assert!(allocation_rows(5, 0.1).is_err());
    }
}
