//! Channel splitting by successive cancellation.
//!
//! The combined channel's `n` inputs are treated as independent users with
//! product-form input law `Q_1 x ... x Q_n`. Stage `i` decodes `U_i` from the
//! output `Z` knowing `U_1 ... U_{i-1}`; later inputs are marginalized out.
//! Its conditional cutoff rate is
//!
//! ```text
//! R0(U_i, Z | V) = -log2 sum_v P(v) sum_z [ sum_u P(u|v) sqrt(P(z|u,v)) ]^2,   V = (U_1..U_{i-1})
//! ```
//!
//! and the stage rates add up to the sum cutoff rate of the chain.
//!
//! Two evaluation routes are provided. [`chain_rates`] builds the
//! conditional tables explicitly and works for any base channel and label
//! map within a size budget. [`spectral_chain`] handles the binary symmetric
//! channel with a linear map and uniform inputs at much larger `n`.

use crate::combine::{check_compat, checked_pow, product_row, unflatten, LabelMap};
use crate::csv::fmt_sig;
use crate::dmc::{check_prob, Channel, InputDist};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::numeric::{fwht, pairwise_sum, pairwise_sum_by, par_map, par_pairwise_sum_by};

/// Output-alphabet budget of the explicit path: `|Y|^n <= 2^16`.
pub const BRUTE_OUTPUT_BITS: f64 = 16.0;
/// Memory cap for the explicit conditional tables.
pub const BRUTE_MEMORY_CAP: usize = 2 << 30;
/// Largest `n` accepted by [`spectral_chain`].
pub const SPECTRAL_MAX_N: usize = 26;

/// Base channel, label map, and per-position input distributions.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub base: Channel,
    pub map: LabelMap,
    pub dists: Vec<InputDist>,
}

impl ChainModel {
    pub fn new(base: Channel, map: LabelMap, dists: Vec<InputDist>) -> Result<Self> {
        check_compat(&base, &map)?;
        if dists.len() != map.copies() {
            return Err(Error::Dimension(format!("{} distributions for {} positions", dists.len(), map.copies())));
        }
        if let Some((i, d)) = dists.iter().enumerate().find(|(_, d)| d.len() != base.num_inputs()) {
            return Err(Error::Dimension(format!(
                "distribution {i} has {} weights, alphabet has {}",
                d.len(),
                base.num_inputs()
            )));
        }
        Ok(Self { base, map, dists })
    }

    /// Uniform, independent inputs on every position.
    pub fn uniform(base: Channel, map: LabelMap) -> Result<Self> {
        let dists = vec![InputDist::uniform(base.num_inputs()); map.copies()];
        Self::new(base, map, dists)
    }

    pub fn copies(&self) -> usize {
        self.map.copies()
    }
}

/// Conditional cutoff rate of every stage plus the sum and its per-copy
/// normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct RateAllocation {
    pub per_subchannel: Vec<f64>,
    pub sum: f64,
    pub normalized: f64,
}

impl RateAllocation {
    pub fn from_rates(per_subchannel: Vec<f64>) -> Self {
        let sum = pairwise_sum(&per_subchannel);
        let normalized = sum / per_subchannel.len() as f64;
        Self { per_subchannel, sum, normalized }
    }

    pub fn len(&self) -> usize {
        self.per_subchannel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_subchannel.is_empty()
    }

    /// `index,rate` rows (1-based index) followed by `# sum=` and
    /// `# normalized=` trailer lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,rate\n");
        for (i, r) in self.per_subchannel.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, fmt_sig(*r)));
        }
        out.push_str(&format!("# sum={}\n# normalized={}\n", fmt_sig(self.sum), fmt_sig(self.normalized)));
        out
    }
}

/// Explicit tables `T_m[v, z] = P(z | u_1..u_m = v)` for `m = 0..=n`, with the
/// trailing inputs marginalized under the chain's product law.
struct ConditionalTables {
    q: usize,
    outputs: usize,
    levels: Vec<Vec<f64>>,
}

impl ConditionalTables {
    fn build(chain: &ChainModel) -> Result<Self> {
        let n = chain.copies();
        let q = chain.base.num_inputs();
        let ny = chain.base.num_outputs();
        if n as f64 * (ny as f64).log2() > BRUTE_OUTPUT_BITS + 1e-9 {
            return Err(Error::Budget(format!(
                "{n} copies of a {ny}-output channel exceed the explicit budget of 2^{BRUTE_OUTPUT_BITS} outputs; \
                 use spectral_chain"
            )));
        }
        let outputs = checked_pow(ny, n).expect("bounded by budget");
        let inputs = checked_pow(q, n).ok_or_else(|| Error::Budget("input alphabet overflow".into()))?;
        let cells: usize = (0..=n).map(|m| q.pow(m as u32)).sum::<usize>().saturating_mul(outputs);
        if cells.saturating_mul(std::mem::size_of::<f64>()) > BRUTE_MEMORY_CAP {
            return Err(Error::Budget(format!("conditional tables need {cells} cells, over the 2 GiB cap")));
        }

        let rows: Vec<Vec<f64>> = par_map(inputs, |u| {
            let x = unflatten(chain.map.apply_index(u), q, n);
            let mut row = Vec::with_capacity(outputs);
            product_row(&chain.base, &x, &mut row);
            row
        });
        let mut levels = vec![Vec::new(); n + 1];
        levels[n] = rows.concat();
        for m in (0..n).rev() {
            let upper = &levels[m + 1];
            let w = chain.dists[m].weights();
            let prefixes = q.pow(m as u32);
            let mut lower = vec![0.0; prefixes * outputs];
            for v in 0..prefixes {
                let dst = &mut lower[v * outputs..(v + 1) * outputs];
                for (a, &qa) in w.iter().enumerate() {
                    if qa == 0.0 {
                        continue;
                    }
                    let src = &upper[(v * q + a) * outputs..(v * q + a + 1) * outputs];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += qa * s;
                    }
                }
            }
            levels[m] = lower;
        }
        Ok(Self { q, outputs, levels })
    }

    fn table_row(&self, m: usize, v: usize) -> &[f64] {
        &self.levels[m][v * self.outputs..(v + 1) * self.outputs]
    }

    /// Probability of the prefix `v` of length `m`.
    fn prefix_prob(&self, dists: &[InputDist], m: usize, v: usize) -> f64 {
        let digits = unflatten(v, self.q, m);
        digits.iter().zip(dists).map(|(&d, q)| q.weights()[d]).product()
    }

    fn stage_cutoff(&self, dists: &[InputDist], i: usize) -> f64 {
        let w = dists[i].weights();
        let prefixes = self.q.pow(i as u32);
        let per_prefix = par_map(prefixes, |v| {
            let pv = self.prefix_prob(dists, i, v);
            if pv == 0.0 {
                return 0.0;
            }
            let rows: Vec<&[f64]> = (0..self.q).map(|a| self.table_row(i + 1, v * self.q + a)).collect();
            let inner = pairwise_sum_by(self.outputs, &|z| {
                let mut s = 0.0;
                for (a, &qa) in w.iter().enumerate() {
                    s += qa * safe_sqrt(rows[a][z]);
                }
                s * s
            });
            pv * inner
        });
        -pairwise_sum(&per_prefix).log2()
    }

    fn stage_mutual_info(&self, dists: &[InputDist], i: usize) -> f64 {
        let w = dists[i].weights();
        let prefixes = self.q.pow(i as u32);
        let per_prefix = par_map(prefixes, |v| {
            let pv = self.prefix_prob(dists, i, v);
            if pv == 0.0 {
                return 0.0;
            }
            let marginal = self.table_row(i, v);
            let terms: Vec<f64> = w
                .iter()
                .enumerate()
                .map(|(a, &qa)| {
                    if qa == 0.0 {
                        return 0.0;
                    }
                    let cond = self.table_row(i + 1, v * self.q + a);
                    qa * pairwise_sum_by(self.outputs, &|z| {
                        let p = cond[z];
                        if p > 0.0 {
                            p * (p / marginal[z]).log2()
                        } else {
                            0.0
                        }
                    })
                })
                .collect();
            pv * pairwise_sum(&terms)
        });
        pairwise_sum(&per_prefix).max(0.0)
    }
}

fn safe_sqrt(p: f64) -> f64 {
    if p < 1e-300 {
        0.0
    } else {
        p.sqrt()
    }
}

/// `R0(U_{i+1}, Z | U_1 .. U_i)` for the 0-based stage `i`, by explicit
/// enumeration.
pub fn conditional_cutoff(i: usize, chain: &ChainModel) -> Result<f64> {
    if i >= chain.copies() {
        return Err(Error::Range(format!("stage {i} of {}", chain.copies())));
    }
    let t = ConditionalTables::build(chain)?;
    Ok(t.stage_cutoff(&chain.dists, i))
}

/// Stage rates for the whole chain, by explicit enumeration.
pub fn chain_rates(chain: &ChainModel) -> Result<RateAllocation> {
    let t = ConditionalTables::build(chain)?;
    let rates = (0..chain.copies()).map(|i| t.stage_cutoff(&chain.dists, i)).collect();
    Ok(RateAllocation::from_rates(rates))
}

/// `I(U_i; Z | U_1 .. U_{i-1})` for every stage, from the same tables.
pub fn chain_mutual_info(chain: &ChainModel) -> Result<Vec<f64>> {
    let t = ConditionalTables::build(chain)?;
    Ok((0..chain.copies()).map(|i| t.stage_mutual_info(&chain.dists, i)).collect())
}

/// Stage rates for `n` copies of a BSC(`eps`) under the linear map `F`
/// with uniform inputs, via Walsh–Hadamard transforms.
///
/// For a linear map, uniform inputs and a BSC, the inner sum over `z` does
/// not depend on the already-decoded prefix, so the prefix is fixed to zero.
/// Given `u_i = a`, the channel input is uniform on the coset
/// `a F_i + S_i`, with `S_i` spanned by the later rows of `F`, and the output
/// law depends on `z` only through its coset of `S_i`. Cosets are labelled
/// by syndromes against a basis of the dual `S_i^perp` (dimension `i + 1`),
/// and the noise's syndrome law has transform `(1 - 2 eps)^{wt(w)}` at the
/// dual vector `w`. One inverse transform of length `2^{i+1}` gives the law
/// `pi`, and the stage rate is `1 - log2(1 + sum_s sqrt(pi(s) pi(s + t)))`,
/// where `t` is the syndrome of `F_i`.
pub fn spectral_chain(eps: f64, f: &BitMatrix) -> Result<RateAllocation> {
    check_prob(eps, 0.0, 0.5, "BSC crossover")?;
    if !f.is_square() {
        return Err(Error::Dimension("label map must be square".into()));
    }
    let n = f.rows();
    if n > SPECTRAL_MAX_N {
        return Err(Error::Budget(format!("n = {n} exceeds the spectral limit {SPECTRAL_MAX_N}")));
    }
    f.invert()?;
    let decay = 1.0 - 2.0 * eps;
    let powers: Vec<f64> = (0..=n as i32).map(|k| decay.powi(k)).collect();
    let rates = (0..n).map(|i| spectral_stage(f, i, &powers)).collect::<Result<Vec<_>>>()?;
    Ok(RateAllocation::from_rates(rates))
}

fn spectral_stage(f: &BitMatrix, i: usize, powers: &[f64]) -> Result<f64> {
    let n = f.rows();
    let later = if i + 1 < n { f.select_rows(&((i + 1)..n).collect::<Vec<_>>())? } else { BitMatrix::zeros(1, n) };
    let dual = later.row_space_dual().ok_or(Error::Singular { rank: n, n })?;
    let d = dual.rows();
    debug_assert_eq!(d, i + 1);
    let dual_rows: Vec<u32> = (0..d).map(|j| dual.row_mask(j) as u32).collect();

    let size = 1usize << d;
    let mut masks = vec![0u32; size];
    let mut spectrum = vec![0.0f64; size];
    spectrum[0] = 1.0;
    for w in 1..size {
        let low = w.trailing_zeros() as usize;
        masks[w] = masks[w & (w - 1)] ^ dual_rows[low];
        spectrum[w] = powers[masks[w].count_ones() as usize];
    }
    drop(masks);
    fwht(&mut spectrum);
    let scale = 1.0 / size as f64;
    let fi = f.row_mask(i) as u32;
    let shift =
        dual_rows.iter().enumerate().fold(0usize, |acc, (j, &h)| acc | ((((h & fi).count_ones() & 1) as usize) << j));
    let z = par_pairwise_sum_by(size, &|s| {
        let a = spectrum[s] * scale;
        let b = spectrum[s ^ shift] * scale;
        safe_sqrt(a) * safe_sqrt(b)
    });
    Ok(1.0 - (1.0 + z).log2())
}

/// `gamma(d) = sqrt(4 d (1 - d))`, the Bhattacharyya parameter of a BSC.
pub fn gamma(delta: f64) -> f64 {
    (4.0 * delta * (1.0 - delta)).max(0.0).sqrt()
}

/// Cutoff rate `1 - log2(1 + gamma(p))` of a BSC with crossover `p`.
pub fn bsc_cutoff_rate(p: f64) -> f64 {
    1.0 - (1.0 + gamma(p)).log2()
}

/// Effective crossover of each syndrome subchannel of a block-code map:
/// row `i` of `H` with weight `w_i` gives a cascade of `w_i` BSCs, i.e.
/// odd parity of `w_i` independent `eps`-bits, `(1 - (1 - 2 eps)^{w_i}) / 2`.
pub fn syndrome_structure(f: &BitMatrix, k: usize, eps: f64) -> Result<Vec<f64>> {
    check_prob(eps, 0.0, 0.5, "BSC crossover")?;
    let ht = f.parity_columns(k)?;
    let h = ht.transpose();
    Ok((0..h.rows()).map(|r| 0.5 * (1.0 - (1.0 - 2.0 * eps).powi(h.row_weight(r) as i32))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{basic_kernel, GOLAY_DUAL_P};

    fn bec_closed(eps: f64) -> (f64, f64) {
        (1.0 - (1.0 + 2.0 * eps - eps * eps).log2(), 1.0 - (1.0 + eps * eps).log2())
    }

    fn bsc_closed(eps: f64) -> (f64, f64) {
        let e2 = 2.0 * eps * (1.0 - eps);
        (bsc_cutoff_rate(e2), 1.0 - (1.0 + gamma(eps).powi(2)).log2())
    }

    fn kernel_chain(v: Channel) -> ChainModel {
        ChainModel::uniform(v, LabelMap::linear(basic_kernel()).unwrap()).unwrap()
    }

    #[test]
    fn bec_stage_examples() {
        let c = kernel_chain(Channel::bec(0.25).unwrap());
        let (a, b) = bec_closed(0.25);
        assert!((conditional_cutoff(0, &c).unwrap() - a).abs() < 1e-12);
        assert!((conditional_cutoff(1, &c).unwrap() - b).abs() < 1e-12);
        assert!((a - 0.476438).abs() < 1e-6 && (b - 0.912537).abs() < 1e-6);
        assert!(conditional_cutoff(2, &c).is_err());
    }

    #[test]
    fn identity_map_stages_equal_base() {
        let v = Channel::bec(0.4).unwrap();
        let base = v.e0(1.0, &InputDist::uniform(2)).unwrap();
        let c = ChainModel::uniform(v, LabelMap::identity(3)).unwrap();
        let r = chain_rates(&c).unwrap();
        for x in &r.per_subchannel {
            assert!((x - base).abs() < 1e-12);
        }
        assert!((r.normalized - base).abs() < 1e-12);
    }

    #[test]
    fn bsc_kernel_allocation() {
        let r = chain_rates(&kernel_chain(Channel::bsc(0.1).unwrap())).unwrap();
        let (a, b) = bsc_closed(0.1);
        assert!((r.per_subchannel[0] - a).abs() < 1e-12);
        assert!((r.per_subchannel[1] - b).abs() < 1e-12);
        assert!((r.per_subchannel[0] - 0.177576).abs() < 1e-6);
        assert!((r.per_subchannel[1] - 0.556393).abs() < 1e-6);
        assert!((r.normalized - 0.366985).abs() < 1e-6);
        assert_eq!(r.sum, r.per_subchannel[0] + r.per_subchannel[1]);
        assert_eq!(r.normalized, r.sum / 2.0);
    }

    #[test]
    fn bsc_second_kronecker_power() {
        // Independent brute-force enumeration gives 0.400599440853 here.
        let f = basic_kernel().kron_power(2).unwrap();
        let c = ChainModel::uniform(Channel::bsc(0.1).unwrap(), LabelMap::linear(f).unwrap()).unwrap();
        let r = chain_rates(&c).unwrap();
        assert!((r.normalized - 0.400_599_440_852_5).abs() < 1e-9, "{}", r.normalized);
    }

    #[test]
    fn spectral_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let r = spectral_chain(0.1, &BitMatrix::identity(5)).unwrap();
        for x in r.per_subchannel {
            assert!((x - bsc_cutoff_rate(0.1)).abs() < 1e-12);
        }
        for k in 1..=3 {
            for eps in [0.05, 0.1, 0.3] {
                let f = basic_kernel().kron_power(k).unwrap();
                let s = spectral_chain(eps, &f).unwrap();
                let c = ChainModel::uniform(Channel::bsc(eps).unwrap(), LabelMap::linear(f).unwrap()).unwrap();
                let b = chain_rates(&c).unwrap();
                for (x, y) in s.per_subchannel.iter().zip(&b.per_subchannel) {
                    assert!((x - y).abs() < 1e-9, "k={k} eps={eps}: {x} vs {y}");
                }
            }
        }
        let _ = bsc;
        assert!(spectral_chain(0.6, &BitMatrix::identity(2)).is_err());
        assert!(spectral_chain(0.1, &BitMatrix::from_rows(&[[1, 1], [1, 1]]).unwrap()).is_err());
        assert!(matches!(spectral_chain(0.1, &BitMatrix::identity(27)), Err(Error::Budget(_))));
    }

    #[test]
    fn golay_first_stage_is_cascade() {
        let p: BitMatrix = GOLAY_DUAL_P.parse().unwrap();
        let f = BitMatrix::from_generator(&p);
        let cross = syndrome_structure(&f, 11, 0.1).unwrap();
        assert_eq!(cross.len(), 12);
        let s = spectral_chain(0.1, &f).unwrap();
        assert!((s.per_subchannel[0] - bsc_cutoff_rate(cross[0])).abs() < 1e-12);
        // The last stage sees u_23 repeated over the support of the last row.
        let w = f.row_weight(22) as i32;
        assert_eq!(w, 12);
        assert!((s.per_subchannel[22] - (1.0 - (1.0 + gamma(0.1).powi(w)).log2())).abs() < 1e-9);
    }

    #[test]
    fn syndrome_structure_examples() {
        let f = BitMatrix::from_generator(&BitMatrix::from_rows(&[[1]]).unwrap());
        let eps: f64 = 0.1;
        let p = syndrome_structure(&f, 1, eps).unwrap();
        assert!((p[0] - 2.0 * eps * (1.0 - eps)).abs() < 1e-15);
        let id = syndrome_structure(&BitMatrix::identity(4), 2, eps).unwrap();
        assert!(id.iter().all(|&x| (x - eps).abs() < 1e-15));
        let p: BitMatrix = GOLAY_DUAL_P.parse().unwrap();
        let g = BitMatrix::from_generator(&p);
        assert!(syndrome_structure(&g, 11, 0.0).unwrap().iter().all(|&x| x == 0.0));
        assert!(syndrome_structure(&g, 23, 0.1).is_err());
    }

    #[test]
    fn mutual_info_examples() {
        let v = Channel::bsc(0.1).unwrap();
        let c = ChainModel::uniform(v.clone(), LabelMap::identity(2)).unwrap();
        let i = v.mutual_info(&InputDist::uniform(2)).unwrap();
        for x in chain_mutual_info(&c).unwrap() {
            assert!((x - i).abs() < 1e-12);
        }
        let mi = chain_mutual_info(&kernel_chain(v.clone())).unwrap();
        assert!((mi.iter().sum::<f64>() - 1.062_008_812_821_437_6).abs() < 1e-10);
        let point = ChainModel::new(
            v,
            LabelMap::linear(basic_kernel()).unwrap(),
            vec![InputDist::point(2, 1), InputDist::uniform(2)],
        )
        .unwrap();
        assert!(chain_mutual_info(&point).unwrap()[0].abs() < 1e-15);
    }

    #[test]
    fn budgets_and_shapes() {
        let bec = Channel::bec(0.1).unwrap();
        assert!(matches!(
            chain_rates(&ChainModel::uniform(bec.clone(), LabelMap::identity(11)).unwrap()),
            Err(Error::Budget(_))
        ));
        assert!(ChainModel::new(bec.clone(), LabelMap::identity(2), vec![InputDist::uniform(2)]).is_err());
        assert!(ChainModel::new(bec, LabelMap::identity(1), vec![InputDist::uniform(3)]).is_err());
    }

    #[test]
    fn allocation_csv() {
        let r = RateAllocation::from_rates(vec![0.25, 0.75]);
        assert_eq!(r.to_csv(), "index,rate\n1,0.25\n2,0.75\n# sum=1\n# normalized=0.5\n");
    }
}
