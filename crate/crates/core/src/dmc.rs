//! Discrete memoryless channels and their `E0`, cutoff-rate, mutual
//! information and capacity functionals. Logarithms are base 2 throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_max, pairwise_sum, xlog2x};

const ROW_TOL: f64 = 1e-12;

/// A transition matrix `W(y|x)`, stored row-major by input.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    prob: Vec<f64>,
}

/// On-disk channel description: `{"inputs": n, "outputs": m, "rows": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl Channel {
    /// Validates and wraps a row-major transition matrix.
    pub fn new(inputs: usize, outputs: usize, prob: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidChannel("alphabets must be non-empty".into()));
        }
        if prob.len() != inputs * outputs {
            return Err(Error::InvalidChannel(format!("{} entries for a {inputs}x{outputs} matrix", prob.len())));
        }
        for x in 0..inputs {
            let row = &prob[x * outputs..(x + 1) * outputs];
            if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {x} has invalid entry {bad}")));
            }
            let s = pairwise_sum(row);
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidChannel(format!("row {x} sums to {s}, not 1")));
            }
        }
        Ok(Self { inputs, outputs, prob })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if let Some((x, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != outputs) {
            return Err(Error::InvalidChannel(format!("row {x} has {} entries, expected {outputs}", r.len())));
        }
        Self::new(inputs, outputs, rows.concat())
    }

    /// Binary symmetric channel with crossover probability `eps` in `[0, 1/2]`.
    pub fn bsc(eps: f64) -> Result<Self> {
        check_prob(eps, 0.0, 0.5, "BSC crossover")?;
        Self::new(2, 2, vec![1.0 - eps, eps, eps, 1.0 - eps])
    }

    /// Binary erasure channel; outputs are ordered `(0, 1, ?)`.
    pub fn bec(eps: f64) -> Result<Self> {
        Self::mec(2, eps)
    }

    /// M-ary erasure channel with `M + 1` outputs, the erasure symbol last.
    pub fn mec(m: usize, eps: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Range(format!("M = {m}, need M >= 2")));
        }
        check_prob(eps, 0.0, 1.0, "erasure probability")?;
        let mut prob = vec![0.0; m * (m + 1)];
        for x in 0..m {
            prob[x * (m + 1) + x] = 1.0 - eps;
            prob[x * (m + 1) + m] = eps;
        }
        Self::new(m, m + 1, prob)
    }

    /// Identity channel on `m` symbols.
    pub fn noiseless(m: usize) -> Self {
        let mut prob = vec![0.0; m * m];
        for x in 0..m {
            prob[x * m + x] = 1.0;
        }
        Self { inputs: m, outputs: m, prob }
    }

    #[inline]
    pub fn num_inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn num_outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn p(&self, y: usize, x: usize) -> f64 {
        self.prob[x * self.outputs + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.prob[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.prob.chunks_exact(self.outputs)
    }

    /// `W1 (x) W2` with inputs `(x1, x2)` and outputs `(y1, y2)` in
    /// lexicographic order.
    pub fn product(&self, other: &Channel) -> Channel {
        let inputs = self.inputs * other.inputs;
        let outputs = self.outputs * other.outputs;
        let mut prob = Vec::with_capacity(inputs * outputs);
        for r1 in self.rows() {
            for r2 in other.rows() {
                for &a in r1 {
                    for &b in r2 {
                        prob.push(a * b);
                    }
                }
            }
        }
        Channel { inputs, outputs, prob }
    }

    /// `E0(rho, Q, W) = -log2 sum_y [sum_x Q(x) W(y|x)^{1/(1+rho)}]^{1+rho}`.
    pub fn e0(&self, rho: f64, q: &InputDist) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(Error::Range(format!("rho = {rho} must be >= 0")));
        }
        self.check_dist(q)?;
        Ok(-self.gallager_sum(rho, q.weights()).log2())
    }

    /// The inner sum of `E0`; zero-probability transitions contribute zero.
    fn gallager_sum(&self, rho: f64, q: &[f64]) -> f64 {
        let s = 1.0 / (1.0 + rho);
        let terms: Vec<f64> = (0..self.outputs)
            .map(|y| {
                let mut inner = 0.0;
                for (x, &qx) in q.iter().enumerate() {
                    let w = self.p(y, x);
                    if qx > 0.0 && w > 0.0 {
                        inner += qx * w.powf(s);
                    }
                }
                inner.powf(1.0 + rho)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// `max_Q E0(rho, Q, W)` together with a maximizing distribution.
    ///
    /// Multiplicative fixed-point iteration from the uniform distribution:
    /// `Q'(x) ~ Q(x) beta(x)^{-1/rho}`, with
    /// `beta(x) = sum_y W(y|x)^{1/(1+rho)} alpha(y)^rho`, backtracking toward
    /// `Q` whenever the step does not decrease the inner sum. Stops when
    /// successive values differ by less than `1e-12`, or after `10^4`
    /// iterations; in the latter case channels with at most four inputs are
    /// finished by a refining grid search over the simplex.
    pub fn max_e0(&self, rho: f64) -> Result<(InputDist, f64)> {
        if !(rho >= 0.0) {
            return Err(Error::Range(format!("rho = {rho} must be >= 0")));
        }
        let n = self.inputs;
        let mut q = vec![1.0 / n as f64; n];
        if rho < 1e-12 {
            return Ok((InputDist::uniform(n), 0.0));
        }
        let s = 1.0 / (1.0 + rho);
        let ws: Vec<f64> = self.prob.iter().map(|&w| if w > 0.0 { w.powf(s) } else { 0.0 }).collect();
        let mut f = self.gallager_sum(rho, &q);
        let mut converged = false;
        for _ in 0..10_000 {
            let alpha: Vec<f64> =
                (0..self.outputs).map(|y| (0..n).map(|x| q[x] * ws[x * self.outputs + y]).sum::<f64>()).collect();
            let beta: Vec<f64> = (0..n)
                .map(|x| {
                    let row = &ws[x * self.outputs..(x + 1) * self.outputs];
                    row.iter().zip(&alpha).map(|(w, a)| if *w > 0.0 { w * a.powf(rho) } else { 0.0 }).sum()
                })
                .collect();
            let bmin = beta.iter().zip(&q).filter(|(_, &qx)| qx > 0.0).map(|(b, _)| *b).fold(f64::INFINITY, f64::min);
            let mut step: Vec<f64> = q
                .iter()
                .zip(&beta)
                .map(|(&qx, &b)| {
                    if qx > 0.0 && b > 0.0 {
                        qx * (bmin / b).powf(1.0 / rho)
                    } else if qx > 0.0 {
                        qx
                    } else {
                        0.0
                    }
                })
                .collect();
            normalize(&mut step);
            let mut t = 1.0;
            let mut accepted = None;
            while t > 1e-6 {
                let cand: Vec<f64> = q.iter().zip(&step).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                let fc = self.gallager_sum(rho, &cand);
                if fc <= f {
                    accepted = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, fc)) = accepted else {
                converged = true;
                break;
            };
            let done = (f - fc).abs() < 1e-12 * f.max(1e-300) || (f.log2() - fc.log2()).abs() < 1e-12;
            q = cand;
            f = fc;
            if done {
                converged = true;
                break;
            }
        }
        if !converged && n <= 4 {
            let (gq, gf) = self.grid_refine(rho, &q);
            if gf < f {
                q = gq;
                f = gf;
            }
        }
        let dist = InputDist::new(q)?;
        Ok((dist, -f.log2()))
    }

    fn grid_refine(&self, rho: f64, start: &[f64]) -> (Vec<f64>, f64) {
        let n = self.inputs;
        let mut best = start.to_vec();
        let mut best_f = self.gallager_sum(rho, &best);
        let mut radius = 0.25;
        const STEPS: i64 = 10;
        while radius > 1e-12 {
            let h = radius / STEPS as f64;
            let mut offs = vec![-STEPS; n - 1];
            let center = best.clone();
            loop {
                let mut cand: Vec<f64> = Vec::with_capacity(n);
                let mut acc = 0.0;
                for i in 0..n - 1 {
                    let v = center[i] + offs[i] as f64 * h;
                    cand.push(v);
                    acc += v;
                }
                cand.push(1.0 - acc);
                if cand.iter().all(|&v| v >= 0.0) {
                    let fc = self.gallager_sum(rho, &cand);
                    if fc < best_f {
                        best_f = fc;
                        best = cand;
                    }
                }
                let mut i = 0;
                while i < n - 1 {
                    offs[i] += 1;
                    if offs[i] <= STEPS {
                        break;
                    }
                    offs[i] = -STEPS;
                    i += 1;
                }
                if i == n - 1 {
                    break;
                }
            }
            radius *= 0.5;
        }
        (best, best_f)
    }

    /// `R0(W) = max_Q E0(1, Q, W)`.
    pub fn cutoff_rate(&self) -> f64 {
        self.max_e0(1.0).map(|(_, v)| v).expect("rho = 1 is valid")
    }

    /// `I(Q, W)` in bits.
    pub fn mutual_info(&self, q: &InputDist) -> Result<f64> {
        self.check_dist(q)?;
        Ok(self.mutual_info_raw(q.weights()))
    }

    fn output_dist(&self, q: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|y| pairwise_sum(&q.iter().enumerate().map(|(x, &qx)| qx * self.p(y, x)).collect::<Vec<_>>()))
            .collect()
    }

    fn mutual_info_raw(&self, q: &[f64]) -> f64 {
        let py = self.output_dist(q);
        let h_y: f64 = -pairwise_sum(&py.iter().map(|&p| xlog2x(p)).collect::<Vec<_>>());
        let h_y_x: f64 = -pairwise_sum(
            &q.iter()
                .enumerate()
                .map(|(x, &qx)| qx * pairwise_sum(&self.row(x).iter().map(|&w| xlog2x(w)).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        );
        (h_y - h_y_x).max(0.0)
    }

    /// Per-input divergences `D(W(.|x) || QW)` in bits.
    fn divergences(&self, q: &[f64]) -> Vec<f64> {
        let py = self.output_dist(q);
        (0..self.inputs)
            .map(|x| {
                pairwise_sum(
                    &self
                        .row(x)
                        .iter()
                        .zip(&py)
                        .map(|(&w, &p)| if w > 0.0 { w * (w / p).log2() } else { 0.0 })
                        .collect::<Vec<_>>(),
                )
            })
            .collect()
    }

    /// Capacity via Blahut–Arimoto, returned with the achieving distribution.
    /// Iterates until the upper bound `max_x D(W_x || QW)` is within `1e-12`
    /// of `I(Q, W)`.
    pub fn capacity_with_dist(&self) -> (InputDist, f64) {
        let n = self.inputs;
        let mut q = vec![1.0 / n as f64; n];
        for _ in 0..100_000 {
            let d = self.divergences(&q);
            let lower = self.mutual_info_raw(&q);
            let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if upper - lower < 1e-12 {
                break;
            }
            let dmax = upper;
            for (qx, dx) in q.iter_mut().zip(&d) {
                *qx *= (dx - dmax).exp2();
            }
            normalize(&mut q);
        }
        let c = self.mutual_info_raw(&q);
        (InputDist { weights: q }, c)
    }

    pub fn capacity(&self) -> f64 {
        self.capacity_with_dist().1
    }

    fn check_dist(&self, q: &InputDist) -> Result<()> {
        if q.len() != self.inputs {
            return Err(Error::Dimension(format!(
                "distribution over {} symbols for a channel with {} inputs",
                q.len(),
                self.inputs
            )));
        }
        Ok(())
    }

    pub fn to_file(&self) -> ChannelFile {
        ChannelFile {
            inputs: self.inputs,
            outputs: self.outputs,
            rows: self.rows().map(<[f64]>::to_vec).collect(),
            meta: None,
        }
    }

    pub fn from_file(f: &ChannelFile) -> Result<Self> {
        if f.rows.len() != f.inputs {
            return Err(Error::InvalidChannel(format!("{} rows, header says {} inputs", f.rows.len(), f.inputs)));
        }
        if let Some((x, r)) = f.rows.iter().enumerate().find(|(_, r)| r.len() != f.outputs) {
            return Err(Error::InvalidChannel(format!("row {x} has {} entries, header says {}", r.len(), f.outputs)));
        }
        Self::new(f.inputs, f.outputs, f.rows.concat())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("channel serializes")
    }
}

/// A probability distribution over an input alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDist {
    weights: Vec<f64>,
}

impl InputDist {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDist("empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDist("negative or non-finite weight".into()));
        }
        let s = pairwise_sum(&weights);
        if (s - 1.0).abs() > ROW_TOL {
            return Err(Error::InvalidDist(format!("weights sum to {s}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Product distribution on pairs `(a, b)`, lexicographic.
    pub fn product(&self, other: &InputDist) -> InputDist {
        let weights = self.weights.iter().flat_map(|a| other.weights.iter().map(move |b| a * b)).collect();
        InputDist { weights }
    }
}

fn normalize(v: &mut [f64]) {
    let s = pairwise_sum(v);
    for x in v.iter_mut() {
        *x /= s;
    }
}

pub(crate) fn check_prob(p: f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    if !(p >= lo && p <= hi) {
        return Err(Error::Range(format!("{what} {p} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `E_r(R, Q, W) = max_{0 <= rho <= 1} [E0(rho, Q, W) - rho R]`, located by
/// golden-section search in `rho`. Returns `(value, argmax rho)`.
pub(crate) fn max_over_rho<F: Fn(f64) -> f64>(e0: F, rate: f64) -> (f64, f64) {
    let (rho, v) = golden_max(|r| e0(r) - r * rate, 0.0, 1.0, 1e-9);
    let v = if v < 0.0 && v > -1e-12 { 0.0 } else { v };
    (v, rho)
}
