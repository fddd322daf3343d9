//! Channel combining: `n` independent copies of a base channel `V` whose
//! inputs are relabeled by a bijection `f` on `X^n`.
//!
//! Tuples `(u_1, ..., u_n)` are flattened to indices most-significant-first,
//! so `u_1` selects the outermost block. The same convention is used for
//! output tuples and matches the row order of [`BitMatrix::kron`].

use serde_json::json;

use crate::dmc::Channel;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest number of cells (`|X|^n * |Y|^n`) [`synthesize`] will materialize.
pub const SYNTH_CELL_BUDGET: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub enum LabelMap {
    /// `x = u F` over GF(2); binary inputs only.
    Linear(BitMatrix),
    /// Explicit permutation of `X^n`: `perm[u] = x` on flattened indices.
    Table { alphabet: usize, copies: usize, perm: Vec<usize> },
}

impl LabelMap {
    pub fn linear(f: BitMatrix) -> Result<Self> {
        if !f.is_square() {
            return Err(Error::Dimension(format!("label map must be square, got {}x{}", f.rows(), f.cols())));
        }
        f.invert()?;
        Ok(LabelMap::Linear(f))
    }

    pub fn table(alphabet: usize, copies: usize, perm: Vec<usize>) -> Result<Self> {
        let size = checked_pow(alphabet, copies).ok_or_else(|| Error::Budget("table map too large".into()))?;
        if perm.len() != size {
            return Err(Error::Dimension(format!("table has {} entries, expected {size}", perm.len())));
        }
        let mut seen = vec![false; size];
        for (u, &x) in perm.iter().enumerate() {
            if x >= size {
                return Err(Error::NotBijective(format!("image {x} of {u} out of range")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotBijective(format!("image {x} appears twice")));
            }
        }
        Ok(LabelMap::Table { alphabet, copies, perm })
    }

    /// Identity on `n` binary inputs.
    pub fn identity(n: usize) -> Self {
        LabelMap::Linear(BitMatrix::identity(n))
    }

    pub fn copies(&self) -> usize {
        match self {
            LabelMap::Linear(f) => f.rows(),
            LabelMap::Table { copies, .. } => *copies,
        }
    }

    /// Required input alphabet size, if the map fixes one.
    pub fn alphabet(&self) -> usize {
        match self {
            LabelMap::Linear(_) => 2,
            LabelMap::Table { alphabet, .. } => *alphabet,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabelMap::Linear(_) => "linear",
            LabelMap::Table { .. } => "table",
        }
    }

    /// `x = f(u)` on tuples.
    pub fn apply(&self, u: &[usize]) -> Result<Vec<usize>> {
        let q = self.alphabet();
        if u.len() != self.copies() {
            return Err(Error::Dimension(format!("tuple of length {} for a map on {} copies", u.len(), self.copies())));
        }
        if let Some(bad) = u.iter().find(|&&s| s >= q) {
            return Err(Error::Range(format!("symbol {bad} outside alphabet of size {q}")));
        }
        match self {
            LabelMap::Linear(f) => {
                let bits: Vec<u8> = u.iter().map(|&b| b as u8).collect();
                Ok(f.mul_vec(&bits)?.into_iter().map(usize::from).collect())
            }
            LabelMap::Table { perm, copies, .. } => Ok(unflatten(perm[flatten(u, q)], q, *copies)),
        }
    }

    /// `f` on flattened indices.
    pub fn apply_index(&self, u: usize) -> usize {
        match self {
            LabelMap::Linear(f) => {
                let n = f.rows();
                if n <= 64 {
                    reverse_bits(f.mul_mask(reverse_bits(u as u64, n)), n) as usize
                } else {
                    let x = self.apply(&unflatten(u, 2, n)).expect("index in range");
                    flatten(&x, 2)
                }
            }
            LabelMap::Table { perm, .. } => perm[u],
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match self {
            LabelMap::Linear(f) => Ok(LabelMap::Linear(f.invert()?)),
            LabelMap::Table { alphabet, copies, perm } => {
                let mut inv = vec![0; perm.len()];
                for (u, &x) in perm.iter().enumerate() {
                    inv[x] = u;
                }
                Ok(LabelMap::Table { alphabet: *alphabet, copies: *copies, perm: inv })
            }
        }
    }
}

/// Reverses the low `n` bits, converting between "bit `i` is `u_i`" and the
/// most-significant-first index.
fn reverse_bits(v: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - n)
    }
}

pub fn flatten(t: &[usize], q: usize) -> usize {
    t.iter().fold(0, |acc, &s| acc * q + s)
}

pub fn unflatten(mut idx: usize, q: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = idx % q;
        idx /= q;
    }
    t
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Writes the row `prod_i V(y_i | x_i)` over all `y` tuples into `out`.
pub(crate) fn product_row(v: &Channel, x: &[usize], out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    let mut next = Vec::new();
    for &xi in x {
        next.clear();
        let row = v.row(xi);
        for &a in out.iter() {
            for &b in row {
                next.push(a * b);
            }
        }
        std::mem::swap(out, &mut next);
    }
}

pub(crate) fn check_compat(v: &Channel, map: &LabelMap) -> Result<()> {
    if v.num_inputs() != map.alphabet() {
        return Err(Error::Dimension(format!(
            "{} map needs {} inputs, base channel has {}",
            map.kind(),
            map.alphabet(),
            v.num_inputs()
        )));
    }
    Ok(())
}

/// The combined channel `W(z | u) = prod_i V(y_i | x_i)` with `x = f(u)`.
#[derive(Clone, Debug)]
pub struct SynthChannel {
    pub base: Channel,
    pub map: LabelMap,
    pub combined: Channel,
    pub copies: usize,
}

pub fn synthesize(v: &Channel, map: &LabelMap) -> Result<SynthChannel> {
    check_compat(v, map)?;
    let n = map.copies();
    let q = v.num_inputs();
    let inputs = checked_pow(q, n);
    let outputs = checked_pow(v.num_outputs(), n);
    let cells = inputs.zip(outputs).and_then(|(a, b)| a.checked_mul(b));
    let (inputs, outputs) = match (inputs, outputs, cells) {
        (Some(a), Some(b), Some(c)) if c <= SYNTH_CELL_BUDGET => (a, b),
        _ => {
            return Err(Error::Budget(format!(
                "combined channel of {n} copies exceeds {SYNTH_CELL_BUDGET} cells; use the spectral path"
            )))
        }
    };
    let mut prob = Vec::with_capacity(inputs * outputs);
    let mut row = Vec::with_capacity(outputs);
    for u in 0..inputs {
        let x = unflatten(map.apply_index(u), q, n);
        product_row(v, &x, &mut row);
        prob.extend_from_slice(&row);
    }
    let combined = Channel::new(inputs, outputs, prob).map_err(|e| Error::InvalidChannel(format!("synthesis: {e}")))?;
    Ok(SynthChannel { base: v.clone(), map: map.clone(), combined, copies: n })
}

/// `f(u)` for a tuple; linear maps delegate to [`BitMatrix::mul_vec`].
pub fn apply_map(map: &LabelMap, u: &[usize]) -> Result<Vec<usize>> {
    map.apply(u)
}

impl SynthChannel {
    /// Serializes to the channel JSON format with an extra `meta` object.
    pub fn to_json(&self) -> String {
        let mut file = self.combined.to_file();
        file.meta = Some(json!({
            "base": self.base.to_file(),
            "map": self.map.kind(),
            "n": self.copies,
        }));
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }
}
