//! Total function tables over finite product domains.
//!
//! A tuple `(x_0, .., x_{k-1})` over alphabet sizes `(m_0, .., m_{k-1})` is
//! encoded in mixed radix with `x_0` most significant. An empty tuple encodes
//! to 0 and its domain has exactly one element.

use crate::error::{Error, Result};

/// Largest number of entries a single table may hold.
pub const MAX_TABLE_LEN: u64 = 1 << 26;

/// Product of `sizes`, or `None` on overflow.
pub fn product(sizes: &[usize]) -> Option<u64> {
    sizes
        .iter()
        .try_fold(1u64, |acc, &m| acc.checked_mul(m as u64))
}

/// Mixed-radix code of `values`. Components must be in range.
pub fn encode(values: &[u32], sizes: &[usize]) -> u64 {
    debug_assert_eq!(values.len(), sizes.len());
    values
        .iter()
        .zip(sizes)
        .fold(0u64, |acc, (&x, &m)| acc * m as u64 + x as u64)
}

/// Inverse of [`encode`], writing into `out`.
pub fn decode_into(mut code: u64, sizes: &[usize], out: &mut [u32]) {
    debug_assert_eq!(out.len(), sizes.len());
    for (slot, &m) in out.iter_mut().zip(sizes).rev() {
        *slot = (code % m as u64) as u32;
        code /= m as u64;
    }
}

pub fn decode(code: u64, sizes: &[usize]) -> Vec<u32> {
    let mut out = vec![0; sizes.len()];
    decode_into(code, sizes, &mut out);
    out
}

/// Calls `f` on every tuple of the product domain in increasing code order.
pub fn for_each_tuple(sizes: &[usize], mut f: impl FnMut(&[u32])) {
    if sizes.contains(&0) {
        return;
    }
    let mut cur = vec![0u32; sizes.len()];
    loop {
        f(&cur);
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as usize) < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// A total function from a product domain to a product codomain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    domain: Vec<usize>,
    codomain: Vec<usize>,
    entries: Vec<u64>,
}

fn checked_len(sizes: &[usize], what: &str) -> Result<u64> {
    if sizes.contains(&0) {
        return Err(Error::InvalidCode(format!("{what} has an empty alphabet")));
    }
    product(sizes).ok_or_else(|| Error::Overflow(format!("{what} {sizes:?} is too large")))
}

fn checked_domain_len(sizes: &[usize]) -> Result<u64> {
    match checked_len(sizes, "domain")? {
        n if n <= MAX_TABLE_LEN => Ok(n),
        _ => Err(Error::Overflow(format!("domain {sizes:?} is too large"))),
    }
}

impl Table {
    /// Builds a table from its entries, listed in domain code order.
    pub fn new(domain: Vec<usize>, codomain: Vec<usize>, entries: Vec<u64>) -> Result<Self> {
        let len = checked_domain_len(&domain)?;
        let out = checked_len(&codomain, "codomain")?;
        if entries.len() as u64 != len {
            return Err(Error::InvalidCode(format!(
                "table over {domain:?} needs {len} entries, found {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&v| v >= out) {
            return Err(Error::InvalidCode(format!(
                "entry {pos} = {} is outside codomain {codomain:?}",
                entries[pos]
            )));
        }
        Ok(Self {
            domain,
            codomain,
            entries,
        })
    }

    /// Tabulates `f`, which returns an output tuple for each input tuple.
    pub fn from_fn(
        domain: Vec<usize>,
        codomain: Vec<usize>,
        mut f: impl FnMut(&[u32]) -> Vec<u32>,
    ) -> Result<Self> {
        let len = checked_domain_len(&domain)?;
        checked_len(&codomain, "codomain")?;
        let mut entries = Vec::with_capacity(len as usize);
        let mut bad = None;
        for_each_tuple(&domain, |x| {
            let y = f(x);
            if bad.is_none()
                && (y.len() != codomain.len()
                    || y.iter().zip(&codomain).any(|(&v, &m)| v as usize >= m))
            {
                bad = Some((x.to_vec(), y.clone()));
            }
            entries.push(encode_lenient(&y, &codomain));
        });
        if let Some((x, y)) = bad {
            return Err(Error::InvalidCode(format!(
                "output {y:?} at input {x:?} is outside codomain {codomain:?}"
            )));
        }
        Ok(Self {
            domain,
            codomain,
            entries,
        })
    }

    /// Table whose every entry is `value`.
    pub fn constant(domain: Vec<usize>, codomain: Vec<usize>, value: &[u32]) -> Result<Self> {
        Self::from_fn(domain, codomain, |_| value.to_vec())
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn codomain(&self) -> &[usize] {
        &self.codomain
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Output code at the given input tuple.
    pub fn code_at(&self, input: &[u32]) -> u64 {
        self.entries[encode(input, &self.domain) as usize]
    }

    /// Output tuple at the given input tuple.
    pub fn apply(&self, input: &[u32]) -> Vec<u32> {
        decode(self.code_at(input), &self.codomain)
    }

    /// Single-output convenience: the first output component.
    pub fn apply1(&self, input: &[u32]) -> u32 {
        debug_assert_eq!(self.codomain.len(), 1);
        self.code_at(input) as u32
    }

    /// True when the output never depends on input component `k`.
    pub fn ignores(&self, k: usize) -> bool {
        let m = self.domain[k] as u64;
        if m <= 1 {
            return true;
        }
        let stride: u64 = self.domain[k + 1..].iter().map(|&s| s as u64).product();
        self.entries.iter().enumerate().all(|(i, &v)| {
            let i = i as u64;
            let digit = (i / stride) % m;
            let base = i - digit * stride;
            v == self.entries[base as usize]
        })
    }
}

fn encode_lenient(values: &[u32], sizes: &[usize]) -> u64 {
    values
        .iter()
        .zip(sizes)
        .fold(0u64, |acc, (&x, &m)| acc * m as u64 + (x as u64).min(m as u64 - 1))
}
