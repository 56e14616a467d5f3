//! Exact finite distributions and the information measures built on them.
//!
//! Probabilities are exact rationals. A [`JointPmf`] stores integer masses over
//! a common denominator, so every constructed joint sums to exactly one.
//! Entropies and mutual informations are `f64` in bits.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, ToPrimitive, Zero};

use crate::error::{out_of_range, Error, Result};
use crate::table;

pub type Rational = Ratio<u128>;

/// Tolerance for equality assertions between information quantities.
pub const EQ_TOL: f64 = 1e-9;

/// Negative information values above `-NEG_TOL` are rounding noise.
pub const NEG_TOL: f64 = 1e-12;

/// Converts an exact probability to `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A pmf over `[0, support_size)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pmf {
    weights: Vec<Rational>,
}

impl Pmf {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        let mut sum = Rational::zero();
        for w in &weights {
            sum = sum
                .checked_add(w)
                .ok_or_else(|| Error::Overflow("pmf weight sum".into()))?;
        }
        if !sum.is_one() {
            return Err(Error::InvalidPmf(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        Ok(Self {
            weights: vec![Rational::new(1, n as u128); n],
        })
    }

    /// All mass on outcome `i`.
    pub fn point(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::InvalidPmf(format!("outcome {i} outside support {n}")));
        }
        let mut weights = vec![Rational::zero(); n];
        weights[i] = Rational::one();
        Ok(Self { weights })
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.weights.get(i).copied().unwrap_or_else(Rational::zero)
    }

    pub fn is_uniform(&self) -> bool {
        let u = Rational::new(1, self.weights.len() as u128);
        self.weights.iter().all(|w| *w == u)
    }

    /// Integer numerators over the least common denominator.
    pub fn masses(&self) -> (Vec<u128>, u128) {
        let denom = self
            .weights
            .iter()
            .fold(1u128, |acc, w| acc.lcm(w.denom()));
        let masses = self
            .weights
            .iter()
            .map(|w| w.numer() * (denom / w.denom()))
            .collect();
        (masses, denom)
    }
}

/// Calls `f(outcome, mass)` for every positive-mass outcome of the product of
/// `factors`, in increasing mixed-radix order. Returns the common total mass.
pub fn for_each_product_outcome(
    factors: &[&Pmf],
    mut f: impl FnMut(&[u32], u128),
) -> Result<u128> {
    let parts: Vec<(Vec<u128>, u128)> = factors.iter().map(|p| p.masses()).collect();
    let total = parts.iter().try_fold(1u128, |acc, (_, d)| acc.checked_mul(*d));
    let total = total.ok_or_else(|| Error::Overflow("joint probability denominator".into()))?;
    let sizes: Vec<usize> = factors.iter().map(|p| p.support_size()).collect();
    table::product(&sizes)
        .filter(|&n| n <= table::MAX_TABLE_LEN)
        .ok_or_else(|| Error::Overflow(format!("joint alphabet {sizes:?} is too large")))?;
    table::for_each_tuple(&sizes, |x| {
        let mass = x
            .iter()
            .zip(&parts)
            .fold(1u128, |acc, (&xi, (m, _))| acc * m[xi as usize]);
        if mass > 0 {
            f(x, mass);
        }
    });
    Ok(total)
}

/// An exact joint pmf over named finite variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointPmf {
    vars: Vec<String>,
    sizes: Vec<usize>,
    rows: Vec<u32>,
    masses: Vec<u128>,
    total: u128,
}

impl JointPmf {
    /// Builds a joint from unnormalized integer masses. Duplicate outcomes are
    /// merged and zero masses dropped; the result is normalized by the total.
    pub fn from_masses(
        vars: Vec<String>,
        sizes: Vec<usize>,
        outcomes: impl IntoIterator<Item = (Vec<u32>, u128)>,
    ) -> Result<Self> {
        if vars.len() != sizes.len() {
            return Err(Error::InvalidPmf("one alphabet size per variable".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidPmf(format!("variable `{v}` appears twice")));
            }
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        let mut merged: BTreeMap<Vec<u32>, u128> = BTreeMap::new();
        for (x, m) in outcomes {
            if x.len() != vars.len() || x.iter().zip(&sizes).any(|(&v, &s)| v as usize >= s) {
                return Err(Error::InvalidPmf(format!("outcome {x:?} outside {sizes:?}")));
            }
            if m > 0 {
                let slot = merged.entry(x).or_insert(0);
                *slot = slot
                    .checked_add(m)
                    .ok_or_else(|| Error::Overflow("joint mass".into()))?;
            }
        }
        let mut total = 0u128;
        let mut rows = Vec::with_capacity(merged.len() * vars.len());
        let mut masses = Vec::with_capacity(merged.len());
        for (x, m) in merged {
            total = total
                .checked_add(m)
                .ok_or_else(|| Error::Overflow("joint mass".into()))?;
            rows.extend_from_slice(&x);
            masses.push(m);
        }
        if total == 0 {
            return Err(Error::InvalidPmf("no positive mass".into()));
        }
        Ok(Self {
            vars,
            sizes,
            rows,
            masses,
            total,
        })
    }

    /// Builds a joint from exact weights, which must sum to one.
    pub fn from_weights(
        vars: Vec<String>,
        sizes: Vec<usize>,
        outcomes: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let outcomes: Vec<(Vec<u32>, Rational)> = outcomes.into_iter().collect();
        let mut sum = Rational::zero();
        let mut denom = 1u128;
        for (_, w) in &outcomes {
            sum = sum
                .checked_add(w)
                .ok_or_else(|| Error::Overflow("joint weight sum".into()))?;
            denom = denom.lcm(w.denom());
        }
        if !sum.is_one() {
            return Err(Error::InvalidPmf(format!("weights sum to {sum}, not 1")));
        }
        let scaled = outcomes
            .into_iter()
            .map(|(x, w)| (x, w.numer() * (denom / w.denom())));
        Self::from_masses(vars, sizes, scaled)
    }

    /// Product of independent pmfs, one variable per factor.
    pub fn product(factors: &[(&str, &Pmf)]) -> Result<Self> {
        let pmfs: Vec<&Pmf> = factors.iter().map(|(_, p)| *p).collect();
        let mut outcomes = Vec::new();
        for_each_product_outcome(&pmfs, |x, m| outcomes.push((x.to_vec(), m)))?;
        Self::from_masses(
            factors.iter().map(|(v, _)| v.to_string()).collect(),
            pmfs.iter().map(|p| p.support_size()).collect(),
            outcomes,
        )
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of positive-mass outcomes.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Positive-mass outcomes with their exact weights, in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], Rational)> + '_ {
        let k = self.vars.len();
        self.masses.iter().enumerate().map(move |(i, &m)| {
            (
                &self.rows[i * k..(i + 1) * k],
                Rational::new(m, self.total),
            )
        })
    }

    pub fn column(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    fn columns(&self, vars: &[&str]) -> Result<Vec<usize>> {
        let mut cols = Vec::with_capacity(vars.len());
        for v in vars {
            let c = self.column(v)?;
            if !cols.contains(&c) {
                cols.push(c);
            }
        }
        Ok(cols)
    }

    fn row(&self, i: usize) -> &[u32] {
        let k = self.vars.len();
        &self.rows[i * k..(i + 1) * k]
    }

    /// Exact probability of a full outcome.
    pub fn weight(&self, outcome: &[u32]) -> Rational {
        (0..self.len())
            .find(|&i| self.row(i) == outcome)
            .map(|i| Rational::new(self.masses[i], self.total))
            .unwrap_or_else(Rational::zero)
    }

    fn matches(&self, i: usize, cond: &[(usize, u32)]) -> bool {
        let row = self.row(i);
        cond.iter().all(|&(c, v)| row[c] == v)
    }

    fn resolve(&self, cond: &[(&str, u32)]) -> Result<Vec<(usize, u32)>> {
        cond.iter().map(|&(v, x)| Ok((self.column(v)?, x))).collect()
    }

    /// Exact probability that every listed variable takes its listed value.
    pub fn probability(&self, cond: &[(&str, u32)]) -> Result<Rational> {
        let cond = self.resolve(cond)?;
        let mass: u128 = (0..self.len())
            .filter(|&i| self.matches(i, &cond))
            .map(|i| self.masses[i])
            .sum();
        Ok(Rational::new(mass, self.total))
    }

    /// The joint renormalized on the event `cond`.
    pub fn condition(&self, cond: &[(&str, u32)]) -> Result<Self> {
        let cond = self.resolve(cond)?;
        let k = self.vars.len();
        let mut rows = Vec::new();
        let mut masses = Vec::new();
        let mut total = 0u128;
        for i in 0..self.len() {
            if self.matches(i, &cond) {
                rows.extend_from_slice(&self.rows[i * k..(i + 1) * k]);
                masses.push(self.masses[i]);
                total += self.masses[i];
            }
        }
        if total == 0 {
            return Err(Error::NullEvent);
        }
        Ok(Self {
            vars: self.vars.clone(),
            sizes: self.sizes.clone(),
            rows,
            masses,
            total,
        })
    }

    /// Marginal on `vars`, in the listed order.
    pub fn marginal(&self, vars: &[&str]) -> Result<Self> {
        let cols = self.columns(vars)?;
        let outcomes = (0..self.len()).map(|i| {
            let row = self.row(i);
            (cols.iter().map(|&c| row[c]).collect(), self.masses[i])
        });
        Self::from_masses(
            cols.iter().map(|&c| self.vars[c].clone()).collect(),
            cols.iter().map(|&c| self.sizes[c]).collect(),
            outcomes,
        )
    }

    /// Marginal of a single variable as a [`Pmf`] over its full alphabet.
    pub fn pmf_of(&self, var: &str) -> Result<Pmf> {
        let c = self.column(var)?;
        let mut masses = vec![0u128; self.sizes[c]];
        for i in 0..self.len() {
            masses[self.row(i)[c] as usize] += self.masses[i];
        }
        Pmf::new(
            masses
                .into_iter()
                .map(|m| Rational::new(m, self.total))
                .collect(),
        )
    }

    /// Adds a variable computed from each outcome.
    pub fn extend(&self, var: &str, size: usize, f: impl Fn(&[u32]) -> u32) -> Result<Self> {
        if self.vars.iter().any(|v| v == var) {
            return Err(Error::InvalidPmf(format!("variable `{var}` appears twice")));
        }
        let k = self.vars.len();
        let mut rows = Vec::with_capacity(self.len() * (k + 1));
        for i in 0..self.len() {
            let row = self.row(i);
            let y = f(row);
            if y as usize >= size {
                return Err(Error::InvalidPmf(format!(
                    "derived value {y} outside alphabet {size}"
                )));
            }
            rows.extend_from_slice(row);
            rows.push(y);
        }
        let mut vars = self.vars.clone();
        vars.push(var.to_string());
        let mut sizes = self.sizes.clone();
        sizes.push(size);
        Ok(Self {
            vars,
            sizes,
            rows,
            masses: self.masses.clone(),
            total: self.total,
        })
    }

    /// Sorted `(projected outcome code, mass)` groups over the given columns.
    fn grouped(&self, cols: &[usize]) -> Result<Vec<u128>> {
        let sizes: Vec<usize> = cols.iter().map(|&c| self.sizes[c]).collect();
        table::product(&sizes)
            .ok_or_else(|| Error::Overflow(format!("alphabet {sizes:?} is too large")))?;
        let mut keyed: Vec<(u64, u128)> = (0..self.len())
            .map(|i| {
                let row = self.row(i);
                let key = cols
                    .iter()
                    .zip(&sizes)
                    .fold(0u64, |acc, (&c, &m)| acc * m as u64 + row[c] as u64);
                (key, self.masses[i])
            })
            .collect();
        keyed.sort_unstable_by_key(|&(k, _)| k);
        let mut groups: Vec<u128> = Vec::new();
        let mut last = None;
        for (k, m) in keyed {
            if last == Some(k) {
                *groups.last_mut().expect("group exists") += m;
            } else {
                groups.push(m);
                last = Some(k);
            }
        }
        Ok(groups)
    }

    fn entropy_cols(&self, cols: &[usize]) -> Result<f64> {
        let total = self.total as f64;
        let h = self
            .grouped(cols)?
            .into_iter()
            .map(|m| {
                let q = m as f64 / total;
                -q * q.log2()
            })
            .sum::<f64>();
        Ok(h.max(0.0))
    }
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for s in sets {
        for v in *s {
            if !out.contains(v) {
                out.push(v);
            }
        }
    }
    out
}

fn clamp(x: f64) -> f64 {
    if x < 0.0 && x > -EQ_TOL {
        0.0
    } else {
        x
    }
}

/// `H(vars)` in bits.
pub fn entropy(p: &JointPmf, vars: &[&str]) -> Result<f64> {
    let cols = p.columns(vars)?;
    p.entropy_cols(&cols)
}

/// `I(A; B) = H(A) + H(B) - H(A, B)`.
pub fn mutual_information(p: &JointPmf, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = union(&[a, b]);
    Ok(clamp(entropy(p, a)? + entropy(p, b)? - entropy(p, &ab)?))
}

/// `I(A; B | C) = H(A, C) + H(B, C) - H(A, B, C) - H(C)`.
pub fn conditional_mutual_information(
    p: &JointPmf,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    let ac = union(&[a, c]);
    let bc = union(&[b, c]);
    let abc = union(&[a, b, c]);
    Ok(clamp(
        entropy(p, &ac)? + entropy(p, &bc)? - entropy(p, &abc)? - entropy(p, c)?,
    ))
}

/// `I(A; B)` under the joint renormalized on the event `cond`.
pub fn conditional_mi_given_event(
    p: &JointPmf,
    a: &[&str],
    b: &[&str],
    cond: &[(&str, u32)],
) -> Result<f64> {
    p.columns(a)?;
    p.columns(b)?;
    mutual_information(&p.condition(cond)?, a, b)
}

/// `½ Σ |p_i - q_i|`, exactly.
pub fn total_variation(p: &Pmf, q: &Pmf) -> Result<Rational> {
    if p.support_size() != q.support_size() {
        return Err(Error::SupportMismatch {
            left: p.support_size(),
            right: q.support_size(),
        });
    }
    let mut sum = Rational::zero();
    for (x, y) in p.weights().iter().zip(q.weights()) {
        let d = if x > y { x - y } else { y - x };
        sum = sum
            .checked_add(&d)
            .ok_or_else(|| Error::Overflow("total variation".into()))?;
    }
    sum.checked_mul(&Rational::new(1, 2))
        .ok_or_else(|| Error::Overflow("total variation".into()))
}

/// `H_b(ε)` in bits, zero at both endpoints.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(out_of_range("ε", eps, "[0, 1]"));
    }
    if eps == 0.0 || eps == 1.0 {
        return Ok(0.0);
    }
    Ok(-eps * eps.log2() - (1.0 - eps) * (1.0 - eps).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u128, d: u128) -> Rational {
        Rational::new(n, d)
    }

    /// Fair bits `a`, `k` and `c = a xor k`.
    fn pad() -> JointPmf {
        let u = Pmf::uniform(2).unwrap();
        JointPmf::product(&[("a", &u), ("k", &u)])
            .unwrap()
            .extend("c", 2, |x| x[0] ^ x[1])
            .unwrap()
    }

    /// Independent oracle: entropy straight from a weight list.
    fn h_oracle(ws: &[f64]) -> f64 {
        ws.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum()
    }

    #[test]
    fn pmf_rejects_bad_sums() {
        assert!(Pmf::new(vec![r(1, 2), r(1, 3)]).is_err());
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![r(1, 3), r(2, 3)]).is_ok());
    }

    #[test]
    fn masses_share_a_denominator() {
        let p = Pmf::new(vec![r(1, 2), r(1, 3), r(1, 6)]).unwrap();
        assert_eq!(p.masses(), (vec![3, 2, 1], 6));
    }

    #[test]
    fn entropy_examples() {
        let u4 = Pmf::uniform(4).unwrap();
        let j = JointPmf::product(&[("x", &u4)]).unwrap();
        assert!((entropy(&j, &["x"]).unwrap() - 2.0).abs() < EQ_TOL);

        let pt = Pmf::point(3, 1).unwrap();
        let j = JointPmf::product(&[("x", &pt)]).unwrap();
        assert_eq!(entropy(&j, &["x"]).unwrap(), 0.0);

        let skew = Pmf::new(vec![r(1, 4), r(3, 4)]).unwrap();
        let j = JointPmf::product(&[("x", &skew)]).unwrap();
        let h = entropy(&j, &["x"]).unwrap();
        assert!((h - 0.811_278_124_459_132_8).abs() < EQ_TOL);
        assert!((h - h_oracle(&[0.25, 0.75])).abs() < EQ_TOL);
    }

    #[test]
    fn entropy_of_nothing_is_zero() {
        assert_eq!(entropy(&pad(), &[]).unwrap(), 0.0);
    }

    #[test]
    fn unknown_variable_is_an_error() {
        assert_eq!(
            entropy(&pad(), &["zz"]),
            Err(Error::UnknownVariable("zz".into()))
        );
        assert!(mutual_information(&pad(), &["a"], &["zz"]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let j = pad();
        assert_eq!(mutual_information(&j, &["a"], &["k"]).unwrap(), 0.0);
        assert!((mutual_information(&j, &["a"], &["a"]).unwrap() - 1.0).abs() < EQ_TOL);
        assert!(mutual_information(&j, &["a"], &["c"]).unwrap().abs() < EQ_TOL);
    }

    #[test]
    fn conditional_mutual_information_examples() {
        let j = pad();
        let plain = mutual_information(&j, &["a"], &["c"]).unwrap();
        let vacuous = conditional_mutual_information(&j, &["a"], &["c"], &[]).unwrap();
        assert!((plain - vacuous).abs() < EQ_TOL);
        assert_eq!(
            conditional_mutual_information(&j, &["a"], &["a"], &["a"]).unwrap(),
            0.0
        );
        let otp = conditional_mutual_information(&j, &["a"], &["c"], &["k"]).unwrap();
        assert!((otp - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn event_conditioning_examples() {
        let j = pad();
        let always = j.extend("one", 1, |_| 0).unwrap();
        let a = conditional_mi_given_event(&always, &["a"], &["c"], &[("one", 0)]).unwrap();
        assert!(a.abs() < EQ_TOL);
        let fixed = conditional_mi_given_event(&j, &["a"], &["c"], &[("a", 1)]).unwrap();
        assert_eq!(fixed, 0.0);
        let given_k = conditional_mi_given_event(&j, &["a"], &["c"], &[("k", 0)]).unwrap();
        assert!((given_k - 1.0).abs() < EQ_TOL);
        let never = j.condition(&[("a", 0), ("c", 1), ("k", 0)]);
        assert_eq!(never, Err(Error::NullEvent));
    }

    #[test]
    fn total_variation_examples() {
        let half = Pmf::uniform(2).unwrap();
        let skew = Pmf::new(vec![r(1, 4), r(3, 4)]).unwrap();
        let pt = Pmf::point(2, 0).unwrap();
        assert_eq!(total_variation(&half, &half).unwrap(), r(0, 1));
        assert_eq!(total_variation(&pt, &half).unwrap(), r(1, 2));
        assert_eq!(total_variation(&half, &skew).unwrap(), r(1, 4));
        assert!(matches!(
            total_variation(&half, &Pmf::uniform(3).unwrap()),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn binary_entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < EQ_TOL);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < EQ_TOL);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn marginal_and_pmf_of_agree() {
        let j = pad();
        let m = j.marginal(&["c"]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(j.pmf_of("c").unwrap(), Pmf::uniform(2).unwrap());
        assert_eq!(j.probability(&[("a", 1), ("c", 0)]).unwrap(), r(1, 4));
    }

    fn arb_joint() -> impl Strategy<Value = JointPmf> {
        // Four variables over alphabets {2, 2, 3, 2} with arbitrary masses.
        prop::collection::vec(0u128..6, 24).prop_filter_map("positive", |ms| {
            let sizes = vec![2usize, 2, 3, 2];
            let mut outcomes = Vec::new();
            let mut i = 0;
            table::for_each_tuple(&sizes, |x| {
                outcomes.push((x.to_vec(), ms[i]));
                i += 1;
            });
            JointPmf::from_masses(
                ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
                sizes,
                outcomes,
            )
            .ok()
        })
    }

    fn arb_pmf(n: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0u128..8, n).prop_filter_map("positive", |ms| {
            let t: u128 = ms.iter().sum();
            (t > 0).then(|| Pmf::new(ms.iter().map(|&m| r(m, t)).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(j in arb_joint()) {
            let sum = j.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
            prop_assert!(sum.is_one());
            let m = j.marginal(&["b", "c"]).unwrap();
            let sum = m.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
            prop_assert!(sum.is_one());
        }

        #[test]
        fn conditional_mi_is_nonnegative(j in arb_joint()) {
            let v = conditional_mutual_information(&j, &["a"], &["b"], &["c"]).unwrap();
            prop_assert!(v >= -NEG_TOL);
            let v = conditional_mutual_information(&j, &["a", "d"], &["b"], &["c"]).unwrap();
            prop_assert!(v >= -NEG_TOL);
        }

        #[test]
        fn chain_rule(j in arb_joint()) {
            let lhs = mutual_information(&j, &["a"], &["b", "c"]).unwrap();
            let rhs = mutual_information(&j, &["a"], &["c"]).unwrap()
                + conditional_mutual_information(&j, &["a"], &["b"], &["c"]).unwrap();
            prop_assert!((lhs - rhs).abs() < EQ_TOL);
        }

        #[test]
        fn event_average_is_conditional_mi(j in arb_joint()) {
            let cmi = conditional_mutual_information(&j, &["a"], &["b"], &["c"]).unwrap();
            let mut avg = 0.0;
            for z in 0..3u32 {
                let pz = j.probability(&[("c", z)]).unwrap();
                if !pz.is_zero() {
                    avg += to_f64(&pz)
                        * conditional_mi_given_event(&j, &["a"], &["b"], &[("c", z)]).unwrap();
                }
            }
            prop_assert!((avg - cmi).abs() < EQ_TOL);
        }

        #[test]
        fn total_variation_is_a_metric(p in arb_pmf(4), q in arb_pmf(4), s in arb_pmf(4)) {
            let pq = total_variation(&p, &q).unwrap();
            prop_assert_eq!(pq, total_variation(&q, &p).unwrap());
            prop_assert!(pq <= Rational::one());
            prop_assert!(pq <= total_variation(&p, &s).unwrap() + total_variation(&s, &q).unwrap());
        }
    }
}
