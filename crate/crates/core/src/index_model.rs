//! Secure index coding: instances, codes and exact evaluation.
//!
//! A sender broadcasts one codeword `ê(x, z) ∈ [2^n̂]`; receiver `t` decodes its
//! wanted messages from the codeword and the messages it already has, and each
//! eavesdropper sees the codeword together with its own side-information
//! messages.

use crate::error::{Error, Result};
use crate::probinfo::{
    for_each_product_outcome, mutual_information, JointPmf, Pmf, Rational, EQ_TOL,
};
use crate::table::{self, Table};

/// Joint variable holding the encoder key.
pub const KEY_VAR: &str = "$key";
/// Joint variable holding the broadcast codeword.
pub const BROADCAST_VAR: &str = "$b";
/// Joint variable that is 1 when every receiver decodes correctly.
pub const SUCCESS_VAR: &str = "$ok";

/// Largest supported codeword length in bits.
pub const MAX_BROADCAST_BITS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub id: String,
    pub alphabet: usize,
}

impl Message {
    pub fn new(id: impl Into<String>, alphabet: usize) -> Self {
        Self {
            id: id.into(),
            alphabet,
        }
    }
}

/// A receiver; `wants` and `has` are ascending message indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Receiver {
    pub id: String,
    pub wants: Vec<usize>,
    pub has: Vec<usize>,
}

/// An eavesdropper; `targets` and `side_info` are ascending message indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexEavesdropper {
    pub id: String,
    pub targets: Vec<usize>,
    pub side_info: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexInstance {
    messages: Vec<Message>,
    receivers: Vec<Receiver>,
    eavesdroppers: Vec<IndexEavesdropper>,
}

pub(crate) fn check_unique<'a>(what: &str, ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for id in ids {
        if id.is_empty() {
            return Err(Error::InvalidInstance(format!("empty {what} id")));
        }
        if seen.contains(&id) {
            return Err(Error::InvalidInstance(format!("{what} `{id}` defined twice")));
        }
        seen.push(id);
    }
    Ok(())
}

pub(crate) fn normalize_set(set: &mut Vec<usize>, bound: usize, what: &str) -> Result<()> {
    set.sort_unstable();
    set.dedup();
    match set.last() {
        Some(&i) if i >= bound => Err(Error::InvalidInstance(format!(
            "{what} refers to message index {i} of {bound}"
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

impl IndexInstance {
    /// Validates and builds an instance. Index sets are sorted and deduplicated.
    pub fn new(
        messages: Vec<Message>,
        mut receivers: Vec<Receiver>,
        mut eavesdroppers: Vec<IndexEavesdropper>,
    ) -> Result<Self> {
        check_unique("message", messages.iter().map(|m| m.id.as_str()))?;
        check_unique("receiver", receivers.iter().map(|r| r.id.as_str()))?;
        check_unique("eavesdropper", eavesdroppers.iter().map(|r| r.id.as_str()))?;
        for m in &messages {
            if m.id.starts_with('$') {
                return Err(Error::InvalidInstance(format!(
                    "message id `{}` uses the reserved `$` prefix",
                    m.id
                )));
            }
            if m.alphabet == 0 {
                return Err(Error::InvalidInstance(format!(
                    "message `{}` has an empty alphabet",
                    m.id
                )));
            }
        }
        let k = messages.len();
        for t in &mut receivers {
            normalize_set(&mut t.wants, k, &format!("receiver `{}`", t.id))?;
            normalize_set(&mut t.has, k, &format!("receiver `{}`", t.id))?;
            if t.wants.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "receiver `{}` wants nothing",
                    t.id
                )));
            }
            if !disjoint(&t.wants, &t.has) {
                return Err(Error::InvalidInstance(format!(
                    "receiver `{}` already has a message it wants",
                    t.id
                )));
            }
        }
        for r in &mut eavesdroppers {
            normalize_set(&mut r.targets, k, &format!("eavesdropper `{}`", r.id))?;
            normalize_set(&mut r.side_info, k, &format!("eavesdropper `{}`", r.id))?;
            if !disjoint(&r.targets, &r.side_info) {
                return Err(Error::InvalidInstance(format!(
                    "eavesdropper `{}` targets one of its side-information messages",
                    r.id
                )));
            }
        }
        Ok(Self {
            messages,
            receivers,
            eavesdroppers,
        })
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn eavesdroppers(&self) -> &[IndexEavesdropper] {
        &self.eavesdroppers
    }

    pub fn message_index(&self, id: &str) -> Option<usize> {
        self.messages.iter().position(|m| m.id == id)
    }

    pub fn alphabets(&self) -> Vec<usize> {
        self.messages.iter().map(|m| m.alphabet).collect()
    }

    pub fn sizes_of(&self, set: &[usize]) -> Vec<usize> {
        set.iter().map(|&i| self.messages[i].alphabet).collect()
    }

    /// Uniform pmf for every message.
    pub fn uniform_pmfs(&self) -> Vec<Pmf> {
        self.messages
            .iter()
            .map(|m| Pmf::uniform(m.alphabet).expect("alphabets are positive"))
            .collect()
    }

    pub(crate) fn check_pmfs(&self, pmfs: &[Pmf]) -> Result<()> {
        if pmfs.len() != self.messages.len() {
            return Err(Error::InvalidPmf(format!(
                "{} message pmfs for {} messages",
                pmfs.len(),
                self.messages.len()
            )));
        }
        for (m, p) in self.messages.iter().zip(pmfs) {
            if p.support_size() != m.alphabet {
                return Err(Error::SupportMismatch {
                    left: m.alphabet,
                    right: p.support_size(),
                });
            }
        }
        Ok(())
    }
}

/// An index code. A key pmf of support size 1 makes the code deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexCode {
    broadcast_bits: u32,
    key: Pmf,
    encoder: Table,
    decoders: Vec<Table>,
}

impl IndexCode {
    /// The encoder table reads `(x_1, .., x_k, z)`; decoder `j` reads
    /// `(codeword, has_j..)` and returns the wanted messages of receiver `j`.
    pub fn new(
        instance: &IndexInstance,
        broadcast_bits: u32,
        key: Pmf,
        encoder: Table,
        decoders: Vec<Table>,
    ) -> Result<Self> {
        let code = Self {
            broadcast_bits,
            key,
            encoder,
            decoders,
        };
        code.check(instance)?;
        Ok(code)
    }

    /// Tabulates encoder and decoders from closures.
    pub fn from_fns(
        instance: &IndexInstance,
        broadcast_bits: u32,
        key: Pmf,
        encoder: impl Fn(&[u32], u32) -> u32,
        decoder: impl Fn(usize, u32, &[u32]) -> Vec<u32>,
    ) -> Result<Self> {
        if broadcast_bits > MAX_BROADCAST_BITS {
            return Err(Error::InvalidCode(format!(
                "codeword length {broadcast_bits} exceeds {MAX_BROADCAST_BITS} bits"
            )));
        }
        let k = instance.messages.len();
        let words = 1usize << broadcast_bits;
        let mut domain = instance.alphabets();
        domain.push(key.support_size());
        let enc = Table::from_fn(domain, vec![words], |x| vec![encoder(&x[..k], x[k])])?;
        let decoders = instance
            .receivers
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let mut domain = vec![words];
                domain.extend(instance.sizes_of(&t.has));
                Table::from_fn(domain, instance.sizes_of(&t.wants), |x| {
                    decoder(j, x[0], &x[1..])
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(instance, broadcast_bits, key, enc, decoders)
    }

    /// Checks that every table has the shape the instance requires.
    pub fn check(&self, instance: &IndexInstance) -> Result<()> {
        if self.broadcast_bits > MAX_BROADCAST_BITS {
            return Err(Error::InvalidCode(format!(
                "codeword length {} exceeds {MAX_BROADCAST_BITS} bits",
                self.broadcast_bits
            )));
        }
        let words = self.codewords();
        let mut domain = instance.alphabets();
        domain.push(self.key.support_size());
        if self.encoder.domain() != domain.as_slice() || self.encoder.codomain() != [words] {
            return Err(Error::InvalidCode(format!(
                "encoder must map {domain:?} to [{words}]"
            )));
        }
        if self.decoders.len() != instance.receivers.len() {
            return Err(Error::InvalidCode(format!(
                "{} decoders for {} receivers",
                self.decoders.len(),
                instance.receivers.len()
            )));
        }
        for (t, d) in instance.receivers.iter().zip(&self.decoders) {
            let mut domain = vec![words];
            domain.extend(instance.sizes_of(&t.has));
            let codomain = instance.sizes_of(&t.wants);
            if d.domain() != domain.as_slice() || d.codomain() != codomain.as_slice() {
                return Err(Error::InvalidCode(format!(
                    "decoder of receiver `{}` must map {domain:?} to {codomain:?}",
                    t.id
                )));
            }
        }
        Ok(())
    }

    pub fn broadcast_bits(&self) -> u32 {
        self.broadcast_bits
    }

    /// Number of codewords, `2^n̂`.
    pub fn codewords(&self) -> usize {
        1usize << self.broadcast_bits
    }

    pub fn key(&self) -> &Pmf {
        &self.key
    }

    pub fn encoder(&self) -> &Table {
        &self.encoder
    }

    pub fn decoders(&self) -> &[Table] {
        &self.decoders
    }

    pub fn is_deterministic(&self) -> bool {
        self.key.support_size() == 1
    }

    pub fn encode(&self, messages: &[u32], key: u32) -> u32 {
        let mut input = messages.to_vec();
        input.push(key);
        self.encoder.apply1(&input)
    }

    /// Whether receiver `j` recovers its wanted messages from `codeword`.
    pub fn receiver_correct(
        &self,
        instance: &IndexInstance,
        j: usize,
        messages: &[u32],
        codeword: u32,
    ) -> bool {
        let t = &instance.receivers[j];
        let mut input = Vec::with_capacity(1 + t.has.len());
        input.push(codeword);
        input.extend(t.has.iter().map(|&i| messages[i]));
        let guess = self.decoders[j].apply(&input);
        t.wants.iter().zip(guess).all(|(&i, g)| messages[i] == g)
    }

    /// Whether every receiver decodes correctly.
    pub fn all_correct(&self, instance: &IndexInstance, messages: &[u32], codeword: u32) -> bool {
        (0..instance.receivers.len()).all(|j| self.receiver_correct(instance, j, messages, codeword))
    }

    /// Replaces every decoder by a maximum a posteriori decoder for its receiver.
    pub fn with_map_decoders(&self, instance: &IndexInstance, pmfs: &[Pmf]) -> Result<Self> {
        self.check(instance)?;
        instance.check_pmfs(pmfs)?;
        let words = self.codewords();
        let mut factors: Vec<&Pmf> = pmfs.iter().collect();
        factors.push(&self.key);
        let mut decoders = Vec::with_capacity(instance.receivers.len());
        for t in &instance.receivers {
            let has = instance.sizes_of(&t.has);
            let wants = instance.sizes_of(&t.wants);
            let in_len = words as u64 * table::product(&has).unwrap_or(u64::MAX);
            let out_len = table::product(&wants).unwrap_or(u64::MAX);
            if in_len.saturating_mul(out_len) > table::MAX_TABLE_LEN {
                return Err(Error::Overflow("posterior table is too large".into()));
            }
            let mut post = vec![0u128; (in_len * out_len) as usize];
            for_each_product_outcome(&factors, |x, mass| {
                let b = self.encoder.apply1(x);
                let side: Vec<u32> = t.has.iter().map(|&i| x[i]).collect();
                let want: Vec<u32> = t.wants.iter().map(|&i| x[i]).collect();
                let row = b as u64 * table::product(&has).unwrap() + table::encode(&side, &has);
                post[(row * out_len + table::encode(&want, &wants)) as usize] += mass;
            })?;
            let entries = (0..in_len)
                .map(|row| {
                    let slice = &post[(row * out_len) as usize..((row + 1) * out_len) as usize];
                    let best = slice.iter().copied().max().unwrap_or(0);
                    slice.iter().position(|&m| m == best).unwrap_or(0) as u64
                })
                .collect();
            let mut domain = vec![words];
            domain.extend(has);
            decoders.push(Table::new(domain, wants, entries)?);
        }
        Self::new(
            instance,
            self.broadcast_bits,
            self.key.clone(),
            self.encoder.clone(),
            decoders,
        )
    }

    /// Whether the encoder is a linear map over GF(2) of the concatenated
    /// message bits. Requires power-of-two alphabets and no key.
    pub fn is_gf2_linear(&self, instance: &IndexInstance) -> bool {
        if !self.is_deterministic() || !instance.messages.iter().all(|m| m.alphabet.is_power_of_two()) {
            return false;
        }
        let sizes = instance.alphabets();
        let k = sizes.len();
        let zero = vec![0u32; k];
        if self.encode(&zero, 0) != 0 {
            return false;
        }
        let mut basis = Vec::new();
        for (i, &m) in sizes.iter().enumerate() {
            let mut bit = 1u32;
            while (bit as usize) < m {
                let mut x = zero.clone();
                x[i] = bit;
                basis.push((i, bit, self.encode(&x, 0)));
                bit <<= 1;
            }
        }
        let mut linear = true;
        table::for_each_tuple(&sizes, |x| {
            if !linear {
                return;
            }
            let expected = basis
                .iter()
                .filter(|(i, bit, _)| x[*i] & bit != 0)
                .fold(0u32, |acc, (_, _, y)| acc ^ y);
            linear = self.encode(x, 0) == expected;
        });
        linear
    }
}

/// The joint of messages, key, codeword and decode-success indicator.
pub fn index_joint(instance: &IndexInstance, code: &IndexCode, pmfs: &[Pmf]) -> Result<JointPmf> {
    code.check(instance)?;
    instance.check_pmfs(pmfs)?;
    let mut factors: Vec<&Pmf> = pmfs.iter().collect();
    factors.push(&code.key);
    let k = instance.messages.len();
    let mut outcomes = Vec::new();
    for_each_product_outcome(&factors, |x, mass| {
        let b = code.encoder.apply1(x);
        let ok = code.all_correct(instance, &x[..k], b);
        let mut row = x.to_vec();
        row.push(b);
        row.push(ok as u32);
        outcomes.push((row, mass));
    })?;
    let mut vars: Vec<String> = instance.messages.iter().map(|m| m.id.clone()).collect();
    vars.extend([KEY_VAR, BROADCAST_VAR, SUCCESS_VAR].map(String::from));
    let mut sizes = instance.alphabets();
    sizes.extend([code.key.support_size(), code.codewords(), 2]);
    JointPmf::from_masses(vars, sizes, outcomes)
}

/// `P̂_e`, the exact probability that some receiver decodes incorrectly.
pub fn eval_index_error(instance: &IndexInstance, code: &IndexCode, pmfs: &[Pmf]) -> Result<Rational> {
    index_joint(instance, code, pmfs)?.probability(&[(SUCCESS_VAR, 0)])
}

/// Leakage of an index joint to each eavesdropper, `I(X_A; X_b, X_B)`.
pub fn index_leakage_from_joint(instance: &IndexInstance, joint: &JointPmf) -> Result<Vec<f64>> {
    instance
        .eavesdroppers
        .iter()
        .map(|r| {
            let a: Vec<&str> = r.targets.iter().map(|&i| instance.messages[i].id.as_str()).collect();
            let mut b: Vec<&str> = vec![BROADCAST_VAR];
            b.extend(r.side_info.iter().map(|&i| instance.messages[i].id.as_str()));
            mutual_information(joint, &a, &b)
        })
        .collect()
}

/// Per-eavesdropper leakage `I(X_A; X_b, X_B)` in bits.
pub fn eval_index_leakage(instance: &IndexInstance, code: &IndexCode, pmfs: &[Pmf]) -> Result<Vec<f64>> {
    index_leakage_from_joint(instance, &index_joint(instance, code, pmfs)?)
}

/// Measured error and leakage against the ceilings `(ε, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub error: Rational,
    pub leakage: Vec<f64>,
    pub error_ok: bool,
    pub leakage_ok: bool,
}

impl FeasibilityReport {
    pub(crate) fn new(error: Rational, leakage: Vec<f64>, eps: &Rational, eta: f64) -> Self {
        let error_ok = error <= *eps;
        let leakage_ok = leakage.iter().all(|&l| l <= eta + EQ_TOL);
        Self {
            error,
            leakage,
            error_ok,
            leakage_ok,
        }
    }

    pub fn feasible(&self) -> bool {
        self.error_ok && self.leakage_ok
    }
}

/// Feasibility with error compared exactly and leakage within [`EQ_TOL`].
pub fn check_index_feasible(
    instance: &IndexInstance,
    code: &IndexCode,
    pmfs: &[Pmf],
    eps: &Rational,
    eta: f64,
) -> Result<FeasibilityReport> {
    let joint = index_joint(instance, code, pmfs)?;
    let error = joint.probability(&[(SUCCESS_VAR, 0)])?;
    let leakage = index_leakage_from_joint(instance, &joint)?;
    Ok(FeasibilityReport::new(error, leakage, eps, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u128, d: u128) -> Rational {
        Rational::new(n, d)
    }

    fn msgs(k: usize) -> Vec<Message> {
        (1..=k).map(|i| Message::new(i.to_string(), 2)).collect()
    }

    fn recv(id: &str, wants: &[usize], has: &[usize]) -> Receiver {
        Receiver {
            id: id.into(),
            wants: wants.to_vec(),
            has: has.to_vec(),
        }
    }

    fn eve(id: &str, targets: &[usize], side: &[usize]) -> IndexEavesdropper {
        IndexEavesdropper {
            id: id.into(),
            targets: targets.to_vec(),
            side_info: side.to_vec(),
        }
    }

    fn single(eaves: Vec<IndexEavesdropper>) -> IndexInstance {
        IndexInstance::new(msgs(1), vec![recv("t", &[0], &[])], eaves).unwrap()
    }

    #[test]
    fn validation_names_the_problem() {
        let err = IndexInstance::new(msgs(2), vec![recv("t", &[0], &[0])], vec![]).unwrap_err();
        assert!(err.to_string().contains("already has"));
        let err = IndexInstance::new(msgs(2), vec![recv("t", &[], &[1])], vec![]).unwrap_err();
        assert!(err.to_string().contains("wants nothing"));
        let err = IndexInstance::new(msgs(2), vec![], vec![eve("r", &[0], &[0])]).unwrap_err();
        assert!(err.to_string().contains("targets"));
        let err = IndexInstance::new(msgs(2), vec![recv("t", &[5], &[])], vec![]).unwrap_err();
        assert!(err.to_string().contains("index 5"));
        let mut dup = msgs(2);
        dup[1].id = "1".into();
        assert!(IndexInstance::new(dup, vec![], vec![]).is_err());
    }

    #[test]
    fn identity_code_always_decodes() {
        let inst = single(vec![]);
        let code = IndexCode::from_fns(&inst, 1, Pmf::uniform(1).unwrap(), |x, _| x[0], |_, b, _| vec![b])
            .unwrap();
        let j = index_joint(&inst, &code, &inst.uniform_pmfs()).unwrap();
        assert_eq!(j.probability(&[(SUCCESS_VAR, 1)]).unwrap(), r(1, 1));
    }

    #[test]
    fn constant_encoder_succeeds_with_guess_probability() {
        let inst = single(vec![]);
        let skew = Pmf::new(vec![r(1, 3), r(2, 3)]).unwrap();
        let code =
            IndexCode::from_fns(&inst, 1, Pmf::uniform(1).unwrap(), |_, _| 0, |_, _, _| vec![1]).unwrap();
        let j = index_joint(&inst, &code, &[skew]).unwrap();
        assert_eq!(j.probability(&[(SUCCESS_VAR, 1)]).unwrap(), r(2, 3));
    }

    #[test]
    fn one_bad_realization_costs_a_quarter() {
        let inst = IndexInstance::new(msgs(2), vec![recv("t", &[0, 1], &[])], vec![]).unwrap();
        let code = IndexCode::from_fns(
            &inst,
            2,
            Pmf::uniform(1).unwrap(),
            |x, _| 2 * x[0] + x[1],
            |_, b, _| if b == 3 { vec![0, 0] } else { vec![b >> 1, b & 1] },
        )
        .unwrap();
        let pe = eval_index_error(&inst, &code, &inst.uniform_pmfs()).unwrap();
        assert_eq!(pe, r(1, 4));
        let rep = check_index_feasible(&inst, &code, &inst.uniform_pmfs(), &r(1, 4), 0.0).unwrap();
        assert!(rep.feasible());
        let rep = check_index_feasible(&inst, &code, &inst.uniform_pmfs(), &r(1, 5), 0.0).unwrap();
        assert!(!rep.feasible());
    }

    #[test]
    fn key_ignored_by_decoder_still_inverts() {
        let inst = single(vec![]);
        // Codeword carries the message in its high bit and the key in its low bit.
        let code = IndexCode::from_fns(
            &inst,
            2,
            Pmf::uniform(2).unwrap(),
            |x, z| 2 * x[0] + z,
            |_, b, _| vec![b >> 1],
        )
        .unwrap();
        assert!(!code.is_deterministic());
        assert_eq!(eval_index_error(&inst, &code, &inst.uniform_pmfs()).unwrap(), r(0, 1));
    }

    #[test]
    fn leakage_examples() {
        let inst = single(vec![eve("r", &[0], &[])]);
        let det = Pmf::uniform(1).unwrap();
        let constant = IndexCode::from_fns(&inst, 1, det.clone(), |_, _| 0, |_, _, _| vec![0]).unwrap();
        assert_eq!(eval_index_leakage(&inst, &constant, &inst.uniform_pmfs()).unwrap(), vec![0.0]);

        let plain = IndexCode::from_fns(&inst, 1, det, |x, _| x[0], |_, b, _| vec![b]).unwrap();
        let l = eval_index_leakage(&inst, &plain, &inst.uniform_pmfs()).unwrap();
        assert!((l[0] - 1.0).abs() < EQ_TOL);
        let rep = check_index_feasible(&inst, &plain, &inst.uniform_pmfs(), &r(0, 1), 0.0).unwrap();
        assert!(rep.error_ok && !rep.leakage_ok);

        let pad = IndexCode::from_fns(&inst, 1, Pmf::uniform(2).unwrap(), |x, z| x[0] ^ z, |_, b, _| vec![b])
            .unwrap();
        let l = eval_index_leakage(&inst, &pad, &inst.uniform_pmfs()).unwrap();
        assert!(l[0].abs() < EQ_TOL);
    }

    #[test]
    fn perfect_secure_code_is_feasible_at_zero() {
        // Receiver has message 2 and wants 1; the eavesdropper has neither.
        let inst = IndexInstance::new(
            msgs(2),
            vec![recv("t", &[0], &[1])],
            vec![eve("r", &[0], &[])],
        )
        .unwrap();
        let code = IndexCode::from_fns(
            &inst,
            1,
            Pmf::uniform(1).unwrap(),
            |x, _| x[0] ^ x[1],
            |_, b, side| vec![b ^ side[0]],
        )
        .unwrap();
        let rep = check_index_feasible(&inst, &code, &inst.uniform_pmfs(), &r(0, 1), 0.0).unwrap();
        assert!(rep.feasible());
    }

    #[test]
    fn map_decoders_fix_a_bad_decoder() {
        let inst = single(vec![]);
        let bad = IndexCode::from_fns(&inst, 1, Pmf::uniform(1).unwrap(), |x, _| x[0], |_, b, _| vec![1 - b])
            .unwrap();
        let pmfs = inst.uniform_pmfs();
        assert_eq!(eval_index_error(&inst, &bad, &pmfs).unwrap(), r(1, 1));
        let good = bad.with_map_decoders(&inst, &pmfs).unwrap();
        assert_eq!(eval_index_error(&inst, &good, &pmfs).unwrap(), r(0, 1));
    }

    #[test]
    fn linearity_check() {
        let inst = IndexInstance::new(msgs(2), vec![recv("t", &[0], &[1])], vec![]).unwrap();
        let det = Pmf::uniform(1).unwrap();
        let xor = IndexCode::from_fns(&inst, 1, det.clone(), |x, _| x[0] ^ x[1], |_, _, _| vec![0]).unwrap();
        assert!(xor.is_gf2_linear(&inst));
        let and = IndexCode::from_fns(&inst, 1, det, |x, _| x[0] & x[1], |_, _, _| vec![0]).unwrap();
        assert!(!and.is_gf2_linear(&inst));
    }

    /// Realization-by-realization error oracle.
    fn error_oracle(inst: &IndexInstance, code: &IndexCode) -> Rational {
        let k = inst.messages().len();
        let mut sizes = inst.alphabets();
        sizes.push(code.key().support_size());
        let mut bad = Rational::from_integer(0);
        table::for_each_tuple(&sizes, |x| {
            let b = code.encode(&x[..k], x[k]);
            let fail = inst.receivers().iter().enumerate().any(|(j, t)| {
                let mut input = vec![b];
                input.extend(t.has.iter().map(|&i| x[i]));
                let out = code.decoders()[j].apply(&input);
                t.wants.iter().zip(&out).any(|(&i, &g)| x[i] != g)
            });
            if fail {
                bad += r(1, 1u128 << k) * code.key().weight(x[k] as usize);
            }
        });
        bad
    }

    fn three_message_instance() -> IndexInstance {
        IndexInstance::new(
            msgs(3),
            vec![recv("a", &[0], &[1]), recv("b", &[1, 2], &[0])],
            vec![eve("r", &[1], &[2]), eve("s", &[0], &[])],
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn error_matches_oracle(enc in prop::collection::vec(0u64..4, 16), da in prop::collection::vec(0u64..2, 8), db in prop::collection::vec(0u64..4, 8)) {
            let inst = three_message_instance();
            let code = IndexCode::new(
                &inst,
                2,
                Pmf::uniform(2).unwrap(),
                Table::new(vec![2, 2, 2, 2], vec![4], enc).unwrap(),
                vec![
                    Table::new(vec![4, 2], vec![2], da).unwrap(),
                    Table::new(vec![4, 2], vec![2, 2], db).unwrap(),
                ],
            ).unwrap();
            prop_assert_eq!(eval_index_error(&inst, &code, &inst.uniform_pmfs()).unwrap(), error_oracle(&inst, &code));
        }

        #[test]
        fn leakage_ignores_message_names(enc in prop::collection::vec(0u64..4, 16)) {
            let inst = three_message_instance();
            let mut renamed: Vec<Message> = inst.messages().to_vec();
            for m in &mut renamed {
                m.id = format!("m{}", m.id);
            }
            let other = IndexInstance::new(renamed, inst.receivers().to_vec(), inst.eavesdroppers().to_vec()).unwrap();
            let code = IndexCode::new(
                &inst,
                2,
                Pmf::uniform(2).unwrap(),
                Table::new(vec![2, 2, 2, 2], vec![4], enc).unwrap(),
                vec![
                    Table::constant(vec![4, 2], vec![2], &[0]).unwrap(),
                    Table::constant(vec![4, 2], vec![2, 2], &[0, 0]).unwrap(),
                ],
            ).unwrap();
            let a = eval_index_leakage(&inst, &code, &inst.uniform_pmfs()).unwrap();
            let b = eval_index_leakage(&other, &code, &other.uniform_pmfs()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < EQ_TOL);
            }
        }

        #[test]
        fn deterministic_code_blind_to_targets_leaks_nothing(enc in prop::collection::vec(0u64..4, 4)) {
            // Eavesdropper targets message 1 with no side information; the
            // encoder reads only messages 2 and 3.
            let inst = IndexInstance::new(msgs(3), vec![recv("t", &[1], &[])], vec![eve("r", &[0], &[])]).unwrap();
            let code = IndexCode::from_fns(
                &inst,
                2,
                Pmf::uniform(1).unwrap(),
                |x, _| enc[table::encode(&x[1..], &[2, 2]) as usize] as u32,
                |_, _, _| vec![0],
            ).unwrap();
            let l = eval_index_leakage(&inst, &code, &inst.uniform_pmfs()).unwrap();
            prop_assert!(l[0].abs() < EQ_TOL);
        }
    }
}
