//! Code translations between mapped instances, broadcast-value selection, the
//! error and leakage ceilings for the backward translation, and checks of the
//! supporting inequalities.
//!
//! Index-side pmfs for an [`IndexImage`] list the network messages first and
//! the edge messages after them, as produced by [`image_pmfs`].

use std::fmt;
use std::str::FromStr;

use crate::error::{out_of_range, Error, Result};
use crate::index_model::{
    eval_index_error, index_joint, index_leakage_from_joint, IndexCode, IndexInstance, BROADCAST_VAR,
    SUCCESS_VAR,
};
use crate::instance_mapping::{ceil_log2, i2n_layout, image_pmfs, network_to_index, I2nLayout, IndexImage};
use crate::network_model::{
    edge_var, network_joint, network_leakage_from_joint, topological_order, AugmentedInstance,
    NetworkCode, NetworkInstance,
};
use crate::probinfo::{
    binary_entropy, conditional_mutual_information, entropy, mutual_information, to_f64,
    total_variation, JointPmf, Pmf, Rational, EQ_TOL,
};
use crate::table::{self, Table};

/// Slack allowed when comparing measured leakage against `γ` or `γ′`.
pub const BOUND_TOL: f64 = 1e-6;

/// Coefficient of the total-variation term in `ζ` unless overridden.
pub const DEFAULT_TV_COEFFICIENT: f64 = 2.0;

fn clamp(v: u32, size: usize) -> u32 {
    if (v as usize) < size {
        v
    } else {
        0
    }
}

fn ids(instance: &IndexInstance, set: &[usize]) -> Vec<String> {
    set.iter().map(|&i| instance.messages()[i].id.clone()).collect()
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

// Index code to network code.

/// Runs the index code inside its network image: sources forward their
/// message, vertex `1` applies the index encoder with its key distributed as
/// the index key, vertex `2` copies, and sink `t_j` applies decoder `j`.
pub fn translate_i2n(
    index: &IndexInstance,
    code: &IndexCode,
    network: &NetworkInstance,
    uses: u32,
) -> Result<NetworkCode> {
    code.check(index)?;
    let lay = i2n_layout(index, network)?;
    let bits = |e: usize| network.edge_bits(e, uses);
    for (i, m) in index.messages().iter().enumerate() {
        let need = ceil_log2(m.alphabet) as u64;
        let short = std::iter::once(lay.source_edges[i])
            .chain(lay.side_edges.iter().flatten().filter(|p| p.0 == i).map(|p| p.1))
            .find(|&e| bits(e) < need);
        if let Some(e) = short {
            return Err(Error::InstanceMismatch(format!(
                "edge `{}` cannot carry message `{}`",
                network.edge_id(e),
                m.id
            )));
        }
    }
    let nhat = code.broadcast_bits() as u64;
    if bits(lay.bottleneck) < nhat {
        return Err(Error::InstanceMismatch(format!(
            "edge `{}` carries fewer than {nhat} bits",
            network.edge_id(lay.bottleneck)
        )));
    }
    if let Some(&e) = lay.relay_edges.iter().find(|&&e| bits(e) < bits(lay.bottleneck)) {
        return Err(Error::InstanceMismatch(format!(
            "edge `{}` is narrower than the broadcast edge",
            network.edge_id(e)
        )));
    }
    let sizes = index.alphabets();
    let words = code.codewords();
    let mut keys = vec![Pmf::uniform(1)?; network.vertices().len()];
    keys[lay.hub] = code.key().clone();
    NetworkCode::from_fns(
        network,
        uses,
        keys,
        |e, ins, x, z| {
            if e == lay.bottleneck {
                let msgs: Vec<u32> = ins.iter().zip(&sizes).map(|(&v, &m)| clamp(v, m)).collect();
                code.encode(&msgs, z)
            } else if lay.relay_edges.contains(&e) {
                ins[0]
            } else {
                x[0]
            }
        },
        |v, ins, _| {
            let j = lay.sinks.iter().position(|&t| t == v).expect("only sinks decode");
            let side = &lay.side_edges[j];
            let mut input = vec![clamp(ins[side.len()], words)];
            input.extend(side.iter().zip(ins).map(|(&(i, _), &val)| clamp(val, sizes[i])));
            code.decoders()[j].apply(&input)
        },
    )
}

// Network code to index code.

fn check_source_determinism(network: &NetworkInstance, lay: &I2nLayout, code: &NetworkCode) -> Result<()> {
    for &s in &lay.sources {
        for e in network.out_edges(s) {
            let t = &code.encoders()[e];
            if !t.ignores(t.domain().len() - 1) {
                return Err(Error::Precondition(format!(
                    "encoder of edge `{}` depends on the key at `{}`",
                    network.edge_id(e),
                    network.vertices()[s]
                )));
            }
        }
    }
    Ok(())
}

fn source_value(code: &NetworkCode, e: usize, x: u32) -> u32 {
    code.encoders()[e].apply1(&[x, 0])
}

fn backward_code(
    index: &IndexInstance,
    network: &NetworkInstance,
    lay: &I2nLayout,
    code: &NetworkCode,
    relay_key: u32,
) -> Result<IndexCode> {
    let bits = network.edge_bits(lay.bottleneck, code.uses()) as u32;
    let k = index.messages().len();
    IndexCode::from_fns(
        index,
        bits,
        code.keys()[lay.hub].clone(),
        |x, z| {
            let mut input: Vec<u32> = (0..k).map(|i| source_value(code, lay.source_edges[i], x[i])).collect();
            input.push(z);
            code.encoders()[lay.bottleneck].apply1(&input)
        },
        |j, b, side| {
            let mut input: Vec<u32> = lay.side_edges[j]
                .iter()
                .zip(side)
                .map(|(&(_, e), &x)| source_value(code, e, x))
                .collect();
            input.push(code.encoders()[lay.relay_edges[j]].apply1(&[b, relay_key]));
            code.decoders()[lay.sinks[j]].as_ref().expect("sinks decode").apply(&input)
        },
    )
}

/// The key value at vertex `2` whose fixing gives the smallest error, smallest
/// value on ties. Only values of positive probability are considered.
fn best_relay_key(
    index: &IndexInstance,
    network: &NetworkInstance,
    lay: &I2nLayout,
    code: &NetworkCode,
    pmfs: &[Pmf],
) -> Result<u32> {
    let key = &code.keys()[lay.relay];
    let mut best: Option<(Rational, u32)> = None;
    for z in 0..key.support_size() as u32 {
        if key.weight(z as usize) == Rational::from_integer(0) {
            continue;
        }
        let err = eval_index_error(index, &backward_code(index, network, lay, code, z)?, pmfs)?;
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, z));
        }
    }
    Ok(best.expect("a pmf has positive mass").1)
}

fn backward_setup(
    index: &IndexInstance,
    network: &NetworkInstance,
    code: &NetworkCode,
    pmfs: &[Pmf],
) -> Result<(I2nLayout, u32)> {
    code.check(network)?;
    let lay = i2n_layout(index, network)?;
    check_source_determinism(network, &lay, code)?;
    index.check_pmfs(pmfs)?;
    let z = best_relay_key(index, network, &lay, code, pmfs)?;
    Ok((lay, z))
}

/// Replaces every `2->t_j` encoder by a copy of edge `1->2`, folding the
/// former relay encoding (with its key fixed to the best value) into the sink
/// decoders. Requires each `2->t_j` to be at least as wide as `1->2`.
pub fn rewrite_relay(
    index: &IndexInstance,
    network: &NetworkInstance,
    code: &NetworkCode,
    pmfs: &[Pmf],
) -> Result<NetworkCode> {
    let (lay, z) = backward_setup(index, network, code, pmfs)?;
    let uses = code.uses();
    let wide = network.edge_alphabet(lay.bottleneck, uses)?;
    if let Some(&e) = lay
        .relay_edges
        .iter()
        .find(|&&e| network.edge_bits(e, uses) < network.edge_bits(lay.bottleneck, uses))
    {
        return Err(Error::Precondition(format!(
            "edge `{}` is too narrow to copy `{}`",
            network.edge_id(e),
            network.edge_id(lay.bottleneck)
        )));
    }
    let mut keys = code.keys().to_vec();
    keys[lay.relay] = Pmf::uniform(1)?;
    let mut encoders = code.encoders().to_vec();
    for &e in &lay.relay_edges {
        let out = network.edge_alphabet(e, uses)?;
        encoders[e] = Table::from_fn(vec![wide, 1], vec![out], |x| vec![x[0]])?;
    }
    let mut decoders = code.decoders().to_vec();
    for (j, &t) in lay.sinks.iter().enumerate() {
        let old = code.decoders()[t].as_ref().expect("sinks decode");
        let h = lay.side_edges[j].len();
        let relay = &code.encoders()[lay.relay_edges[j]];
        let domain = network.decoder_inputs(t, uses)?;
        decoders[t] = Some(Table::from_fn(domain, old.codomain().to_vec(), |x| {
            let mut input = x.to_vec();
            input[h] = relay.apply1(&[x[h], z]);
            old.apply(&input)
        })?);
    }
    NetworkCode::new(network, uses, keys, encoders, decoders)
}

/// The index code whose broadcast is the value on `1->2`, with key
/// distributed as the key at vertex `1`. Sink decoders see the relay value
/// with vertex `2`'s key fixed to its best value under `pmfs`.
pub fn translate_n2i(
    index: &IndexInstance,
    network: &NetworkInstance,
    code: &NetworkCode,
    pmfs: &[Pmf],
) -> Result<IndexCode> {
    let (lay, z) = backward_setup(index, network, code, pmfs)?;
    backward_code(index, network, &lay, code, z)
}

// Deterministic network code on an augmented instance to index code.

fn check_image(aug: &AugmentedInstance, image: &IndexImage) -> Result<()> {
    if network_to_index(aug, image.uses())? != *image {
        return Err(Error::InstanceMismatch(
            "index instance is not the image of the augmented instance".into(),
        ));
    }
    Ok(())
}

fn edge_sizes(image: &IndexImage) -> Vec<usize> {
    image.edge_bits().iter().map(|&b| 1usize << b).collect()
}

/// The broadcast is the concatenation over edges (first edge most significant)
/// of the edge message plus that edge's global encoding, modulo the edge
/// alphabet. Receivers subtract what they know to recover the encodings.
pub fn translate_n2i_code(aug: &AugmentedInstance, code: &NetworkCode, image: &IndexImage) -> Result<IndexCode> {
    let n = aug.instance();
    code.check(n)?;
    if !code.is_deterministic() {
        return Err(Error::Precondition("network code is randomized; augment it first".into()));
    }
    check_image(aug, image)?;
    if code.uses() != image.uses() {
        return Err(Error::InstanceMismatch(format!(
            "code uses {} channel uses, image assumes {}",
            code.uses(),
            image.uses()
        )));
    }
    let order = topological_order(n)?;
    let ns = image.source_count();
    let sizes = edge_sizes(image);
    let zeros = vec![0u32; n.vertices().len()];
    let ndest = image.destinations().len();
    let sub = |a: u32, b: u32, m: usize| ((a as u64 + m as u64 - b as u64) % m as u64) as u32;
    IndexCode::from_fns(
        image.instance(),
        image.broadcast_bits(),
        Pmf::uniform(1)?,
        |x, _| {
            let g = code.edge_values_in_order(n, &order, &x[..ns], &zeros);
            let comps: Vec<u32> = (0..sizes.len())
                .map(|e| ((x[ns + e] as u64 + g[e] as u64) % sizes[e] as u64) as u32)
                .collect();
            table::encode(&comps, &sizes) as u32
        },
        |j, b, side| {
            let comps = table::decode(b as u64, &sizes);
            let v = if j < ndest {
                image.destinations()[j]
            } else {
                n.edges()[j - ndest].tail
            };
            // Side information lists origin messages, then in-edge messages.
            let no = n.origin_messages(v).len();
            let (origin, edge_side) = side.split_at(no);
            let mut input: Vec<u32> = n
                .in_edges(v)
                .iter()
                .zip(edge_side)
                .map(|(&e, &xe)| sub(comps[e], xe, sizes[e]))
                .collect();
            input.extend(origin);
            if j < ndest {
                code.decoders()[v].as_ref().expect("destinations decode").apply(&input)
            } else {
                let e = j - ndest;
                input.push(0);
                let g = code.encoders()[e].apply1(&input);
                vec![sub(comps[e], g, sizes[e])]
            }
        },
    )
}

// Deterministic index code on an image back to a network code.

fn check_part2(aug: &AugmentedInstance, image: &IndexImage, code: &IndexCode) -> Result<()> {
    code.check(image.instance())?;
    if !code.is_deterministic() {
        return Err(Error::Precondition("index code must be deterministic".into()));
    }
    check_image(aug, image)
}

fn check_sigma(code: &IndexCode, sigma: u32) -> Result<()> {
    if sigma as usize >= code.codewords() {
        return Err(out_of_range("sigma", sigma, "[0, 2^n̂)"));
    }
    Ok(())
}

/// All edge-message tuples with which every receiver decodes correctly, given
/// the source tuple `xs`.
pub fn decodable_set(image: &IndexImage, code: &IndexCode, xs: &[u32]) -> Result<Vec<Vec<u32>>> {
    code.check(image.instance())?;
    if !code.is_deterministic() {
        return Err(Error::Precondition("index code must be deterministic".into()));
    }
    if xs.len() != image.source_count() {
        return Err(Error::InvalidInstance(format!(
            "{} source values for {} sources",
            xs.len(),
            image.source_count()
        )));
    }
    let mut out = Vec::new();
    let mut msgs = xs.to_vec();
    table::for_each_tuple(&edge_sizes(image), |xe| {
        msgs.truncate(xs.len());
        msgs.extend(xe);
        let b = code.encode(&msgs, 0);
        if code.all_correct(image.instance(), &msgs, b) {
            out.push(xe.to_vec());
        }
    });
    Ok(out)
}

/// The deterministic network code obtained by fixing the broadcast to `sigma`
/// in every index decoder: edge receivers become edge encoders and vertex
/// receivers become destination decoders.
pub fn build_network_code_from_sigma(
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    sigma: u32,
) -> Result<NetworkCode> {
    check_part2(aug, image, code)?;
    check_sigma(code, sigma)?;
    let n = aug.instance();
    let ndest = image.destinations().len();
    // Index side information is origin messages then in-edge messages.
    let side = |ins: &[u32], x: &[u32]| -> Vec<u32> {
        let mut s = vec![sigma];
        s.extend(x);
        s.extend(ins);
        s
    };
    NetworkCode::from_fns(
        n,
        image.uses(),
        vec![Pmf::uniform(1)?; n.vertices().len()],
        |e, ins, x, _| code.decoders()[image.edge_receiver(e)].apply(&side(ins, x))[0],
        |v, ins, x| {
            let j = image.destinations().iter().position(|&d| d == v).expect("destination");
            debug_assert!(j < ndest);
            code.decoders()[j].apply(&side(ins, x))
        },
    )
}

/// `φ_σ(x_{S'})`: all edge values of `net` for the source tuple `xs`.
pub fn phi_sigma(aug: &AugmentedInstance, net: &NetworkCode, xs: &[u32]) -> Result<Vec<u32>> {
    let n = aug.instance();
    let order = topological_order(n)?;
    Ok(net.edge_values_in_order(n, &order, xs, &vec![0; n.vertices().len()]))
}

/// `|G_σ|`: source tuples for which `φ_σ` yields a correctly decoded
/// realization that broadcasts `sigma`.
pub fn good_count(aug: &AugmentedInstance, image: &IndexImage, code: &IndexCode, sigma: u32) -> Result<u64> {
    let net = build_network_code_from_sigma(aug, image, code, sigma)?;
    good_count_with(aug, image, code, &net, sigma)
}

fn good_count_with(
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    net: &NetworkCode,
    sigma: u32,
) -> Result<u64> {
    let n = aug.instance();
    let order = topological_order(n)?;
    let zeros = vec![0u32; n.vertices().len()];
    let sizes: Vec<usize> = n.messages().iter().map(|m| m.alphabet).collect();
    let mut count = 0;
    table::for_each_tuple(&sizes, |xs| {
        let mut msgs = xs.to_vec();
        msgs.extend(net.edge_values_in_order(n, &order, xs, &zeros));
        let b = code.encode(&msgs, 0);
        if b == sigma && code.all_correct(image.instance(), &msgs, b) {
            count += 1;
        }
    });
    Ok(count)
}

/// Per-broadcast-value diagnostics of [`select_sigma`].
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaScore {
    pub sigma: u32,
    /// `p_{X̂_b}(σ)`.
    pub probability: Rational,
    /// `|G^c_σ| / |X_{S'}|`.
    pub bad_fraction: Rational,
    /// Per eavesdropper, the bracketed leakage term of the objective.
    pub leakage_terms: Vec<f64>,
    pub objective: f64,
}

fn require_uniform(pmfs: &[Pmf]) -> Result<()> {
    if pmfs.iter().all(Pmf::is_uniform) {
        Ok(())
    } else {
        Err(Error::Hypothesis("messages must be uniformly distributed".into()))
    }
}

fn eavesdropper_sets(instance: &IndexInstance) -> Vec<(Vec<String>, Vec<String>)> {
    instance
        .eavesdroppers()
        .iter()
        .map(|r| (ids(instance, &r.targets), ids(instance, &r.side_info)))
        .collect()
}

/// Leakage term of one eavesdropper given `X̂_b = σ`:
/// `I(A; D | σ) − I(A; D | B, σ) + Σ_d p(d | σ) I(A; B | D = d, σ)`.
fn leakage_term(cond: &JointPmf, a: &[&str], b: &[&str]) -> Result<f64> {
    let d = [SUCCESS_VAR];
    let mut t = mutual_information(cond, a, &d)? - conditional_mutual_information(cond, a, &d, b)?;
    for v in 0..2u32 {
        let p = cond.probability(&[(SUCCESS_VAR, v)])?;
        if p > Rational::from_integer(0) {
            t += to_f64(&p) * mutual_information(&cond.condition(&[(SUCCESS_VAR, v)])?, a, b)?;
        }
    }
    Ok(t)
}

/// The broadcast value minimizing `|G^c_σ|/|X_{S'}|` plus the summed leakage
/// terms, among values of positive probability. Ties go to the smallest value.
pub fn select_sigma(
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    pmfs: &[Pmf],
) -> Result<(u32, Vec<SigmaScore>)> {
    check_part2(aug, image, code)?;
    image.instance().check_pmfs(pmfs)?;
    require_uniform(pmfs)?;
    let joint = index_joint(image.instance(), code, pmfs)?;
    let pb = joint.pmf_of(BROADCAST_VAR)?;
    let sets = eavesdropper_sets(image.instance());
    let total = image.source_alphabet();
    let mut scores = Vec::new();
    for sigma in 0..code.codewords() as u32 {
        let probability = pb.weight(sigma as usize);
        if probability == Rational::from_integer(0) {
            continue;
        }
        let cond = joint.condition(&[(BROADCAST_VAR, sigma)])?;
        let leakage_terms = sets
            .iter()
            .map(|(a, b)| leakage_term(&cond, &strs(a), &strs(b)))
            .collect::<Result<Vec<_>>>()?;
        let good = good_count(aug, image, code, sigma)?;
        let bad_fraction = Rational::new((total - good) as u128, total as u128);
        let objective = to_f64(&bad_fraction) + leakage_terms.iter().sum::<f64>();
        scores.push(SigmaScore {
            sigma,
            probability,
            bad_fraction,
            leakage_terms,
            objective,
        });
    }
    let best = scores
        .iter()
        .fold(None::<&SigmaScore>, |best, s| match best {
            Some(b) if b.objective <= s.objective + 1e-12 => Some(b),
            _ => Some(s),
        })
        .expect("some broadcast value has positive probability");
    Ok((best.sigma, scores))
}

// Bounds.

/// Which term of `ζ` attains the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaBranch {
    TotalVariation,
    Epsilon,
    One,
}

impl fmt::Display for ZetaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TotalVariation => "total-variation",
            Self::Epsilon => "epsilon",
            Self::One => "one",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zeta {
    pub value: f64,
    pub branch: ZetaBranch,
}

fn unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(out_of_range(name, v, "[0, 1]"))
    }
}

/// `ζ = min{ε(1 + 2δ), ε(1 + ε 2^n̂), 1}`.
pub fn zeta(eps: f64, nhat: u32, tv: f64) -> Result<f64> {
    zeta_with(eps, nhat, tv, DEFAULT_TV_COEFFICIENT).map(|z| z.value)
}

/// `ζ` with `coefficient` in place of 2 on the total-variation term.
pub fn zeta_with(eps: f64, nhat: u32, tv: f64, coefficient: f64) -> Result<Zeta> {
    unit("epsilon", eps)?;
    unit("tv", tv)?;
    if !(coefficient.is_finite() && coefficient >= 0.0) {
        return Err(out_of_range("tv coefficient", coefficient, "[0, ∞)"));
    }
    let candidates = [
        (eps * (1.0 + coefficient * tv), ZetaBranch::TotalVariation),
        (eps * (1.0 + eps * 2f64.powi(nhat as i32)), ZetaBranch::Epsilon),
        (1.0, ZetaBranch::One),
    ];
    let (value, branch) = candidates
        .into_iter()
        .fold((f64::INFINITY, ZetaBranch::One), |acc, c| if c.0 < acc.0 { c } else { acc });
    Ok(Zeta { value, branch })
}

/// Leakage ceiling `γ` of the backward translation for imperfect codes.
/// Returns `n̂` when `|R|η + ζ ≥ 1`.
pub fn gamma(eps: f64, eta: f64, r_count: usize, nhat: u32, log_source_alphabet: f64, zeta: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(out_of_range("epsilon", eps, "[0, 0.5]"));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(out_of_range("eta", eta, "[0, ∞)"));
    }
    if !(log_source_alphabet.is_finite() && log_source_alphabet >= 0.0) {
        return Err(out_of_range("log source alphabet", log_source_alphabet, "[0, ∞)"));
    }
    unit("zeta", zeta)?;
    let r = r_count as f64;
    let nhat = nhat as f64;
    let x = r * eta + zeta;
    if x >= 1.0 {
        return Ok(nhat);
    }
    let q = 1.0 - eps;
    let first = x * (1.0 / q + (std::f64::consts::LOG2_E + nhat) / (1.0 - x) + log_source_alphabet)
        + r * binary_entropy(eps)? / q
        - (1.0 - x).log2();
    Ok(first.min(nhat))
}

/// `γ′`: `γ` with `ζ = ε`.
pub fn gamma_prime(eps: f64, eta: f64, r_count: usize, nhat: u32, log_source_alphabet: f64) -> Result<f64> {
    gamma(eps, eta, r_count, nhat, log_source_alphabet, eps)
}

/// `δ(p_{X̂_b}, unif([2^n̂]))` measured from the code.
pub fn broadcast_total_variation(instance: &IndexInstance, code: &IndexCode, pmfs: &[Pmf]) -> Result<Rational> {
    let pb = index_joint(instance, code, pmfs)?.pmf_of(BROADCAST_VAR)?;
    total_variation(&pb, &Pmf::uniform(code.codewords())?)
}

// Leakage-difference lemma.

/// Both sides of the leakage-difference lemma and of its two supporting
/// entropy inequalities for one broadcast value and eavesdropper.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Check {
    /// `ε′ = 1 − |G_σ|/|X_{S'}|`.
    pub eps_prime: Rational,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub prop3_lhs: f64,
    pub prop3_rhs: f64,
    pub prop3_holds: bool,
    pub prop4_lhs: f64,
    pub prop4_rhs: f64,
    pub prop4_holds: bool,
}

/// Compares the network leakage of the code built from `sigma` with the index
/// leakage conditioned on correct decoding and broadcast `sigma`.
pub fn check_lemma1(
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    sigma: u32,
    r: usize,
) -> Result<Lemma1Check> {
    check_part2(aug, image, code)?;
    check_sigma(code, sigma)?;
    let n = aug.instance();
    let eve = n
        .eavesdroppers()
        .get(r)
        .ok_or_else(|| out_of_range("eavesdropper", r, "the eavesdropper list"))?;
    let net = build_network_code_from_sigma(aug, image, code, sigma)?;
    let total = image.source_alphabet();
    let good = good_count_with(aug, image, code, &net, sigma)?;
    if good == 0 {
        return Err(Error::Precondition(format!("no source tuple is decodable with broadcast {sigma}")));
    }
    let eps_prime = Rational::new((total - good) as u128, total as u128);
    let ep = to_f64(&eps_prime);

    let npmfs = n.uniform_pmfs();
    let nj = network_joint(n, &net, &npmfs)?;
    let na = ids_net(n, &eve.targets);
    let nb: Vec<String> = eve.taps.iter().map(|&e| edge_var(&n.edge_id(e))).collect();
    let (na, nb) = (strs(&na), strs(&nb));
    let n_hb = entropy(&nj, &nb)?;
    let n_hb_a = cond_entropy(&nj, &nb, &na)?;
    let lhs = mutual_information(&nj, &na, &nb)?;

    let ipmfs = image_pmfs(image, &npmfs)?;
    let ij = index_joint(image.instance(), code, &ipmfs)?.condition(&[(BROADCAST_VAR, sigma), (SUCCESS_VAR, 1)])?;
    let inst = image.instance();
    let ir = &inst.eavesdroppers()[r];
    let ia = ids(inst, &ir.targets);
    let ib = ids(inst, &ir.side_info);
    let (ia, ib) = (strs(&ia), strs(&ib));
    let i_hb = entropy(&ij, &ib)?;
    let i_hb_a = cond_entropy(&ij, &ib, &ia)?;
    let cond_mi = mutual_information(&ij, &ia, &ib)?;

    let log_x = (total as f64).log2();
    let prop3_rhs = ep * log_x - (1.0 - ep).log2();
    let prop4_rhs = ep / (1.0 - ep) * (std::f64::consts::LOG2_E + image.broadcast_bits() as f64);
    let rhs = cond_mi + prop3_rhs + prop4_rhs;
    let prop3_lhs = n_hb - i_hb;
    let prop4_lhs = i_hb_a - n_hb_a;
    Ok(Lemma1Check {
        eps_prime,
        lhs,
        rhs,
        holds: lhs <= rhs + EQ_TOL,
        prop3_lhs,
        prop3_rhs,
        prop3_holds: prop3_lhs <= prop3_rhs + EQ_TOL,
        prop4_lhs,
        prop4_rhs,
        prop4_holds: prop4_lhs <= prop4_rhs + EQ_TOL,
    })
}

fn ids_net(n: &NetworkInstance, set: &[usize]) -> Vec<String> {
    set.iter().map(|&s| n.messages()[s].id.clone()).collect()
}

/// `H(B | A) = H(A, B) − H(A)`.
fn cond_entropy(p: &JointPmf, b: &[&str], a: &[&str]) -> Result<f64> {
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok((entropy(p, &ab)? - entropy(p, a)?).max(0.0))
}

// Clause verification.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    /// Index code to network code, equal error and leakage.
    Thm1Fwd,
    /// Network code to index code on the same mapped pair.
    Thm1Bwd,
    /// Deterministic network code to index code on the image of an augmented instance.
    Thm2P1,
    /// Zero-error index code back to a network code.
    Thm2P2a,
    /// Imperfect index code back to a network code.
    Thm2P2b,
    /// Linear index code back to a network code.
    Cor1,
}

impl Clause {
    pub const ALL: [Clause; 6] = [
        Clause::Thm1Fwd,
        Clause::Thm1Bwd,
        Clause::Thm2P1,
        Clause::Thm2P2a,
        Clause::Thm2P2b,
        Clause::Cor1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Clause::Thm1Fwd => "thm1_fwd",
            Clause::Thm1Bwd => "thm1_bwd",
            Clause::Thm2P1 => "thm2_p1",
            Clause::Thm2P2a => "thm2_p2a",
            Clause::Thm2P2b => "thm2_p2b",
            Clause::Cor1 => "cor1",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Clause {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Clause::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown clause `{s}`")))
    }
}

/// The inputs a clause translates and evaluates.
#[derive(Clone, Copy, Debug)]
pub enum VerifyInput<'a> {
    /// An index code; the network is mapped over `uses` channel uses with a
    /// broadcast edge of exactly `n̂` bits.
    Index {
        index: &'a IndexInstance,
        code: &'a IndexCode,
        pmfs: &'a [Pmf],
        uses: u32,
    },
    /// A network code on the image of `index`.
    MappedNetwork {
        index: &'a IndexInstance,
        network: &'a NetworkInstance,
        code: &'a NetworkCode,
        pmfs: &'a [Pmf],
    },
    /// A deterministic code on an augmented instance; `pmfs` cover all of its
    /// messages, key messages included.
    Augmented {
        aug: &'a AugmentedInstance,
        code: &'a NetworkCode,
        pmfs: &'a [Pmf],
    },
    /// A deterministic index code on the image of an augmented instance.
    /// Messages are uniform.
    Image {
        aug: &'a AugmentedInstance,
        image: &'a IndexImage,
        code: &'a IndexCode,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Broadcast value to use instead of the selected one.
    pub sigma: Option<u32>,
    pub tv_coefficient: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            sigma: None,
            tv_coefficient: DEFAULT_TV_COEFFICIENT,
        }
    }
}

/// One inequality or equality the clause asserts, with its evaluated sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Check {
    fn new(name: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds,
        }
    }

    fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::new(name, lhs, rhs, lhs <= rhs + tol)
    }

    fn eq(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, (lhs - rhs).abs() <= EQ_TOL)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationReport {
    pub clause: Clause,
    pub eavesdroppers: Vec<String>,
    pub source_error: Rational,
    pub source_leakage: Vec<f64>,
    pub target_error: Rational,
    pub target_leakage: Vec<f64>,
    pub broadcast_bits: Option<u32>,
    pub chosen_sigma: Option<u32>,
    pub total_variation: Option<Rational>,
    pub zeta: Option<Zeta>,
    pub gamma: Option<f64>,
    pub gamma_prime: Option<f64>,
    pub checks: Vec<Check>,
    pub satisfied: bool,
}

impl TranslationReport {
    fn new(clause: Clause, eavesdroppers: Vec<String>) -> Self {
        Self {
            clause,
            eavesdroppers,
            source_error: Rational::from_integer(0),
            source_leakage: Vec::new(),
            target_error: Rational::from_integer(0),
            target_leakage: Vec::new(),
            broadcast_bits: None,
            chosen_sigma: None,
            total_variation: None,
            zeta: None,
            gamma: None,
            gamma_prime: None,
            checks: Vec::new(),
            satisfied: false,
        }
    }

    fn finish(mut self) -> Self {
        self.satisfied = self.checks.iter().all(|c| c.holds);
        self
    }

    fn equal_numbers(&mut self, error_exact: bool) {
        let (s, t) = (to_f64(&self.source_error), to_f64(&self.target_error));
        self.checks.push(if error_exact {
            Check::new("error equal", t, s, self.source_error == self.target_error)
        } else {
            Check::new("error not larger", t, s, self.target_error <= self.source_error)
        });
        for (k, (a, b)) in self.target_leakage.iter().zip(&self.source_leakage).enumerate() {
            self.checks.push(Check::eq(format!("leakage equal [{}]", self.eavesdroppers[k]), *a, *b));
        }
    }
}

fn max_or_zero(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn clause_input_mismatch(clause: Clause) -> Error {
    Error::InvalidInstance(format!("clause {clause} does not take this kind of input"))
}

/// Runs the translation a clause is about, evaluates both codes and fills the
/// report. Hypothesis violations are errors.
pub fn verify_clause(clause: Clause, input: VerifyInput<'_>, options: &VerifyOptions) -> Result<TranslationReport> {
    match (clause, input) {
        (Clause::Thm1Fwd, VerifyInput::Index { index, code, pmfs, uses }) => {
            let nhat = code.broadcast_bits();
            let network = crate::instance_mapping::index_to_network_with(
                index,
                uses,
                crate::network_model::Capacity::new(nhat as u64, uses as u64),
            )?;
            let net = translate_i2n(index, code, &network, uses)?;
            let src = index_joint(index, code, pmfs)?;
            let dst = network_joint(&network, &net, pmfs)?;
            let mut rep = TranslationReport::new(clause, eve_names(index));
            rep.source_error = src.probability(&[(SUCCESS_VAR, 0)])?;
            rep.source_leakage = index_leakage_from_joint(index, &src)?;
            rep.target_error = dst.probability(&[(SUCCESS_VAR, 0)])?;
            rep.target_leakage = network_leakage_from_joint(&network, &dst)?;
            rep.broadcast_bits = Some(nhat);
            rep.equal_numbers(true);
            Ok(rep.finish())
        }
        (Clause::Thm1Bwd, VerifyInput::MappedNetwork { index, network, code, pmfs }) => {
            let ic = translate_n2i(index, network, code, pmfs)?;
            let src = network_joint(network, code, pmfs)?;
            let dst = index_joint(index, &ic, pmfs)?;
            let mut rep = TranslationReport::new(clause, eve_names(index));
            rep.source_error = src.probability(&[(SUCCESS_VAR, 0)])?;
            rep.source_leakage = network_leakage_from_joint(network, &src)?;
            rep.target_error = dst.probability(&[(SUCCESS_VAR, 0)])?;
            rep.target_leakage = index_leakage_from_joint(index, &dst)?;
            rep.broadcast_bits = Some(ic.broadcast_bits());
            rep.equal_numbers(false);
            Ok(rep.finish())
        }
        (Clause::Thm2P1, VerifyInput::Augmented { aug, code, pmfs }) => {
            let image = network_to_index(aug, code.uses())?;
            let ic = translate_n2i_code(aug, code, &image)?;
            let n = aug.instance();
            let src = network_joint(n, code, pmfs)?;
            let ipmfs = image_pmfs(&image, pmfs)?;
            let dst = index_joint(image.instance(), &ic, &ipmfs)?;
            let mut rep = TranslationReport::new(clause, eve_names(image.instance()));
            rep.source_error = src.probability(&[(SUCCESS_VAR, 0)])?;
            rep.source_leakage = network_leakage_from_joint(n, &src)?;
            rep.target_error = dst.probability(&[(SUCCESS_VAR, 0)])?;
            rep.target_leakage = index_leakage_from_joint(image.instance(), &dst)?;
            rep.broadcast_bits = Some(image.broadcast_bits());
            rep.equal_numbers(true);
            Ok(rep.finish())
        }
        (Clause::Thm2P2a | Clause::Thm2P2b | Clause::Cor1, VerifyInput::Image { aug, image, code }) => {
            verify_part2(clause, aug, image, code, options)
        }
        _ => Err(clause_input_mismatch(clause)),
    }
}

fn eve_names(index: &IndexInstance) -> Vec<String> {
    index.eavesdroppers().iter().map(|r| r.id.clone()).collect()
}

/// Error and per-eavesdropper leakage of the network code built from `sigma`
/// under uniform messages.
pub fn evaluate_sigma(
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    sigma: u32,
) -> Result<(Rational, Vec<f64>)> {
    let net = build_network_code_from_sigma(aug, image, code, sigma)?;
    let n = aug.instance();
    let j = network_joint(n, &net, &n.uniform_pmfs())?;
    Ok((j.probability(&[(SUCCESS_VAR, 0)])?, network_leakage_from_joint(n, &j)?))
}

fn verify_part2(
    clause: Clause,
    aug: &AugmentedInstance,
    image: &IndexImage,
    code: &IndexCode,
    options: &VerifyOptions,
) -> Result<TranslationReport> {
    check_part2(aug, image, code)?;
    if let Some(s) = options.sigma {
        check_sigma(code, s)?;
    }
    let inst = image.instance();
    let pmfs = inst.uniform_pmfs();
    let src = index_joint(inst, code, &pmfs)?;
    let mut rep = TranslationReport::new(clause, eve_names(inst));
    rep.source_error = src.probability(&[(SUCCESS_VAR, 0)])?;
    rep.source_leakage = index_leakage_from_joint(inst, &src)?;
    let nhat = code.broadcast_bits();
    rep.broadcast_bits = Some(nhat);
    let eps = to_f64(&rep.source_error);
    let eta = max_or_zero(&rep.source_leakage);
    let r_count = inst.eavesdroppers().len();
    let log_x = (image.source_alphabet() as f64).log2();
    let tv = total_variation(&src.pmf_of(BROADCAST_VAR)?, &Pmf::uniform(code.codewords())?)?;
    rep.total_variation = Some(tv);

    match clause {
        Clause::Thm2P2a => {
            if rep.source_error != Rational::from_integer(0) {
                return Err(Error::Hypothesis("index code must decode without error".into()));
            }
            let evals = (0..code.codewords() as u32)
                .map(|s| evaluate_sigma(aug, image, code, s))
                .collect::<Result<Vec<_>>>()?;
            let worst = evals.iter().map(|(e, _)| *e).max().expect("at least one codeword");
            rep.checks.push(Check::new(
                "every sigma decodes without error",
                to_f64(&worst),
                0.0,
                worst == Rational::from_integer(0),
            ));
            let within = evals.iter().position(|(_, l)| l.iter().all(|&x| x <= eta + EQ_TOL));
            if options.sigma.is_none() && within.is_none() {
                rep.checks.push(Check::new("some sigma within eta", 1.0, 0.0, false));
            }
            let sigma = options.sigma.or(within.map(|s| s as u32)).unwrap_or(0);
            let (err, leak) = evals[sigma as usize].clone();
            rep.chosen_sigma = Some(sigma);
            rep.target_error = err;
            rep.target_leakage = leak;
            for (name, &l) in rep.eavesdroppers.iter().zip(&rep.target_leakage) {
                rep.checks.push(Check::le(format!("leakage [{name}] <= eta"), l, eta, EQ_TOL));
            }
        }
        Clause::Thm2P2b | Clause::Cor1 => {
            if clause == Clause::Thm2P2b && !(eps > 0.0 && eps <= 0.5) {
                return Err(Error::Hypothesis(format!("measured error {eps} is outside (0, 0.5]")));
            }
            if clause == Clause::Cor1 {
                if eps > 0.5 {
                    return Err(Error::Hypothesis(format!("measured error {eps} exceeds 0.5")));
                }
                if !code.is_gf2_linear(inst) {
                    return Err(Error::Hypothesis("index code is not linear over GF(2)".into()));
                }
                if tv != Rational::from_integer(0) {
                    return Err(Error::Hypothesis("broadcast of the linear code is not uniform".into()));
                }
            }
            let z = zeta_with(eps, nhat, to_f64(&tv), options.tv_coefficient)?;
            rep.zeta = Some(z);
            rep.gamma = Some(gamma(eps, eta, r_count, nhat, log_x, z.value)?);
            rep.gamma_prime = Some(gamma_prime(eps, eta, r_count, nhat, log_x)?);
            let sigma = match options.sigma {
                Some(s) => s,
                None => select_sigma(aug, image, code, &pmfs)?.0,
            };
            let (err, leak) = evaluate_sigma(aug, image, code, sigma)?;
            rep.chosen_sigma = Some(sigma);
            rep.target_error = err;
            rep.target_leakage = leak;
            let (err_bound, leak_bound, name) = if clause == Clause::Thm2P2b {
                (r_count as f64 * eta + z.value, rep.gamma.unwrap(), "gamma")
            } else {
                (r_count as f64 * eta + eps, rep.gamma_prime.unwrap(), "gamma'")
            };
            rep.checks.push(Check::le("error <= |R| eta + bound", to_f64(&rep.target_error), err_bound, EQ_TOL));
            for (eve, &l) in rep.eavesdroppers.iter().zip(&rep.target_leakage) {
                rep.checks.push(Check::le(format!("leakage [{eve}] <= {name}"), l, leak_bound, BOUND_TOL));
            }
        }
        _ => unreachable!("part 2 clauses only"),
    }
    Ok(rep.finish())
}
