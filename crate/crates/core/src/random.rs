//! Seeded generators of small instances and codes for randomized checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::code_translation::translate_n2i_code;
use crate::error::Result;
use crate::index_model::{eval_index_error, IndexCode, IndexEavesdropper, IndexInstance, Message, Receiver};
use crate::instance_mapping::{index_to_network_with, network_to_index, IndexImage};
use crate::network_model::{
    augment, network_joint, AugmentedInstance, Capacity, Edge, NetworkCode, NetworkEavesdropper,
    NetworkInstance, NetworkMessage,
};
use crate::probinfo::{Pmf, Rational};
use crate::table::{self, Table};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A pmf with small integer weights in `1..=3`.
pub fn random_pmf(rng: &mut Rng64, size: usize) -> Pmf {
    let w: Vec<u128> = (0..size).map(|_| rng.gen_range(1..=3)).collect();
    let total: u128 = w.iter().sum();
    Pmf::new(w.into_iter().map(|x| Rational::new(x, total)).collect()).expect("positive weights")
}

/// Uniform half the time, random otherwise; size 1 is always the point mass.
fn random_key(rng: &mut Rng64, size: usize) -> Pmf {
    if size == 1 || rng.gen_bool(0.5) {
        Pmf::uniform(size).expect("positive size")
    } else {
        random_pmf(rng, size)
    }
}

pub fn random_table(rng: &mut Rng64, domain: Vec<usize>, codomain: Vec<usize>) -> Result<Table> {
    let len = table::product(&domain).unwrap_or(0);
    let out = table::product(&codomain).unwrap_or(1);
    let entries = (0..len).map(|_| rng.gen_range(0..out)).collect();
    Table::new(domain, codomain, entries)
}

/// Encoder with `n̂ ∈ 1..=max_bits` and a key of size `1..=max_key`; decoders
/// are MAP decoders half the time and arbitrary tables otherwise.
pub fn random_index_code(
    rng: &mut Rng64,
    instance: &IndexInstance,
    pmfs: &[Pmf],
    max_bits: u32,
    max_key: usize,
) -> Result<IndexCode> {
    let bits = rng.gen_range(1..=max_bits);
    let key_size = rng.gen_range(1..=max_key);
    let key = random_key(rng, key_size);
    let mut domain = instance.alphabets();
    domain.push(key_size);
    let encoder = random_table(rng, domain, vec![1 << bits])?;
    let decoders = instance
        .receivers()
        .iter()
        .map(|t| {
            let mut d = vec![1usize << bits];
            d.extend(instance.sizes_of(&t.has));
            random_table(rng, d, instance.sizes_of(&t.wants))
        })
        .collect::<Result<Vec<_>>>()?;
    let code = IndexCode::new(instance, bits, key, encoder, decoders)?;
    if rng.gen_bool(0.5) {
        code.with_map_decoders(instance, pmfs)
    } else {
        Ok(code)
    }
}

/// Replaces every destination decoder by a MAP decoder under `pmfs`; ties go
/// to the smallest output tuple.
pub fn with_map_network_decoders(n: &NetworkInstance, code: &NetworkCode, pmfs: &[Pmf]) -> Result<NetworkCode> {
    let joint = network_joint(n, code, pmfs)?;
    let mut decoders = code.decoders().to_vec();
    for (v, slot) in code.decoders().iter().enumerate() {
        let Some(old) = slot else { continue };
        let mut cols: Vec<usize> = Vec::new();
        for e in n.in_edges(v) {
            cols.push(joint.column(&crate::network_model::edge_var(&n.edge_id(e)))?);
        }
        for s in n.origin_messages(v) {
            cols.push(joint.column(&n.messages()[s].id)?);
        }
        let want: Vec<usize> = n
            .demanded_at(v)
            .iter()
            .map(|&s| joint.column(&n.messages()[s].id))
            .collect::<Result<_>>()?;
        let (din, dout) = (old.domain().to_vec(), old.codomain().to_vec());
        let rows = table::product(&din).expect("checked") as usize;
        let outs = table::product(&dout).expect("checked") as usize;
        let mut tally = vec![Rational::from_integer(0); rows * outs];
        for (x, w) in joint.iter() {
            let input: Vec<u32> = cols.iter().map(|&c| x[c]).collect();
            let output: Vec<u32> = want.iter().map(|&c| x[c]).collect();
            let i = table::encode(&input, &din) as usize * outs + table::encode(&output, &dout) as usize;
            tally[i] += w;
        }
        let entries = (0..rows)
            .map(|r| {
                let row = &tally[r * outs..(r + 1) * outs];
                (0..outs).fold(0, |b, o| if row[o] > row[b] { o } else { b }) as u64
            })
            .collect();
        decoders[v] = Some(Table::new(din, dout, entries)?);
    }
    NetworkCode::new(n, code.uses(), code.keys().to_vec(), code.encoders().to_vec(), decoders)
}

/// XOR of a random nonempty subset of the inputs, reduced into the output
/// alphabet. The last input, the key slot, is included less often.
fn random_xor_table(rng: &mut Rng64, domain: Vec<usize>, out: usize) -> Result<Table> {
    let mask: Vec<bool> = loop {
        let last = domain.len().saturating_sub(1);
        let m: Vec<bool> = (0..domain.len()).map(|i| rng.gen_bool(if i == last { 0.25 } else { 0.5 })).collect();
        if domain.is_empty() || m.contains(&true) {
            break m;
        }
    };
    Table::from_fn(domain, vec![out], |x| {
        let v = x.iter().zip(&mask).filter(|p| *p.1).fold(0, |acc, p| acc ^ p.0);
        vec![v % out as u32]
    })
}

/// Encoders under the given keys, arbitrary tables or XORs of inputs with
/// equal odds; MAP decoders half the time.
pub fn random_network_code(rng: &mut Rng64, n: &NetworkInstance, uses: u32, keys: Vec<Pmf>) -> Result<NetworkCode> {
    let xor = rng.gen_bool(0.5);
    let encoders = (0..n.edges().len())
        .map(|e| {
            let mut d = n.encoder_inputs(e, uses)?;
            d.push(keys[n.edges()[e].tail].support_size());
            let out = n.edge_alphabet(e, uses)?;
            if xor {
                random_xor_table(rng, d, out)
            } else {
                random_table(rng, d, vec![out])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let decoders = (0..n.vertices().len())
        .map(|v| {
            let out = n.decoder_outputs(v);
            if out.is_empty() {
                Ok(None)
            } else {
                random_table(rng, n.decoder_inputs(v, uses)?, out).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let code = NetworkCode::new(n, uses, keys, encoders, decoders)?;
    if rng.gen_bool(0.5) {
        with_map_network_decoders(n, &code, &n.uniform_pmfs())
    } else {
        Ok(code)
    }
}

/// The image of `index` with a broadcast edge of `1..=3` bits, and a code on
/// it whose randomness sits at vertices `1` and `2` only.
pub fn random_i2n_network(rng: &mut Rng64, index: &IndexInstance) -> Result<(NetworkInstance, NetworkCode)> {
    let bits = rng.gen_range(1..=3u64);
    let net = index_to_network_with(index, 1, Capacity::from_integer(bits))?;
    let hub = net.vertex_index(crate::instance_mapping::HUB).expect("hub");
    let relay = net.vertex_index(crate::instance_mapping::RELAY).expect("relay");
    let mut keys = vec![Pmf::uniform(1)?; net.vertices().len()];
    let hub_key = rng.gen_range(1..=2);
    keys[hub] = random_key(rng, hub_key);
    let relay_key = rng.gen_range(1..=2);
    keys[relay] = random_key(rng, relay_key);
    let code = random_network_code(rng, &net, 1, keys)?;
    Ok((net, code))
}

/// Vertices other than `from` reachable over edges carrying at least one bit.
fn reachable(nv: usize, edges: &[Edge], from: usize) -> Vec<usize> {
    let mut seen = vec![false; nv];
    seen[from] = true;
    // Edges point forward, so one pass in tail order suffices.
    for v in from..nv {
        if seen[v] {
            for e in edges.iter().filter(|e| e.tail == v && e.capacity >= Capacity::from_integer(1)) {
                seen[e.head] = true;
            }
        }
    }
    (0..nv).filter(|&v| v != from && seen[v]).collect()
}

/// A DAG on 2 to 4 vertices with at most 4 forward edges of capacity 0, 1/2
/// or 1 at one use, 1 or 2 binary messages with at least one destination
/// each (reachable ones when any exist), and up to 2 eavesdroppers.
pub fn random_dag(rng: &mut Rng64) -> Result<NetworkInstance> {
    let nv = rng.gen_range(2..=4usize);
    let vertices: Vec<String> = (1..=nv).map(|i| i.to_string()).collect();
    let ne = rng.gen_range(1..=4usize);
    let mut edges: Vec<Edge> = Vec::new();
    for _ in 0..ne {
        let tail = rng.gen_range(0..nv - 1);
        let head = rng.gen_range(tail + 1..nv);
        let label = edges.iter().filter(|e| e.tail == tail && e.head == head).count() as u32;
        let capacity = *[
            Capacity::from_integer(1),
            Capacity::from_integer(1),
            Capacity::from_integer(1),
            Capacity::new(1, 2),
            Capacity::from_integer(0),
        ]
            .choose(rng)
            .expect("nonempty");
        edges.push(Edge {
            tail,
            head,
            label,
            capacity,
        });
    }
    let nm = rng.gen_range(1..=2usize);
    let messages = (0..nm)
        .map(|i| {
            let origin = rng.gen_range(0..nv);
            let reach = reachable(nv, &edges, origin);
            let others: Vec<usize> = if reach.is_empty() {
                (0..nv).filter(|&v| v != origin).collect()
            } else {
                reach
            };
            let k = rng.gen_range(1..=others.len());
            let mut destinations: Vec<usize> = others.choose_multiple(rng, k).copied().collect();
            destinations.sort_unstable();
            NetworkMessage {
                id: format!("m{}", i + 1),
                alphabet: 2,
                origin,
                destinations,
            }
        })
        .collect();
    let nr = rng.gen_range(0..=2usize);
    let eavesdroppers = (0..nr)
        .map(|i| {
            let kt = rng.gen_range(1..=nm);
            let mut targets: Vec<usize> = (0..nm).collect::<Vec<_>>().choose_multiple(rng, kt).copied().collect();
            targets.sort_unstable();
            let kb = rng.gen_range(1..=edges.len());
            let mut taps: Vec<usize> = (0..edges.len()).collect::<Vec<_>>().choose_multiple(rng, kb).copied().collect();
            taps.sort_unstable();
            NetworkEavesdropper {
                id: format!("r{}", i + 1),
                targets,
                taps,
            }
        })
        .collect();
    NetworkInstance::new(vertices, edges, messages, eavesdroppers)
}

/// A random DAG with a random code (keys of size 1 or 2 at each vertex,
/// MAP decoders three times in four), augmented into a deterministic code,
/// together with the index image at one use.
pub fn random_augmented(rng: &mut Rng64) -> Result<(AugmentedInstance, NetworkCode, IndexImage)> {
    let n = random_dag(rng)?;
    let keys = (0..n.vertices().len())
        .map(|_| {
            let size = if rng.gen_bool(0.5) { 2 } else { 1 };
            random_key(rng, size)
        })
        .collect();
    let mut code = random_network_code(rng, &n, 1, keys)?;
    if rng.gen_bool(0.5) {
        code = with_map_network_decoders(&n, &code, &n.uniform_pmfs())?;
    }
    let (aug, det) = augment(&n, &code)?;
    let image = network_to_index(&aug, 1)?;
    Ok((aug, det, image))
}

/// Perturbs decoder entries of `code` one at a time until the error under
/// uniform messages lies in `(0, max_error]`, restarting whenever it
/// overshoots. Gives up after `tries` perturbations.
pub fn perturb_to_imperfect(
    rng: &mut Rng64,
    instance: &IndexInstance,
    code: &IndexCode,
    max_error: &Rational,
    tries: usize,
) -> Result<Option<IndexCode>> {
    let pmfs = instance.uniform_pmfs();
    let zero = Rational::from_integer(0);
    let mut cur = code.clone();
    for _ in 0..tries {
        let err = eval_index_error(instance, &cur, &pmfs)?;
        if err > zero && err <= *max_error {
            return Ok(Some(cur));
        }
        if err > *max_error {
            cur = code.clone();
        }
        let mut decoders = cur.decoders().to_vec();
        let j = rng.gen_range(0..decoders.len());
        let t = &decoders[j];
        let out = table::product(t.codomain()).expect("checked");
        if out < 2 {
            continue;
        }
        let mut entries = t.entries().to_vec();
        let row = rng.gen_range(0..entries.len());
        entries[row] = (entries[row] + rng.gen_range(1..out)) % out;
        decoders[j] = Table::new(t.domain().to_vec(), t.codomain().to_vec(), entries)?;
        cur = IndexCode::new(instance, cur.broadcast_bits(), cur.key().clone(), cur.encoder().clone(), decoders)?;
    }
    Ok(None)
}

/// An imperfect deterministic index code on the image of a random augmented
/// DAG: the translated network code, with decoders perturbed until the error
/// lies in `(0, max_error]`.
pub fn random_imperfect_image_code(
    rng: &mut Rng64,
    max_error: &Rational,
) -> Result<(AugmentedInstance, IndexImage, IndexCode)> {
    loop {
        let (aug, det, image) = random_augmented(rng)?;
        if image.instance().receivers().is_empty() || image.broadcast_bits() == 0 {
            continue;
        }
        let base = translate_n2i_code(&aug, &det, &image)?;
        if let Some(code) = perturb_to_imperfect(rng, image.instance(), &base, max_error, 64)? {
            return Ok((aug, image, code));
        }
    }
}

/// A GF(2)-linear deterministic index code on the image of a random
/// augmented DAG with error at most `max_error`; decoders are perturbed half
/// the time.
pub fn random_linear_image_code(
    rng: &mut Rng64,
    max_error: &Rational,
) -> Result<(AugmentedInstance, IndexImage, IndexCode)> {
    loop {
        let (aug, det, image) = random_augmented(rng)?;
        let inst = image.instance();
        let code = translate_n2i_code(&aug, &det, &image)?;
        if !code.is_gf2_linear(inst) || eval_index_error(inst, &code, &inst.uniform_pmfs())? > *max_error {
            continue;
        }
        if rng.gen_bool(0.5) && !inst.receivers().is_empty() {
            if let Some(c) = perturb_to_imperfect(rng, inst, &code, max_error, 64)? {
                return Ok((aug, image, c));
            }
        }
        return Ok((aug, image, code));
    }
}

/// A full-rank GF(2) encoder over the concatenated bits of binary messages,
/// with `bits` rows, and MAP decoders.
pub fn random_linear_index_code(rng: &mut Rng64, instance: &IndexInstance, bits: u32) -> Result<IndexCode> {
    let k = instance.messages().len();
    let rows = loop {
        let rows: Vec<u32> = (0..bits).map(|_| rng.gen_range(1..1u32 << k)).collect();
        if gf2_rank(&rows) == bits as usize {
            break rows;
        }
    };
    let enc = |x: &[u32]| {
        let v = x.iter().fold(0u32, |acc, &b| acc << 1 | b);
        rows.iter().fold(0u32, |acc, &r| acc << 1 | ((r & v).count_ones() & 1))
    };
    let code = IndexCode::from_fns(instance, bits, Pmf::uniform(1)?, |x, _| enc(x), |j, _, _| {
        vec![0; instance.receivers()[j].wants.len()]
    })?;
    code.with_map_decoders(instance, &instance.uniform_pmfs())
}

fn gf2_rank(rows: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &r in rows {
        let v = basis.iter().fold(r, |v, &b| v.min(v ^ b));
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

/// A random index instance with `k` binary messages, receivers that each want
/// one or two messages and know some others, and one eavesdropper.
pub fn random_index_instance(rng: &mut Rng64, k: usize) -> Result<IndexInstance> {
    let messages = (1..=k).map(|i| Message::new(i.to_string(), 2)).collect();
    let nrx = rng.gen_range(1..=3usize);
    let receivers = (0..nrx)
        .map(|j| {
            let mut all: Vec<usize> = (0..k).collect();
            all.shuffle(rng);
            let w = rng.gen_range(1..=2.min(k));
            let h = rng.gen_range(0..=k - w);
            let mut wants = all[..w].to_vec();
            let mut has = all[w..w + h].to_vec();
            wants.sort_unstable();
            has.sort_unstable();
            Receiver {
                id: format!("t{}", j + 1),
                wants,
                has,
            }
        })
        .collect();
    let mut all: Vec<usize> = (0..k).collect();
    all.shuffle(rng);
    let split = rng.gen_range(1..=k);
    let mut targets = all[..split].to_vec();
    let mut side_info = all[split..].to_vec();
    side_info.truncate(rng.gen_range(0..=side_info.len()));
    targets.sort_unstable();
    side_info.sort_unstable();
    IndexInstance::new(
        messages,
        receivers,
        vec![IndexEavesdropper {
            id: "r".into(),
            targets,
            side_info,
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1_index;
    use crate::network_model::eval_network_error;

    #[test]
    fn generators_are_seed_stable() {
        let idx = fig1_index();
        let pmfs = idx.uniform_pmfs();
        let a = random_index_code(&mut rng(3), &idx, &pmfs, 3, 2).unwrap();
        let b = random_index_code(&mut rng(3), &idx, &pmfs, 3, 2).unwrap();
        assert_eq!(a, b);
        let a = random_dag(&mut rng(9)).unwrap();
        let b = random_dag(&mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn map_decoders_never_hurt() {
        let mut r = rng(1);
        for _ in 0..20 {
            let n = random_dag(&mut r).unwrap();
            let keys = vec![Pmf::uniform(1).unwrap(); n.vertices().len()];
            let code = random_network_code(&mut r, &n, 1, keys).unwrap();
            let pmfs = n.uniform_pmfs();
            let map = with_map_network_decoders(&n, &code, &pmfs).unwrap();
            assert!(eval_network_error(&n, &map, &pmfs).unwrap() <= eval_network_error(&n, &code, &pmfs).unwrap());
        }
    }

    #[test]
    fn linear_codes_are_linear() {
        let idx = fig1_index();
        let mut r = rng(5);
        for bits in 1..=4 {
            let c = random_linear_index_code(&mut r, &idx, bits).unwrap();
            assert!(c.is_gf2_linear(&idx));
        }
    }

    #[test]
    fn linear_image_codes_are_linear() {
        let mut r = rng(4);
        for _ in 0..5 {
            let (_, image, code) = random_linear_image_code(&mut r, &Rational::new(1, 2)).unwrap();
            assert!(code.is_gf2_linear(image.instance()));
        }
    }

    #[test]
    fn imperfect_codes_have_error_in_range() {
        let mut r = rng(2);
        for _ in 0..5 {
            let (_, image, code) = random_imperfect_image_code(&mut r, &Rational::new(1, 2)).unwrap();
            let e = eval_index_error(image.instance(), &code, &image.instance().uniform_pmfs()).unwrap();
            assert!(e > Rational::from_integer(0) && e <= Rational::new(1, 2));
        }
    }
}
