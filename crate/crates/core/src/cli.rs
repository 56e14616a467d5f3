//! The `sce` command line: file mappings, translations, evaluation, bound
//! calculation and randomized verification.
//!
//! Exit status is 0 when everything checked holds, 1 when a verification or
//! feasibility check fails, and 2 on input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info};
use rand::Rng;
use serde::Serialize;

use crate::code_translation::{
    broadcast_total_variation, check_lemma1, decodable_set, gamma, gamma_prime, good_count, select_sigma,
    translate_i2n, translate_n2i, translate_n2i_code, build_network_code_from_sigma, verify_clause, zeta_with,
    Clause, TranslationReport, VerifyInput, VerifyOptions, DEFAULT_TV_COEFFICIENT,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::format::{
    parse_capacity, parse_document, parse_rational, write_document, write_evaluation, write_report, write_toml,
    Document, ImageMeta, IndexDocument, NetworkDocument,
};
use crate::index_model::{
    eval_index_error, eval_index_leakage, index_joint, index_leakage_from_joint, IndexCode, IndexInstance, SUCCESS_VAR,
};
use crate::instance_mapping::{image_pmfs, index_to_network_with, network_to_index, IndexImage};
use crate::network_model::{
    augment, augment_deterministic, network_joint, network_leakage_from_joint, AugmentedInstance, Capacity,
};
use crate::probinfo::{to_f64, Rational};
use crate::random::{self, Rng64};
use crate::table;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "sce", version, about = "Secure index and network coding: mappings, code translations and exact verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapDirection {
    /// Index instance to network instance.
    I2n,
    /// Network instance to index instance.
    N2i,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TranslateDirection {
    /// Index code to a code on the mapped network.
    I2n,
    /// Code on a mapped network back to an index code (needs --index).
    N2i,
    /// Deterministic code on an augmented network to an index code on its image.
    N2iAug,
    /// Index code on the image of an augmented network back to a network code (needs --network).
    I2nAug,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Fig1,
    Fig2,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map an instance file to the other problem class.
    Map {
        direction: MapDirection,
        input: PathBuf,
        /// Channel uses.
        #[arg(long = "n", default_value_t = 1)]
        uses: u32,
        /// Capacity of `1->2` and every `2->t_j` for i2n (default: n̂/n when the file has a code, else 1).
        #[arg(long)]
        bottleneck: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Turn every vertex key of a network code into a message.
    Augment {
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Translate a code and report both sides of the translation.
    Translate {
        direction: TranslateDirection,
        input: PathBuf,
        /// Channel uses for i2n.
        #[arg(long = "n", default_value_t = 1)]
        uses: u32,
        /// Index instance the network was mapped from (n2i).
        #[arg(long)]
        index: Option<PathBuf>,
        /// Augmented network the index instance was mapped from (i2n-aug).
        #[arg(long)]
        network: Option<PathBuf>,
        /// Broadcast value to fix instead of the selected one (i2n-aug).
        #[arg(long)]
        sigma: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_TV_COEFFICIENT)]
        tv_coefficient: f64,
        /// Where to write the translated code; the report goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Error probability and leakage of a code, optionally against targets.
    Evaluate {
        input: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Randomized checks of a translation clause, lemma1 or prop1.
    Verify {
        clause: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        /// Largest error of generated codes for thm2_p2b and cor1, in (0, 0.5].
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        sigma: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_TV_COEFFICIENT)]
        tv_coefficient: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ζ, γ and γ′ from parameters, or measured from an index code file.
    Bounds {
        input: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        eavesdroppers: Option<usize>,
        #[arg(long)]
        nhat: Option<u32>,
        /// log2 of the source alphabet size.
        #[arg(long)]
        log_source: Option<f64>,
        #[arg(long)]
        tv: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TV_COEFFICIENT)]
        tv_coefficient: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command; returns the exit status.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn read_index(path: &Path) -> Result<IndexDocument> {
    match read(path)? {
        Document::Index(d) => Ok(d),
        Document::Network(_) => Err(Error::InvalidInstance(format!("{} is a network file", path.display()))),
    }
}

fn read_network(path: &Path) -> Result<NetworkDocument> {
    match read(path)? {
        Document::Network(d) => Ok(d),
        Document::Index(_) => Err(Error::InvalidInstance(format!("{} is an index file", path.display()))),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Accepts `p/q` or a decimal such as `0.25`, converted exactly.
pub fn parse_probability(s: &str) -> Result<Rational> {
    let s = s.trim();
    let r = if s.contains('/') || !s.contains('.') {
        parse_rational(s)?
    } else {
        let (int, frac) = s.split_once('.').expect("contains a point");
        if frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("`{s}` is not a probability")));
        }
        let num = parse_rational(&format!("{int}{frac}"))?;
        num / Rational::from_integer(10u128.pow(frac.len() as u32))
    };
    if r > Rational::from_integer(1) {
        return Err(crate::error::out_of_range("probability", s, "[0, 1]"));
    }
    Ok(r)
}

fn pass(ok: bool) -> u8 {
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Map {
            direction,
            input,
            uses,
            bottleneck,
            output,
        } => cmd_map(direction, &input, uses, bottleneck.as_deref(), output.as_deref()),
        Command::Augment { input, output } => cmd_augment(&input, output.as_deref()),
        Command::Translate {
            direction,
            input,
            uses,
            index,
            network,
            sigma,
            tv_coefficient,
            output,
        } => {
            let options = VerifyOptions { sigma, tv_coefficient };
            cmd_translate(direction, &input, uses, index.as_deref(), network.as_deref(), &options, output.as_deref())
        }
        Command::Evaluate {
            input,
            epsilon,
            eta,
            output,
        } => cmd_evaluate(&input, epsilon.as_deref(), eta, output.as_deref()),
        Command::Verify {
            clause,
            trials,
            seed,
            fixture,
            epsilon,
            sigma,
            tv_coefficient,
            output,
        } => {
            let eps = epsilon.as_deref().map(parse_probability).transpose()?;
            let plan = VerifyPlan {
                clause: clause.parse()?,
                trials,
                seed,
                fixture,
                max_error: eps,
                options: VerifyOptions { sigma, tv_coefficient },
            };
            let summary = cmd_verify(&plan)?;
            emit(&write_toml(&summary)?, output.as_deref())?;
            Ok(pass(summary.failed == 0))
        }
        Command::Bounds {
            input,
            epsilon,
            eta,
            eavesdroppers,
            nhat,
            log_source,
            tv,
            tv_coefficient,
            output,
        } => {
            let given = BoundInputs {
                epsilon: epsilon.as_deref().map(parse_probability).transpose()?.map(|r| to_f64(&r)),
                eta,
                eavesdroppers,
                nhat,
                log_source,
                tv,
            };
            let report = cmd_bounds(input.as_deref(), given, tv_coefficient)?;
            emit(&write_toml(&report)?, output.as_deref())?;
            Ok(EXIT_PASS)
        }
    }
}

// map and augment

fn cmd_map(
    direction: MapDirection,
    input: &Path,
    uses: u32,
    bottleneck: Option<&str>,
    output: Option<&Path>,
) -> Result<u8> {
    let text = match direction {
        MapDirection::I2n => {
            let doc = read_index(input)?;
            let cap = match (bottleneck, &doc.code) {
                (Some(b), _) => parse_capacity(b)?,
                (None, Some(c)) => Capacity::new(c.broadcast_bits() as u64, uses as u64),
                (None, None) => Capacity::from_integer(1),
            };
            let net = index_to_network_with(&doc.instance, uses, cap)?;
            info!("mapped {} index messages to {} vertices", doc.instance.messages().len(), net.vertices().len());
            write_document(&Document::Network(NetworkDocument {
                instance: net,
                pmfs: doc.pmfs,
                code: None,
                augmented: None,
            }))?
        }
        MapDirection::N2i => {
            let doc = read_network(input)?;
            let (aug, pmfs) = augmented_of(&doc)?;
            let image = network_to_index(&aug, uses)?;
            info!("image has n̂ = {}", image.broadcast_bits());
            write_document(&Document::Index(IndexDocument {
                instance: image.instance().clone(),
                pmfs: image_pmfs(&image, &pmfs)?,
                code: None,
                image: Some(ImageMeta::of(&image)),
            }))?
        }
    };
    emit(&text, output)?;
    Ok(EXIT_PASS)
}

/// The augmented instance of a network file and pmfs over all its messages.
/// Files without key messages are taken as deterministic.
fn augmented_of(doc: &NetworkDocument) -> Result<(AugmentedInstance, Vec<crate::probinfo::Pmf>)> {
    match &doc.augmented {
        Some(a) => Ok((a.clone(), doc.pmfs.clone())),
        None => {
            let aug = augment_deterministic(&doc.instance)?;
            let pmfs = aug.pmfs(&doc.pmfs)?;
            Ok((aug, pmfs))
        }
    }
}

fn cmd_augment(input: &Path, output: Option<&Path>) -> Result<u8> {
    let doc = read_network(input)?;
    let code = doc
        .code
        .as_ref()
        .ok_or_else(|| Error::InvalidCode(format!("{} has no code to augment", input.display())))?;
    if doc.augmented.is_some() {
        // Keys are already messages and the code is deterministic.
        emit(&write_document(&Document::Network(doc))?, output)?;
        return Ok(EXIT_PASS);
    }
    let (aug, det) = augment(&doc.instance, code)?;
    let pmfs = aug.pmfs(&doc.pmfs)?;
    emit(
        &write_document(&Document::Network(NetworkDocument {
            instance: aug.instance().clone(),
            pmfs,
            code: Some(det),
            augmented: Some(aug),
        }))?,
        output,
    )?;
    Ok(EXIT_PASS)
}

// translate

fn require_code<'a, T>(code: &'a Option<T>, path: &Path) -> Result<&'a T> {
    code.as_ref()
        .ok_or_else(|| Error::InvalidCode(format!("{} has no code", path.display())))
}

fn image_of(doc: &IndexDocument, aug: &AugmentedInstance) -> Result<IndexImage> {
    let meta = doc
        .image
        .ok_or_else(|| Error::InvalidInstance("index file lacks [image] metadata".into()))?;
    let image = network_to_index(aug, meta.uses)?;
    if image.instance() != &doc.instance || ImageMeta::of(&image) != meta {
        return Err(Error::InstanceMismatch(
            "index instance is not the image of the network file".into(),
        ));
    }
    Ok(image)
}

fn cmd_translate(
    direction: TranslateDirection,
    input: &Path,
    uses: u32,
    index: Option<&Path>,
    network: Option<&Path>,
    options: &VerifyOptions,
    output: Option<&Path>,
) -> Result<u8> {
    let (doc, report) = match direction {
        TranslateDirection::I2n => {
            let d = read_index(input)?;
            let code = require_code(&d.code, input)?;
            let cap = Capacity::new(code.broadcast_bits() as u64, uses as u64);
            let net = index_to_network_with(&d.instance, uses, cap)?;
            let nc = translate_i2n(&d.instance, code, &net, uses)?;
            let input = VerifyInput::Index {
                index: &d.instance,
                code,
                pmfs: &d.pmfs,
                uses,
            };
            let report = verify_clause(Clause::Thm1Fwd, input, options)?;
            let doc = Document::Network(NetworkDocument {
                instance: net,
                pmfs: d.pmfs.clone(),
                code: Some(nc),
                augmented: None,
            });
            (doc, report)
        }
        TranslateDirection::N2i => {
            let d = read_network(input)?;
            let code = require_code(&d.code, input)?;
            let index_path = index.ok_or_else(|| Error::InvalidInstance("n2i needs --index".into()))?;
            let idx = read_index(index_path)?;
            if idx.pmfs.len() != d.pmfs.len() || idx.pmfs != d.pmfs {
                return Err(Error::InstanceMismatch("index and network files give different pmfs".into()));
            }
            let ic = translate_n2i(&idx.instance, &d.instance, code, &d.pmfs)?;
            let input = VerifyInput::MappedNetwork {
                index: &idx.instance,
                network: &d.instance,
                code,
                pmfs: &d.pmfs,
            };
            let report = verify_clause(Clause::Thm1Bwd, input, options)?;
            let doc = Document::Index(IndexDocument {
                instance: idx.instance.clone(),
                pmfs: d.pmfs.clone(),
                code: Some(ic),
                image: None,
            });
            (doc, report)
        }
        TranslateDirection::N2iAug => {
            let d = read_network(input)?;
            let code = require_code(&d.code, input)?;
            let (aug, det, pmfs) = match &d.augmented {
                Some(a) => (a.clone(), code.clone(), d.pmfs.clone()),
                None => {
                    let (a, det) = augment(&d.instance, code)?;
                    let pmfs = a.pmfs(&d.pmfs)?;
                    (a, det, pmfs)
                }
            };
            let image = network_to_index(&aug, det.uses())?;
            let ic = translate_n2i_code(&aug, &det, &image)?;
            let report = verify_clause(
                Clause::Thm2P1,
                VerifyInput::Augmented {
                    aug: &aug,
                    code: &det,
                    pmfs: &pmfs,
                },
                options,
            )?;
            let doc = Document::Index(IndexDocument {
                instance: image.instance().clone(),
                pmfs: image_pmfs(&image, &pmfs)?,
                code: Some(ic),
                image: Some(ImageMeta::of(&image)),
            });
            (doc, report)
        }
        TranslateDirection::I2nAug => {
            let d = read_index(input)?;
            let code = require_code(&d.code, input)?;
            let net_path = network.ok_or_else(|| Error::InvalidInstance("i2n-aug needs --network".into()))?;
            let nd = read_network(net_path)?;
            let (aug, pmfs) = augmented_of(&nd)?;
            let image = image_of(&d, &aug)?;
            let uniform = image.instance().uniform_pmfs();
            let sigma = match options.sigma {
                Some(s) => s,
                None => select_sigma(&aug, &image, code, &uniform)?.0,
            };
            debug!("fixing the broadcast to {sigma}");
            let nc = build_network_code_from_sigma(&aug, &image, code, sigma)?;
            let eps = eval_index_error(image.instance(), code, &uniform)?;
            let clause = if eps == Rational::from_integer(0) {
                Clause::Thm2P2a
            } else {
                Clause::Thm2P2b
            };
            let opts = VerifyOptions {
                sigma: Some(sigma),
                tv_coefficient: options.tv_coefficient,
            };
            let report = verify_clause(
                clause,
                VerifyInput::Image {
                    aug: &aug,
                    image: &image,
                    code,
                },
                &opts,
            )?;
            let doc = Document::Network(NetworkDocument {
                instance: aug.instance().clone(),
                pmfs,
                code: Some(nc),
                augmented: Some(aug.clone()),
            });
            (doc, report)
        }
    };
    if let Some(p) = output {
        emit(&write_document(&doc)?, Some(p))?;
    }
    print!("{}", write_report(&report)?);
    Ok(pass(report.satisfied))
}

// evaluate

fn cmd_evaluate(input: &Path, epsilon: Option<&str>, eta: Option<f64>, output: Option<&Path>) -> Result<u8> {
    let (kind, error, ids, leakage) = match read(input)? {
        Document::Index(d) => {
            let code = require_code(&d.code, input)?;
            let j = index_joint(&d.instance, code, &d.pmfs)?;
            let ids: Vec<String> = d.instance.eavesdroppers().iter().map(|r| r.id.clone()).collect();
            ("index", j.probability(&[(SUCCESS_VAR, 0)])?, ids, index_leakage_from_joint(&d.instance, &j)?)
        }
        Document::Network(d) => {
            let code = require_code(&d.code, input)?;
            let j = network_joint(&d.instance, code, &d.pmfs)?;
            let ids: Vec<String> = d.instance.eavesdroppers().iter().map(|r| r.id.clone()).collect();
            ("network", j.probability(&[(SUCCESS_VAR, 0)])?, ids, network_leakage_from_joint(&d.instance, &j)?)
        }
    };
    let feasible = match (epsilon, eta) {
        (None, None) => None,
        (e, h) => {
            let e = e.map(parse_probability).transpose()?.unwrap_or(Rational::from_integer(1));
            let h = h.unwrap_or(f64::INFINITY);
            Some(error <= e && leakage.iter().all(|&l| l <= h + crate::probinfo::EQ_TOL))
        }
    };
    emit(&write_evaluation(kind, &error, &ids, &leakage, feasible)?, output)?;
    Ok(pass(feasible.unwrap_or(true)))
}

// bounds

#[derive(Clone, Copy, Debug, Default)]
pub struct BoundInputs {
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub eavesdroppers: Option<usize>,
    pub nhat: Option<u32>,
    pub log_source: Option<f64>,
    pub tv: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub epsilon: f64,
    pub eta: f64,
    pub eavesdroppers: usize,
    pub nhat: u32,
    pub log_source: f64,
    pub tv: f64,
    pub tv_coefficient: f64,
    pub zeta: f64,
    pub zeta_branch: String,
    pub error_bound: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
}

/// Fills unspecified inputs from the index code in `input`, if any.
fn cmd_bounds(input: Option<&Path>, given: BoundInputs, coefficient: f64) -> Result<BoundsReport> {
    let measured = match input {
        Some(p) => {
            let d = read_index(p)?;
            let code = require_code(&d.code, p)?;
            let inst = &d.instance;
            let sources = d.image.map_or(inst.messages().len(), |m| m.source_messages);
            let log_source = inst.messages()[..sources]
                .iter()
                .map(|m| (m.alphabet as f64).log2())
                .sum::<f64>();
            let leak = eval_index_leakage(inst, code, &d.pmfs)?;
            BoundInputs {
                epsilon: Some(to_f64(&eval_index_error(inst, code, &d.pmfs)?)),
                eta: Some(leak.iter().copied().fold(0.0, f64::max)),
                eavesdroppers: Some(inst.eavesdroppers().len()),
                nhat: Some(code.broadcast_bits()),
                log_source: Some(log_source),
                tv: Some(to_f64(&broadcast_total_variation(inst, code, &d.pmfs)?)),
            }
        }
        None => BoundInputs::default(),
    };
    let missing = |name: &str| Error::InvalidInstance(format!("bounds needs --{name} or an input file"));
    let epsilon = given.epsilon.or(measured.epsilon).ok_or_else(|| missing("epsilon"))?;
    let nhat = given.nhat.or(measured.nhat).ok_or_else(|| missing("nhat"))?;
    let eta = given.eta.or(measured.eta).unwrap_or(0.0);
    let eavesdroppers = given.eavesdroppers.or(measured.eavesdroppers).unwrap_or(1);
    let log_source = given.log_source.or(measured.log_source).unwrap_or(0.0);
    let tv = given.tv.or(measured.tv).unwrap_or(0.0);
    let z = zeta_with(epsilon, nhat, tv, coefficient)?;
    Ok(BoundsReport {
        epsilon,
        eta,
        eavesdroppers,
        nhat,
        log_source,
        tv,
        tv_coefficient: coefficient,
        zeta: z.value,
        zeta_branch: z.branch.to_string(),
        error_bound: eavesdroppers as f64 * eta + z.value,
        gamma: gamma(epsilon, eta, eavesdroppers, nhat, log_source, z.value)?,
        gamma_prime: gamma_prime(epsilon, eta, eavesdroppers, nhat, log_source)?,
    })
}

// verify

/// What `verify` checks: a translation clause, the leakage-difference lemma,
/// or uniqueness of decodable preimages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Clause(Clause),
    Lemma1,
    Prop1,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(Target::Lemma1),
            "prop1" => Ok(Target::Prop1),
            _ => s
                .parse::<Clause>()
                .map(Target::Clause)
                .map_err(|_| Error::Parse(format!("unknown clause id `{s}`"))),
        }
    }
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Clause(c) => c.name(),
            Target::Lemma1 => "lemma1",
            Target::Prop1 => "prop1",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyPlan {
    pub clause: Target,
    pub trials: usize,
    pub seed: u64,
    pub fixture: Option<Fixture>,
    pub max_error: Option<Rational>,
    pub options: VerifyOptions,
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub clause: String,
    pub fixture: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub result: String,
    pub failures: Vec<TrialFailure>,
}

#[derive(Debug, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
}

fn default_fixture(t: Target) -> Fixture {
    match t {
        Target::Clause(Clause::Thm1Fwd | Clause::Thm1Bwd) => Fixture::Fig1,
        _ => Fixture::Random,
    }
}

fn fixture_name(f: Fixture) -> &'static str {
    match f {
        Fixture::Fig1 => "fig1",
        Fixture::Fig2 => "fig2",
        Fixture::Random => "random",
    }
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn report_failure(r: &TranslationReport) -> Option<String> {
    if r.satisfied {
        return None;
    }
    let failed: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("{}: {} vs {}", c.name, c.lhs, c.rhs))
        .collect();
    Some(failed.join("; "))
}

/// The one-time pad translated onto the image of its augmentation.
fn fig2_image_code() -> Result<(AugmentedInstance, IndexImage, IndexCode)> {
    let (n, c) = fixtures::fig2a();
    let (aug, det) = augment(&n, &c)?;
    let image = network_to_index(&aug, 1)?;
    let code = translate_n2i_code(&aug, &det, &image)?;
    Ok((aug, image, code))
}

fn index_fixture(rng: &mut Rng64, f: Fixture) -> Result<IndexInstance> {
    match f {
        Fixture::Fig1 => Ok(fixtures::fig1_index()),
        Fixture::Random => random::random_index_instance(rng, 3),
        Fixture::Fig2 => Err(Error::InvalidInstance("fixture fig2 is a network instance".into())),
    }
}

fn image_case(
    rng: &mut Rng64,
    plan: &VerifyPlan,
    fixture: Fixture,
    kind: Clause,
) -> Result<(AugmentedInstance, IndexImage, IndexCode)> {
    let max = plan.max_error.unwrap_or_else(half);
    match (fixture, kind) {
        (Fixture::Fig1, _) => Err(Error::InvalidInstance("fixture fig1 is an index instance".into())),
        (Fixture::Fig2, Clause::Thm2P2b) => {
            let (aug, image, code) = fig2_image_code()?;
            let c = random::perturb_to_imperfect(rng, image.instance(), &code, &max, 256)?
                .ok_or_else(|| Error::Precondition("could not perturb the fixture into range".into()))?;
            Ok((aug, image, c))
        }
        (Fixture::Fig2, _) => fig2_image_code(),
        (Fixture::Random, Clause::Thm2P2a) => loop {
            let (aug, det, image) = random::random_augmented(rng)?;
            let code = translate_n2i_code(&aug, &det, &image)?;
            if eval_index_error(image.instance(), &code, &image.instance().uniform_pmfs())? == Rational::from_integer(0) {
                return Ok((aug, image, code));
            }
        },
        (Fixture::Random, Clause::Cor1) => random::random_linear_image_code(rng, &max),
        (Fixture::Random, _) => random::random_imperfect_image_code(rng, &max),
    }
}

fn run_trial(rng: &mut Rng64, plan: &VerifyPlan, fixture: Fixture) -> Result<Option<String>> {
    let opts = &plan.options;
    match plan.clause {
        Target::Clause(Clause::Thm1Fwd) => {
            let idx = index_fixture(rng, fixture)?;
            let pmfs = idx.uniform_pmfs();
            let code = random::random_index_code(rng, &idx, &pmfs, 3, 2)?;
            let input = VerifyInput::Index {
                index: &idx,
                code: &code,
                pmfs: &pmfs,
                uses: 1,
            };
            Ok(report_failure(&verify_clause(Clause::Thm1Fwd, input, opts)?))
        }
        Target::Clause(Clause::Thm1Bwd) => {
            let idx = index_fixture(rng, fixture)?;
            let pmfs = idx.uniform_pmfs();
            let (net, code) = random::random_i2n_network(rng, &idx)?;
            let input = VerifyInput::MappedNetwork {
                index: &idx,
                network: &net,
                code: &code,
                pmfs: &pmfs,
            };
            Ok(report_failure(&verify_clause(Clause::Thm1Bwd, input, opts)?))
        }
        Target::Clause(Clause::Thm2P1) => {
            let (aug, det) = match fixture {
                Fixture::Fig2 => {
                    let (n, c) = fixtures::fig2a();
                    augment(&n, &c)?
                }
                Fixture::Random => {
                    let (aug, det, _) = random::random_augmented(rng)?;
                    (aug, det)
                }
                Fixture::Fig1 => return Err(Error::InvalidInstance("fixture fig1 is an index instance".into())),
            };
            let base = aug.instance().messages().len() - aug.key_messages().len();
            let pmfs = aug.pmfs(&aug.instance().uniform_pmfs()[..base])?;
            let input = VerifyInput::Augmented {
                aug: &aug,
                code: &det,
                pmfs: &pmfs,
            };
            Ok(report_failure(&verify_clause(Clause::Thm2P1, input, opts)?))
        }
        Target::Clause(c) => {
            let (aug, image, code) = image_case(rng, plan, fixture, c)?;
            let input = VerifyInput::Image {
                aug: &aug,
                image: &image,
                code: &code,
            };
            Ok(report_failure(&verify_clause(c, input, opts)?))
        }
        Target::Lemma1 => {
            let (aug, image, code) = loop {
                let case = image_case(rng, plan, fixture, Clause::Thm2P2b)?;
                if !case.1.instance().eavesdroppers().is_empty() {
                    break case;
                }
            };
            let sigmas: Vec<u32> = (0..code.codewords() as u32)
                .map(|s| good_count(&aug, &image, &code, s).map(|g| (s, g)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|&(_, g)| g > 0)
                .map(|(s, _)| s)
                .collect();
            let sigma = match opts.sigma {
                Some(s) => s,
                None => sigmas[rng.gen_range(0..sigmas.len())],
            };
            let r = rng.gen_range(0..image.instance().eavesdroppers().len());
            let c = check_lemma1(&aug, &image, &code, sigma, r)?;
            Ok((!(c.holds && c.prop3_holds && c.prop4_holds)).then(|| {
                format!(
                    "sigma {sigma}, eavesdropper {r}: lemma {} <= {}, prop3 {} <= {}, prop4 {} <= {}",
                    c.lhs, c.rhs, c.prop3_lhs, c.prop3_rhs, c.prop4_lhs, c.prop4_rhs
                )
            }))
        }
        Target::Prop1 => {
            let kind = if rng.gen_bool(0.5) { Clause::Thm2P2a } else { Clause::Thm2P2b };
            let (aug, image, code) = image_case(rng, plan, fixture, kind)?;
            let sizes: Vec<usize> = aug.instance().messages().iter().map(|m| m.alphabet).collect();
            let mut clash = None;
            let mut err = None;
            table::for_each_tuple(&sizes, |xs| {
                if clash.is_some() || err.is_some() {
                    return;
                }
                match decodable_set(&image, &code, xs) {
                    Err(e) => err = Some(e),
                    Ok(set) => {
                        let mut seen = vec![false; code.codewords()];
                        for xe in set {
                            let msgs: Vec<u32> = xs.iter().chain(&xe).copied().collect();
                            let b = code.encode(&msgs, 0) as usize;
                            if seen[b] {
                                clash = Some(format!("sources {xs:?} reach broadcast {b} twice"));
                            }
                            seen[b] = true;
                        }
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(clash),
            }
        }
    }
}

pub fn cmd_verify(plan: &VerifyPlan) -> Result<VerifySummary> {
    let fixture = plan.fixture.unwrap_or_else(|| default_fixture(plan.clause));
    if let Some(e) = &plan.max_error {
        let applies = matches!(plan.clause, Target::Clause(Clause::Thm2P2b | Clause::Cor1) | Target::Lemma1);
        if !applies {
            return Err(Error::InvalidInstance(format!("--epsilon does not apply to {}", plan.clause.name())));
        }
        if *e > half() || *e == Rational::from_integer(0) {
            return Err(Error::Hypothesis(format!(
                "error ceiling {e} is outside (0, 1/2]"
            )));
        }
    }
    let mut rng = random::rng(plan.seed);
    let mut failures = Vec::new();
    for trial in 0..plan.trials {
        debug!("trial {trial}");
        match run_trial(&mut rng, plan, fixture) {
            Ok(None) => {}
            Ok(Some(detail)) => failures.push(TrialFailure { trial, detail }),
            Err(e @ (Error::Hypothesis(_) | Error::InvalidInstance(_) | Error::OutOfRange { .. })) => return Err(e),
            Err(e) => failures.push(TrialFailure {
                trial,
                detail: e.to_string(),
            }),
        }
    }
    let failed = failures.len();
    Ok(VerifySummary {
        clause: plan.clause.name().into(),
        fixture: fixture_name(fixture).into(),
        seed: plan.seed,
        trials: plan.trials,
        passed: plan.trials - failed,
        failed,
        result: if failed == 0 { "pass" } else { "fail" }.into(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(clause: &str, trials: usize) -> VerifyPlan {
        VerifyPlan {
            clause: clause.parse().unwrap(),
            trials,
            seed: 7,
            fixture: None,
            max_error: None,
            options: VerifyOptions::default(),
        }
    }

    #[test]
    fn probabilities_parse_exactly() {
        assert_eq!(parse_probability("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_probability("1/3").unwrap(), Rational::new(1, 3));
        assert_eq!(parse_probability("1").unwrap(), Rational::from_integer(1));
        assert!(parse_probability("1.5").is_err());
        assert!(parse_probability("x").is_err());
    }

    #[test]
    fn every_target_verifies() {
        for t in ["thm1_fwd", "thm1_bwd", "thm2_p1", "thm2_p2a", "thm2_p2b", "cor1", "lemma1", "prop1"] {
            let s = cmd_verify(&plan(t, 5)).unwrap();
            assert_eq!(s.failed, 0, "{t}: {:?}", s.failures);
        }
    }

    #[test]
    fn verify_rejects_bad_inputs() {
        assert!("thm9".parse::<Target>().is_err());
        let mut s = plan("thm2_p2b", 1);
        s.max_error = Some(Rational::new(3, 5));
        assert!(matches!(cmd_verify(&s), Err(Error::Hypothesis(_))));
        let mut s = plan("thm1_fwd", 1);
        s.fixture = Some(Fixture::Fig2);
        assert!(cmd_verify(&s).is_err());
    }

    #[test]
    fn bounds_from_parameters() {
        let r = cmd_bounds(
            None,
            BoundInputs {
                epsilon: Some(0.0),
                nhat: Some(3),
                ..Default::default()
            },
            2.0,
        )
        .unwrap();
        assert_eq!((r.zeta, r.gamma, r.gamma_prime), (0.0, 0.0, 0.0));
        assert!(cmd_bounds(None, BoundInputs::default(), 2.0).is_err());
    }
}
