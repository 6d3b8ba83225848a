use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::Value;

use pauliverify::analysis::margin::{approx, digits, fourteenth_root, margin_holds_at};
use pauliverify::analysis::{minimal_k_for_margin, robustness_sweep, supremacy_margin, MarginReport, SweepTarget};
use pauliverify::circuit::{check_circuit_conditions, conjugate_through_circuit, CircuitConditionReport};
use pauliverify::exact::{parse_rational, to_f64};
use pauliverify::hamiltonian::{check_conditions, ConditionReport, RBudget};
use pauliverify::hypergraph::{random_bms_hypergraph, Connectivity};
use pauliverify::io::{load_json, parse_json, read_text, HypergraphFile, ProverSpec, RunConfig, StateSpec};
use pauliverify::kernels::{adaptive_test_exact_ppass, monte_carlo_pass_rate, AdaptiveTest, PauliTermTest, SingleCopyTest};
use pauliverify::pauli::PauliString;
use pauliverify::protocol::engine::{run_circuit_protocol, run_ground_protocol, run_hypergraph_protocol, run_many, RunOptions, TrialRecord, VerdictReport};
use pauliverify::protocol::entangled::{run_entangled_hypergraph, superposition_of_products, EntangledReport};
use pauliverify::protocol::{paper_params, ProtocolKind, ProtocolParams, Prover};
use pauliverify::report::{to_json, trials_csv};
use pauliverify::rng::{run_seed, stream};
use pauliverify::selftest::run_selftest;
use pauliverify::state::DenseState;
use pauliverify::{BigRational, BigUint, Complex64, Error, Result};

use crate::target::Target;
use crate::{Cli, Command, Global, ModeArg};

pub enum Outcome {
    Success,
    /// The command ran but reports a failed check.
    Failed(String),
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::GenHypergraph(a) => gen_hypergraph(a, g),
        Command::Inspect(a) => inspect(a, g),
        Command::Ppass(a) => ppass(a, g),
        Command::Verify(a) => verify(a, g),
        Command::Params(a) => params(a, g),
        Command::IqpMargin(a) => iqp_margin(a, g),
        Command::Robustness(a) => robustness(a, g),
        Command::Selftest(a) => selftest(a, g),
    }
}

fn emit<T: Serialize + ?Sized>(g: &Global, value: &T) -> Result<Outcome> {
    let text = to_json(value)?;
    match &g.out {
        Some(p) => pauliverify::io::write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Success)
}

fn seed_or_entropy(g: &Global, fallback: Option<u64>) -> u64 {
    match g.seed.or(fallback) {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            s
        }
    }
}

fn protocol_arg(s: &str) -> std::result::Result<ProtocolKind, String> {
    ProtocolKind::parse(s).map_err(|e| e.to_string())
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn state_arg(s: &str) -> Result<StateSpec> {
    if s.trim_start().starts_with('{') {
        parse_json(s)
    } else {
        load_json(Path::new(s))
    }
}

#[derive(Serialize)]
struct TermOut {
    pauli: String,
    coeff: f64,
}

fn terms_out(terms: &[PauliString]) -> Vec<TermOut> {
    terms
        .iter()
        .map(|t| TermOut {
            pauli: t.label(),
            coeff: t.coeff(),
        })
        .collect()
}

// gen-hypergraph

#[derive(Args, Debug)]
pub struct GenHypergraphArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    /// Inclusion probability of each 2- and 3-subset.
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
}

fn gen_hypergraph(a: &GenHypergraphArgs, g: &Global) -> Result<Outcome> {
    let seed = seed_or_entropy(g, None);
    let h = random_bms_hypergraph(a.n, a.edge_prob, &mut stream(seed, &[]))?;
    // The file stays loadable as a hypergraph: seed and probability are
    // reported on stderr, not in the document.
    eprintln!("{}", serde_json::json!({ "seed": seed, "edge_prob": a.edge_prob }));
    emit(g, &HypergraphFile::from_spec(&h))
}

// inspect

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long, value_parser = protocol_arg)]
    pub protocol: ProtocolKind,
    /// Hamiltonian, circuit or hypergraph file.
    #[arg(long)]
    pub target: PathBuf,
    /// Budget `scale · N^degree` against which R is reported.
    #[arg(long, default_value_t = 10.0)]
    pub budget_scale: f64,
    #[arg(long, default_value_t = 3)]
    pub budget_degree: u32,
}

#[derive(Serialize)]
struct GroundInspect {
    protocol: ProtocolKind,
    n_qubits: usize,
    terms: Vec<TermOut>,
    ground_energy: f64,
    gap: f64,
    oracle_assisted: bool,
    rescaled_terms: Vec<TermOut>,
    r: f64,
    c0: f64,
    conditions: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<SpectrumOut>,
}

#[derive(Serialize)]
struct SpectrumOut {
    eigenvalues: Vec<f64>,
    degeneracy: usize,
    first_excited_energy: Option<f64>,
}

#[derive(Serialize)]
struct StabilizerOut {
    label: String,
    vertex: usize,
    r: f64,
    terms: Vec<TermOut>,
}

#[derive(Serialize)]
struct CircuitInspect {
    protocol: ProtocolKind,
    n_qubits: usize,
    gates: usize,
    is_clifford: bool,
    stabilizers: Vec<StabilizerOut>,
    conditions: CircuitConditionReport,
}

#[derive(Serialize)]
struct AdaptiveOut {
    label: String,
    vertex: usize,
    z_neighbors: Vec<usize>,
    cz_groups: Vec<Vec<usize>>,
    projector_support: Vec<usize>,
    is_static: bool,
    /// Omitted when the projector support is too wide to enumerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    branch_rules: Option<Vec<String>>,
    /// Pauli decomposition of `g_i`, omitted above the term cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pauli_terms: Option<Vec<TermOut>>,
}

#[derive(Serialize)]
struct HypergraphInspect {
    protocol: ProtocolKind,
    n_vertices: usize,
    edges: Vec<Vec<usize>>,
    max_edge_size: usize,
    connectivity: Connectivity,
    stabilizers: Vec<AdaptiveOut>,
}

/// Widest projector support whose branch rules are listed.
const RULE_LIST_CAP: usize = 10;

fn inspect(a: &InspectArgs, g: &Global) -> Result<Outcome> {
    let budget = RBudget {
        scale: a.budget_scale,
        degree: a.budget_degree,
    };
    match Target::load(a.protocol, &a.target)? {
        Target::Ground {
            hamiltonian,
            rescaled,
            spectrum,
            ..
        } => emit(
            g,
            &GroundInspect {
                protocol: a.protocol,
                n_qubits: hamiltonian.n_qubits(),
                terms: terms_out(hamiltonian.terms()),
                ground_energy: rescaled.ground_energy(),
                gap: rescaled.gap(),
                oracle_assisted: rescaled.oracle_assisted(),
                rescaled_terms: terms_out(rescaled.terms()),
                r: rescaled.r(),
                c0: rescaled.c0(),
                conditions: check_conditions(&rescaled, budget),
                spectrum: spectrum.map(|s| SpectrumOut {
                    eigenvalues: s.eigenvalues,
                    degeneracy: s.degeneracy,
                    first_excited_energy: s.first_excited_energy,
                }),
            },
        ),
        Target::Circuit { circuit, decomps, .. } => emit(
            g,
            &CircuitInspect {
                protocol: a.protocol,
                n_qubits: circuit.n_qubits(),
                gates: circuit.gates().len(),
                is_clifford: circuit.is_clifford(),
                stabilizers: decomps
                    .iter()
                    .map(|d| StabilizerOut {
                        label: format!("g_{}", d.vertex() + 1),
                        vertex: d.vertex(),
                        r: d.r(),
                        terms: terms_out(d.terms()),
                    })
                    .collect(),
                conditions: check_circuit_conditions(&decomps, budget)?,
            },
        ),
        Target::Hypergraph { hypergraph, forms, .. } => {
            let circuit = hypergraph.to_circuit();
            let stabilizers = forms
                .iter()
                .map(|f| {
                    let branch_rules = if f.projector_support().len() <= RULE_LIST_CAP {
                        Some(f.branch_rules()?)
                    } else {
                        None
                    };
                    let pauli_terms = match conjugate_through_circuit(&circuit, f.vertex()) {
                        Ok(d) => Some(terms_out(d.terms())),
                        Err(e) if e.is_cap() => None,
                        Err(e) => return Err(e),
                    };
                    Ok(AdaptiveOut {
                        label: format!("g_{}", f.vertex() + 1),
                        vertex: f.vertex(),
                        z_neighbors: f.z_neighbors().to_vec(),
                        cz_groups: f.cz_groups().to_vec(),
                        projector_support: f.projector_support().to_vec(),
                        is_static: f.is_static(),
                        branch_rules,
                        pauli_terms,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(
                g,
                &HypergraphInspect {
                    protocol: a.protocol,
                    n_vertices: hypergraph.n_vertices(),
                    edges: hypergraph.edges().to_vec(),
                    max_edge_size: hypergraph.max_edge_size(),
                    connectivity: hypergraph.connectivity(),
                    stabilizers,
                },
            )
        }
    }
}

// ppass

#[derive(Args, Debug)]
pub struct PpassArgs {
    #[arg(long, value_parser = protocol_arg)]
    pub protocol: ProtocolKind,
    #[arg(long)]
    pub target: PathBuf,
    /// State spec: inline JSON (`{"kind": ...}`) or a path to a JSON file.
    #[arg(long)]
    pub state: String,
    /// Restrict to one group (stabilizer index, 0-based).
    #[arg(long)]
    pub group: Option<usize>,
}

#[derive(Serialize)]
struct MonteCarloOut {
    trials: u64,
    passes: u64,
    rate: f64,
    sigma: f64,
    within_3_sigma: bool,
}

#[derive(Serialize)]
struct GroupPpass {
    group: usize,
    /// Closed form: `1/2 + Tr[ρH′]/(2R)`, `1/2 + Tr[ρg_i]/(2R_i)` or `(1 + Tr[ρg_i])/2`.
    exact: f64,
    /// Adaptive test only: the same value summed branch by branch.
    #[serde(skip_serializing_if = "Option::is_none")]
    branch_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarloOut>,
}

#[derive(Serialize)]
struct PpassOut {
    protocol: ProtocolKind,
    n_qubits: usize,
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    groups: Vec<GroupPpass>,
}

fn ppass(a: &PpassArgs, g: &Global) -> Result<Outcome> {
    let target = Target::load(a.protocol, &a.target)?;
    let ideal = target.ideal()?;
    let rho = state_arg(&a.state)?.resolve(ideal)?;
    let n = target.n_qubits();
    let groups = a.protocol.groups(n);
    let selected: Vec<usize> = match a.group {
        Some(i) if i >= groups => return Err(Error::Invalid(format!("group {i} out of range (0..{groups})"))),
        Some(i) => vec![i],
        None => (0..groups).collect(),
    };
    let seed = g.trials.map(|_| seed_or_entropy(g, None));
    let mc = |test: &dyn SingleCopyTest, p: f64, i: usize| -> Result<Option<MonteCarloOut>> {
        let (Some(trials), Some(seed)) = (g.trials, seed) else {
            return Ok(None);
        };
        let rate = monte_carlo_pass_rate(test, &rho, trials as usize, pauliverify::rng::mix(seed, &[i as u64]))?;
        Ok(Some(MonteCarloOut {
            trials,
            passes: rate.passes,
            rate: rate.rate(),
            sigma: rate.sigma_at(p),
            within_3_sigma: rate.within(p, 3.0),
        }))
    };
    let mut out = Vec::new();
    for i in selected {
        let row = match &target {
            Target::Ground { rescaled, .. } => {
                let t = PauliTermTest::energy(rescaled)?;
                let p = t.exact_ppass(&rho)?;
                GroupPpass {
                    group: i,
                    exact: p,
                    branch_sum: None,
                    monte_carlo: mc(&t, p, i)?,
                }
            }
            Target::Circuit { decomps, .. } => {
                let t = PauliTermTest::stabilizer(&decomps[i])?;
                let p = t.exact_ppass(&rho)?;
                GroupPpass {
                    group: i,
                    exact: p,
                    branch_sum: None,
                    monte_carlo: mc(&t, p, i)?,
                }
            }
            Target::Hypergraph { hypergraph, forms, .. } => {
                let pp = adaptive_test_exact_ppass(&rho, &forms[i], &hypergraph.stabilizer_dense(i)?)?;
                let t = AdaptiveTest::new(&forms[i]);
                GroupPpass {
                    group: i,
                    exact: pp.closed_form,
                    branch_sum: Some(pp.branch_sum),
                    monte_carlo: mc(&t, pp.closed_form, i)?,
                }
            }
        };
        out.push(row);
    }
    let fidelity = match &target {
        Target::Ground { spectrum, .. } => rho.expectation_operator(&spectrum.as_ref().expect("ideal exists").ground_projector)?,
        _ => rho.fidelity_with_pure(ideal.amplitudes().expect("pure ideal"))?,
    };
    emit(
        g,
        &PpassOut {
            protocol: a.protocol,
            n_qubits: n,
            fidelity,
            seed,
            groups: out,
        },
    )
}

// verify

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Number of independent protocol runs (overrides the config).
    #[arg(long)]
    pub runs: Option<u64>,
    /// Also write every single-copy test as CSV.
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
}

/// The schedule's `ε` at this width, used when a desk config leaves it out.
fn default_epsilon(kind: ProtocolKind, n: usize, k: u64) -> f64 {
    let n = n as f64;
    match kind {
        ProtocolKind::Ground => 1.0 / (4.0 * n * n),
        ProtocolKind::Circuit => 1.0 / (2.0 * n.powi(3)),
        ProtocolKind::Hypergraph => 1.0 / (4.0 * n * (k as f64).powf(2.0 / 7.0)),
    }
}

fn resolve_params(cfg: &RunConfig, target: &Target, g: &Global) -> Result<ProtocolParams> {
    let kind = target.kind();
    let n = target.n_qubits();
    let mode = match (g.mode, cfg.params.mode.as_deref()) {
        (Some(m), _) => m,
        (None, None) | (None, Some("desk")) => ModeArg::Desk,
        (None, Some("paper")) => ModeArg::Paper,
        (None, Some(other)) => return Err(Error::Invalid(format!("unknown mode {other:?} (expected desk or paper)"))),
    };
    let k = g.trials.or(cfg.params.k);
    match mode {
        ModeArg::Desk => {
            let k = k.ok_or_else(|| Error::Invalid("desk mode needs k (params.k or --trials)".into()))?;
            let eps = cfg.params.epsilon.unwrap_or_else(|| default_epsilon(kind, n, k));
            ProtocolParams::desk(kind, n, k, cfg.params.m.unwrap_or(k), eps)
        }
        ModeArg::Paper => {
            if cfg.params.m.is_some() || cfg.params.epsilon.is_some() {
                return Err(Error::Invalid("paper mode derives epsilon and m; remove them from params".into()));
            }
            let k = k.map(BigUint::from);
            let schedule = paper_params(kind, n, target.r(), k.as_ref())?;
            ProtocolParams::from_schedule(&schedule)
        }
    }
}

fn run_product(target: &Target, prover: &Prover, params: &ProtocolParams, seed: u64, opts: RunOptions) -> Result<VerdictReport> {
    match target {
        Target::Ground { rescaled, spectrum, .. } => run_ground_protocol(
            rescaled,
            spectrum.as_ref().map(|s| &s.ground_projector),
            prover,
            params,
            seed,
            opts,
        ),
        Target::Circuit { decomps, ideal, .. } => run_circuit_protocol(decomps, ideal, prover, params, seed, opts),
        Target::Hypergraph { ideal, forms, .. } => run_hypergraph_protocol(ideal, forms, prover, params, seed, opts),
    }
}

#[derive(Serialize)]
struct EntangledSummary {
    runs: u64,
    accepted: u64,
    acceptance_rate: f64,
    seed: u64,
    reports: Vec<EntangledReport>,
}

fn verify(a: &VerifyArgs, g: &Global) -> Result<Outcome> {
    let cfg: RunConfig = load_json(&a.config)?;
    let kind = ProtocolKind::parse(&cfg.protocol)?;
    let target = Target::load(kind, &cfg.target_path(&a.config))?;
    let params = resolve_params(&cfg, &target, g)?;
    let seed = seed_or_entropy(g, cfg.seed);
    let runs = a.runs.or(cfg.runs).unwrap_or(1);
    if runs == 0 {
        return Err(Error::Invalid("runs must be positive".into()));
    }
    let ideal = target.ideal()?;
    let opts = RunOptions {
        record_trials: a.trials_csv.is_some(),
    };

    if let ProverSpec::EntangledCat { bad } = &cfg.prover {
        let Target::Hypergraph { forms, .. } = &target else {
            return Err(Error::Invalid("the entangled_cat prover is only available for the hypergraph protocol".into()));
        };
        if a.trials_csv.is_some() {
            return Err(Error::Invalid("--trials-csv is not supported for the entangled_cat prover".into()));
        }
        let bad = bad.resolve(ideal)?;
        let regs = params.registers()? as usize;
        let (_, joint) = superposition_of_products(&[
            (Complex64::new(1.0, 0.0), vec![ideal; regs]),
            (Complex64::new(1.0, 0.0), vec![&bad; regs]),
        ])?;
        let reports = (0..runs)
            .map(|r| run_entangled_hypergraph(ideal, forms, &joint, &params, if runs == 1 { seed } else { run_seed(seed, r) }))
            .collect::<Result<Vec<_>>>()?;
        if runs == 1 {
            return emit(g, &reports[0]);
        }
        let accepted = reports.iter().filter(|r| r.accepted).count() as u64;
        return emit(
            g,
            &EntangledSummary {
                runs,
                accepted,
                acceptance_rate: accepted as f64 / runs as f64,
                seed,
                reports,
            },
        );
    }

    let model = cfg.prover.to_model(ideal)?.expect("product prover");
    let prover = Prover::new(&model, ideal)?;
    let write_csv = |trials: Vec<TrialRecord>| -> Result<()> {
        if let Some(p) = &a.trials_csv {
            pauliverify::io::write_text(p, &trials_csv(&trials)?)?;
        }
        Ok(())
    };
    if runs == 1 {
        let mut report = run_product(&target, &prover, &params, seed, opts)?;
        write_csv(std::mem::take(&mut report.trials))?;
        emit(g, &report)
    } else {
        let mut summary = run_many(runs, seed, |s| run_product(&target, &prover, &params, s, opts))?;
        write_csv(summary.reports.iter_mut().flat_map(|r| std::mem::take(&mut r.trials)).collect())?;
        emit(g, &summary)
    }
}

// params

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[arg(long, value_parser = protocol_arg)]
    pub protocol: ProtocolKind,
    /// Register width N.
    #[arg(long)]
    pub n: usize,
    /// R (ground) or max R_i (circuit).
    #[arg(long)]
    pub r: Option<f64>,
    /// Take R from this target file instead of --r.
    #[arg(long, conflicts_with = "r")]
    pub target: Option<PathBuf>,
    /// A k above the schedule's minimum, as a decimal integer of any size.
    #[arg(long = "k-override")]
    pub k_override: Option<String>,
}

fn params(a: &ParamsArgs, g: &Global) -> Result<Outcome> {
    let r = match &a.target {
        Some(p) => {
            let t = Target::load(a.protocol, p)?;
            if t.n_qubits() != a.n {
                return Err(Error::WidthMismatch {
                    expected: a.n,
                    found: t.n_qubits(),
                });
            }
            t.r()
        }
        None => a.r,
    };
    let k = match (&a.k_override, g.trials) {
        (Some(s), _) => Some(
            s.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Invalid(format!("cannot parse k {s:?} as a non-negative integer")))?,
        ),
        (None, Some(k)) => Some(BigUint::from(k)),
        (None, None) => None,
    };
    emit(g, &paper_params(a.protocol, a.n, r, k.as_ref())?)
}

// iqp-margin

#[derive(Args, Debug)]
pub struct IqpMarginArgs {
    /// A verify report (single run or multi-run summary).
    #[arg(long, required_unless_present = "fidelity")]
    pub report: Option<PathBuf>,
    /// Use this target fidelity instead of a report.
    #[arg(long, conflicts_with = "report")]
    pub fidelity: Option<f64>,
    /// Classical sampler's l1 error, as a fraction (`1/193`) or decimal.
    #[arg(long, default_value = "1/193")]
    pub sampler_error: String,
}

#[derive(Serialize)]
struct ObservedMargin {
    /// Where the fidelity came from.
    source: String,
    /// Whether every run in the report accepted.
    #[serde(skip_serializing_if = "Option::is_none")]
    accepted: Option<bool>,
    report: MarginReport,
}

#[derive(Serialize)]
struct GuaranteedMargin {
    k: u64,
    /// `1 − k^{-1/7}`.
    fidelity_bound: f64,
    report: MarginReport,
}

#[derive(Serialize)]
struct MinimalK {
    /// Exact decimal value.
    k: String,
    digits: usize,
    approx: f64,
    fourteenth_root: f64,
    holds_at_k: bool,
    fails_at_k_minus_one: bool,
}

#[derive(Serialize)]
struct IqpMarginOut {
    sampler_error: String,
    sampler_error_f64: f64,
    threshold: String,
    /// How the unnamed `1/poly(k)` error term is made concrete.
    substitution: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    observed: Option<ObservedMargin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    at_verified_k: Option<GuaranteedMargin>,
    minimal_k: Option<MinimalK>,
}

/// (min target fidelity, all accepted, k) from a verify report.
fn read_report(path: &Path) -> Result<(f64, bool, u64)> {
    let v: Value = parse_json(&read_text(path)?)?;
    let runs: Vec<&Value> = match v.get("reports").and_then(Value::as_array) {
        Some(rs) => rs.iter().collect(),
        None => vec![&v],
    };
    let field = |r: &Value, name: &str| -> Result<Value> {
        r.get(name)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("{}: report has no {name:?}", path.display())))
    };
    let mut fid = f64::INFINITY;
    let mut all = true;
    let mut k = None;
    for r in runs {
        let f = match r.get("target_fidelity_oracle").or_else(|| r.get("target_fidelity")) {
            Some(Value::Number(x)) => x.as_f64().expect("finite"),
            _ => return Err(Error::Invalid(format!("{}: report carries no target fidelity", path.display()))),
        };
        fid = fid.min(f);
        all &= field(r, "accepted")?.as_bool().unwrap_or(false);
        k = field(r, "params")?.get("k").and_then(Value::as_u64);
    }
    if !fid.is_finite() {
        return Err(Error::Invalid(format!("{}: report has no runs", path.display())));
    }
    Ok((fid.clamp(0.0, 1.0), all, k.unwrap_or(0)))
}

fn iqp_margin(a: &IqpMarginArgs, g: &Global) -> Result<Outcome> {
    let s: BigRational = parse_rational(&a.sampler_error)?;
    let s_f = to_f64(&s);
    let (observed, k) = match (&a.report, a.fidelity) {
        (Some(p), _) => {
            let (f, accepted, k) = read_report(p)?;
            let obs = ObservedMargin {
                source: format!("target_fidelity_oracle (minimum over runs) in {}", p.display()),
                accepted: Some(accepted),
                report: supremacy_margin(f, s_f)?,
            };
            (Some(obs), g.trials.or(Some(k)).filter(|&k| k > 0))
        }
        (None, Some(f)) => (
            Some(ObservedMargin {
                source: "--fidelity".into(),
                accepted: None,
                report: supremacy_margin(f, s_f)?,
            }),
            g.trials,
        ),
        (None, None) => (None, g.trials),
    };
    let at_verified_k = k
        .map(|k| {
            let fb = 1.0 - (k as f64).powf(-1.0 / 7.0);
            Ok::<_, Error>(GuaranteedMargin {
                k,
                fidelity_bound: fb,
                report: supremacy_margin(fb, s_f)?,
            })
        })
        .transpose()?;
    let minimal_k = minimal_k_for_margin(&s).map(|k| MinimalK {
        digits: digits(&k),
        approx: approx(&k),
        fourteenth_root: fourteenth_root(&k),
        holds_at_k: margin_holds_at(&k, &s),
        fails_at_k_minus_one: k == BigUint::default() || !margin_holds_at(&(&k - 1u32), &s),
        k: k.to_string(),
    });
    emit(
        g,
        &IqpMarginOut {
            sampler_error: s.to_string(),
            sampler_error_f64: s_f,
            threshold: "1/192".into(),
            substitution: "1/poly(k) taken as 2*k^(-1/14), from 2*sqrt(1-F) with F >= 1 - k^(-1/7)",
            observed,
            at_verified_k,
            minimal_k,
        },
    )
}

// robustness

#[derive(Args, Debug)]
pub struct RobustnessArgs {
    /// Run config; its target and params are used, its prover only for η.
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated ε′ values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    /// Deviation state η (inline JSON or path); default: the config prover's
    /// η if it is iid_deviated, else the maximally mixed state.
    #[arg(long)]
    pub eta: Option<String>,
    /// Protocol runs per grid point.
    #[arg(long, default_value_t = 100)]
    pub runs: u64,
}

fn robustness(a: &RobustnessArgs, g: &Global) -> Result<Outcome> {
    let cfg: RunConfig = load_json(&a.config)?;
    let kind = ProtocolKind::parse(&cfg.protocol)?;
    let target = Target::load(kind, &cfg.target_path(&a.config))?;
    let params = resolve_params(&cfg, &target, g)?;
    let seed = seed_or_entropy(g, cfg.seed);
    let ideal = target.ideal()?;
    let eta_spec = match (&a.eta, &cfg.prover) {
        (Some(s), _) => state_arg(s)?,
        (None, ProverSpec::IidDeviated { eta, .. }) => eta.clone(),
        (None, _) => StateSpec::MaximallyMixed,
    };
    let eta: DenseState = eta_spec.resolve(ideal)?;
    if let Some(bad) = a.grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::Invalid(format!("epsilon' {bad} outside [0, 1]")));
    }
    let sweep = match &target {
        Target::Ground { rescaled, spectrum, .. } => SweepTarget::Ground {
            rh: rescaled,
            ground_state: ideal,
            projector: spectrum.as_ref().map(|s| &s.ground_projector),
        },
        Target::Circuit { decomps, ideal, .. } => SweepTarget::Circuit { decomps, ideal },
        Target::Hypergraph { hypergraph, .. } => SweepTarget::Hypergraph { hypergraph },
    };
    emit(g, &robustness_sweep(&sweep, &eta, &a.grid, &params, a.runs, seed)?)
}

// selftest

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Fewer cases per check.
    #[arg(long)]
    pub quick: bool,
}

fn selftest(a: &SelftestArgs, g: &Global) -> Result<Outcome> {
    let seed = seed_or_entropy(g, None);
    let report = run_selftest(seed, a.quick)?;
    emit(g, &report)?;
    if report.passed {
        Ok(Outcome::Success)
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Ok(Outcome::Failed(format!("failed checks: {}", failed.join(", "))))
    }
}
