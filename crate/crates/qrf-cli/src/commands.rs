use std::f64::consts::PI;
use std::path::Path;

use serde_json::{json, Value};

use qrf::align::{self, GuessSampler, Payoff, SectorDecomposition, Support};
use qrf::bounded;
use qrf::checks::{run_suite, SuiteConfig};
use qrf::comm::{self, Gauge};
use qrf::group_rep::{Spin, Su2Element};
use qrf::quantum_core::linalg::{max_abs, trace};
use qrf::quantum_core::random::{random_channel, random_density, random_effect, random_operator};
use qrf::quantum_core::{fidelity, QState, StateFile, StateVector};
use qrf::resources::{self, LocalNumbers};
use qrf::rng;
use qrf::ssr_lift::{invariant_born_check, DollarMap};
use qrf::twirl::{self, CyclicGroup, InvarianceTarget, Representation};
use qrf::QrfError;

use crate::args::*;
use crate::output::{Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Qrf(#[from] QrfError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

type Out = Result<Report, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn load_state(path: &Path) -> Result<QState, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(StateFile::from_json(&text)?.to_state()?)
}

fn load_pure(path: &Path) -> Result<StateVector, CliError> {
    match load_state(path)? {
        QState::Pure(s) => Ok(s),
        QState::Mixed(_) => Err(usage(format!("{} holds a density matrix; a state vector is required", path.display()))),
    }
}

/// Accepts `3`, `1.5` or `3/2`.
pub fn parse_spin(text: &str) -> Result<Spin, CliError> {
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| usage(format!("bad spin {text:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| usage(format!("bad spin {text:?}")))?;
            a / b
        }
        None => text.trim().parse().map_err(|_| usage(format!("bad spin {text:?}")))?,
    };
    Ok(Spin::new(value)?)
}

pub fn run(cli: &Cli) -> Out {
    let seed = cli.seed;
    match &cli.command {
        Command::Twirl(a) => twirl_cmd(a),
        Command::Comm(CommCmd::Capacity { n }) => capacity(*n),
        Command::Comm(CommCmd::Encode(a)) => encode(a, seed),
        Command::Align(AlignCmd::Optimize { frame, n, merit }) => optimize(*frame, *n, *merit),
        Command::Align(AlignCmd::Simulate { frame, n, trials }) => simulate(*frame, *n, *trials, seed),
        Command::Align(AlignCmd::Bitwise { k, epsilon, theta, runs }) => bitwise(*k, *epsilon, *theta, *runs, seed),
        Command::Bounded(BoundedCmd::Discriminate { j }) => discriminate(parse_spin(j)?),
        Command::Bounded(BoundedCmd::Degrade { j, steps }) => degrade(parse_spin(j)?, *steps),
        Command::Bounded(BoundedCmd::Longevity { j, epsilon }) => longevity(parse_spin(j)?, *epsilon),
        Command::Bounded(BoundedCmd::Jc { alpha2, g, cutoff }) => jc(*alpha2, *g, *cutoff),
        Command::Lift(LiftCmd::BornCheck { group: LiftGroup::Zd, d, trials }) => born_check(*d, *trials, seed),
        Command::Resources(ResourcesCmd::Siv(a)) => siv_cmd(a),
        Command::Resources(ResourcesCmd::Essr(a)) => essr_cmd(a),
        Command::Resources(ResourcesCmd::Demo { protocol }) => demo(*protocol),
        Command::Suite(a) => suite(a.fast, seed),
    }
}

fn twirl_cmd(a: &TwirlArgs) -> Out {
    let state = load_state(&a.state)?;
    let rho = state.to_density();
    let dims = rho.dims().to_vec();
    if let Some(n) = a.n_qubits {
        if dims != vec![2; n] {
            return Err(usage(format!("state dims {dims:?} are not {n} qubits")));
        }
    }
    let (out, rep) = match a.group {
        GroupArg::U1 => {
            let number = twirl::total_occupation(&dims);
            let charges = number.iter().map(|&x| x as i64).collect();
            (twirl::u1_twirl(&rho, &number)?, Representation::U1 { charges })
        }
        GroupArg::Su2 => {
            if dims.iter().any(|&d| d != 2) {
                return Err(usage("the SU(2) twirl acts on qubit registers only"));
            }
            let n = dims.len();
            (twirl::su2_twirl_qubits(&rho, n)?, Representation::Su2Qubits { n })
        }
    };
    let defect = twirl::invariance_defect(&InvarianceTarget::Operator(out.matrix()), &rep)?;
    Ok(Report::new(json!({
        "group": format!("{:?}", a.group).to_lowercase(),
        "dims": dims,
        "purity_in": rho.purity(),
        "purity_out": out.purity(),
        "invariance_defect": defect,
        "twirled": to_json(&StateFile::from_density(&out)),
    })))
}

fn capacity(n: usize) -> Out {
    let report = comm::dfs_report(n)?;
    let caps = comm::private_capacities(n)?;
    let mut table = Table::new(&["j", "gauge_dim", "multiplicity"]);
    for r in &report.rows {
        table.push(vec![r.j, r.gauge_dim as f64, r.multiplicity as f64]);
    }
    let total: u128 = report.rows.iter().map(|r| r.gauge_dim as u128 * r.multiplicity).sum();
    Ok(Report::new(json!({
        "n_qubits": n,
        "sectors": to_json(&report.rows),
        "dimension_check": {"sum": total.to_string(), "reference": (1u128 << n).to_string()},
        "classical_messages": report.classical_count.to_string(),
        "largest_noiseless_subsystem": {"j": report.best_j, "dimension": report.best_multiplicity.to_string()},
        "noiseless_qubits": (report.best_multiplicity as f64).log2(),
        "private_quantum_rate": caps.quantum,
        "private_classical_rate_leading_order": caps.classical,
    }))
    .with_table(table))
}

fn encode(a: &EncodeArgs, seed: u64) -> Out {
    let mut g = rng::from_seed(seed);
    let rotation = Su2Element::haar(&mut g);
    match a.scheme {
        Scheme::Bit => {
            if a.bit > 1 {
                return Err(usage("--bit must be 0 or 1"));
            }
            let sent = comm::encode_singlet_triplet_bit(a.bit == 1).to_density();
            let received = sent.conjugate_by(&rotation.collective(2))?;
            let dec = comm::decode_singlet_triplet_bit(&received)?;
            Ok(Report::new(json!({
                "scheme": "bit",
                "sent": a.bit,
                "decoded": dec.bit as u8,
                "probabilities": dec.probabilities,
                "rotation_quaternion": rotation.q,
            })))
        }
        Scheme::Qubit => {
            let psi = match &a.state {
                Some(p) => load_pure(p)?,
                None => StateVector::from_real(&[1.0, 1.0], vec![2])?,
            };
            let sent = comm::encode_logical_qubit_3(&psi, Gauge::Mixed)?;
            let received = sent.conjugate_by(&rotation.collective(3))?;
            let decoded = comm::decode_logical_qubit_3(&received)?;
            let f = fidelity(&psi.to_density(), &decoded)?;
            Ok(Report::new(json!({
                "scheme": "qubit",
                "fidelity": f,
                "reference": 1.0,
                "decoded": to_json(&StateFile::from_density(&decoded)),
                "rotation_quaternion": rotation.q,
            })))
        }
    }
}

fn optimize(frame: Frame, n: usize, merit: Merit) -> Out {
    match merit {
        Merit::Fidelity => {
            let (opt, reference) = match frame {
                Frame::Phase => (align::phase_fidelity_optimum(n)?, Some(0.5 * (1.0 + (PI / (n as f64 + 2.0)).cos()))),
                Frame::Direction => (align::direction_fidelity_optimum(n)?, Some(align::direction_fidelity_closed_form(n))),
                Frame::Cartesian => (align::cartesian_fidelity_optimum(n)?, None),
            };
            let mut table = Table::new(&["label", "coefficient"]);
            for (l, c) in opt.labels.iter().zip(&opt.coefficients) {
                table.push(vec![*l, *c]);
            }
            Ok(Report::new(json!({
                "frame": format!("{frame:?}").to_lowercase(),
                "n": n,
                "merit": "fidelity",
                "fidelity": opt.fidelity,
                "reference": reference,
                "labels": opt.labels,
                "coefficients": opt.coefficients,
            }))
            .with_table(table))
        }
        Merit::Likelihood => {
            let (dec, reference) = match frame {
                Frame::Phase => (SectorDecomposition::phase(n), (n + 1) as f64),
                Frame::Cartesian => {
                    let nf = n as f64;
                    (SectorDecomposition::qubits(n)?, nf.powi(3) / 6.0 + 5.0 * nf / 6.0 + 1.0)
                }
                Frame::Direction => return Err(usage("likelihood is available for phase and cartesian frames")),
            };
            let ml = align::max_likelihood_optimum(&dec)?;
            let rank = dec.twirl_rank(&ml.state)?;
            Ok(Report::new(json!({
                "frame": format!("{frame:?}").to_lowercase(),
                "n": n,
                "merit": "likelihood",
                "mu_max": ml.mu_max,
                "twirl_rank": rank,
                "reference": reference,
            })))
        }
    }
}

fn simulate(frame: Frame, n: usize, trials: usize, seed: u64) -> Out {
    let (dec, psi, payoff, support_full) = match frame {
        Frame::Phase => {
            let (d, p) = align::phase_signal(&align::phase_fidelity_optimum(n)?)?;
            (d, p, Payoff::phase(), true)
        }
        Frame::Direction => {
            let (d, p) = align::direction_signal(&align::direction_fidelity_optimum(n)?)?;
            (d, p, Payoff::direction(), false)
        }
        Frame::Cartesian => {
            let (d, p) = align::cartesian_signal(&align::cartesian_fidelity_optimum(n)?)?;
            (d, p, Payoff::cartesian(), false)
        }
    };
    let support = if support_full { Support::Full } else { Support::MatchState(&psi) };
    let m = align::fiducial_povm(&dec, support)?;
    let exact = align::expected_payoff(&m, &psi, &payoff);
    let run = align::simulate_alignment(&m, &psi, &payoff, trials, seed, GuessSampler::Auto)?;
    let mut table = Table::new(&["trial", "payoff"]);
    for (i, p) in run.payoffs.iter().enumerate() {
        table.push(vec![i as f64, *p]);
    }
    let within = (run.mean - exact).abs() <= 3.0 * run.stderr;
    Ok(Report::new(json!({
        "frame": format!("{frame:?}").to_lowercase(),
        "n": n,
        "trials": trials,
        "seed": seed,
        "mean": run.mean,
        "stderr": run.stderr,
        "reference": exact,
        "within_3_stderr": within,
    }))
    .with_table(table))
}

fn bitwise(k: u32, epsilon: f64, theta: f64, runs: Option<usize>, seed: u64) -> Out {
    match runs {
        Some(runs) => {
            if runs == 0 {
                return Err(usage("--runs must be positive"));
            }
            let rate = align::bitwise_failure_rate(k, epsilon, runs, seed)?;
            let n = align::bitwise_repetitions(k, epsilon);
            Ok(Report::new(json!({
                "k": k,
                "epsilon": epsilon,
                "runs": runs,
                "failure_rate": rate,
                "bound": epsilon,
                "repetitions": n,
                "qubit_count": n as u128 * ((1u128 << k) - 1),
            })))
        }
        None => {
            let run = align::bitwise_phase_protocol(k, epsilon, theta, seed)?;
            Ok(Report::new(to_json(&run)))
        }
    }
}

fn discriminate(j: Spin) -> Out {
    let d = bounded::discriminate_aligned(j)?;
    let mut v = to_json(&d);
    v["reference"] = json!(bounded::discrimination_closed_form(j));
    Ok(Report::new(v))
}

fn degrade(j: Spin, steps: u32) -> Out {
    let curve = bounded::degradation_curve(j, steps)?;
    let mut table = Table::new(&["n", "simulated", "closed_form"]);
    for (n, (s, c)) in curve.simulated.iter().zip(&curve.closed_form).enumerate() {
        table.push(vec![n as f64, *s, *c]);
    }
    Ok(Report::new(json!({
        "j": curve.j,
        "steps": steps,
        "final": curve.simulated.last(),
        "reference": curve.closed_form.last(),
        "max_deviation": curve.max_deviation(),
    }))
    .with_table(table))
}

fn longevity(j: Spin, epsilon: f64) -> Out {
    Ok(Report::new(to_json(&bounded::longevity(j, epsilon)?)))
}

fn jc(alpha2: f64, g: f64, cutoff: Option<usize>) -> Out {
    if alpha2.is_nan() || alpha2 <= 0.0 {
        return Err(usage("--alpha2 must be positive"));
    }
    let res = bounded::jc_gate_fidelity(qrf::quantum_core::linalg::c(alpha2.sqrt(), 0.0), g, cutoff)?;
    Ok(Report::new(to_json(&res)))
}

fn born_check(d: usize, trials: usize, seed: u64) -> Out {
    let map = DollarMap::regular(CyclicGroup::new(d, vec![0, 1])?)?;
    let mut g = rng::from_seed(seed);
    let mut born: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for _ in 0..trials {
        let rho = random_density(vec![2], &mut g);
        let e = random_effect(2, &mut g);
        let ch = random_channel(2, 2, &mut g);
        let b = invariant_born_check(&map, &rho, &e, Some(&ch))?;
        born = born.max((b.lhs - b.rhs).abs());
        let a = random_operator(2, &mut g);
        let la = map.apply(&a)?;
        hom = hom.max(max_abs(&(map.apply(&(&a * &e))? - &la * map.apply(&e)?)));
        inv = inv.max(map.invariance_defect(&la));
    }
    let lifted_identity = map.apply(&qrf::quantum_core::linalg::identity(2))?;
    Ok(Report::new(json!({
        "group": "zd",
        "d": d,
        "trials": trials,
        "seed": seed,
        "max_born_discrepancy": born,
        "max_homomorphism_defect": hom,
        "max_invariance_defect": inv,
        "lifted_identity_trace": trace(&lifted_identity).re,
        "reference": 0.0,
    })))
}

fn cut(state: &StateVector, part_a: &Option<Vec<usize>>) -> Result<LocalNumbers, CliError> {
    let dims = state.dims();
    if dims.len() < 2 {
        return Err(usage("a bipartite state needs at least two factors"));
    }
    let a = part_a.clone().unwrap_or_else(|| (0..dims.len() / 2).collect());
    Ok(LocalNumbers::occupation(dims, &a)?)
}

fn siv_cmd(a: &CutArgs) -> Out {
    let psi = load_pure(&a.state)?;
    let numbers = cut(&psi, &a.part_a)?;
    Ok(Report::new(json!({
        "part_a": numbers.part_a,
        "siv": resources::siv(&psi, &numbers)?,
    })))
}

fn essr_cmd(a: &CutArgs) -> Out {
    let state = load_state(&a.state)?;
    let dims_source = match &state {
        QState::Pure(s) => s.clone(),
        QState::Mixed(rho) => StateVector::basis(rho.dims().to_vec(), 0),
    };
    let numbers = cut(&dims_source, &a.part_a)?;
    let e = resources::e_ssr_pure(&state, &numbers)?;
    let unrestricted = match &state {
        QState::Pure(s) => Some(qrf::quantum_core::entanglement_entropy(s, &numbers.part_a)?),
        QState::Mixed(_) => None,
    };
    Ok(Report::new(json!({
        "part_a": numbers.part_a,
        "e_ssr": e,
        "entanglement_entropy": unrestricted,
    })))
}

fn demo(p: Protocol) -> Out {
    match p {
        Protocol::Activate | Protocol::Distill => {
            let (name, out, reference) = match p {
                Protocol::Activate => ("activate", resources::activate_refbit(), 0.25),
                _ => ("distill", resources::two_copy_distill(), 0.5),
            };
            let e = resources::e_ssr_pure(&QState::Pure(out.post_state.clone()), &out.numbers)?;
            Ok(Report::new(json!({
                "protocol": name,
                "modes": if name == "activate" { ["A_ent", "A_ref", "B_ent", "B_ref"] } else { ["A1", "A2", "B1", "B2"] },
                "success_probability": out.success_probability,
                "reference": reference,
                "post_state_e_ssr": e,
                "post_state": to_json(&StateFile::from_vector(&out.post_state)),
            })))
        }
        Protocol::Bitcommit => {
            let bc = resources::bit_commitment_tokens();
            Ok(Report::new(json!({
                "protocol": "bitcommit",
                "fidelity": bc.fidelity,
                "reference": 1.0 / 9.0,
                "pinch_difference": bc.pinch_difference,
                "ssr_distinguishable": bc.ssr_distinguishable,
                "token_labels": resources::token_labels(),
            })))
        }
    }
}

fn suite(fast: bool, seed: u64) -> Out {
    let mut cfg = if fast { SuiteConfig::fast() } else { SuiteConfig::full() };
    cfg.seed = seed;
    let results = run_suite(&cfg);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let ok = results.iter().all(|r| r.pass);
    let mut report = Report::new(json!({
        "fast": fast,
        "seed": seed,
        "passed": results.iter().filter(|r| r.pass).count(),
        "total": results.len(),
        "criteria": to_json(&results),
    }));
    report.ok = ok;
    Ok(report)
}
