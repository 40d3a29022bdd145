//! Named, seeded experiments producing a JSON summary and an optional CSV
//! table. This is the engine behind the `polqec` binary.
//!
//! Summary schema: `{experiment, config_echo, seed, metrics{..}, version}`.
//! Object keys are emitted in sorted order, so identical inputs give
//! byte-identical output.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::channel::{sample_params, ChannelParams};
use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::protocols::bb84::{round_rng, three_sigma};
use crate::protocols::{
    distinguishability_exact, distinguishability_paper, estimate_phi, fpb_eve_success_probability,
    fpb_through_corrector, port_conditional_error, port_conditional_eve_success, run_bb84,
    run_mesoscopic_round, stokes_parameters, AliceChoice, Bb84Config, FpbConfig, KeyPorts,
    MesoscopicConfig,
};
use crate::setups::{run_fig1_corrector, run_fig2_corrector, run_fig4_passive, select_useful_pulse};
use crate::state::{fidelity, ModeLabel, PhotonState, Port};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-trial rows for CSV export.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn write_to<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_path(&self, path: &Path) -> csv::Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }
}

/// Full double precision (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub metrics: Map<String, Value>,
    pub table: Table,
    pub headline: String,
}

impl Report {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).and_then(Value::as_f64)
    }

    pub fn summary(&self, cfg: &RunConfig) -> Value {
        json!({
            "experiment": self.experiment.name(),
            "config_echo": serde_json::to_value(cfg).expect("config serializes"),
            "seed": cfg.seed,
            "metrics": Value::Object(self.metrics.clone()),
            "version": VERSION,
        })
    }

    pub fn summary_string(&self, cfg: &RunConfig) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary(cfg)).expect("summary serializes");
        s.push('\n');
        s
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.experiment {
        Experiment::CorrectSingle => correct_single(cfg),
        Experiment::CompareSetups => compare_setups(cfg),
        Experiment::FpbSweep => fpb_sweep(cfg),
        Experiment::Bb84 => bb84(cfg),
        Experiment::PassiveCoherent => passive_coherent(cfg),
        Experiment::Mesoscopic => mesoscopic(cfg),
        Experiment::Distinguishability => distinguishability(cfg),
    }
}

/// Haar-random qubit amplitudes.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phase = rng.gen_range(0.0..2.0 * PI);
    (
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phase),
    )
}

/// Conditional state on output `port`, moved back to a delay-0 input qubit so
/// it can be compared with what Alice sent.
pub fn port_qubit(out: &PhotonState, port: Port) -> (f64, Option<PhotonState>) {
    let (p, s) = out.postselect(|l| l.port == port);
    (p, s.map(|s| s.map_labels(|l| ModeLabel { delay: 0, port: Port::Input, ..l })))
}

fn metrics(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn grid(n: u64, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

struct SingleTrial {
    input: (Complex64, Complex64),
    params: ChannelParams,
    masses: [f64; 2],
    fidelities: [Option<f64>; 2],
    norm_error: f64,
    detected: u8,
}

fn correct_single(cfg: &RunConfig) -> Result<Report> {
    let trials: Vec<SingleTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = round_rng(cfg.seed, i);
            let (a, b) = random_qubit(&mut rng);
            let params = sample_params(&mut rng, &cfg.channel);
            let q = PhotonState::new_qubit(a, b, Port::Input)?;
            let (out, _) = run_fig2_corrector(&q, &params)?;
            let mut masses = [0.0; 2];
            let mut fidelities = [None; 2];
            for k in 0..2 {
                let (p, s) = port_qubit(&out, Port::Out(k as u8 + 1));
                masses[k] = p;
                fidelities[k] = s.map(|s| fidelity(&s, &q));
            }
            let (port, _) = out.born_sample(|l| Some(l.port), &mut rng)?;
            Ok(SingleTrial {
                input: (a, b),
                params,
                masses,
                fidelities,
                norm_error: (out.norm_sqr() - 1.0).abs(),
                detected: if port == Port::Out(1) { 1 } else { 2 },
            })
        })
        .collect::<Result<_>>()?;

    let n = trials.len() as f64;
    let min_fid = |k: usize| {
        trials
            .iter()
            .filter_map(|t| t.fidelities[k])
            .fold(1.0f64, f64::min)
    };
    let max_mass_err = trials
        .iter()
        .map(|t| {
            let c2 = t.params.phi_mix.cos().powi(2);
            (t.masses[0] - c2).abs().max((t.masses[1] - (1.0 - c2)).abs())
        })
        .fold(0.0, f64::max);
    let freq1 = trials.iter().filter(|t| t.detected == 1).count() as f64 / n;
    let expected1 = trials.iter().map(|t| t.params.phi_mix.cos().powi(2)).sum::<f64>() / n;
    let var: f64 = trials
        .iter()
        .map(|t| {
            let c2 = t.params.phi_mix.cos().powi(2);
            c2 * (1.0 - c2)
        })
        .sum();
    let sigma3 = if var > 0.0 { 3.0 * var.sqrt() / n } else { three_sigma(0.5, trials.len() as u64) };

    let mut table = Table::new(&[
        "trial", "alpha_re", "alpha_im", "beta_re", "beta_im", "lambda", "xi", "phi",
        "p_port1", "p_port2", "fidelity_port1", "fidelity_port2", "detected_port",
    ]);
    for (i, t) in trials.iter().enumerate() {
        let f = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        table.rows.push(vec![
            i.to_string(),
            fmt_f64(t.input.0.re),
            fmt_f64(t.input.0.im),
            fmt_f64(t.input.1.re),
            fmt_f64(t.input.1.im),
            fmt_f64(t.params.lambda_phase),
            fmt_f64(t.params.xi_phase),
            fmt_f64(t.params.phi_mix),
            fmt_f64(t.masses[0]),
            fmt_f64(t.masses[1]),
            f(t.fidelities[0]),
            f(t.fidelities[1]),
            t.detected.to_string(),
        ]);
    }
    let (m1, m2) = (min_fid(0), min_fid(1));
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("trials", json!(cfg.trials)),
            ("min_fidelity_port1", json!(m1)),
            ("min_fidelity_port2", json!(m2)),
            ("max_norm_error", json!(trials.iter().map(|t| t.norm_error).fold(0.0, f64::max))),
            ("max_port_mass_error", json!(max_mass_err)),
            ("port1_frequency", json!(freq1)),
            ("port1_expected", json!(expected1)),
            ("port1_three_sigma", json!(sigma3)),
        ]),
        table,
        headline: format!(
            "correct-single: {} trials, min fidelity {:.15} / {:.15}, port-1 frequency {:.4} (expected {:.4})",
            cfg.trials, m1, m2, freq1, expected1
        ),
    })
}

fn compare_setups(cfg: &RunConfig) -> Result<Report> {
    let rows: Vec<(f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = round_rng(cfg.seed, i);
            let (a, b) = random_qubit(&mut rng);
            let params = sample_params(&mut rng, &cfg.channel);
            let q = PhotonState::new_qubit(a, b, Port::Input)?;
            let (o1, _) = run_fig1_corrector(&q, &params)?;
            let (o2, _) = run_fig2_corrector(&q, &params)?;
            Ok((params.phi_mix, (1.0 - fidelity(&o1, &o2)).max(0.0)))
        })
        .collect::<Result<_>>()?;
    let max_inf = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut table = Table::new(&["trial", "phi", "infidelity"]);
    for (i, (phi, inf)) in rows.iter().enumerate() {
        table.rows.push(vec![i.to_string(), fmt_f64(*phi), fmt_f64(*inf)]);
    }
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("trials", json!(cfg.trials)),
            ("max_infidelity", json!(max_inf)),
        ]),
        table,
        headline: format!("compare-setups: {} trials, max infidelity {max_inf:.3e}", cfg.trials),
    })
}

fn fpb_sweep(cfg: &RunConfig) -> Result<Report> {
    let points = cfg.pe_grid.points();
    let mut table = Table::new(&["pe", "qber", "eve_success", "eve_success_closed_form"]);
    let mut best = (0.0, f64::MIN);
    let mut max_qber_dev = 0.0f64;
    let mut max_eve_dev = 0.0f64;
    let mut at_quarter = Value::Null;
    for (gi, &pe) in points.iter().enumerate() {
        let fpb = FpbConfig::new(pe.clamp(0.0, 0.5))?;
        let closed = fpb_eve_success_probability(fpb.p_e())?;
        let (mut q_sum, mut e_sum, mut count) = (0.0, 0.0, 0u64);
        for t in 0..cfg.trials {
            let mut rng = round_rng(cfg.seed, (gi as u64) << 32 | t);
            let p = sample_params(&mut rng, &cfg.channel);
            for choice in AliceChoice::ALL {
                let (out, _) = fpb_through_corrector(choice, &fpb, &p)?;
                for port in [Port::Out(1), Port::Out(2)] {
                    let (Some(q), Some(e)) = (
                        port_conditional_error(&out, choice, port),
                        port_conditional_eve_success(&out, choice, port),
                    ) else {
                        continue;
                    };
                    max_qber_dev = max_qber_dev.max((q - fpb.p_e()).abs());
                    max_eve_dev = max_eve_dev.max((e - closed).abs());
                    q_sum += q;
                    e_sum += e;
                    count += 1;
                }
            }
        }
        let (qber, eve) = (q_sum / count as f64, e_sum / count as f64);
        if eve > best.1 {
            best = (pe, eve);
        }
        if (pe - 0.25).abs() < 1e-9 {
            at_quarter = json!(eve);
        }
        table
            .rows
            .push(vec![fmt_f64(pe), fmt_f64(qber), fmt_f64(eve), fmt_f64(closed)]);
    }
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("points", json!(points.len())),
            ("channel_draws", json!(cfg.trials)),
            ("argmax_pe", json!(best.0)),
            ("max_eve_success", json!(best.1)),
            ("eve_success_at_0_25", at_quarter),
            ("max_qber_deviation", json!(max_qber_dev)),
            ("max_eve_success_deviation", json!(max_eve_dev)),
        ]),
        table,
        headline: format!(
            "fpb-sweep: {} points, Eve success peaks at {:.6} for pe = {}",
            points.len(),
            best.1,
            best.0
        ),
    })
}

fn bb84(cfg: &RunConfig) -> Result<Report> {
    let eve = cfg.pe.map(FpbConfig::new).transpose()?;
    let bcfg = Bb84Config {
        n_rounds: cfg.trials as usize,
        eve,
        channel: cfg.channel,
        key_ports: cfg.key_ports,
        seed: cfg.seed,
    };
    let (stats, records) = run_bb84(&bcfg)?;
    let expected_sift = match cfg.key_ports {
        KeyPorts::Port1 => 0.25,
        KeyPorts::Both => 0.5,
    };
    let expected_qber = cfg.pe.unwrap_or(0.0);
    let expected_eve = cfg.pe.map(fpb_eve_success_probability).transpose()?;

    let mut table = Table::new(&[
        "round", "alice_state", "alice_bit", "bob_basis", "phi", "detected_port",
        "detected_delay", "bob_bit", "sifted", "error", "eve_guess",
    ]);
    for r in &records {
        table.rows.push(vec![
            r.round.to_string(),
            format!("{:?}", r.alice_state),
            r.alice_bit.to_string(),
            format!("{:?}", r.bob_basis),
            fmt_f64(r.phi_mix),
            r.detected_port.to_string(),
            r.detected_delay.to_string(),
            r.bob_bit.to_string(),
            r.sifted.to_string(),
            r.error.to_string(),
            r.eve_guess.map(|b| b.to_string()).unwrap_or_default(),
        ]);
    }
    let headline = format!(
        "bb84: {} rounds, sift rate {:.4}, QBER {:.4}{}",
        stats.n_rounds,
        stats.sift_rate,
        stats.qber,
        stats
            .eve_success
            .map(|e| format!(", Eve success {e:.4}"))
            .unwrap_or_default()
    );
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("n_rounds", json!(stats.n_rounds)),
            ("n_sifted", json!(stats.n_sifted)),
            ("n_errors", json!(stats.n_errors)),
            ("sift_rate", json!(stats.sift_rate)),
            ("sift_rate_expected", json!(expected_sift)),
            ("sift_rate_three_sigma", json!(three_sigma(expected_sift, stats.n_rounds))),
            ("qber", json!(stats.qber)),
            ("qber_expected", json!(expected_qber)),
            ("qber_three_sigma", json!(three_sigma(expected_qber, stats.n_sifted))),
            ("eve_success", json!(stats.eve_success)),
            ("eve_success_expected", json!(expected_eve)),
            (
                "eve_success_three_sigma",
                json!(expected_eve.map(|e| three_sigma(e, stats.n_sifted))),
            ),
        ]),
        table,
        headline,
    })
}

fn passive_coherent(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::new(&[
        "phi", "power_port1", "power_port2", "expected_port1", "expected_port2",
        "discard_power", "total_power", "input_power",
    ]);
    let (mut max_pow, mut max_ratio, mut max_close, mut useful_sum) = (0.0f64, 0.0f64, 0.0f64, 0.0);
    let phis = grid(cfg.trials, 0.0, FRAC_PI_2);
    for (i, &phi) in phis.iter().enumerate() {
        let mut rng = round_rng(cfg.seed, i as u64);
        let (a, b) = random_qubit(&mut rng);
        let (a, b) = (a * cfg.alpha, b * cfg.alpha);
        let drawn = sample_params(&mut rng, &cfg.channel);
        let p = ChannelParams::new(drawn.lambda_phase, drawn.xi_phase, phi);
        let (out, _) = run_fig4_passive(a, b, &p);
        let input = a.norm_sqr() + b.norm_sqr();
        let (p1, p2) = (out.power_at(1, Port::Out(1)), out.power_at(1, Port::Out(2)));
        let (e1, e2) = (input * phi.sin().powi(2) / 4.0, input * phi.cos().powi(2) / 4.0);
        if input > 0.0 {
            max_pow = max_pow.max(((p1 - e1).abs().max((p2 - e2).abs())) / input);
            for port in [Port::Out(1), Port::Out(2)] {
                let [h, v] = out.amplitudes(1, port);
                let scale = (h.norm_sqr() + v.norm_sqr()).sqrt() * input.sqrt();
                if scale > 0.0 {
                    max_ratio = max_ratio.max((v * a - h * b).norm() / scale);
                }
            }
            useful_sum += select_useful_pulse(&out).total_power() / input;
        }
        let discard = out.port_power(Port::Discard);
        let scale = if input > 0.0 { input } else { 1.0 };
        max_close = max_close.max((out.total_power() - input).abs() / scale);
        table.rows.push(vec![
            fmt_f64(phi),
            fmt_f64(p1),
            fmt_f64(p2),
            fmt_f64(e1),
            fmt_f64(e2),
            fmt_f64(discard),
            fmt_f64(out.total_power() - discard),
            fmt_f64(input),
        ]);
    }
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("points", json!(phis.len())),
            ("max_useful_power_error", json!(max_pow)),
            ("max_ratio_error", json!(max_ratio)),
            ("max_power_closure_error", json!(max_close)),
            ("mean_useful_fraction", json!(useful_sum / phis.len() as f64)),
        ]),
        table,
        headline: format!(
            "passive-coherent: {} points, max useful-power error {max_pow:.3e}, power closure {max_close:.3e}",
            phis.len()
        ),
    })
}

fn mesoscopic(cfg: &RunConfig) -> Result<Report> {
    let mcfg = MesoscopicConfig::new(cfg.m_bases, Complex64::new(cfg.alpha, 0.0))?;
    let mut table = Table::new(&[
        "phi", "bit", "basis", "decoded", "d0_port1", "d1_port1", "d0_port2", "d1_port2", "phi_estimate",
    ]);
    let (mut rounds, mut failures) = (0u64, 0u64);
    let (mut max_wrong, mut max_phi_err, mut max_pow_err) = (0.0f64, 0.0f64, 0.0f64);
    let n_in = cfg.alpha * cfg.alpha;
    for (i, phi) in grid(cfg.trials, 0.0, FRAC_PI_2).into_iter().enumerate() {
        let mut rng = round_rng(cfg.seed, i as u64);
        let drawn = sample_params(&mut rng, &cfg.channel);
        let p = ChannelParams::new(drawn.lambda_phase, drawn.xi_phase, phi);
        for bit in [0u8, 1] {
            for basis in 1..=cfg.m_bases {
                let o = run_mesoscopic_round(bit, basis, &mcfg, &p)?;
                rounds += 1;
                if o.decoded_bit != Some(bit) {
                    failures += 1;
                }
                let wrong = 1 - bit as usize;
                max_wrong = max_wrong.max(o.detector_powers[0][wrong]).max(o.detector_powers[1][wrong]);
                max_pow_err = max_pow_err
                    .max((o.port_powers[0] - n_in * phi.sin().powi(2) / 4.0).abs())
                    .max((o.port_powers[1] - n_in * phi.cos().powi(2) / 4.0).abs());
                let est = estimate_phi(o.port_powers[0], o.port_powers[1]).ok();
                if let Some(e) = est {
                    max_phi_err = max_phi_err.max((e - phi).abs());
                }
                table.rows.push(vec![
                    fmt_f64(phi),
                    bit.to_string(),
                    basis.to_string(),
                    o.decoded_bit.map(|b| b.to_string()).unwrap_or_default(),
                    fmt_f64(o.detector_powers[0][0]),
                    fmt_f64(o.detector_powers[0][1]),
                    fmt_f64(o.detector_powers[1][0]),
                    fmt_f64(o.detector_powers[1][1]),
                    est.map(fmt_f64).unwrap_or_default(),
                ]);
            }
        }
    }
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("rounds", json!(rounds)),
            ("m_bases", json!(cfg.m_bases)),
            ("decode_failures", json!(failures)),
            ("max_wrong_detector_power", json!(max_wrong)),
            ("max_port_power_error", json!(max_pow_err)),
            ("max_phi_estimate_error", json!(max_phi_err)),
        ]),
        table,
        headline: format!(
            "mesoscopic: {rounds} rounds with M = {}, {failures} decode failures, max phi error {max_phi_err:.3e}",
            cfg.m_bases
        ),
    })
}

fn distinguishability(cfg: &RunConfig) -> Result<Report> {
    let alpha = Complex64::new(cfg.alpha, 0.0);
    let mut table = Table::new(&["theta", "closed_form", "exact", "log_ratio", "s1", "s2", "s3"]);
    for theta in grid(cfg.trials, 0.0, PI) {
        let (dp, de) = (distinguishability_paper(alpha, theta), distinguishability_exact(alpha, theta));
        let ratio = de.ln() / dp.ln();
        let st = stokes_parameters(alpha, theta);
        table.rows.push(vec![
            fmt_f64(theta),
            fmt_f64(dp),
            fmt_f64(de),
            if ratio.is_finite() { fmt_f64(ratio) } else { String::new() },
            fmt_f64(st.means[0]),
            fmt_f64(st.means[1]),
            fmt_f64(st.means[2]),
        ]);
    }
    let small = 1e-4;
    let small_ratio = distinguishability_exact(alpha, small).ln() / distinguishability_paper(alpha, small).ln();
    Ok(Report {
        experiment: cfg.experiment,
        metrics: metrics(vec![
            ("points", json!(cfg.trials)),
            ("alpha", json!(cfg.alpha)),
            ("small_angle_log_ratio", json!(small_ratio)),
            ("closed_form_at_pi", json!(distinguishability_paper(alpha, PI))),
            ("exact_at_pi", json!(distinguishability_exact(alpha, PI))),
        ]),
        table,
        headline: format!(
            "distinguishability: |alpha|^2 = {:.3}, small-angle log ratio exact/closed-form = {small_ratio:.6}",
            alpha.norm_sqr()
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Reduced-size run of every experiment with pass/fail verdicts.
pub fn self_check(seed: u64) -> Result<Vec<Check>> {
    let cfg = |e: Experiment, trials: u64| RunConfig {
        seed,
        trials,
        ..RunConfig::defaults(e)
    };
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(Check { name, passed, detail });

    let r = run(&cfg(Experiment::CorrectSingle, 1_000))?;
    let (f1, f2) = (r.metric("min_fidelity_port1").unwrap(), r.metric("min_fidelity_port2").unwrap());
    push("correction-universality", f1 >= 1.0 - 1e-12 && f2 >= 1.0 - 1e-12, format!("min fidelity {f1:.16} / {f2:.16}"));
    let (fr, sg) = (r.metric("port1_frequency").unwrap(), r.metric("port1_three_sigma").unwrap());
    push("uniform-phi-limit", (fr - 0.5).abs() <= three_sigma(0.5, 1_000) && sg > 0.0, format!("port-1 frequency {fr:.4}"));

    let r = run(&cfg(Experiment::CompareSetups, 1_000))?;
    let inf = r.metric("max_infidelity").unwrap();
    push("setup-equivalence", inf < 1e-12, format!("max infidelity {inf:.3e}"));

    let r = run(&cfg(Experiment::FpbSweep, 3))?;
    let best = r.metric("max_eve_success").unwrap();
    let dev = r.metric("max_qber_deviation").unwrap();
    push(
        "fpb-figures",
        (r.metric("argmax_pe").unwrap() - 0.25).abs() < 1e-12 && (best - 0.8535).abs() < 1e-4 && dev < 1e-12,
        format!("peak {best:.6}, qber deviation {dev:.3e}"),
    );

    let mut c = cfg(Experiment::Bb84, 20_000);
    let r = run(&c)?;
    let (sift, qber) = (r.metric("sift_rate").unwrap(), r.metric("qber").unwrap());
    push("bb84-no-eve", (sift - 0.25).abs() <= three_sigma(0.25, 20_000) && qber == 0.0, format!("sift {sift:.4}, qber {qber}"));
    c.pe = Some(0.25);
    let r = run(&c)?;
    let n = r.metric("n_sifted").unwrap() as u64;
    let (qber, eve) = (r.metric("qber").unwrap(), r.metric("eve_success").unwrap());
    let expected_eve = fpb_eve_success_probability(0.25)?;
    push(
        "bb84-with-eve",
        (qber - 0.25).abs() <= three_sigma(0.25, n) && (eve - expected_eve).abs() <= three_sigma(expected_eve, n),
        format!("qber {qber:.4}, Eve success {eve:.4}"),
    );

    let r = run(&cfg(Experiment::PassiveCoherent, 50))?;
    let (pw, ra, cl) = (
        r.metric("max_useful_power_error").unwrap(),
        r.metric("max_ratio_error").unwrap(),
        r.metric("max_power_closure_error").unwrap(),
    );
    push("passive-corrector", pw < 1e-12 && ra < 1e-12 && cl < 1e-12, format!("power {pw:.1e}, ratio {ra:.1e}, closure {cl:.1e}"));

    let r = run(&cfg(Experiment::Mesoscopic, 20))?;
    let (fails, wrong, phi_err) = (
        r.metric("decode_failures").unwrap(),
        r.metric("max_wrong_detector_power").unwrap(),
        r.metric("max_phi_estimate_error").unwrap(),
    );
    push("mesoscopic-round-trip", fails == 0.0 && wrong < 1e-12 && phi_err < 1e-12, format!("{fails} failures, phi error {phi_err:.1e}"));

    let r = run(&cfg(Experiment::Distinguishability, 20))?;
    let ratio = r.metric("small_angle_log_ratio").unwrap();
    push("distinguishability-discrepancy", (ratio - 0.5).abs() < 1e-6, format!("log ratio {ratio:.8}"));

    let c = cfg(Experiment::Bb84, 2_000);
    let same = run(&c)?.summary_string(&c) == run(&c)?.summary_string(&c);
    push("determinism", same, "repeated bb84 summary identical".into());

    Ok(checks)
}
