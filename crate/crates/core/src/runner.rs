//! File-producing front end: figure reproduction, config runs, reports and decay fits.
//!
//! Every CSV starts with a header row and writes numbers as `{:.16e}`; missing values are empty
//! fields. Summaries are pretty-printed JSON. Nothing time- or machine-dependent is written, so
//! reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{fit_exponential, peaks_of, DEFAULT_T_MIN};
use crate::config::{InitialCondition, ModelSelector, ScenarioConfig};
use crate::dynamics::{
    initial_state_atom_m, initial_state_photon_at_site, time_grid, ModelKind, WaveFunction,
};
use crate::error::{Error, Result};
use crate::figures;
use crate::model::{
    atom_eigensystem_exact, atom_eigensystem_perturbative, SystemParams, C64,
};
use crate::oracle::{lindblad_from_state, population_report, LindbladOptions};
use crate::presets::{self, Figure};
use crate::spectral::{AnalyticSolution, BoundState, BoundStateSet};
use crate::thermo::{average_power, sweep_ergotropy, work_series, SweepOptions};

/// Files written by one command and the summary record that went into its JSON file.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    fn finish(self, summary: Value) -> Outcome {
        Outcome {
            files: self.files,
            summary,
        }
    }
}

fn bound_state_json(s: &BoundState) -> Value {
    json!({
        "location": s.location,
        "energy": complex(s.energy),
        "residue_weight": complex(s.residue_weight),
        "pole_amplitude": complex(s.pole_amplitude),
        "edge_offset": complex(s.edge_offset),
    })
}

fn bound_set_json(set: &BoundStateSet) -> Value {
    let phi = set.phi();
    json!({
        "band": { "lower_edge": set.band.lower_edge, "upper_edge": set.band.upper_edge },
        "count": set.count(),
        "above_band": set.above.as_ref().map(bound_state_json),
        "below_band": set.below.as_ref().map(bound_state_json),
        "phi": phi.map(complex),
        "rabi_period": phi.map(|p| 2.0 * std::f64::consts::PI / p.re),
    })
}

fn sweep_rows(omega0: &[f64], xi: &[f64], w_max: &[Option<f64>]) -> Vec<Vec<String>> {
    omega0
        .iter()
        .flat_map(|&w| xi.iter().map(move |&x| (w, x)))
        .zip(w_max)
        .map(|((w, x), v)| vec![fmt_num(w), fmt_num(x), fmt_opt(*v)])
        .collect()
}

const SWEEP_HEADER: [&str; 3] = ["omega0", "xi", "w_max"];

/// Regenerate the data behind one figure in `out_dir`: `<id>.csv`, `<id>_summary.json` and the
/// equivalent scenario as `<id>_config.json`.
pub fn reproduce(figure: Figure, out_dir: &Path) -> Result<Outcome> {
    let id = figure.id();
    let params = figure.params();
    let config = ScenarioConfig::from_preset(figure);
    let mut out = Writer::new(out_dir)?;
    let csv_name = format!("{id}.csv");
    let mut summary = json!({ "figure": id, "unit": figure.unit() });

    match figure {
        Figure::Fig2 => {
            let rows = figures::bound_state_sweep(&params, 200)?;
            out.csv(
                &csv_name,
                &["e1", "bound_above", "bound_below"],
                rows.iter().map(|r| vec![fmt_num(r.e1), fmt_opt(r.above), fmt_opt(r.below)]),
            )?;
            let band = (params.omega0 - 2.0 * params.xi, params.omega0 + 2.0 * params.xi);
            let inside = rows.iter().filter(|r| r.e1 > band.0 && r.e1 < band.1);
            summary["band"] = json!([band.0, band.1]);
            summary["counts_inside_band"] = json!(inside.map(|r| r.count()).collect::<Vec<_>>());
            summary["max_count_outside_band"] = json!(rows
                .iter()
                .filter(|r| r.e1 <= band.0 || r.e1 >= band.1)
                .map(|r| r.count())
                .max());
        }
        Figure::Fig3a | Figure::Fig3b => {
            let d = figures::dark_dynamics(&params, config.time.t_max, config.time.dt, 20.0)?;
            out.csv(
                &csv_name,
                &["t", "p_numeric", "p_long_time"],
                (0..d.times.len())
                    .map(|i| vec![fmt_num(d.times[i]), fmt_num(d.p_numeric[i]), fmt_num(d.p_long_time[i])]),
            )?;
            let late_gap = (0..d.times.len())
                .filter(|&i| d.times[i] >= 20.0)
                .map(|i| (d.p_numeric[i] - d.p_long_time[i]).abs())
                .fold(0.0, f64::max);
            summary["e1"] = complex(d.e1);
            summary["bound_states"] = bound_set_json(&d.bound);
            summary["peak_spacing"] = json!(d.peak_spacing);
            summary["max_abs_difference_after_t20"] = json!(late_gap);
        }
        Figure::Fig4 => {
            let l = figures::lifetime(&params, config.time.t_max, config.time.dt, DEFAULT_T_MIN)?;
            out.csv(
                &csv_name,
                &["t", "p_coupled", "p_decoupled"],
                (0..l.times.len())
                    .map(|i| vec![fmt_num(l.times[i]), fmt_num(l.p_coupled[i]), fmt_num(l.p_decoupled[i])]),
            )?;
            summary["e1"] = complex(l.e1);
            summary["kappa"] = json!(params.kappa);
            summary["coupled_fit"] = json!(l.coupled_fit);
            summary["decoupled_fit"] = json!(l.decoupled_fit);
            summary["kappa_prime"] = json!(l.coupled_fit.rate);
            summary["gamma"] = json!(l.decoupled_fit.rate);
            summary["gamma_over_kappa_prime"] = json!(l.decoupled_fit.rate / l.coupled_fit.rate);
        }
        Figure::Fig5 | Figure::Fig6 | Figure::Fig7 => {
            let opts = figures::charging_options(config.time.t_max, config.time.dt)?;
            let sweep = config.sweep.clone().unwrap_or_else(|| unreachable!("charging presets carry a sweep"));
            let xi = sweep.xi.unwrap_or_default();
            match figure {
                Figure::Fig5 => {
                    let omega0 = sweep.omega0.unwrap_or_default();
                    let r = figures::resonance(&params, &omega0, &xi, &opts)?;
                    out.csv(&csv_name, &SWEEP_HEADER, sweep_rows(&omega0, &xi, &r.sweep.w_max).into_iter())?;
                    summary["e1"] = complex(r.e1);
                    summary["argmax_omega0"] = json!(xi
                        .iter()
                        .zip(&r.argmax_omega0)
                        .map(|(x, w)| json!({ "xi": x, "omega0": w }))
                        .collect::<Vec<_>>());
                    summary["failures"] = json!(r.sweep.failures);
                }
                Figure::Fig6 => {
                    let h = figures::hopping_scan(&params, &xi, &opts)?;
                    out.csv(&csv_name, &SWEEP_HEADER, sweep_rows(&[params.omega0], &xi, &h.w_max).into_iter())?;
                    summary["omega0"] = json!(params.omega0);
                    summary["argmax_xi"] = json!(h.argmax_xi);
                }
                _ => {
                    let pm = figures::charging_power(&params, &xi, &opts)?;
                    let rows = pm.xi.iter().zip(&pm.power).flat_map(|(&x, row)| {
                        pm.times.iter().enumerate().map(move |(k, &t)| {
                            vec![fmt_num(x), fmt_num(t), fmt_opt(row.as_ref().map(|r| r[k]))]
                        })
                    });
                    out.csv(&csv_name, &["xi", "t", "power"], rows)?;
                    let peaks: Vec<Option<(f64, f64)>> = (0..pm.xi.len()).map(|i| pm.peak(i)).collect();
                    let best = crate::thermo::argmax(peaks.iter().map(|p| p.map(|(_, v)| v)));
                    summary["peaks"] = json!(xi
                        .iter()
                        .zip(&peaks)
                        .map(|(x, p)| json!({ "xi": x, "t": p.map(|p| p.0), "power": p.map(|p| p.1) }))
                        .collect::<Vec<_>>());
                    summary["argmax_xi"] = json!(best.map(|i| xi[i]));
                }
            }
        }
    }
    out.json(&format!("{id}_summary.json"), &summary)?;
    out.text(&format!("{id}_config.json"), &(config.to_json() + "\n"))?;
    Ok(out.finish(summary))
}

fn prefix_of(config: &ScenarioConfig) -> String {
    config.output.prefix.clone().unwrap_or_else(|| "run".to_string())
}

fn initial_state(config: &ScenarioConfig, params: &SystemParams, model: ModelKind) -> Result<WaveFunction> {
    match config.initial {
        InitialCondition::PhotonSite(j) => {
            initial_state_photon_at_site(j, params, model, config.representation)
        }
        InitialCondition::AtomM => initial_state_atom_m(params, model, config.representation),
    }
}

/// Execute a scenario: a time series for `effective`, `full`, `lindblad` or `analytic`, or an
/// ergotropy sweep when `sweep` is present.
pub fn run_config(config: &ScenarioConfig, out_dir: &Path) -> Result<Outcome> {
    config.validate()?;
    let params = config.system_params()?;
    let prefix = prefix_of(config);
    let grid = time_grid(config.time.t_max, config.time.dt)?;
    let mut out = Writer::new(out_dir)?;
    let mut summary = json!({
        "unit": config.unit.label(),
        "model": config.model,
    });

    if let Some(sweep) = &config.sweep {
        let photon_site = match config.initial {
            InitialCondition::PhotonSite(j) => j,
            InitialCondition::AtomM => {
                return Err(Error::invalid("initial", "sweeps need a photon_site initial condition"))
            }
        };
        let omega0 = sweep.omega0.clone().unwrap_or_else(|| vec![params.omega0]);
        let xi = sweep.xi.clone().unwrap_or_else(|| vec![params.xi]);
        let opts = SweepOptions {
            t_grid: grid,
            photon_site,
            model: config.model.kind().unwrap_or_default(),
        };
        let s = sweep_ergotropy(&omega0, &xi, &params, &opts)?;
        out.csv(&format!("{prefix}_sweep.csv"), &SWEEP_HEADER, sweep_rows(&omega0, &xi, &s.w_max).into_iter())?;
        summary["argmax_omega0"] = json!((0..xi.len())
            .map(|j| json!({ "xi": xi[j], "omega0": s.argmax_omega0(j).map(|i| omega0[i]) }))
            .collect::<Vec<_>>());
        summary["failures"] = json!(s.failures);
        out.json(&format!("{prefix}_summary.json"), &summary)?;
        return Ok(out.finish(summary));
    }

    let series_name = format!("{prefix}_series.csv");
    match config.model {
        ModelSelector::Effective | ModelSelector::Full => {
            let model = config.model.kind().unwrap_or_default();
            let psi0 = initial_state(config, &params, model)?;
            let (series, work) = work_series(&psi0, &grid, &params)?;
            let power = average_power(&grid, &work);
            out.csv(
                &series_name,
                &["t", "p_dark", "norm", "work", "power"],
                (0..grid.len()).map(|i| {
                    vec![
                        fmt_num(grid[i]),
                        fmt_num(series.p_dark[i]),
                        fmt_num(series.norm[i]),
                        fmt_num(work[i]),
                        fmt_num(power[i]),
                    ]
                }),
            )?;
            let k = crate::thermo::argmax(work.iter().map(|&w| Some(w))).unwrap_or(0);
            summary["w_max"] = json!(work[k]);
            summary["t_at_w_max"] = json!(grid[k]);
            summary["final_p_dark"] = json!(series.p_dark.last());
            summary["final_norm"] = json!(series.norm.last());
        }
        ModelSelector::Lindblad => {
            let psi0 = initial_state(config, &params, ModelKind::Full)?;
            let opts = LindbladOptions {
                collapse: config.collapse,
                ..LindbladOptions::default()
            };
            let run = lindblad_from_state(&psi0, &grid, &params, &opts)?;
            out.csv(
                &series_name,
                &["t", "p_dark", "excited_population"],
                (0..grid.len())
                    .map(|i| vec![fmt_num(grid[i]), fmt_num(run.series.p_dark[i]), fmt_num(run.series.norm[i])]),
            )?;
            let pops = population_report(&run.final_state);
            summary["collapse"] = json!(config.collapse);
            summary["final_populations"] = json!(pops);
            summary["final_trace"] = json!(run.final_state.trace());
        }
        ModelSelector::Analytic => {
            if config.initial != InitialCondition::PhotonSite(0) {
                return Err(Error::invalid(
                    "initial",
                    "the analytic model needs the photon at the atom's site (photon_site 0)",
                ));
            }
            let e1 = atom_eigensystem_exact(&params)?.dark_energy();
            let solution = AnalyticSolution::new(&params, e1)?;
            out.csv(
                &series_name,
                &["t", "p_long_time", "p_dark"],
                grid.iter().map(|&t| {
                    vec![
                        fmt_num(t),
                        fmt_num(solution.long_time_probability(t)),
                        fmt_num(solution.amplitude(t, true).norm_sqr()),
                    ]
                }),
            )?;
            summary["e1"] = complex(e1);
            summary["bound_states"] = bound_set_json(&solution.bound);
        }
    }
    out.json(&format!("{prefix}_summary.json"), &summary)?;
    Ok(out.finish(summary))
}

/// Bound states of the scenario's dark energy, written to `<prefix>_bound_states.json`.
pub fn bound_states_report(config: &ScenarioConfig, out_dir: &Path) -> Result<Outcome> {
    config.validate()?;
    let params = config.system_params()?;
    params.require_dark_condition()?;
    let e1 = atom_eigensystem_exact(&params)?.dark_energy();
    let solution = AnalyticSolution::new(&params, e1)?;
    let summary = json!({
        "unit": config.unit.label(),
        "e1": complex(e1),
        "bound_states": bound_set_json(&solution.bound),
    });
    let mut out = Writer::new(out_dir)?;
    out.json(&format!("{}_bound_states.json", prefix_of(config)), &summary)?;
    Ok(out.finish(summary))
}

/// Exact and perturbative atom energies, written to `<prefix>_atom_spectrum.json`.
pub fn atom_spectrum_report(config: &ScenarioConfig, out_dir: &Path) -> Result<Outcome> {
    config.validate()?;
    let params = config.system_params()?;
    let exact = atom_eigensystem_exact(&params)?;
    let approx = atom_eigensystem_perturbative(&params);
    let dark = exact.dark_vector();
    let summary = json!({
        "unit": config.unit.label(),
        "energies": exact.energies.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "dark_index": exact.dark_index,
        "dark_energy": complex(exact.dark_energy()),
        "dark_vector": dark.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "perturbative": approx.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
    });
    let mut out = Writer::new(out_dir)?;
    out.json(&format!("{}_atom_spectrum.json", prefix_of(config)), &summary)?;
    Ok(out.finish(summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDecayOptions {
    /// Value column; defaults to `p_dark`, else the second column.
    pub column: Option<String>,
    pub t_min: f64,
    /// Fit every sample with `t >= t_min` instead of the envelope peaks.
    pub raw: bool,
}

impl Default for FitDecayOptions {
    fn default() -> Self {
        FitDecayOptions {
            column: None,
            t_min: DEFAULT_T_MIN,
            raw: false,
        }
    }
}

/// Fit `ln P = a - rate t` to a time-series CSV with a `t` column.
pub fn fit_decay(series_csv: &Path, opts: &FitDecayOptions, out_dir: &Path) -> Result<Outcome> {
    let mut reader = csv::Reader::from_path(series_csv)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", series_csv.display())))?;
    let header = reader.headers()?.clone();
    let find = |name: &str| header.iter().position(|h| h == name);
    let t_col = find("t").ok_or_else(|| Error::invalid("t", "series has no `t` column"))?;
    let v_col = match &opts.column {
        Some(name) => find(name).ok_or_else(|| Error::invalid(name.clone(), "no such column"))?,
        None => find("p_dark")
            .or_else(|| (0..header.len()).find(|&i| i != t_col))
            .ok_or_else(|| Error::invalid("column", "series has no value column"))?,
    };
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            let field = record.get(i).unwrap_or("");
            field.trim().parse().map_err(|_| {
                Error::Config(format!("row {}: `{field}` in column {} is not a number", line + 2, &header[i]))
            })
        };
        times.push(parse(t_col)?);
        values.push(parse(v_col)?);
    }
    let points = if opts.raw {
        times
            .iter()
            .copied()
            .zip(values.iter().copied())
            .filter(|&(t, _)| t >= opts.t_min)
            .collect()
    } else {
        peaks_of(&times, &values, opts.t_min)?
    };
    let fit = fit_exponential(&points)?;
    let summary = json!({
        "column": &header[v_col],
        "t_min": opts.t_min,
        "raw": opts.raw,
        "fit": fit,
    });
    let stem = series_csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    let mut out = Writer::new(out_dir)?;
    out.json(&format!("{stem}_fit.json"), &summary)?;
    Ok(out.finish(summary))
}

/// Figure ids accepted by [`reproduce`].
pub fn figure_ids() -> Vec<&'static str> {
    presets::Figure::ALL.iter().map(|f| f.id()).collect()
}
