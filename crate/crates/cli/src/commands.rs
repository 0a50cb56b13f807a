use rmt_infer::inference::{overlap_from_lambda, single_test_from_data, double_test_from_data};
use rmt_infer::simulate::{
    simulate_brown_harding, simulate_largest_root, simulate_mp, simulate_spike_in,
    FactorModelParams, Loadings, OverlapMoment, SimConfig,
};
use rmt_infer::{
    canonical_correlations, largest_root_test, overlap_limit, spike_predict, Dims, EnsembleCase,
    Error, Field, FluctuationLaw, MpLaw, Regime, SpikedModel, StatisticScale, TestResult,
    TwDistribution,
};
use serde_json::{json, Value};

use crate::args::{
    CaseArg, Command, FieldArgs, LoadingsArg, MpArgs, SimCommon, SimulateCommand, SpikeArgs,
    TestCommand, TwArgs,
};
use crate::data::read_matrix;
use crate::error::CliError;
use crate::output::{envelope, fmt_f64, num, nums, opt_num, print_json, Table};

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Tw(args) => tw(args),
        Command::Test(cmd) => test(cmd),
        Command::Mp(args) => mp(args),
        Command::Spike(args) => spike(args),
        Command::Simulate(cmd) => simulate(cmd),
    }
}

fn tw(args: TwArgs) -> Result<(), CliError> {
    let dist = TwDistribution::shared(args.beta)?;
    if args.table {
        let mut table = Table::new(&["s", "cdf", "pdf"]);
        for ((s, f), d) in dist.grid().iter().zip(dist.cdf_values()).zip(dist.pdf_values()) {
            table.push(vec![fmt_f64(*s), fmt_f64(*f), fmt_f64(*d)]);
        }
        return table.print();
    }
    let (params, payload) = if let Some(s) = args.cdf {
        if !s.is_finite() {
            return Err(CliError::Usage(format!("--cdf {s} is not finite")));
        }
        (
            json!({ "beta": args.beta, "cdf": num(s) }),
            json!({ "beta": args.beta, "s": num(s), "cdf": num(dist.cdf(s)), "pdf": num(dist.pdf(s)) }),
        )
    } else {
        let p = args.quantile.expect("clap enforces one mode");
        (
            json!({ "beta": args.beta, "quantile": num(p) }),
            json!({ "beta": args.beta, "p": num(p), "quantile": num(dist.quantile(p)?) }),
        )
    };
    print_json(&envelope("tw", params, None, payload))
}

fn field_of(f: FieldArgs) -> Field {
    if f.complex {
        Field::Complex
    } else {
        Field::Real
    }
}

fn dims_json(dims: Dims) -> Value {
    match dims {
        Dims::Single { n, p } => json!({ "n": n, "p": p }),
        Dims::Double { n1, n2, p } => json!({ "n1": n1, "n2": n2, "p": p }),
    }
}

fn scale_name(scale: StatisticScale) -> &'static str {
    match scale {
        StatisticScale::Linear => "linear",
        StatisticScale::Logit => "logit",
    }
}

fn test_result_json(r: &TestResult) -> serde_json::Map<String, Value> {
    let v = json!({
        "case": r.case.label(),
        "beta": r.case.beta(),
        "dims": dims_json(r.case.dims),
        "raw_statistic": num(r.raw_statistic),
        "standardized": num(r.standardized),
        "p_value": num(r.p_value),
        "mu": num(r.center_scale.mu),
        "sigma": num(r.center_scale.sigma),
        "scale": scale_name(r.center_scale.scale),
    });
    match v {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

fn missing(flags: &str) -> CliError {
    CliError::Usage(format!("--stat needs {flags}"))
}

fn test(cmd: TestCommand) -> Result<(), CliError> {
    match cmd {
        TestCommand::Single {
            field,
            n,
            p,
            stat,
            data,
            no_center,
            format,
        } => {
            let field = field_of(field);
            if let Some(stat) = stat {
                let (n, p) = n.zip(p).ok_or_else(|| missing("--n and --p"))?;
                let case = EnsembleCase::single(field, n, p)?;
                let result = largest_root_test(&case, stat)?;
                let params = json!({ "kind": "single", "field": case.label(), "n": n, "p": p, "stat": num(stat) });
                return print_json(&envelope("test", params, None, Value::Object(test_result_json(&result))));
            }
            let path = data.expect("clap enforces one input");
            if field == Field::Complex {
                return Err(CliError::Usage("--data supports real data only".into()));
            }
            let x = read_matrix(&path, &format)?;
            check_dim("--p", p, x.rows())?;
            check_dim("--n", n, x.cols())?;
            let result = single_test_from_data(&x, !no_center)?;
            let mut payload = test_result_json(&result);
            let dof = match result.case.dims {
                Dims::Single { n, .. } => n,
                Dims::Double { .. } => unreachable!(),
            };
            payload.insert("l1".into(), num(result.raw_statistic / dof as f64));
            payload.insert("observations".into(), x.cols().into());
            payload.insert("variables".into(), x.rows().into());
            payload.insert("centered".into(), (!no_center).into());
            let params = json!({
                "kind": "single", "field": "real", "data": path.display().to_string(),
                "transpose": format.transpose, "header": format.header,
                "delimiter": format.delimiter.to_string(), "center": !no_center,
            });
            print_json(&envelope("test", params, None, Value::Object(payload)))
        }
        TestCommand::Double {
            field,
            p,
            n1,
            n2,
            stat,
            data,
            data2,
            format,
        } => {
            let field = field_of(field);
            if let Some(stat) = stat {
                let (p, (n1, n2)) = p
                    .zip(n1.zip(n2))
                    .ok_or_else(|| missing("--p, --n1 and --n2"))?;
                let case = EnsembleCase::double(field, n1, n2, p)?;
                let result = largest_root_test(&case, stat)?;
                let params = json!({
                    "kind": "double", "field": case.label(), "p": p, "n1": n1, "n2": n2, "stat": num(stat),
                });
                return print_json(&envelope("test", params, None, Value::Object(test_result_json(&result))));
            }
            if field == Field::Complex {
                return Err(CliError::Usage("--data supports real data only".into()));
            }
            let (path1, path2) = (data.expect("clap"), data2.expect("clap"));
            let x = read_matrix(&path1, &format)?;
            let y = read_matrix(&path2, &format)?;
            if x.cols() != y.cols() {
                return Err(CliError::Data(format!(
                    "blocks have {} and {} observations",
                    x.cols(),
                    y.cols()
                )));
            }
            let result = double_test_from_data(&x, &y)?;
            let mut payload = test_result_json(&result);
            payload.insert("squared_canonical_correlations".into(), nums(&canonical_correlations(&x, &y)?));
            payload.insert("observations".into(), x.cols().into());
            payload.insert("variables".into(), json!([x.rows(), y.rows()]));
            let params = json!({
                "kind": "double", "field": "real",
                "data": path1.display().to_string(), "data2": path2.display().to_string(),
                "transpose": format.transpose, "header": format.header,
                "delimiter": format.delimiter.to_string(),
            });
            print_json(&envelope("test", params, None, Value::Object(payload)))
        }
    }
}

fn check_dim(flag: &str, given: Option<usize>, found: usize) -> Result<(), CliError> {
    match given {
        Some(g) if g != found => Err(CliError::Usage(format!(
            "{flag} {g} does not match the data ({found})"
        ))),
        _ => Ok(()),
    }
}

fn mp(args: MpArgs) -> Result<(), CliError> {
    let law = MpLaw::new(args.gamma)?;
    if let Some(n) = args.table {
        let mut table = Table::new(&["t", "density", "cdf"]);
        let n = n as usize;
        let width = law.b_plus - law.b_minus;
        for i in 0..n {
            let t = if i + 1 == n {
                law.b_plus
            } else {
                law.b_minus + width * i as f64 / (n - 1) as f64
            };
            table.push(vec![fmt_f64(t), fmt_f64(law.density(t)), fmt_f64(law.cdf(t))]);
        }
        return table.print();
    }
    let t = args.density.expect("clap enforces one mode");
    if !t.is_finite() {
        return Err(CliError::Usage(format!("--density {t} is not finite")));
    }
    let payload = json!({
        "gamma": num(law.gamma),
        "t": num(t),
        "density": num(law.density(t)),
        "cdf": num(law.cdf(t)),
        "support": nums(&[law.b_minus, law.b_plus]),
        "atom_at_zero": num(law.atom_at_zero),
    });
    let params = json!({ "gamma": num(args.gamma), "density": num(t) });
    print_json(&envelope("mp", params, None, payload))
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Subcritical => "subcritical",
        Regime::Critical => "critical",
        Regime::Supercritical => "supercritical",
    }
}

fn law_name(l: Option<FluctuationLaw>) -> Value {
    match l {
        Some(FluctuationLaw::TracyWidom) => "tracy-widom".into(),
        Some(FluctuationLaw::Gaussian) => "gaussian".into(),
        None => Value::Null,
    }
}

fn spike(args: SpikeArgs) -> Result<(), CliError> {
    if args.overlap {
        let lambda = args.lambda.expect("clap requires --lambda");
        if !(args.gamma.is_finite() && args.gamma >= 0.0) {
            return Err(Error::Domain(format!("gamma = {} must be finite and nonnegative", args.gamma)).into());
        }
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda = {lambda} must be nonnegative")).into());
        }
        let payload = json!({
            "gamma": num(args.gamma),
            "lambda": num(lambda),
            "threshold": num(args.gamma.sqrt()),
            "overlap": num(overlap_from_lambda(args.gamma, lambda)),
        });
        let params = json!({ "overlap": true, "gamma": num(args.gamma), "lambda": num(lambda) });
        return print_json(&envelope("spike", params, None, payload));
    }
    let ell = args.ell.expect("clap requires --ell");
    let model = SpikedModel::new(args.gamma, 1.0, vec![ell])?;
    let pred = spike_predict(&model, 0, args.n)?;
    let payload = json!({
        "gamma": num(args.gamma),
        "ell": num(ell),
        "n": args.n,
        "regime": regime_name(pred.regime),
        "threshold": num(pred.threshold),
        "mean": num(pred.mean),
        "sd": opt_num(pred.sd),
        "sd_real_data": opt_num(pred.sd_real_data()),
        "limit_sd": num(pred.limit_sd),
        "fluctuation_law": law_name(pred.fluctuation_law),
        "overlap": num(overlap_limit(&model, 0)?),
    });
    let params = json!({ "gamma": num(args.gamma), "ell": num(ell), "n": args.n });
    print_json(&envelope("spike", params, None, payload))
}

fn sim_config(c: &SimCommon) -> SimConfig {
    let mut cfg = SimConfig::new(c.seed, c.reps);
    cfg.center = !c.no_center;
    cfg
}

fn write_table(table: &Table, out: &Option<std::path::PathBuf>) -> Result<Value, CliError> {
    match out {
        Some(path) => {
            table.write_file(path)?;
            Ok(path.display().to_string().into())
        }
        None => Ok(Value::Null),
    }
}

fn simulate(cmd: SimulateCommand) -> Result<(), CliError> {
    match cmd {
        SimulateCommand::LargestRoot {
            case,
            n,
            p,
            n1,
            n2,
            common,
        } => {
            let ensemble = match case {
                CaseArg::SingleReal => {
                    let n = n.ok_or_else(|| CliError::Usage("single-real needs --n".into()))?;
                    EnsembleCase::single(Field::Real, n, p)?
                }
                CaseArg::DoubleReal => {
                    let (n1, n2) = n1
                        .zip(n2)
                        .ok_or_else(|| CliError::Usage("double-real needs --n1 and --n2".into()))?;
                    EnsembleCase::double(Field::Real, n1, n2, p)?
                }
            };
            let sim = simulate_largest_root(&sim_config(&common), &ensemble)?;
            let mut table = Table::new(&["replicate", "raw", "standardized"]);
            for (r, (raw, z)) in sim.raw.iter().zip(&sim.standardized).enumerate() {
                table.push(vec![r.to_string(), fmt_f64(*raw), fmt_f64(*z)]);
            }
            let csv = write_table(&table, &common.out)?;
            let tw = TwDistribution::shared(1)?;
            let probs = [0.90, 0.95, 0.99];
            let mut empirical = Vec::new();
            let mut reference = Vec::new();
            for &q in &probs {
                empirical.push(sim.summary.quantile(q)?);
                reference.push(tw.quantile(q)?);
            }
            let payload = json!({
                "case": ensemble.label(),
                "effective_dims": dims_json(sim.effective_case.dims),
                "centered": sim.centered,
                "mu": num(sim.center_scale.mu),
                "sigma": num(sim.center_scale.sigma),
                "scale": scale_name(sim.center_scale.scale),
                "reps": sim.raw.len(),
                "ks": num(sim.ks),
                "mean": num(sim.summary.mean()),
                "sd": num(sim.summary.sd()),
                "probabilities": nums(&probs),
                "quantiles": nums(&empirical),
                "tw_quantiles": nums(&reference),
                "csv": csv,
            });
            let params = json!({
                "case": ensemble.label(), "dims": dims_json(ensemble.dims),
                "reps": common.reps, "center": !common.no_center,
            });
            print_json(&envelope("simulate largest-root", params, Some(common.seed), payload))
        }
        SimulateCommand::Mp { n, p, common } => {
            let sim = simulate_mp(&sim_config(&common), n, p)?;
            let mut table = Table::new(&["replicate", "index", "eigenvalue"]);
            for (k, v) in sim.eigenvalues.iter().enumerate() {
                table.push(vec![(k / p).to_string(), (k % p + 1).to_string(), fmt_f64(*v)]);
            }
            let csv = write_table(&table, &common.out)?;
            let finite: Vec<f64> = sim.spread.iter().copied().filter(|s| s.is_finite()).collect();
            let mean_spread = if finite.len() == sim.spread.len() {
                finite.iter().sum::<f64>() / finite.len() as f64
            } else {
                f64::INFINITY
            };
            let sorted = sim.summary.sorted();
            let payload = json!({
                "n": n,
                "p": p,
                "gamma": num(sim.law.gamma),
                "support": nums(&[sim.law.b_minus, sim.law.b_plus]),
                "atom_at_zero": num(sim.law.atom_at_zero),
                "reps": common.reps,
                "ks": num(sim.ks),
                "min_eigenvalue": num(sorted[0]),
                "max_eigenvalue": num(sorted[sorted.len() - 1]),
                "mean_spread": num(mean_spread),
                "csv": csv,
            });
            let params = json!({ "n": n, "p": p, "reps": common.reps, "center": !common.no_center });
            print_json(&envelope("simulate mp", params, Some(common.seed), payload))
        }
        SimulateCommand::Spike {
            gamma,
            ell,
            n,
            complex,
            common,
        } => {
            let field = if complex { Field::Complex } else { Field::Real };
            let sim = simulate_spike_in(&sim_config(&common), field, gamma, ell, n)?;
            let mut table = if complex {
                Table::new(&["replicate", "top_eigenvalue"])
            } else {
                Table::new(&["replicate", "top_eigenvalue", "abs_cosine"])
            };
            for (r, l) in sim.top.iter().enumerate() {
                let mut row = vec![r.to_string(), fmt_f64(*l)];
                if let Some(c) = sim.cosines.get(r) {
                    row.push(fmt_f64(*c));
                }
                table.push(row);
            }
            let csv = write_table(&table, &common.out)?;
            let matched = match sim.overlap_match {
                Some(OverlapMoment::Cosine) => Value::from("cosine"),
                Some(OverlapMoment::SquaredCosine) => Value::from("squared-cosine"),
                None => Value::Null,
            };
            let payload = json!({
                "field": if complex { "complex" } else { "real" },
                "gamma": num(gamma),
                "ell": num(ell),
                "n": n,
                "p": sim.p,
                "reps": common.reps,
                "mean": num(sim.mean),
                "sd": num(sim.sd),
                "regime": regime_name(sim.prediction.regime),
                "predicted_mean": num(sim.prediction.mean),
                "predicted_sd": opt_num(sim.predicted_sd),
                "mean_cosine": opt_num(sim.mean_cosine),
                "mean_squared_cosine": opt_num(sim.mean_squared_cosine),
                "overlap_limit": num(sim.overlap_limit),
                "overlap_match": matched,
                "csv": csv,
            });
            let params = json!({
                "gamma": num(gamma), "ell": num(ell), "n": n, "complex": complex,
                "reps": common.reps, "center": !common.no_center,
            });
            print_json(&envelope("simulate spike", params, Some(common.seed), payload))
        }
        SimulateCommand::Harding {
            t,
            reps,
            seed,
            out,
            no_center,
            p_min,
            p_max,
            p_step,
            beta_f,
            sigma_b,
            sigma_f,
            sigma_e,
            loadings,
        } => {
            if p_step == 0 || p_min > p_max {
                return Err(CliError::Usage("need --p-step > 0 and --p-min <= --p-max".into()));
            }
            let params = FactorModelParams {
                beta_f,
                sigma_b,
                sigma_f,
                sigma_e,
                num_factors: 4,
                t,
                p_grid: (p_min..=p_max).step_by(p_step).collect(),
                loadings: match loadings {
                    LoadingsArg::Matched => Loadings::Matched,
                    LoadingsArg::Random => Loadings::Random,
                },
            };
            let mut cfg = SimConfig::new(seed, reps);
            cfg.center = !no_center;
            let rows = simulate_brown_harding(&params, &cfg)?;

            let mut header: Vec<String> = [
                "p", "T", "ell1", "ell2", "ell3", "ell4", "sigma_e2", "threshold", "mp_edge",
                "ell2_detectable", "predicted_top",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let top = rows.first().map_or(0, |r| r.mean_eigs.len());
            header.extend((1..=top).map(|k| format!("mean_l{k}")));
            header.extend((1..=top).map(|k| format!("max_l{k}")));
            let mut table = Table {
                header,
                rows: Vec::new(),
            };
            let mut json_rows = Vec::new();
            for r in &rows {
                let pop = &r.population;
                let mut cells = vec![r.p.to_string(), r.t.to_string()];
                cells.extend(
                    [pop.ell1, pop.ell_rest, pop.ell_rest, pop.ell_rest, pop.base, r.threshold, r.mp_edge]
                        .iter()
                        .map(|v| fmt_f64(*v)),
                );
                cells.push(r.ell2_detectable.to_string());
                cells.push(fmt_f64(r.predicted_top));
                cells.extend(r.mean_eigs.iter().chain(&r.max_eigs).map(|v| fmt_f64(*v)));
                table.push(cells);
                json_rows.push(json!({
                    "p": r.p,
                    "ell1": num(pop.ell1),
                    "ell2": num(pop.ell_rest),
                    "sigma_e2": num(pop.base),
                    "threshold": num(r.threshold),
                    "mp_edge": num(r.mp_edge),
                    "ell2_detectable": r.ell2_detectable,
                    "predicted_top": num(r.predicted_top),
                    "mean_eigenvalues": nums(&r.mean_eigs),
                    "max_eigenvalues": nums(&r.max_eigs),
                }));
            }
            let csv = write_table(&table, &out)?;
            let all_below = rows.iter().all(|r| !r.ell2_detectable);
            let payload = json!({
                "rows": json_rows,
                "ell2_below_threshold_for_all_p": all_below,
                "csv": csv,
            });
            let echo = json!({
                "T": t, "reps": reps, "p_grid": params.p_grid, "beta": num(beta_f),
                "sigma_b": num(sigma_b), "sigma_f": num(sigma_f), "sigma_e": num(sigma_e),
                "loadings": match loadings { LoadingsArg::Matched => "matched", LoadingsArg::Random => "random" },
                "center": !no_center,
            });
            print_json(&envelope("simulate harding", echo, Some(seed), payload))
        }
    }
}
