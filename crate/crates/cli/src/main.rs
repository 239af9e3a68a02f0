//! Command line front end: closed-form expansion, scenario verification,
//! wall listings, and enumerative oracle tables.
//!
//! Exit codes: 0 on success, 1 when a verification or path check fails,
//! 2 on usage and configuration errors.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use flopdt::charges::{pv_contains, ChargePath};
use flopdt::config::{parse_kv, parse_rat, resolve_model};
use flopdt::error::Error;
use flopdt::exact::{rat, rat_int, CRat, Rat};
use flopdt::lattice::FlopModel;
use flopdt::oracles::{count_pyramid_partitions, fit_variable_map, plane_partition_table};
use flopdt::report;
use flopdt::series::{ConeSeries, Truncation, XSign};
use flopdt::wallcross::{detect_walls, scenario, scenario_with_b, Scenario, ScenarioReport};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "flopdt",
    version,
    about = "Curve-counting series engine for a flopped small resolution"
)]
struct Cli {
    /// Built-in model name or path to a model key=value file.
    #[arg(long, global = true, default_value = "conifold")]
    model: String,

    /// Output box: point degree bound N and curve degree bound M.
    #[arg(long = "box", global = true, num_args = 2, value_names = ["N", "M"],
          default_values_t = [8, 4], allow_hyphen_values = true)]
    box_dims: Vec<i64>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in verification reports.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Key=value file whose entries override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient table of a closed-form builder.
    Expand {
        /// macmahon, euler_product, pt_closed_form, or ncdt_closed_form.
        builder: String,

        /// Point degree bound; defaults to the box bound.
        #[arg(long, allow_hyphen_values = true)]
        order: Option<i64>,

        /// MacMahon exponent; defaults to the model Euler characteristic.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,

        /// Sign of x inside euler_product factors: + or -.
        #[arg(long, allow_hyphen_values = true, default_value = "-")]
        sign: String,

        /// Curve exponent carried by each euler_product factor.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        yexp: i64,

        /// Factor exponent sign for euler_product: 1 or -1.
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        expsign: i8,

        /// Use the Euler-characteristic weighted form.
        #[arg(long)]
        hatted: bool,

        /// Curve direction for pt_closed_form: 1 or -1.
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        ydir: i64,
    },

    /// Run verification scenarios plus oracle cross-checks.
    Verify {
        /// Scenario name; repeatable; defaults to all of them.
        #[arg(long)]
        scenario: Vec<String>,

        /// B-field coefficient as a rational, for example -1/2.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },

    /// List wall events along a charge path.
    Walls {
        /// omega_ray, flop_ray, or linear_xi.
        #[arg(long, default_value = "omega_ray")]
        path: String,

        /// B-field coefficient as a rational, for example -1/2.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },

    /// Print an enumerative ground-truth table.
    Oracle {
        /// plane or pyramid.
        kind: String,

        /// Size ceiling; defaults to 12 for plane, 8 for pyramid.
        #[arg(long)]
        limit: Option<u32>,

        /// Fit the bucket dictionary against the closed form (pyramid only).
        #[arg(long)]
        fit: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::BadPath(_))
                | Some(Error::Mismatch(_))
                | Some(Error::Domain(_))
                | Some(Error::UndefinedInvariant(_)) => 1,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

/// Flag values after applying the config file overrides.
struct Settings {
    model: Arc<FlopModel>,
    box_n: i64,
    box_m: i64,
    format: Format,
    out: Option<PathBuf>,
    seed: Option<u64>,
    overrides: BTreeMap<String, String>,
}

const CONFIG_KEYS: &[&str] = &[
    "model", "box_n", "box_m", "format", "out", "seed", "order", "chi", "sign", "yexp",
    "expsign", "hatted", "ydir", "scenario", "b", "path", "limit", "fit",
];

impl Settings {
    fn resolve(cli: &Cli) -> anyhow::Result<Settings> {
        let overrides = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config {}", path.display()))?;
                let map = parse_kv(&text)?;
                for key in map.keys() {
                    if !CONFIG_KEYS.contains(&key.as_str()) {
                        return Err(Error::Config(format!("unknown config key '{key}'")).into());
                    }
                }
                map
            }
            None => BTreeMap::new(),
        };

        let model_spec = overrides
            .get("model")
            .cloned()
            .unwrap_or_else(|| cli.model.clone());
        let box_n = parsed(&overrides, "box_n")?.unwrap_or(cli.box_dims[0]);
        let box_m = parsed(&overrides, "box_m")?.unwrap_or(cli.box_dims[1]);
        if box_n < 0 || box_m < 0 {
            return Err(Error::Config(format!("box bounds ({box_n}, {box_m}) must be nonnegative")).into());
        }
        let format = match overrides.get("format").map(String::as_str) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(Error::Config(format!("unknown format '{other}'")).into()),
            None => cli.format,
        };
        Ok(Settings {
            model: Arc::new(resolve_model(&model_spec)?),
            box_n,
            box_m,
            format,
            out: overrides.get("out").map(PathBuf::from).or_else(|| cli.out.clone()),
            seed: parsed(&overrides, "seed")?.or(cli.seed),
            overrides,
        })
    }

    fn trunc(&self) -> Truncation {
        Truncation::new(self.box_n, self.box_m)
    }

    fn emit_json(&self, doc: &Value) -> anyhow::Result<()> {
        self.emit_text(&report::render(doc))
    }

    fn emit_text(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn parsed<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> anyhow::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| Error::Config(format!("config key {key} = '{raw}': {e}")).into()),
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    if cli.box_dims.len() != 2 {
        return Err(Error::Config("--box takes exactly two bounds".into()).into());
    }
    let settings = Settings::resolve(&cli)?;
    match &cli.command {
        Command::Expand { builder, order, chi, sign, yexp, expsign, hatted, ydir } => cmd_expand(
            &settings, builder, *order, *chi, sign, *yexp, *expsign, *hatted, *ydir,
        ),
        Command::Verify { scenario, b } => cmd_verify(&settings, scenario, b.as_deref()),
        Command::Walls { path, b } => cmd_walls(&settings, path, b.as_deref()),
        Command::Oracle { kind, limit, fit } => cmd_oracle(&settings, kind, *limit, *fit),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_expand(
    settings: &Settings,
    builder: &str,
    order: Option<i64>,
    chi: Option<i64>,
    sign: &str,
    yexp: i64,
    expsign: i8,
    hatted: bool,
    ydir: i64,
) -> anyhow::Result<i32> {
    let ov = &settings.overrides;
    let order = parsed(ov, "order")?.or(order);
    let chi = parsed(ov, "chi")?.or(chi);
    let sign = ov.get("sign").map(String::as_str).unwrap_or(sign);
    let yexp = parsed(ov, "yexp")?.unwrap_or(yexp);
    let expsign = parsed(ov, "expsign")?.unwrap_or(expsign);
    let hatted = parsed(ov, "hatted")?.unwrap_or(hatted);
    let ydir = parsed(ov, "ydir")?.unwrap_or(ydir);

    let n_max = order.unwrap_or(settings.box_n);
    if n_max < 0 {
        return Err(Error::Config(format!("order {n_max} must be nonnegative")).into());
    }
    let trunc = Truncation::new(n_max, settings.box_m);
    let model = &settings.model;

    let series = match builder {
        "macmahon" => {
            let chi = chi.unwrap_or(model.euler_char);
            if hatted {
                ConeSeries::macmahon_unsigned(model, trunc, chi)?
            } else {
                ConeSeries::macmahon(model, trunc, chi)?
            }
        }
        "euler_product" => {
            let x_sign = match sign {
                "+" => XSign::Plus,
                "-" => XSign::Minus,
                other => {
                    return Err(Error::Config(format!("sign '{other}' must be + or -")).into())
                }
            };
            ConeSeries::euler_product(model, trunc.clone(), trunc.n_max().max(1), x_sign, yexp, expsign)?
        }
        "pt_closed_form" => {
            if !(ydir == 1 || ydir == -1) {
                return Err(Error::Config(format!("ydir {ydir} must be 1 or -1")).into());
            }
            ConeSeries::pt_closed_form(model, trunc, hatted, ydir)?
        }
        "ncdt_closed_form" => ConeSeries::ncdt_closed_form(model, trunc, hatted)?,
        other => {
            return Err(Error::Config(format!(
                "unknown builder '{other}'; expected macmahon, euler_product, pt_closed_form, or ncdt_closed_form"
            ))
            .into())
        }
    };

    match settings.format {
        Format::Json => settings.emit_json(&report::series_json(&series)?)?,
        Format::Csv => settings.emit_text(&report::series_csv(&series))?,
    }
    Ok(0)
}

fn cmd_verify(settings: &Settings, names: &[String], b_flag: Option<&str>) -> anyhow::Result<i32> {
    let ov = &settings.overrides;
    let names: Vec<String> = match ov.get("scenario") {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => names.to_vec(),
    };
    let b_raw = ov.get("b").map(String::as_str).or(b_flag);
    let b = b_raw.map(parse_rat).transpose()?;

    let scenarios: Vec<Scenario> = if names.is_empty() {
        Scenario::ALL.to_vec()
    } else {
        names
            .iter()
            .map(|n| Scenario::parse(n))
            .collect::<Result<_, _>>()?
    };

    let model = &settings.model;
    let trunc = settings.trunc();
    let mut reports = Vec::new();
    for which in &scenarios {
        let mut rep = match &b {
            Some(b) => scenario_with_b(*which, model, trunc.clone(), b)?,
            None => scenario(*which, model, trunc.clone())?,
        };
        if let Some(seed) = settings.seed {
            rep.notes.push(format!("seed {seed}"));
        }
        reports.push(rep);
    }
    reports.push(plane_cross_check(settings)?);

    let passed = reports.iter().all(|r| r.passed);
    match settings.format {
        Format::Json => {
            let docs = reports
                .iter()
                .map(|r| report::scenario_json(r))
                .collect::<Result<Vec<_>, _>>()?;
            settings.emit_json(&Value::Array(docs))?;
        }
        Format::Csv => {
            let text: String = reports.iter().map(report::scenario_csv).collect();
            settings.emit_text(&text)?;
        }
    }
    Ok(if passed { 0 } else { 1 })
}

/// Plane partition counts against the unsigned MacMahon expansion, reported
/// in the same shape as a scenario.
fn plane_cross_check(settings: &Settings) -> anyhow::Result<ScenarioReport> {
    let limit = settings.box_n.min(flopdt::oracles::PLANE_PARTITION_LIMIT as i64);
    let counts = plane_partition_table(limit as usize)?;
    let series = ConeSeries::macmahon_unsigned(&settings.model, Truncation::new(limit, 0), 1)?;
    let mut passed = true;
    let mut first_mismatch = None;
    for (n, count) in counts.iter().enumerate() {
        let coeff = series.coefficient(n as i64, &settings.model.zero_beta())?;
        if coeff != rat_int(*count as i64) {
            passed = false;
            first_mismatch = Some(flopdt::series::Mismatch {
                n: n as i64,
                beta: settings.model.zero_beta(),
                left: coeff,
                right: rat_int(*count as i64),
            });
            break;
        }
    }
    Ok(ScenarioReport {
        scenario: "oracle_plane".into(),
        box_n: limit,
        box_m: 0,
        passed,
        first_mismatch,
        series,
        notes: vec![format!(
            "plane partition counts pin the unsigned MacMahon coefficients up to n = {limit}: {}",
            if passed { "ok" } else { "mismatch" }
        )],
    })
}

fn cmd_walls(settings: &Settings, path_kind: &str, b_flag: Option<&str>) -> anyhow::Result<i32> {
    let ov = &settings.overrides;
    let path_kind = ov.get("path").map(String::as_str).unwrap_or(path_kind);
    let b_raw = ov.get("b").map(String::as_str).or(b_flag);
    let b: Rat = match b_raw {
        Some(raw) => parse_rat(raw)?,
        None => rat(-1, 2),
    };
    let model = &settings.model;
    if !pv_contains(model, 0, &b)? {
        return Err(Error::BadPath(format!(
            "B-field {b} * H outside the perversity 0 region"
        ))
        .into());
    }

    let omega_prime = rat_int(1);
    let path = match path_kind {
        "omega_ray" => ChargePath::omega_ray(b, omega_prime, CRat::from_ints(-1, 1))?,
        "flop_ray" => ChargePath::flop_ray(b, omega_prime, CRat::from_ints(-1, 1))?,
        "linear_xi" => ChargePath::linear_xi(
            model,
            0,
            b,
            omega_prime,
            CRat::from_ints(-1, 0),
            CRat::from_ints(-1, 2),
            CRat::from_ints(-1, 1),
        )?,
        other => {
            return Err(Error::Config(format!(
                "unknown path '{other}'; expected omega_ray, flop_ray, or linear_xi"
            ))
            .into())
        }
    };

    let events = detect_walls(&path, model, settings.box_n, settings.box_m)?;
    match settings.format {
        Format::Json => settings.emit_json(&report::wall_events_json(&events)?)?,
        Format::Csv => settings.emit_text(&report::wall_events_csv(&events))?,
    }
    Ok(0)
}

fn cmd_oracle(settings: &Settings, kind: &str, limit: Option<u32>, fit: bool) -> anyhow::Result<i32> {
    let ov = &settings.overrides;
    let limit = parsed(ov, "limit")?.or(limit);
    let fit = parsed(ov, "fit")?.unwrap_or(fit);
    match kind {
        "plane" => {
            let limit = limit.unwrap_or(12) as usize;
            let counts = plane_partition_table(limit)?;
            match settings.format {
                Format::Json => settings.emit_json(&report::plane_json(&counts))?,
                Format::Csv => settings.emit_text(&report::plane_csv(&counts))?,
            }
            Ok(0)
        }
        "pyramid" => {
            let limit = limit.unwrap_or(8);
            let buckets = count_pyramid_partitions(limit)?;
            if fit {
                let reference =
                    ConeSeries::ncdt_closed_form(&settings.model, settings.trunc(), false)?;
                let map = fit_variable_map(&buckets, &reference, 8)?;
                match settings.format {
                    Format::Json => settings.emit_json(&json!({
                        "buckets": report::pyramid_json(&buckets),
                        "map": report::variable_map_json(&map),
                    }))?,
                    Format::Csv => {
                        let text = format!("# {map}\n{}", report::pyramid_csv(&buckets));
                        settings.emit_text(&text)?;
                    }
                }
            } else {
                match settings.format {
                    Format::Json => settings.emit_json(&report::pyramid_json(&buckets))?,
                    Format::Csv => settings.emit_text(&report::pyramid_csv(&buckets))?,
                }
            }
            Ok(0)
        }
        other => Err(anyhow!(Error::Config(format!(
            "unknown oracle '{other}'; expected plane or pyramid"
        )))),
    }
}
