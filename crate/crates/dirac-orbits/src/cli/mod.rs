//! Command-line front end.
//!
//! Every subcommand reads a [`RunConfig`] assembled from an optional flat
//! `key = value` file with flag overrides on top, runs one verification suite
//! and emits a schema-versioned JSON report. Exit codes: 0 pass, 1 a suite
//! failed, 2 usage or configuration error.
//!
//! Recognised keys (all optional):
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `group` | a1, a1xa1, a2, b2 or sl2r | a1 |
//! | `lambda` | Dynkin labels of λ, comma separated | 1 |
//! | `big_lambda` | discrete-series parameter Λ ≥ 2 | 2 |
//! | `n` | truncation N (K-types) | 64 |
//! | `seed` | RNG seed | 7 |
//! | `samples` | random points per suite | 50 |
//! | `radii` | radial grid size for kernel scans | 100 |
//! | `nodes` | Gauss–Hermite nodes per axis | 40 |
//! | `sphere_nodes` | orbit quadrature nodes | 48 |
//! | `tol` | identity residual tolerance | 1e-10 |
//! | `kirillov_tol` | character closure tolerance | 1e-5 |
//! | `path_tol` | deformation path tolerance | 1e-5 |
//! | `eps_tol` | ε-scan tolerance | 1e-6 |
//! | `x` | algebra element for chern runs | 0.4,0.2,-0.1 |
//! | `x_scale` | max norm of random X | 0.8 |
//! | `path` | (ε,t) vertices as `e:t` pairs | 1:0,1:1,8:8 |
//! | `per_segment` | refinement steps per path edge | 2 |
//! | `eps` | ε values for the t = 0 scan | 1,4,16 |
//! | `widths` | Gaussian widths for the Rossman check | 0.5,0.6 |
//! | `sweep_points` | scalings in the metric-flip sweep | 120 |
//! | `out` | JSON report path | stdout only |
//! | `csv` | CSV table path | none |
//! | `golden` | JSON file the report must match byte for byte | none |

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chern::{self, ChernOptions};
use crate::dirac::CompactDirac;
use crate::discseries::{self as ds, DSModel, SmearedTest, SweepMetric};
use crate::repbuild::{freudenthal, CompactAlgebra, IrrepJson};
use crate::rootsys::{build_root_datum, GroupLabel, RealFormDatum, RootDatumJson, Weight};
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "dirac-orbits.report/1";

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub group: GroupLabel,
    pub lambda: Vec<i64>,
    pub big_lambda: u32,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub radii: usize,
    pub nodes: usize,
    pub sphere_nodes: usize,
    pub tol: f64,
    pub kirillov_tol: f64,
    pub path_tol: f64,
    pub eps_tol: f64,
    pub x: Vec<f64>,
    pub x_scale: f64,
    pub path: Vec<(f64, f64)>,
    pub per_segment: usize,
    pub eps: Vec<f64>,
    pub widths: Vec<f64>,
    pub sweep_points: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub golden: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: GroupLabel::A1,
            lambda: vec![1],
            big_lambda: 2,
            n: 64,
            seed: 7,
            samples: 50,
            radii: 100,
            nodes: 40,
            sphere_nodes: 48,
            tol: 1e-10,
            kirillov_tol: 1e-5,
            path_tol: 1e-5,
            eps_tol: 1e-6,
            x: vec![0.4, 0.2, -0.1],
            x_scale: 0.8,
            path: vec![(1.0, 0.0), (1.0, 1.0), (8.0, 8.0)],
            per_segment: 2,
            eps: vec![1.0, 4.0, 16.0],
            widths: vec![0.5, 0.6],
            sweep_points: 120,
            out: None,
            csv: None,
            golden: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(key, s)).collect()
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "group" => self.group = v.parse()?,
            "lambda" => self.lambda = parse_list(key, v)?,
            "big_lambda" => self.big_lambda = parse_num(key, v)?,
            "n" => self.n = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "samples" => self.samples = parse_num(key, v)?,
            "radii" => self.radii = parse_num(key, v)?,
            "nodes" => self.nodes = parse_num(key, v)?,
            "sphere_nodes" => self.sphere_nodes = parse_num(key, v)?,
            "tol" => self.tol = parse_num(key, v)?,
            "kirillov_tol" => self.kirillov_tol = parse_num(key, v)?,
            "path_tol" => self.path_tol = parse_num(key, v)?,
            "eps_tol" => self.eps_tol = parse_num(key, v)?,
            "x" => self.x = parse_list(key, v)?,
            "x_scale" => self.x_scale = parse_num(key, v)?,
            "path" => {
                self.path = v
                    .split(',')
                    .map(|p| {
                        let (e, t) = p.split_once(':').ok_or_else(|| Error::Config(format!("path: '{p}' is not e:t")))?;
                        Ok((parse_num(key, e)?, parse_num(key, t)?))
                    })
                    .collect::<Result<_>>()?
            }
            "per_segment" => self.per_segment = parse_num(key, v)?,
            "eps" => self.eps = parse_list(key, v)?,
            "widths" => self.widths = parse_list(key, v)?,
            "sweep_points" => self.sweep_points = parse_num(key, v)?,
            "out" => self.out = Some(v.into()),
            "csv" => self.csv = Some(v.into()),
            "golden" => self.golden = Some(v.into()),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Apply a flat `key = value` document; `#` starts a comment.
    pub fn apply_document(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_document(&fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("tol", self.tol),
            ("kirillov_tol", self.kirillov_tol),
            ("path_tol", self.path_tol),
            ("eps_tol", self.eps_tol),
            ("x_scale", self.x_scale),
        ] {
            if !(t > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {t}")));
            }
        }
        if self.lambda.iter().any(|l| *l < 0) {
            return Err(Error::Config(format!("λ = {:?} is not dominant: Dynkin labels must be ≥ 0", self.lambda)));
        }
        if self.group.is_compact() && self.lambda.len() != build_root_datum(self.group).rank {
            return Err(Error::Config(format!("{} needs {} Dynkin labels", self.group, build_root_datum(self.group).rank)));
        }
        if self.big_lambda < 2 {
            return Err(Error::Config(format!("Λ = {} is not a discrete-series parameter (need Λ ≥ 2)", self.big_lambda)));
        }
        if self.radii < 2 || self.samples == 0 || self.nodes == 0 || self.sphere_nodes == 0 || self.per_segment == 0 {
            return Err(Error::Config("grid sizes must be positive (radii ≥ 2)".into()));
        }
        if self.eps.iter().any(|e| *e <= 0.0) || self.path.iter().any(|(e, t)| *e <= 0.0 || *t < 0.0) {
            return Err(Error::Config("ε must be positive and t non-negative".into()));
        }
        for w in &self.widths {
            SmearedTest::gaussian(*w).validate()?;
        }
        Ok(())
    }

    fn compact(&self) -> Result<(CompactAlgebra, Weight)> {
        if !self.group.is_compact() {
            return Err(Error::Config(format!("{} is not a compact group; use ds-verify or rossman", self.group)));
        }
        let alg = CompactAlgebra::new(self.group)?;
        let lam = alg.datum.from_dynkin(&self.lambda)?;
        Ok((alg, lam))
    }
}

/// Result of one subcommand: the report body, overall verdict and an optional table.
pub struct Outcome {
    pub body: Value,
    pub pass: bool,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
        w.write_record(&self.header).map_err(|e| Error::Config(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|a| a * scale).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands

pub fn cmd_rootsys_info(cfg: &RunConfig) -> Result<Outcome> {
    let datum = build_root_datum(cfg.group);
    let mut body = json!({ "datum": RootDatumJson::from(&datum) });
    let mut table = Table::new(&["weight", "multiplicity"]);
    let mut pass = true;
    if cfg.group.is_compact() {
        let lam = datum.from_dynkin(&cfg.lambda)?;
        let dim = datum.weyl_dim(&lam)?;
        let mults = freudenthal(&lam, &datum)?;
        let total: u64 = mults.values().sum();
        pass = total == dim;
        let rows: Vec<Value> = mults.iter().map(|(w, m)| json!({ "weight": w.to_strings(), "multiplicity": m })).collect();
        for (w, m) in &mults {
            table.rows.push(vec![w.to_strings().join(" "), m.to_string()]);
        }
        body["highest_weight"] = json!(lam.to_strings());
        body["weyl_dim"] = json!(dim);
        body["freudenthal_total"] = json!(total);
        body["multiplicities"] = json!(rows);
    } else {
        let rf = RealFormDatum::new(datum);
        body["rho_c"] = json!(rf.rho_c.to_strings());
        body["rho_n"] = json!(rf.rho_n.to_strings());
        body["rho_tilde"] = json!(rf.rho_tilde.to_strings());
    }
    Ok(Outcome { body, pass, table: Some(table) })
}

pub fn cmd_irrep_build(cfg: &RunConfig) -> Result<Outcome> {
    let (alg, lam) = cfg.compact()?;
    let ir = alg.irrep(&lam)?;
    let cas = ir.casimir();
    let scalar = cas.trace() / ir.dim as f64;
    let cas_res = crate::linalg::max_abs(&(cas - crate::linalg::identity(ir.dim) * scalar));
    let comm = ir.commutator_residual(&alg.algebra);
    let weyl = alg.datum.weyl_dim(&lam)?;
    let pass = cas_res <= cfg.tol && comm <= cfg.tol && weyl as usize == ir.dim;
    let mut table = Table::new(&["weight", "multiplicity"]);
    for (w, m) in &ir.multiplicities {
        table.rows.push(vec![w.to_strings().join(" "), m.to_string()]);
    }
    let body = json!({
        "irrep": IrrepJson::new(cfg.group, &ir),
        "weyl_dim": weyl,
        "casimir_value": scalar.re,
        "casimir_residual": { "value": cas_res, "tol": cfg.tol, "pass": cas_res <= cfg.tol },
        "commutator_residual": { "value": comm, "tol": cfg.tol, "pass": comm <= cfg.tol },
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

#[derive(Serialize)]
struct KernelLocus {
    orbit_radius: f64,
    grid_step: f64,
    kernel_radii: Vec<f64>,
    rows: Vec<crate::dirac::ScanRow>,
    pass: bool,
}

/// Radii 2R·k/count for k = 1..=count; an even count puts a node on the orbit.
fn kernel_locus(cd: &CompactDirac, count: usize) -> KernelLocus {
    let nu = cd.orbit_point();
    let r = cd.lambda_rho_sq().sqrt();
    let ray: Vec<f64> = nu.iter().map(|v| v / r).collect();
    let step = 2.0 * r / count as f64;
    let radii: Vec<f64> = (1..=count).map(|k| step * k as f64).collect();
    let rows = cd.family.kernel_locus_scan(&ray, &radii);
    let kernel_radii: Vec<f64> = rows.iter().filter(|s| s.ker_dim >= 1).map(|s| s.radius).collect();
    let pass = !kernel_radii.is_empty() && kernel_radii.iter().all(|x| (x - r).abs() <= step * (1.0 + 1e-9));
    KernelLocus { orbit_radius: r, grid_step: step, kernel_radii, rows, pass }
}

fn locus_table(k: &KernelLocus) -> Table {
    let mut t = Table::new(&["radius", "min_abs_spec", "ker_dim"]);
    for r in &k.rows {
        t.rows.push(vec![r.radius.to_string(), r.min_abs_spec.to_string(), r.ker_dim.to_string()]);
    }
    t
}

pub fn cmd_verify_dirac(cfg: &RunConfig) -> Result<Outcome> {
    let (alg, lam) = cfg.compact()?;
    let cd = CompactDirac::new(alg, &lam)?;
    let n = cd.family.n();
    let sq = cd.scalar_square_residual();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let mu = random_vector(&mut rng, n, 2.0);
        let xi = random_vector(&mut rng, n, 2.0);
        worst = worst.max(cd.family.check_commutators(&mu, &xi).max());
    }
    let locus = kernel_locus(&cd, cfg.radii);
    let pass = sq <= cfg.tol && worst <= cfg.tol && locus.pass;
    let table = locus_table(&locus);
    let body = json!({
        "highest_weight": lam.to_strings(),
        "dim_v": cd.family.dim_v,
        "dim_s": cd.family.total_dim / cd.family.dim_v,
        "total_dim": cd.family.total_dim,
        "lambda_rho_sq": cd.lambda_rho_sq(),
        "scalar_square": { "residual": sq, "tol": cfg.tol, "pass": sq <= cfg.tol },
        "commutators": { "samples": cfg.samples, "max_residual": worst, "tol": cfg.tol, "pass": worst <= cfg.tol },
        "kernel_locus": locus,
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

pub fn cmd_spectrum_scan(cfg: &RunConfig) -> Result<Outcome> {
    let (alg, lam) = cfg.compact()?;
    let cd = CompactDirac::new(alg, &lam)?;
    let locus = kernel_locus(&cd, cfg.radii);
    let orbit = cd.orbit_kernel_dims();
    let restriction = cd.restriction_residual(&cd.orbit_point().iter().map(|v| 1.5 * v).collect::<Vec<_>>())?;
    let pass = locus.pass && orbit.iter().all(|d| *d >= 1) && restriction <= cfg.tol;
    let table = locus_table(&locus);
    let body = json!({
        "highest_weight": lam.to_strings(),
        "weyl_orbit_kernel_dims": orbit,
        "restriction_residual": { "value": restriction, "tol": cfg.tol, "pass": restriction <= cfg.tol },
        "kernel_locus": locus,
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

#[derive(Serialize)]
struct KirillovRow {
    x: Vec<f64>,
    trace: f64,
    a_hat: f64,
    orbital: [f64; 2],
    rel_error: f64,
    evaluator_gap: Option<f64>,
}

pub fn cmd_kirillov(cfg: &RunConfig) -> Result<Outcome> {
    let (alg, lam) = cfg.compact()?;
    let d = alg.datum.clone();
    let nu = &lam + &d.rho();
    let ir = alg.irrep(&lam)?;
    let n = alg.dim();
    // calibration point: λ = 0, X = 0 has volume 1
    let calib = chern::orbital_integral(&alg, &d.rho(), &vec![0.0; n], cfg.sphere_nodes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut table = Table::new(&["x", "trace", "a_hat_times_orbital", "rel_error"]);
    for _ in 0..cfg.samples {
        // off rank one the closed form needs X in the Cartan
        let x = if n == 3 {
            random_vector(&mut rng, 3, cfg.x_scale)
        } else {
            let mut v = vec![0.0; n];
            let h = random_vector(&mut rng, alg.rank(), cfg.x_scale);
            v[..alg.rank()].copy_from_slice(&h);
            v
        };
        let tr = ir.trace_exp(&x).re;
        let ah = chern::a_hat_algebra(&alg.algebra, &x)?;
        let orb = chern::orbital_integral(&alg, &nu, &x, cfg.sphere_nodes)?;
        let rel = (ah * orb.value[0] - tr).abs() / tr.abs();
        let gap = match (orb.sphere, orb.weyl) {
            (Some(s), Some(w)) => Some(((s[0] - w[0]).powi(2) + (s[1] - w[1]).powi(2)).sqrt()),
            _ => None,
        };
        table.rows.push(vec![format!("{x:?}"), tr.to_string(), (ah * orb.value[0]).to_string(), rel.to_string()]);
        rows.push(KirillovRow { x, trace: tr, a_hat: ah, orbital: orb.value, rel_error: rel, evaluator_gap: gap });
    }
    let max_rel = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let max_gap = rows.iter().filter_map(|r| r.evaluator_gap).fold(0.0, f64::max);
    let calib_err = (calib.value[0] - 1.0).abs();
    let mut pass = max_rel <= cfg.kirillov_tol && max_gap <= 1e-8 && calib_err <= 1e-10;

    // both limits of the Chern pipeline at the configured X
    let chern_part = if n <= 3 && cfg.x.len() == n {
        let cd = CompactDirac::new(alg.clone(), &lam)?;
        let opts = ChernOptions { nodes: cfg.nodes, ..ChernOptions::default() };
        let tr = ir.trace_exp(&cfg.x).re;
        let ah = chern::a_hat_algebra(&alg.algebra, &cfg.x)?;
        let target = tr / ah;
        let (e_end, t_end) = *cfg.path.last().unwrap();
        let start = chern::chern_integral(&cd.family, 1.0, 0.0, &cfg.x, &opts)?;
        let end = chern::chern_integral(&cd.family, e_end, t_end, &cfg.x, &opts)?;
        let orb = chern::orbital_integral(&alg, &nu, &cfg.x, cfg.sphere_nodes)?;
        let rel_start = (start.value[0] - target).abs() / target.abs();
        let rel_end = (end.value[0] - orb.value[0]).abs() / orb.value[0].abs();
        let ok = rel_start <= cfg.kirillov_tol && rel_end <= cfg.kirillov_tol && start.converged && end.converged;
        pass &= ok;
        json!({
            "x": cfg.x,
            "trace_over_a_hat": target,
            "orbital": orb.value,
            "index_limit": start,
            "localized_limit": end,
            "index_rel_error": rel_start,
            "localized_rel_error": rel_end,
            "tol": cfg.kirillov_tol,
            "pass": ok,
        })
    } else {
        Value::Null
    };
    let body = json!({
        "highest_weight": lam.to_strings(),
        "orbit_parameter": nu.to_strings(),
        "liouville_c": chern::LIOUVILLE_C,
        "calibration": { "value": calib.value, "error": calib_err, "tol": 1e-10 },
        "max_rel_error": max_rel,
        "max_evaluator_gap": max_gap,
        "tol": cfg.kirillov_tol,
        "evaluator_tol": 1e-8,
        "rows": rows,
        "chern": chern_part,
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

pub fn cmd_chern_flow(cfg: &RunConfig) -> Result<Outcome> {
    let (alg, lam) = cfg.compact()?;
    if cfg.x.len() != alg.dim() {
        return Err(Error::Config(format!("x has {} entries, the algebra has dimension {}", cfg.x.len(), alg.dim())));
    }
    let cd = CompactDirac::new(alg, &lam)?;
    let opts = ChernOptions { nodes: cfg.nodes, ..ChernOptions::default() };
    let path = chern::refine_path(&cfg.path, cfg.per_segment);
    let scan = chern::deformation_path_scan(&cd.family, &path, &cfg.x, &opts, cfg.path_tol)?;
    let eps_path: Vec<(f64, f64)> = cfg.eps.iter().map(|&e| (e, 0.0)).collect();
    let eps_vals: Vec<chern::ChernResult> =
        eps_path.iter().map(|&(e, t)| chern::chern_integral(&cd.family, e, t, &cfg.x, &opts)).collect::<Result<_>>()?;
    let eps_dev = eps_vals
        .iter()
        .flat_map(|a| eps_vals.iter().map(move |b| (a.value[0] - b.value[0]).abs() / a.value[0].abs()))
        .fold(0.0, f64::max);
    let eps_ok = eps_dev <= cfg.eps_tol && eps_vals.iter().all(|r| r.converged);
    let mut table = Table::new(&["eps", "t", "re", "im", "error_estimate", "converged"]);
    for r in scan.values.iter().chain(&eps_vals) {
        table.rows.push(vec![
            r.eps.to_string(),
            r.t.to_string(),
            r.value[0].to_string(),
            r.value[1].to_string(),
            r.error_estimate.to_string(),
            r.converged.to_string(),
        ]);
    }
    let pass = scan.pass && eps_ok;
    let body = json!({
        "highest_weight": lam.to_strings(),
        "x": cfg.x,
        "path": { "report": scan, "tol": cfg.path_tol },
        "eps_scan": { "values": eps_vals, "max_rel_deviation": eps_dev, "tol": cfg.eps_tol, "pass": eps_ok },
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

pub fn cmd_ds_verify(cfg: &RunConfig) -> Result<Outcome> {
    let model = DSModel::build(cfg.big_lambda, cfg.n)?;
    let kernel_gap = ds::kernel_gap_scan(&model)?;
    let kernel_gap_ok = kernel_gap.orbit_ker_dim == 1
        && kernel_gap.orbit_boosted_ker_dims.iter().all(|d| *d == 1)
        && kernel_gap.off_orbit_kernel_points == 0
        && kernel_gap.gap_lower_bound > 0.0;
    let s_values: Vec<f64> = (1..=cfg.sweep_points).map(|k| 2.0 * k as f64 / cfg.sweep_points as f64).collect();
    let killing = ds::metric_flip_sweep(&model, SweepMetric::Killing, &s_values);
    let flipped = ds::metric_flip_sweep(&model, SweepMetric::Flipped, &s_values);
    let sweep_ok = !killing.off_orbit_kernel.is_empty() && flipped.off_orbit_kernel.is_empty() && flipped.orbit_kernel;
    let ktypes = ds::ktype_bound_check(&model);
    let ktype_ok = ktypes.bound_holds && ktypes.equality_only_at_lowest && ktypes.knapp_solved;
    let r = model.orbit_radius();
    let mut cases = vec![ds::spectral_case_analysis(&model, &[0.0; 3])?];
    for mu in [[r, 0.6 * r, 0.8 * r], [-r, 0.6 * r, 0.8 * r]] {
        cases.push(ds::spectral_case_analysis(&model, &mu)?);
    }
    for mu in ds::elliptic_sample(&model.algebra, cfg.samples.min(10), cfg.seed)? {
        match ds::spectral_case_analysis(&model, &mu) {
            Ok(c) => cases.push(c),
            Err(Error::Truncation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let cases_ok = cases.iter().all(|c| c.certified);
    let mixed = ds::mixed_sweep(&model, &[-r, 0.0, 0.0], &[1.0, 1.0, 0.0], &[0.2, 0.1, 0.05, 0.01, 0.001])?;
    let mixed_ok = mixed.all_positive && mixed.converges_to_elliptic;
    let dirs = [[1.0, 1.0, 0.0], [-1.0, 0.6, 0.8]];
    let boundary = ds::boundary_decay_check(&model, &dirs, &[2.0, 4.0, 8.0]);
    let boundary_ok = boundary.decreasing && boundary.killing_null_squares_vanish && boundary.flipped_squares_nonzero;
    let mut table = Table::new(&["mu0", "mu1", "mu2", "min_abs", "formula_gap", "ker_dim"]);
    for row in &kernel_gap.rows {
        table.rows.push(vec![
            row.mu[0].to_string(),
            row.mu[1].to_string(),
            row.mu[2].to_string(),
            row.min_abs.to_string(),
            row.formula_gap.to_string(),
            row.ker_dim.to_string(),
        ]);
    }
    let pass = kernel_gap_ok && sweep_ok && ktype_ok && cases_ok && mixed_ok && boundary_ok;
    let body = json!({
        "big_lambda": cfg.big_lambda,
        "n": cfg.n,
        "lambda_rho_sq": model.lambda_rho_sq(),
        "casimir_residual": model.casimir_residual(),
        "commutator_residual": model.commutator_residual(),
        "kernel_gap": { "report": kernel_gap, "pass": kernel_gap_ok },
        "metric_flip": { "killing": killing, "flipped": flipped, "pass": sweep_ok },
        "ktypes": { "report": ktypes, "pass": ktype_ok },
        "cases": { "reports": cases, "pass": cases_ok },
        "mixed": { "report": mixed, "pass": mixed_ok },
        "boundary": { "report": boundary, "pass": boundary_ok },
    });
    Ok(Outcome { body, pass, table: Some(table) })
}

pub fn cmd_rossman(cfg: &RunConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut table = Table::new(&["width", "lhs", "rhs", "oracle", "combined_error", "n_converged", "r_converged", "pass"]);
    for &w in &cfg.widths {
        let r = ds::rossman_check(cfg.big_lambda, cfg.n, &SmearedTest::gaussian(w))?;
        table.rows.push(vec![
            w.to_string(),
            r.lhs_doubled_n.value[0].to_string(),
            r.rhs_doubled_r.value[0].to_string(),
            r.oracle.to_string(),
            r.combined_error.to_string(),
            r.n_converged.to_string(),
            r.r_converged.to_string(),
            r.pass.to_string(),
        ]);
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    let body = json!({ "big_lambda": cfg.big_lambda, "n": cfg.n, "checks": reports });
    Ok(Outcome { body, pass, table: Some(table) })
}

// ---------------------------------------------------------------------------
// argument parsing and dispatch

#[derive(Parser, Debug)]
#[command(name = "dirac-orbits", version, about = "Dirac operator families on coadjoint orbits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root datum, Weyl group order and weight multiplicities.
    RootsysInfo(Opts),
    /// Build an irreducible representation and check its relations.
    IrrepBuild(Opts),
    /// Scalar-square, commutator and kernel-locus suites for the compact family.
    VerifyDirac(Opts),
    /// Radial kernel scan through the orbit point.
    SpectrumScan(Opts),
    /// Kirillov character closure and both limits of the Chern pipeline.
    Kirillov(Opts),
    /// Deformation path and ε scan of the Chern integral.
    ChernFlow(Opts),
    /// Discrete-series spectral certification for SL(2,R).
    DsVerify(Opts),
    /// Smeared Rossman character check for SL(2,R).
    Rossman(Opts),
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Flat key = value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub group: Option<String>,
    /// Dynkin labels, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long = "big-lambda")]
    pub big_lambda: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub widths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
    /// Compare the JSON report byte for byte against this file.
    #[arg(long)]
    pub golden: Option<String>,
    /// Any other config key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Opts {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k, v)?;
        }
        let flags = [
            ("group", &self.group),
            ("lambda", &self.lambda),
            ("big_lambda", &self.big_lambda),
            ("n", &self.n),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("widths", &self.widths),
            ("x", &self.x),
            ("out", &self.out),
            ("csv", &self.csv),
            ("golden", &self.golden),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Command {
    fn parts(&self) -> (&'static str, &Opts, fn(&RunConfig) -> Result<Outcome>) {
        match self {
            Command::RootsysInfo(o) => ("rootsys-info", o, cmd_rootsys_info),
            Command::IrrepBuild(o) => ("irrep-build", o, cmd_irrep_build),
            Command::VerifyDirac(o) => ("verify-dirac", o, cmd_verify_dirac),
            Command::SpectrumScan(o) => ("spectrum-scan", o, cmd_spectrum_scan),
            Command::Kirillov(o) => ("kirillov", o, cmd_kirillov),
            Command::ChernFlow(o) => ("chern-flow", o, cmd_chern_flow),
            Command::DsVerify(o) => ("ds-verify", o, cmd_ds_verify),
            Command::Rossman(o) => ("rossman", o, cmd_rossman),
        }
    }
}

/// Serialize a finished run; identical configs give identical bytes.
pub fn render_report(command: &str, cfg: &RunConfig, out: &Outcome) -> String {
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": to_value(cfg),
        "pass": out.pass,
        "report": out.body,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// Run one configured command; returns the rendered report and verdict.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<(String, bool)> {
    let f = match command {
        "rootsys-info" => cmd_rootsys_info,
        "irrep-build" => cmd_irrep_build,
        "verify-dirac" => cmd_verify_dirac,
        "spectrum-scan" => cmd_spectrum_scan,
        "kirillov" => cmd_kirillov,
        "chern-flow" => cmd_chern_flow,
        "ds-verify" => cmd_ds_verify,
        "rossman" => cmd_rossman,
        other => return Err(Error::Config(format!("unknown command '{other}'"))),
    };
    let out = f(cfg)?;
    Ok((render_report(command, cfg, &out), out.pass))
}

fn emit(name: &str, cfg: &RunConfig, out: &Outcome) -> Result<bool> {
    let text = render_report(name, cfg, out);
    match &cfg.out {
        Some(p) => fs::write(p, &text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(t)) = (&cfg.csv, &out.table) {
        t.write(p)?;
    }
    if let Some(g) = &cfg.golden {
        let want = fs::read_to_string(g)?;
        if want != text {
            eprintln!("report differs from golden file {}", g.display());
            return Ok(false);
        }
    }
    Ok(out.pass)
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, opts, f) = cli.command.parts();
    let cfg = match opts.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match f(&cfg) {
        Ok(o) => o,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("suite failed: {e}");
            return 1;
        }
    };
    match emit(name, &cfg, &outcome) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("{name}: FAIL");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_and_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_document("# comment\ngroup = a2\nlambda = 1,1\nwidths = 0.5, 0.7\npath = 1:0, 2:3\n").unwrap();
        assert_eq!(cfg.group, GroupLabel::A2);
        assert_eq!(cfg.lambda, vec![1, 1]);
        assert_eq!(cfg.widths, vec![0.5, 0.7]);
        assert_eq!(cfg.path, vec![(1.0, 0.0), (2.0, 3.0)]);
        cfg.validate().unwrap();
        assert!(cfg.apply_document("bogus = 1").is_err());
        assert!(cfg.apply_document("no equals sign").is_err());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.set("lambda", "-1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("dominant")));
        let mut cfg = RunConfig::default();
        cfg.set("tol", "0").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.set("widths", "0.05").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("guard")));
    }
}
