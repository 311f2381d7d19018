use std::fmt::Write;

use clap::ValueEnum;
use lownoise::capacity::bound_curves;
use lownoise::channel::{depolarizing, generalized_pauli, xz_channel, PauliFamily};
use lownoise::degradability::{
    depol_analytic_bound, depol_tuned_eta, dg_sdp_with, pauli_analytic_bound, tuned_pauli_eta, xz_analytic_bound,
    xz_tuned_eta,
};
use lownoise::sdp::SdpOptions;
use lownoise::{Channel, Error};
use rayon::prelude::*;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Depol,
    Xz,
    PauliPoly,
    GeneralizedPauli,
}

/// Columns in output order: `d`, `s`, `bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Method {
    Sdp,
    Tuned,
    Analytic,
}

impl Method {
    fn column(self) -> &'static str {
        match self {
            Method::Sdp => "d",
            Method::Tuned => "s",
            Method::Analytic => "bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub family: Family,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub methods: Vec<Method>,
    /// Linear and quadratic coefficients of the `pauli-poly` weights.
    pub linear: [f64; 3],
    pub quadratic: [f64; 3],
    /// Qudit dimension of the `generalized-pauli` family.
    pub dim: usize,
    pub sdp: SdpOptions,
}

type Cell = (Method, lownoise::Result<f64>);

pub struct Table {
    pub text: String,
    pub numerical_failures: usize,
}

fn grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64).collect()
}

fn check_grid(p_min: f64, p_max: f64, steps: usize) -> Result<(), CliError> {
    if !(p_min >= 0.0 && p_min < p_max && p_max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 <= pmin < pmax, got pmin = {p_min}, pmax = {p_max}")));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("need at least 2 steps, got {steps}")));
    }
    Ok(())
}

enum Source {
    Depol,
    Xz,
    Poly(PauliFamily<f64>),
    Generalized(usize),
}

impl Source {
    fn channel(&self, p: f64) -> lownoise::Result<Channel> {
        match self {
            Source::Depol => depolarizing(p),
            Source::Xz => xz_channel(p, p),
            Source::Poly(f) => f.channel(p),
            Source::Generalized(d) => generalized_pauli(*d, &generalized_weights(*d, p)),
        }
    }

    fn eval(&self, method: Method, p: f64, sdp: &SdpOptions) -> lownoise::Result<f64> {
        let constructed = |r: lownoise::degradability::DegradabilityReport| r.eta_constructed.unwrap_or(f64::NAN);
        match (method, self) {
            (Method::Sdp, _) => Ok(dg_sdp_with(&self.channel(p)?, sdp)?.eta_sdp.unwrap_or(f64::NAN)),
            (Method::Tuned, Source::Depol) => depol_tuned_eta(p).map(constructed),
            (Method::Tuned, Source::Xz) => xz_tuned_eta(p).map(constructed),
            (Method::Tuned, Source::Poly(f)) => tuned_pauli_eta(f, p).map(constructed),
            (Method::Tuned, Source::Generalized(_)) => unreachable!("rejected during validation"),
            (Method::Analytic, Source::Depol) => Ok(depol_analytic_bound(p)),
            (Method::Analytic, Source::Xz) => Ok(xz_analytic_bound(p)),
            (Method::Analytic, Source::Poly(f)) => Ok(pauli_analytic_bound(f.linear_coefficients(), p)),
            // 2ε^{3/2} with ε = ‖N − id‖_⋄ = 2p for a Weyl-covariant channel.
            (Method::Analytic, Source::Generalized(_)) => Ok(2.0 * (2.0 * p).powf(1.5)),
        }
    }
}

/// Identity weight `1 − p`, the rest spread evenly over the `d² − 1` shifts.
pub fn generalized_weights(d: usize, p: f64) -> Vec<f64> {
    let n = d * d;
    (0..n).map(|k| if k == 0 { 1.0 - p } else { p / (n - 1) as f64 }).collect()
}

/// Largest grid point of `[0, p_max]` up to which the family stays a distribution.
fn poly_family(linear: [f64; 3], quadratic: [f64; 3], p_max: f64) -> Result<PauliFamily<f64>, CliError> {
    let coeffs = std::array::from_fn(|i| vec![0.0, linear[i], quadratic[i]]);
    let at_zero = PauliFamily::new(coeffs, 0.0).map_err(|e| CliError::Usage(e.to_string()))?;
    const GRID: usize = 1000;
    let valid_up_to = (0..=GRID)
        .map(|k| p_max.min(1.0) * k as f64 / GRID as f64)
        .take_while(|&p| at_zero.probabilities(p).is_ok())
        .last()
        .unwrap_or(0.0);
    Ok(PauliFamily::new(at_zero.coefficients().clone(), valid_up_to).unwrap_or(at_zero))
}

fn is_numerical(e: &Error) -> bool {
    matches!(e, Error::Solver { .. } | Error::Verification { .. })
}

pub fn default_methods(family: Family) -> Vec<Method> {
    match family {
        Family::GeneralizedPauli => vec![Method::Sdp, Method::Analytic],
        _ => vec![Method::Sdp, Method::Tuned, Method::Analytic],
    }
}

pub fn sweep(cfg: &SweepConfig) -> Result<Table, CliError> {
    check_grid(cfg.p_min, cfg.p_max, cfg.steps)?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(CliError::Usage("no methods selected".into()));
    }
    let source = match cfg.family {
        Family::Depol => Source::Depol,
        Family::Xz => Source::Xz,
        Family::PauliPoly => Source::Poly(poly_family(cfg.linear, cfg.quadratic, cfg.p_max)?),
        Family::GeneralizedPauli => {
            if cfg.dim < 2 {
                return Err(CliError::Usage(format!("generalized-pauli needs dimension >= 2, got {}", cfg.dim)));
            }
            if methods.contains(&Method::Tuned) {
                return Err(CliError::Usage("no tuned degrading map is available for generalized-pauli".into()));
            }
            Source::Generalized(cfg.dim)
        }
    };

    let rows: Vec<(f64, Vec<Cell>)> = grid(cfg.p_min, cfg.p_max, cfg.steps)
        .into_par_iter()
        .map(|p| (p, methods.iter().map(|&m| (m, source.eval(m, p, &cfg.sdp))).collect()))
        .collect();

    let mut text = String::from("p");
    for m in &methods {
        text.push(' ');
        text.push_str(m.column());
    }
    text.push('\n');
    let mut numerical_failures = 0;
    for (p, cells) in rows {
        write!(text, "{p:.10e}").unwrap();
        for (m, value) in cells {
            let v = value.unwrap_or_else(|e| {
                if is_numerical(&e) {
                    numerical_failures += 1;
                }
                eprintln!("warning: p = {p:e}, method {}: {e}", m.column());
                f64::NAN
            });
            write!(text, " {v:.10e}").unwrap();
        }
        text.push('\n');
    }
    Ok(Table { text, numerical_failures })
}

/// Columns `p`, then `g_r<r>` and `dg_r<r>` for each exponent.
pub fn curves(c: f64, rs: &[f64], p_min: f64, p_max: f64, steps: usize) -> Result<String, CliError> {
    if rs.is_empty() {
        return Err(CliError::Usage("need at least one exponent r".into()));
    }
    check_grid(p_min, p_max, steps)?;
    let ps = grid(p_min, p_max, steps);
    let columns = rs
        .iter()
        .map(|&r| bound_curves(c, r, &ps).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::from("p");
    for r in rs {
        write!(text, " g_r{r} dg_r{r}").unwrap();
    }
    text.push('\n');
    for (i, p) in ps.iter().enumerate() {
        write!(text, "{p:.10e}").unwrap();
        for col in &columns {
            write!(text, " {:.10e} {:.10e}", col[i].g, col[i].dg).unwrap();
        }
        text.push('\n');
    }
    Ok(text)
}
