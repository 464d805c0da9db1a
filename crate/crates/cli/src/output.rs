//! CSV tables and plain-text matrix dumps, each behind a `#` header that
//! records the resolved configuration.

use std::io::Write;

use trapfid_core::num_complex::Complex64;
use trapfid_core::nalgebra::DMatrix;
use trapfid_core::{build_h0, build_h1, fc_matrix, TrapConfig};

use crate::config::{RunConfig, Truncation};
use crate::error::CliResult;
use crate::sweep::{auto_n_max, plan, ConvergeReport, Motion, Row};

pub const COLUMNS: [&str; 9] = [
    "mode",
    "theta",
    "fidelity",
    "eta_ld",
    "rabi",
    "t_ratio",
    "initial_state",
    "n_max",
    "converged",
];

pub fn write_header(cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    writeln!(out, "# trapfid {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in cfg.to_pairs() {
        writeln!(out, "{}", format!("# {k} = {v}").trim_end())?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_sweep(cfg: &RunConfig, rows: &[Row], out: &mut impl Write) -> CliResult<()> {
    write_header(cfg, out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.mode.to_string(),
            r.theta.to_string(),
            r.fidelity.to_string(),
            r.eta_ld.to_string(),
            r.rabi.to_string(),
            opt(r.t_ratio),
            r.initial_state.to_string(),
            r.n_max.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_converge(cfg: &RunConfig, reports: &[ConvergeReport], out: &mut impl Write) -> CliResult<()> {
    write_header(cfg, out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eta_ld", "t_ratio", "initial_state", "n_max", "delta", "levels"])?;
    for r in reports {
        let levels: Vec<String> = r.levels.iter().map(|n| n.to_string()).collect();
        w.write_record([
            r.spec.eta_ld.to_string(),
            opt(r.spec.t_ratio),
            r.spec.state.to_string(),
            r.n_max.to_string(),
            format!("{:e}", r.delta),
            levels.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_matrix(name: &str, m: &DMatrix<Complex64>, out: &mut impl Write) -> CliResult<()> {
    let nonzero: Vec<(usize, usize, Complex64)> = (0..m.ncols())
        .flat_map(|c| (0..m.nrows()).map(move |r| (r, c)))
        .map(|(r, c)| (r, c, m[(r, c)]))
        .filter(|(_, _, z)| z.re != 0.0 || z.im != 0.0)
        .collect();
    writeln!(out, "# matrix {name} {} {} {}", m.nrows(), m.ncols(), nonzero.len())?;
    let mut sorted = nonzero;
    sorted.sort_by_key(|&(r, c, _)| (r, c));
    for (r, c, z) in sorted {
        writeln!(out, "{r} {c} {:e} {:e}", z.re, z.im)?;
    }
    Ok(())
}

/// FC matrix and both Hamiltonian pieces for the first Lamb-Dicke parameter,
/// as sparse `row col re im` triplets after a `# matrix name rows cols nnz`
/// line. Hamiltonian indices interleave `(g,0), (e,0), (g,1), ...`.
pub fn write_dump(cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let spec = plan(cfg)[0];
    let top = Motion::build(&spec, cfg)?.support_top();
    let n_max = match cfg.truncation {
        Truncation::Fixed(n) => n,
        Truncation::Auto => auto_n_max(spec.eta_ld, top),
    };
    let trap = TrapConfig::new(spec.eta_ld, cfg.rabi, n_max)?.with_detuning(cfg.detuning)?;
    write_header(cfg, out)?;
    writeln!(out, "# resolved eta-ld = {} n-max = {n_max}", spec.eta_ld)?;
    write_matrix("fc", fc_matrix(n_max, spec.eta_ld)?.entries(), out)?;
    write_matrix("h0", &build_h0(&trap), out)?;
    write_matrix("h1", &build_h1(&trap), out)?;
    Ok(())
}
