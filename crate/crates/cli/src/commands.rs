//! CSV-producing subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use qudit_teleport::noise::{self, ComparisonModel, DetectorModel, PovmLabel};
use qudit_teleport::teleport::{self, gain_table, teleport_epr};
use qudit_teleport::{FockVector, SchemeParams, SqueezingParams};

use crate::format::real;

/// Header plus rows, already formatted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().context("flushing CSV buffer")
    }

    pub fn write(&self, out: Option<&Path>) -> Result<()> {
        let bytes = self.to_csv()?;
        match out {
            Some(path) => {
                fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(&bytes)?;
                Ok(stdout.flush()?)
            }
        }
    }
}

/// Fock gains for `(d, N)` pairs sharing one photon budget `d·N`.
///
/// Without `n_list`, `N = budget / d` with the default budget of 20.
pub fn gains(d_list: &[usize], n_list: Option<&[usize]>) -> Result<Table> {
    const DEFAULT_BUDGET: usize = 20;
    let pairs: Vec<(usize, usize)> = match n_list {
        Some(ns) => {
            if ns.len() != d_list.len() {
                bail!("--d and --n must list the same number of values ({} vs {})", d_list.len(), ns.len());
            }
            d_list.iter().copied().zip(ns.iter().copied()).collect()
        }
        None => d_list
            .iter()
            .map(|&d| {
                if d == 0 || !DEFAULT_BUDGET.is_multiple_of(d) {
                    bail!("d = {d} does not divide the default budget {DEFAULT_BUDGET}; pass --n explicitly");
                }
                Ok((d, DEFAULT_BUDGET / d))
            })
            .collect::<Result<_>>()?,
    };
    let mut params = Vec::with_capacity(pairs.len());
    for &(d, n) in &pairs {
        params.push(SchemeParams::new(n, d)?);
    }
    let budget = params[0].support();
    if params.iter().any(|p| p.support() != budget) {
        bail!("every (d, N) pair must share the same d·N");
    }
    params.sort_by_key(|p| (p.photon_cutoff(), p.num_modes()));
    params.dedup();

    let mut table = Table::new(vec!["d", "N", "k", "gain"]);
    for p in params {
        for (k, g) in gain_table(p, budget).into_iter().enumerate() {
            table.rows.push(vec![
                p.photon_cutoff().to_string(),
                p.num_modes().to_string(),
                k.to_string(),
                real(g),
            ]);
        }
    }
    Ok(table)
}

/// Fidelity and success probability of teleporting one EPR arm.
pub fn epr_sweep(v_s: f64, d_list: &[usize], n_list: &[usize]) -> Result<Table> {
    let squeeze = SqueezingParams::from_vs(v_s)?;
    let mut grid = Vec::with_capacity(d_list.len() * n_list.len());
    for &d in d_list {
        for &n in n_list {
            grid.push(SchemeParams::new(n, d)?);
        }
    }
    grid.sort_by_key(|p| (p.photon_cutoff(), p.num_modes()));
    grid.dedup();

    let mut table = Table::new(vec!["d", "N", "chi", "f", "P_suc"]);
    for p in grid {
        let out = teleport_epr(squeeze, p);
        table.rows.push(vec![
            p.photon_cutoff().to_string(),
            p.num_modes().to_string(),
            real(squeeze.chi),
            real(out.fidelity),
            real(out.success_probability),
        ]);
    }
    Ok(table)
}

/// Success probabilities of both schemes over an `(η, ξ)` grid.
pub fn compare(
    eta_grid: &[f64],
    xi_grid: &[f64],
    model: ComparisonModel,
    num_modes: usize,
) -> Result<Table> {
    if num_modes == 0 {
        bail!("--n must be at least 1");
    }
    let mut etas = eta_grid.to_vec();
    let mut xis = xi_grid.to_vec();
    for v in etas.iter().chain(&xis) {
        if !(0.0..=1.0).contains(v) {
            bail!("efficiency {v} outside [0, 1]");
        }
    }
    etas.sort_by(f64::total_cmp);
    etas.dedup();
    xis.sort_by(f64::total_cmp);
    xis.dedup();

    let mut table = Table::new(vec!["eta", "xi", "scheme1", "scheme2", "advantage"]);
    for &eta in &etas {
        for &xi in &xis {
            let (s1, s2) = model.evaluate(eta, xi, num_modes);
            table.rows.push(vec![
                real(eta),
                real(xi),
                real(s1),
                real(s2),
                (s2 > s1).to_string(),
            ]);
        }
    }
    Ok(table)
}

/// Parse `re,im` lines; blank lines and `#` comments are skipped.
pub fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected `re,im`", lineno + 1))?;
        let re: f64 = re
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad real part", lineno + 1))?;
        let im: f64 = im
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad imaginary part", lineno + 1))?;
        if !(re.is_finite() && im.is_finite()) {
            bail!("line {}: non-finite amplitude", lineno + 1);
        }
        out.push(Complex64::new(re, im));
    }
    if out.is_empty() {
        bail!("no amplitudes found");
    }
    Ok(out)
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    Ok(Complex64::new(
        re.trim()
            .parse()
            .with_context(|| format!("bad real part in {s:?}"))?,
        im.trim()
            .parse()
            .with_context(|| format!("bad imaginary part in {s:?}"))?,
    ))
}

pub enum TeleportInput {
    /// Amplitudes as read; normalized before teleportation.
    Amplitudes(Vec<Complex64>),
    Coherent(Complex64),
}

/// Input and teleported amplitudes, one row per photon number.
pub fn teleport(input: TeleportInput, params: SchemeParams) -> Result<Table> {
    let (amplitudes, outcome) = match input {
        TeleportInput::Amplitudes(raw) => {
            let state = FockVector::new(raw)?.normalized()?;
            let outcome = teleport::teleport_state(&state, params)?;
            (state.into_amplitudes(), outcome)
        }
        TeleportInput::Coherent(alpha) => {
            let support = params.support();
            let amplitudes = (0..=support)
                .map(|k| teleport::coherent_amplitude(alpha, k))
                .collect();
            (amplitudes, teleport::teleport_coherent(alpha, params)?)
        }
    };
    let gains = gain_table(params, amplitudes.len() - 1);
    let mut table = Table::new(vec![
        "k", "gain", "in_re", "in_im", "out_re", "out_im", "p_suc",
    ]);
    for (k, c) in amplitudes.iter().enumerate() {
        let out = outcome.state.amplitude(k);
        table.rows.push(vec![
            k.to_string(),
            real(gains[k]),
            real(c.re),
            real(c.im),
            real(out.re),
            real(out.im),
            real(outcome.success_probability),
        ]);
    }
    Ok(table)
}

/// Detector POVM weights. With `resolve = Some(K)` the `K + 2` elements of a
/// detector resolving up to `K` clicks; otherwise the raw elements for
/// `0..=cutoff` clicks.
pub fn povm(eta: f64, nu: f64, cutoff: usize, resolve: Option<usize>) -> Result<Table> {
    let det = DetectorModel::new(eta, nu)?;
    let elements = match resolve {
        Some(k) => noise::pnr_povm(det, k, cutoff),
        None => (0..=cutoff)
            .map(|c| noise::povm_element(c, det, cutoff))
            .collect(),
    };
    let mut table = Table::new(vec!["element", "m", "weight"]);
    for e in elements {
        let label = match e.label {
            PovmLabel::Clicks(c) => c.to_string(),
            PovmLabel::AtLeast(c) => format!(">={c}"),
        };
        for (m, w) in e.weights.iter().enumerate() {
            table
                .rows
                .push(vec![label.clone(), m.to_string(), real(*w)]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col<'a>(t: &'a Table, name: &str) -> Vec<&'a str> {
        let i = t.header.iter().position(|h| *h == name).unwrap();
        t.rows.iter().map(|r| r[i].as_str()).collect()
    }

    #[test]
    fn gains_rows() {
        let t = gains(&[1, 2, 4, 5, 10, 20], None).unwrap();
        assert_eq!(t.rows.len(), 6 * 21);
        let row = t
            .rows
            .iter()
            .find(|r| r[0] == "1" && r[1] == "20" && r[2] == "1")
            .unwrap();
        assert_eq!(row[3], "1");
        assert!(t.rows.iter().filter(|r| r[0] == "20").all(|r| r[3] == "1"));
        assert!(gains(&[3], None).is_err());
        assert!(gains(&[1, 2], Some(&[20, 5])).is_err());
        assert!(gains(&[1, 2], Some(&[20])).is_err());
    }

    #[test]
    fn gains_dominate_with_larger_d() {
        let t = gains(&[1, 2, 4, 5, 10, 20], None).unwrap();
        let value = |d: &str, k: usize| -> f64 {
            t.rows
                .iter()
                .find(|r| r[0] == d && r[2] == k.to_string())
                .unwrap()[3]
                .parse()
                .unwrap()
        };
        for k in 0..=20 {
            let ordered = ["1", "2", "4", "5", "10", "20"].map(|d| value(d, k));
            for pair in ordered.windows(2) {
                assert!(pair[1] >= pair[0], "k={k}");
            }
        }
    }

    #[test]
    fn epr_rows() {
        let t = epr_sweep(1.0, &[1, 2], &[1, 3]).unwrap();
        assert!(col(&t, "f").iter().all(|f| *f == "1"));
        assert!(col(&t, "P_suc").iter().all(|p| *p == "1"));
        assert_eq!(col(&t, "d"), vec!["1", "1", "2", "2"]);
        assert!(epr_sweep(0.5, &[1], &[1]).is_err());
        assert!(epr_sweep(10.0, &[0], &[1]).is_err());
    }

    #[test]
    fn compare_rows() {
        let t = compare(
            &[1.0],
            &[1.0, 0.0],
            ComparisonModel::QuartitInterferometer,
            11,
        )
        .unwrap();
        assert_eq!(t.rows[0][..2], ["1".to_string(), "0".to_string()]);
        assert_eq!(col(&t, "advantage"), vec!["false", "true"]);
        assert!(compare(&[1.5], &[0.5], ComparisonModel::Deterministic, 3).is_err());
    }

    #[test]
    fn amplitude_parsing() {
        let amps = parse_amplitudes("# header\n0.6,0\n\n 0, 0.8 \n").unwrap();
        assert_eq!(
            amps,
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]
        );
        assert!(parse_amplitudes("1.0\n").is_err());
        assert!(parse_amplitudes("").is_err());
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("1,-2").unwrap(), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn teleport_rows() {
        let params = SchemeParams::new(2, 1).unwrap();
        let s = 0.5f64.sqrt();
        let t = teleport(
            TeleportInput::Amplitudes(vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
            ]),
            params,
        )
        .unwrap();
        assert_eq!(col(&t, "gain"), vec!["1", "1", "0.5"]);
        assert_eq!(col(&t, "p_suc")[0], "0.625");

        let t = teleport(TeleportInput::Coherent(Complex64::new(0.0, 0.0)), params).unwrap();
        assert_eq!(col(&t, "out_re"), vec!["1", "0", "0"]);
    }

    #[test]
    fn povm_rows() {
        let t = povm(1.0, 0.0, 2, None).unwrap();
        assert_eq!(t.rows.len(), 9);
        let t = povm(0.5, 0.0, 3, Some(1)).unwrap();
        assert_eq!(
            col(&t, "element").iter().filter(|e| **e == ">=2").count(),
            4
        );
        assert!(povm(1.2, 0.0, 3, None).is_err());
    }
}
