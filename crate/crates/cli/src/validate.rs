//! The invariant suite behind `iontrap validate`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use iontrap_core::oracle::validate_series_solution;
use iontrap_core::rwa::{rwa_energy, rwa_hamiltonian, sector_eigenvalues, RwaQuery, RwaScheme};
use iontrap_core::series::{
    case1_closed_form, case2_closed_form, case2_constraint_residual, case2_energies,
    energy_identity_case1,
};
use iontrap_core::states::cat_identity_overlap;
use iontrap_core::{Branch, FockBasis};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    EnergyIdentity,
    BranchSets,
    Constraint,
    OracleMembership,
    Rwa,
    Cat,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all" => Suite::All,
            "eq13" | "energy_identity" => Suite::EnergyIdentity,
            "branch_sets" => Suite::BranchSets,
            "constraint" => Suite::Constraint,
            "oracle" | "oracle_membership" => Suite::OracleMembership,
            "rwa" => Suite::Rwa,
            "cat" => Suite::Cat,
            other => {
                return Err(format!(
                    "unknown suite `{other}` (all, eq13, branch_sets, constraint, oracle_membership, rwa, cat)"
                ))
            }
        })
    }
}

/// `NxM` grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid(pub usize, pub usize);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid `{s}`: {e}"));
        let g = Grid(parse(a)?, parse(b)?);
        if g.0 < 2 || g.1 < 2 {
            return Err(format!("grid needs at least 2x2 points, got `{s}`"));
        }
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub suite: Suite,
    pub grid: Grid,
    pub cutoff: usize,
    /// Added to every series energy before the oracle check. Test hook for
    /// the negative control.
    pub perturb_energy: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            grid: Grid(50, 50),
            cutoff: crate::config::DEFAULT_CUTOFF,
            perturb_energy: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest deviation seen, in the check's own measure.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

struct Outcome {
    cases: usize,
    worst: f64,
    detail: String,
    /// False when some case failed on a criterion other than `worst`.
    verdicts_ok: bool,
}

fn outcome(cases: usize, worst: f64, detail: impl Into<String>) -> CliResult<Outcome> {
    Ok(Outcome {
        cases,
        worst,
        detail: detail.into(),
        verdicts_ok: true,
    })
}

fn check(
    name: &'static str,
    tolerance: f64,
    run: impl FnOnce() -> CliResult<Outcome>,
) -> CliResult<Check> {
    let t = Instant::now();
    let Outcome {
        cases,
        worst,
        detail,
        verdicts_ok,
    } = run()?;
    Ok(Check {
        name,
        passed: cases > 0 && worst <= tolerance && verdicts_ok,
        cases,
        worst,
        tolerance,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    })
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn energy_identity(g: Grid) -> CliResult<Outcome> {
    let (mut cases, mut worst, mut skipped) = (0, 0.0f64, 0);
    for eta in grid(0.0, 1.0, g.0).filter(|&e| e > 0.0) {
        for eps in grid(-1.0, 1.0, g.1) {
            for b in Branch::BOTH {
                match case1_closed_form(eta, eps, b) {
                    Ok(sol) => {
                        cases += 1;
                        let want = energy_identity_case1(sol.rabi(), eta);
                        worst = worst.max((sol.energy - want).abs());
                    }
                    Err(_) => skipped += 1,
                }
            }
        }
    }
    outcome(cases, worst, format!("{skipped} infeasible points skipped; eta=0 row excluded"))
}

fn branch_set_equality() -> CliResult<Outcome> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..100 {
        let rabi = rng.gen_range(0.0..4.0);
        let eta = rng.gen_range(0.0..1.5);
        let e = case2_energies(rabi, eta);
        let (mut p, mut m) = (e.plus, e.minus);
        p.sort_by(f64::total_cmp);
        m.sort_by(f64::total_cmp);
        if p.len() != m.len() {
            worst = f64::INFINITY;
            continue;
        }
        cases += 1;
        for (x, y) in p.iter().zip(&m) {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(cases, worst, "100 seeded draws, omega in [0,4), eta in [0,1.5)")
}

const CASE2_POINTS: [(f64, f64); 4] = [(0.5, 0.1), (1.0, 0.3), (2.0, 0.5), (3.0, 0.8)];
const CASE1_POINTS: [(f64, f64); 4] = [(0.2, 0.0), (0.3, 0.2), (0.6, -0.3), (0.9, 0.1)];

fn constraint_consistency() -> CliResult<Outcome> {
    let (mut cases, mut worst) = (0, 0.0f64);
    for (rabi, eta) in CASE2_POINTS {
        for sol in case2_closed_form(rabi, eta)? {
            cases += 1;
            let r = case2_constraint_residual(rabi, eta, sol.eps(), sol.branch)?;
            worst = worst.max(r).max(sol.termination_residual);
        }
    }
    outcome(cases, worst, "order-two constraint and termination residuals")
}

fn oracle_membership(cutoff: usize, delta: f64) -> CliResult<Outcome> {
    let basis = FockBasis::with_spin(cutoff)?;
    let mut sols = Vec::new();
    for (eta, eps) in CASE1_POINTS {
        for b in Branch::BOTH {
            if let Ok(s) = case1_closed_form(eta, eps, b) {
                sols.push(s);
            }
        }
    }
    for (rabi, eta) in CASE2_POINTS {
        sols.extend(case2_closed_form(rabi, eta)?);
    }
    let (mut worst, mut failed, mut overlap) = (0.0f64, 0, 1.0f64);
    for mut sol in sols.iter().cloned() {
        sol.energy += delta;
        let r = validate_series_solution(&sol, basis)?;
        worst = worst.max(r.eigen_gap);
        overlap = overlap.min(r.overlap);
        if !r.passed() {
            failed += 1;
        }
    }
    Ok(Outcome {
        cases: sols.len(),
        worst,
        detail: format!("{failed} of {} solutions failed; min overlap {overlap:.9}", sols.len()),
        verdicts_ok: failed == 0,
    })
}

fn rwa_sectors() -> CliResult<Outcome> {
    let basis = FockBasis::with_spin(60)?;
    let (mut cases, mut worst) = (0, 0.0f64);
    for scheme in [RwaScheme::M, RwaScheme::K] {
        for index in 1..=3 {
            for eta in [0.05, 0.1, 0.5] {
                let h = rwa_hamiltonian(scheme, index, eta, basis)?;
                for n in 0..=40 {
                    let [lo, hi] = sector_eigenvalues(&h, n)?;
                    for (sign, got) in [(Branch::Minus, lo), (Branch::Plus, hi)] {
                        let q = RwaQuery {
                            scheme,
                            index,
                            n,
                            sign,
                        };
                        worst = worst.max((rwa_energy(&q, eta)? - got).abs());
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(cases, worst, "M,K in 1..=3; eta in {0.05,0.1,0.5}; n <= 40")
}

fn cat_identity() -> CliResult<Outcome> {
    let basis = FockBasis::motional(100)?;
    let mut worst = 0.0f64;
    let etas = [0.0, 0.2, 0.5, 0.8, 1.2, 1.5];
    for eta in etas {
        worst = worst.max(1.0 - cat_identity_overlap(eta, basis)?);
    }
    outcome(etas.len(), worst, "1 - overlap, cutoff 100")
}

pub fn run_suite(opts: &ValidateOptions) -> CliResult<Vec<Check>> {
    let want = |s: Suite| opts.suite == Suite::All || opts.suite == s;
    let mut out = Vec::new();
    if want(Suite::EnergyIdentity) {
        out.push(check("energy_identity", 1e-12, || energy_identity(opts.grid))?);
    }
    if want(Suite::BranchSets) {
        out.push(check("branch_set_equality", 1e-12, branch_set_equality)?);
    }
    if want(Suite::Constraint) {
        out.push(check("constraint_consistency", 1e-9, constraint_consistency)?);
    }
    if want(Suite::OracleMembership) {
        out.push(check("oracle_membership", 1e-6, || {
            oracle_membership(opts.cutoff, opts.perturb_energy)
        })?);
    }
    if want(Suite::Rwa) {
        out.push(check("rwa_sectors", 1e-10, rwa_sectors)?);
    }
    if want(Suite::Cat) {
        out.push(check("cat_identity", 1e-9, cat_identity)?);
    }
    Ok(out)
}

pub fn report_json(opts: &ValidateOptions, checks: &[Check]) -> Value {
    json!({
        "suite": format!("{:?}", opts.suite).to_lowercase(),
        "cutoff": opts.cutoff,
        "grid": opts.grid.to_string(),
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "cases": c.cases,
            "worst": if c.worst.is_finite() { json!(c.worst) } else { json!(null) },
            "tolerance": c.tolerance,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

/// `Err` with exit code 1 naming every failed check.
pub fn verdict(checks: &[Check]) -> CliResult<()> {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::validation(format!("failed checks: {}", failed.join(", "))))
    }
}
