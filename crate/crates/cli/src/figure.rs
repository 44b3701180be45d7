//! Energy-versus-η curve families: rotating-wave branches against the
//! order-one identity curve and the order-two roots, plus their crossings.

use iontrap_core::model::build_h_transformed;
use iontrap_core::oracle::{hermitian_eigensystem, nearest_eigenpair};
use iontrap_core::rwa::{nearest_resonance, resonant_rabi, rwa_energy, RwaQuery, RwaScheme};
use iontrap_core::series::{case1_implied_eps, case2_energies, energy_identity_case1};
use iontrap_core::{Branch, FockBasis, ModelParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Fock labels of the plotted rotating-wave doublets.
pub const RWA_LEVELS: std::ops::RangeInclusive<usize> = 0..=6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Source {
    #[serde(rename = "rwa_eq10")]
    RwaFractional,
    #[serde(rename = "rwa_eq12")]
    RwaInteger,
    #[serde(rename = "eq13")]
    OrderOne,
    #[serde(rename = "appendix_a3")]
    OrderTwoPlus,
    #[serde(rename = "appendix_a4")]
    OrderTwoMinus,
    #[serde(rename = "oracle")]
    Oracle,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::RwaFractional => "rwa_eq10",
            Source::RwaInteger => "rwa_eq12",
            Source::OrderOne => "eq13",
            Source::OrderTwoPlus => "appendix_a3",
            Source::OrderTwoMinus => "appendix_a4",
            Source::Oracle => "oracle",
        }
    }
}

/// One output row. `n` is the Fock label for rotating-wave rows and the
/// series order for the others; `branch` is `±` for rotating-wave rows and
/// `±` followed by the root index (0 for `+√`, 1 for `−√`) for order-two
/// rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub eta: f64,
    pub energy: f64,
    pub source: Source,
    pub branch: String,
    pub n: usize,
}

/// A single curve as a function of η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Rwa {
        scheme: RwaScheme,
        index: u32,
        n: usize,
        sign: Branch,
    },
    /// `E = 1/2 + η²/2 + Ω²/8`.
    Identity { rabi: f64 },
    /// Order-two root from one branch's quadratic.
    OrderTwo { rabi: f64, branch: Branch, root: usize },
}

impl Curve {
    pub fn energy(&self, eta: f64) -> Option<f64> {
        let e = match *self {
            Curve::Rwa {
                scheme,
                index,
                n,
                sign,
            } => rwa_energy(
                &RwaQuery {
                    scheme,
                    index,
                    n,
                    sign,
                },
                eta,
            )
            .ok()?,
            Curve::Identity { rabi } => energy_identity_case1(rabi, eta),
            Curve::OrderTwo { rabi, branch, root } => {
                let e = case2_energies(rabi, eta);
                let list = match branch {
                    Branch::Plus => e.plus,
                    Branch::Minus => e.minus,
                };
                *list.get(root)?
            }
        };
        e.is_finite().then_some(e)
    }

    pub fn source(&self) -> Source {
        match *self {
            Curve::Rwa {
                scheme: RwaScheme::M,
                ..
            } => Source::RwaFractional,
            Curve::Rwa {
                scheme: RwaScheme::K,
                ..
            } => Source::RwaInteger,
            Curve::Identity { .. } => Source::OrderOne,
            Curve::OrderTwo {
                branch: Branch::Plus,
                ..
            } => Source::OrderTwoPlus,
            Curve::OrderTwo {
                branch: Branch::Minus,
                ..
            } => Source::OrderTwoMinus,
        }
    }

    pub fn branch_label(&self) -> String {
        match *self {
            Curve::Rwa { sign, .. } => sign.symbol().to_string(),
            Curve::Identity { .. } => "+".to_string(),
            Curve::OrderTwo { branch, root, .. } => format!("{}{root}", branch.symbol()),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Curve::Rwa { n, .. } => n,
            Curve::Identity { .. } => 1,
            Curve::OrderTwo { .. } => 2,
        }
    }

    /// `(Ω, ε)` at which the transformed Hamiltonian should have this
    /// energy as an eigenvalue; `None` for rotating-wave curves.
    fn series_point(&self, eta: f64) -> Option<(f64, f64)> {
        match *self {
            Curve::Rwa { .. } => None,
            Curve::Identity { rabi } => Some((rabi, case1_implied_eps(rabi, eta, Branch::Plus))),
            Curve::OrderTwo { rabi, branch, .. } => {
                let e = self.energy(eta)?;
                Some((rabi, branch.sign() * (e - 2.0)))
            }
        }
    }

    fn label(&self) -> String {
        format!("{}[{}]{}", self.source().as_str(), self.branch_label(), self.n())
    }
}

#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub rabi: f64,
    pub etas: Vec<f64>,
    pub branches: Vec<Branch>,
    /// Adds nearest-eigenvalue rows for every non-rotating-wave point.
    pub oracle_cutoff: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub scheme: RwaScheme,
    pub index: u32,
    /// True when Ω sits exactly on the chosen resonance.
    pub resonant: bool,
    pub rwa: Vec<Curve>,
    pub series: Vec<Curve>,
}

impl Figure {
    pub fn new(spec: &FigureSpec) -> CliResult<Self> {
        if !(spec.rabi > 0.0) || !spec.rabi.is_finite() {
            return Err(CliError::usage(format!("omega must be finite and > 0, got {}", spec.rabi)));
        }
        let (scheme, index) = nearest_resonance(spec.rabi)?;
        let resonant = resonant_rabi(scheme, index)? == spec.rabi;
        let mut rwa = Vec::new();
        for n in RWA_LEVELS {
            for &sign in &[Branch::Plus, Branch::Minus] {
                if spec.branches.contains(&sign) {
                    rwa.push(Curve::Rwa {
                        scheme,
                        index,
                        n,
                        sign,
                    });
                }
            }
        }
        let mut series = vec![Curve::Identity { rabi: spec.rabi }];
        for &branch in &Branch::BOTH {
            if spec.branches.contains(&branch) {
                for root in 0..2 {
                    series.push(Curve::OrderTwo {
                        rabi: spec.rabi,
                        branch,
                        root,
                    });
                }
            }
        }
        Ok(Self {
            scheme,
            index,
            resonant,
            rwa,
            series,
        })
    }
}

/// Rows in η order; within one η, rotating-wave rows by (n, sign), then the
/// identity curve, the order-two roots and finally any oracle rows. Points
/// where a curve does not exist produce no row.
pub fn figure_points(spec: &FigureSpec) -> CliResult<Vec<CurvePoint>> {
    let fig = Figure::new(spec)?;
    let mut rows = Vec::new();
    for &eta in &spec.etas {
        for curve in fig.rwa.iter().chain(&fig.series) {
            if let Some(energy) = curve.energy(eta) {
                rows.push(CurvePoint {
                    eta,
                    energy,
                    source: curve.source(),
                    branch: curve.branch_label(),
                    n: curve.n(),
                });
            }
        }
        if let Some(cutoff) = spec.oracle_cutoff {
            let basis = FockBasis::with_spin(cutoff)?;
            for curve in &fig.series {
                let (Some(target), Some((rabi, eps))) = (curve.energy(eta), curve.series_point(eta))
                else {
                    continue;
                };
                let p = ModelParams::from_eps(rabi, eta, eps)?;
                let spectrum = hermitian_eigensystem(&build_h_transformed(&p, basis)?, false)?;
                let pair = nearest_eigenpair(&spectrum, target)?;
                rows.push(CurvePoint {
                    eta,
                    energy: pair.value,
                    source: Source::Oracle,
                    branch: curve.branch_label(),
                    n: curve.n(),
                });
            }
        }
    }
    Ok(rows)
}

/// Where a rotating-wave branch meets a non-rotating-wave curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub eta: f64,
    pub energy: f64,
    pub rwa_branch: String,
    pub rwa_n: usize,
    pub curve: String,
}

pub const CROSSING_TOL: f64 = 1e-8;

/// Sign changes of `E_rwa − E_series` between neighbouring grid points,
/// refined by bisection until the bracket is narrower than 1e−8 in η.
/// Order-two curves from the second branch duplicate the first branch's
/// energies, so only one branch's roots are scanned.
pub fn crossings(spec: &FigureSpec) -> CliResult<Vec<Crossing>> {
    let fig = Figure::new(spec)?;
    let mut targets: Vec<Curve> = Vec::new();
    let mut seen_two = None;
    for c in &fig.series {
        match *c {
            Curve::OrderTwo { branch, .. } => {
                if *seen_two.get_or_insert(branch) == branch {
                    targets.push(*c);
                }
            }
            _ => targets.push(*c),
        }
    }

    let mut out = Vec::new();
    for rwa in &fig.rwa {
        for other in &targets {
            let diff = |eta: f64| Some(rwa.energy(eta)? - other.energy(eta)?);
            for w in spec.etas.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (Some(mut fa), Some(fb)) = (diff(a), diff(b)) else {
                    continue;
                };
                if fa == 0.0 {
                    out.push(crossing(rwa, other, a));
                    continue;
                }
                if fa * fb > 0.0 || fb == 0.0 {
                    continue;
                }
                while b - a > CROSSING_TOL {
                    let mid = 0.5 * (a + b);
                    let Some(fm) = diff(mid) else { break };
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if (fm < 0.0) == (fa < 0.0) {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                out.push(crossing(rwa, other, 0.5 * (a + b)));
            }
            // A zero exactly on the last grid point has no right neighbour.
            if let Some(&last) = spec.etas.last() {
                if diff(last) == Some(0.0) {
                    out.push(crossing(rwa, other, last));
                }
            }
        }
    }
    out.sort_by(|x, y| {
        x.eta
            .total_cmp(&y.eta)
            .then_with(|| x.rwa_n.cmp(&y.rwa_n))
            .then_with(|| x.rwa_branch.cmp(&y.rwa_branch))
            .then_with(|| x.curve.cmp(&y.curve))
    });
    Ok(out)
}

fn crossing(rwa: &Curve, other: &Curve, eta: f64) -> Crossing {
    Crossing {
        eta,
        energy: rwa.energy(eta).unwrap_or(f64::NAN),
        rwa_branch: rwa.branch_label(),
        rwa_n: rwa.n(),
        curve: other.label(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(rabi: f64) -> FigureSpec {
        FigureSpec {
            rabi,
            etas: (0..=100).map(|i| i as f64 * 0.01).collect(),
            branches: Branch::BOTH.to_vec(),
            oracle_cutoff: None,
        }
    }

    #[test]
    fn fig2_family() {
        let rows = figure_points(&spec(0.5)).unwrap();
        // 14 rotating-wave + 1 identity + 4 order-two rows per η.
        assert_eq!(rows.len(), 101 * 19);
        assert!(rows.iter().all(|r| r.energy.is_finite()));
        assert_eq!(rows.iter().filter(|r| r.source == Source::RwaFractional).count(), 101 * 14);
    }

    #[test]
    fn fig3_uses_integer_family() {
        let fig = Figure::new(&spec(3.0)).unwrap();
        assert_eq!((fig.scheme, fig.index, fig.resonant), (RwaScheme::K, 3, true));
        let rows = figure_points(&spec(3.0)).unwrap();
        assert!(rows.iter().any(|r| r.source == Source::RwaInteger));
        assert!(!rows.iter().any(|r| r.source == Source::RwaFractional));
    }

    #[test]
    fn branch_filter() {
        let mut s = spec(0.5);
        s.branches = vec![Branch::Minus];
        let rows = figure_points(&s).unwrap();
        assert_eq!(rows.len(), 101 * (7 + 1 + 2));
        assert!(!rows.iter().any(|r| r.source == Source::OrderTwoPlus));
    }

    #[test]
    fn fig3_has_crossings() {
        let c = crossings(&spec(3.0)).unwrap();
        assert!(!c.is_empty());
        for x in &c {
            assert!(x.eta >= 0.0 && x.eta <= 1.0);
        }
    }

    #[test]
    fn crossing_is_a_root() {
        for x in crossings(&spec(3.0)).unwrap() {
            let rwa = Curve::Rwa {
                scheme: RwaScheme::K,
                index: 3,
                n: x.rwa_n,
                sign: x.rwa_branch.parse().unwrap(),
            };
            assert!((rwa.energy(x.eta).unwrap() - x.energy).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_rows_track_series() {
        let s = FigureSpec {
            rabi: 0.5,
            etas: vec![0.1, 0.2],
            branches: Branch::BOTH.to_vec(),
            oracle_cutoff: Some(80),
        };
        let rows = figure_points(&s).unwrap();
        let oracle: Vec<_> = rows.iter().filter(|r| r.source == Source::Oracle).collect();
        assert_eq!(oracle.len(), 2 * 5);
        for o in oracle {
            let series = rows
                .iter()
                .find(|r| {
                    r.eta == o.eta && !matches!(r.source, Source::Oracle | Source::RwaFractional | Source::RwaInteger) && r.branch == o.branch && r.n == o.n
                })
                .unwrap();
            assert!((series.energy - o.energy).abs() < 1e-6, "{o:?} vs {series:?}");
        }
    }
}
