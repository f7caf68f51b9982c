//! Brute-force grid oracle for the Gaussian capacity.
//!
//! Independent check on the analytic solver: maximizes the Holevo quantity
//! `g(M_out_mod) - g(M_out)` directly over all diagonal Gaussian encodings
//! `(omega_in, mod_q, mod_p)` that respect the energy budget
//!
//! ```text
//! 1/(2 omega_in) + omega_in/2 + mod_q + mod_p = 2 n_bar + 1 .
//! ```
//!
//! The search runs over `(omega_in, f)` with `mod_q = f R`,
//! `mod_p = (1-f) R`, `R = 2 n_bar + 1 - omega_in/2 - 1/(2 omega_in)`,
//! which satisfies the budget identically; cells with `R < 0` are outside
//! the feasible set and skipped. One local refinement pass (x10 window
//! shrink around the incumbent, same resolution) sharpens the result
//! without turning the oracle into a second root-finder.
//!
//! Grid cells are embarrassingly parallel; with the `parallel` feature the
//! scan fans out over rayon, and `*_serial` twins are always available.
//! Ties are broken toward the smallest `omega_in`, then the smallest `f`,
//! making the result deterministic regardless of evaluation order.

use crate::channel::FiducialChannel;
use crate::entropy::g;
use crate::error::{ensure_finite, Error, Result};
use crate::state::EnergyBudget;

/// One diagonal Gaussian encoding: a pure input of frequency `omega_in`
/// with classical displacement modulation of variance `mod_q`/`mod_p` per
/// quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EncodingPoint {
    omega_in: f64,
    mod_q: f64,
    mod_p: f64,
}

impl EncodingPoint {
    /// Creates an encoding point; all fields must be finite, `omega_in`
    /// positive and the modulation variances nonnegative.
    pub fn new(omega_in: f64, mod_q: f64, mod_p: f64) -> Result<Self> {
        ensure_finite("omega_in", omega_in)?;
        ensure_finite("mod_q", mod_q)?;
        ensure_finite("mod_p", mod_p)?;
        if omega_in <= 0.0 {
            return Err(Error::Domain {
                what: "omega_in",
                value: omega_in,
            });
        }
        if mod_q < 0.0 {
            return Err(Error::Domain {
                what: "mod_q",
                value: mod_q,
            });
        }
        if mod_p < 0.0 {
            return Err(Error::Domain {
                what: "mod_p",
                value: mod_p,
            });
        }
        Ok(EncodingPoint {
            omega_in,
            mod_q,
            mod_p,
        })
    }

    /// Pure-input frequency.
    pub fn omega_in(&self) -> f64 {
        self.omega_in
    }

    /// Classical modulation variance added to the q-quadrature.
    pub fn mod_q(&self) -> f64 {
        self.mod_q
    }

    /// Classical modulation variance added to the p-quadrature.
    pub fn mod_p(&self) -> f64 {
        self.mod_p
    }

    /// Mean photon number this encoding consumes:
    /// `(1/(2 omega_in) + omega_in/2 + mod_q + mod_p - 1) / 2`.
    pub fn implied_n_bar(&self) -> f64 {
        (1.0 / (2.0 * self.omega_in) + self.omega_in / 2.0 + self.mod_q + self.mod_p - 1.0) / 2.0
    }
}

/// Holevo quantity of one encoding through one channel:
/// `g(sqrt(det V_out_mod) - 1/2) - g(sqrt(det V_out) - 1/2)` with
/// `V_out = |tau| diag(1/(2 omega_in), omega_in/2) + Y` and
/// `V_out_mod = V_out + |tau| diag(mod_q, mod_p)`.
pub fn chi_g(ch: &FiducialChannel, pt: &EncodingPoint) -> f64 {
    let t = ch.tau().abs();
    let (yq, yp) = (ch.y() / ch.omega_env(), ch.y() * ch.omega_env());
    let q = t / (2.0 * pt.omega_in) + yq;
    let p = t * pt.omega_in / 2.0 + yp;
    let m_out = ((q * p).sqrt() - 0.5).max(0.0);
    let q_bar = q + t * pt.mod_q;
    let p_bar = p + t * pt.mod_p;
    let m_bar_out = ((q_bar * p_bar).sqrt() - 0.5).max(0.0);
    g(m_bar_out) - g(m_out)
}

/// Best cell found so far; total order on `(chi, -omega_in, -f)` so the
/// reduction commutes.
#[derive(Clone, Copy)]
struct Candidate {
    chi: f64,
    omega_in: f64,
    f: f64,
    r: f64,
}

impl Candidate {
    fn better(self, other: Candidate) -> Candidate {
        if self.chi > other.chi
            || (self.chi == other.chi
                && (self.omega_in < other.omega_in
                    || (self.omega_in == other.omega_in && self.f < other.f)))
        {
            self
        } else {
            other
        }
    }
}

/// Search window in `(ln omega_in, f)` space.
struct Window {
    w_lo: f64,
    w_hi: f64,
    f_lo: f64,
    f_hi: f64,
}

/// Best candidate within one omega column; the per-column output entropy
/// `g(m_out)` is hoisted out of the `f` loop.
fn column_best(
    ch: &FiducialChannel,
    n_bar: f64,
    win: &Window,
    res: usize,
    i: usize,
) -> Option<Candidate> {
    let omega = if res == 1 {
        win.w_lo
    } else {
        win.w_lo * (win.w_hi / win.w_lo).powf(i as f64 / (res - 1) as f64)
    };
    let r = 2.0 * n_bar + 1.0 - omega / 2.0 - 1.0 / (2.0 * omega);
    if r < 0.0 {
        return None;
    }
    let t = ch.tau().abs();
    let (yq, yp) = (ch.y() / ch.omega_env(), ch.y() * ch.omega_env());
    let q = t / (2.0 * omega) + yq;
    let p = t * omega / 2.0 + yp;
    let g_out = g(((q * p).sqrt() - 0.5).max(0.0));
    let mut best: Option<Candidate> = None;
    for j in 0..res {
        let f = if res == 1 {
            win.f_lo
        } else {
            win.f_lo + (win.f_hi - win.f_lo) * j as f64 / (res - 1) as f64
        };
        let q_bar = q + t * f * r;
        let p_bar = p + t * (1.0 - f) * r;
        let chi = g(((q_bar * p_bar).sqrt() - 0.5).max(0.0)) - g_out;
        let cand = Candidate {
            chi,
            omega_in: omega,
            f,
            r,
        };
        best = Some(match best {
            Some(b) => cand.better(b),
            None => cand,
        });
    }
    best
}

fn scan_serial(ch: &FiducialChannel, n_bar: f64, win: &Window, res: usize) -> Option<Candidate> {
    (0..res)
        .filter_map(|i| column_best(ch, n_bar, win, res, i))
        .reduce(Candidate::better)
}

#[cfg(feature = "parallel")]
fn scan_parallel(ch: &FiducialChannel, n_bar: f64, win: &Window, res: usize) -> Option<Candidate> {
    use rayon::prelude::*;
    (0..res)
        .into_par_iter()
        .filter_map(|i| column_best(ch, n_bar, win, res, i))
        .reduce_with(Candidate::better)
}

fn search(ch: &FiducialChannel, n: &EnergyBudget, res: usize, parallel: bool) -> GridSolution {
    assert!(res >= 50, "grid oracle needs resolution >= 50, got {res}");
    let n_bar = n.n_bar();
    let lb = 1.0 / (2.0 * (2.0 * n_bar + 1.0)) + 1e-12;
    let full = Window {
        w_lo: lb.max(1e-3),
        w_hi: (1.0 / lb).min(1e3),
        f_lo: 0.0,
        f_hi: 1.0,
    };
    let run = |win: &Window| -> Option<Candidate> {
        #[cfg(feature = "parallel")]
        if parallel {
            return scan_parallel(ch, n_bar, win, res);
        }
        let _ = parallel;
        scan_serial(ch, n_bar, win, res)
    };
    let coarse = run(&full);
    let best = match coarse {
        // Entire grid infeasible (possible only for n_bar = 0 when no grid
        // point lands exactly on omega_in = 1): zero modulation, zero chi.
        None => {
            return GridSolution {
                capacity_bits: 0.0,
                point: EncodingPoint {
                    omega_in: 1.0,
                    mod_q: 0.0,
                    mod_p: 0.0,
                },
            }
        }
        Some(c) => {
            // Refinement: shrink the window x10 around the incumbent,
            // clamped to the original bounds, same resolution.
            let half_ln = (full.w_hi / full.w_lo).ln() / 20.0;
            let refined = Window {
                w_lo: (c.omega_in * (-half_ln).exp()).max(full.w_lo),
                w_hi: (c.omega_in * half_ln.exp()).min(full.w_hi),
                f_lo: (c.f - 0.05).max(0.0),
                f_hi: (c.f + 0.05).min(1.0),
            };
            match run(&refined) {
                Some(r) => r.better(c),
                None => c,
            }
        }
    };
    GridSolution {
        capacity_bits: best.chi.max(0.0),
        point: EncodingPoint {
            omega_in: best.omega_in,
            mod_q: best.f * best.r,
            mod_p: (1.0 - best.f) * best.r,
        },
    }
}

/// The oracle's verdict: the best Holevo quantity found and the encoding
/// that achieved it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridSolution {
    pub capacity_bits: f64,
    pub point: EncodingPoint,
}

/// Brute-force capacity estimate on a `resolution x resolution` grid
/// (see the module docs). Deterministic for fixed resolution. Runs over
/// rayon when the `parallel` feature is on.
///
/// # Panics
///
/// Panics if `resolution < 50`.
pub fn grid_capacity(ch: &FiducialChannel, n: &EnergyBudget, resolution: usize) -> f64 {
    search(ch, n, resolution, true).capacity_bits
}

/// Sequential twin of [`grid_capacity`]; bit-identical results.
pub fn grid_capacity_serial(ch: &FiducialChannel, n: &EnergyBudget, resolution: usize) -> f64 {
    search(ch, n, resolution, false).capacity_bits
}

/// Like [`grid_capacity`] but also reports the maximizing encoding.
pub fn grid_argmax(ch: &FiducialChannel, n: &EnergyBudget, resolution: usize) -> GridSolution {
    search(ch, n, resolution, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn budget(n: f64) -> EnergyBudget {
        EnergyBudget::new(n).unwrap()
    }

    #[test]
    fn zero_modulation_scores_zero() {
        let ch = FiducialChannel::from_y(0.7, 0.4, 0.6).unwrap();
        let pt = EncodingPoint::new(0.8, 0.0, 0.0).unwrap();
        assert_eq!(chi_g(&ch, &pt), 0.0);
    }

    #[test]
    fn symmetric_split_beats_asymmetric_on_symmetric_channel() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 1.0).unwrap();
        let even = chi_g(&ch, &EncodingPoint::new(1.0, 1.0, 1.0).unwrap());
        let skew = chi_g(&ch, &EncodingPoint::new(1.0, 2.0, 0.0).unwrap());
        // even split is the water-filling optimum: g(1.1) - g(0.1)
        assert_relative_eq!(even, 1.61311702683334264, max_relative = 1e-12);
        assert!(skew < even);
    }

    #[test]
    fn encoding_point_energy_accounting() {
        let pt = EncodingPoint::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(pt.implied_n_bar(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn grid_finds_perfect_channel_capacity() {
        let ch = FiducialChannel::from_m_env(1.0, 0.0, 1.0).unwrap();
        let c = grid_capacity_serial(&ch, &budget(1.0), 200);
        assert!((c - 2.0).abs() < 1e-4, "got {c}");
    }

    #[test]
    fn grid_matches_closed_form_above_threshold() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 1.0).unwrap();
        let c = grid_capacity_serial(&ch, &budget(1.0), 300);
        assert!((c - 1.61311702683334264).abs() < 1e-4, "got {c}");
    }

    #[test]
    fn grid_matches_transcendental_below_threshold() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 0.2).unwrap();
        let c = grid_capacity_serial(&ch, &budget(1.0), 300);
        assert!((c - 1.7039805714052301).abs() < 1e-3, "got {c}");
    }

    #[test]
    fn parallel_and_serial_agree_exactly() {
        let ch = FiducialChannel::from_y(0.8, 0.35, 0.45).unwrap();
        let n = budget(1.3);
        assert_eq!(
            grid_capacity(&ch, &n, 120).to_bits(),
            grid_capacity_serial(&ch, &n, 120).to_bits()
        );
    }

    #[test]
    fn resolution_is_monotone_on_sampled_channels() {
        let ch = FiducialChannel::from_y(0.6, 0.3, 0.7).unwrap();
        let n = budget(0.9);
        let c1 = grid_capacity_serial(&ch, &n, 60);
        let c2 = grid_capacity_serial(&ch, &n, 120);
        let c3 = grid_capacity_serial(&ch, &n, 240);
        assert!(c2 >= c1 - 1e-12 && c3 >= c2 - 1e-12, "{c1} {c2} {c3}");
    }

    #[test]
    fn maximizer_drops_q_modulation_below_threshold() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 0.2).unwrap();
        let sol = grid_argmax(&ch, &budget(1.0), 400);
        // Energy share in mod_q relative to the budget
        assert!(
            sol.point.mod_q() < 0.02 * (2.0 * 1.0 + 1.0),
            "mod_q = {}",
            sol.point.mod_q()
        );
    }

    #[test]
    fn zero_budget_has_zero_capacity() {
        let ch = FiducialChannel::from_y(1.0, 0.1, 0.5).unwrap();
        assert_eq!(grid_capacity_serial(&ch, &budget(0.0), 100), 0.0);
    }

    #[test]
    fn rejects_invalid_encoding_points() {
        assert!(EncodingPoint::new(0.0, 1.0, 1.0).is_err());
        assert!(EncodingPoint::new(1.0, -0.1, 1.0).is_err());
        assert!(EncodingPoint::new(1.0, 0.1, f64::NAN).is_err());
    }
}
