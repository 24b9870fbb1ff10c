//! Initial-state descriptors:
//!
//! ```text
//! fock(n, m, s)                 s ∈ {+, -, up, down}
//! coherent(α, β, c+, c-)        complex literals such as 1, i, 0.5-0.2i
//! spin(θ, φ)                    cos θ |0 0 +⟩ + e^{iφ} sin θ |0 0 −⟩; θ, φ may use pi
//! ```
//!
//! `spin_superposition(θ, φ)` is accepted as a long form of `spin`.

use std::f64::consts::PI;

use gauge_sim::dynamics::spin_superposition;
use gauge_sim::hilbert::{coherent_state, fock_state, BasisSpec, Spin, StateVector};
use gauge_sim::C64;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum StateDescriptor {
    Fock { n: usize, m: usize, spin: Spin },
    Coherent { alpha: C64, beta: C64, up: C64, down: C64 },
    Spin { theta: f64, phase: f64 },
}

/// A prepared state and the weight the truncation discarded (zero unless coherent).
pub struct Prepared {
    pub state: StateVector,
    pub discarded_weight: f64,
}

impl StateDescriptor {
    pub fn parse(text: &str) -> CliResult<Self> {
        let bad = |why: &str| CliError::malformed(format!("state '{text}': {why}"));
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| bad("expected name(args)"))?;
        let args = t[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| bad("missing closing parenthesis"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let want = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(bad(&format!("expected {k} arguments, got {}", args.len())))
            }
        };
        match t[..open].trim().to_ascii_lowercase().as_str() {
            "fock" => {
                want(3)?;
                let level = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("'{s}' is not a level")));
                Ok(StateDescriptor::Fock {
                    n: level(args[0])?,
                    m: level(args[1])?,
                    spin: parse_spin(args[2]).ok_or_else(|| bad("spin must be +, -, up or down"))?,
                })
            }
            "coherent" => {
                want(4)?;
                let c = |s: &str| parse_complex(s).ok_or_else(|| bad(&format!("'{s}' is not a complex number")));
                Ok(StateDescriptor::Coherent {
                    alpha: c(args[0])?,
                    beta: c(args[1])?,
                    up: c(args[2])?,
                    down: c(args[3])?,
                })
            }
            "spin" | "spin_superposition" => {
                want(2)?;
                let a = |s: &str| parse_angle(s).ok_or_else(|| bad(&format!("'{s}' is not an angle")));
                Ok(StateDescriptor::Spin {
                    theta: a(args[0])?,
                    phase: a(args[1])?,
                })
            }
            other => Err(bad(&format!("unknown state kind '{other}'"))),
        }
    }

    pub fn prepare(&self, basis: BasisSpec) -> CliResult<Prepared> {
        Ok(match *self {
            StateDescriptor::Fock { n, m, spin } => Prepared {
                state: fock_state(basis, n, m, spin)?,
                discarded_weight: 0.0,
            },
            StateDescriptor::Coherent { alpha, beta, up, down } => {
                let cs = coherent_state(basis, alpha, beta, (up, down))?;
                Prepared {
                    state: cs.state,
                    discarded_weight: cs.discarded_weight,
                }
            }
            StateDescriptor::Spin { theta, phase } => Prepared {
                state: spin_superposition(basis, theta, phase)?,
                discarded_weight: 0.0,
            },
        })
    }
}

fn parse_spin(s: &str) -> Option<Spin> {
    match s.to_ascii_lowercase().as_str() {
        "+" | "up" | "+1" => Some(Spin::Up),
        "-" | "down" | "-1" => Some(Spin::Down),
        _ => None,
    }
}

fn parse_complex(s: &str) -> Option<C64> {
    let z: C64 = s.replace(' ', "").parse().ok()?;
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// A real number or a multiple of pi: `0.3`, `pi`, `-pi/2`, `3pi/8`, `3*pi/8`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.replace(' ', "").to_ascii_lowercase();
    let v = match s.find("pi") {
        None => s.parse::<f64>().ok()?,
        Some(at) => {
            let coeff = match s[..at].trim_end_matches('*') {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().ok()?,
            };
            let div = match &s[at + 2..] {
                "" => 1.0,
                rest => rest.strip_prefix('/')?.parse::<f64>().ok()?,
            };
            coeff * PI / div
        }
    };
    v.is_finite().then_some(v)
}
