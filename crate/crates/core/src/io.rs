//! JSON state format shared by the library and the command line tool.
//!
//! `{"kind":"fermion20","amplitudes":[{"index":[1,3,5],"re":0.5,"im":0.0},...]}` with 1-based
//! mode indices in any order (a permuted triple carries its sign), `"qubit8"` with bit indices
//! `[i,j,k]`, and `{"kind":"w6","a":..,"b":..,"c":..,"d":..,"x":..,"y":..}`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{sov_isometry, ThreeFermionState, ThreeQubitState, W6Point, TRIPLES};
use crate::scalar::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub index: [usize; 3],
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum StateJson {
    #[serde(rename = "fermion20")]
    Fermion20 { amplitudes: Vec<Amplitude> },
    #[serde(rename = "qubit8")]
    Qubit8 { amplitudes: Vec<Amplitude> },
    #[serde(rename = "w6")]
    W6 {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        x: f64,
        y: f64,
    },
}

/// A parsed state in its native representation.
#[derive(Clone, Debug, PartialEq)]
pub enum StateInput {
    Fermion(ThreeFermionState),
    Qubit(ThreeQubitState),
    W6(W6Point),
}

impl StateInput {
    /// The fermionic state; qubit states go through the SOV isometry.
    pub fn fermion(&self) -> ThreeFermionState {
        match self {
            StateInput::Fermion(s) => s.clone(),
            StateInput::Qubit(q) => sov_isometry(q),
            StateInput::W6(p) => p.to_state(),
        }
    }

    /// The qubit state, if the input is one or is a five-term point.
    pub fn qubit(&self) -> Option<ThreeQubitState> {
        match self {
            StateInput::Fermion(_) => None,
            StateInput::Qubit(q) => Some(q.clone()),
            StateInput::W6(p) => Some(p.to_qubit()),
        }
    }
}

fn parse_err(detail: impl Into<String>) -> Error {
    Error::Parse {
        detail: detail.into(),
    }
}

fn check_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(parse_err("non-finite amplitude"))
    }
}

impl StateJson {
    pub fn from_fermion(psi: &ThreeFermionState) -> Self {
        let amplitudes = TRIPLES
            .iter()
            .zip(psi.amplitudes())
            .map(|(t, z)| Amplitude {
                index: t.map(|i| i + 1),
                re: z.re,
                im: z.im,
            })
            .collect();
        StateJson::Fermion20 { amplitudes }
    }

    pub fn from_qubit(phi: &ThreeQubitState) -> Self {
        let amplitudes = phi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, z)| Amplitude {
                index: [n >> 2, (n >> 1) & 1, n & 1],
                re: z.re,
                im: z.im,
            })
            .collect();
        StateJson::Qubit8 { amplitudes }
    }

    pub fn from_w6(p: &W6Point) -> Self {
        StateJson::W6 {
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
            x: p.x,
            y: p.y,
        }
    }

    pub fn to_input(&self) -> Result<StateInput> {
        match self {
            StateJson::Fermion20 { amplitudes } => {
                let mut psi = ThreeFermionState::zero();
                let mut seen = HashSet::new();
                for a in amplitudes {
                    let [i, j, k] = a.index;
                    if [i, j, k].iter().any(|&v| !(1..=6).contains(&v)) {
                        return Err(parse_err(format!(
                            "mode index out of 1..6 in {:?}",
                            a.index
                        )));
                    }
                    if i == j || j == k || i == k {
                        return Err(parse_err(format!("repeated mode in {:?}", a.index)));
                    }
                    let mut key = a.index;
                    key.sort_unstable();
                    if !seen.insert(key) {
                        return Err(parse_err(format!("duplicate amplitude for {:?}", key)));
                    }
                    check_finite(&[a.re, a.im])?;
                    psi.set(i, j, k, C64::new(a.re, a.im));
                }
                Ok(StateInput::Fermion(psi))
            }
            StateJson::Qubit8 { amplitudes } => {
                let mut phi = ThreeQubitState::zero();
                let mut seen = HashSet::new();
                for a in amplitudes {
                    if a.index.iter().any(|&b| b > 1) {
                        return Err(parse_err(format!(
                            "qubit index must be 0 or 1 in {:?}",
                            a.index
                        )));
                    }
                    if !seen.insert(a.index) {
                        return Err(parse_err(format!("duplicate amplitude for {:?}", a.index)));
                    }
                    check_finite(&[a.re, a.im])?;
                    let [i, j, k] = a.index;
                    phi.set(i, j, k, C64::new(a.re, a.im));
                }
                Ok(StateInput::Qubit(phi))
            }
            StateJson::W6 { a, b, c, d, x, y } => {
                check_finite(&[*a, *b, *c, *d, *x, *y])?;
                Ok(StateInput::W6(W6Point::new(*a, *b, *c, *d, *x, *y)))
            }
        }
    }
}

pub fn parse_state(text: &str) -> Result<StateInput> {
    let js: StateJson = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    js.to_input()
}

pub fn write_state(js: &StateJson) -> String {
    serde_json::to_string_pretty(js).expect("state serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_state;

    #[test]
    fn fermion_round_trip() {
        let psi = random_state(2);
        let back = parse_state(&write_state(&StateJson::from_fermion(&psi)))
            .unwrap()
            .fermion();
        assert_eq!(back, psi);
    }

    #[test]
    fn permuted_index_carries_sign() {
        let text = r#"{"kind":"fermion20","amplitudes":[{"index":[2,1,3],"re":1.0,"im":0.0}]}"#;
        let psi = parse_state(text).unwrap().fermion();
        assert_eq!(psi.get(1, 2, 3), C64::new(-1.0, 0.0));
    }

    #[test]
    fn rejects_bad_indices() {
        for text in [
            r#"{"kind":"fermion20","amplitudes":[{"index":[1,1,3],"re":1.0,"im":0.0}]}"#,
            r#"{"kind":"fermion20","amplitudes":[{"index":[0,1,3],"re":1.0,"im":0.0}]}"#,
            r#"{"kind":"qubit8","amplitudes":[{"index":[0,2,1],"re":1.0,"im":0.0}]}"#,
            r#"{"kind":"qutrit","amplitudes":[]}"#,
        ] {
            assert_eq!(parse_state(text).unwrap_err().name(), "Parse");
        }
    }

    #[test]
    fn w6_and_qubit_agree() {
        let p = W6Point::new(0.1, 0.2, 0.3, 0.8, 0.4, -0.2);
        let a = parse_state(&write_state(&StateJson::from_w6(&p))).unwrap();
        let b = parse_state(&write_state(&StateJson::from_qubit(&p.to_qubit()))).unwrap();
        assert_eq!(a.fermion(), b.fermion());
    }
}
