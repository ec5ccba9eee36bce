//! The finite automaton whose states `m_v` realize the affine maps
//! `u ↦ v + M u` on base-`n` digit streams, one component per matrix.
//!
//! State `m_v` reads a letter `x`, writes `Mod(v + M x)` and moves to
//! `m_{Div(v + M x)}`. Offsets `v` range over the box `V_M`, which is closed
//! under that carry map, so every component is finite.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_base, vm_set, IntMatrix, IntVector, Letter};

pub const DEFAULT_ALPHABET_CAP: u64 = 4096;
pub const DEFAULT_STATE_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Upper bound on `n^d`.
    pub alphabet_cap: u64,
    /// Upper bound on the total number of states.
    pub state_cap: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            alphabet_cap: DEFAULT_ALPHABET_CAP,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomatonState {
    matrix_index: usize,
    offset: IntVector,
    output: Vec<u32>,
    next: Vec<StateId>,
    inverse: Vec<u32>,
    aliases: Vec<(usize, IntVector)>,
}

impl AutomatonState {
    pub fn matrix_index(&self) -> usize {
        self.matrix_index
    }

    pub fn offset(&self) -> &IntVector {
        &self.offset
    }

    /// Output letter for each dense input letter.
    pub fn output(&self) -> &[u32] {
        &self.output
    }

    pub fn next(&self) -> &[StateId] {
        &self.next
    }

    /// Inverse of the output permutation.
    pub fn inverse_output(&self) -> &[u32] {
        &self.inverse
    }

    /// Other labels merged into this state by [`Automaton::dedup`].
    pub fn aliases(&self) -> &[(usize, IntVector)] {
        &self.aliases
    }

    pub fn label(&self) -> String {
        format!("m[{}]:{}", self.matrix_index, self.offset)
    }
}

/// A contiguous run of states coming from one matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub matrix: usize,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    base: u32,
    dim: usize,
    alphabet: usize,
    matrices: Vec<IntMatrix>,
    states: Vec<AutomatonState>,
    components: Vec<Component>,
    deduplicated: bool,
    lookup: HashMap<(usize, IntVector), StateId>,
}

pub fn build_single(m: &IntMatrix, n: u32, opts: &BuildOptions) -> Result<Automaton> {
    build_union(std::slice::from_ref(m), n, opts)
}

/// Disjoint union of the single-matrix automata, in the order given.
/// Repeated matrices produce repeated components.
pub fn build_union(ms: &[IntMatrix], n: u32, opts: &BuildOptions) -> Result<Automaton> {
    check_base(n)?;
    let first = ms.first().ok_or(Error::EmptyMatrixList)?;
    let d = first.dim();
    for (index, m) in ms.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        let det = m.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix { index });
        }
        let gcd = num_integer::Integer::gcd(&det, &BigInt::from(n));
        if gcd != BigInt::from(1) {
            return Err(Error::NotCoprime {
                index,
                det,
                base: n,
                gcd,
            });
        }
    }
    let alphabet = alphabet_size(n, d, opts.alphabet_cap)?;

    let mut total: u128 = 0;
    for m in ms {
        let side = (m.row_sum_norm() * 2u32).to_u128().unwrap_or(u128::MAX);
        total = total.saturating_add(side.checked_pow(d as u32).unwrap_or(u128::MAX));
    }
    if total > opts.state_cap as u128 {
        return Err(Error::Resource {
            what: "state count",
            value: total.to_string(),
            cap: opts.state_cap,
        });
    }

    let letters: Vec<Vec<i64>> = (0..alphabet)
        .map(|i| Letter::from_index(i, n, d).digits().iter().map(|&x| x as i64).collect())
        .collect();

    let mut states = Vec::with_capacity(total as usize);
    let mut components = Vec::with_capacity(ms.len());
    for (mi, m) in ms.iter().enumerate() {
        let start = states.len();
        build_component(mi, m, n, &letters, start, &mut states)?;
        components.push(Component {
            matrix: mi,
            start,
            len: states.len() - start,
        });
    }

    Automaton::assemble(n, d, ms.to_vec(), states, components, false)
}

fn alphabet_size(n: u32, d: usize, cap: u64) -> Result<usize> {
    let size = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if size > cap as u128 || size > u32::MAX as u128 {
        return Err(Error::Resource {
            what: "alphabet size n^d",
            value: size.to_string(),
            cap,
        });
    }
    Ok(size as usize)
}

fn build_component(
    mi: usize,
    m: &IntMatrix,
    n: u32,
    letters: &[Vec<i64>],
    start: usize,
    states: &mut Vec<AutomatonState>,
) -> Result<()> {
    let d = m.dim();
    let too_big = || Error::Resource {
        what: "matrix entry",
        value: m.to_string(),
        cap: i64::MAX as u64,
    };
    let entries = m.to_i64_entries().ok_or_else(too_big)?;
    let norm = m.row_sum_norm().to_i64().ok_or_else(too_big)?;
    let side = 2 * norm;
    let nn = n as i64;
    let offsets = vm_set(m)?;

    let rank = |q: &[i64]| -> Option<usize> {
        let mut r = 0i64;
        for &c in q.iter().rev() {
            if c < -norm || c >= norm {
                return None;
            }
            r = r * side + (c + norm);
        }
        Some(r as usize)
    };

    let mut w = vec![0i64; d];
    let mut q = vec![0i64; d];
    for offset in offsets {
        let v = offset.to_i64s().ok_or_else(too_big)?;
        let mut output = Vec::with_capacity(letters.len());
        let mut next = Vec::with_capacity(letters.len());
        for x in letters {
            let mut y = 0usize;
            for i in (0..d).rev() {
                let row = &entries[i * d..(i + 1) * d];
                w[i] = v[i] + row.iter().zip(x).map(|(a, b)| a * b).sum::<i64>();
                q[i] = w[i].div_euclid(nn);
                y = y * n as usize + w[i].rem_euclid(nn) as usize;
            }
            output.push(y as u32);
            let r = rank(&q).ok_or_else(|| {
                Error::InvalidAutomaton(format!("carry {q:?} from offset {offset} left the state box"))
            })?;
            next.push(StateId((start + r) as u32));
        }
        states.push(AutomatonState {
            matrix_index: mi,
            offset,
            output,
            next,
            inverse: Vec::new(),
            aliases: Vec::new(),
        });
    }
    Ok(())
}

impl Automaton {
    /// Validates the tables and fills in inverse outputs and the label index.
    fn assemble(
        base: u32,
        dim: usize,
        matrices: Vec<IntMatrix>,
        mut states: Vec<AutomatonState>,
        components: Vec<Component>,
        deduplicated: bool,
    ) -> Result<Self> {
        let alphabet = (base as usize)
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidAutomaton("alphabet overflows".into()))?;
        let count = states.len();
        if count > u32::MAX as usize {
            return Err(Error::InvalidAutomaton("too many states".into()));
        }
        let mut lookup = HashMap::with_capacity(count);
        for (id, s) in states.iter_mut().enumerate() {
            let name = s.label();
            if s.matrix_index >= matrices.len() {
                return Err(Error::InvalidAutomaton(format!("{name}: no such matrix")));
            }
            if s.offset.dim() != dim || s.aliases.iter().any(|(_, v)| v.dim() != dim) {
                return Err(Error::InvalidAutomaton(format!("{name}: offset has wrong dimension")));
            }
            if s.output.len() != alphabet || s.next.len() != alphabet {
                return Err(Error::InvalidAutomaton(format!(
                    "{name}: tables must have {alphabet} entries"
                )));
            }
            if let Some(bad) = s.next.iter().find(|t| t.index() >= count) {
                return Err(Error::InvalidAutomaton(format!(
                    "{name}: next state {} out of range",
                    bad.0
                )));
            }
            let mut inverse = vec![u32::MAX; alphabet];
            for (x, &y) in s.output.iter().enumerate() {
                let slot = inverse.get_mut(y as usize).filter(|slot| **slot == u32::MAX);
                match slot {
                    Some(slot) => *slot = x as u32,
                    None => {
                        return Err(Error::InvalidAutomaton(format!(
                            "{name}: output table is not a permutation"
                        )))
                    }
                }
            }
            s.inverse = inverse;
            let labels = std::iter::once((s.matrix_index, s.offset.clone())).chain(s.aliases.iter().cloned());
            for key in labels {
                if lookup.insert(key, StateId(id as u32)).is_some() {
                    return Err(Error::InvalidAutomaton(format!("duplicate state label {name}")));
                }
            }
        }
        for c in &components {
            if c.matrix >= matrices.len() || c.start + c.len > count {
                return Err(Error::InvalidAutomaton(format!("bad component {c:?}")));
            }
        }
        Ok(Automaton {
            base,
            dim,
            alphabet,
            matrices,
            states,
            components,
            deduplicated,
            lookup,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn states(&self) -> &[AutomatonState] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_deduplicated(&self) -> bool {
        self.deduplicated
    }

    pub fn get(&self, id: StateId) -> &AutomatonState {
        &self.states[id.index()]
    }

    /// The state labelled `m[matrix]:(offset)`, including merged aliases.
    pub fn state(&self, matrix: usize, offset: &IntVector) -> Option<StateId> {
        self.lookup.get(&(matrix, offset.clone())).copied()
    }

    /// `2^d Σ ‖M_i‖^d`.
    pub fn state_bound(&self) -> BigInt {
        let two_d = BigInt::from(2u32).pow(self.dim as u32);
        two_d
            * self
                .matrices
                .iter()
                .map(|m| m.row_sum_norm().pow(self.dim as u32))
                .sum::<BigInt>()
    }

    #[inline]
    pub(crate) fn out(&self, s: StateId, x: u32) -> u32 {
        self.states[s.index()].output[x as usize]
    }

    #[inline]
    pub(crate) fn inv(&self, s: StateId, y: u32) -> u32 {
        self.states[s.index()].inverse[y as usize]
    }

    #[inline]
    pub(crate) fn step(&self, s: StateId, x: u32) -> StateId {
        self.states[s.index()].next[x as usize]
    }

    pub fn letter(&self, index: usize) -> Letter {
        Letter::from_index(index, self.base, self.dim)
    }

    /// Merges behaviourally equivalent states by Moore-style partition
    /// refinement. Each class keeps its lowest-numbered member as
    /// representative; the other labels become aliases of it.
    pub fn dedup(&self) -> Automaton {
        let count = self.states.len();
        let mut class: Vec<usize> = {
            let mut ids: HashMap<&[u32], usize> = HashMap::new();
            self.states
                .iter()
                .map(|s| {
                    let k = ids.len();
                    *ids.entry(&s.output).or_insert(k)
                })
                .collect()
        };
        let mut classes = class.iter().max().map_or(0, |m| m + 1);
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let refined: Vec<usize> = (0..count)
                .map(|s| {
                    let sig = (class[s], self.states[s].next.iter().map(|t| class[t.index()]).collect());
                    let k = ids.len();
                    *ids.entry(sig).or_insert(k)
                })
                .collect();
            let refined_count = ids.len();
            class = refined;
            if refined_count == classes {
                break;
            }
            classes = refined_count;
        }

        // Class ids are assigned in order of first appearance, so sorting
        // representatives by class id keeps them in state order.
        let mut rep = vec![usize::MAX; classes];
        for (s, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = s;
            }
        }
        let mut merged: Vec<AutomatonState> = rep
            .iter()
            .map(|&r| {
                let s = &self.states[r];
                AutomatonState {
                    matrix_index: s.matrix_index,
                    offset: s.offset.clone(),
                    output: s.output.clone(),
                    next: s.next.iter().map(|t| StateId(class[t.index()] as u32)).collect(),
                    inverse: Vec::new(),
                    aliases: s.aliases.clone(),
                }
            })
            .collect();
        for (s, &c) in class.iter().enumerate() {
            if rep[c] != s {
                let st = &self.states[s];
                merged[c].aliases.push((st.matrix_index, st.offset.clone()));
                merged[c].aliases.extend(st.aliases.iter().cloned());
            }
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let survivors_before = (0..c.start).filter(|&s| rep[class[s]] == s).count();
                let len = (c.start..c.start + c.len).filter(|&s| rep[class[s]] == s).count();
                Component {
                    matrix: c.matrix,
                    start: survivors_before,
                    len,
                }
            })
            .collect();
        Automaton::assemble(self.base, self.dim, self.matrices.clone(), merged, components, true)
            .expect("refinement of a valid automaton is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_repr()).expect("automaton serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("automaton serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: AutomatonRepr = serde_json::from_str(text)?;
        check_base(repr.n)?;
        if let Some(m) = repr.matrices.iter().find(|m| m.dim() != repr.d) {
            return Err(Error::DimensionMismatch {
                expected: repr.d,
                found: m.dim(),
            });
        }
        let states = repr
            .states
            .into_iter()
            .map(|s| AutomatonState {
                matrix_index: s.m,
                offset: s.v,
                output: s.out,
                next: s.next.into_iter().map(StateId).collect(),
                inverse: Vec::new(),
                aliases: s.aliases.into_iter().map(|a| (a.m, a.v)).collect(),
            })
            .collect::<Vec<_>>();
        let components = if repr.components.is_empty() {
            infer_components(&states)
        } else {
            repr.components
        };
        Automaton::assemble(repr.n, repr.d, repr.matrices, states, components, repr.deduplicated)
    }

    fn to_repr(&self) -> AutomatonRepr {
        AutomatonRepr {
            n: self.base,
            d: self.dim,
            matrices: self.matrices.clone(),
            components: self.components.clone(),
            deduplicated: self.deduplicated,
            states: self
                .states
                .iter()
                .map(|s| StateRepr {
                    m: s.matrix_index,
                    v: s.offset.clone(),
                    out: s.output.clone(),
                    next: s.next.iter().map(|t| t.0).collect(),
                    aliases: s
                        .aliases
                        .iter()
                        .map(|(m, v)| AliasRepr { m: *m, v: v.clone() })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Graphviz rendering: one node per state, one edge per (state, letter)
    /// labelled `input|output`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        for (id, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "  s{id} [label=\"{}\"];", s.label());
        }
        for (id, s) in self.states.iter().enumerate() {
            for x in 0..self.alphabet {
                let _ = writeln!(
                    out,
                    "  s{id} -> s{} [label=\"{}|{}\"];",
                    s.next[x].0,
                    self.letter(x),
                    self.letter(s.output[x] as usize)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn infer_components(states: &[AutomatonState]) -> Vec<Component> {
    let mut out: Vec<Component> = Vec::new();
    for (i, s) in states.iter().enumerate() {
        match out.last_mut() {
            Some(c) if c.matrix == s.matrix_index => c.len += 1,
            _ => out.push(Component {
                matrix: s.matrix_index,
                start: i,
                len: 1,
            }),
        }
    }
    out
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct AutomatonRepr {
    n: u32,
    d: usize,
    matrices: Vec<IntMatrix>,
    #[serde(default)]
    components: Vec<Component>,
    #[serde(default, skip_serializing_if = "is_false")]
    deduplicated: bool,
    states: Vec<StateRepr>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    m: usize,
    v: IntVector,
    out: Vec<u32>,
    next: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    aliases: Vec<AliasRepr>,
}

#[derive(Serialize, Deserialize)]
struct AliasRepr {
    m: usize,
    v: IntVector,
}

/// Why a single transition failed the well-definedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultKind {
    /// Coordinate `coord` of `v + M x` is outside `[-‖M‖n, ‖M‖n - 1]`.
    OutOfRange {
        coord: usize,
        value: i128,
    },
    /// `Div(v + M x)` is not in the state box.
    CarryOutsideBox,
    WrongOutput {
        expected: u32,
        found: u32,
    },
    WrongNext {
        expected: Option<StateId>,
        found: StateId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionFault {
    pub state: StateId,
    pub letter: usize,
    pub kind: FaultKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WellDefinednessReport {
    pub transitions_checked: u64,
    pub failure_count: u64,
    /// The first few failures, in state/letter order.
    pub failures: Vec<TransitionFault>,
}

impl WellDefinednessReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

impl fmt::Display for WellDefinednessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "well-defined: {} transitions checked", self.transitions_checked)
        } else {
            write!(
                f,
                "NOT well-defined: {} of {} transitions fail",
                self.failure_count, self.transitions_checked
            )?;
            if let Some(first) = self.failures.first() {
                write!(
                    f,
                    "; first at state {} letter {}: {:?}",
                    first.state.0, first.letter, first.kind
                )?;
            }
            Ok(())
        }
    }
}

const MAX_REPORTED_FAULTS: usize = 16;

/// Recomputes every transition from the state labels and checks the carry
/// bound, carry membership in the state box, and the stored tables.
pub fn well_definedness_check(aut: &Automaton) -> WellDefinednessReport {
    let mut report = WellDefinednessReport::default();
    let n = aut.base as i128;
    let d = aut.dim;
    let params: Vec<Option<(Vec<i128>, i128)>> = aut
        .matrices
        .iter()
        .map(|m| {
            let e = m.to_i64_entries()?.into_iter().map(i128::from).collect();
            Some((e, m.row_sum_norm().to_i128()?))
        })
        .collect();
    let letters: Vec<Vec<i128>> = (0..aut.alphabet)
        .map(|i| aut.letter(i).digits().iter().map(|&x| x as i128).collect())
        .collect();

    let push = |report: &mut WellDefinednessReport, fault: TransitionFault| {
        report.failure_count += 1;
        if report.failures.len() < MAX_REPORTED_FAULTS {
            report.failures.push(fault);
        }
    };

    for (sid, s) in aut.states.iter().enumerate() {
        let state = StateId(sid as u32);
        let Some((entries, norm)) = &params[s.matrix_index] else {
            push(
                &mut report,
                TransitionFault {
                    state,
                    letter: 0,
                    kind: FaultKind::CarryOutsideBox,
                },
            );
            continue;
        };
        let Some(v) = s
            .offset
            .coords()
            .iter()
            .map(|c| c.to_i128())
            .collect::<Option<Vec<_>>>()
        else {
            push(
                &mut report,
                TransitionFault {
                    state,
                    letter: 0,
                    kind: FaultKind::CarryOutsideBox,
                },
            );
            continue;
        };
        for (x, digits) in letters.iter().enumerate() {
            report.transitions_checked += 1;
            let w: Vec<i128> = (0..d)
                .map(|i| v[i] + (0..d).map(|j| entries[i * d + j] * digits[j]).sum::<i128>())
                .collect();
            if let Some(coord) = w.iter().position(|&c| c < -norm * n || c > norm * n - 1) {
                push(
                    &mut report,
                    TransitionFault {
                        state,
                        letter: x,
                        kind: FaultKind::OutOfRange { coord, value: w[coord] },
                    },
                );
                continue;
            }
            let carry: Vec<i128> = w.iter().map(|c| c.div_euclid(n)).collect();
            if carry.iter().any(|&c| c < -norm || c > norm - 1) {
                push(
                    &mut report,
                    TransitionFault {
                        state,
                        letter: x,
                        kind: FaultKind::CarryOutsideBox,
                    },
                );
                continue;
            }
            let expected_out = w.iter().rev().fold(0i128, |acc, c| acc * n + c.rem_euclid(n)) as u32;
            if s.output[x] != expected_out {
                push(
                    &mut report,
                    TransitionFault {
                        state,
                        letter: x,
                        kind: FaultKind::WrongOutput {
                            expected: expected_out,
                            found: s.output[x],
                        },
                    },
                );
                continue;
            }
            let carry_vec = IntVector::new(carry.into_iter().map(BigInt::from).collect());
            let expected_next = aut.state(s.matrix_index, &carry_vec);
            if expected_next != Some(s.next[x]) {
                push(
                    &mut report,
                    TransitionFault {
                        state,
                        letter: x,
                        kind: FaultKind::WrongNext {
                            expected: expected_next,
                            found: s.next[x],
                        },
                    },
                );
            }
        }
    }
    report
}
