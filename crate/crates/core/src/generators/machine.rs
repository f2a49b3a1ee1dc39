//! Two-register machines, their first-order description, and bounded halting
//! instances.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::syntax::{Formula, Store, Term};

pub const HALT_STATE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Register {
    R1,
    R2,
}

impl Register {
    fn index(self) -> usize {
        match self {
            Register::R1 => 1,
            Register::R2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Inc {
        reg: Register,
        next: usize,
    },
    Dec {
        reg: Register,
        if_zero: usize,
        otherwise: usize,
    },
}

/// State 0 is initial and state 1 is the only halting state; every other
/// state in `0..num_states` carries exactly one instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoRegisterMachine {
    instrs: BTreeMap<usize, Instr>,
    num_states: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("state {0} has more than one instruction")]
    Duplicate(usize),
    #[error("the halting state 1 cannot carry an instruction")]
    HaltingInstruction,
    #[error("state {0} has no instruction")]
    MissingState(usize),
}

impl TwoRegisterMachine {
    pub fn new(instrs: impl IntoIterator<Item = (usize, Instr)>) -> Result<Self, MachineError> {
        let mut map = BTreeMap::new();
        for (s, i) in instrs {
            if s == HALT_STATE {
                return Err(MachineError::HaltingInstruction);
            }
            if map.insert(s, i).is_some() {
                return Err(MachineError::Duplicate(s));
            }
        }
        let mut top = HALT_STATE;
        for (&s, i) in &map {
            top = top.max(s);
            match *i {
                Instr::Inc { next, .. } => top = top.max(next),
                Instr::Dec {
                    if_zero, otherwise, ..
                } => top = top.max(if_zero).max(otherwise),
            }
        }
        for s in (0..=top).filter(|&s| s != HALT_STATE) {
            if !map.contains_key(&s) {
                return Err(MachineError::MissingState(s));
            }
        }
        Ok(TwoRegisterMachine {
            instrs: map,
            num_states: top + 1,
        })
    }

    /// Lines `state i: inc r -> j` or `state i: dec r zero-> j else-> l`;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MachineError> {
        let mut instrs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| MachineError::Syntax {
                line: n + 1,
                message: message.to_owned(),
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(&format!("expected a number, found `{s}`")))
            };
            let reg = |s: &str| match s {
                "1" => Ok(Register::R1),
                "2" => Ok(Register::R2),
                _ => Err(err(&format!("register must be 1 or 2, found `{s}`"))),
            };
            match tokens.as_slice() {
                ["state", st, "inc", r, "->", j] => {
                    let st = st
                        .strip_suffix(':')
                        .ok_or_else(|| err("expected `:` after the state"))?;
                    instrs.push((
                        num(st)?,
                        Instr::Inc {
                            reg: reg(r)?,
                            next: num(j)?,
                        },
                    ));
                }
                ["state", st, "dec", r, "zero->", j, "else->", l] => {
                    let st = st
                        .strip_suffix(':')
                        .ok_or_else(|| err("expected `:` after the state"))?;
                    instrs.push((
                        num(st)?,
                        Instr::Dec {
                            reg: reg(r)?,
                            if_zero: num(j)?,
                            otherwise: num(l)?,
                        },
                    ));
                }
                _ => {
                    return Err(err(
                        "expected `state i: inc r -> j` or `state i: dec r zero-> j else-> l`",
                    ))
                }
            }
        }
        Self::new(instrs)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn instr(&self, state: usize) -> Option<Instr> {
        self.instrs.get(&state).copied()
    }

    pub fn instructions(&self) -> impl Iterator<Item = (usize, Instr)> + '_ {
        self.instrs.iter().map(|(&s, &i)| (s, i))
    }

    fn step(&self, (state, r1, r2): Config) -> Option<Config> {
        let instr = self.instr(state)?;
        let mut regs = [0, r1, r2];
        let next = match instr {
            Instr::Inc { reg, next } => {
                regs[reg.index()] += 1;
                next
            }
            Instr::Dec {
                reg,
                if_zero,
                otherwise,
            } => {
                if regs[reg.index()] == 0 {
                    if_zero
                } else {
                    regs[reg.index()] -= 1;
                    otherwise
                }
            }
        };
        Some((next, regs[1], regs[2]))
    }
}

impl fmt::Display for TwoRegisterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, i) in self.instructions() {
            match i {
                Instr::Inc { reg, next } => {
                    writeln!(f, "state {s}: inc {} -> {next}", reg.index())?
                }
                Instr::Dec {
                    reg,
                    if_zero,
                    otherwise,
                } => writeln!(
                    f,
                    "state {s}: dec {} zero-> {if_zero} else-> {otherwise}",
                    reg.index()
                )?,
            }
        }
        Ok(())
    }
}

/// `(state, register 1, register 2)`.
pub type Config = (usize, u64, u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimResult {
    pub halts: bool,
    pub steps: usize,
    pub final_config: Config,
}

/// Runs from `(0, 0, 0)` for at most `max_steps` steps.
pub fn simulate(m: &TwoRegisterMachine, max_steps: usize) -> SimResult {
    let mut c: Config = (0, 0, 0);
    let mut steps = 0;
    while c.0 != HALT_STATE && steps < max_steps {
        match m.step(c) {
            Some(n) => c = n,
            None => break,
        }
        steps += 1;
    }
    SimResult {
        halts: c.0 == HALT_STATE,
        steps,
        final_config: c,
    }
}

/// Whether the halting state is reachable when every step needs a successor
/// fact `S(n_k, n_{k+1})` with `k + 1 <= t` and register values stay within
/// `0..=t`. This is exactly what the bounded instance lets primal logic
/// derive; it can succeed for `t` below the simulated step count.
pub fn halts_within_bound(m: &TwoRegisterMachine, t: u64) -> bool {
    if t == 0 {
        return false;
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(0usize, 0u64, 0u64)]);
    while let Some(c) = queue.pop_front() {
        if c.0 == HALT_STATE {
            return true;
        }
        if !seen.insert(c) {
            continue;
        }
        if let Some(n) = m.step(c) {
            if n.1 <= t && n.2 <= t {
                queue.push_back(n);
            }
        }
    }
    false
}

pub fn numeral(store: &mut Store, k: u64) -> Term {
    store.constant(&format!("n{k}"))
}

fn k_atom(store: &mut Store, state: usize, a: Term, b: Term) -> Formula {
    store.atom_named(&format!("K_{state}"), &[a, b])
}

/// The three conjuncts of the machine's description: the successor axiom,
/// the initial configuration, and the one-step transition clause.
pub fn phi_conjuncts(store: &mut Store, m: &TwoRegisterMachine) -> [Formula; 3] {
    let (xs, xps, ys) = (store.sym("x"), store.sym("x'"), store.sym("y"));
    let (x, xp, y) = (Term::Var(xs), Term::Var(xps), Term::Var(ys));
    let zero = numeral(store, 0);

    let sxx = store.atom_named("S", &[x, xp]);
    let ex = store.exists(xps, sxx);
    let succ = store.forall(xs, ex);

    let init = k_atom(store, 0, zero, zero);

    let mut deltas = Vec::new();
    for (i, instr) in m.instructions() {
        let d = match instr {
            Instr::Inc {
                reg: Register::R1,
                next,
            } => {
                let a = k_atom(store, i, x, y);
                let b = k_atom(store, next, xp, y);
                store.imp(a, b)
            }
            Instr::Inc {
                reg: Register::R2,
                next,
            } => {
                let a = k_atom(store, i, y, x);
                let b = k_atom(store, next, y, xp);
                store.imp(a, b)
            }
            Instr::Dec {
                reg: Register::R1,
                if_zero,
                otherwise,
            } => {
                let a = k_atom(store, i, zero, y);
                let b = k_atom(store, if_zero, zero, y);
                let z = store.imp(a, b);
                let c = k_atom(store, i, xp, y);
                let d = k_atom(store, otherwise, x, y);
                let nz = store.imp(c, d);
                store.and(z, nz)
            }
            Instr::Dec {
                reg: Register::R2,
                if_zero,
                otherwise,
            } => {
                let a = k_atom(store, i, y, zero);
                let b = k_atom(store, if_zero, y, zero);
                let z = store.imp(a, b);
                let c = k_atom(store, i, y, xp);
                let d = k_atom(store, otherwise, y, x);
                let nz = store.imp(c, d);
                store.and(z, nz)
            }
        };
        deltas.push(d);
    }
    let mut body = deltas.pop().unwrap_or_else(|| store.top());
    while let Some(d) = deltas.pop() {
        body = store.and(d, body);
    }
    let step = store.imp(sxx, body);
    let step = store.forall(ys, step);
    let step = store.forall(xps, step);
    let step = store.forall(xs, step);
    [succ, init, step]
}

/// `(succ & init) & step`.
pub fn encode_phi(store: &mut Store, m: &TwoRegisterMachine) -> Formula {
    let [succ, init, step] = phi_conjuncts(store, m);
    let head = store.and(succ, init);
    store.and(head, step)
}

/// `exists x. exists y. K_1(x, y)`.
pub fn halting_query(store: &mut Store) -> Formula {
    let (xs, ys) = (store.sym("x"), store.sym("y"));
    let k = k_atom(store, HALT_STATE, Term::Var(xs), Term::Var(ys));
    let ey = store.exists(ys, k);
    store.exists(xs, ey)
}

/// Hypotheses: the initial configuration, the transition clause, and the
/// successor facts `S(n0, n1), ..., S(n_{t-1}, n_t)`. The successor axiom is
/// left out since its existential cannot be eliminated.
pub fn bounded_halting_instance(
    store: &mut Store,
    m: &TwoRegisterMachine,
    t: u64,
) -> (Vec<Formula>, Formula) {
    let [_, init, step] = phi_conjuncts(store, m);
    let mut hyps = vec![init, step];
    for k in 0..t {
        let (a, b) = (numeral(store, k), numeral(store, k + 1));
        hyps.push(store.atom_named("S", &[a, b]));
    }
    (hyps, halting_query(store))
}

/// A reproducible machine with `states` states (at least 2). Increments are
/// more common than decrements.
pub fn random_machine(seed: u64, states: usize) -> TwoRegisterMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = states.max(2);
    let instrs: Vec<(usize, Instr)> = (0..n)
        .filter(|&s| s != HALT_STATE)
        .map(|s| {
            let reg = if rng.gen_bool(0.5) {
                Register::R1
            } else {
                Register::R2
            };
            let i = if rng.gen_bool(0.6) {
                Instr::Inc {
                    reg,
                    next: rng.gen_range(0..n),
                }
            } else {
                Instr::Dec {
                    reg,
                    if_zero: rng.gen_range(0..n),
                    otherwise: rng.gen_range(0..n),
                }
            };
            (s, i)
        })
        .collect();
    TwoRegisterMachine::new(instrs).expect("every non-halting state has an instruction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::CalculusVariant;
    use crate::engine::entails;
    use crate::syntax::render;

    fn machine(text: &str) -> TwoRegisterMachine {
        TwoRegisterMachine::parse(text).unwrap()
    }

    #[test]
    fn parse_and_validate() {
        let m = machine("# comment\nstate 0: dec 1 zero-> 1 else-> 0\n");
        assert_eq!(m.num_states(), 2);
        assert_eq!(TwoRegisterMachine::parse(&m.to_string()).unwrap(), m);
        assert_eq!(
            TwoRegisterMachine::parse("state 0: inc 1 -> 2\n"),
            Err(MachineError::MissingState(2))
        );
        assert!(TwoRegisterMachine::parse("state 1: inc 1 -> 0\n").is_err());
        assert!(TwoRegisterMachine::parse("state 0: inc 3 -> 1\n").is_err());
        assert!(TwoRegisterMachine::parse("state 0 inc 1 -> 1\n").is_err());
        assert!(TwoRegisterMachine::parse("state 0: inc 1 -> 1\nstate 0: inc 2 -> 1\n").is_err());
    }

    #[test]
    fn random_machines_are_seeded() {
        assert_eq!(random_machine(3, 4), random_machine(3, 4));
        assert_eq!(random_machine(3, 4).num_states(), 4);
        assert!((0..20).any(|s| random_machine(s, 4) != random_machine(3, 4)));
    }

    #[test]
    fn simulation_examples() {
        let r = simulate(&machine("state 0: inc 1 -> 1"), 10);
        assert_eq!((r.halts, r.steps, r.final_config), (true, 1, (1, 1, 0)));
        let r = simulate(&machine("state 0: inc 1 -> 0"), 5);
        assert!(!r.halts);
        let r = simulate(&machine("state 0: dec 1 zero-> 1 else-> 0"), 10);
        assert_eq!((r.halts, r.steps, r.final_config), (true, 1, (1, 0, 0)));
    }

    #[test]
    fn phi_shape() {
        let mut s = Store::new();
        let m = machine("state 0: inc 1 -> 1");
        let phi = encode_phi(&mut s, &m);
        assert_eq!(s.quantifier_depth(phi), 3);
        let [succ, init, step] = phi_conjuncts(&mut s, &m);
        assert_eq!(render(&s, succ), "forall x. exists x'. S(x, x')");
        assert_eq!(render(&s, init), "K_0(n0, n0)");
        assert_eq!(
            render(&s, step),
            "forall x. forall x'. forall y. S(x, x') -> (K_0(x, y) -> K_1(x', y))"
        );
        let m = machine("state 0: dec 1 zero-> 1 else-> 0");
        let [_, _, step] = phi_conjuncts(&mut s, &m);
        assert_eq!(
            render(&s, step),
            "forall x. forall x'. forall y. S(x, x') -> ((K_0(n0, y) -> K_1(n0, y)) & (K_0(x', y) -> K_0(x, y)))"
        );
    }

    fn halts_in_logic(m: &TwoRegisterMachine, t: u64) -> bool {
        let mut s = Store::new();
        let (hyps, q) = bounded_halting_instance(&mut s, m, t);
        entails(&mut s, &hyps, q, CalculusVariant::Qpl)
            .unwrap()
            .entailed
    }

    #[test]
    fn bounded_instances() {
        let inc = machine("state 0: inc 1 -> 1");
        assert!(halts_in_logic(&inc, 1));
        assert!(!halts_in_logic(&inc, 0));
        let lp = machine("state 0: inc 1 -> 0");
        for t in 0..=6 {
            assert!(!halts_in_logic(&lp, t));
        }
    }

    #[test]
    fn bounded_derivability_can_precede_the_step_count() {
        // Two increments on different registers take two steps but never
        // push a register past 1.
        let m = machine("state 0: inc 1 -> 2\nstate 2: inc 2 -> 1");
        assert_eq!(simulate(&m, 10).steps, 2);
        assert!(halts_within_bound(&m, 1));
        assert!(halts_in_logic(&m, 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn machine_strategy() -> impl Strategy<Value = TwoRegisterMachine> {
            (2..=5usize)
                .prop_flat_map(|n| {
                    let reg = prop_oneof![Just(Register::R1), Just(Register::R2)];
                    let instr = prop_oneof![
                        (reg.clone(), 0..n).prop_map(|(reg, next)| Instr::Inc { reg, next }),
                        (reg, 0..n, 0..n).prop_map(|(reg, if_zero, otherwise)| Instr::Dec {
                            reg,
                            if_zero,
                            otherwise
                        }),
                    ];
                    prop::collection::vec(instr, n - 1)
                })
                .prop_map(|instrs| {
                    let states = (0..=instrs.len()).filter(|&s| s != HALT_STATE);
                    TwoRegisterMachine::new(states.zip(instrs)).unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn logic_matches_bounded_reachability(m in machine_strategy(), t in 0..=4u64) {
                prop_assert_eq!(halts_in_logic(&m, t), halts_within_bound(&m, t));
            }

            #[test]
            fn bounded_reachability_sits_between_runs(m in machine_strategy(), t in 0..=6u64) {
                // Within t steps registers stay at most t, so a run of at most
                // t steps is found; anything found is a real run.
                let sim = simulate(&m, t as usize);
                if sim.halts && t > 0 {
                    prop_assert!(halts_within_bound(&m, t));
                }
                if halts_within_bound(&m, t) {
                    prop_assert!(simulate(&m, 10_000).halts);
                }
            }
        }
    }
}
