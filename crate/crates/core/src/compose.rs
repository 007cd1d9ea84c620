//! Demand-driven composition of named coroutines.
//!
//! A composition runs a set of named coroutine types against each other.
//! Each step applies one rewrite rule:
//!
//! - a pending value is handed to the first coroutine whose receive part
//!   demands it (`Resume`), or deferred to the environment (`External`);
//! - spent coroutines (`[Void; Void]`) are removed (`RemoveVoid`);
//! - a coroutine demanding a coroutine absorbs a matching peer
//!   (`ResumeCoroutine`);
//! - deferred values are re-offered once a receiver appears
//!   (`LoopExternal`);
//! - a coroutine whose receive part is satisfied yields the next value of
//!   its yield part (`Yield`), inserting it as a new participant when the
//!   value is itself a coroutine (`YieldCoroutine`);
//! - groups stay inert until nothing else applies, then their members are
//!   composed among themselves (`ComposeTuple`).
//!
//! When no rule applies the run ends: everything consumed means the
//! composed type is `[Void; <leftover external values>]`; coroutines still
//! waiting on input mean a deadlock, unless every waiting coroutine was
//! never touched at all and nothing guarded by a constraint fed the
//! leftovers, in which case the untouched ones are discarded as unused
//! alternatives.
//!
//! Scheduling is deterministic. Receive scans always run left to right
//! over the current participants; yield scans start at a cursor that
//! follows the most recent activity, so a freshly satisfied coroutine
//! gets to yield before older ones resume producing.

use crate::types::{
    eval_predicate, head, match_type, normalize, substitute, tail, Hierarchy, Predicate, TypeExpr,
};
use std::fmt;

// ---------------------------------------------------------------------------
// Public data
// ---------------------------------------------------------------------------

/// A coroutine participating in a composition, identified by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCoroutine {
    pub name: String,
    pub ty: TypeExpr,
}

impl NamedCoroutine {
    pub fn new(name: &str, ty: TypeExpr) -> NamedCoroutine {
        NamedCoroutine {
            name: name.to_string(),
            ty,
        }
    }
}

/// An input to a composition: a single coroutine, or a group composed as a
/// unit only when the rest of the system gets stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaItem {
    Single(NamedCoroutine),
    Group(Vec<NamedCoroutine>),
}

/// The rewrite rule applied by a step, as recorded in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    RemoveVoid,
    ComposeTuple,
    Yield,
    YieldCoroutine,
    Ready,
    Resume,
    ResumeCoroutine,
    External,
    LoopExternal,
    Discard,
    Final,
    Deadlock,
    FuelExhausted,
}

impl RuleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::RemoveVoid => "remove-void",
            RuleId::ComposeTuple => "compose-tuple",
            RuleId::Yield => "yield",
            RuleId::YieldCoroutine => "yield-coroutine",
            RuleId::Ready => "ready",
            RuleId::Resume => "resume",
            RuleId::ResumeCoroutine => "resume-coroutine",
            RuleId::External => "external",
            RuleId::LoopExternal => "loop-external",
            RuleId::Discard => "discard",
            RuleId::Final => "final",
            RuleId::Deadlock => "deadlock",
            RuleId::FuelExhausted => "fuel-exhausted",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One entry of the composition trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: RuleId,
    pub actor: Option<String>,
    pub detail: String,
}

/// Result of a finished composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Everything was consumed; the system behaves as
    /// `[Void; <leftover external values>]`.
    Composed(TypeExpr),
    /// Some coroutines still demand input that nobody can supply.
    Deadlock {
        external: Vec<TypeExpr>,
        waiting: Vec<NamedCoroutine>,
    },
    /// The step budget ran out before the composition settled.
    FuelExhausted,
}

/// What a single [`Composer::step`] call did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Applied(RuleId),
    Finished(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComposeError {
    EmptyInput,
    EmptyGroup(String),
    /// The named participant is not a coroutine (or a product of coroutines).
    NotACoroutine { name: String, ty: String },
}

impl fmt::Display for ComposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeError::EmptyInput => write!(f, "nothing to compose"),
            ComposeError::EmptyGroup(name) => write!(f, "group {} has no members", name),
            ComposeError::NotACoroutine { name, ty } => {
                write!(f, "{} is not a coroutine: {}", name, ty)
            }
        }
    }
}

impl std::error::Error for ComposeError {}

/// Everything a composition run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeReport {
    pub outcome: Outcome,
    pub trace: Vec<TraceEvent>,
    pub order: Vec<String>,
}

/// Runs a composition to completion.
pub fn compose(
    items: Vec<ThetaItem>,
    hierarchy: &Hierarchy,
    fuel: u64,
) -> Result<ComposeReport, ComposeError> {
    let mut composer = Composer::new(items, hierarchy.clone(), fuel)?;
    let outcome = composer.run();
    let order = composer.yielding_order();
    Ok(ComposeReport {
        outcome,
        trace: composer.into_trace(),
        order,
    })
}

/// First occurrence of each name in a yielding order, in order.
pub fn first_occurrences(order: &[String]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for name in order {
        if !seen.iter().any(|s| s == name) {
            seen.push(name.clone());
        }
    }
    seen
}

// ---------------------------------------------------------------------------
// Internal state
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct CoSlot {
    name: String,
    recv: TypeExpr,
    yld: TypeExpr,
    /// Constraint guarding activation, discharged on first successful match.
    pred: Option<Predicate>,
    /// Has the coroutine ever consumed anything?
    activated: bool,
    /// Was its activation allowed by a constraint check?
    guarded: bool,
    /// Spent and logically removed (index kept stable for the cursor).
    retired: bool,
}

impl CoSlot {
    fn live(&self) -> bool {
        !self.retired
    }

    fn current_type(&self) -> TypeExpr {
        let co = TypeExpr::coroutine(self.recv.clone(), self.yld.clone());
        match &self.pred {
            Some(p) => TypeExpr::Constrained(Box::new(co), p.clone()),
            None => co,
        }
    }
}

#[derive(Debug, Clone)]
enum Slot {
    Single(CoSlot),
    Group { members: Vec<NamedCoroutine> },
}

#[derive(Debug, Clone)]
struct Pending {
    ty: TypeExpr,
    from: String,
    guarded: bool,
}

#[derive(Debug, Clone)]
struct ExtItem {
    ty: TypeExpr,
    guarded: bool,
}

/// The composition engine. Drive it with [`Composer::step`] or run it to
/// completion with [`Composer::run`].
#[derive(Debug, Clone)]
pub struct Composer {
    slots: Vec<Slot>,
    pending: Option<Pending>,
    external: Vec<ExtItem>,
    cursor: usize,
    fuel: u64,
    hierarchy: Hierarchy,
    trace: Vec<TraceEvent>,
    /// Did any coroutine consume anything during this run?
    activated_any: bool,
    /// Counter for names of coroutines created during the run.
    spawned: u32,
    finished: Option<Outcome>,
}

impl Composer {
    pub fn new(
        items: Vec<ThetaItem>,
        hierarchy: Hierarchy,
        fuel: u64,
    ) -> Result<Composer, ComposeError> {
        if items.is_empty() {
            return Err(ComposeError::EmptyInput);
        }
        let mut slots = Vec::new();
        for item in items {
            match item {
                ThetaItem::Single(nc) => slots.push(slot_from_named(nc)?),
                ThetaItem::Group(members) => {
                    if members.is_empty() {
                        return Err(ComposeError::EmptyGroup("(anonymous)".to_string()));
                    }
                    slots.push(Slot::Group { members });
                }
            }
        }
        Ok(Composer {
            slots,
            pending: None,
            external: Vec::new(),
            cursor: 0,
            fuel,
            hierarchy,
            trace: Vec::new(),
            activated_any: false,
            spawned: 0,
            finished: None,
        })
    }

    pub fn fuel_remaining(&self) -> u64 {
        self.fuel
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceEvent> {
        self.trace
    }

    /// Current types of the live participants: each not-yet-retired single
    /// as its (possibly still constrained) coroutine type, each untouched
    /// group as the types of its members.
    pub fn live_types(&self) -> Vec<TypeExpr> {
        let mut out = Vec::new();
        for slot in &self.slots {
            match slot {
                Slot::Single(s) if s.live() => out.push(s.current_type()),
                Slot::Single(_) => {}
                Slot::Group { members } => {
                    out.extend(members.iter().map(|m| m.ty.clone()));
                }
            }
        }
        out
    }

    /// The type currently in flight between a yielder and a receiver.
    pub fn pending_type(&self) -> Option<TypeExpr> {
        self.pending.as_ref().map(|p| p.ty.clone())
    }

    /// Yielded types no one has been able to receive so far.
    pub fn external_types(&self) -> Vec<TypeExpr> {
        self.external.iter().map(|e| e.ty.clone()).collect()
    }

    /// The names recorded by yield applications and by receive parts
    /// becoming satisfied, in trace order.
    pub fn yielding_order(&self) -> Vec<String> {
        self.trace
            .iter()
            .filter(|e| {
                matches!(
                    e.rule,
                    RuleId::Yield | RuleId::YieldCoroutine | RuleId::Ready
                )
            })
            .filter_map(|e| e.actor.clone())
            .collect()
    }

    /// Runs steps until the composition finishes.
    pub fn run(&mut self) -> Outcome {
        loop {
            if let StepResult::Finished(o) = self.step() {
                return o;
            }
        }
    }

    // --- stepping ---

    /// Applies the single highest-priority rule, or finishes the run.
    pub fn step(&mut self) -> StepResult {
        if let Some(o) = &self.finished {
            return StepResult::Finished(o.clone());
        }
        if self.fuel == 0 {
            self.push(RuleId::FuelExhausted, None, "rewrite budget exhausted");
            return self.finish(Outcome::FuelExhausted);
        }
        self.fuel -= 1;

        // 1. A pending value goes to its first receiver, or to the environment.
        if let Some(p) = self.pending.take() {
            return match self.find_receiver(&p.ty) {
                Some(found) => {
                    self.apply_resume(found, RuleId::Resume, &p.ty);
                    StepResult::Applied(RuleId::Resume)
                }
                None => {
                    self.push(
                        RuleId::External,
                        Some(p.from.clone()),
                        format!("{} has no receiver; deferred to the environment", p.ty),
                    );
                    self.external.push(ExtItem {
                        ty: p.ty,
                        guarded: p.guarded,
                    });
                    StepResult::Applied(RuleId::External)
                }
            };
        }

        // 2. Remove one spent coroutine.
        if let Some(i) = self.slots.iter().position(|s| {
            matches!(s, Slot::Single(c) if c.live() && c.recv.is_void() && c.yld.is_void())
        }) {
            let name = match &mut self.slots[i] {
                Slot::Single(c) => {
                    c.retired = true;
                    c.name.clone()
                }
                Slot::Group { .. } => unreachable!(),
            };
            self.push(RuleId::RemoveVoid, Some(name), "spent coroutine removed");
            return StepResult::Applied(RuleId::RemoveVoid);
        }

        // 3. A coroutine demanding a coroutine absorbs a matching peer.
        if let Some((recv_idx, peer_idx, found)) = self.find_coroutine_absorption() {
            let (peer_name, peer_ty) = match &mut self.slots[peer_idx] {
                Slot::Single(c) => {
                    c.retired = true;
                    (c.name.clone(), c.current_type())
                }
                Slot::Group { .. } => unreachable!(),
            };
            let receiver = match &self.slots[recv_idx] {
                Slot::Single(c) => c.name.clone(),
                Slot::Group { .. } => unreachable!(),
            };
            self.push(
                RuleId::ResumeCoroutine,
                Some(receiver),
                format!("absorbs {} ({})", peer_name, peer_ty),
            );
            self.apply_resume_found(recv_idx, found);
            self.cursor = recv_idx;
            return StepResult::Applied(RuleId::ResumeCoroutine);
        }

        // 4. Re-offer deferred values to newly able receivers.
        {
            let mut hit = None;
            for (e_idx, item) in self.external.iter().enumerate() {
                if let Some(found) = self.find_receiver(&item.ty) {
                    hit = Some((e_idx, found));
                    break;
                }
            }
            if let Some((e_idx, found)) = hit {
                let item = self.external.remove(e_idx);
                let receiver_idx = found.index;
                self.push(
                    RuleId::LoopExternal,
                    Some(self.slot_name(receiver_idx)),
                    format!("receives {} from the environment", item.ty),
                );
                self.apply_resume_found(receiver_idx, found);
                self.cursor = receiver_idx + 1;
                return StepResult::Applied(RuleId::LoopExternal);
            }
        }

        // 5. Yield: from the cursor, the first satisfied coroutine produces
        //    the next value of its yield part.
        if let Some(yielder) = self.find_yielder() {
            return StepResult::Applied(self.apply_yield(yielder));
        }

        // 6. Stuck: expand the first inert group, if any.
        if let Some(g) = self
            .slots
            .iter()
            .position(|s| matches!(s, Slot::Group { .. }))
        {
            return match self.expand_group(g) {
                Ok(()) => StepResult::Applied(RuleId::ComposeTuple),
                Err(o) => self.finish(o),
            };
        }

        // 7. Nothing applies: classify the terminal state.
        let outcome = self.classify_terminal();
        self.finish(outcome)
    }

    // --- rule helpers ---

    fn push(&mut self, rule: RuleId, actor: Option<String>, detail: impl Into<String>) {
        self.trace.push(TraceEvent {
            rule,
            actor,
            detail: detail.into(),
        });
    }

    fn slot_name(&self, i: usize) -> String {
        match &self.slots[i] {
            Slot::Single(c) => c.name.clone(),
            Slot::Group { members } => group_name(members),
        }
    }

    fn find_receiver(&self, value: &TypeExpr) -> Option<FoundReceiver> {
        for (i, slot) in self.slots.iter().enumerate() {
            if let Slot::Single(c) = slot {
                if let Some(found) = try_receive(i, c, value, &self.hierarchy) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Applies a resume where the receiver was already located, emitting the
    /// `Resume` event first when the rule is a plain resume.
    fn apply_resume(&mut self, found: FoundReceiver, rule: RuleId, value: &TypeExpr) {
        if rule == RuleId::Resume {
            self.push(
                RuleId::Resume,
                Some(self.slot_name(found.index)),
                format!("receives {}", value),
            );
        }
        let idx = found.index;
        self.apply_resume_found(idx, found);
        self.cursor = idx;
    }

    fn apply_resume_found(&mut self, idx: usize, found: FoundReceiver) {
        let became_ready;
        let name;
        match &mut self.slots[idx] {
            Slot::Single(c) => {
                c.recv = found.new_recv;
                c.yld = found.new_yld;
                c.activated = true;
                if found.checked_pred {
                    c.guarded = true;
                    c.pred = None;
                }
                became_ready = c.recv.is_void();
                name = c.name.clone();
            }
            Slot::Group { .. } => unreachable!("groups never receive"),
        }
        self.activated_any = true;
        if became_ready {
            self.push(RuleId::Ready, Some(name), "receive part satisfied");
        }
    }

    fn find_coroutine_absorption(&self) -> Option<(usize, usize, FoundReceiver)> {
        for (i, slot) in self.slots.iter().enumerate() {
            let c = match slot {
                Slot::Single(c) if c.live() && !c.recv.is_void() => c,
                _ => continue,
            };
            let Ok(h) = head(&c.recv) else { continue };
            if !h.is_coroutine() {
                continue;
            }
            for (j, peer) in self.slots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let p = match peer {
                    Slot::Single(p) if p.live() => p,
                    _ => continue,
                };
                if let Some(found) = try_receive(i, c, &p.current_type(), &self.hierarchy) {
                    return Some((i, j, found));
                }
            }
        }
        None
    }

    fn find_yielder(&self) -> Option<usize> {
        let n = self.slots.len();
        for k in 0..n {
            let i = (self.cursor + k) % n;
            if let Slot::Single(c) = &self.slots[i] {
                if c.live() && c.recv.is_void() && !c.yld.is_void() && head(&c.yld).is_ok() {
                    return Some(i);
                }
            }
        }
        None
    }

    fn apply_yield(&mut self, i: usize) -> RuleId {
        let (value, rest, name, guarded) = match &self.slots[i] {
            Slot::Single(c) => match (head(&c.yld), tail(&c.yld)) {
                (Ok(h), Ok(t)) => (h, t, c.name.clone(), c.guarded),
                _ => unreachable!("find_yielder checked decomposability"),
            },
            Slot::Group { .. } => unreachable!(),
        };
        if value.is_coroutine() {
            self.spawned += 1;
            let spawn_name = format!("{}#{}", name, self.spawned);
            self.push(
                RuleId::YieldCoroutine,
                Some(name.clone()),
                format!("yields coroutine {} as {}", value, spawn_name),
            );
            match slot_from_named(NamedCoroutine::new(&spawn_name, value)) {
                Ok(slot) => self.slots.insert(i + 1, slot),
                Err(_) => unreachable!("value is a coroutine"),
            }
            if let Slot::Single(c) = &mut self.slots[i] {
                c.yld = rest;
            }
            self.cursor = i;
            RuleId::YieldCoroutine
        } else {
            self.push(RuleId::Yield, Some(name.clone()), format!("yields {}", value));
            if let Slot::Single(c) = &mut self.slots[i] {
                c.yld = rest;
            }
            self.pending = Some(Pending {
                ty: value,
                from: name,
                guarded,
            });
            self.cursor = i;
            RuleId::Yield
        }
    }

    /// Composes a group's members among themselves with the remaining fuel.
    /// A composed group rejoins as one coroutine; a deadlocked group spills
    /// its members (with whatever progress they made) back into place.
    fn expand_group(&mut self, g: usize) -> Result<(), Outcome> {
        let members = match &self.slots[g] {
            Slot::Group { members } => members.clone(),
            Slot::Single(_) => unreachable!(),
        };
        let name = group_name(&members);
        self.push(
            RuleId::ComposeTuple,
            Some(name.clone()),
            format!("composing group of {}", members.len()),
        );
        let items = members.into_iter().map(ThetaItem::Single).collect();
        let mut inner = match Composer::new(items, self.hierarchy.clone(), self.fuel) {
            Ok(c) => c,
            Err(e) => unreachable!("group members validated at intake: {}", e),
        };
        let outcome = inner.run();
        self.fuel = inner.fuel;
        self.activated_any |= inner.activated_any;
        self.spawned += inner.spawned;
        // Drop the inner terminal marker; the outer run continues.
        let mut inner_trace = inner.trace;
        if matches!(
            inner_trace.last().map(|e| e.rule),
            Some(RuleId::Final) | Some(RuleId::Deadlock)
        ) {
            inner_trace.pop();
        }
        self.trace.extend(inner_trace);
        match outcome {
            Outcome::Composed(t) => {
                let (recv, yld) = match &t {
                    TypeExpr::Coroutine(r, y) => ((**r).clone(), (**y).clone()),
                    other => (TypeExpr::Void, other.clone()),
                };
                self.slots[g] = Slot::Single(CoSlot {
                    name,
                    recv,
                    yld,
                    pred: None,
                    activated: true,
                    guarded: false,
                    retired: false,
                });
                self.cursor = g;
                Ok(())
            }
            Outcome::Deadlock { .. } => {
                let live: Vec<Slot> = inner
                    .slots
                    .into_iter()
                    .filter(|s| match s {
                        Slot::Single(c) => c.live(),
                        Slot::Group { .. } => true,
                    })
                    .collect();
                self.external.extend(inner.external);
                self.slots.splice(g..=g, live);
                self.cursor = g;
                Ok(())
            }
            Outcome::FuelExhausted => Err(Outcome::FuelExhausted),
        }
    }

    fn classify_terminal(&mut self) -> Outcome {
        let live: Vec<usize> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Slot::Single(c) if c.live() => Some(i),
                _ => None,
            })
            .collect();
        let leftovers = normalize(&TypeExpr::Sequence(
            self.external.iter().map(|e| e.ty.clone()).collect(),
        ));
        if live.is_empty() {
            let t = TypeExpr::coroutine(TypeExpr::Void, leftovers);
            self.push(RuleId::Final, None, format!("composed type {}", t));
            return Outcome::Composed(t);
        }
        let all_untouched = live.iter().all(|&i| match &self.slots[i] {
            Slot::Single(c) => !c.activated,
            Slot::Group { .. } => false,
        });
        let any_guarded_leftover = self.external.iter().any(|e| e.guarded);
        if all_untouched && self.activated_any && !any_guarded_leftover {
            for &i in &live {
                let name = self.slot_name(i);
                if let Slot::Single(c) = &mut self.slots[i] {
                    c.retired = true;
                }
                self.push(
                    RuleId::Discard,
                    Some(name),
                    "unused alternative discarded",
                );
            }
            let t = TypeExpr::coroutine(TypeExpr::Void, leftovers);
            self.push(RuleId::Final, None, format!("composed type {}", t));
            return Outcome::Composed(t);
        }
        let waiting: Vec<NamedCoroutine> = live
            .iter()
            .map(|&i| match &self.slots[i] {
                Slot::Single(c) => NamedCoroutine {
                    name: c.name.clone(),
                    ty: c.current_type(),
                },
                Slot::Group { .. } => unreachable!(),
            })
            .collect();
        self.push(
            RuleId::Deadlock,
            None,
            format!(
                "stuck: {} coroutine(s) still waiting for input",
                waiting.len()
            ),
        );
        Outcome::Deadlock {
            external: self.external.iter().map(|e| e.ty.clone()).collect(),
            waiting,
        }
    }

    fn finish(&mut self, outcome: Outcome) -> StepResult {
        self.finished = Some(outcome.clone());
        StepResult::Finished(outcome)
    }
}

// ---------------------------------------------------------------------------
// Matching helpers
// ---------------------------------------------------------------------------

struct FoundReceiver {
    index: usize,
    new_recv: TypeExpr,
    new_yld: TypeExpr,
    checked_pred: bool,
}

/// Checks whether slot `i` can receive `value`: the value must match the
/// head of the receive part, the slot's guard (if any) must accept the
/// bindings, and the substituted remainder must be well formed.
fn try_receive(
    i: usize,
    c: &CoSlot,
    value: &TypeExpr,
    hierarchy: &Hierarchy,
) -> Option<FoundReceiver> {
    if !c.live() || c.recv.is_void() {
        return None;
    }
    let h = head(&c.recv).ok()?;
    let bindings = match_type(value, &h, hierarchy);
    if bindings.is_failure() {
        return None;
    }
    if let Some(p) = &c.pred {
        match eval_predicate(p, &bindings, hierarchy) {
            Ok(true) => {}
            _ => return None,
        }
    }
    let rest = tail(&c.recv).ok()?;
    let new_recv = substitute(&rest, &bindings, hierarchy).ok()?;
    let new_yld = substitute(&c.yld, &bindings, hierarchy).ok()?;
    Some(FoundReceiver {
        index: i,
        new_recv,
        new_yld,
        checked_pred: c.pred.is_some(),
    })
}

fn group_name(members: &[NamedCoroutine]) -> String {
    let names: Vec<&str> = members.iter().map(|m| m.name.as_str()).collect();
    format!("({})", names.join(", "))
}

/// Converts a named type into a participant slot. Products of coroutines
/// become groups with numbered member names.
fn slot_from_named(nc: NamedCoroutine) -> Result<Slot, ComposeError> {
    let ty = normalize(&nc.ty);
    match ty {
        TypeExpr::Coroutine(r, y) => Ok(Slot::Single(CoSlot {
            name: nc.name,
            recv: *r,
            yld: *y,
            pred: None,
            activated: false,
            guarded: false,
            retired: false,
        })),
        TypeExpr::Constrained(base, pred) => match *base {
            TypeExpr::Coroutine(r, y) => Ok(Slot::Single(CoSlot {
                name: nc.name,
                recv: *r,
                yld: *y,
                pred: Some(pred),
                activated: false,
                guarded: false,
                retired: false,
            })),
            other => Err(ComposeError::NotACoroutine {
                name: nc.name,
                ty: TypeExpr::Constrained(Box::new(other), pred).to_string(),
            }),
        },
        TypeExpr::Product(items) if items.iter().all(|t| t.is_coroutine()) => {
            let members = items
                .into_iter()
                .enumerate()
                .map(|(k, t)| NamedCoroutine {
                    name: format!("{}#{}", nc.name, k + 1),
                    ty: t,
                })
                .collect();
            Ok(Slot::Group { members })
        }
        other => Err(ComposeError::NotACoroutine {
            name: nc.name,
            ty: other.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
