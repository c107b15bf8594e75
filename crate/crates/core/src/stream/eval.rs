use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use crate::model::Dim;

use super::ast::{BinOp, StreamExpr, UnOp};
use super::{EvaluationContext, StreamError, StreamValue};

type SResult<T> = Result<T, StreamError>;

/// Evaluations allowed per top-level query.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Nesting depth at which evaluation gives up instead of overflowing the stack.
pub const DEFAULT_DEPTH_LIMIT: usize = 200_000;

const EVAL_STACK_BYTES: usize = 512 << 20;

/// A validated set of stream equations. Immutable once built; [`extend`]
/// returns a new set.
///
/// [`extend`]: EquationSet::extend
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquationSet {
    equations: BTreeMap<String, Arc<StreamExpr>>,
}

/// Validates `equations`: names are unique and every reference resolves.
/// Recursive definitions are allowed.
pub fn define_streams(equations: Vec<(String, StreamExpr)>) -> SResult<EquationSet> {
    EquationSet::default().extend(equations)
}

impl EquationSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds equations. Existing names cannot be redefined, which keeps any
    /// warehouse filled from `self` valid for the result.
    pub fn extend(&self, equations: Vec<(String, StreamExpr)>) -> SResult<EquationSet> {
        let mut next = self.clone();
        for (name, expr) in equations {
            if next.equations.contains_key(&name) {
                return Err(StreamError::DuplicateName(name));
            }
            next.equations.insert(name, Arc::new(expr));
        }
        for (name, expr) in &next.equations {
            next.check_refs(name, expr)?;
        }
        Ok(next)
    }

    /// Checks that every name `expr` mentions is defined; `owner` is used
    /// in the error.
    pub fn check_refs(&self, owner: &str, expr: &StreamExpr) -> SResult<()> {
        let mut missing = None;
        expr.for_each_ref(&mut |r| {
            if missing.is_none() && !self.equations.contains_key(r) {
                missing = Some(r.to_string());
            }
        });
        match missing {
            Some(missing) => Err(StreamError::UnresolvedReference {
                name: owner.to_string(),
                missing,
            }),
            None => Ok(()),
        }
    }

    pub fn get(&self, name: &str) -> Option<&StreamExpr> {
        self.equations.get(name).map(|e| &**e)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.equations.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &StreamExpr)> {
        self.equations.iter().map(|(k, v)| (k.as_str(), &**v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DemandKey {
    /// A named stream at a context.
    Ref(String, EvaluationContext),
    /// A `wvr`/`upon` unfolding: the operator node, the context with its
    /// dimension cleared, and the positions reached in X and Y plus the
    /// tag still to be consumed.
    State {
        node: Arc<StreamExpr>,
        ctx: EvaluationContext,
        j: u64,
        k: u64,
        t: u64,
    },
}

/// Memo of demanded values. Insertion is atomic per key; two threads
/// computing the same key store the same value.
#[derive(Debug)]
pub struct Warehouse {
    store: Option<RwLock<HashMap<DemandKey, StreamValue>>>,
    computations: AtomicU64,
}

impl Default for Warehouse {
    fn default() -> Self {
        Self::new()
    }
}

impl Warehouse {
    pub fn new() -> Self {
        Warehouse {
            store: Some(RwLock::new(HashMap::new())),
            computations: AtomicU64::new(0),
        }
    }

    /// A warehouse that stores nothing, so every demand is recomputed.
    pub fn disabled() -> Self {
        Warehouse {
            store: None,
            computations: AtomicU64::new(0),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.store.is_some()
    }

    /// Number of cached entries.
    pub fn len(&self) -> usize {
        self.store
            .as_ref()
            .map_or(0, |s| s.read().unwrap_or_else(|e| e.into_inner()).len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of named-stream values computed rather than found.
    pub fn computations(&self) -> u64 {
        self.computations.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        if let Some(store) = &self.store {
            store.write().unwrap_or_else(|e| e.into_inner()).clear();
        }
    }

    /// The cached value of stream `name` at `ctx`, if any.
    pub fn lookup(&self, name: &str, ctx: &EvaluationContext) -> Option<StreamValue> {
        self.get(&DemandKey::Ref(name.to_string(), ctx.clone()))
    }

    fn get(&self, key: &DemandKey) -> Option<StreamValue> {
        let store = self.store.as_ref()?;
        store.read().unwrap_or_else(|e| e.into_inner()).get(key).copied()
    }

    fn put(&self, key: DemandKey, value: StreamValue) {
        if let Some(store) = &self.store {
            store
                .write()
                .unwrap_or_else(|e| e.into_inner())
                .entry(key)
                .or_insert(value);
        }
    }

    fn put_all(&self, keys: Vec<DemandKey>, value: StreamValue) {
        if let Some(store) = &self.store {
            let mut store = store.write().unwrap_or_else(|e| e.into_inner());
            for key in keys {
                store.entry(key).or_insert(value);
            }
        }
    }
}

/// A demand-driven evaluator. Every evaluation step counts against the
/// budget of the current query. Evaluation recurses on the calling thread;
/// [`eval`] and [`eval_prefix`] run it on a thread with a large stack.
pub struct Evaluator<'a> {
    eqs: &'a EquationSet,
    wh: &'a Warehouse,
    budget: u64,
    depth_limit: usize,
    spent: u64,
    total: u64,
    depth: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(eqs: &'a EquationSet, wh: &'a Warehouse, budget: u64) -> Self {
        Evaluator {
            eqs,
            wh,
            budget,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            spent: 0,
            total: 0,
            depth: 0,
        }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Self {
        self.depth_limit = limit;
        self
    }

    /// Evaluation steps taken over all queries so far.
    pub fn demands(&self) -> u64 {
        self.total
    }

    /// Evaluates `expr` at `ctx` as a fresh query with a full budget.
    pub fn query(&mut self, expr: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        self.spent = 0;
        self.depth = 0;
        self.eval(expr, ctx)
    }

    fn charge(&mut self) -> SResult<()> {
        if self.spent >= self.budget {
            return Err(StreamError::DemandExhausted { budget: self.budget });
        }
        self.spent += 1;
        self.total += 1;
        Ok(())
    }

    fn eval(&mut self, expr: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        self.charge()?;
        if self.depth >= self.depth_limit {
            return Err(StreamError::DepthExceeded {
                limit: self.depth_limit,
            });
        }
        self.depth += 1;
        let result = self.step(expr, ctx);
        self.depth -= 1;
        result
    }

    // Each arm lives in its own function so the recursive frames stay small.
    fn step(&mut self, expr: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        match expr {
            StreamExpr::Const(v) => Ok(*v),
            StreamExpr::List(values, d) => Ok(list_at(values, ctx.get(d))),
            StreamExpr::Ref(name) => self.reference(name, ctx),
            StreamExpr::Unary(op, x) => self.unary(*op, x, ctx),
            StreamExpr::Binary(op, x, y) => self.binary(*op, x, y, ctx),
            StreamExpr::If(c, a, b) => self.conditional(c, a, b, ctx),
            StreamExpr::First(d, x) => self.shifted(x, ctx, d, Some(0)),
            StreamExpr::Next(d, x) => self.shifted(x, ctx, d, ctx.get(d).checked_add(1)),
            StreamExpr::Prev(d, x) => match ctx.get(d) {
                0 => Ok(StreamValue::Nil),
                t => self.shifted(x, ctx, d, Some(t - 1)),
            },
            StreamExpr::Fby(d, x, y) => match ctx.get(d) {
                0 => self.eval(x, ctx),
                t => self.shifted(y, ctx, d, Some(t - 1)),
            },
            StreamExpr::Wvr(d, x, y) => self.whenever(Arc::new(expr.clone()), d, x, y, ctx, ctx.get(d)),
            StreamExpr::Asa(d, x, y) => {
                let node = Arc::new(StreamExpr::Wvr(d.clone(), x.clone(), y.clone()));
                self.whenever(node, d, x, y, ctx, 0)
            }
            StreamExpr::Upon(d, x, y) => self.upon(Arc::new(expr.clone()), d, x, y, ctx),
            StreamExpr::At(d, x, y) => self.navigate(d, x, y, ctx),
            StreamExpr::Query(d) => query(d, ctx),
        }
    }

    fn shifted(&mut self, x: &StreamExpr, ctx: &EvaluationContext, d: &Dim, t: Option<u64>) -> SResult<StreamValue> {
        let t = t.ok_or_else(|| StreamError::Overflow(format!("next.{d}")))?;
        self.eval(x, &ctx.with(d, t))
    }

    fn unary(&mut self, op: UnOp, x: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        let v = self.eval(x, ctx)?;
        unary(op, v)
    }

    fn binary(&mut self, op: BinOp, x: &StreamExpr, y: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        let a = self.eval(x, ctx)?;
        let b = self.eval(y, ctx)?;
        binary(op, a, b)
    }

    fn conditional(
        &mut self,
        c: &StreamExpr,
        a: &StreamExpr,
        b: &StreamExpr,
        ctx: &EvaluationContext,
    ) -> SResult<StreamValue> {
        match truth(self.eval(c, ctx)?) {
            None => Ok(StreamValue::Nil),
            Some(true) => self.eval(a, ctx),
            Some(false) => self.eval(b, ctx),
        }
    }

    fn navigate(&mut self, d: &Dim, x: &StreamExpr, y: &StreamExpr, ctx: &EvaluationContext) -> SResult<StreamValue> {
        match self.eval(y, ctx)? {
            StreamValue::Nil => Ok(StreamValue::Nil),
            StreamValue::Int(n) if n < 0 => Err(StreamError::NegativeTag(n)),
            StreamValue::Int(n) => self.eval(x, &ctx.with(d, n as u64)),
            other => Err(mismatch(&format!("@.{d}"), other)),
        }
    }

    fn reference(&mut self, name: &str, ctx: &EvaluationContext) -> SResult<StreamValue> {
        let key = DemandKey::Ref(name.to_string(), ctx.clone());
        if let Some(v) = self.wh.get(&key) {
            return Ok(v);
        }
        let eqs = self.eqs;
        let body = eqs.get(name).ok_or_else(|| StreamError::UnresolvedReference {
            name: "query".into(),
            missing: name.to_string(),
        })?;
        let v = self.eval(body, ctx)?;
        self.wh.computations.fetch_add(1, Ordering::Relaxed);
        self.wh.put(key, v);
        Ok(v)
    }

    /// Unfolds `X wvr Y` from state (k, t): X and Y are read at position k
    /// and t true values of Y remain to be skipped.
    fn whenever(
        &mut self,
        node: Arc<StreamExpr>,
        d: &Dim,
        x: &StreamExpr,
        y: &StreamExpr,
        ctx: &EvaluationContext,
        mut t: u64,
    ) -> SResult<StreamValue> {
        let base = ctx.with(d, 0);
        let mut visited = Vec::new();
        let mut k = 0u64;
        let result = loop {
            let key = DemandKey::State {
                node: node.clone(),
                ctx: base.clone(),
                j: 0,
                k,
                t,
            };
            if let Some(v) = self.wh.get(&key) {
                break v;
            }
            visited.push(key);
            self.charge()?;
            let here = base.with(d, k);
            match truth(self.eval(y, &here)?) {
                None => break StreamValue::Nil,
                Some(true) if t == 0 => break self.eval(x, &here)?,
                Some(true) => t -= 1,
                Some(false) => {}
            }
            k = k.checked_add(1).ok_or_else(|| StreamError::Overflow("wvr".into()))?;
        };
        self.wh.put_all(visited, result);
        Ok(result)
    }

    /// Unfolds `X upon Y` from state (j, k, t): X is read at j, Y at k,
    /// and t steps remain.
    fn upon(
        &mut self,
        node: Arc<StreamExpr>,
        d: &Dim,
        x: &StreamExpr,
        y: &StreamExpr,
        ctx: &EvaluationContext,
    ) -> SResult<StreamValue> {
        let base = ctx.with(d, 0);
        let mut visited = Vec::new();
        let (mut j, mut k, mut t) = (0u64, 0u64, ctx.get(d));
        let result = loop {
            let key = DemandKey::State {
                node: node.clone(),
                ctx: base.clone(),
                j,
                k,
                t,
            };
            if let Some(v) = self.wh.get(&key) {
                break v;
            }
            visited.push(key);
            self.charge()?;
            if t == 0 {
                break self.eval(x, &base.with(d, j))?;
            }
            match truth(self.eval(y, &base.with(d, k))?) {
                None => break StreamValue::Nil,
                Some(true) => j += 1,
                Some(false) => {}
            }
            k += 1;
            t -= 1;
        };
        self.wh.put_all(visited, result);
        Ok(result)
    }
}

fn list_at(values: &[StreamValue], t: u64) -> StreamValue {
    usize::try_from(t)
        .ok()
        .and_then(|i| values.get(i).copied())
        .unwrap_or(StreamValue::Nil)
}

fn query(d: &Dim, ctx: &EvaluationContext) -> SResult<StreamValue> {
    i64::try_from(ctx.get(d))
        .map(StreamValue::Int)
        .map_err(|_| StreamError::Overflow(format!("#.{d}")))
}

/// Reads a guard: `None` for nil, integers are true when nonzero.
fn truth(v: StreamValue) -> Option<bool> {
    match v {
        StreamValue::Bool(b) => Some(b),
        StreamValue::Int(n) => Some(n != 0),
        StreamValue::Nil => None,
    }
}

fn mismatch(op: &str, v: StreamValue) -> StreamError {
    StreamError::TypeMismatch {
        op: op.to_string(),
        found: v.type_name().to_string(),
    }
}

fn unary(op: UnOp, v: StreamValue) -> SResult<StreamValue> {
    match (op, v) {
        (_, StreamValue::Nil) => Ok(StreamValue::Nil),
        (UnOp::Neg, StreamValue::Int(n)) => n
            .checked_neg()
            .map(StreamValue::Int)
            .ok_or_else(|| StreamError::Overflow("-".into())),
        (UnOp::Not, StreamValue::Bool(b)) => Ok(StreamValue::Bool(!b)),
        (UnOp::Neg, v) => Err(mismatch("-", v)),
        (UnOp::Not, v) => Err(mismatch("not", v)),
    }
}

fn binary(op: BinOp, a: StreamValue, b: StreamValue) -> SResult<StreamValue> {
    use StreamValue::{Bool, Int, Nil};
    let sym = op.symbol();
    let overflow = || StreamError::Overflow(sym.to_string());
    match (a, b) {
        (Nil, _) | (_, Nil) => Ok(Nil),
        (Int(x), Int(y)) => Ok(match op {
            BinOp::Add => Int(x.checked_add(y).ok_or_else(overflow)?),
            BinOp::Sub => Int(x.checked_sub(y).ok_or_else(overflow)?),
            BinOp::Mul => Int(x.checked_mul(y).ok_or_else(overflow)?),
            BinOp::Div | BinOp::Rem if y == 0 => return Err(StreamError::DivisionByZero),
            BinOp::Div => Int(x.checked_div(y).ok_or_else(overflow)?),
            BinOp::Rem => Int(x.checked_rem(y).ok_or_else(overflow)?),
            BinOp::Eq => Bool(x == y),
            BinOp::Ne => Bool(x != y),
            BinOp::Lt => Bool(x < y),
            BinOp::Le => Bool(x <= y),
            BinOp::Gt => Bool(x > y),
            BinOp::Ge => Bool(x >= y),
            BinOp::And | BinOp::Or => return Err(mismatch(sym, a)),
        }),
        (Bool(x), Bool(y)) => Ok(match op {
            BinOp::And => Bool(x && y),
            BinOp::Or => Bool(x || y),
            BinOp::Eq => Bool(x == y),
            BinOp::Ne => Bool(x != y),
            _ => return Err(mismatch(sym, a)),
        }),
        (Int(_), other) | (other, Int(_)) => Err(mismatch(sym, other)),
    }
}

fn on_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        let handle = std::thread::Builder::new()
            .name("eduction".into())
            .stack_size(EVAL_STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("failed to spawn evaluation thread");
        match handle.join() {
            Ok(v) => v,
            Err(panic) => std::panic::resume_unwind(panic),
        }
    })
}

/// Demands the value of `expr` at `ctx`.
pub fn eval(
    expr: &StreamExpr,
    ctx: &EvaluationContext,
    eqs: &EquationSet,
    wh: &Warehouse,
    budget: u64,
) -> SResult<StreamValue> {
    eqs.check_refs("query", expr)?;
    on_big_stack(|| Evaluator::new(eqs, wh, budget).query(expr, ctx))
}

/// Values of `expr` at tags `0..count` of `dim`, all other dimensions at
/// 0. Each position is a separate query with its own budget.
pub fn eval_prefix(
    expr: &StreamExpr,
    dim: &Dim,
    count: u64,
    eqs: &EquationSet,
    wh: &Warehouse,
    budget: u64,
) -> SResult<Vec<StreamValue>> {
    eqs.check_refs("query", expr)?;
    on_big_stack(|| {
        let mut ev = Evaluator::new(eqs, wh, budget);
        (0..count)
            .map(|t| ev.query(expr, &EvaluationContext::new().with(dim, t)))
            .collect()
    })
}
