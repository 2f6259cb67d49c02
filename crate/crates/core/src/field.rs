//! Scalar coefficient fields as shared expression graphs over chart coordinates.
//!
//! A [`Field`] is an immutable DAG node; evaluation takes seeded coordinate
//! jets and propagates exact derivatives through the graph. Shared subtrees
//! are evaluated once per call via a memo table, so assembled geometric
//! expressions (frames, connections, curvature components) stay cheap to
//! sample on grids.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::jet::Jet;

type Analytic = Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>;

enum Op {
    Const(f64),
    Coord(usize),
    Add(Field, Field),
    Sub(Field, Field),
    Mul(Field, Field),
    Neg(Field),
    Scale(f64, Field),
    Sin(Field),
    Cos(Field),
    Exp(Field),
    Sqrt(Field),
    Recip(Field),
    Partial(Field, usize),
    /// Evaluate `outer` on the jets produced by the `inner` fields
    /// (composition with a chart map; the chain rule is automatic).
    Compose(Vec<Field>, Field),
    /// Univariate analytic map given by value and three derivatives.
    Apply(Analytic, Field),
}

/// A scalar field over chart coordinates, evaluable with jets.
#[derive(Clone)]
pub struct Field(Arc<Op>);

/// Per-evaluation memo context. Every memoized node is kept alive for the
/// lifetime of the context, so heap addresses cannot be reused as keys by
/// nodes created later against the same context.
pub struct EvalCtx<'a> {
    jets: &'a [Jet],
    memo: HashMap<usize, (Rc<Jet>, Field)>,
}

impl<'a> EvalCtx<'a> {
    pub fn new(jets: &'a [Jet]) -> Self {
        EvalCtx {
            jets,
            memo: HashMap::new(),
        }
    }
}

impl Field {
    fn new(op: Op) -> Field {
        Field(Arc::new(op))
    }

    pub fn constant(c: f64) -> Field {
        Field::new(Op::Const(c))
    }

    pub fn zero() -> Field {
        Field::constant(0.0)
    }

    pub fn one() -> Field {
        Field::constant(1.0)
    }

    pub fn coord(i: usize) -> Field {
        Field::new(Op::Coord(i))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Op::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn add(&self, o: &Field) -> Field {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Field::constant(a + b),
            (Some(0.0), _) => o.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Field::new(Op::Add(self.clone(), o.clone())),
        }
    }

    pub fn sub(&self, o: &Field) -> Field {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Field::constant(a - b),
            (_, Some(0.0)) => self.clone(),
            (Some(0.0), _) => o.neg(),
            _ => Field::new(Op::Sub(self.clone(), o.clone())),
        }
    }

    pub fn mul(&self, o: &Field) -> Field {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Field::constant(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => Field::zero(),
            (Some(1.0), _) => o.clone(),
            (_, Some(1.0)) => self.clone(),
            (Some(a), _) => Field::new(Op::Scale(a, o.clone())),
            (_, Some(b)) => Field::new(Op::Scale(b, self.clone())),
            _ => Field::new(Op::Mul(self.clone(), o.clone())),
        }
    }

    pub fn neg(&self) -> Field {
        match self.as_const() {
            Some(c) => Field::constant(-c),
            None => Field::new(Op::Neg(self.clone())),
        }
    }

    pub fn scale(&self, s: f64) -> Field {
        match self.as_const() {
            Some(c) => Field::constant(c * s),
            None if s == 0.0 => Field::zero(),
            None if s == 1.0 => self.clone(),
            None => Field::new(Op::Scale(s, self.clone())),
        }
    }

    pub fn sin(&self) -> Field {
        Field::new(Op::Sin(self.clone()))
    }

    pub fn cos(&self) -> Field {
        Field::new(Op::Cos(self.clone()))
    }

    pub fn exp(&self) -> Field {
        Field::new(Op::Exp(self.clone()))
    }

    pub fn sqrt(&self) -> Field {
        Field::new(Op::Sqrt(self.clone()))
    }

    pub fn recip(&self) -> Field {
        Field::new(Op::Recip(self.clone()))
    }

    pub fn div(&self, o: &Field) -> Field {
        self.mul(&o.recip())
    }

    /// Coordinate partial derivative as a field (one jet order consumed).
    pub fn partial(&self, d: usize) -> Field {
        match *self.0 {
            Op::Const(_) => Field::zero(),
            Op::Coord(i) => Field::constant(if i == d { 1.0 } else { 0.0 }),
            _ => Field::new(Op::Partial(self.clone(), d)),
        }
    }

    /// Composition with a chart map: the result evaluates `self` on the jets
    /// of `map` (components of the target coordinates as fields over the
    /// source chart).
    pub fn compose(&self, map: &[Field]) -> Field {
        match self.as_const() {
            Some(c) => Field::constant(c),
            None => Field::new(Op::Compose(map.to_vec(), self.clone())),
        }
    }

    /// Univariate analytic map with explicit derivatives (value, d1, d2, d3).
    pub fn apply_analytic(
        &self,
        f: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
    ) -> Field {
        Field::new(Op::Apply(Arc::new(f), self.clone()))
    }

    /// Balanced sum; keeps the DAG shallow and fixes the reduction order.
    pub fn sum(mut terms: Vec<Field>) -> Field {
        terms.retain(|t| t.as_const() != Some(0.0));
        if terms.is_empty() {
            return Field::zero();
        }
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len() / 2 + 1);
            for chunk in terms.chunks(2) {
                if chunk.len() == 2 {
                    next.push(chunk[0].add(&chunk[1]));
                } else {
                    next.push(chunk[0].clone());
                }
            }
            terms = next;
        }
        terms.pop().unwrap()
    }

    pub fn eval(&self, ctx: &mut EvalCtx) -> Rc<Jet> {
        let key = Arc::as_ptr(&self.0) as usize;
        if let Some((j, _)) = ctx.memo.get(&key) {
            return Rc::clone(j);
        }
        let n = ctx.jets[0].n;
        let ord = ctx.jets[0].ord;
        let out: Jet = match &*self.0 {
            Op::Const(c) => Jet::constant(n, ord, *c),
            Op::Coord(i) => ctx.jets[*i].clone(),
            Op::Add(a, b) => a.eval(ctx).add(&b.eval(ctx)),
            Op::Sub(a, b) => a.eval(ctx).sub(&b.eval(ctx)),
            Op::Mul(a, b) => a.eval(ctx).mul(&b.eval(ctx)),
            Op::Neg(a) => a.eval(ctx).neg(),
            Op::Scale(s, a) => a.eval(ctx).scale(*s),
            Op::Sin(a) => a.eval(ctx).sin(),
            Op::Cos(a) => a.eval(ctx).cos(),
            Op::Exp(a) => a.eval(ctx).exp(),
            Op::Sqrt(a) => a.eval(ctx).sqrt(),
            Op::Recip(a) => a.eval(ctx).recip(),
            Op::Partial(a, d) => a.eval(ctx).partial(*d),
            Op::Compose(map, outer) => {
                // evaluate the outer field against fresh target seeds at the
                // mapped point, then chain-compose; evaluating outer directly
                // on the inner jets would turn target partials into source
                // partials
                let inner: Vec<Jet> = map.iter().map(|f| (*f.eval(ctx)).clone()).collect();
                let point: Vec<f64> = inner.iter().map(|j| j.v).collect();
                let seeds = Jet::seed(&point, ord);
                let mut sub = EvalCtx::new(&seeds);
                let outer_jet = outer.eval(&mut sub);
                Jet::compose(&outer_jet, &inner)
            }
            Op::Apply(f, a) => {
                let j = a.eval(ctx);
                j.chain(f(j.v))
            }
        };
        let rc = Rc::new(out);
        ctx.memo.insert(key, (Rc::clone(&rc), self.clone()));
        rc
    }

    /// Evaluate at a point with fresh seeds of the given order.
    pub fn eval_at(&self, point: &[f64], ord: usize) -> Jet {
        let jets = Jet::seed(point, ord);
        let mut ctx = EvalCtx::new(&jets);
        (*self.eval(&mut ctx)).clone()
    }

    /// Plain value at a point.
    pub fn value(&self, point: &[f64]) -> f64 {
        self.eval_at(point, 0).v
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &*self.0 {
            Op::Const(c) => write!(f, "{c}"),
            Op::Coord(i) => write!(f, "z{i}"),
            _ => write!(f, "<field>"),
        }
    }
}

/// Evaluate a batch of fields at one point, sharing the memo table.
pub fn eval_many(fields: &[&Field], point: &[f64], ord: usize) -> Vec<Jet> {
    let jets = Jet::seed(point, ord);
    let mut ctx = EvalCtx::new(&jets);
    fields.iter().map(|f| (*f.eval(&mut ctx)).clone()).collect()
}
