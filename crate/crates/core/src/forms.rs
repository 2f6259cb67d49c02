//! Alternating forms: pointwise values and coefficient fields.
//!
//! Forms are stored sparsely over strictly increasing index tuples with a
//! canonical sign normalization on construction. [`FormValue`] holds numeric
//! coefficients at a point; [`FormField`] holds [`Field`] coefficients over a
//! chart and supports the exterior derivative, interior product, pullback and
//! Lie derivative.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::field::{EvalCtx, Field};

pub type Tuple = Vec<u8>;

/// Which basis the index tuples refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Coordinate,
    Frame,
}

/// Sign of the permutation sorting `idx`; `None` when an index repeats.
pub fn sort_sign(idx: &[u8]) -> Option<(Tuple, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

/// Merge two strictly increasing tuples, counting the interleaving sign.
pub fn merge_sign(a: &[u8], b: &[u8]) -> Option<(Tuple, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            // b[j] jumps over the remaining entries of a
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// A degree-`p` alternating form at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub dim: usize,
    pub degree: usize,
    pub basis: Basis,
    pub terms: BTreeMap<Tuple, f64>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize, basis: Basis) -> Self {
        FormValue {
            dim,
            degree,
            basis,
            terms: BTreeMap::new(),
        }
    }

    /// Basis monomial `c * dz^{idx}` with canonical reordering.
    pub fn monomial(dim: usize, basis: Basis, idx: &[u8], c: f64) -> Self {
        let mut f = FormValue::zero(dim, idx.len(), basis);
        f.insert(idx, c);
        f
    }

    pub fn one_form(dim: usize, basis: Basis, comps: &[f64]) -> Self {
        let mut f = FormValue::zero(dim, 1, basis);
        for (i, &c) in comps.iter().enumerate() {
            f.insert(&[i as u8], c);
        }
        f
    }

    pub fn insert(&mut self, idx: &[u8], c: f64) {
        assert_eq!(idx.len(), self.degree);
        if c == 0.0 {
            return;
        }
        if let Some((t, s)) = sort_sign(idx) {
            let e = self.terms.entry(t).or_insert(0.0);
            *e += s * c;
            if *e == 0.0 {
                self.terms.remove(&sort_sign(idx).unwrap().0);
            }
        }
    }

    pub fn coeff(&self, idx: &[u8]) -> f64 {
        match sort_sign(idx) {
            Some((t, s)) => s * self.terms.get(&t).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    pub fn add(&self, o: &FormValue) -> FormValue {
        assert_eq!(self.degree, o.degree);
        let mut r = self.clone();
        for (t, &c) in &o.terms {
            let e = r.terms.entry(t.clone()).or_insert(0.0);
            *e += c;
            if *e == 0.0 {
                r.terms.remove(t);
            }
        }
        r
    }

    pub fn sub(&self, o: &FormValue) -> FormValue {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> FormValue {
        let mut r = self.clone();
        if s == 0.0 {
            r.terms.clear();
            return r;
        }
        for c in r.terms.values_mut() {
            *c *= s;
        }
        r
    }

    pub fn wedge(&self, o: &FormValue) -> Result<FormValue, Error> {
        if self.basis != o.basis {
            return Err(Error::input("wedge of forms over different bases"));
        }
        let mut r = FormValue::zero(self.dim, self.degree + o.degree, self.basis);
        if r.degree > self.dim {
            return Ok(r);
        }
        for (ta, &ca) in &self.terms {
            for (tb, &cb) in &o.terms {
                if let Some((t, s)) = merge_sign(ta, tb) {
                    let e = r.terms.entry(t.clone()).or_insert(0.0);
                    *e += s * ca * cb;
                    if *e == 0.0 {
                        r.terms.remove(&t);
                    }
                }
            }
        }
        Ok(r)
    }

    /// Evaluate on `degree` vectors.
    pub fn apply(&self, vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let p = self.degree;
        let mut total = 0.0;
        for (t, &c) in &self.terms {
            // determinant of the p x p minor
            let det = match p {
                0 => 1.0,
                1 => vectors[0][t[0] as usize],
                2 => {
                    let (a, b) = (t[0] as usize, t[1] as usize);
                    vectors[0][a] * vectors[1][b] - vectors[0][b] * vectors[1][a]
                }
                _ => {
                    let mut m: Vec<Vec<f64>> = (0..p)
                        .map(|r| t.iter().map(|&c| vectors[r][c as usize]).collect())
                        .collect();
                    det_in_place(&mut m)
                }
            };
            total += c * det;
        }
        total
    }

    /// Interior product with a vector.
    pub fn interior(&self, v: &[f64]) -> FormValue {
        let mut r = FormValue::zero(self.dim, self.degree.saturating_sub(1), self.basis);
        if self.degree == 0 {
            return r;
        }
        for (t, &c) in &self.terms {
            for (pos, &i) in t.iter().enumerate() {
                let vi = v[i as usize];
                if vi != 0.0 {
                    let mut rest = t.clone();
                    rest.remove(pos);
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    let e = r.terms.entry(rest.clone()).or_insert(0.0);
                    *e += sign * vi * c;
                    if *e == 0.0 {
                        r.terms.remove(&rest);
                    }
                }
            }
        }
        r
    }

    /// Linear substitution of basis one-forms: basis form `i` is replaced by
    /// `rows[i]`. Used for coordinate/frame conversions.
    pub fn substitute(&self, rows: &[FormValue], out_basis: Basis) -> FormValue {
        let out_dim = rows[0].dim;
        let mut r = FormValue::zero(out_dim, self.degree, out_basis);
        for (t, &c) in &self.terms {
            let mut w = FormValue::monomial(out_dim, out_basis, &[], c);
            for &i in t {
                let mut leg = rows[i as usize].clone();
                leg.basis = out_basis;
                w = w.wedge(&leg).expect("substitution wedge");
            }
            r = r.add(&w);
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn det_in_place(m: &mut [Vec<f64>]) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    det
}

/// Ascending complement of `leading` in `0..n` plus the Levi-Civita sign of
/// the permutation `(leading..., complement...)`; `None` on repeats.
pub fn epsilon_complement(n: usize, leading: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut present = vec![false; n];
    for &i in leading {
        if present[i] {
            return None;
        }
        present[i] = true;
    }
    let complement: Vec<usize> = (0..n).filter(|&i| !present[i]).collect();
    let mut perm: Vec<usize> = leading.to_vec();
    perm.extend_from_slice(&complement);
    let mut sign = 1.0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    Some((complement, sign))
}

/// A form-valued field over a chart, coefficients in a fixed basis.
#[derive(Debug, Clone)]
pub struct FormField {
    pub dim: usize,
    pub degree: usize,
    pub comps: BTreeMap<Tuple, Field>,
}

impl FormField {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormField {
            dim,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, f: Field) -> Self {
        let mut ff = FormField::zero(dim, 0);
        ff.insert(&[], f);
        ff
    }

    pub fn one_form(dim: usize, comps: Vec<Field>) -> Self {
        let mut ff = FormField::zero(dim, 1);
        for (i, f) in comps.into_iter().enumerate() {
            ff.insert(&[i as u8], f);
        }
        ff
    }

    pub fn basis_one_form(dim: usize, i: usize) -> Self {
        let mut ff = FormField::zero(dim, 1);
        ff.insert(&[i as u8], Field::one());
        ff
    }

    pub fn insert(&mut self, idx: &[u8], f: Field) {
        assert_eq!(idx.len(), self.degree);
        if f.as_const() == Some(0.0) {
            return;
        }
        if let Some((t, s)) = sort_sign(idx) {
            let g = if s < 0.0 { f.neg() } else { f };
            match self.comps.remove(&t) {
                Some(prev) => {
                    let sum = prev.add(&g);
                    if sum.as_const() != Some(0.0) {
                        self.comps.insert(t, sum);
                    }
                }
                None => {
                    self.comps.insert(t, g);
                }
            }
        }
    }

    pub fn coeff(&self, idx: &[u8]) -> Field {
        match sort_sign(idx) {
            Some((t, s)) => match self.comps.get(&t) {
                Some(f) => {
                    if s < 0.0 {
                        f.neg()
                    } else {
                        f.clone()
                    }
                }
                None => Field::zero(),
            },
            None => Field::zero(),
        }
    }

    pub fn add(&self, o: &FormField) -> FormField {
        assert_eq!(self.degree, o.degree);
        let mut r = self.clone();
        for (t, f) in &o.comps {
            match r.comps.remove(t) {
                Some(prev) => {
                    let sum = prev.add(f);
                    if sum.as_const() != Some(0.0) {
                        r.comps.insert(t.clone(), sum);
                    }
                }
                None => {
                    r.comps.insert(t.clone(), f.clone());
                }
            }
        }
        r
    }

    pub fn sub(&self, o: &FormField) -> FormField {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> FormField {
        let mut r = self.clone();
        for f in r.comps.values_mut() {
            *f = f.neg();
        }
        r
    }

    pub fn scale(&self, s: f64) -> FormField {
        let mut r = self.clone();
        for f in r.comps.values_mut() {
            *f = f.scale(s);
        }
        if s == 0.0 {
            r.comps.clear();
        }
        r
    }

    pub fn mul_field(&self, g: &Field) -> FormField {
        let mut r = FormField::zero(self.dim, self.degree);
        for (t, f) in &self.comps {
            r.insert(t, f.mul(g));
        }
        r
    }

    pub fn wedge(&self, o: &FormField) -> FormField {
        let mut acc: BTreeMap<Tuple, Vec<Field>> = BTreeMap::new();
        for (ta, fa) in &self.comps {
            for (tb, fb) in &o.comps {
                if let Some((t, s)) = merge_sign(ta, tb) {
                    let prod = fa.mul(fb);
                    let signed = if s < 0.0 { prod.neg() } else { prod };
                    acc.entry(t).or_default().push(signed);
                }
            }
        }
        let mut r = FormField::zero(self.dim, self.degree + o.degree);
        for (t, fs) in acc {
            let sum = Field::sum(fs);
            if sum.as_const() != Some(0.0) {
                r.comps.insert(t, sum);
            }
        }
        r
    }

    /// Coordinate-basis exterior derivative.
    pub fn ext_d(&self) -> FormField {
        let mut acc: BTreeMap<Tuple, Vec<Field>> = BTreeMap::new();
        for (t, f) in &self.comps {
            for mu in 0..self.dim {
                let df = f.partial(mu);
                if df.as_const() == Some(0.0) {
                    continue;
                }
                if let Some((tt, s)) = merge_sign(&[mu as u8], t) {
                    let signed = if s < 0.0 { df.neg() } else { df };
                    acc.entry(tt).or_default().push(signed);
                }
            }
        }
        let mut r = FormField::zero(self.dim, self.degree + 1);
        for (t, fs) in acc {
            let sum = Field::sum(fs);
            if sum.as_const() != Some(0.0) {
                r.comps.insert(t, sum);
            }
        }
        r
    }

    /// Interior product with a vector field.
    pub fn interior(&self, v: &[Field]) -> FormField {
        let mut acc: BTreeMap<Tuple, Vec<Field>> = BTreeMap::new();
        for (t, f) in &self.comps {
            for (pos, &i) in t.iter().enumerate() {
                let vi = &v[i as usize];
                if vi.as_const() == Some(0.0) {
                    continue;
                }
                let mut rest = t.clone();
                rest.remove(pos);
                let prod = f.mul(vi);
                let signed = if pos % 2 == 0 { prod } else { prod.neg() };
                acc.entry(rest).or_default().push(signed);
            }
        }
        let mut r = FormField::zero(self.dim, self.degree.saturating_sub(1));
        for (t, fs) in acc {
            let sum = Field::sum(fs);
            if sum.as_const() != Some(0.0) {
                r.comps.insert(t, sum);
            }
        }
        r
    }

    /// Cartan formula `L_X = d i_X + i_X d` (for functions only the second
    /// term applies).
    pub fn lie_derivative(&self, v: &[Field]) -> FormField {
        let ixd = self.ext_d().interior(v);
        if self.degree == 0 {
            return ixd;
        }
        self.interior(v).ext_d().add(&ixd)
    }

    /// Pullback along the chart map `map` (components of the target
    /// coordinates as fields over the source chart). `source_dim` is the
    /// dimension of the source chart.
    pub fn pullback(&self, map: &[Field], source_dim: usize) -> FormField {
        assert_eq!(map.len(), self.dim);
        // differentials of the map components as source one-forms
        let dmap: Vec<FormField> = map
            .iter()
            .map(|t| {
                FormField::one_form(
                    source_dim,
                    (0..source_dim).map(|s| t.partial(s)).collect(),
                )
            })
            .collect();
        let mut r = FormField::zero(source_dim, self.degree);
        for (t, f) in &self.comps {
            let mut w = FormField::scalar(source_dim, f.compose(map));
            for &i in t {
                w = w.wedge(&dmap[i as usize]);
            }
            r = r.add(&w);
        }
        r
    }

    /// Evaluate all coefficients at a point (shared memo per call).
    pub fn eval(&self, ctx: &mut EvalCtx, basis: Basis) -> FormValue {
        let mut v = FormValue::zero(self.dim, self.degree, basis);
        for (t, f) in &self.comps {
            let c = f.eval(ctx).v;
            if c != 0.0 {
                v.terms.insert(t.clone(), c);
            }
        }
        v
    }

    pub fn eval_at(&self, point: &[f64], ord: usize, basis: Basis) -> FormValue {
        let jets = crate::jet::Jet::seed(point, ord);
        let mut ctx = EvalCtx::new(&jets);
        self.eval(&mut ctx, basis)
    }

    pub fn max_abs_at(&self, point: &[f64], ord: usize) -> f64 {
        self.eval_at(point, ord, Basis::Coordinate).max_abs()
    }
}

/// Commutator of two vector fields in coordinates.
pub fn vector_bracket(x: &[Field], y: &[Field]) -> Vec<Field> {
    let n = x.len();
    (0..n)
        .map(|mu| {
            let mut terms = Vec::new();
            for nu in 0..n {
                terms.push(x[nu].mul(&y[mu].partial(nu)));
                terms.push(y[nu].mul(&x[mu].partial(nu)).neg());
            }
            Field::sum(terms)
        })
        .collect()
}
