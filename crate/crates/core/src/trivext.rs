//! The algebra `A = F_p ⋉ F_p^n`, its ideals, and finite-dimensional modules.
//!
//! A module of dimension `d` is stored as `n` matrices `T_i` (the action of the
//! basis vectors of `V`), acting on column vectors. Because `V` squares to zero
//! every module satisfies `T_i T_j = 0`, which every constructor enforces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, FpMatrix, Subspace, DEFAULT_ENUMERATION_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Algebra {
    field: Field,
    n: usize,
}

/// An element `(a, v)` of the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AElem {
    pub a: u32,
    pub v: Vec<u32>,
}

impl Algebra {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        Ok(Algebra { field: Field::new(p)?, n })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elem(&self, a: u32, v: Vec<u32>) -> Result<AElem> {
        if v.len() != self.n {
            return Err(Error::Dimension(format!("vector of length {} in V of dim {}", v.len(), self.n)));
        }
        self.field.check_vector(&v)?;
        self.field.check_vector(&[a])?;
        Ok(AElem { a, v })
    }

    pub fn one(&self) -> AElem {
        AElem { a: 1, v: vec![0; self.n] }
    }

    /// `(a,v)(b,w) = (ab, bv + aw)`.
    pub fn mul(&self, x: &AElem, y: &AElem) -> AElem {
        let f = self.field;
        let v = x
            .v
            .iter()
            .zip(&y.v)
            .map(|(&vi, &wi)| f.add(f.mul(y.a, vi), f.mul(x.a, wi)))
            .collect();
        AElem { a: f.mul(x.a, y.a), v }
    }

    pub fn is_unit(&self, x: &AElem) -> bool {
        x.a != 0
    }

    /// The radical `J = 0 ⊕ V`, which is also the socle of `A`.
    pub fn radical(&self) -> Ideal {
        Ideal::soc_sub(Subspace::full(self.field, self.n))
    }
}

/// An ideal of `A`: zero, the whole ring, or `0 ⊕ W` for a subspace `W ⊆ V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ideal {
    Zero,
    Whole,
    SocSub(Subspace),
}

impl Ideal {
    /// `0 ⊕ W`, normalising `W = 0` to the zero ideal.
    pub fn soc_sub(w: Subspace) -> Ideal {
        if w.is_zero() {
            Ideal::Zero
        } else {
            Ideal::SocSub(w)
        }
    }

    pub fn contains(&self, x: &AElem) -> bool {
        match self {
            Ideal::Zero => x.a == 0 && x.v.iter().all(|&c| c == 0),
            Ideal::Whole => true,
            Ideal::SocSub(w) => x.a == 0 && w.contains(&x.v),
        }
    }

    fn check(&self, alg: &Algebra) -> Result<()> {
        if let Ideal::SocSub(w) = self {
            if w.p() != alg.p() {
                return Err(Error::FieldMismatch { left: w.p(), right: alg.p() });
            }
            if w.ambient() != alg.n() {
                return Err(Error::Dimension(format!("ideal in V of dim {} for n = {}", w.ambient(), alg.n())));
            }
        }
        Ok(())
    }
}

/// A finite-dimensional module over `F_p ⋉ F_p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AModule {
    alg: Algebra,
    d: usize,
    actions: Vec<FpMatrix>,
    generator_marks: Vec<usize>,
}

/// A subspace of a module known to be closed under the action.
#[derive(Clone, Debug)]
pub struct Submodule<'m> {
    parent: &'m AModule,
    space: Subspace,
}

impl<'m> Submodule<'m> {
    pub fn parent(&self) -> &'m AModule {
        self.parent
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn into_space(self) -> Subspace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Result of a quotient: the module and the projection `d' x d`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: AModule,
    pub projection: FpMatrix,
}

impl AModule {
    pub fn new(alg: Algebra, d: usize, actions: Vec<FpMatrix>, generator_marks: Vec<usize>) -> Result<Self> {
        if actions.len() != alg.n() {
            return Err(Error::InvalidModule(format!("{} action matrices for n = {}", actions.len(), alg.n())));
        }
        for (i, t) in actions.iter().enumerate() {
            if t.p() != alg.p() {
                return Err(Error::FieldMismatch { left: t.p(), right: alg.p() });
            }
            if t.rows() != d || t.cols() != d {
                return Err(Error::InvalidModule(format!("T_{} is {}x{}, expected {}x{}", i, t.rows(), t.cols(), d, d)));
            }
        }
        for i in 0..actions.len() {
            for j in 0..actions.len() {
                if !actions[i].mul(&actions[j]).is_zero() {
                    return Err(Error::InvalidModule(format!("T_{} T_{} != 0", i, j)));
                }
            }
        }
        if let Some(&m) = generator_marks.iter().find(|&&m| m >= d) {
            return Err(Error::InvalidModule(format!("generator mark {} out of range for d = {}", m, d)));
        }
        Ok(AModule { alg, d, actions, generator_marks })
    }

    /// `k^d` with zero action.
    pub fn semisimple(alg: Algebra, d: usize) -> Self {
        let actions = vec![FpMatrix::zeros(alg.field(), d, d); alg.n()];
        AModule { alg, d, actions, generator_marks: Vec::new() }
    }

    pub fn zero(alg: Algebra) -> Self {
        Self::semisimple(alg, 0)
    }

    /// `A^r`; each block is laid out as `[unit, e_1, ..., e_n]`.
    pub fn free(alg: Algebra, r: usize) -> Self {
        let n = alg.n();
        let d = r * (n + 1);
        let mut actions = vec![FpMatrix::zeros(alg.field(), d, d); n];
        for block in 0..r {
            let unit = block * (n + 1);
            for (i, t) in actions.iter_mut().enumerate() {
                t.set(unit + 1 + i, unit, 1);
            }
        }
        let generator_marks = (0..r).map(|b| b * (n + 1)).collect();
        AModule { alg, d, actions, generator_marks }
    }

    /// Module with `g` generator coordinates followed by `socle_dim` socle
    /// coordinates, where `v·α = L_α v`.
    pub fn presentation(alg: Algebra, g: usize, socle_dim: usize, maps: &[FpMatrix]) -> Result<Self> {
        let n = alg.n();
        if maps.len() != g {
            return Err(Error::Dimension(format!("{} maps for {} generators", maps.len(), g)));
        }
        for (a, l) in maps.iter().enumerate() {
            if l.p() != alg.p() {
                return Err(Error::FieldMismatch { left: l.p(), right: alg.p() });
            }
            if l.rows() != socle_dim || l.cols() != n {
                return Err(Error::Dimension(format!(
                    "L_{} is {}x{}, expected {}x{}",
                    a,
                    l.rows(),
                    l.cols(),
                    socle_dim,
                    n
                )));
            }
        }
        let d = g + socle_dim;
        let mut actions = vec![FpMatrix::zeros(alg.field(), d, d); n];
        for (a, l) in maps.iter().enumerate() {
            for (i, t) in actions.iter_mut().enumerate() {
                for k in 0..socle_dim {
                    t.set(g + k, a, l.get(k, i));
                }
            }
        }
        Ok(AModule { alg, d, actions, generator_marks: (0..g).collect() })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn p(&self) -> u32 {
        self.alg.p()
    }

    pub fn n(&self) -> usize {
        self.alg.n()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn actions(&self) -> &[FpMatrix] {
        &self.actions
    }

    pub fn generator_marks(&self) -> &[usize] {
        &self.generator_marks
    }

    pub fn with_generator_marks(mut self, marks: Vec<usize>) -> Result<Self> {
        if let Some(&m) = marks.iter().find(|&&m| m >= self.d) {
            return Err(Error::InvalidModule(format!("generator mark {} out of range", m)));
        }
        self.generator_marks = marks;
        Ok(self)
    }

    /// Unit vectors at the generator marks.
    pub fn generators(&self) -> Vec<Vec<u32>> {
        self.generator_marks.iter().map(|&m| self.unit(m)).collect()
    }

    pub fn unit(&self, k: usize) -> Vec<u32> {
        let mut e = vec![0; self.d];
        e[k] = 1;
        e
    }

    pub fn full(&self) -> Subspace {
        Subspace::full(self.field(), self.d)
    }

    pub fn zero_space(&self) -> Subspace {
        Subspace::zero(self.field(), self.d)
    }

    /// `T_w = Σ w_i T_i`, the action of `(0, w)`.
    pub fn t_w(&self, w: &[u32]) -> FpMatrix {
        assert_eq!(w.len(), self.n(), "vector of V");
        let mut m = FpMatrix::zeros(self.field(), self.d, self.d);
        for (&c, t) in w.iter().zip(&self.actions) {
            if c != 0 {
                m = m.add(&t.scale(c));
            }
        }
        m
    }

    /// `(Σ v_i T_i) x`.
    pub fn act(&self, v: &[u32], x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.d, "module vector");
        self.t_w(v).mul_vec(x)
    }

    /// Action of a full algebra element.
    pub fn act_elem(&self, r: &AElem, x: &[u32]) -> Vec<u32> {
        let f = self.field();
        f.add_vec(&f.scale_vec(r.a, x), &self.act(&r.v, x))
    }

    /// Linear operators whose images of `x` span `I x`.
    pub fn ideal_operators(&self, ideal: &Ideal) -> Result<Vec<FpMatrix>> {
        ideal.check(&self.alg)?;
        Ok(match ideal {
            Ideal::Zero => Vec::new(),
            Ideal::Whole => {
                let mut ops = vec![FpMatrix::identity(self.field(), self.d)];
                ops.extend(self.actions.iter().cloned());
                ops
            }
            Ideal::SocSub(w) => w.basis_vectors().iter().map(|wv| self.t_w(wv)).collect(),
        })
    }

    /// `I U` for a subspace `U` of the module.
    pub fn ideal_image(&self, ideal: &Ideal, u: &Subspace) -> Result<Subspace> {
        self.check_space(u)?;
        let ops = self.ideal_operators(ideal)?;
        let mut vectors = Vec::new();
        for op in &ops {
            for b in u.basis().row_vectors() {
                vectors.push(op.mul_vec(b));
            }
        }
        Subspace::span(self.field(), self.d, &vectors)
    }

    /// `I x`.
    pub fn ideal_image_vec(&self, ideal: &Ideal, x: &[u32]) -> Result<Subspace> {
        let ops = self.ideal_operators(ideal)?;
        let vectors: Vec<Vec<u32>> = ops.iter().map(|op| op.mul_vec(x)).collect();
        Subspace::span(self.field(), self.d, &vectors)
    }

    /// `IM`.
    pub fn ideal_module(&self, ideal: &Ideal) -> Result<Subspace> {
        self.ideal_image(ideal, &self.full())
    }

    /// `ann_I M = {x : Ix = 0}`.
    pub fn annihilator(&self, ideal: &Ideal) -> Result<Subspace> {
        let ops = self.ideal_operators(ideal)?;
        let mut stacked = FpMatrix::zeros(self.field(), 0, self.d);
        for op in &ops {
            stacked = stacked.vstack(op);
        }
        Ok(stacked.kernel())
    }

    /// `JM`, the sum of the images of the `T_i`.
    pub fn radical_module(&self) -> Subspace {
        let j = self.alg.radical();
        self.ideal_module(&j).expect("radical matches algebra")
    }

    /// `Soc M = ann_J M`.
    pub fn socle(&self) -> Subspace {
        let j = self.alg.radical();
        self.annihilator(&j).expect("radical matches algebra")
    }

    pub fn goldie_dim(&self) -> usize {
        self.socle().dim()
    }

    /// Whether `I` is a decomposition ideal of `M`: `IM = ann_I M` and
    /// `ann*_I M ⊆ IM`, tested as `ker T_w ⊆ IM` for each line `w` of `W`.
    pub fn in_decomposition_domain(&self, ideal: &Ideal) -> Result<bool> {
        ideal.check(&self.alg)?;
        match ideal {
            Ideal::Zero | Ideal::Whole => Ok(self.d == 0),
            Ideal::SocSub(w) => {
                let im = self.ideal_module(ideal)?;
                let ann = self.annihilator(ideal)?;
                if im != ann {
                    return Ok(false);
                }
                for wv in w.projective_points(DEFAULT_ENUMERATION_BUDGET)? {
                    if !self.t_w(&wv).kernel().is_subspace_of(&im) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn check_space(&self, u: &Subspace) -> Result<()> {
        if u.p() != self.p() {
            return Err(Error::FieldMismatch { left: u.p(), right: self.p() });
        }
        if u.ambient() != self.d {
            return Err(Error::Dimension(format!("subspace of F_p^{} in a module of dim {}", u.ambient(), self.d)));
        }
        Ok(())
    }

    fn check_vector(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Dimension(format!("vector of length {} in a module of dim {}", x.len(), self.d)));
        }
        self.field().check_vector(x)
    }

    /// `span(x, T_1 x, ..., T_n x)`; zero for `x = 0`.
    pub fn cyclic_space(&self, x: &[u32]) -> Subspace {
        let mut vectors = Vec::with_capacity(self.n() + 1);
        vectors.push(x.to_vec());
        for t in &self.actions {
            vectors.push(t.mul_vec(x));
        }
        Subspace::span(self.field(), self.d, &vectors).expect("vectors of module length")
    }

    /// `Rx` for nonzero `x`.
    pub fn cyclic(&self, x: &[u32]) -> Result<Submodule<'_>> {
        self.check_vector(x)?;
        if x.iter().all(|&c| c == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(Submodule { parent: self, space: self.cyclic_space(x) })
    }

    /// Submodule generated by a set of vectors.
    pub fn generated(&self, vectors: &[Vec<u32>]) -> Result<Subspace> {
        let mut all = Vec::new();
        for x in vectors {
            self.check_vector(x)?;
            all.push(x.clone());
            for t in &self.actions {
                all.push(t.mul_vec(x));
            }
        }
        Subspace::span(self.field(), self.d, &all)
    }

    pub fn is_action_closed(&self, u: &Subspace) -> bool {
        self.actions.iter().all(|t| u.image(t).is_subspace_of(u))
    }

    pub fn submodule(&self, u: Subspace) -> Result<Submodule<'_>> {
        self.check_space(&u)?;
        if !self.is_action_closed(&u) {
            return Err(Error::NotActionClosed);
        }
        Ok(Submodule { parent: self, space: u })
    }

    pub fn direct_sum(&self, other: &AModule) -> Result<AModule> {
        if self.alg != other.alg {
            if self.p() != other.p() {
                return Err(Error::FieldMismatch { left: self.p(), right: other.p() });
            }
            return Err(Error::Dimension(format!("n = {} vs n = {}", self.n(), other.n())));
        }
        let actions = self.actions.iter().zip(&other.actions).map(|(a, b)| a.block_diag(b)).collect();
        let mut marks = self.generator_marks.clone();
        marks.extend(other.generator_marks.iter().map(|&m| m + self.d));
        Ok(AModule { alg: self.alg, d: self.d + other.d, actions, generator_marks: marks })
    }

    /// `M / K`, with coset representatives spanned by the non-pivot
    /// coordinates of `K`'s canonical basis. Generator marks on those
    /// coordinates survive.
    pub fn quotient(&self, k: &Subspace) -> Result<Quotient> {
        self.check_space(k)?;
        if !self.is_action_closed(k) {
            return Err(Error::NotActionClosed);
        }
        let f = self.field();
        let comp = k.complement_coords();
        let dq = comp.len();
        let mut projection = FpMatrix::zeros(f, dq, self.d);
        for c in 0..self.d {
            let r = k.reduce(&self.unit(c));
            for (row, &cc) in comp.iter().enumerate() {
                projection.set(row, c, r[cc]);
            }
        }
        let actions = self
            .actions
            .iter()
            .map(|t| {
                let mut q = FpMatrix::zeros(f, dq, dq);
                for (j, &cj) in comp.iter().enumerate() {
                    let image = projection.mul_vec(&t.column(cj));
                    for (r, &x) in image.iter().enumerate() {
                        q.set(r, j, x);
                    }
                }
                q
            })
            .collect();
        let marks = self
            .generator_marks
            .iter()
            .filter_map(|m| comp.iter().position(|c| c == m))
            .collect();
        let module = AModule::new(self.alg, dq, actions, marks)?;
        Ok(Quotient { module, projection })
    }

    /// An action-closed subspace as a module in its own basis, together with
    /// the embedding `d x k` whose columns are that basis.
    pub fn restrict(&self, u: &Subspace) -> Result<(AModule, FpMatrix)> {
        self.check_space(u)?;
        let basis = u.basis_columns();
        let mut actions = Vec::with_capacity(self.n());
        for t in &self.actions {
            actions.push(t.restrict_to(&basis).ok_or(Error::NotActionClosed)?);
        }
        let module = AModule::new(self.alg, u.dim(), actions, Vec::new())?;
        Ok((module, basis))
    }

    /// `I N = I M ∩ N`.
    pub fn is_pure(&self, n: &Subspace, ideal: &Ideal) -> Result<bool> {
        self.check_space(n)?;
        if !self.is_action_closed(n) {
            return Err(Error::NotActionClosed);
        }
        let inn = self.ideal_image(ideal, n)?;
        let imn = self.ideal_module(ideal)?.intersect(n)?;
        Ok(inn == imn)
    }

    /// `(I∗M) ∩ N = 0`, where `I∗M` is the union of the sets `rM`, `r ∈ I`.
    pub fn star_meets_trivially(&self, ideal: &Ideal, n: &Subspace) -> Result<bool> {
        self.check_space(n)?;
        ideal.check(&self.alg)?;
        match ideal {
            Ideal::Zero => Ok(true),
            Ideal::Whole => Ok(n.is_zero()),
            Ideal::SocSub(w) => {
                for wv in w.projective_points(DEFAULT_ENUMERATION_BUDGET)? {
                    if self.t_w(&wv).column_space().meets(n)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Whether `f: self -> dst` commutes with the action.
    pub fn is_intertwiner(&self, f: &FpMatrix, dst: &AModule) -> bool {
        f.p() == self.p()
            && self.alg == dst.alg
            && f.rows() == dst.d
            && f.cols() == self.d
            && self.actions.iter().zip(&dst.actions).all(|(s, t)| f.mul(s) == t.mul(f))
    }

    pub fn to_doc(&self) -> ModuleDoc {
        ModuleDoc {
            p: self.p(),
            n: self.n(),
            d: self.d,
            t: self.actions.iter().map(|t| t.data().to_vec()).collect(),
            generator_marks: self.generator_marks.clone(),
        }
    }

    pub fn from_doc(doc: &ModuleDoc) -> Result<Self> {
        let parse = |path: String, message: String| Error::Parse { path, message };
        let alg = Algebra::new(doc.p, doc.n).map_err(|e| parse("p".into(), e.to_string()))?;
        if doc.t.len() != doc.n {
            return Err(parse("T".into(), format!("expected {} matrices, found {}", doc.n, doc.t.len())));
        }
        let mut actions = Vec::with_capacity(doc.n);
        for (i, data) in doc.t.iter().enumerate() {
            let m = FpMatrix::new(doc.p, doc.d, doc.d, data.clone()).map_err(|e| parse(format!("T[{}]", i), e.to_string()))?;
            actions.push(m);
        }
        AModule::new(alg, doc.d, actions, doc.generator_marks.clone()).map_err(|e| parse("T".into(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("module document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModuleDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Self::from_doc(&doc)
    }
}

/// Serialized form of a module: action matrices as row-major residue arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub p: u32,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<u32>>,
    #[serde(default)]
    pub generator_marks: Vec<usize>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::VectorIter;

    pub fn alg(p: u32, n: usize) -> Algebra {
        Algebra::new(p, n).unwrap()
    }

    /// `M_i`: generators `α_0: v ↦ (v, 0_i)` and `α_1: v ↦ (0_i, v)`.
    pub fn m_i(p: u32, n: usize, i: usize) -> AModule {
        let a = alg(p, n);
        let mut l0 = FpMatrix::zeros(a.field(), n + i, n);
        let mut l1 = FpMatrix::zeros(a.field(), n + i, n);
        for k in 0..n {
            l0.set(k, k, 1);
            l1.set(i + k, k, 1);
        }
        AModule::presentation(a, 2, n + i, &[l0, l1]).unwrap()
    }

    #[test]
    fn element_multiplication() {
        let a = alg(3, 2);
        let x = a.elem(2, vec![1, 0]).unwrap();
        let y = a.elem(1, vec![0, 1]).unwrap();
        assert_eq!(a.mul(&x, &y), AElem { a: 2, v: vec![1, 2] });
        assert_eq!(a.mul(&a.one(), &x), x);
        let s = a.elem(0, vec![1, 2]).unwrap();
        let t = a.elem(0, vec![2, 2]).unwrap();
        assert_eq!(a.mul(&s, &t), AElem { a: 0, v: vec![0, 0] });
        assert!(a.is_unit(&x) && !a.is_unit(&s));
    }

    #[test]
    fn multiplication_matches_brute_force_table() {
        // Commutativity and associativity over all of F_2 ⋉ F_2^2.
        let a = alg(2, 2);
        let elems: Vec<AElem> = VectorIter::new(a.field(), 3)
            .map(|c| AElem { a: c[0], v: c[1..].to_vec() })
            .collect();
        for x in &elems {
            for y in &elems {
                assert_eq!(a.mul(x, y), a.mul(y, x));
                for z in &elems {
                    assert_eq!(a.mul(&a.mul(x, y), z), a.mul(x, &a.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn soc_sub_ideals_are_ideals() {
        let a = alg(3, 2);
        let w = Subspace::span(a.field(), 2, &[vec![1, 2]]).unwrap();
        let ideal = Ideal::soc_sub(w.clone());
        for c in VectorIter::new(a.field(), 3) {
            let r = AElem { a: c[0], v: c[1..].to_vec() };
            for wv in w.enumerate(100).unwrap() {
                let x = AElem { a: 0, v: wv };
                assert!(ideal.contains(&a.mul(&r, &x)));
                // I^2 = 0
                assert!(ideal.contains(&a.mul(&x, &x)) && a.mul(&x, &x).v.iter().all(|&c| c == 0));
            }
        }
        assert_eq!(Ideal::soc_sub(Subspace::zero(a.field(), 2)), Ideal::Zero);
    }

    #[test]
    fn free_module_shapes() {
        let a = alg(2, 2);
        let m = AModule::free(a, 1);
        assert_eq!(m.dim(), 3);
        assert!(m.actions().iter().all(|t| t.rank() == 1));
        assert_eq!(AModule::free(a, 0).dim(), 0);
        let m2 = AModule::free(a, 2);
        assert_eq!(m2.dim(), 6);
        assert_eq!(m2.radical_module().dim(), 4);
        assert_eq!(m2.generator_marks(), &[0, 3]);
    }

    #[test]
    fn presentation_examples() {
        let a = alg(3, 2);
        let id = FpMatrix::identity(a.field(), 2);
        assert_eq!(AModule::presentation(a, 1, 2, &[id]).unwrap(), AModule::free(a, 1));
        let mi = m_i(3, 2, 1);
        assert_eq!(mi.dim(), 5);
        assert_eq!(mi.goldie_dim(), 3);
        let ss = AModule::presentation(a, 0, 3, &[]).unwrap();
        assert_eq!(ss, AModule::semisimple(a, 3));
        let bad = FpMatrix::zeros(a.field(), 2, 3);
        assert!(AModule::presentation(a, 1, 2, &[bad]).is_err());
    }

    #[test]
    fn constructor_enforces_square_zero() {
        let a = alg(2, 2);
        // T_0 = T_1 = a nilpotent Jordan block of size 3 has T^2 != 0.
        let t = FpMatrix::from_rows(2, 3, &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(matches!(
            AModule::new(a, 3, vec![t.clone(), t], vec![]),
            Err(Error::InvalidModule(_))
        ));
    }

    #[test]
    fn action_examples() {
        let a = alg(2, 2);
        let m = AModule::free(a, 1);
        assert_eq!(m.act(&[0, 0], &[1, 1, 1]), vec![0, 0, 0]);
        assert_eq!(m.act(&[1, 0], &[1, 0, 0]), vec![0, 1, 0]);
        let mi = m_i(3, 2, 1);
        for s in 2..5 {
            let x = mi.unit(s);
            for v in VectorIter::new(mi.field(), 2) {
                assert!(mi.act(&v, &x).iter().all(|&c| c == 0));
            }
        }
    }

    #[test]
    fn ideal_image_examples() {
        let a = alg(2, 2);
        let m = AModule::free(a, 1);
        let full = m.full();
        assert!(m.ideal_image(&Ideal::Zero, &full).unwrap().is_zero());
        let jm = m.ideal_image(&a.radical(), &full).unwrap();
        assert_eq!(jm, Subspace::span(a.field(), 3, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap());
        let e1 = Ideal::soc_sub(Subspace::span(a.field(), 2, &[vec![1, 0]]).unwrap());
        let gen = Subspace::span(a.field(), 3, &[vec![1, 0, 0]]).unwrap();
        assert_eq!(
            m.ideal_image(&e1, &gen).unwrap(),
            Subspace::span(a.field(), 3, &[vec![0, 1, 0]]).unwrap()
        );
        assert!(m.ideal_image(&Ideal::Whole, &gen).unwrap().is_full());
    }

    #[test]
    fn annihilator_examples() {
        let a = alg(2, 2);
        let m = AModule::free(a, 1);
        assert_eq!(m.annihilator(&a.radical()).unwrap().dim(), 2);
        assert!(m.annihilator(&Ideal::Zero).unwrap().is_full());
        assert!(m.annihilator(&Ideal::Whole).unwrap().is_zero());
        assert_eq!(m_i(3, 2, 1).annihilator(&alg(3, 2).radical()).unwrap().dim(), 3);
    }

    #[test]
    fn decomposition_domain_examples() {
        let a = alg(2, 2);
        assert!(AModule::free(a, 1).in_decomposition_domain(&a.radical()).unwrap());
        let b = alg(3, 2);
        assert!(m_i(3, 2, 1).in_decomposition_domain(&b.radical()).unwrap());
        let k = alg(2, 0);
        assert!(!AModule::semisimple(k, 1).in_decomposition_domain(&Ideal::Zero).unwrap());
        assert!(AModule::zero(k).in_decomposition_domain(&Ideal::Zero).unwrap());
        // A semisimple module over n > 0 has IM = 0 but ann = M.
        assert!(!AModule::semisimple(a, 2).in_decomposition_domain(&a.radical()).unwrap());
    }

    #[test]
    fn decomposition_domain_matches_pointwise_definition() {
        // ann*_I M taken as the set of x with wx = 0 for some nonzero w in W.
        let p = 3;
        for m in [m_i(p, 2, 1), AModule::free(alg(p, 2), 2), AModule::free(alg(p, 2), 1)] {
            let w = Subspace::full(m.field(), 2);
            let ideal = Ideal::SocSub(w.clone());
            let im = m.ideal_module(&ideal).unwrap();
            let ann = m.annihilator(&ideal).unwrap();
            let mut star_inside = true;
            for x in m.full().enumerate(1 << 12).unwrap() {
                let killed = w
                    .enumerate(100)
                    .unwrap()
                    .iter()
                    .any(|wv| wv.iter().any(|&c| c != 0) && m.act(wv, &x).iter().all(|&c| c == 0));
                if killed && !im.contains(&x) {
                    star_inside = false;
                }
            }
            assert_eq!(m.in_decomposition_domain(&ideal).unwrap(), im == ann && star_inside);
        }
    }

    #[test]
    fn goldie_examples() {
        assert_eq!(AModule::free(alg(2, 2), 1).goldie_dim(), 2);
        assert_eq!(m_i(3, 3, 2).goldie_dim(), 5);
        assert_eq!(AModule::zero(alg(2, 2)).goldie_dim(), 0);
    }

    #[test]
    fn cyclic_examples() {
        let mi = m_i(3, 2, 1);
        assert_eq!(mi.cyclic(&mi.unit(3)).unwrap().dim(), 1);
        let f = AModule::free(alg(3, 2), 1);
        assert_eq!(f.cyclic(&f.unit(0)).unwrap().dim(), 3);
        let x = [1, 1, 0, 0, 0];
        assert_eq!(mi.cyclic(&x).unwrap().dim(), 3);
        assert_eq!(mi.cyclic(&[0; 5]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn quotient_examples() {
        let mi = m_i(3, 2, 1);
        let q = mi.quotient(&mi.zero_space()).unwrap();
        assert_eq!(q.module, mi);
        assert_eq!(q.projection, FpMatrix::identity(mi.field(), 5));
        let not_closed = Subspace::span(mi.field(), 5, &[mi.unit(0)]).unwrap();
        assert_eq!(mi.quotient(&not_closed).unwrap_err(), Error::NotActionClosed);
    }

    #[test]
    fn quotient_of_free_square_gives_m_i() {
        // (A ⊕ A) / W(i) with W(i) spanned by (0, v_{i..n}, -v_{0..n-i}) style
        // identifications of the last n-i socle coordinates of the first copy
        // with the first n-i of the second.
        let (p, n, i) = (3, 2, 1);
        let a = alg(p, n);
        let f = a.field();
        let m = AModule::free(a, 2);
        let vectors: Vec<Vec<u32>> = (0..n - i)
            .map(|k| {
                let mut v = vec![0; 2 * (n + 1)];
                v[1 + i + k] = 1;
                v[n + 1 + 1 + k] = f.neg(1);
                v
            })
            .collect();
        let w = Subspace::span(f, 2 * (n + 1), &vectors).unwrap();
        let q = m.quotient(&w).unwrap().module;
        assert_eq!(q.dim(), 2 * (n + 1) - (n - i));
        assert_eq!(q.goldie_dim(), m_i(p, n, i).goldie_dim());
        assert_eq!(q.generator_marks().len(), 2);
    }

    #[test]
    fn direct_summands_are_pure() {
        let a = alg(3, 2);
        let m = m_i(3, 2, 1).direct_sum(&AModule::free(a, 1)).unwrap();
        let first = Subspace::span(a.field(), 8, &(0..5).map(|k| m.unit(k)).collect::<Vec<_>>()).unwrap();
        let second = Subspace::span(a.field(), 8, &(5..8).map(|k| m.unit(k)).collect::<Vec<_>>()).unwrap();
        for ideal in [a.radical(), Ideal::Zero, Ideal::Whole] {
            assert!(m.is_pure(&first, &ideal).unwrap());
            assert!(m.is_pure(&second, &ideal).unwrap());
        }
        // The socle of A is not pure in A: J·Soc = 0 but JA ∩ Soc = Soc.
        let f = AModule::free(a, 1);
        assert!(!f.is_pure(&f.socle(), &a.radical()).unwrap());
    }

    #[test]
    fn restriction_of_summand() {
        let a = alg(2, 2);
        let m = AModule::free(a, 1).direct_sum(&AModule::semisimple(a, 1)).unwrap();
        let u = Subspace::span(a.field(), 4, &[m.unit(0), m.unit(1), m.unit(2)]).unwrap();
        let (r, emb) = m.restrict(&u).unwrap();
        assert_eq!(r.dim(), 3);
        assert!(r.is_intertwiner(&emb, &m));
        assert_eq!(r.goldie_dim(), 2);
    }

    #[test]
    fn star_intersection() {
        let a = alg(3, 2);
        let f = AModule::free(a, 1);
        let j = a.radical();
        assert!(f.star_meets_trivially(&j, &f.zero_space()).unwrap());
        assert!(!f.star_meets_trivially(&j, &f.socle()).unwrap());
        assert!(f.star_meets_trivially(&Ideal::Zero, &f.socle()).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let m = AModule::free(alg(2, 2), 1);
        assert_eq!(AModule::from_json(&m.to_json()).unwrap(), m);
        let bad = r#"{"p":2,"n":2,"d":3,"T":[[0,0,0,1,0,0,0,1,0],[0,0,0,1,0,0,0,1,0]],"generator_marks":[]}"#;
        assert!(matches!(AModule::from_json(bad), Err(Error::Parse { .. })));
        let short = r#"{"p":2,"n":1,"d":2,"T":[[0,0,1]]}"#;
        match AModule::from_json(short) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "T[0]"),
            other => panic!("unexpected {:?}", other),
        }
    }
}
