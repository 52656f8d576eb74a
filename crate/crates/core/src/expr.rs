//! Polynomial expressions over mutually commuting observables.
//!
//! An [`ObservableExpression`] is evaluated two ways: as an operator by matrix
//! arithmetic ([`ObservableExpression::eval_operator`]) and as a real number
//! once every leaf is replaced by a value ([`ObservableExpression::eval_real`]).
//! Functional consistency asks whether the two agree under the prediction map.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{basis_projector, pauli, Axis, HermitianOperator, Matrix};

/// Commutator norm up to which two leaves count as compatible.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Entrywise tolerance on the Hermiticity of an evaluated expression.
pub const EXPR_HERMITIAN_TOL: f64 = 1e-10;

/// Position of a leaf in its expression's leaf table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LeafId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(LeafId),
    Sum(Vec<Node>),
    /// Ordered product.
    Product(Vec<Node>),
    Scale(Complex64, Box<Node>),
}

impl Node {
    pub fn scale(factor: f64, child: Node) -> Node {
        Node::Scale(Complex64::new(factor, 0.0), Box::new(child))
    }
}

/// Registers leaf operators, merging ones that are the same observable.
#[derive(Debug, Default, Clone)]
pub struct ExpressionBuilder {
    leaves: Vec<HermitianOperator>,
}

impl ExpressionBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, op: &HermitianOperator) -> Node {
        let id = match self.leaves.iter().position(|l| l.same_observable(op)) {
            Some(i) => i,
            None => {
                self.leaves.push(op.clone());
                self.leaves.len() - 1
            }
        };
        Node::Leaf(LeafId(id))
    }

    pub fn build(self, root: Node) -> Result<ObservableExpression> {
        ObservableExpression::new(self.leaves, root)
    }
}

/// f(B₁, …, B_N) over mutually commuting Hermitian leaves.
#[derive(Debug, Clone)]
pub struct ObservableExpression {
    leaves: Vec<HermitianOperator>,
    root: Node,
    evaluated: HermitianOperator,
}

impl ObservableExpression {
    /// Validates dimensions, pairwise commutation of the leaves and
    /// Hermiticity of the evaluated operator.
    pub fn new(leaves: Vec<HermitianOperator>, root: Node) -> Result<Self> {
        let dim = leaves.first().ok_or(Error::EmptyExpression)?.dim();
        for (i, l) in leaves.iter().enumerate() {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: l.dim() });
            }
            for (j, m) in leaves.iter().enumerate().skip(i + 1) {
                let norm = l.commutator_norm(m)?;
                if norm > COMMUTE_TOL {
                    return Err(Error::NonCommutingLeaves { first: i, second: j, norm });
                }
            }
        }
        let matrix = eval_matrix(&root, &leaves)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > EXPR_HERMITIAN_TOL {
            return Err(Error::NonHermitianExpression { deviation });
        }
        let evaluated = HermitianOperator::from_hermitian_part(matrix);
        Ok(Self { leaves, root, evaluated })
    }

    pub fn leaf(op: &HermitianOperator) -> Result<Self> {
        let mut b = ExpressionBuilder::new();
        let root = b.leaf(op);
        b.build(root)
    }

    /// Ordered product of the given operators.
    pub fn product(ops: &[&HermitianOperator]) -> Result<Self> {
        let mut b = ExpressionBuilder::new();
        let children = ops.iter().map(|op| b.leaf(op)).collect();
        b.build(Node::Product(children))
    }

    pub fn sum(ops: &[&HermitianOperator]) -> Result<Self> {
        let mut b = ExpressionBuilder::new();
        let children = ops.iter().map(|op| b.leaf(op)).collect();
        b.build(Node::Sum(children))
    }

    /// Attaches a label to the evaluated operator.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.evaluated = self.evaluated.with_label(label);
        self
    }

    pub fn leaves(&self) -> &[HermitianOperator] {
        &self.leaves
    }

    pub fn leaf_ids(&self) -> impl Iterator<Item = LeafId> {
        (0..self.leaves.len()).map(LeafId)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.evaluated.dim()
    }

    /// The operator f(B₁, …, B_N).
    pub fn eval_operator(&self) -> &HermitianOperator {
        &self.evaluated
    }

    /// f̃(b₁, …, b_N): the same expression over real leaf values.
    pub fn eval_real(&self, values: &BTreeMap<LeafId, f64>) -> Result<f64> {
        eval_real_node(&self.root, &|id: LeafId| values.get(&id).copied().ok_or(Error::MissingLeafValue(id.0)))
    }

    /// [`eval_real`](Self::eval_real) with values indexed by leaf position.
    pub fn eval_real_slice(&self, values: &[f64]) -> Result<f64> {
        eval_real_node(&self.root, &|id: LeafId| values.get(id.0).copied().ok_or(Error::MissingLeafValue(id.0)))
    }
}

fn eval_matrix(node: &Node, leaves: &[HermitianOperator]) -> Result<Matrix> {
    match node {
        Node::Leaf(id) => Ok(leaves.get(id.0).ok_or(Error::UnknownLeaf(id.0))?.matrix().clone()),
        Node::Sum(children) => {
            let mut it = children.iter();
            let mut acc = eval_matrix(it.next().ok_or(Error::EmptyExpression)?, leaves)?;
            for c in it {
                acc = acc.add(&eval_matrix(c, leaves)?);
            }
            Ok(acc)
        }
        Node::Product(children) => {
            let mut it = children.iter();
            let mut acc = eval_matrix(it.next().ok_or(Error::EmptyExpression)?, leaves)?;
            for c in it {
                acc = acc.matmul(&eval_matrix(c, leaves)?);
            }
            Ok(acc)
        }
        Node::Scale(factor, child) => Ok(eval_matrix(child, leaves)?.scale(*factor)),
    }
}

fn eval_real_node(node: &Node, value: &dyn Fn(LeafId) -> Result<f64>) -> Result<f64> {
    match node {
        Node::Leaf(id) => value(*id),
        Node::Sum(children) => {
            if children.is_empty() {
                return Err(Error::EmptyExpression);
            }
            children.iter().try_fold(0.0, |acc, c| Ok(acc + eval_real_node(c, value)?))
        }
        Node::Product(children) => {
            if children.is_empty() {
                return Err(Error::EmptyExpression);
            }
            children.iter().try_fold(1.0, |acc, c| Ok(acc * eval_real_node(c, value)?))
        }
        Node::Scale(factor, child) => {
            if factor.im != 0.0 {
                return Err(Error::ComplexScale { re: factor.re, im: factor.im });
            }
            Ok(factor.re * eval_real_node(child, value)?)
        }
    }
}

/// Row or column of the Peres-Mermin square, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl Line {
    pub fn cells(self) -> [(usize, usize); 3] {
        match self {
            Line::Row(i) => [(i, 0), (i, 1), (i, 2)],
            Line::Column(j) => [(0, j), (1, j), (2, j)],
        }
    }

    pub fn all() -> [Line; 6] {
        [Line::Row(0), Line::Row(1), Line::Row(2), Line::Column(0), Line::Column(1), Line::Column(2)]
    }
}

/// The 3×3 grid of two-qubit Pauli products
///
/// ```text
/// I⊗σx   σx⊗I   σx⊗σx
/// σy⊗I   I⊗σy   σy⊗σy
/// σy⊗σx  σx⊗σy  σz⊗σz
/// ```
///
/// whose row products are +I and whose column products are +I, +I, −I.
#[derive(Debug, Clone)]
pub struct PeresMerminSquare {
    a: [[HermitianOperator; 3]; 3],
    rows: [HermitianOperator; 3],
    cols: [HermitianOperator; 3],
}

/// Tolerance on R̂ᵢ, Ĉⱼ = ±I.
pub const SQUARE_IDENTITY_TOL: f64 = 1e-12;

/// The Peres-Mermin square with its row and column product operators.
/// Panics only if the hard-coded grid violates its own identities.
pub fn peres_mermin() -> PeresMerminSquare {
    let i = HermitianOperator::identity(2);
    let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let cell = |r: usize, c: usize, op: HermitianOperator| {
        let desc = op.display_label();
        op.with_label(format!("A{}{} ({desc})", r + 1, c + 1))
    };
    let a = [
        [cell(0, 0, i.tensor(&x)), cell(0, 1, x.tensor(&i)), cell(0, 2, x.tensor(&x))],
        [cell(1, 0, y.tensor(&i)), cell(1, 1, i.tensor(&y)), cell(1, 2, y.tensor(&y))],
        [cell(2, 0, y.tensor(&x)), cell(2, 1, x.tensor(&y)), cell(2, 2, z.tensor(&z))],
    ];
    let product = |line: Line, label: String| {
        let m = line
            .cells()
            .iter()
            .map(|&(r, c)| a[r][c].matrix().clone())
            .reduce(|acc, m| acc.matmul(&m))
            .expect("three cells");
        HermitianOperator::from_hermitian_part(m).with_label(label)
    };
    let rows = [0, 1, 2].map(|k| product(Line::Row(k), format!("R{}", k + 1)));
    let cols = [0, 1, 2].map(|k| product(Line::Column(k), format!("C{}", k + 1)));
    let square = PeresMerminSquare { a, rows, cols };
    square.verify().expect("Peres-Mermin identities");
    square
}

impl PeresMerminSquare {
    /// Cell (row, column), zero-based.
    pub fn cell(&self, row: usize, col: usize) -> &HermitianOperator {
        &self.a[row][col]
    }

    pub fn grid(&self) -> &[[HermitianOperator; 3]; 3] {
        &self.a
    }

    pub fn row_product(&self, i: usize) -> &HermitianOperator {
        &self.rows[i]
    }

    pub fn column_product(&self, j: usize) -> &HermitianOperator {
        &self.cols[j]
    }

    pub fn line_product(&self, line: Line) -> &HermitianOperator {
        match line {
            Line::Row(i) => &self.rows[i],
            Line::Column(j) => &self.cols[j],
        }
    }

    pub fn line_operators(&self, line: Line) -> [&HermitianOperator; 3] {
        line.cells().map(|(r, c)| &self.a[r][c])
    }

    /// The line's product as an expression over its three cells.
    pub fn line_expression(&self, line: Line) -> Result<ObservableExpression> {
        let label = self.line_product(line).display_label();
        Ok(ObservableExpression::product(&self.line_operators(line))?.with_label(label))
    }

    /// The scalar s with line product = s·I, checked to [`SQUARE_IDENTITY_TOL`].
    pub fn line_value(&self, line: Line) -> Result<f64> {
        scalar_identity_value(self.line_product(line))
    }

    /// Pairwise commutator norms within every line and the ±I deviations of
    /// all six products.
    pub fn verify(&self) -> Result<SquareIdentities> {
        let mut max_commutator: f64 = 0.0;
        for line in Line::all() {
            let ops = self.line_operators(line);
            for p in 0..3 {
                for q in (p + 1)..3 {
                    max_commutator = max_commutator.max(ops[p].commutator_norm(ops[q])?);
                }
            }
        }
        if max_commutator > COMMUTE_TOL {
            return Err(Error::NonCommutingLeaves { first: 0, second: 0, norm: max_commutator });
        }
        let values = Line::all().map(|l| self.line_value(l));
        let mut out = [0.0; 6];
        for (k, v) in values.into_iter().enumerate() {
            out[k] = v?;
        }
        Ok(SquareIdentities {
            row_values: [out[0], out[1], out[2]],
            column_values: [out[3], out[4], out[5]],
            max_commutator,
        })
    }
}

/// Line products of the square as scalars, plus the worst in-line commutator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareIdentities {
    pub row_values: [f64; 3],
    pub column_values: [f64; 3],
    pub max_commutator: f64,
}

/// s such that `op` = s·I within [`SQUARE_IDENTITY_TOL`] (Frobenius).
pub fn scalar_identity_value(op: &HermitianOperator) -> Result<f64> {
    let dim = op.dim();
    let s = op.matrix().trace().re / dim as f64;
    let deviation = op.matrix().frobenius_distance(&Matrix::identity(dim).scale(Complex64::new(s, 0.0)));
    if deviation > SQUARE_IDENTITY_TOL {
        return Err(Error::NotScalarIdentity { deviation });
    }
    Ok(s)
}

/// The three observables of the "deduce B̂₁, B̂₂ from Ĉ" example, spelled out
/// in projector form on the two-qubit computational basis |00⟩, |01⟩, |10⟩, |11⟩:
///
/// * B₁ = +1 on span{|00⟩, |01⟩}, −1 on span{|10⟩, |11⟩}
/// * B₂ = +1 on span{|10⟩, |11⟩}, −1 on span{|00⟩, |01⟩}
/// * C  = 1·|00⟩⟨00| + 2·|01⟩⟨01| + 3·|10⟩⟨10| + 4·|11⟩⟨11|
///
/// B₂ as written here is −B₁; the names σz⊗I and I⊗σz only serve as labels.
pub fn implications_operators() -> (HermitianOperator, HermitianOperator, HermitianOperator) {
    let p = |k: usize| basis_projector(4, k).expect("k < 4");
    let (p00, p01, p10, p11) = (p(0), p(1), p(2), p(3));
    let b1 = HermitianOperator::from_projectors([(1.0, &p00), (1.0, &p01), (-1.0, &p10), (-1.0, &p11)])
        .expect("diagonal")
        .with_label("B1 (σz⊗I)");
    let b2 = HermitianOperator::from_projectors([(1.0, &p10), (1.0, &p11), (-1.0, &p00), (-1.0, &p01)])
        .expect("diagonal")
        .with_label("B2 (I⊗σz)");
    let c = HermitianOperator::from_projectors([(1.0, &p00), (2.0, &p01), (3.0, &p10), (4.0, &p11)])
        .expect("diagonal")
        .with_label("C");
    (b1, b2, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn xx_times_yy_is_minus_zz() {
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        let f = ObservableExpression::product(&[&x.tensor(&x), &y.tensor(&y)]).unwrap();
        let minus_zz = z.tensor(&z).scaled(-1.0);
        assert!(f.eval_operator().matrix().frobenius_distance(minus_zz.matrix()) < 1e-15);
    }

    #[test]
    fn single_child_product_is_the_child() {
        let a = pauli(Axis::Y).tensor(&pauli(Axis::X));
        let f = ObservableExpression::product(&[&a]).unwrap();
        assert_eq!(f.eval_operator().matrix(), a.matrix());
    }

    #[test]
    fn third_column_is_minus_identity() {
        let sq = peres_mermin();
        let f = sq.line_expression(Line::Column(2)).unwrap();
        let minus_i = Matrix::identity(4).scale(Complex64::new(-1.0, 0.0));
        assert!(f.eval_operator().matrix().frobenius_distance(&minus_i) < 1e-12);
    }

    #[test]
    fn eval_real_examples() {
        let sq = peres_mermin();
        let f = sq.line_expression(Line::Column(2)).unwrap();
        assert_eq!(f.eval_real_slice(&[-1.0, -1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(f.eval_real_slice(&[1.0, -1.0, 1.0]).unwrap(), -1.0);
        let (b1, _, c) = implications_operators();
        let s = ObservableExpression::sum(&[&b1, &c]).unwrap();
        let mut values = BTreeMap::new();
        values.insert(LeafId(0), 2.0);
        values.insert(LeafId(1), 3.0);
        assert_eq!(s.eval_real(&values).unwrap(), 5.0);
        values.remove(&LeafId(1));
        assert_eq!(s.eval_real(&values), Err(Error::MissingLeafValue(1)));
    }

    #[test]
    fn rejects_non_commuting_leaves() {
        let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
        assert!(matches!(
            ObservableExpression::sum(&[&x, &z]),
            Err(Error::NonCommutingLeaves { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn complex_scale_must_leave_result_hermitian() {
        let z = pauli(Axis::Z);
        let mut b = ExpressionBuilder::new();
        let leaf = b.leaf(&z);
        let i = Complex64::new(0.0, 1.0);
        assert!(matches!(
            b.clone().build(Node::Scale(i, Box::new(leaf.clone()))),
            Err(Error::NonHermitianExpression { .. })
        ));
        let round_trip = Node::Scale(i, Box::new(Node::Scale(-i, Box::new(leaf))));
        let f = b.build(round_trip).unwrap();
        assert!(f.eval_operator().matrix().frobenius_distance(z.matrix()) < 1e-15);
        assert!(matches!(f.eval_real_slice(&[1.0]), Err(Error::ComplexScale { .. })));
    }

    #[test]
    fn builder_merges_repeated_leaves() {
        let z = pauli(Axis::Z);
        let f = ObservableExpression::product(&[&z, &z]).unwrap();
        assert_eq!(f.leaves().len(), 1);
        assert!(f.eval_operator().matrix().frobenius_distance(&Matrix::identity(2)) < 1e-15);
        assert_eq!(f.eval_real_slice(&[-1.0]).unwrap(), 1.0);
    }

    #[test]
    fn empty_expressions_rejected() {
        assert_eq!(ObservableExpression::product(&[]).unwrap_err(), Error::EmptyExpression);
        let z = pauli(Axis::Z);
        let mut b = ExpressionBuilder::new();
        b.leaf(&z);
        assert_eq!(b.build(Node::Sum(vec![])).unwrap_err(), Error::EmptyExpression);
    }

    #[test]
    fn square_layout_and_identities() {
        let sq = peres_mermin();
        let i = HermitianOperator::identity(2);
        let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
        assert_eq!(sq.cell(0, 0).matrix(), i.tensor(&x).matrix());
        assert_eq!(sq.cell(2, 2).matrix(), z.tensor(&z).matrix());
        let ids = sq.verify().unwrap();
        assert_eq!(ids.row_values, [1.0, 1.0, 1.0]);
        assert_eq!(ids.column_values, [1.0, 1.0, -1.0]);
    }

    #[test]
    fn implications_operator_spectra() {
        let (b1, b2, c) = implications_operators();
        let values: Vec<f64> = c.spectral().unwrap().eigenvalues().collect();
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(b1.commutes(&c, 0.0).unwrap());
        assert!(b2.commutes(&c, 0.0).unwrap());
        assert_eq!(b1.matrix(), &Matrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(b2.matrix(), &Matrix::from_diagonal(&[-1.0, -1.0, 1.0, 1.0]));
    }
}
