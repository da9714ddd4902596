//! Extensor fields: point-dependent multilinear maps between multivector
//! spaces, stored extensionally as dense tables over blade bases.
//!
//! A k-extensor with declared slot and output grade sets is determined by
//! its values on the slot blade bases, so adjoints, directional derivatives
//! and the commutation between them reduce to finite linear algebra on the
//! table. Arity is capped at 2 with explicit grade-set signatures; the
//! vector-to-vector case gets a dedicated matrix form.

use crate::algebra::{Dimension, Multivector};
use crate::domain::DomainBox;
use crate::dsl::{
    build, differentiate, evaluate_scalar, BinOp, EvalError, ExtensorDef, FieldExpr,
};
use crate::field::{Direction, FieldError, MultivectorField};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensorError {
    #[error("extensor arity must be 1 or 2, got {0}")]
    UnsupportedArity(usize),
    #[error("expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("argument {slot} has grades {grades:?} outside the slot signature")]
    SignatureMismatch { slot: usize, grades: Vec<usize> },
    #[error("adjoint requires a single-slot extensor, this one has arity {0}")]
    AdjointArity(usize),
    #[error("table has {found} rows, expected {expected}")]
    TableShape { expected: usize, found: usize },
    #[error("matrix is singular at {point:?} (condition estimate {condition:.3e})")]
    Singular { condition: f64, point: Vec<f64> },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Set of grades admitted by one slot (or the output), as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotGrades(u16);

impl SlotGrades {
    pub fn of(grades: &[usize]) -> Self {
        let mut bits = 0u16;
        for &g in grades {
            bits |= 1 << g;
        }
        SlotGrades(bits)
    }

    pub fn vectors() -> Self {
        SlotGrades(0b10)
    }

    /// Every grade up to n.
    pub fn full(n: usize) -> Self {
        SlotGrades(((1u32 << (n + 1)) - 1) as u16)
    }

    pub fn admits(self, grade: usize) -> bool {
        self.0 & (1 << grade) != 0
    }

    pub fn grades(self, n: usize) -> Vec<usize> {
        (0..=n).filter(|&g| self.admits(g)).collect()
    }

    /// Blade masks of the admitted grades, ascending.
    pub fn basis_masks(self, dimension: Dimension) -> Vec<u16> {
        (0..dimension.blade_count() as u16)
            .filter(|m| self.admits(m.count_ones() as usize))
            .collect()
    }
}

/// Slot and output grade sets of an extensor; arity is `slots.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensorSignature {
    pub slots: Vec<SlotGrades>,
    pub output: SlotGrades,
}

impl ExtensorSignature {
    pub fn new(slots: Vec<SlotGrades>, output: SlotGrades) -> Result<Self, ExtensorError> {
        if slots.is_empty() || slots.len() > 2 {
            return Err(ExtensorError::UnsupportedArity(slots.len()));
        }
        Ok(ExtensorSignature { slots, output })
    }

    /// The (1,1) signature: one vector slot, vector output.
    pub fn vector_to_vector() -> Self {
        ExtensorSignature {
            slots: vec![SlotGrades::vectors()],
            output: SlotGrades::vectors(),
        }
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }
}

/// Row index layout over the cartesian product of slot bases.
fn slot_rows(signature: &ExtensorSignature, dimension: Dimension) -> Vec<Vec<u16>> {
    let bases: Vec<Vec<u16>> = signature
        .slots
        .iter()
        .map(|s| s.basis_masks(dimension))
        .collect();
    match bases.len() {
        1 => bases[0].iter().map(|&m| vec![m]).collect(),
        2 => {
            let mut rows = Vec::with_capacity(bases[0].len() * bases[1].len());
            for &a in &bases[0] {
                for &b in &bases[1] {
                    rows.push(vec![a, b]);
                }
            }
            rows
        }
        _ => unreachable!("arity checked at construction"),
    }
}

/// A fixed multilinear map: the value table over the slot blade bases.
#[derive(Debug, Clone, PartialEq)]
pub struct Extensor {
    dimension: Dimension,
    signature: ExtensorSignature,
    /// `table[row]` is the image of the row's slot blades.
    table: Vec<Multivector>,
}

impl Extensor {
    pub fn new(
        dimension: Dimension,
        signature: ExtensorSignature,
        table: Vec<Multivector>,
    ) -> Result<Self, ExtensorError> {
        let rows = slot_rows(&signature, dimension);
        if table.len() != rows.len() {
            return Err(ExtensorError::TableShape {
                expected: rows.len(),
                found: table.len(),
            });
        }
        Ok(Extensor {
            dimension,
            signature,
            table,
        })
    }

    pub fn identity(dimension: Dimension) -> Self {
        let signature = ExtensorSignature::vector_to_vector();
        let table = (1..=dimension.n())
            .map(|mu| Multivector::basis_vector(dimension, mu).unwrap())
            .collect();
        Extensor {
            dimension,
            signature,
            table,
        }
    }

    pub fn signature(&self) -> &ExtensorSignature {
        &self.signature
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    fn check_args(&self, args: &[&Multivector]) -> Result<(), ExtensorError> {
        if args.len() != self.signature.arity() {
            return Err(ExtensorError::ArityMismatch {
                expected: self.signature.arity(),
                found: args.len(),
            });
        }
        for (i, (arg, slot)) in args.iter().zip(&self.signature.slots).enumerate() {
            if arg.dimension() != self.dimension {
                return Err(ExtensorError::DimensionMismatch {
                    left: self.dimension.n(),
                    right: arg.dimension().n(),
                });
            }
            let grades = arg.grades();
            if grades.iter().any(|&g| !slot.admits(g)) {
                return Err(ExtensorError::SignatureMismatch {
                    slot: i + 1,
                    grades,
                });
            }
        }
        Ok(())
    }

    /// Multilinear contraction of the table with the arguments' blade
    /// coefficients.
    pub fn apply(&self, args: &[&Multivector]) -> Result<Multivector, ExtensorError> {
        self.check_args(args)?;
        let rows = slot_rows(&self.signature, self.dimension);
        let mut out = Multivector::zero(self.dimension);
        for (row, image) in rows.iter().zip(&self.table) {
            let weight: f64 = row
                .iter()
                .zip(args)
                .map(|(&mask, arg)| arg.coefficient(mask))
                .product();
            if weight != 0.0 {
                out = &out + &image.scale(weight);
            }
        }
        Ok(out)
    }

    /// The adjoint of a single-slot extensor: the unique map with
    /// `adj(X) . Y = t(Y) . X` for all blades. On tables this transposes
    /// against the (orthonormal) blade scalar product.
    pub fn adjoint(&self) -> Result<Extensor, ExtensorError> {
        if self.signature.arity() != 1 {
            return Err(ExtensorError::AdjointArity(self.signature.arity()));
        }
        let slot_basis = self.signature.slots[0].basis_masks(self.dimension);
        let out_basis = self.signature.output.basis_masks(self.dimension);
        let signature = ExtensorSignature {
            slots: vec![self.signature.output],
            output: self.signature.slots[0],
        };
        let table = out_basis
            .iter()
            .map(|&b| {
                let mut image = Multivector::zero(self.dimension);
                for (row, &a) in slot_basis.iter().enumerate() {
                    image.set_coefficient(a, self.table[row].coefficient(b));
                }
                image
            })
            .collect();
        Ok(Extensor {
            dimension: self.dimension,
            signature,
            table,
        })
    }

    pub fn max_abs_diff(&self, other: &Extensor) -> f64 {
        assert_eq!(self.signature, other.signature, "signature mismatch");
        self.table
            .iter()
            .zip(&other.table)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }
}

/// A smooth extensor field: one scalar expression per (slot blades, output
/// blade) table cell.
#[derive(Debug, Clone)]
pub struct ExtensorField {
    dimension: Dimension,
    signature: ExtensorSignature,
    domain: DomainBox,
    /// `entries[row][col]`: coefficient of output blade `col` in the image
    /// of the row's slot blades.
    entries: Vec<Vec<FieldExpr>>,
}

impl ExtensorField {
    pub fn new(
        dimension: Dimension,
        signature: ExtensorSignature,
        domain: DomainBox,
        entries: Vec<Vec<FieldExpr>>,
    ) -> Result<Self, ExtensorError> {
        let rows = slot_rows(&signature, dimension);
        let cols = signature.output.basis_masks(dimension).len();
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols) {
            return Err(ExtensorError::TableShape {
                expected: rows.len(),
                found: entries.len(),
            });
        }
        Ok(ExtensorField {
            dimension,
            signature,
            domain,
            entries,
        })
    }

    pub fn signature(&self) -> &ExtensorSignature {
        &self.signature
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn entries(&self) -> &[Vec<FieldExpr>] {
        &self.entries
    }

    /// The constant identity (1,1)-extensor field.
    pub fn identity(dimension: Dimension, domain: DomainBox) -> Self {
        let n = dimension.n();
        let entries = (0..n)
            .map(|mu| {
                (0..n)
                    .map(|nu| {
                        FieldExpr::new(
                            build::constant(if mu == nu { 1.0 } else { 0.0 }),
                            dimension,
                        )
                    })
                    .collect()
            })
            .collect();
        ExtensorField {
            dimension,
            signature: ExtensorSignature::vector_to_vector(),
            domain,
            entries,
        }
    }

    /// Evaluate the table at a point.
    pub fn evaluate_at(&self, point: &[f64]) -> Result<Extensor, ExtensorError> {
        let out_basis = self.signature.output.basis_masks(self.dimension);
        let table = self
            .entries
            .iter()
            .map(|row| {
                let mut image = Multivector::zero(self.dimension);
                for (col, expr) in row.iter().enumerate() {
                    image.set_coefficient(out_basis[col], evaluate_scalar(expr, point)?);
                }
                Ok(image)
            })
            .collect::<Result<Vec<_>, ExtensorError>>()?;
        Extensor::new(self.dimension, self.signature.clone(), table)
    }

    /// Apply to field values at a point: `t_(p)(X_1(p), ..., X_k(p))`.
    pub fn apply(
        &self,
        args: &[&MultivectorField],
        point: &[f64],
    ) -> Result<Multivector, ExtensorError> {
        if !self.domain.contains(point) {
            return Err(ExtensorError::Eval(EvalError::OutOfDomain {
                point: point.to_vec(),
            }));
        }
        let values = args
            .iter()
            .map(|f| f.evaluate(point))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&Multivector> = values.iter().collect();
        self.evaluate_at(point)?.apply(&refs)
    }

    /// Pointwise adjoint field (single slot): transposed table entries.
    pub fn adjoint(&self) -> Result<ExtensorField, ExtensorError> {
        if self.signature.arity() != 1 {
            return Err(ExtensorError::AdjointArity(self.signature.arity()));
        }
        let rows = self.entries.len();
        let cols = self.entries.first().map_or(0, |r| r.len());
        let entries = (0..cols)
            .map(|c| (0..rows).map(|r| self.entries[r][c].clone()).collect())
            .collect();
        Ok(ExtensorField {
            dimension: self.dimension,
            signature: ExtensorSignature {
                slots: vec![self.signature.output],
                output: self.signature.slots[0],
            },
            domain: self.domain.clone(),
            entries,
        })
    }

    /// The a-directional ordinary derivative of the field: every table entry
    /// is replaced by its own a-DOD. Equivalent to the defining expansion
    /// `(a.D t)(X_1, ..) = a.D(t(X_1, ..)) - sum_i t(.., a.D X_i, ..)`
    /// because constant-blade arguments have vanishing derivative; the
    /// equivalence is what the check suite verifies. Preserves the type.
    pub fn dod(&self, a: &Direction) -> Result<ExtensorField, ExtensorError> {
        if a.dimension() != self.dimension {
            return Err(ExtensorError::DimensionMismatch {
                left: self.dimension.n(),
                right: a.dimension().n(),
            });
        }
        let n = self.dimension.n();
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entry| {
                        let mut sum = build::constant(0.0);
                        for mu in 1..=n {
                            let partial = differentiate(entry, mu);
                            sum = build::add(
                                sum,
                                build::product(
                                    BinOp::Geometric,
                                    a.coefficient_expr(mu),
                                    partial.root,
                                ),
                            );
                        }
                        FieldExpr::new(sum, self.dimension)
                    })
                    .collect()
            })
            .collect();
        Ok(ExtensorField {
            dimension: self.dimension,
            signature: self.signature.clone(),
            domain: self.domain.clone(),
            entries,
        })
    }

    /// The induced smooth multivector field `p -> t_(p)(X_1(p), ..., X_k(p))`,
    /// composed symbolically: blade coefficients are extracted with the
    /// scalar product, so the result stays inside the expression language.
    pub fn induced_operator(
        &self,
        args: &[&MultivectorField],
    ) -> Result<MultivectorField, ExtensorError> {
        if args.len() != self.signature.arity() {
            return Err(ExtensorError::ArityMismatch {
                expected: self.signature.arity(),
                found: args.len(),
            });
        }
        for arg in args {
            if arg.dimension() != self.dimension {
                return Err(ExtensorError::DimensionMismatch {
                    left: self.dimension.n(),
                    right: arg.dimension().n(),
                });
            }
        }
        let rows = slot_rows(&self.signature, self.dimension);
        let out_basis = self.signature.output.basis_masks(self.dimension);
        let mut sum = build::constant(0.0);
        for (row_idx, row) in rows.iter().enumerate() {
            // product of the arguments' blade coefficients for this row
            let mut weight = build::constant(1.0);
            for (&mask, arg) in row.iter().zip(args) {
                let coeff = build::product(
                    BinOp::ScalarProduct,
                    arg.expr().root.clone(),
                    build::blade(mask, self.dimension),
                );
                weight = build::product(BinOp::Geometric, weight, coeff);
            }
            for (col, &out_mask) in out_basis.iter().enumerate() {
                let entry = &self.entries[row_idx][col];
                let term = build::product(
                    BinOp::Geometric,
                    build::product(BinOp::Geometric, weight.clone(), entry.root.clone()),
                    build::blade(out_mask, self.dimension),
                );
                sum = build::add(sum, term);
            }
        }
        let mut domain = self.domain.clone();
        for arg in args {
            domain = domain.intersect(arg.domain());
        }
        Ok(MultivectorField::new(
            FieldExpr::new(sum, self.dimension),
            domain,
        )?)
    }

    /// Entry-wise sum of two fields with matching signatures.
    pub fn add(&self, other: &ExtensorField) -> Result<ExtensorField, ExtensorError> {
        if self.signature != other.signature {
            return Err(ExtensorError::TableShape {
                expected: self.entries.len(),
                found: other.entries.len(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(a, b)| {
                        FieldExpr::new(build::add(a.root.clone(), b.root.clone()), self.dimension)
                    })
                    .collect()
            })
            .collect();
        Ok(ExtensorField {
            dimension: self.dimension,
            signature: self.signature.clone(),
            domain: self.domain.intersect(&other.domain),
            entries,
        })
    }

    /// Scale every entry by a scalar field.
    pub fn scale_by(&self, factor: &FieldExpr) -> ExtensorField {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        FieldExpr::new(
                            build::product(BinOp::Geometric, factor.root.clone(), e.root.clone()),
                            self.dimension,
                        )
                    })
                    .collect()
            })
            .collect();
        ExtensorField {
            dimension: self.dimension,
            signature: self.signature.clone(),
            domain: self.domain.clone(),
            entries,
        }
    }
}

/// A vector-to-vector extensor field as an n x n matrix of scalar
/// expressions: `matrix[mu][nu]` is the `b_nu` component of the image of
/// `b_mu`. Invertibility is a pointwise numeric question, gated by a
/// condition-number bound.
#[derive(Debug, Clone)]
pub struct Extensor11Field {
    field: ExtensorField,
}

/// Condition estimate above which a matrix is treated as singular.
pub const SINGULARITY_BOUND: f64 = 1e12;

impl Extensor11Field {
    pub fn new(
        dimension: Dimension,
        domain: DomainBox,
        matrix: Vec<Vec<FieldExpr>>,
    ) -> Result<Self, ExtensorError> {
        let field = ExtensorField::new(
            dimension,
            ExtensorSignature::vector_to_vector(),
            domain,
            matrix,
        )?;
        Ok(Extensor11Field { field })
    }

    /// Build from a parsed `extensor` declaration.
    pub fn from_def(
        def: &ExtensorDef,
        dimension: Dimension,
        domain: DomainBox,
    ) -> Result<Self, ExtensorError> {
        Self::new(dimension, domain, def.entries.clone())
    }

    pub fn identity(dimension: Dimension, domain: DomainBox) -> Self {
        Extensor11Field {
            field: ExtensorField::identity(dimension, domain),
        }
    }

    pub fn as_extensor_field(&self) -> &ExtensorField {
        &self.field
    }

    pub fn into_extensor_field(self) -> ExtensorField {
        self.field
    }

    pub fn dimension(&self) -> Dimension {
        self.field.dimension
    }

    pub fn matrix(&self) -> &[Vec<FieldExpr>] {
        &self.field.entries
    }

    /// The numeric matrix at a point: row mu, column nu.
    pub fn evaluate_matrix(&self, point: &[f64]) -> Result<Vec<Vec<f64>>, ExtensorError> {
        self.field
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| evaluate_scalar(e, point).map_err(ExtensorError::from))
                    .collect()
            })
            .collect()
    }

    /// Image of a vector at a point.
    pub fn apply_vector(
        &self,
        vector: &Multivector,
        point: &[f64],
    ) -> Result<Multivector, ExtensorError> {
        let refs = [vector];
        self.field.evaluate_at(point)?.apply(&refs)
    }

    /// Transpose field, the adjoint with respect to the blade scalar product.
    pub fn adjoint(&self) -> Extensor11Field {
        Extensor11Field {
            field: self.field.adjoint().expect("arity 1"),
        }
    }

    /// 1-norm condition estimate at a point; `Err(Singular)` past the bound.
    pub fn condition_at(&self, point: &[f64]) -> Result<f64, ExtensorError> {
        let m = self.evaluate_matrix(point)?;
        match invert(&m) {
            Some(inv) => {
                let cond = norm1(&m) * norm1(&inv);
                if cond > SINGULARITY_BOUND {
                    Err(ExtensorError::Singular {
                        condition: cond,
                        point: point.to_vec(),
                    })
                } else {
                    Ok(cond)
                }
            }
            None => Err(ExtensorError::Singular {
                condition: f64::INFINITY,
                point: point.to_vec(),
            }),
        }
    }

    /// Numeric inverse matrix at a point, gated by the condition bound.
    pub fn invert_at(&self, point: &[f64]) -> Result<Vec<Vec<f64>>, ExtensorError> {
        self.condition_at(point)?;
        let m = self.evaluate_matrix(point)?;
        Ok(invert(&m).expect("condition check passed"))
    }
}

fn norm1(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|col| (0..n).map(|row| m[row][col].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Gauss-Jordan inverse with partial pivoting; `None` on a vanishing pivot.
fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..n {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[row][j] -= factor * a[col][j];
                        inv[row][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}
