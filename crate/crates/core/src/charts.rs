//! Secondary coordinate systems over the canonical chart.
//!
//! A chart is a pair of user-supplied transition expression lists: `forward`
//! gives the chart coordinates as functions of the canonical ones, `inverse`
//! gives the canonical coordinates back. The artifact validates roundtrips
//! rather than inverting symbolically. Frames, Jacobian fields and the chain
//! rule relating the two directional derivative operators all derive from
//! these expressions by symbolic differentiation.

use crate::algebra::{Dimension, Multivector};
use crate::calculus::{self, CalculusError};
use crate::domain::DomainBox;
use crate::dsl::{build, differentiate, evaluate_scalar, ChartDef, EvalError, FieldExpr};
use crate::extensor::{Extensor11Field, ExtensorError};
use crate::field::{Direction, FieldError, MultivectorField, VectorField};
use crate::report::{CheckReport, ResidualTracker};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("chart has {found} {what} expressions, expected {expected}")]
    WrongCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("point {point:?} is outside the chart's {side} domain")]
    OutOfDomain { side: &'static str, point: Vec<f64> },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Extensor(#[from] ExtensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// The canonical chart itself: the coordinate system everything else is
/// expressed against. A point's position vector is `x_o = sum x_o^mu b_mu`.
#[derive(Debug, Clone)]
pub struct CanonicalChart {
    pub dimension: Dimension,
    pub domain: DomainBox,
}

impl CanonicalChart {
    pub fn new(dimension: Dimension, domain: DomainBox) -> Self {
        CanonicalChart { dimension, domain }
    }

    /// Position vector of the point with the given canonical coordinates.
    pub fn position_vector(&self, coords: &[f64]) -> Result<Multivector, ChartError> {
        if !self.domain.contains(coords) {
            return Err(ChartError::OutOfDomain {
                side: "canonical",
                point: coords.to_vec(),
            });
        }
        Ok(Multivector::vector(self.dimension, coords).expect("length checked"))
    }
}

/// A secondary coordinate system given by forward/inverse transition
/// expressions against the canonical chart.
#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    dimension: Dimension,
    /// Chart coordinates as functions of canonical coordinates.
    forward: Vec<FieldExpr>,
    /// Canonical coordinates as functions of chart coordinates.
    inverse: Vec<FieldExpr>,
    /// Box on the chart-coordinate side.
    chart_domain: DomainBox,
    /// Box on the canonical side, when declared.
    canonical_domain: Option<DomainBox>,
    pub roundtrip_tol: f64,
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        dimension: Dimension,
        forward: Vec<FieldExpr>,
        inverse: Vec<FieldExpr>,
        chart_domain: DomainBox,
        canonical_domain: Option<DomainBox>,
    ) -> Result<Self, ChartError> {
        let n = dimension.n();
        if forward.len() != n {
            return Err(ChartError::WrongCount {
                what: "forward",
                expected: n,
                found: forward.len(),
            });
        }
        if inverse.len() != n {
            return Err(ChartError::WrongCount {
                what: "inverse",
                expected: n,
                found: inverse.len(),
            });
        }
        Ok(Chart {
            name: name.into(),
            dimension,
            forward,
            inverse,
            chart_domain,
            canonical_domain,
            roundtrip_tol: 1e-9,
        })
    }

    /// Build from a parsed `chart` block; undeclared boxes default to
    /// `[-1, 1]^n` on the chart side and stay open on the canonical side.
    pub fn from_def(
        name: impl Into<String>,
        def: &ChartDef,
        dimension: Dimension,
    ) -> Result<Self, ChartError> {
        Chart::new(
            name,
            dimension,
            def.forward.clone(),
            def.inverse.clone(),
            def.domain
                .clone()
                .unwrap_or_else(|| DomainBox::default_for(dimension.n())),
            def.canonical_domain.clone(),
        )
    }

    /// The identity chart: `x = x_o` both ways.
    pub fn identity(dimension: Dimension, domain: DomainBox) -> Self {
        let n = dimension.n();
        let coords = |_: ()| -> Vec<FieldExpr> {
            (1..=n)
                .map(|mu| FieldExpr::new(build::coord(mu), dimension))
                .collect()
        };
        Chart {
            name: "identity".into(),
            dimension,
            forward: coords(()),
            inverse: coords(()),
            chart_domain: domain.clone(),
            canonical_domain: Some(domain),
            roundtrip_tol: 1e-9,
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn chart_domain(&self) -> &DomainBox {
        &self.chart_domain
    }

    pub fn canonical_domain(&self) -> Option<&DomainBox> {
        self.canonical_domain.as_ref()
    }

    pub fn forward_exprs(&self) -> &[FieldExpr] {
        &self.forward
    }

    pub fn inverse_exprs(&self) -> &[FieldExpr] {
        &self.inverse
    }

    /// Chart coordinates of the point with the given canonical coordinates.
    pub fn forward_coords(&self, canonical: &[f64]) -> Result<Vec<f64>, ChartError> {
        if let Some(domain) = &self.canonical_domain {
            if !domain.contains(canonical) {
                return Err(ChartError::OutOfDomain {
                    side: "canonical",
                    point: canonical.to_vec(),
                });
            }
        }
        Ok(self
            .forward
            .iter()
            .map(|e| evaluate_scalar(e, canonical))
            .collect::<Result<_, _>>()?)
    }

    /// Canonical coordinates of the point with the given chart coordinates.
    pub fn inverse_coords(&self, chart: &[f64]) -> Result<Vec<f64>, ChartError> {
        if !self.chart_domain.contains(chart) {
            return Err(ChartError::OutOfDomain {
                side: "chart",
                point: chart.to_vec(),
            });
        }
        Ok(self
            .inverse
            .iter()
            .map(|e| evaluate_scalar(e, chart))
            .collect::<Result<_, _>>()?)
    }

    /// The transition map on position vectors: `x = sum phi^nu(x_o) b_nu`.
    pub fn varphi(&self, x_o: &Multivector) -> Result<Multivector, ChartError> {
        let coords = self.forward_coords(&x_o.vector_components())?;
        Ok(Multivector::vector(self.dimension, &coords).expect("length checked"))
    }

    /// Inverse transition map on position vectors.
    pub fn varphi_inverse(&self, x: &Multivector) -> Result<Multivector, ChartError> {
        let coords = self.inverse_coords(&x.vector_components())?;
        Ok(Multivector::vector(self.dimension, &coords).expect("length checked"))
    }

    /// Directional ordinary derivative with respect to this chart: the same
    /// coordinate-wise operator, applied to a field expressed in the chart's
    /// coordinates.
    pub fn dod_chart(
        &self,
        a: &Direction,
        x: &MultivectorField,
    ) -> Result<MultivectorField, ChartError> {
        Ok(calculus::dod(a, x)?)
    }

    /// Re-express a canonical-coordinates field in this chart's coordinates
    /// by composing through the inverse transition expressions.
    pub fn field_to_chart_coords(
        &self,
        x: &MultivectorField,
    ) -> Result<MultivectorField, ChartError> {
        let subs: Vec<_> = self.inverse.iter().map(|e| e.root.clone()).collect();
        let root = build::compose_coords(&x.expr().root, &subs);
        Ok(MultivectorField::new(
            FieldExpr::new(root, self.dimension),
            self.chart_domain.clone(),
        )?)
    }

    /// The covariant frame field: the mu-th member is
    /// `sum_nu (d inverse^nu / d x^mu) b_nu`, expressed in chart coordinates.
    pub fn covariant_frame(&self) -> Vec<VectorField> {
        (1..=self.dimension.n())
            .map(|mu| {
                let mut sum = build::constant(0.0);
                for (nu, inv) in self.inverse.iter().enumerate() {
                    let partial = differentiate(inv, mu);
                    let term = build::product(
                        crate::dsl::BinOp::Geometric,
                        partial.root,
                        build::basis(nu + 1),
                    );
                    sum = build::add(sum, term);
                }
                let field = MultivectorField::new(
                    FieldExpr::new(sum, self.dimension),
                    self.chart_domain.clone(),
                )
                .expect("box length matches");
                VectorField::new(field).expect("scalar times basis is grade 1")
            })
            .collect()
    }

    /// The contravariant frame field: the nu-th member is
    /// `sum_mu (d forward^nu / d x_o^mu) b^mu`, expressed in canonical
    /// coordinates.
    pub fn contravariant_frame(&self) -> Vec<VectorField> {
        let domain = self
            .canonical_domain
            .clone()
            .unwrap_or_else(|| DomainBox::default_for(self.dimension.n()));
        (0..self.dimension.n())
            .map(|nu| {
                let mut sum = build::constant(0.0);
                for mu in 1..=self.dimension.n() {
                    let partial = differentiate(&self.forward[nu], mu);
                    let term = build::product(
                        crate::dsl::BinOp::Geometric,
                        partial.root,
                        build::basis(mu),
                    );
                    sum = build::add(sum, term);
                }
                let field =
                    MultivectorField::new(FieldExpr::new(sum, self.dimension), domain.clone())
                        .expect("box length matches");
                VectorField::new(field).expect("scalar times basis is grade 1")
            })
            .collect()
    }

    /// Contravariant frame re-expressed in chart coordinates, for pointwise
    /// comparison against the covariant frame.
    pub fn contravariant_frame_in_chart_coords(&self) -> Result<Vec<VectorField>, ChartError> {
        self.contravariant_frame()
            .into_iter()
            .map(|vf| {
                let composed = self.field_to_chart_coords(vf.field())?;
                Ok(VectorField::new(composed)?)
            })
            .collect()
    }

    /// The covariant and contravariant frames as a reciprocal pair, both
    /// parametrized by chart coordinates.
    pub fn frame_pair(&self) -> Result<FramePair, ChartError> {
        Ok(FramePair {
            covariant: self.covariant_frame(),
            contravariant: self.contravariant_frame_in_chart_coords()?,
        })
    }

    /// The Jacobian field `J(a) = a.D x_o` as a vector-to-vector extensor:
    /// matrix entries `d inverse^nu / d x^mu` in chart coordinates. Its rows
    /// are the covariant frame.
    pub fn jacobian(&self) -> Extensor11Field {
        let matrix = (1..=self.dimension.n())
            .map(|mu| {
                self.inverse
                    .iter()
                    .map(|inv| differentiate(inv, mu))
                    .collect()
            })
            .collect();
        Extensor11Field::new(self.dimension, self.chart_domain.clone(), matrix)
            .expect("square by construction")
    }

    /// The inverse Jacobian field `J^{-1}(a) = a.D_o x` with entries
    /// `d forward^nu / d x_o^mu`, in canonical coordinates. Its adjoint maps
    /// `b^nu` to the contravariant frame.
    pub fn jacobian_inverse(&self) -> Extensor11Field {
        let domain = self
            .canonical_domain
            .clone()
            .unwrap_or_else(|| DomainBox::default_for(self.dimension.n()));
        let matrix = (1..=self.dimension.n())
            .map(|mu| {
                self.forward
                    .iter()
                    .map(|fwd| differentiate(fwd, mu))
                    .collect()
            })
            .collect();
        Extensor11Field::new(self.dimension, domain, matrix).expect("square by construction")
    }

    /// Verify the roundtrips `forward(inverse(x)) = x` on chart-side samples
    /// and, when a canonical box is declared, `inverse(forward(x_o)) = x_o`
    /// on canonical-side samples.
    pub fn check_roundtrip(
        &self,
        chart_points: &[Vec<f64>],
        canonical_points: &[Vec<f64>],
        tol: f64,
    ) -> Result<CheckReport, ChartError> {
        let mut tracker = ResidualTracker::new();
        for c in chart_points {
            let q = self.inverse_coords(c)?;
            let back = self
                .forward
                .iter()
                .map(|e| evaluate_scalar(e, &q))
                .collect::<Result<Vec<_>, _>>()?;
            let residual = c
                .iter()
                .zip(&back)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            tracker.record(residual, c);
        }
        for q in canonical_points {
            let c = self.forward_coords(q)?;
            let back = self
                .inverse
                .iter()
                .map(|e| evaluate_scalar(e, &c))
                .collect::<Result<Vec<_>, _>>()?;
            let residual = q
                .iter()
                .zip(&back)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            tracker.record(residual, q);
        }
        Ok(tracker.into_report(
            format!("roundtrip_{}", self.name),
            "forward(inverse(x)) = x and inverse(forward(x_o)) = x_o",
            0,
            tol,
        ))
    }

    /// Verify the chain rule `J(a) . D_o X = a . D X` for a field given in
    /// canonical coordinates, sampling chart-side points. With `a = b_mu`
    /// this is the corollary `(b_mu . D x_o) . D_o X = b_mu . D X`.
    pub fn check_chain_rule(
        &self,
        x: &MultivectorField,
        a: &Direction,
        points: &[Vec<f64>],
        tol: f64,
    ) -> Result<CheckReport, ChartError> {
        let n = self.dimension.n();
        let jacobian = self.jacobian();
        let x_chart = self.field_to_chart_coords(x)?;
        // partials of both representations, precomputed symbolically
        let canonical_partials: Vec<_> = (1..=n).map(|mu| x.partial(mu)).collect();
        let chart_partials: Vec<_> = (1..=n).map(|mu| x_chart.partial(mu)).collect();

        let mut tracker = ResidualTracker::new();
        for c in points {
            let q = self.inverse_coords(c)?;
            let a_value = a.evaluate(c)?;
            let j_a = jacobian.apply_vector(&a_value, c)?;

            let mut lhs = Multivector::zero(self.dimension);
            for (nu, partial) in canonical_partials.iter().enumerate() {
                let weight = j_a.coefficient(1 << nu);
                if weight != 0.0 {
                    lhs = &lhs + &partial.evaluate_raw(&q)?.scale(weight);
                }
            }
            let mut rhs = Multivector::zero(self.dimension);
            for (mu, partial) in chart_partials.iter().enumerate() {
                let weight = a_value.coefficient(1 << mu);
                if weight != 0.0 {
                    rhs = &rhs + &partial.evaluate_raw(c)?.scale(weight);
                }
            }
            tracker.record(lhs.max_abs_diff(&rhs), c);
        }
        Ok(tracker.into_report(
            format!("chain_rule_{}", self.name),
            "J(a).D_o X = a.D X",
            0,
            tol,
        ))
    }
}

/// Covariant and contravariant frame fields of a chart, both in chart
/// coordinates, pointwise reciprocal.
#[derive(Debug, Clone)]
pub struct FramePair {
    pub covariant: Vec<VectorField>,
    pub contravariant: Vec<VectorField>,
}

impl FramePair {
    /// Largest deviation of `e_mu . e^nu` from the Kronecker delta over the
    /// sample points.
    pub fn reciprocity_residual(
        &self,
        points: &[Vec<f64>],
    ) -> Result<(f64, Option<Vec<f64>>), ChartError> {
        let mut tracker = ResidualTracker::new();
        for point in points {
            let mut worst = 0.0f64;
            for (mu, e) in self.covariant.iter().enumerate() {
                let ev = e.field().evaluate_raw(point)?;
                for (nu, r) in self.contravariant.iter().enumerate() {
                    let rv = r.field().evaluate_raw(point)?;
                    let expected = if mu == nu { 1.0 } else { 0.0 };
                    let residual = (ev
                        .scalar_product(&rv)
                        .map_err(CalculusError::from)?
                        - expected)
                        .abs();
                    worst = worst.max(residual);
                }
            }
            tracker.record(worst, point);
        }
        Ok((tracker.max_residual, tracker.worst_point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, parse_expression};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn polar() -> Chart {
        let src = "dim 2\nchart polar {\n\
             forward: sqrt(x1*x1 + x2*x2), atan2(x2, x1);\n\
             inverse: x1*cos(x2), x1*sin(x2);\n\
             domain: [0.5, 2] x [-1.2, 1.2];\n\
             canonical_domain: [0.5, 1.4] x [-0.9, 0.9];\n}";
        let file = parse(src).unwrap();
        Chart::from_def("polar", file.chart("polar").unwrap(), file.dimension).unwrap()
    }

    fn field(src: &str, n: usize) -> MultivectorField {
        MultivectorField::from_expr(parse_expression(src, dim(n)).unwrap())
    }

    fn chart_points(chart: &Chart, count: usize) -> Vec<Vec<f64>> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        (0..count)
            .map(|_| chart.chart_domain().sample(&mut rng))
            .collect()
    }

    #[test]
    fn identity_chart_maps_points_to_themselves() {
        let chart = Chart::identity(dim(2), DomainBox::default_for(2));
        let x_o = Multivector::vector(dim(2), &[0.3, -0.4]).unwrap();
        assert_eq!(chart.varphi(&x_o).unwrap(), x_o);
    }

    #[test]
    fn canonical_chart_position_vector() {
        let chart = CanonicalChart::new(dim(3), DomainBox::default_for(3));
        let x_o = chart.position_vector(&[0.1, -0.2, 0.3]).unwrap();
        assert_eq!(x_o, Multivector::vector(dim(3), &[0.1, -0.2, 0.3]).unwrap());
        assert!(matches!(
            chart.position_vector(&[2.0, 0.0, 0.0]),
            Err(ChartError::OutOfDomain { side: "canonical", .. })
        ));
    }

    #[test]
    fn polar_varphi_of_unit_diagonal() {
        let chart = polar();
        let x_o = Multivector::vector(dim(2), &[1.0, 0.9]).unwrap();
        let x = chart.varphi(&x_o).unwrap();
        let r = (1.0f64 + 0.81).sqrt();
        let theta = 0.9f64.atan2(1.0);
        assert!((x.coefficient(0b01) - r).abs() < 1e-15);
        assert!((x.coefficient(0b10) - theta).abs() < 1e-15);
    }

    #[test]
    fn polar_varphi_without_canonical_box() {
        // with no canonical-side box declared, (1, 1) maps to (sqrt 2, pi/4)
        let src = "dim 2\nchart polar {\n\
             forward: sqrt(x1*x1 + x2*x2), atan2(x2, x1);\n\
             inverse: x1*cos(x2), x1*sin(x2);\n\
             domain: [0.5, 2] x [-1.2, 1.2];\n}";
        let file = parse(src).unwrap();
        let chart = Chart::from_def("polar", file.chart("polar").unwrap(), file.dimension).unwrap();
        let x_o = Multivector::vector(dim(2), &[1.0, 1.0]).unwrap();
        let x = chart.varphi(&x_o).unwrap();
        assert!((x.coefficient(0b01) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((x.coefficient(0b10) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        // and back
        let back = chart.varphi_inverse(&x).unwrap();
        assert!(back.max_abs_diff(&x_o) <= 1e-15);
    }

    #[test]
    fn polar_roundtrip_on_sampled_points() {
        let chart = polar();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let chart_pts: Vec<Vec<f64>> =
            (0..100).map(|_| chart.chart_domain().sample(&mut rng)).collect();
        let canon_pts: Vec<Vec<f64>> = (0..100)
            .map(|_| chart.canonical_domain().unwrap().sample(&mut rng))
            .collect();
        let report = chart.check_roundtrip(&chart_pts, &canon_pts, 1e-9).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
    }

    #[test]
    fn polar_covariant_frame_matches_hand_derivatives() {
        let chart = polar();
        let frame = chart.covariant_frame();
        let point = [1.3, 0.7]; // (r, theta)
        let e1 = frame[0].evaluate(&point).unwrap();
        assert!((e1.coefficient(0b01) - 0.7f64.cos()).abs() < 1e-15);
        assert!((e1.coefficient(0b10) - 0.7f64.sin()).abs() < 1e-15);
        let e2 = frame[1].evaluate(&point).unwrap();
        assert!((e2.coefficient(0b01) + 1.3 * 0.7f64.sin()).abs() < 1e-15);
        assert!((e2.coefficient(0b10) - 1.3 * 0.7f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn polar_contravariant_frame_matches_hand_derivatives() {
        let chart = polar();
        let frame = chart.contravariant_frame();
        // at canonical point (x_o1, x_o2) with r^2 = x1^2 + x2^2:
        // grad theta = (-x2/r^2, x1/r^2)
        let q = [1.0, 0.5];
        let r2 = 1.25;
        let grad_theta = frame[1].field().evaluate_raw(&q).unwrap();
        assert!((grad_theta.coefficient(0b01) + 0.5 / r2).abs() < 1e-12);
        assert!((grad_theta.coefficient(0b10) - 1.0 / r2).abs() < 1e-12);
        // fd cross-check of the forward expression
        let fd = chart.forward_exprs()[1]
            .clone();
        let fd1 = crate::dsl::fd_partial(&fd, 1, &q, 1e-6).unwrap();
        assert!((grad_theta.coefficient(0b01) - fd1.scalar_part()).abs() < 1e-8);
    }

    #[test]
    fn frames_are_reciprocal_on_the_polar_chart() {
        let chart = polar();
        let pair = chart.frame_pair().unwrap();
        let points = chart_points(&chart, 60);
        let (residual, _) = pair.reciprocity_residual(&points).unwrap();
        assert!(residual <= 1e-9, "residual {residual}");
    }

    #[test]
    fn identity_chart_frames_are_fiducial() {
        let chart = Chart::identity(dim(3), DomainBox::default_for(3));
        let pair = chart.frame_pair().unwrap();
        let point = [0.1, 0.2, 0.3];
        for mu in 0..3 {
            let cov = pair.covariant[mu].evaluate(&point).unwrap();
            let con = pair.contravariant[mu].evaluate(&point).unwrap();
            let expected = Multivector::basis_vector(dim(3), mu + 1).unwrap();
            assert_eq!(cov, expected);
            assert_eq!(con, expected);
        }
    }

    #[test]
    fn jacobian_of_identity_chart_is_identity() {
        let chart = Chart::identity(dim(2), DomainBox::default_for(2));
        let j = chart.jacobian();
        let m = j.evaluate_matrix(&[0.4, -0.4]).unwrap();
        assert_eq!(m, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn polar_jacobian_at_quarter_turn() {
        let chart = polar();
        let j = chart.jacobian();
        // at (r, theta) = (2, pi/2): J(b1) = cos b1 + sin b2 = b2
        let point = [2.0, std::f64::consts::FRAC_PI_2];
        let b1 = Multivector::basis_vector(dim(2), 1).unwrap();
        let image = j.apply_vector(&b1, &point).unwrap();
        let b2 = Multivector::basis_vector(dim(2), 2).unwrap();
        assert!(image.max_abs_diff(&b2) < 1e-15);
    }

    #[test]
    fn jacobian_rows_are_the_covariant_frame() {
        let chart = polar();
        let j = chart.jacobian();
        let frame = chart.covariant_frame();
        for point in chart_points(&chart, 40) {
            for mu in 0..2 {
                let b_mu = Multivector::basis_vector(dim(2), mu + 1).unwrap();
                let image = j.apply_vector(&b_mu, &point).unwrap();
                let cov = frame[mu].evaluate(&point).unwrap();
                assert!(image.max_abs_diff(&cov) <= 1e-9);
            }
        }
    }

    #[test]
    fn jacobian_inverse_composes_to_identity() {
        let chart = polar();
        let j = chart.jacobian();
        let j_inv = chart.jacobian_inverse();
        for c in chart_points(&chart, 40) {
            let q = chart.inverse_coords(&c).unwrap();
            let m = j.evaluate_matrix(&c).unwrap();
            let m_inv = j_inv.evaluate_matrix(&q).unwrap();
            // row-vector convention: (M M_inv)[mu][nu] = delta
            for mu in 0..2 {
                for nu in 0..2 {
                    let prod: f64 = (0..2).map(|k| m[mu][k] * m_inv[k][nu]).sum();
                    let expected = if mu == nu { 1.0 } else { 0.0 };
                    assert!((prod - expected).abs() <= 1e-9, "at {c:?}");
                }
            }
        }
    }

    #[test]
    fn inverse_adjoint_images_are_the_contravariant_frame() {
        let chart = polar();
        let adjoint = chart.jacobian_inverse().adjoint();
        let frame = chart.contravariant_frame();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..40 {
            let q = chart.canonical_domain().unwrap().sample(&mut rng);
            for nu in 0..2 {
                let b_nu = Multivector::basis_vector(dim(2), nu + 1).unwrap();
                let image = adjoint.apply_vector(&b_nu, &q).unwrap();
                let contra = frame[nu].field().evaluate_raw(&q).unwrap();
                assert!(image.max_abs_diff(&contra) <= 1e-9);
            }
        }
    }

    #[test]
    fn chain_rule_on_identity_chart_is_exact() {
        let chart = Chart::identity(dim(2), DomainBox::default_for(2));
        let x = field("x1*x2*(b1^b2) + sin(x1)*b1", 2);
        let a = Direction::from_components(dim(2), &[1.0, 0.0]).unwrap();
        let points = vec![vec![0.3, 0.4], vec![-0.8, 0.9]];
        let report = chart.check_chain_rule(&x, &a, &points, 1e-12).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn chain_rule_on_polar_chart() {
        let chart = polar();
        let pos = field("x1*b1 + x2*b2", 2);
        let a = Direction::from_components(dim(2), &[1.0, 0.0]).unwrap();
        let points = chart_points(&chart, 100);
        let report = chart.check_chain_rule(&pos, &a, &points, 1e-8).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
        // corollary for each fiducial direction
        for mu in 1..=2 {
            let b_mu = Direction::constant(
                Multivector::basis_vector(dim(2), mu).unwrap(),
            )
            .unwrap();
            let report = chart.check_chain_rule(&pos, &b_mu, &points, 1e-8).unwrap();
            assert!(report.pass, "mu = {mu}: {}", report.max_residual);
        }
    }

    #[test]
    fn dod_chart_on_polar_radial_field() {
        // X = x1 b1 in polar coordinates (x1 = r): d/dr gives b1
        let chart = polar();
        let x = field("x1*b1", 2);
        let a = Direction::from_components(dim(2), &[1.0, 0.0]).unwrap();
        let d = chart.dod_chart(&a, &x).unwrap();
        let value = d.evaluate(&[0.9, 0.4]).unwrap();
        assert_eq!(value, Multivector::basis_vector(dim(2), 1).unwrap());
        // constant field derives to zero
        let c = field("b1^b2", 2);
        let dc = chart.dod_chart(&a, &c).unwrap();
        assert!(dc.evaluate(&[0.9, 0.4]).unwrap().is_zero());
    }

    #[test]
    fn out_of_domain_points_error() {
        let chart = polar();
        assert!(matches!(
            chart.inverse_coords(&[0.1, 0.0]),
            Err(ChartError::OutOfDomain { side: "chart", .. })
        ));
        assert!(matches!(
            chart.forward_coords(&[0.0, 0.0]),
            Err(ChartError::OutOfDomain { side: "canonical", .. })
        ));
    }
}
