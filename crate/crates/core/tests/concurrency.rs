//! The concurrency contract: every value is immutable after construction
//! and every operation is pure, so values share and transfer freely across
//! threads.

use mvf_core::algebra::{Dimension, Multivector};
use mvf_core::charts::Chart;
use mvf_core::dsl::{parse, parse_expression};
use mvf_core::extensor::ExtensorField;
use mvf_core::{
    CheckReport, Direction, DomainBox, FieldExpr, FieldFile, MultivectorField, VectorField,
};

fn assert_send_sync<T: Send + Sync>() {}

#[test]
fn core_types_are_send_and_sync() {
    assert_send_sync::<Dimension>();
    assert_send_sync::<Multivector>();
    assert_send_sync::<FieldExpr>();
    assert_send_sync::<FieldFile>();
    assert_send_sync::<DomainBox>();
    assert_send_sync::<MultivectorField>();
    assert_send_sync::<VectorField>();
    assert_send_sync::<Direction>();
    assert_send_sync::<ExtensorField>();
    assert_send_sync::<Chart>();
    assert_send_sync::<CheckReport>();
}

#[test]
fn fields_evaluate_concurrently_with_identical_results() {
    let dim = Dimension::new(2).unwrap();
    let field = MultivectorField::from_expr(
        parse_expression("sin(x1)*b1 + x1*x2*(b1^b2)", dim).unwrap(),
    );
    let field = std::sync::Arc::new(field);
    let sequential: Vec<Multivector> = (0..32)
        .map(|i| {
            let t = i as f64 / 40.0;
            field.evaluate(&[t, -t]).unwrap()
        })
        .collect();
    let handles: Vec<_> = (0..32)
        .map(|i| {
            let field = field.clone();
            std::thread::spawn(move || {
                let t = i as f64 / 40.0;
                field.evaluate(&[t, -t]).unwrap()
            })
        })
        .collect();
    for (i, handle) in handles.into_iter().enumerate() {
        assert_eq!(handle.join().unwrap(), sequential[i]);
    }
}

#[test]
fn parsed_files_share_across_threads() {
    let file = std::sync::Arc::new(
        parse("dim 2\nfield pos = x1*b1 + x2*b2").unwrap(),
    );
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let file = file.clone();
            std::thread::spawn(move || file.render())
        })
        .collect();
    let first = file.render();
    for handle in handles {
        assert_eq!(handle.join().unwrap(), first);
    }
}
