#![allow(dead_code)]

use indicator_design::model::{InformationStructure, ModelInstance};
use proptest::prelude::*;

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

fn stochastic_rows(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.05f64..1.0, cols), rows)
        .prop_map(|m| m.into_iter().map(normalize).collect())
}

/// Full-support instance with `|X|` outcomes and `|E|` efforts; `c` is
/// increasing from `c(e_1) = 0`.
pub fn model_with(nx: usize, ne: usize) -> impl Strategy<Value = ModelInstance> {
    (
        prop::collection::vec(0.0f64..2.0, nx),
        prop::collection::vec(0.01f64..0.3, ne - 1),
        stochastic_rows(ne, nx),
    )
        .prop_map(|(g, steps, f)| {
            let mut c = vec![0.0];
            for s in steps {
                c.push(c.last().unwrap() + s);
            }
            ModelInstance::from_arrays(&g, &c, f).unwrap()
        })
}

pub fn model(max: usize) -> impl Strategy<Value = ModelInstance> {
    (2..=max, 2..=max).prop_flat_map(|(nx, ne)| model_with(nx, ne))
}

pub fn structure(nx: usize, max_signals: usize) -> impl Strategy<Value = InformationStructure> {
    (1..=max_signals)
        .prop_flat_map(move |k| stochastic_rows(nx, k))
        .prop_map(|pi| InformationStructure::from_matrix(pi).unwrap())
}

pub fn model_and_structure(max: usize) -> impl Strategy<Value = (ModelInstance, InformationStructure)> {
    model(max).prop_flat_map(move |m| {
        let nx = m.num_outcomes();
        (Just(m), structure(nx, 4))
    })
}

/// `|a - b| <= tol * max(1, |a|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}
