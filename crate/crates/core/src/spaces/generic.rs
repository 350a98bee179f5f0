//! User-supplied metrics given as expression strings in `x0 … x{n-1}`.

use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node,
    Value,
};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Compiled metric expressions; `pi` is predefined.
pub struct ExpressionMetric {
    n: usize,
    entries: Vec<Node<DefaultNumericTypes>>,
}

impl ExpressionMetric {
    pub fn parse(rows: &[Vec<String>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config(
                "generic metric must be a square matrix of expressions".into(),
            ));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            for (b, src) in row.iter().enumerate() {
                let node = build_operator_tree::<DefaultNumericTypes>(src)
                    .map_err(|e| Error::Config(format!("metric entry ({a},{b}) `{src}`: {e}")))?;
                entries.push(node);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Evaluates and symmetrizes `g(x)`; entries that fail to evaluate become NaN.
    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (i, xi) in x.iter().enumerate() {
            // Setting a float on a fresh context cannot fail.
            let _ = ctx.set_value(format!("x{i}"), Value::Float(*xi));
        }
        let _ = ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI));
        let raw: Vec<f64> = self
            .entries
            .iter()
            .map(|e| e.eval_number_with_context(&ctx).unwrap_or(f64::NAN))
            .collect();
        DMatrix::from_fn(n, n, |a, b| 0.5 * (raw[a * n + b] + raw[b * n + a]))
    }
}
