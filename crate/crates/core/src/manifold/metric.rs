use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::fd::d1_five_point;
use crate::numerics::{HyperDual, Real};

/// Metric tensor with its first and (optionally) second coordinate derivatives.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub n: usize,
    /// `g[a*n + b]`.
    pub g: Vec<f64>,
    /// `dg[(l*n + a)*n + b] = ∂_l g_ab`.
    pub dg: Vec<f64>,
    /// `ddg[((l*n + m)*n + a)*n + b] = ∂_l ∂_m g_ab`.
    pub ddg: Option<Vec<f64>>,
}

/// Levi-Civita connection data at a point.
#[derive(Clone, Debug)]
pub struct Connection {
    pub n: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[(l*n + a)*n + b] = ∂_l g_ab`.
    pub dg: Vec<f64>,
    /// `gamma[(k*n + i)*n + j] = Γ^k_ij`.
    pub gamma: Vec<f64>,
    /// `dgamma[((k*n + i)*n + j)*n + l] = ∂_l Γ^k_ij`.
    pub dgamma: Option<Vec<f64>>,
    /// Estimated absolute error of `dgamma` when it came from differencing.
    pub fd_error: Option<f64>,
}

impl Connection {
    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    /// Assembles Γ (and ∂Γ when second derivatives are present) from a metric jet.
    pub fn from_jet(jet: &MetricJet) -> Result<Self> {
        let n = jet.n;
        let g = DMatrix::from_row_slice(n, n, &jet.g);
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Metric(format!("g = {g}")))?;
        let g_inv = chol.inverse();
        let dg = &jet.dg;
        let d = |l: usize, a: usize, b: usize| dg[(l * n + a) * n + b];

        // Γ_{m,ij} then raise.
        let mut lower = vec![0.0; n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = 0.5 * (d(i, m, j) + d(j, m, i) - d(m, i, j));
                    lower[(m * n + i) * n + j] = v;
                    lower[(m * n + j) * n + i] = v;
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        s += g_inv[(k, m)] * lower[(m * n + i) * n + j];
                    }
                    gamma[(k * n + i) * n + j] = s;
                    gamma[(k * n + j) * n + i] = s;
                }
            }
        }

        let dgamma = jet.ddg.as_ref().map(|ddg| {
            let dd = |l: usize, m: usize, a: usize, b: usize| ddg[((l * n + m) * n + a) * n + b];
            // X_{m,ij,l} = ∂_l Γ_{m,ij} − ∂_l g_{mb} Γ^b_ij, then ∂_l Γ^k_ij = g^{km} X_{m,ij,l}.
            let mut x = vec![0.0; n * n * n * n];
            for m in 0..n {
                for i in 0..n {
                    for j in i..n {
                        for l in 0..n {
                            let mut v = 0.5 * (dd(l, i, m, j) + dd(l, j, m, i) - dd(l, m, i, j));
                            for b in 0..n {
                                v -= d(l, m, b) * gamma[(b * n + i) * n + j];
                            }
                            x[((m * n + i) * n + j) * n + l] = v;
                        }
                    }
                }
            }
            let mut out = vec![0.0; n * n * n * n];
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        for l in 0..n {
                            let mut s = 0.0;
                            for m in 0..n {
                                s += g_inv[(k, m)] * x[((m * n + i) * n + j) * n + l];
                            }
                            out[((k * n + i) * n + j) * n + l] = s;
                            out[((k * n + j) * n + i) * n + l] = s;
                        }
                    }
                }
            }
            out
        });

        Ok(Self {
            n,
            g,
            g_inv,
            dg: jet.dg.clone(),
            gamma,
            dgamma,
            fd_error: None,
        })
    }
}

/// Christoffel symbols `Γ^k_ij` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    pub values: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[(k * self.n + i) * self.n + j]
    }
}

/// Anything that can supply a metric jet on its coordinate domain.
pub trait MetricSource: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Validity predicate beyond the chart box.
    fn contains(&self, x: &[f64]) -> bool;

    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    fn jet(&self, x: &[f64], second: bool) -> MetricJet;

    /// True when derivatives are exact rather than differenced.
    fn analytic(&self) -> bool;

    fn connection(&self, x: &[f64], second: bool) -> Result<Connection> {
        Connection::from_jet(&self.jet(x, second))
    }
}

/// A metric given by a closed-form expression generic over the scalar type.
pub trait MetricFormula: Send + Sync + fmt::Debug + 'static {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    /// Writes the full symmetric matrix `g(x)` row-major into `g`.
    fn eval<T: Real>(&self, x: &[T], g: &mut [T]);
}

/// Exact derivatives of a [`MetricFormula`] via hyper-dual numbers.
#[derive(Debug)]
pub struct ExactMetric<F: MetricFormula>(pub F);

impl<F: MetricFormula> MetricSource for ExactMetric<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.0.contains(x)
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        self.0.eval(x, &mut g);
        DMatrix::from_row_slice(n, n, &g)
    }

    fn jet(&self, x: &[f64], second: bool) -> MetricJet {
        let n = self.dim();
        let nn = n * n;
        let mut g = vec![0.0; nn];
        let mut dg = vec![0.0; n * nn];
        let mut ddg = if second {
            Some(vec![0.0; nn * nn])
        } else {
            None
        };
        let mut hx = vec![HyperDual::default(); n];
        let mut out = vec![HyperDual::default(); nn];
        for l in 0..n {
            let m_range = if second { l..n } else { l..l + 1 };
            for m in m_range {
                for (i, h) in hx.iter_mut().enumerate() {
                    let e1 = if i == l { 1.0 } else { 0.0 };
                    let e2 = if second && i == m { 1.0 } else { 0.0 };
                    *h = HyperDual::new(x[i], e1, e2, 0.0);
                }
                self.0.eval(&hx, &mut out);
                if l == m {
                    for (ab, o) in out.iter().enumerate() {
                        g[ab] = o.re;
                        dg[l * nn + ab] = o.e1;
                    }
                }
                if let Some(ddg) = ddg.as_mut() {
                    for (ab, o) in out.iter().enumerate() {
                        ddg[(l * n + m) * nn + ab] = o.e12;
                        ddg[(m * n + l) * nn + ab] = o.e12;
                    }
                }
            }
        }
        MetricJet { n, g, dg, ddg }
    }

    fn analytic(&self) -> bool {
        true
    }
}

type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// A metric known only through point samples; derivatives by central differences.
pub struct SampledMetric {
    n: usize,
    f: Box<MetricFn>,
    predicate: Option<Box<dyn Fn(&[f64]) -> bool + Send + Sync>>,
    /// Step for differencing `g`.
    h: f64,
    /// Step for differencing the Christoffel symbols.
    h2: f64,
}

impl fmt::Debug for SampledMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledMetric")
            .field("n", &self.n)
            .field("h", &self.h)
            .finish()
    }
}

impl SampledMetric {
    /// `scale` is the characteristic coordinate length of the chart.
    pub fn new(
        n: usize,
        scale: f64,
        f: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            f: Box::new(f),
            predicate: None,
            h: 1e-4 * scale,
            h2: 1e-3 * scale,
        }
    }

    pub fn with_predicate(mut self, p: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.predicate = Some(Box::new(p));
        self
    }

    fn shifted(x: &[f64], l: usize, d: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y[l] += d;
        y
    }

    /// Metric and 4th-order differenced first derivatives.
    fn fd_jet(&self, x: &[f64]) -> MetricJet {
        let n = self.n;
        let nn = n * n;
        let g = (self.f)(x);
        let mut dg = vec![0.0; n * nn];
        for l in 0..n {
            let gm2 = (self.f)(&Self::shifted(x, l, -2.0 * self.h));
            let gm1 = (self.f)(&Self::shifted(x, l, -self.h));
            let gp1 = (self.f)(&Self::shifted(x, l, self.h));
            let gp2 = (self.f)(&Self::shifted(x, l, 2.0 * self.h));
            for a in 0..n {
                for b in 0..n {
                    dg[l * nn + a * n + b] =
                        d1_five_point(gm2[(a, b)], gm1[(a, b)], gp1[(a, b)], gp2[(a, b)], self.h);
                }
            }
        }
        let g = (0..nn).map(|k| g[(k / n, k % n)]).collect();
        MetricJet {
            n,
            g,
            dg,
            ddg: None,
        }
    }
}

impl MetricSource for SampledMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.predicate.as_ref().is_none_or(|p| p(x))
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        (self.f)(x)
    }

    fn jet(&self, x: &[f64], _second: bool) -> MetricJet {
        self.fd_jet(x)
    }

    fn analytic(&self) -> bool {
        false
    }

    fn connection(&self, x: &[f64], second: bool) -> Result<Connection> {
        let mut base = Connection::from_jet(&self.fd_jet(x))?;
        if !second {
            return Ok(base);
        }
        let n = self.n;
        let n3 = n * n * n;
        let mut dgamma = vec![0.0; n3 * n];
        let mut err: f64 = 0.0;
        for l in 0..n {
            let c: Vec<Connection> = [-2.0, -1.0, 1.0, 2.0]
                .iter()
                .map(|s| Connection::from_jet(&self.fd_jet(&Self::shifted(x, l, s * self.h2))))
                .collect::<Result<_>>()?;
            for idx in 0..n3 {
                let d4 = d1_five_point(
                    c[0].gamma[idx],
                    c[1].gamma[idx],
                    c[2].gamma[idx],
                    c[3].gamma[idx],
                    self.h2,
                );
                let d2 = (c[2].gamma[idx] - c[1].gamma[idx]) / (2.0 * self.h2);
                err = err.max((d4 - d2).abs());
                dgamma[idx * n + l] = d4;
            }
        }
        base.dgamma = Some(dgamma);
        base.fd_error = Some(err);
        Ok(base)
    }
}

/// Riemannian product; the metric is block diagonal in the concatenated coordinates.
#[derive(Debug)]
pub struct ProductMetric {
    factors: Vec<Arc<dyn MetricSource>>,
    offsets: Vec<usize>,
    n: usize,
}

impl ProductMetric {
    pub fn new(factors: Vec<Arc<dyn MetricSource>>) -> Self {
        let mut offsets = Vec::with_capacity(factors.len());
        let mut n = 0;
        for f in &factors {
            offsets.push(n);
            n += f.dim();
        }
        Self {
            factors,
            offsets,
            n,
        }
    }

    fn slice<'a>(&self, x: &'a [f64], k: usize) -> &'a [f64] {
        &x[self.offsets[k]..self.offsets[k] + self.factors[k].dim()]
    }
}

impl MetricSource for ProductMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &[f64]) -> bool {
        (0..self.factors.len()).all(|k| self.factors[k].contains(self.slice(x, k)))
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.n, self.n);
        for (k, f) in self.factors.iter().enumerate() {
            let o = self.offsets[k];
            let d = f.dim();
            g.view_mut((o, o), (d, d))
                .copy_from(&f.metric(self.slice(x, k)));
        }
        g
    }

    fn jet(&self, x: &[f64], second: bool) -> MetricJet {
        let n = self.n;
        let nn = n * n;
        let mut g = vec![0.0; nn];
        let mut dg = vec![0.0; n * nn];
        let mut ddg = if second {
            Some(vec![0.0; nn * nn])
        } else {
            None
        };
        for (k, f) in self.factors.iter().enumerate() {
            let o = self.offsets[k];
            let d = f.dim();
            let j = f.jet(self.slice(x, k), second);
            for a in 0..d {
                for b in 0..d {
                    g[(o + a) * n + o + b] = j.g[a * d + b];
                    for l in 0..d {
                        dg[(o + l) * nn + (o + a) * n + o + b] = j.dg[(l * d + a) * d + b];
                        if let (Some(out), Some(src)) = (ddg.as_mut(), j.ddg.as_ref()) {
                            for m in 0..d {
                                out[((o + l) * n + o + m) * nn + (o + a) * n + o + b] =
                                    src[((l * d + m) * d + a) * d + b];
                            }
                        }
                    }
                }
            }
        }
        MetricJet { n, g, dg, ddg }
    }

    fn analytic(&self) -> bool {
        self.factors.iter().all(|f| f.analytic())
    }
}

/// A Riemannian metric on a single coordinate box.
#[derive(Clone)]
pub struct ChartMetric {
    label: String,
    source: Arc<dyn MetricSource>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    center: Vec<f64>,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(
        label: impl Into<String>,
        source: Arc<dyn MetricSource>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        center: Vec<f64>,
    ) -> Result<Self> {
        let n = source.dim();
        if n < 2 {
            return Err(Error::Parameter(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        if lower.len() != n || upper.len() != n || center.len() != n {
            return Err(Error::Parameter(
                "chart box does not match the dimension".into(),
            ));
        }
        let m = Self {
            label: label.into(),
            source,
            lower,
            upper,
            center,
        };
        if !m.contains(&m.center) {
            return Err(Error::Parameter(
                "chart center lies outside the domain".into(),
            ));
        }
        Ok(m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn source(&self) -> &Arc<dyn MetricSource> {
        &self.source
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Default base point for experiments.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn analytic(&self) -> bool {
        self.source.analytic()
    }

    /// Curvature is always computable; for sampled metrics it carries an error estimate.
    pub fn curvature_available(&self) -> bool {
        true
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().all(|v| v.is_finite())
            && x.iter().zip(&self.lower).all(|(v, lo)| v > lo)
            && x.iter().zip(&self.upper).all(|(v, hi)| v < hi)
            && self.source.contains(x)
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { point: x.to_vec() })
        }
    }

    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check(x)?;
        let g = self.source.metric(x);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Metric(format!("non-finite metric at {x:?}")));
        }
        Ok(g)
    }

    pub fn connection(&self, x: &[f64], second: bool) -> Result<Connection> {
        self.check(x)?;
        self.source.connection(x, second)
    }

    pub fn inner(&self, x: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
        Ok(crate::numerics::linalg::inner(&self.metric(x)?, a, b))
    }

    pub fn norm(&self, x: &[f64], a: &[f64]) -> Result<f64> {
        Ok(self.inner(x, a, a)?.sqrt())
    }
}

/// Christoffel symbols of `metric` at `x`.
pub fn christoffel(metric: &ChartMetric, x: &[f64]) -> Result<Christoffel> {
    let c = metric.connection(x, false)?;
    Ok(Christoffel {
        n: c.n,
        values: c.gamma,
    })
}

/// A tangent vector with its cached metric norm.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub point: Vec<f64>,
    pub components: Vec<f64>,
    pub norm: f64,
}

impl TangentVector {
    pub fn new(metric: &ChartMetric, point: &[f64], components: &[f64]) -> Result<Self> {
        if components.len() != metric.dim() {
            return Err(Error::Parameter("vector dimension mismatch".into()));
        }
        let norm = metric.norm(point, components)?;
        Ok(Self {
            point: point.to_vec(),
            components: components.to_vec(),
            norm,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            point: self.point.clone(),
            components: self.components.iter().map(|c| c * s).collect(),
            norm: self.norm * s.abs(),
        }
    }

    pub fn unit(&self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::Parameter("zero vector has no direction".into()));
        }
        let mut u = self.scaled(1.0 / self.norm);
        u.norm = 1.0;
        Ok(u)
    }
}
