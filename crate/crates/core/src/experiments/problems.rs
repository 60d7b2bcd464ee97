//! Built-in and custom problems: response `f`, optional fixed partner `g`,
//! domain box and input density.

use std::sync::Arc;

use super::config::{BoundarySpec, ProblemName, ProblemSpec, SurrogateKind, SurrogateSpec, WeightSpec};
use super::expr::compile;
use crate::error::{Error, Result};
use crate::pushforward::{build_quadrature, DensityWeight, ParameterBox, ParameterQuadrature, QuadratureScheme, ResponseFn};
use crate::surrogates::{Boundary, JacobiBasis, SurrogateModel};

/// A resolved problem ready for sweeps and audits.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub f: ResponseFn,
    /// Fixed comparison function; when absent a surrogate of `f` is used.
    pub g: Option<ResponseFn>,
    pub bbox: ParameterBox,
    pub weight: DensityWeight,
    /// Monotone pieces of `f`, when declared.
    pub pieces: Option<Vec<(f64, f64)>>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem").field("name", &self.name).field("bbox", &self.bbox).field("weight", &self.weight).finish()
    }
}

impl Problem {
    pub fn from_spec(spec: &ProblemSpec) -> Result<Problem> {
        let reject = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::Config(format!("field {field:?} does not apply to problem {:?}", spec.name)))
            } else {
                Ok(())
            }
        };
        let custom = spec.name == ProblemName::Custom;
        reject("delta", spec.delta.is_some() && spec.name != ProblemName::OscillatoryG)?;
        reject("k", spec.k.is_some() && spec.name != ProblemName::FkAtom)?;
        reject("f", spec.f.is_some() && !custom)?;
        reject("g", spec.g.is_some() && !custom)?;

        let (default_lo, default_hi) = match spec.name {
            ProblemName::TanhPaper => (-1.0, 1.0),
            ProblemName::Oscillator => (1.0, 2.0),
            ProblemName::OscillatoryG | ProblemName::FkAtom => (0.0, 1.0),
            ProblemName::Custom => (f64::NAN, f64::NAN),
        };
        let bbox = match &spec.domain {
            Some(d) => ParameterBox::new(d.lower.clone(), d.upper.clone())?,
            None if custom => return Err(Error::Config("custom problems need a domain".into())),
            None => ParameterBox::interval(default_lo, default_hi)?,
        };
        if !custom && bbox.dim() != 1 {
            return Err(Error::Config(format!("problem {:?} is one-dimensional", spec.name)));
        }
        let weight = match spec.weight.as_ref().unwrap_or(&WeightSpec::Uniform {}) {
            WeightSpec::Uniform {} => DensityWeight::uniform(&bbox),
            WeightSpec::Jacobi { beta1, beta2 } => DensityWeight::jacobi(&bbox, *beta1, *beta2)?,
        };

        let (name, f, g): (String, ResponseFn, Option<ResponseFn>) = match spec.name {
            ProblemName::TanhPaper => ("tanh-paper".into(), Arc::new(|x: &[f64]| 0.5 * x[0] + (9.0 * x[0]).tanh()), None),
            ProblemName::Oscillator => ("oscillator".into(), Arc::new(|x: &[f64]| x[0] * x[0]), None),
            ProblemName::OscillatoryG => {
                let delta = spec.delta.unwrap_or(1e-3);
                if !(delta > 0.0) || !delta.is_finite() {
                    return Err(Error::Config(format!("delta must be positive, got {delta}")));
                }
                let g: ResponseFn = Arc::new(move |x: &[f64]| x[0] + delta * (x[0] / (10.0 * delta)).sin());
                (format!("oscillatory-g(delta={delta})"), Arc::new(|x: &[f64]| x[0]), Some(g))
            }
            ProblemName::FkAtom => {
                let k = spec.k.unwrap_or(2);
                if k == 0 {
                    return Err(Error::Config("fk-atom needs k >= 1".into()));
                }
                let f: ResponseFn = Arc::new(move |x: &[f64]| if x[0] <= 0.5 { 0.0 } else { (x[0] - 0.5).powi(k as i32) });
                (format!("fk-atom(k={k})"), f, None)
            }
            ProblemName::Custom => {
                let src = spec.f.as_deref().ok_or_else(|| Error::Config("custom problems need an expression f".into()))?;
                let f = compile(src, bbox.dim())?;
                let g = spec.g.as_deref().map(|s| compile(s, bbox.dim())).transpose()?;
                (format!("custom(f={src})"), f, g)
            }
        };

        let pieces = match &spec.pieces {
            Some(p) => {
                if bbox.dim() != 1 {
                    return Err(Error::Config("monotone pieces apply to 1D problems only".into()));
                }
                let pieces: Vec<(f64, f64)> = p.iter().map(|&[a, b]| (a, b)).collect();
                for &(a, b) in &pieces {
                    if !(a < b) || !bbox.contains(&[a], 0.0) || !bbox.contains(&[b], 0.0) {
                        return Err(Error::Config(format!("piece [{a}, {b}] is not a subinterval of the domain")));
                    }
                }
                Some(pieces)
            }
            None => None,
        };

        Ok(Problem { name, f, g, bbox, weight, pieces })
    }

    pub fn builtin(name: ProblemName) -> Result<Problem> {
        Self::from_spec(&ProblemSpec::named(name))
    }

    /// Reference cells per axis: 4000 in 1D, 400 in 2D, 100 in 3D.
    pub fn default_resolution(&self) -> usize {
        match self.bbox.dim() {
            1 => 4000,
            2 => 400,
            _ => 100,
        }
    }

    /// Midpoint reference quadrature with `m` cells per axis.
    pub fn quadrature(&self, m: usize) -> Result<ParameterQuadrature> {
        build_quadrature(&self.bbox, &self.weight, m, QuadratureScheme::MidpointGrid)
    }

    /// Orthonormal basis matching the input density.
    pub fn basis(&self, max_degree: usize) -> Result<JacobiBasis> {
        match self.weight.kind() {
            crate::pushforward::WeightKind::Uniform => Ok(JacobiBasis::legendre(max_degree)),
            crate::pushforward::WeightKind::Jacobi { beta1, beta2 } => JacobiBasis::new(beta1, beta2, max_degree),
            crate::pushforward::WeightKind::Custom => {
                Err(Error::Unsupported("gPC needs a uniform or Jacobi input density".into()))
            }
        }
    }

    /// Surrogate of `f` with `n` nodes per axis.
    pub fn fit_surrogate(&self, spec: &SurrogateSpec, n: usize) -> Result<SurrogateModel> {
        let d = self.bbox.dim();
        let one_d = |kind: &str| -> Result<(f64, f64)> {
            if d == 1 {
                Ok((self.bbox.lower()[0], self.bbox.upper()[0]))
            } else {
                Err(Error::Unsupported(format!("{kind} surrogates are one-dimensional; domain has dimension {d}")))
            }
        };
        let f = self.f.as_ref();
        match spec.kind {
            SurrogateKind::Pwl => {
                let (lo, hi) = one_d("pwl")?;
                SurrogateModel::pwl(f, lo, hi, n)
            }
            SurrogateKind::Spline => {
                let (lo, hi) = one_d("spline")?;
                let boundary = match spec.boundary.unwrap_or(BoundarySpec::NotAKnot) {
                    BoundarySpec::NotAKnot => Boundary::NotAKnot,
                    BoundarySpec::Natural => Boundary::Natural,
                };
                SurrogateModel::spline(f, lo, hi, n, boundary)
            }
            SurrogateKind::TensorSpline => SurrogateModel::tensor_spline(f, &self.bbox, n, n),
            SurrogateKind::Gpc => {
                let (lo, hi) = one_d("gpc")?;
                SurrogateModel::gpc(f, &self.basis(n)?, n, lo, hi)
            }
        }
    }
}

/// Split `[lo, hi]` at the interior extrema of `h`.
///
/// `h` is sampled on `samples + 1` Chebyshev–Lobatto points, which cluster
/// near the ends where polynomial surrogates oscillate fastest; each sign
/// change of the sampled differences is refined by golden-section search.
/// Equal neighbouring samples mean a flat stretch and are reported as an error.
pub fn detect_monotone_pieces(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    let n = samples.max(8);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let xs: Vec<f64> = (0..=n)
        .map(|i| match i {
            0 => lo,
            _ if i == n => hi,
            _ => mid - half * (std::f64::consts::PI * i as f64 / n as f64).cos(),
        })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    if let Some(i) = vs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteAtNode { node: vec![xs[i]], value: vs[i] });
    }
    let signs: Vec<f64> = vs.windows(2).map(|w| (w[1] - w[0]).signum() * ((w[1] != w[0]) as u8 as f64)).collect();
    if let Some(i) = signs.iter().position(|&s| s == 0.0) {
        return Err(Error::Hypothesis(format!("h is flat on [{}, {}]", xs[i], xs[i + 1])));
    }
    let mut cuts = vec![lo];
    for i in 1..signs.len() {
        if signs[i] != signs[i - 1] {
            let maximize = signs[i - 1] > 0.0;
            cuts.push(golden_extremum(h, xs[i - 1], xs[i + 1], maximize));
        }
    }
    cuts.push(hi);
    Ok(cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect())
}

fn golden_extremum(h: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let score = |x: f64| if maximize { -h(x) } else { h(x) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{DomainSpec, ExperimentConfig};

    #[test]
    fn builtins_resolve() {
        let p = Problem::builtin(ProblemName::TanhPaper).unwrap();
        assert_eq!(p.bbox, ParameterBox::interval(-1.0, 1.0).unwrap());
        assert!(((p.f)(&[0.5]) - (0.25 + 4.5f64.tanh())).abs() < 1e-15);
        let o = Problem::builtin(ProblemName::OscillatoryG).unwrap();
        assert!(((o.g.as_ref().unwrap())(&[0.3]) - (0.3 + 1e-3 * 30f64.sin())).abs() < 1e-15);
        let fk = Problem::builtin(ProblemName::FkAtom).unwrap();
        assert_eq!((fk.f)(&[0.25]), 0.0);
        assert!(((fk.f)(&[0.75]) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn rejects_misplaced_fields() {
        let mut s = ProblemSpec::named(ProblemName::TanhPaper);
        s.delta = Some(0.1);
        assert!(Problem::from_spec(&s).is_err());
        let mut c = ProblemSpec::named(ProblemName::Custom);
        c.f = Some("x".into());
        assert!(Problem::from_spec(&c).is_err());
        c.domain = Some(DomainSpec { lower: vec![0.0, 0.0], upper: vec![1.0, 1.0] });
        c.f = Some("x*y + z".into());
        assert!(Problem::from_spec(&c).is_err());
        c.f = Some("x*y".into());
        assert_eq!(Problem::from_spec(&c).unwrap().default_resolution(), 400);
    }

    #[test]
    fn custom_problem_from_json() {
        let cfg = ExperimentConfig::from_json(
            r#"{"problem": {"name": "custom", "f": "3*x - 3", "g": "2*x - 2",
                "domain": {"lower": [0], "upper": [1]}, "pieces": [[0, 1]]}}"#,
        )
        .unwrap();
        let p = Problem::from_spec(cfg.problem.as_ref().unwrap()).unwrap();
        assert_eq!((p.g.unwrap())(&[0.5]), -1.0);
        assert_eq!(p.pieces, Some(vec![(0.0, 1.0)]));
    }

    #[test]
    fn surrogates_by_kind() {
        let p = Problem::builtin(ProblemName::TanhPaper).unwrap();
        for kind in [SurrogateKind::Pwl, SurrogateKind::Spline, SurrogateKind::Gpc] {
            let g = p.fit_surrogate(&SurrogateSpec::of(kind), 16).unwrap();
            assert!(g.evaluate(&[0.1]).unwrap().is_finite());
        }
        assert!(p.fit_surrogate(&SurrogateSpec::of(SurrogateKind::TensorSpline), 16).is_err());
    }

    #[test]
    fn pieces_of_polynomials() {
        let h = |x: f64| (x - 0.3) * (x - 0.3) * (x + 0.5);
        // Critical points: 0.3 and -0.2333...
        let pieces = detect_monotone_pieces(&h, -1.0, 1.0, 4096).unwrap();
        assert_eq!(pieces.len(), 3);
        assert!((pieces[0].1 + 7.0 / 30.0).abs() < 1e-7);
        assert!((pieces[1].1 - 0.3).abs() < 1e-7);
        assert_eq!(detect_monotone_pieces(&|x: f64| x.exp(), 0.0, 1.0, 100).unwrap(), vec![(0.0, 1.0)]);
        assert!(detect_monotone_pieces(&|x: f64| if x < 0.5 { 0.0 } else { x }, 0.0, 1.0, 100).is_err());
    }
}
