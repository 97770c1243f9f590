//! Monotone transforms of a metric: `d_f(x,y) = f(d(x,y))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{malformed, Error, Result};
use crate::rational::Rational;
use crate::space::{DistanceMatrix, UltraSpace};

/// Step function with right-closed steps: `f(t) = v_i` for
/// `t_{i-1} < t <= t_i`, and `tail` past the last threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    pub steps: Vec<(Rational, Rational)>,
    pub tail: Option<Rational>,
}

impl StepFunction {
    pub fn new(steps: Vec<(Rational, Rational)>, tail: Option<Rational>) -> Result<Self> {
        if steps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return malformed("step thresholds must be strictly increasing");
        }
        Ok(StepFunction { steps, tail })
    }

    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        for (th, v) in &self.steps {
            if t <= th {
                return Some(v.clone());
            }
        }
        self.tail.clone()
    }
}

/// Anything usable as the `f` of a metric transform.
pub trait ScaleFn {
    fn apply(&self, t: &Rational) -> Result<Rational>;
}

impl ScaleFn for StepFunction {
    fn apply(&self, t: &Rational) -> Result<Rational> {
        self.eval(t).ok_or_else(|| Error::OutOfWindow(format!("step function undefined at {t}")))
    }
}

impl<F: Fn(&Rational) -> Rational> ScaleFn for F {
    fn apply(&self, t: &Rational) -> Result<Rational> {
        Ok(self(t))
    }
}

/// Applies `f` entrywise to any distance matrix without validating monotonicity.
pub fn transform_matrix(m: &DistanceMatrix, f: &dyn ScaleFn) -> Result<DistanceMatrix> {
    let n = m.len();
    let mut rows = vec![Vec::with_capacity(n); n];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..n {
            row.push(f.apply(m.dist(i, j))?);
        }
    }
    DistanceMatrix::new(m.labels().to_vec(), rows)
}

/// `(U, d_f)`. The result is checked to be an ultrametric.
pub fn transform_metric(space: &UltraSpace, f: &dyn ScaleFn) -> Result<UltraSpace> {
    let vals = space.distance_values();
    let mut prev: Option<(Rational, Rational)> = None;
    for t in &vals {
        let v = f.apply(t)?;
        if t.is_zero() && !v.is_zero() {
            return malformed(format!("f(0) = {v}, expected 0"));
        }
        if t.is_positive() && !v.is_positive() {
            return malformed(format!("f({t}) = {v} is not positive"));
        }
        if let Some((pt, pv)) = &prev {
            if v < *pv {
                return malformed(format!("f decreases between {pt} and {t}"));
            }
        }
        prev = Some((t.clone(), v));
    }
    let m = transform_matrix(space.matrix(), f)?;
    let out = UltraSpace::from_matrix(m)
        .map_err(|e| Error::ContractViolation(format!("monotone transform lost ultrametricity: {e}")))?;
    Ok(out)
}

/// An integer map on the window `[lo, lo + values.len() - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaleMap {
    pub lo: i64,
    pub values: Vec<i64>,
}

impl ScaleMap {
    pub fn new(lo: i64, values: Vec<i64>) -> Self {
        ScaleMap { lo, values }
    }

    pub fn identity(lo: i64, hi: i64) -> Self {
        ScaleMap { lo, values: (lo..=hi).collect() }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> Option<i64> {
        if k < self.lo {
            return None;
        }
        self.values.get((k - self.lo) as usize).copied()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.lo + i as i64, v))
    }
}

impl fmt::Display for ScaleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{}:{}", self.lo, vs.join(","))
    }
}

/// `"lo:v1,v2,..."`, or `"v1,v2,..."` meaning `lo = 1`.
impl FromStr for ScaleMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, rest) = match s.split_once(':') {
            Some((lo, rest)) => {
                (lo.trim().parse::<i64>().map_err(|_| Error::Malformed(format!("bad start in {s:?}")))?, rest)
            }
            None => (1, s),
        };
        let values = rest
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<i64>().map_err(|_| Error::Malformed(format!("bad entry {p:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return malformed(format!("empty integer map {s:?}"));
        }
        Ok(ScaleMap { lo, values })
    }
}

/// `(U, d(γ))`: `t ∈ (2^γ(k-1), 2^γ(k)]` goes to `2^k`.
pub fn rescale_by_gamma(space: &UltraSpace, gamma: &ScaleMap) -> Result<UltraSpace> {
    if !gamma.is_strictly_increasing() {
        return malformed("rescaling map must be strictly increasing");
    }
    let g = gamma.clone();
    let f = move |t: &Rational| -> Option<Rational> {
        if t.is_zero() {
            return Some(Rational::zero());
        }
        for k in g.lo + 1..=g.hi() {
            let below = Rational::pow2(g.get(k - 1)?);
            let above = Rational::pow2(g.get(k)?);
            if *t > below && *t <= above {
                return Some(Rational::pow2(k));
            }
        }
        None
    };
    for t in space.distance_values() {
        if f(&t).is_none() {
            return Err(Error::OutOfWindow(format!(
                "distance {t} outside (2^{}, 2^{}]",
                gamma.values[0],
                gamma.values[gamma.values.len() - 1]
            )));
        }
    }
    transform_metric(space, &|t: &Rational| f(t).unwrap_or_else(Rational::zero))
}

/// `(U, d(n_i))`: `t >= 2^-n_1` goes to `1/2`, `t ∈ (2^-n_{i+1}, 2^-n_i]`
/// goes to `2^-i`.
pub fn rescale_by_sequence(space: &UltraSpace, seq: &[i64]) -> Result<UltraSpace> {
    if seq.is_empty() || seq[0] < 1 || seq.windows(2).any(|w| w[0] >= w[1]) {
        return malformed("sequence must be strictly increasing positive integers");
    }
    let s = seq.to_vec();
    let f = move |t: &Rational| -> Option<Rational> {
        if t.is_zero() {
            return Some(Rational::zero());
        }
        if *t >= Rational::pow2(-s[0]) {
            return Some(Rational::pow2(-1));
        }
        for i in 0..s.len() - 1 {
            if *t > Rational::pow2(-s[i + 1]) && *t <= Rational::pow2(-s[i]) {
                return Some(Rational::pow2(-(i as i64 + 1)));
            }
        }
        None
    };
    for t in space.distance_values() {
        if f(&t).is_none() {
            return Err(Error::OutOfWindow(format!(
                "distance {t} not above 2^-{}; sequence too short",
                seq[seq.len() - 1]
            )));
        }
    }
    transform_metric(space, &|t: &Rational| f(t).unwrap_or_else(Rational::zero))
}

/// For a metric that is not an ultrametric, finds a nondecreasing step
/// function with values in {0, 1, 2, 3} whose transform breaks the triangle
/// inequality. Returns the function and the offending triple.
pub fn find_breaking_transform(m: &DistanceMatrix) -> Option<(StepFunction, (usize, usize, usize))> {
    let mut vals: Vec<Rational> = Vec::new();
    for row in m.rows() {
        for v in row {
            if v.is_positive() && !vals.contains(v) {
                vals.push(v.clone());
            }
        }
    }
    vals.sort();
    let n = vals.len();
    let mut assign = vec![1i64; n];
    loop {
        let mut steps = vec![(Rational::zero(), Rational::zero())];
        for (t, &a) in vals.iter().zip(&assign) {
            steps.push((t.clone(), Rational::from_integer(a)));
        }
        let tail = steps.last().map(|s| s.1.clone());
        let f = StepFunction { steps, tail };
        if let Ok(tm) = transform_matrix(m, &f) {
            if let Some(t) = tm.metric_violation() {
                return Some((f, t));
            }
        }
        // next nondecreasing assignment in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if assign[i] < 3 {
                assign[i] += 1;
                let v = assign[i];
                for a in assign.iter_mut().skip(i + 1) {
                    *a = v;
                }
                break;
            }
        }
    }
}
