//! Grid specifications shared by `sweep`, `gap-audit` and `delta`.

use clap::Args;
use misocache::rational::{self, int, parse_rational};
use misocache::{Alpha, Rational, SystemParams};

/// Integer list: comma separated items, each `a` or an inclusive range `a-b`.
pub fn parse_int_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("not an integer: {x:?}"));
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range {item:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(item)?),
        }
    }
    Ok(out)
}

/// Rational list: comma separated items, each a literal (`1/3`, `0.25`, `2`)
/// or an inclusive progression `start:step:end`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, String> {
    let mut out = Vec::new();
    let parse = |x: &str| parse_rational(x.trim()).map_err(|e| e.to_string());
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(parse(one)?),
            [start, step, end] => {
                let (mut x, step, end) = (parse(start)?, parse(step)?, parse(end)?);
                if step <= int(0) {
                    return Err(format!("progression step must be positive in {item:?}"));
                }
                while x <= end {
                    out.push(x.clone());
                    x += &step;
                }
            }
            _ => return Err(format!("expected value or start:step:end, got {item:?}")),
        }
    }
    Ok(out)
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

/// Axes of a parameter grid. `--n` and `--n-mult` are exclusive, as are
/// `--m`, `--gamma` and `--m-steps`.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// User counts, e.g. `2-50` or `4,8,16`
    #[arg(long = "k", value_name = "LIST")]
    pub k: Option<String>,

    /// Library sizes
    #[arg(long = "n", value_name = "LIST", conflicts_with = "n_mult")]
    pub n: Option<String>,

    /// Library sizes as multiples of K
    #[arg(long = "n-mult", value_name = "LIST")]
    pub n_mult: Option<String>,

    /// Cache sizes
    #[arg(long = "m", value_name = "LIST", conflicts_with_all = ["gamma", "m_steps"])]
    pub m: Option<String>,

    /// Normalized cache sizes M/N
    #[arg(long = "gamma", value_name = "LIST", conflicts_with = "m_steps")]
    pub gamma: Option<String>,

    /// Evenly spaced cache sizes from 0 to N/K, `S + 1` values
    #[arg(long = "m-steps", value_name = "S")]
    pub m_steps: Option<u64>,

    /// CSIT exponents, e.g. `0:0.05:1` or `0,1/3,1`
    #[arg(long = "alpha", value_name = "LIST")]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Libraries {
    Absolute(Vec<u64>),
    Multiples(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Caches {
    Absolute(Vec<Rational>),
    Normalized(Vec<Rational>),
    Steps(u64),
}

/// A full grid: every combination of the axes, in lexicographic
/// `(K, N, M, alpha)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ks: Vec<u64>,
    pub libraries: Libraries,
    pub caches: Caches,
    pub alphas: Vec<Alpha>,
}

/// Defaults used when an axis is not given.
pub struct GridDefaults {
    pub k: &'static str,
    pub n_mult: &'static str,
    pub m_steps: u64,
    pub alpha: &'static str,
}

pub const AUDIT_GRID: GridDefaults = GridDefaults { k: "2-50", n_mult: "1,2,4", m_steps: 4, alpha: "0:0.05:1" };

impl GridArgs {
    pub fn spec(&self, defaults: Option<&GridDefaults>) -> Result<SweepSpec, String> {
        let need = |v: &Option<String>, fallback: Option<&'static str>, what: &str| -> Result<String, String> {
            v.clone().or(fallback.map(str::to_owned)).ok_or_else(|| format!("--{what} is required"))
        };
        let ks = sorted(parse_int_list(&need(&self.k, defaults.map(|d| d.k), "k")?)?);

        let libraries = match (&self.n, &self.n_mult) {
            (Some(n), _) => Libraries::Absolute(sorted(parse_int_list(n)?)),
            (None, Some(c)) => Libraries::Multiples(sorted(parse_int_list(c)?)),
            (None, None) => match defaults {
                Some(d) => Libraries::Multiples(sorted(parse_int_list(d.n_mult)?)),
                None => return Err("--n or --n-mult is required".into()),
            },
        };

        let caches = match (&self.m, &self.gamma, self.m_steps) {
            (Some(m), _, _) => Caches::Absolute(sorted(parse_rational_list(m)?)),
            (None, Some(g), _) => Caches::Normalized(sorted(parse_rational_list(g)?)),
            (None, None, Some(s)) => Caches::Steps(s),
            (None, None, None) => match defaults {
                Some(d) => Caches::Steps(d.m_steps),
                None => return Err("--m, --gamma or --m-steps is required".into()),
            },
        };
        if caches == Caches::Steps(0) {
            return Err("--m-steps must be positive".into());
        }

        let alphas = parse_rational_list(&need(&self.alpha, defaults.map(|d| d.alpha), "alpha")?)?
            .into_iter()
            .map(|a| Alpha::new(a).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let alphas = sorted(alphas);

        let spec = SweepSpec { ks, libraries, caches, alphas };
        spec.check()?;
        Ok(spec)
    }
}

impl SweepSpec {
    fn check(&self) -> Result<(), String> {
        let empty = |what: &str| Err(format!("empty {what} list"));
        if self.ks.is_empty() {
            return empty("K");
        }
        if self.alphas.is_empty() {
            return empty("alpha");
        }
        match &self.libraries {
            Libraries::Absolute(v) | Libraries::Multiples(v) if v.is_empty() => return empty("N"),
            _ => {}
        }
        match &self.caches {
            Caches::Absolute(v) | Caches::Normalized(v) if v.is_empty() => return empty("M"),
            _ => {}
        }
        Ok(())
    }

    fn libraries_for(&self, k: u64) -> Vec<u64> {
        match &self.libraries {
            Libraries::Absolute(v) => v.clone(),
            Libraries::Multiples(v) => v.iter().map(|c| c * k).collect(),
        }
    }

    fn caches_for(&self, k: u64, n: u64) -> Vec<Rational> {
        match &self.caches {
            Caches::Absolute(v) => v.clone(),
            Caches::Normalized(v) => v.iter().map(|g| g * int(n)).collect(),
            Caches::Steps(s) => (0..=*s).map(|i| Rational::new((i * n).into(), (s * k).into())).collect(),
        }
    }

    /// Every `(params, alpha)` combination. Fails on the first invalid point.
    pub fn points(&self) -> Result<Vec<(SystemParams, Alpha)>, String> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for n in sorted(self.libraries_for(k)) {
                for m in sorted(self.caches_for(k, n)) {
                    let label = rational::fmt_rational(&m);
                    let params = SystemParams::new(k, n, m, None)
                        .map_err(|e| format!("grid point K={k}, N={n}, M={label}: {e}"))?;
                    out.extend(self.alphas.iter().map(|a| (params.clone(), a.clone())));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use misocache::rational::ratio;

    #[test]
    fn int_lists() {
        assert_eq!(parse_int_list("2-4,7").unwrap(), vec![2, 3, 4, 7]);
        assert_eq!(parse_int_list("5").unwrap(), vec![5]);
        assert!(parse_int_list("4-2").is_err());
        assert!(parse_int_list("x").is_err());
        assert!(parse_int_list("").unwrap().is_empty());
    }

    #[test]
    fn rational_lists() {
        let v = parse_rational_list("0:0.05:1").unwrap();
        assert_eq!(v.len(), 21);
        assert_eq!(v[20], int(1));
        assert_eq!(parse_rational_list("1/3, 0.5").unwrap(), vec![ratio(1, 3), ratio(1, 2)]);
        assert!(parse_rational_list("0:0:1").is_err());
        assert!(parse_rational_list("1e-3").is_err());
    }

    fn args(k: &str, n: Option<&str>, m: Option<&str>, alpha: &str) -> GridArgs {
        GridArgs {
            k: Some(k.into()),
            n: n.map(Into::into),
            n_mult: None,
            m: m.map(Into::into),
            gamma: None,
            m_steps: None,
            alpha: Some(alpha.into()),
        }
    }

    #[test]
    fn audit_defaults() {
        let empty = GridArgs { k: None, n: None, n_mult: None, m: None, gamma: None, m_steps: None, alpha: None };
        let pts = empty.spec(Some(&AUDIT_GRID)).unwrap().points().unwrap();
        assert_eq!(pts.len(), 49 * 3 * 5 * 21);
        assert!(pts.iter().all(|(p, _)| p.is_small_cache()));
        assert!(empty.spec(None).is_err());
    }

    #[test]
    fn ordering_and_validation() {
        let pts = args("3,2", Some("8"), Some("1,0"), "1,0").spec(None).unwrap().points().unwrap();
        let keys: Vec<(u64, String, String)> =
            pts.iter().map(|(p, a)| (p.k(), rational::fmt_rational(p.m()), a.to_string())).collect();
        assert_eq!(keys[0], (2, "0".into(), "0".into()));
        assert_eq!(keys[1], (2, "0".into(), "1".into()));
        assert_eq!(keys[2], (2, "1".into(), "0".into()));
        assert_eq!(keys.last().unwrap(), &(3, "1".into(), "1".into()));

        assert!(args("4", Some("8"), Some("1"), "").spec(None).is_err());
        let err = args("2-10", Some("8"), Some("1"), "0").spec(None).unwrap().points().unwrap_err();
        assert!(err.contains("N < K"), "{err}");
    }
}
