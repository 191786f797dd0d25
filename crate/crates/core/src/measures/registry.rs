//! Runtime registry of distribution builders. Distributions are looked up
//! by a spec string of the form `name` or `name:args`, so front ends can
//! select them from flags or config without knowing concrete types, and
//! callers can register their own.

use super::{Cantor, Dirac, Gaussian, MeasureError, SemiInverseCdf, TableCdf, Uniform};
use crate::dyadic::rational::parse_rational;
use std::collections::BTreeMap;
use std::sync::Arc;

type Builder =
    Box<dyn Fn(Option<&str>) -> Result<Arc<dyn SemiInverseCdf>, MeasureError> + Send + Sync>;

pub struct DistributionRegistry {
    builders: BTreeMap<String, Builder>,
}

fn no_args(
    name: &'static str,
    build: impl Fn() -> Arc<dyn SemiInverseCdf> + Send + Sync + 'static,
) -> Builder {
    Box::new(move |args| match args {
        None => Ok(build()),
        Some(a) => Err(MeasureError::InvalidSpec(
            format!("{name}:{a}"),
            format!("{name} takes no arguments"),
        )),
    })
}

impl DistributionRegistry {
    pub fn empty() -> Self {
        DistributionRegistry { builders: BTreeMap::new() }
    }

    /// The built-in families: `uniform`, `gaussian`, `cantor`, `dirac:<q>`,
    /// and `table:<csv path>`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("uniform", no_args("uniform", || Arc::new(Uniform)));
        r.register("gaussian", no_args("gaussian", || Arc::new(Gaussian)));
        r.register("cantor", no_args("cantor", || Arc::new(Cantor)));
        r.register(
            "dirac",
            Box::new(|args| {
                let a = args.ok_or_else(|| {
                    MeasureError::InvalidSpec(
                        "dirac".to_string(),
                        "needs a rational location, e.g. dirac:1/3".to_string(),
                    )
                })?;
                let q = parse_rational(a).map_err(|e| {
                    MeasureError::InvalidSpec(format!("dirac:{a}"), e.to_string())
                })?;
                Ok(Arc::new(Dirac::new(q)) as Arc<dyn SemiInverseCdf>)
            }),
        );
        r.register(
            "table",
            Box::new(|args| {
                let path = args.ok_or_else(|| {
                    MeasureError::InvalidSpec(
                        "table".to_string(),
                        "needs a CSV path, e.g. table:cdf.csv".to_string(),
                    )
                })?;
                Ok(Arc::new(TableCdf::from_csv_path(path)?) as Arc<dyn SemiInverseCdf>)
            }),
        );
        r
    }

    pub fn register(&mut self, name: &str, builder: Builder) {
        self.builders.insert(name.to_string(), builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(|s| s.as_str())
    }

    pub fn build(&self, spec: &str) -> Result<Arc<dyn SemiInverseCdf>, MeasureError> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let builder = self
            .builders
            .get(name)
            .ok_or_else(|| MeasureError::UnknownDistribution(name.to_string()))?;
        builder(args)
    }
}

impl Default for DistributionRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_by_spec_string() {
        let r = DistributionRegistry::with_defaults();
        assert_eq!(r.build("uniform").unwrap().id(), "uniform");
        assert_eq!(r.build("dirac:-2/7").unwrap().id(), "dirac:-2/7");
        assert!(matches!(
            r.build("lognormal"),
            Err(MeasureError::UnknownDistribution(_))
        ));
        assert!(matches!(r.build("uniform:3"), Err(MeasureError::InvalidSpec(..))));
        assert!(matches!(r.build("dirac"), Err(MeasureError::InvalidSpec(..))));
        assert!(matches!(r.build("dirac:x/y"), Err(MeasureError::InvalidSpec(..))));
        let names: Vec<&str> = r.names().collect();
        assert_eq!(names, vec!["cantor", "dirac", "gaussian", "table", "uniform"]);
    }

    #[test]
    fn custom_registration() {
        let mut r = DistributionRegistry::empty();
        r.register("unit", no_args("unit", || Arc::new(Uniform)));
        assert!(r.build("unit").is_ok());
        assert!(r.build("uniform").is_err());
    }
}
