//! Real-vs-random comparison of structural properties.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::properties::{graph_degree_kurtosis, pearson_kurtosis};
use super::{
    avg_clustering_coefficient, avg_shortest_path, erdos_renyi_gnm, largest_component_fraction,
    Dataset, Graph,
};
use crate::error::{arg_err, Result};
use crate::linalg::{mean, var_sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    DegreeKurtosis,
    AvgShortestPath,
    LargestComponentPct,
    ClusteringCoefficient,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::DegreeKurtosis,
        Property::AvgShortestPath,
        Property::LargestComponentPct,
        Property::ClusteringCoefficient,
    ];

    fn eval(self, g: &Graph) -> Option<f64> {
        match self {
            Property::DegreeKurtosis => graph_degree_kurtosis(g).ok(),
            Property::AvgShortestPath => avg_shortest_path(g).ok(),
            Property::LargestComponentPct => Some(largest_component_fraction(g)),
            Property::ClusteringCoefficient => Some(avg_clustering_coefficient(g)),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::DegreeKurtosis => "degree_kurtosis",
            Property::AvgShortestPath => "avg_shortest_path",
            Property::LargestComponentPct => "largest_component_pct",
            Property::ClusteringCoefficient => "clustering_coefficient",
        })
    }
}

/// One property's real value, random-null value and p-value. `None` marks a
/// statistic that could not be computed for most graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRow {
    pub property: Property,
    pub real: Option<f64>,
    pub random: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub dataset: String,
    pub rows: Vec<PropertyRow>,
}

impl PropertyReport {
    pub fn get(&self, p: Property) -> &PropertyRow {
        self.rows.iter().find(|r| r.property == p).expect("all properties reported")
    }

    /// CSV with one row per property: `property,real,random,p_value`.
    /// Uncomputed cells are written as `NA`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["property", "real", "random", "p_value"])?;
        let cell = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| v.to_string());
        for r in &self.rows {
            w.write_record([
                r.property.to_string(),
                cell(r.real),
                cell(r.random),
                cell(r.p_value),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Two-sided Welch t-test p-value for a difference in means.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return arg_err("Welch t-test needs at least two observations per sample");
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (var_sample(a) / a.len() as f64, var_sample(b) / b.len() as f64);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| crate::Error::Argument(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

/// Order-independent seed for a graph's random null.
fn graph_seed(seed: u64, g: &Graph) -> u64 {
    // FNV-1a over (n, edges)
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    let mut feed = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(g.num_nodes() as u64);
    for &(u, v) in g.edges() {
        feed(((u as u64) << 32) | v as u64);
    }
    h
}

/// Compares each property between the dataset and size-matched G(n, m)
/// nulls, one null per real graph.
pub fn property_significance(dataset: &Dataset, seed: u64) -> Result<PropertyReport> {
    property_significance_with(dataset, |g| {
        erdos_renyi_gnm(g.num_nodes(), g.num_edges(), graph_seed(seed, g))
    })
}

/// Same as [`property_significance`] with a caller-supplied null generator.
pub fn property_significance_with<F>(dataset: &Dataset, null: F) -> Result<PropertyReport>
where
    F: Fn(&Graph) -> Result<Graph> + Sync,
{
    if dataset.is_empty() {
        return arg_err("property significance on an empty dataset");
    }
    let randoms: Vec<Graph> = dataset.graphs.par_iter().map(&null).collect::<Result<_>>()?;
    let n = dataset.len();

    let mut rows = Vec::with_capacity(4);
    for prop in Property::ALL {
        let eval = |gs: &[Graph]| -> Vec<f64> {
            gs.par_iter().map(|g| prop.eval(g)).collect::<Vec<_>>().into_iter().flatten().collect()
        };
        let real = eval(&dataset.graphs);
        let rand = eval(&randoms);
        let enough = |v: &[f64]| 2 * v.len() >= n && v.len() >= 2;
        let summary = |gs: &[Graph], per_graph: &[f64]| -> Option<f64> {
            if prop == Property::DegreeKurtosis {
                let pooled: Vec<f64> =
                    gs.iter().flat_map(|g| g.degrees()).map(|d| d as f64).collect();
                pearson_kurtosis(&pooled).ok()
            } else if per_graph.is_empty() {
                None
            } else {
                Some(mean(per_graph))
            }
        };
        let (real_v, rand_v) = (summary(&dataset.graphs, &real), summary(&randoms, &rand));
        let p_value = if enough(&real) && enough(&rand) {
            Some(welch_t_test(&real, &rand)?)
        } else {
            log::warn!("{}: {prop} undefined for most graphs; not computed", dataset.name);
            None
        };
        rows.push(PropertyRow {
            property: prop,
            real: if enough(&real) { real_v } else { None },
            random: if enough(&rand) { rand_v } else { None },
            p_value,
        });
    }
    Ok(PropertyReport {
        dataset: dataset.name.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_dataset() -> Dataset {
        let graphs = (0..12)
            .map(|i| {
                let g = erdos_renyi_gnm(8 + i % 4, 10 + i % 5, i as u64).unwrap();
                g.with_label(i % 2)
            })
            .collect();
        Dataset::new("small", graphs, 2).unwrap()
    }

    #[test]
    fn identity_null_gives_p_one() {
        let ds = small_dataset();
        let rep = property_significance_with(&ds, |g| Ok(g.clone())).unwrap();
        for row in &rep.rows {
            assert_eq!(row.p_value, Some(1.0), "{}", row.property);
            assert_eq!(row.real, row.random);
        }
    }

    #[test]
    fn welch_matches_reference_values() {
        // Reference: scipy.stats.ttest_ind(a, b, equal_var=False)
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0];
        let p = welch_t_test(&a, &b).unwrap();
        assert!((p - 0.049_284_338_206_730_49).abs() < 1e-9, "{p}");
    }

    #[test]
    fn order_invariant() {
        let ds = small_dataset();
        let mut rev = ds.clone();
        rev.graphs.reverse();
        let a = property_significance(&ds, 3).unwrap();
        let b = property_significance(&rev, 3).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            for (u, v) in [(x.real, y.real), (x.random, y.random), (x.p_value, y.p_value)] {
                let (u, v) = (u.unwrap(), v.unwrap());
                assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{}: {u} vs {v}", x.property);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let ds = small_dataset();
        let rep = property_significance_with(&ds, |g| Ok(g.clone())).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "property,real,random,p_value");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("clustering_coefficient,"));
    }
}
