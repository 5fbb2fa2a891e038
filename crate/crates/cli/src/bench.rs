//! Generated corpora and the benchmark table.

use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use plysweep::generate::{caterpillar, gnm, planar};
use plysweep::layout::{layout, Algorithm, LayoutConfig};
use plysweep::sweep::{compute_ply_with, SweepOptions};
use plysweep::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Gnm,
    Caterpillar,
    Planar,
}

/// `generator:n=LO[..HI],density=LO[..HI],count=K,seed=S`
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub generator: Generator,
    pub n: (usize, usize),
    pub density: (f64, f64),
    pub count: usize,
    pub seed: u64,
}

fn range<T: FromStr + PartialOrd + Copy>(s: &str) -> Result<(T, T)> {
    let parse = |t: &str| t.trim().parse::<T>().ok().with_context(|| format!("bad number {t:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty range {s:?}");
    }
    Ok((lo, hi))
}

impl FromStr for CorpusSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (gen, rest) = s.split_once(':').unwrap_or((s, ""));
        let generator = match gen {
            "gnm" | "random" => Generator::Gnm,
            "caterpillar" => Generator::Caterpillar,
            "planar" => Generator::Planar,
            _ => bail!("unknown generator {gen:?} (gnm, caterpillar, planar)"),
        };
        let mut spec = CorpusSpec { generator, n: (100, 100), density: (1.5, 1.5), count: 1, seed: 0 };
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').with_context(|| format!("expected key=value, got {part:?}"))?;
            match k.trim() {
                "n" => spec.n = range(v)?,
                "density" => spec.density = range(v)?,
                "count" => spec.count = v.trim().parse().context("bad count")?,
                "seed" => spec.seed = v.trim().parse().context("bad seed")?,
                other => bail!("unknown corpus key {other:?}"),
            }
        }
        if spec.count == 0 || spec.n.0 == 0 {
            bail!("count and n must be at least 1");
        }
        Ok(spec)
    }
}

impl CorpusSpec {
    /// Instance `i` takes evenly spaced n and density across the ranges and
    /// seed `seed + i`.
    pub fn generate(&self) -> Vec<(String, Graph)> {
        (0..self.count)
            .map(|i| {
                let t = if self.count > 1 { i as f64 / (self.count - 1) as f64 } else { 0.0 };
                let n = (self.n.0 as f64 + t * (self.n.1 - self.n.0) as f64).round() as usize;
                let density = self.density.0 + t * (self.density.1 - self.density.0);
                let m = (density * n as f64).round() as usize;
                let seed = self.seed + i as u64;
                let (tag, g) = match self.generator {
                    Generator::Gnm => ("gnm", gnm(n, m, seed)),
                    Generator::Caterpillar => ("caterpillar", caterpillar(n, seed)),
                    Generator::Planar => ("planar", planar(n, m, seed)),
                };
                (format!("{tag}-{i}"), g)
            })
            .collect()
    }

    pub fn class(&self) -> &'static str {
        match self.generator {
            Generator::Gnm => "gnm",
            Generator::Caterpillar => "caterpillar",
            Generator::Planar => "planar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub layout: String,
    pub ply: usize,
    pub events: u64,
    pub postponed: u64,
    pub dropped: u64,
    pub time_ms: f64,
}

/// Means over the records of one (class, layout) pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchAverage {
    pub name: String,
    pub n: f64,
    pub m: f64,
    pub density: f64,
    pub layout: String,
    pub ply: f64,
    pub events: f64,
    pub postponed: f64,
    pub dropped: f64,
    pub time_ms: f64,
}

pub fn record(name: &str, g: &Graph, drawing: &plysweep::Drawing, layout_name: &str) -> Result<BenchRecord> {
    let opts = SweepOptions::default();
    let t = Instant::now();
    let r = compute_ply_with(g, drawing, &opts)?;
    let time_ms = t.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRecord {
        name: name.to_string(),
        n: g.vertex_count(),
        m: g.edge_count(),
        density: g.density().map(|d| d.0).unwrap_or(0.0),
        layout: layout_name.to_string(),
        ply: r.ply,
        events: r.counters.events,
        postponed: r.counters.postponed,
        dropped: r.counters.dropped,
        time_ms,
    })
}

pub fn run(graphs: &[(String, Graph)], layouts: &[Algorithm], seed: u64) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::with_capacity(graphs.len() * layouts.len());
    for (i, (name, g)) in graphs.iter().enumerate() {
        for &alg in layouts {
            let d = layout(g, &LayoutConfig::with(alg, seed + i as u64));
            out.push(record(name, g, &d, &alg.to_string())?);
        }
    }
    Ok(out)
}

pub fn averages(class: &str, records: &[BenchRecord]) -> Vec<BenchAverage> {
    let mut layouts: Vec<&str> = Vec::new();
    for r in records {
        if !layouts.contains(&r.layout.as_str()) {
            layouts.push(&r.layout);
        }
    }
    layouts
        .into_iter()
        .map(|l| {
            let rows: Vec<&BenchRecord> = records.iter().filter(|r| r.layout == l).collect();
            let k = rows.len() as f64;
            let mean = |f: &dyn Fn(&BenchRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / k;
            BenchAverage {
                name: format!("average({class})"),
                n: mean(&|r| r.n as f64),
                m: mean(&|r| r.m as f64),
                density: mean(&|r| r.density),
                layout: l.to_string(),
                ply: mean(&|r| r.ply as f64),
                events: mean(&|r| r.events as f64),
                postponed: mean(&|r| r.postponed as f64),
                dropped: mean(&|r| r.dropped as f64),
                time_ms: mean(&|r| r.time_ms),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let s: CorpusSpec = "gnm:n=100,density=1.5..2.5,count=10,seed=3".parse().unwrap();
        assert_eq!(s.generator, Generator::Gnm);
        assert_eq!(s.n, (100, 100));
        assert_eq!(s.density, (1.5, 2.5));
        assert_eq!((s.count, s.seed), (10, 3));
        assert!("gnm:n=5..2".parse::<CorpusSpec>().is_err());
        assert!("spiral:n=5".parse::<CorpusSpec>().is_err());
        assert!("gnm:count=0".parse::<CorpusSpec>().is_err());
    }

    #[test]
    fn corpus_is_reproducible() {
        let s: CorpusSpec = "caterpillar:n=250..450,count=5,seed=9".parse().unwrap();
        let a = s.generate();
        assert_eq!(a, s.generate());
        let ns: Vec<usize> = a.iter().map(|(_, g)| g.vertex_count()).collect();
        assert_eq!(ns, vec![250, 300, 350, 400, 450]);
    }

    #[test]
    fn averages_are_means_of_rows() {
        let s: CorpusSpec = "gnm:n=20..40,density=1..2,count=4".parse().unwrap();
        let recs = run(&s.generate(), &[Algorithm::Circular, Algorithm::Random], 0).unwrap();
        let avg = averages("gnm", &recs);
        assert_eq!(avg.len(), 2);
        let circ: Vec<_> = recs.iter().filter(|r| r.layout == "circular").collect();
        let mean_ply = circ.iter().map(|r| r.ply as f64).sum::<f64>() / circ.len() as f64;
        assert_eq!(avg[0].ply, mean_ply);
        assert_eq!(avg[0].layout, "circular");
    }
}
