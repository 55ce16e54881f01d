//! Matrix and right-hand-side sources.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sptrsv::matrix::{extract_lower_triangular, generate_synthetic, parse_matrix_market, CscMatrix, DiagonalPolicy};
use sptrsv::{SyntheticKind, SyntheticSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File(PathBuf),
    /// `KIND:n[:params]`, seeded separately.
    Synthetic(SyntheticShape),
}

/// A synthetic matrix without its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticShape {
    pub kind: SyntheticKind,
    pub n: usize,
}

impl FromStr for SyntheticShape {
    type Err = anyhow::Error;

    /// Accepted forms: `diagonal:N`, `bidiagonal:N`, `dense:N`,
    /// `block:N:BLOCK`, `banded:N:BANDWIDTH:DENSITY`, `random:N:DENSITY`.
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> anyhow::Result<usize> {
            let p = parts.get(i).with_context(|| format!("synthetic spec '{s}' is missing field {i}"))?;
            p.parse().with_context(|| format!("bad integer '{p}' in synthetic spec '{s}'"))
        };
        let real = |i: usize| -> anyhow::Result<f64> {
            let p = parts.get(i).with_context(|| format!("synthetic spec '{s}' is missing field {i}"))?;
            p.parse().with_context(|| format!("bad number '{p}' in synthetic spec '{s}'"))
        };
        let n = num(1)?;
        let (kind, arity) = match parts[0].to_ascii_lowercase().as_str() {
            "diagonal" => (SyntheticKind::Diagonal, 2),
            "bidiagonal" => (SyntheticKind::Bidiagonal, 2),
            "dense" | "dense_lower" => (SyntheticKind::DenseLower, 2),
            "block" | "block_diagonal" => (SyntheticKind::BlockDiagonal { block: num(2)? }, 3),
            "banded" => (SyntheticKind::RandomBanded { bandwidth: num(2)?, density: real(3)? }, 4),
            "random" => (
                SyntheticKind::RandomBanded { bandwidth: n.saturating_sub(1), density: real(2)? },
                3,
            ),
            other => bail!("unknown synthetic kind '{other}'"),
        };
        if parts.len() != arity {
            bail!("synthetic spec '{s}' expects {arity} ':'-separated fields");
        }
        Ok(SyntheticShape { kind, n })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsSource {
    Ones,
    Random(Option<u64>),
    File(PathBuf),
}

impl FromStr for RhsSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "ones" => RhsSource::Ones,
            "random" => RhsSource::Random(None),
            _ => match s.strip_prefix("random:") {
                Some(seed) => RhsSource::Random(Some(seed.parse().with_context(|| format!("bad rhs seed '{seed}'"))?)),
                None => RhsSource::File(PathBuf::from(s)),
            },
        })
    }
}

/// A validated lower-triangular matrix with a display name.
pub struct LoadedMatrix {
    pub name: String,
    pub l: CscMatrix,
}

pub fn load_matrix(src: &MatrixSource, seed: u64, policy: DiagonalPolicy) -> anyhow::Result<LoadedMatrix> {
    match src {
        MatrixSource::File(path) => {
            let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let a = parse_matrix_market(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
            let l = extract_lower_triangular(&a, policy)?;
            Ok(LoadedMatrix { name: file_stem(path), l })
        }
        MatrixSource::Synthetic(shape) => {
            let spec = SyntheticSpec::new(shape.kind, shape.n, seed);
            Ok(LoadedMatrix { name: spec.name(), l: generate_synthetic(&spec)? })
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load_rhs(src: &RhsSource, n: usize, seed: u64) -> anyhow::Result<Vec<f64>> {
    match src {
        RhsSource::Ones => Ok(vec![1.0; n]),
        RhsSource::Random(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.unwrap_or(seed) ^ 0x9e37_79b9_7f4a_7c15);
            Ok((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }
        RhsSource::File(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let b = parse_vector(&text).with_context(|| format!("reading {}", path.display()))?;
            if b.len() != n {
                bail!("DimensionMismatch: right-hand side has {} values, matrix has {n} rows", b.len());
            }
            Ok(b)
        }
    }
}

/// Whitespace-separated reals; lines starting with `%` or `#` are comments.
pub fn parse_vector(text: &str) -> anyhow::Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('%') && !l.starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<f64>().with_context(|| format!("bad number '{t}'")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_shapes() {
        assert_eq!(
            "diagonal:100".parse::<SyntheticShape>().unwrap(),
            SyntheticShape { kind: SyntheticKind::Diagonal, n: 100 }
        );
        assert_eq!(
            "block:4096:32".parse::<SyntheticShape>().unwrap().kind,
            SyntheticKind::BlockDiagonal { block: 32 }
        );
        assert_eq!(
            "banded:50:4:0.5".parse::<SyntheticShape>().unwrap().kind,
            SyntheticKind::RandomBanded { bandwidth: 4, density: 0.5 }
        );
        assert_eq!(
            "random:10:0.1".parse::<SyntheticShape>().unwrap().kind,
            SyntheticKind::RandomBanded { bandwidth: 9, density: 0.1 }
        );
        for bad in ["", "diagonal", "diagonal:x", "block:8", "circle:4", "diagonal:4:2"] {
            assert!(bad.parse::<SyntheticShape>().is_err(), "{bad}");
        }
    }

    #[test]
    fn rhs_sources() {
        assert_eq!("ones".parse::<RhsSource>().unwrap(), RhsSource::Ones);
        assert_eq!("random".parse::<RhsSource>().unwrap(), RhsSource::Random(None));
        assert_eq!("random:5".parse::<RhsSource>().unwrap(), RhsSource::Random(Some(5)));
        assert_eq!("b.txt".parse::<RhsSource>().unwrap(), RhsSource::File("b.txt".into()));
        let a = load_rhs(&RhsSource::Random(None), 8, 3).unwrap();
        assert_eq!(a, load_rhs(&RhsSource::Random(Some(3)), 8, 99).unwrap());
        assert!(a.iter().all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn vector_text() {
        assert_eq!(parse_vector("% c\n1\n2.5 -3\n\n# x\n4e1\n").unwrap(), vec![1.0, 2.5, -3.0, 40.0]);
        assert!(parse_vector("1\nfoo\n").is_err());
    }
}
