//! Binary cache for solved eigenbases, keyed by (potential text, h, n_axis,
//! sigma) and a format version. A cache hit replays the solve bit-identically.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::eigensolver::{EigenBasis, StateCoefficients};
use crate::potential::PolynomialPotential;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"SPECLAB1";
const VERSION: u32 = 1;

/// Cache key: hex SHA-256 of the solve inputs plus the format version.
pub fn cache_key(v: &PolynomialPotential, h: f64, n_axis: usize, sigma: f64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(MAGIC);
    hasher.update(VERSION.to_le_bytes());
    hasher.update(v.to_text().as_bytes());
    hasher.update(h.to_bits().to_le_bytes());
    hasher.update((n_axis as u64).to_le_bytes());
    hasher.update(sigma.to_bits().to_le_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.eb"))
}

/// Solve with caching: load on hit, otherwise solve and store.
pub fn load_or_solve(
    dir: &Path,
    v: &PolynomialPotential,
    h: f64,
    n_axis: usize,
    sigma: f64,
) -> Result<EigenBasis> {
    let key = cache_key(v, h, n_axis, sigma);
    let path = cache_path(dir, &key);
    if path.exists() {
        return load(&path);
    }
    let basis = EigenBasis::solve(v, h, n_axis, sigma)?;
    std::fs::create_dir_all(dir)?;
    save(&path, &basis)?;
    Ok(basis)
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u32(&mut self, v: u32) -> Result<()> {
        self.0.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.0.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.0.write_all(&v.to_bits().to_le_bytes())?;
        Ok(())
    }
    fn bytes(&mut self, v: &[u8]) -> Result<()> {
        self.u64(v.len() as u64)?;
        self.0.write_all(v)?;
        Ok(())
    }
    fn f64s(&mut self, v: &[f64]) -> Result<()> {
        self.u64(v.len() as u64)?;
        for &x in v {
            self.f64(x)?;
        }
        Ok(())
    }
    fn matrix(&mut self, m: &Array2<f64>) -> Result<()> {
        self.u64(m.nrows() as u64)?;
        self.u64(m.ncols() as u64)?;
        for &x in m.iter() {
            self.f64(x)?;
        }
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.0.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn bytes(&mut self) -> Result<Vec<u8>> {
        let n = self.u64()? as usize;
        let mut v = vec![0u8; n];
        self.0.read_exact(&mut v)?;
        Ok(v)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u64()? as usize;
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(self.f64()?);
        }
        Ok(v)
    }
    fn matrix(&mut self) -> Result<Array2<f64>> {
        let rows = self.u64()? as usize;
        let cols = self.u64()? as usize;
        let data = (0..rows * cols)
            .map(|_| self.f64())
            .collect::<Result<Vec<_>>>()?;
        Array2::from_shape_vec((rows, cols), data)
            .map_err(|e| Error::Cache(format!("bad matrix shape: {e}")))
    }
}

/// Write a basis to a cache file.
pub fn save(path: &Path, basis: &EigenBasis) -> Result<()> {
    let tmp = path.with_extension("eb.tmp");
    {
        let f = std::fs::File::create(&tmp)?;
        let mut w = Writer(std::io::BufWriter::new(f));
        w.0.write_all(MAGIC)?;
        w.u32(VERSION)?;
        w.bytes(basis.potential().to_text().as_bytes())?;
        w.f64(basis.h())?;
        w.f64(basis.sigma())?;
        w.u64(basis.n_axis() as u64)?;
        w.u64(basis.trust_count() as u64)?;
        w.f64s(basis.eigenvalues())?;
        match basis.coefficients() {
            StateCoefficients::Identity { order } => {
                w.u32(0)?;
                w.u64(order.len() as u64)?;
                for &o in order {
                    w.u64(o as u64)?;
                }
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                w.u32(1)?;
                w.u64(order.len() as u64)?;
                for &(i, k) in order {
                    w.u64(i as u64)?;
                    w.u64(k as u64)?;
                }
                w.matrix(axis1)?;
                w.matrix(axis2)?;
            }
            StateCoefficients::Dense(c) => {
                w.u32(2)?;
                w.matrix(c)?;
            }
        }
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a basis back from a cache file.
pub fn load(path: &Path) -> Result<EigenBasis> {
    let f = std::fs::File::open(path)?;
    let mut r = Reader(std::io::BufReader::new(f));
    let mut magic = [0u8; 8];
    r.0.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Cache(format!("version {version} != {VERSION}")));
    }
    let text = String::from_utf8(r.bytes()?).map_err(|e| Error::Cache(e.to_string()))?;
    let potential = PolynomialPotential::from_text(&text)?;
    let h = r.f64()?;
    let sigma = r.f64()?;
    let n_axis = r.u64()? as usize;
    let trust = r.u64()? as usize;
    let eigenvalues = r.f64s()?;
    let coefficients = match r.u32()? {
        0 => {
            let n = r.u64()? as usize;
            let order = (0..n)
                .map(|_| r.u64().map(|v| v as usize))
                .collect::<Result<Vec<_>>>()?;
            StateCoefficients::Identity { order }
        }
        1 => {
            let n = r.u64()? as usize;
            let mut order = Vec::with_capacity(n);
            for _ in 0..n {
                let i = r.u64()? as usize;
                let k = r.u64()? as usize;
                order.push((i, k));
            }
            let axis1 = r.matrix()?;
            let axis2 = r.matrix()?;
            StateCoefficients::Product { order, axis1, axis2 }
        }
        2 => StateCoefficients::Dense(r.matrix()?),
        t => return Err(Error::Cache(format!("unknown coefficient tag {t}"))),
    };
    Ok(EigenBasis::from_parts(
        potential,
        h,
        sigma,
        n_axis,
        eigenvalues,
        coefficients,
        trust,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::sigma_for_energy;

    fn bits(xs: &[f64]) -> Vec<u64> {
        xs.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn round_trip_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let v = PolynomialPotential::quartic_separable(1);
        let sigma = sigma_for_energy(&v, 10.0);
        let a = load_or_solve(dir.path(), &v, 1.0, 24, sigma).unwrap();
        let b = load_or_solve(dir.path(), &v, 1.0, 24, sigma).unwrap();
        assert_eq!(bits(a.eigenvalues()), bits(b.eigenvalues()));
        assert_eq!(a.trust_count(), b.trust_count());
        match (a.coefficients(), b.coefficients()) {
            (StateCoefficients::Dense(x), StateCoefficients::Dense(y)) => {
                let bx: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
                let by: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
                assert_eq!(bx, by);
            }
            _ => panic!("expected dense coefficients"),
        }
    }

    #[test]
    fn key_depends_on_inputs() {
        let v = PolynomialPotential::harmonic(1);
        let k1 = cache_key(&v, 1.0, 20, 1.0);
        let k2 = cache_key(&v, 0.5, 20, 1.0);
        let k3 = cache_key(&v, 1.0, 24, 1.0);
        assert_ne!(k1, k2);
        assert_ne!(k1, k3);
    }

    #[test]
    fn analytic_and_product_paths_cache() {
        let dir = tempfile::tempdir().unwrap();
        let v = PolynomialPotential::harmonic(2);
        let a = load_or_solve(dir.path(), &v, 0.25, 10, 0.5).unwrap();
        let b = load_or_solve(dir.path(), &v, 0.25, 10, 0.5).unwrap();
        assert_eq!(bits(a.eigenvalues()), bits(b.eigenvalues()));

        let v = PolynomialPotential::quartic_separable(2);
        let a = load_or_solve(dir.path(), &v, 1.0, 16, 0.8).unwrap();
        let b = load_or_solve(dir.path(), &v, 1.0, 16, 0.8).unwrap();
        assert_eq!(bits(a.eigenvalues()), bits(b.eigenvalues()));
        assert_eq!(a.trust_count(), b.trust_count());
    }
}
