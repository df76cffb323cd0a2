use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rug::{Complex, Float};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Persisted node evaluations. One record per line:
/// `<hash> <prec> <x> <y> <z> <n> <v₁> … <vₙ>`, every complex number
/// written as `re,im` in exact hexadecimal; the hash covers the rest of
/// the line, so a record torn by an interruption is skipped on reload.
pub struct Checkpoint {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

struct Inner {
    map: HashMap<String, Vec<Complex>>,
    out: Option<BufWriter<File>>,
}

fn hex(z: &Complex) -> String {
    format!("{},{}", z.real().to_string_radix(16, None), z.imag().to_string_radix(16, None))
}

fn unhex(s: &str, prec: u32) -> Option<Complex> {
    let (re, im) = s.split_once(',')?;
    let re = Float::with_val(prec, Float::parse_radix(re, 16).ok()?);
    let im = Float::with_val(prec, Float::parse_radix(im, 16).ok()?);
    Some(Complex::with_val(prec, (re, im)))
}

fn digest(body: &str) -> String {
    let h = Sha256::digest(body.as_bytes());
    h[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl Checkpoint {
    /// Nothing persisted; lookups always miss.
    pub fn memory() -> Self {
        Self {
            path: None,
            inner: Mutex::new(Inner {
                map: HashMap::new(),
                out: None,
            }),
        }
    }

    /// Opens `path` for appending. With `resume` the existing records are
    /// loaded, otherwise the file is truncated.
    pub fn open(path: &Path, resume: bool) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut map = HashMap::new();
        if resume && path.exists() {
            let mut torn = 0usize;
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                match Self::parse_record(&line) {
                    Some((k, v)) => {
                        map.insert(k, v);
                    }
                    None => torn += 1,
                }
            }
            log::info!("checkpoint {}: {} records, {} skipped", path.display(), map.len(), torn);
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(resume)
            .write(true)
            .truncate(!resume)
            .open(path)?;
        if resume && std::fs::read(path)?.last().is_some_and(|b| *b != b'\n') {
            // finish a torn record so the next one starts on its own line
            writeln!(file)?;
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(Inner {
                map,
                out: Some(BufWriter::new(file)),
            }),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Lookup key of a node: its precision and exact coordinates.
    pub fn key(pt: &[Complex; 3]) -> String {
        let prec = pt[0].prec().0;
        format!("{prec} {} {} {}", hex(&pt[0]), hex(&pt[1]), hex(&pt[2]))
    }

    fn parse_record(line: &str) -> Option<(String, Vec<Complex>)> {
        let (h, body) = line.split_once(' ')?;
        if digest(body) != h {
            return None;
        }
        let f: Vec<&str> = body.split(' ').collect();
        let prec: u32 = f.first()?.parse().ok()?;
        let n: usize = f.get(4)?.parse().ok()?;
        if f.len() != 5 + n {
            return None;
        }
        let vals = f[5..].iter().map(|s| unhex(s, prec)).collect::<Option<Vec<_>>>()?;
        Some((f[..4].join(" "), vals))
    }

    pub fn get(&self, key: &str) -> Option<Vec<Complex>> {
        self.inner.lock().expect("checkpoint lock").map.get(key).cloned()
    }

    pub fn put(&self, key: &str, vals: &[Complex]) -> Result<()> {
        let mut g = self.inner.lock().expect("checkpoint lock");
        if let Some(out) = g.out.as_mut() {
            let mut body = format!("{key} {}", vals.len());
            for v in vals {
                body.push(' ');
                body += &hex(v);
            }
            writeln!(out, "{} {body}", digest(&body))?;
            out.flush()?;
            // only a resumed run needs the values; keep memory flat otherwise
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("checkpoint lock").map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drop the file once the job it served is complete.
    pub fn remove(self) -> Result<()> {
        drop(self.inner);
        if let Some(p) = self.path {
            std::fs::remove_file(p).map_err(Error::from)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::cf64;

    #[test]
    fn records_survive_a_restart_and_torn_lines_are_skipped() {
        let path = std::env::temp_dir().join(format!("ckpt-{}.txt", std::process::id()));
        let prec = 200;
        let pt = [cf64(prec, 0.1, -0.7), cf64(prec, 1.0 / 3.0, 0.0), cf64(prec, -2.5, 1e-30)];
        let third = Complex::with_val(prec, 1) / Complex::with_val(prec, (3, 7));
        let vals = vec![third.clone(), cf64(prec, 0.0, 0.0)];
        {
            let c = Checkpoint::open(&path, false).unwrap();
            c.put(&Checkpoint::key(&pt), &vals).unwrap();
        }
        // simulate an interrupted append
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "0123 200 garbage").unwrap();
        drop(f);
        let c = Checkpoint::open(&path, true).unwrap();
        assert_eq!(c.len(), 1);
        c.put(&Checkpoint::key(&[pt[2].clone(), pt[1].clone(), pt[0].clone()]), &vals).unwrap();
        drop(c);
        let c = Checkpoint::open(&path, true).unwrap();
        assert_eq!(c.len(), 2);
        let got = c.get(&Checkpoint::key(&pt)).unwrap();
        assert_eq!(got, vals, "bit-exact round trip");
        assert!(c.get(&Checkpoint::key(&[pt[1].clone(), pt[0].clone(), pt[2].clone()])).is_none());
        c.remove().unwrap();
        assert!(!path.exists());
    }
}
