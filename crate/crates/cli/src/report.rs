//! CSV tables and the key=value run manifest written next to each output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Shortest decimal that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Numbered column names `prefix0, prefix1, ...`.
pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

pub struct Table {
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(path: &Path, header: impl IntoIterator<Item = String>) -> io::Result<Self> {
        let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        writer.write_record(header.into_iter().collect::<Vec<_>>())?;
        Ok(Self { writer })
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) -> io::Result<()> {
        self.writer
            .write_record(fields.into_iter().collect::<Vec<_>>())
            .map_err(io::Error::other)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Path of the aggregate table: explicit, or `<stem>_aggregate.<ext>` next to `out`.
pub fn aggregate_path(out: &Path, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_aggregate.{ext}"))
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Everything needed to reproduce a run. Thread count is deliberately absent.
#[derive(Debug, Default)]
pub struct Manifest {
    subcommand: String,
    seed: Option<u64>,
    params: BTreeMap<String, String>,
    inputs: Vec<(String, String)>,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn new(subcommand: &str, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.into(),
            seed,
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn input(&mut self, path: &Path) -> io::Result<&mut Self> {
        let mut hasher = Sha256::new();
        let mut file = File::open(path)?;
        let mut buf = [0u8; 1 << 16];
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
        let digest: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.inputs.push((path.display().to_string(), digest));
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("subcommand={}\n", self.subcommand));
        s.push_str(&format!("tool_version={}\n", env!("CARGO_PKG_VERSION")));
        if let Some(seed) = self.seed {
            s.push_str(&format!("seed={seed}\n"));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("param.{k}={v}\n"));
        }
        for (i, (path, digest)) in self.inputs.iter().enumerate() {
            s.push_str(&format!(
                "input.{i}.path={path}\ninput.{i}.sha256={digest}\n"
            ));
        }
        for (i, path) in self.outputs.iter().enumerate() {
            s.push_str(&format!("output.{i}={path}\n"));
        }
        s
    }

    /// Writes the manifest as a sidecar of `primary`.
    pub fn write_beside(&self, primary: &Path) -> io::Result<()> {
        std::fs::write(manifest_path(primary), self.render())
    }
}
