//! Effective configuration plus file plumbing shared by every subcommand.

use std::cell::RefCell;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use streetlex::config::PipelineConfig;
use streetlex::corpus::{ingest_corpus, CorpusFormat};
use streetlex::{Codebook, LabeledCorpus};

use crate::{CorpusArgs, Format, InputFormat};

pub struct Context {
    pub config: PipelineConfig,
    /// Directory that relative config paths are resolved against.
    base: PathBuf,
    pub format: Format,
    inputs: RefCell<Vec<PathBuf>>,
}

impl From<InputFormat> for CorpusFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Jsonl => CorpusFormat::Jsonl,
            InputFormat::Tsv => CorpusFormat::Tsv,
        }
    }
}

impl Context {
    pub fn load(config: Option<&Path>, overrides: &[String], seed: Option<u64>, format: Format) -> Result<Self> {
        let overrides = overrides
            .iter()
            .map(|o| {
                o.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| anyhow!("--set expects SECTION.KEY=VALUE, got {o:?}"))
            })
            .collect::<Result<Vec<_>>>()?;
        let (text, base) = match config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (text, base)
            }
            None => (String::new(), PathBuf::new()),
        };
        let mut cfg = PipelineConfig::from_toml_with_overrides(&text, &overrides).with_context(|| match config {
            Some(p) => p.display().to_string(),
            None => "command-line config".to_string(),
        })?;
        if let Some(s) = seed {
            cfg.set_seed(s);
        }
        Ok(Context {
            config: cfg,
            base,
            format,
            inputs: RefCell::new(Vec::new()),
        })
    }

    /// A flag value as given, else the config value resolved against the
    /// config directory.
    pub fn pick(&self, flag: Option<PathBuf>, configured: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        if let Some(p) = flag {
            return Ok(p);
        }
        configured
            .as_ref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| anyhow!("no {what} given: pass the flag or set paths in the config"))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn open(&self, path: &Path) -> Result<BufReader<File>> {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        self.inputs
            .borrow_mut()
            .push(path.canonicalize().unwrap_or_else(|_| path.to_path_buf()));
        Ok(BufReader::new(f))
    }

    /// Runs a core reader over a file, prefixing any error with the path.
    pub fn read<T>(&self, path: &Path, parse: impl FnOnce(BufReader<File>) -> streetlex::Result<T>) -> Result<T> {
        let r = self.open(path)?;
        parse(r).with_context(|| path.display().to_string())
    }

    /// Lines of a file, or of stdin when `path` is `None`.
    pub fn lines(&self, path: Option<&Path>) -> Result<Vec<String>> {
        let reader: Box<dyn BufRead> = match path {
            Some(p) => Box::new(self.open(p)?),
            None => Box::new(BufReader::new(io::stdin())),
        };
        reader.lines().collect::<io::Result<_>>().context("reading input")
    }

    pub fn codebook(&self, flag: Option<PathBuf>) -> Result<Codebook> {
        match flag.or_else(|| self.config.paths.codebook.as_ref().map(|p| self.resolve(p))) {
            Some(p) => self.read(&p, Codebook::read_tsv),
            None => Ok(Codebook::builtin()),
        }
    }

    pub fn corpus(&self, args: CorpusArgs) -> Result<LabeledCorpus> {
        let codebook = self.codebook(args.codebook)?;
        let path = self.pick(args.corpus, &self.config.paths.corpus, "corpus (--corpus)")?;
        let format = args.corpus_format.map_or(self.config.paths.corpus_format, Into::into);
        self.read(&path, |r| ingest_corpus(r, format, &codebook))
    }

    /// Writes through a temp file in the destination directory, then renames
    /// it into place. Refuses to overwrite a file this run has read.
    pub fn write_atomic(&self, path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let target = dir
            .canonicalize()
            .map(|d| d.join(path.file_name().unwrap_or_default()))
            .unwrap_or_else(|_| path.to_path_buf());
        if self.inputs.borrow().contains(&target) {
            bail!("refusing to overwrite input file {}", path.display());
        }
        let tmp =
            tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("cannot write in {}", dir.display()))?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            body(&mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        tmp.persist(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// To `path` atomically, or to stdout.
    pub fn emit(&self, path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match path {
            Some(p) => self.write_atomic(p, body),
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                body(&mut lock)?;
                lock.flush()?;
                Ok(())
            }
        }
    }
}
