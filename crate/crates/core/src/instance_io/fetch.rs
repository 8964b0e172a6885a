//! Download cache for KONECT archives.
//!
//! Layout: `<cache>/<name>/` holds the unpacked archive plus a `.complete`
//! marker written last, so an interrupted download is never mistaken for a
//! cache hit. Concurrent fetches of the same dataset serialize on
//! `<cache>/<name>.lock`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use super::IoError;

pub const KONECT_BASE_URL: &str = "http://konect.cc/files/";

const DATASETS: &[&str] = &[
    "actor-movie",
    "bibsonomy-2ui",
    "bookcrossing_full-rating",
    "dblp-author",
    "dbpedia-genre",
    "dbpedia-location",
    "dbpedia-occupation",
    "dbpedia-producer",
    "dbpedia-recordlabel",
    "dbpedia-starring",
    "dbpedia-team",
    "dbpedia-writer",
    "discogs_affiliation",
    "discogs_lgenre",
    "discogs_style",
    "edit-frwiki",
    "edit-frwiktionary",
    "flickr-groupmemberships",
    "github",
    "moreno_crime",
    "opsahl-collaboration",
    "opsahl-ucforum",
    "stackexchange-stackoverflow",
    "wiki-en-cat",
    "youtube-groupmemberships",
];

const COMPLETE_MARKER: &str = ".complete";
const ATTEMPTS: usize = 2;
const LOCK_WAIT: Duration = Duration::from_secs(600);

pub fn known_datasets() -> &'static [&'static str] {
    DATASETS
}

/// Fetches `name` from the public KONECT server.
pub fn fetch_konect(name: &str, cache_dir: &Path) -> Result<PathBuf, IoError> {
    Fetcher::new().fetch(name, cache_dir)
}

#[derive(Clone, Debug)]
pub struct Fetcher {
    base_url: String,
    timeout: Duration,
}

impl Default for Fetcher {
    fn default() -> Self {
        Fetcher::new()
    }
}

impl Fetcher {
    pub fn new() -> Self {
        Fetcher {
            base_url: KONECT_BASE_URL.to_string(),
            timeout: Duration::from_secs(300),
        }
    }

    /// Points the fetcher at a mirror; `base` must end with `/`.
    pub fn with_base_url(mut self, base: impl Into<String>) -> Self {
        self.base_url = base.into();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn url_for(&self, name: &str) -> String {
        format!("{}download.tsv.{name}.tar.bz2", self.base_url)
    }

    /// Path of the cached edge list of `name`, downloading and unpacking the
    /// archive first if needed.
    pub fn fetch(&self, name: &str, cache_dir: &Path) -> Result<PathBuf, IoError> {
        if !DATASETS.contains(&name) {
            return Err(IoError::UnknownDataset {
                name: name.to_string(),
                known: DATASETS.join(", "),
            });
        }
        let dir = cache_dir.join(name);
        if let Some(path) = cached_edge_list(&dir) {
            return Ok(path);
        }
        fs::create_dir_all(cache_dir)?;
        let _lock = LockFile::acquire(&cache_dir.join(format!("{name}.lock")))?;
        // another process may have finished while we waited
        if let Some(path) = cached_edge_list(&dir) {
            return Ok(path);
        }
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        let archive = dir.join(format!("download.tsv.{name}.tar.bz2"));
        self.download(&self.url_for(name), &archive)?;
        let file = BufReader::new(File::open(&archive)?);
        tar::Archive::new(bzip2::read::BzDecoder::new(file)).unpack(&dir)?;
        fs::remove_file(&archive)?;
        let path = find_edge_list(&dir)?.ok_or_else(|| IoError::MissingEdgeList(name.into()))?;
        File::create(dir.join(COMPLETE_MARKER))?;
        Ok(path)
    }

    /// Downloads `url` to `dest`, retrying when the byte count disagrees
    /// with the announced length.
    fn download(&self, url: &str, dest: &Path) -> Result<(), IoError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut last_error = String::new();
        for _ in 0..ATTEMPTS {
            let response = agent
                .get(url)
                .call()
                .map_err(|e| IoError::Fetch(format!("{url}: {e}")))?;
            let expected = response.body().content_length();
            let mut reader = response.into_body().into_reader();
            let mut out = File::create(dest)?;
            match (io::copy(&mut reader, &mut out), expected) {
                (Err(e), _) => last_error = format!("{url}: {e}"),
                (Ok(written), Some(len)) if len != written => {
                    last_error = format!("{url}: expected {len} bytes, received {written}");
                }
                (Ok(_), _) => return Ok(()),
            }
        }
        Err(IoError::Fetch(last_error))
    }
}

fn cached_edge_list(dir: &Path) -> Option<PathBuf> {
    if !dir.join(COMPLETE_MARKER).is_file() {
        return None;
    }
    find_edge_list(dir).ok().flatten()
}

/// First `out.*` file at most two levels below `dir`, in name order.
fn find_edge_list(dir: &Path) -> io::Result<Option<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    entries.sort();
    for path in &entries {
        if path.is_file() && is_edge_list(path) {
            return Ok(Some(path.clone()));
        }
    }
    for path in &entries {
        if path.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(path)?
                .map(|e| e.map(|e| e.path()))
                .collect::<io::Result<_>>()?;
            inner.sort();
            if let Some(found) = inner.into_iter().find(|p| p.is_file() && is_edge_list(p)) {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

fn is_edge_list(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("out."))
}

struct LockFile(PathBuf);

impl LockFile {
    fn acquire(path: &Path) -> Result<LockFile, IoError> {
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(path) {
                Ok(_) => return Ok(LockFile(path.to_path_buf())),
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_WAIT {
                        return Err(IoError::Fetch(format!(
                            "timed out waiting for {}; remove it if no download is running",
                            path.display()
                        )));
                    }
                    thread::sleep(Duration::from_millis(100));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for LockFile {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn archive(name: &str, body: &str) -> Vec<u8> {
        let mut builder = tar::Builder::new(bzip2::write::BzEncoder::new(
            Vec::new(),
            bzip2::Compression::default(),
        ));
        for (file, content) in [(format!("{name}/README.{name}"), "readme"), (format!("{name}/out.{name}"), body)] {
            let mut header = tar::Header::new_gnu();
            header.set_size(content.len() as u64);
            header.set_mode(0o644);
            header.set_cksum();
            builder.append_data(&mut header, file, content.as_bytes()).unwrap();
        }
        builder.into_inner().unwrap().finish().unwrap()
    }

    /// Serves `payload` to every request and counts the requests.
    fn serve(payload: Vec<u8>, truncate: bool) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        thread::spawn(move || {
            for stream in listener.incoming() {
                let mut stream = stream.unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                while reader.read_line(&mut line).unwrap() > 0 && line != "\r\n" {
                    line.clear();
                }
                counter.fetch_add(1, Ordering::SeqCst);
                let body: &[u8] = if truncate { &payload[..payload.len() / 2] } else { &payload };
                let _ = write!(
                    stream,
                    "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                    payload.len()
                );
                let _ = stream.write_all(body);
            }
        });
        (format!("http://{addr}/"), hits)
    }

    #[test]
    fn second_fetch_is_a_cache_hit() {
        let (base, hits) = serve(archive("moreno_crime", "% bip\n1 1\n2 1\n"), false);
        let cache = tempfile::tempdir().unwrap();
        let fetcher = Fetcher::new().with_base_url(base);
        let first = fetcher.fetch("moreno_crime", cache.path()).unwrap();
        assert!(first.ends_with("moreno_crime/out.moreno_crime"));
        assert_eq!(fs::read_to_string(&first).unwrap(), "% bip\n1 1\n2 1\n");
        let second = fetcher.fetch("moreno_crime", cache.path()).unwrap();
        assert_eq!(first, second);
        assert_eq!(hits.load(Ordering::SeqCst), 1);
        assert!(!cache.path().join("moreno_crime.lock").exists());
    }

    #[test]
    fn unknown_dataset_lists_known_names() {
        let cache = tempfile::tempdir().unwrap();
        match fetch_konect("nonexistent", cache.path()) {
            Err(IoError::UnknownDataset { known, .. }) => assert!(known.contains("moreno_crime")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_download_is_retried_then_rejected() {
        let (base, hits) = serve(archive("github", "1 1\n"), true);
        let cache = tempfile::tempdir().unwrap();
        let result = Fetcher::new().with_base_url(base).fetch("github", cache.path());
        assert!(matches!(result, Err(IoError::Fetch(_))), "{result:?}");
        assert_eq!(hits.load(Ordering::SeqCst), ATTEMPTS);
        assert!(!cache.path().join("github").join(COMPLETE_MARKER).exists());
    }

    #[test]
    fn unreachable_server_is_a_fetch_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://{}/", listener.local_addr().unwrap());
        drop(listener);
        let cache = tempfile::tempdir().unwrap();
        let result = Fetcher::new()
            .with_base_url(base)
            .with_timeout(Duration::from_secs(5))
            .fetch("github", cache.path());
        assert!(matches!(result, Err(IoError::Fetch(_))));
    }
}
