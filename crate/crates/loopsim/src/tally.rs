//! Coincidence-tally dump format: `# key=value` metadata lines (always
//! `photons`, `shots`, `seed` first), a `pattern,count` header, and one row
//! per outcome pattern in index order.

use loopsim_core::analysis::pattern_index;
use loopsim_core::montecarlo::CoincidenceTally;

use crate::emit::{Table, Value};
use crate::error::{CliError, Result};

/// Table holding a tally plus extra metadata.
pub fn tally_table(tally: &CoincidenceTally, extra_meta: &[(String, Value)]) -> Result<Table> {
    let mut t = Table::new(&["pattern", "count"]);
    t.meta("photons", tally.photons).meta("shots", tally.shots).meta("seed", tally.seed);
    t.meta.extend(extra_meta.iter().cloned());
    for (label, count) in tally.rows() {
        t.push(vec![label.into(), count.into()])?;
    }
    Ok(t)
}

/// Renders a tally dump.
pub fn write_tally(tally: &CoincidenceTally, extra_meta: &[(String, Value)]) -> Result<String> {
    tally_table(tally, extra_meta)?.to_csv()
}

/// Parses a tally dump, returning the tally and all metadata pairs.
pub fn read_tally(text: &str) -> Result<(CoincidenceTally, Vec<(String, String)>)> {
    let bad = |m: String| CliError::Format(format!("tally dump: {m}"));
    let mut meta = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let (k, v) = line[1..]
            .trim()
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed metadata line {line:?}")))?;
        meta.push((k.to_owned(), v.to_owned()));
    }
    let get = |key: &str| -> Result<u64> {
        meta.iter()
            .find(|(k, _)| k == key)
            .ok_or_else(|| bad(format!("missing {key}")))?
            .1
            .parse()
            .map_err(|_| bad(format!("{key} is not an integer")))
    };
    let photons = get("photons")? as usize;
    if !(1..=24).contains(&photons) {
        return Err(bad(format!("unsupported photon count {photons}")));
    }
    let mut tally = CoincidenceTally::empty(photons, get("seed")?);
    tally.shots = get("shots")?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 2 || &headers[0] != "pattern" || &headers[1] != "count" {
        return Err(bad("header must start with pattern,count".into()));
    }
    let mut seen = vec![false; tally.counts.len()];
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let label = &rec[0];
        if label.len() != photons {
            return Err(bad(format!("pattern {label:?} does not have {photons} photons")));
        }
        let i = pattern_index(label)?;
        let c: u64 = rec[1].parse().map_err(|_| bad(format!("count {:?} is not an integer", &rec[1])))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(bad(format!("pattern {label} listed twice")));
        }
        tally.counts[i] = c;
    }
    if tally.total() > tally.shots {
        return Err(bad("more coincidences than shots".into()));
    }
    Ok((tally, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let t = CoincidenceTally { photons: 2, counts: vec![5, 0, 1, 7], shots: 100, seed: 42 };
        let text = write_tally(&t, &[("pattern".into(), "1100".into())]).unwrap();
        assert_eq!(
            text,
            "# photons=2\n# shots=100\n# seed=42\n# pattern=1100\npattern,count\nhh,5\nhv,0\nvh,1\nvv,7\n"
        );
        let (back, meta) = read_tally(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(meta[3], ("pattern".to_owned(), "1100".to_owned()));
    }

    #[test]
    fn malformed_dumps_are_rejected() {
        assert!(read_tally("pattern,count\nhh,1\n").is_err());
        let dup = "# photons=1\n# shots=5\n# seed=0\npattern,count\nh,1\nh,2\n";
        assert!(read_tally(dup).is_err());
        let over = "# photons=1\n# shots=1\n# seed=0\npattern,count\nh,1\nv,2\n";
        assert!(read_tally(over).is_err());
    }
}
