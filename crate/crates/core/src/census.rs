//! Counting the four classes over [1, x] with a segmented factorization
//! sieve, with checkpoint emission and resume.
//!
//! Each slot of a segment carries its unfactored cofactor, the largest
//! exponent seen so far and the running residue ψ(n) mod n. Every base
//! prime p strips its full exponent from its multiples one power at a time;
//! at level j the residue picks up the factor p^j − 1. A cofactor left over
//! after all base primes is a single prime P and contributes P − 1. Since
//! gcd(n, ψ(n)) = gcd(n, ψ(n) mod n), the final residue decides
//! nilpotency, and the largest exponent separates the three nilpotent
//! classes (for squarefree n, ψ(n) = φ(n)).

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use num_integer::Integer;
use rayon::prelude::*;

use crate::arithmetic::{mul_mod, NumberClass};
use crate::error::{Error, Result};
use crate::primes::BasePrimes;

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

pub const CSV_HEADER: [&str; 6] = [
    "x",
    "cyclic",
    "strictly_abelian",
    "strictly_nilpotent",
    "not_nilpotent",
    "total",
];

/// Per-range tallies of the four classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClassCounts {
    pub cyclic: u64,
    pub strictly_abelian: u64,
    pub strictly_nilpotent: u64,
    pub not_nilpotent: u64,
    pub total: u64,
}

impl ClassCounts {
    pub const fn zero() -> Self {
        ClassCounts {
            cyclic: 0,
            strictly_abelian: 0,
            strictly_nilpotent: 0,
            not_nilpotent: 0,
            total: 0,
        }
    }

    #[inline]
    pub fn record(&mut self, class: NumberClass) {
        match class {
            NumberClass::Cyclic => self.cyclic += 1,
            NumberClass::StrictlyAbelian => self.strictly_abelian += 1,
            NumberClass::StrictlyNilpotent => self.strictly_nilpotent += 1,
            NumberClass::NotNilpotent => self.not_nilpotent += 1,
        }
        self.total += 1;
    }

    pub fn get(&self, class: NumberClass) -> u64 {
        match class {
            NumberClass::Cyclic => self.cyclic,
            NumberClass::StrictlyAbelian => self.strictly_abelian,
            NumberClass::StrictlyNilpotent => self.strictly_nilpotent,
            NumberClass::NotNilpotent => self.not_nilpotent,
        }
    }

    /// Componentwise sum with overflow detection.
    pub fn merge(&self, other: &ClassCounts) -> Result<ClassCounts> {
        let add = |a: u64, b: u64, what: &str| {
            a.checked_add(b)
                .ok_or_else(|| Error::Overflow(format!("{what} counter overflowed")))
        };
        Ok(ClassCounts {
            cyclic: add(self.cyclic, other.cyclic, "cyclic")?,
            strictly_abelian: add(self.strictly_abelian, other.strictly_abelian, "strictly_abelian")?,
            strictly_nilpotent: add(
                self.strictly_nilpotent,
                other.strictly_nilpotent,
                "strictly_nilpotent",
            )?,
            not_nilpotent: add(self.not_nilpotent, other.not_nilpotent, "not_nilpotent")?,
            total: add(self.total, other.total, "total")?,
        })
    }

    pub fn is_consistent(&self) -> bool {
        [self.strictly_abelian, self.strictly_nilpotent, self.not_nilpotent]
            .iter()
            .try_fold(self.cyclic, |acc, &v| acc.checked_add(v))
            == Some(self.total)
    }

    /// C(x): cyclic numbers.
    pub fn c(&self) -> u64 {
        self.cyclic
    }

    /// A(x): abelian numbers.
    pub fn a(&self) -> u64 {
        self.cyclic + self.strictly_abelian
    }

    /// N(x): nilpotent numbers.
    pub fn n(&self) -> u64 {
        self.a() + self.strictly_nilpotent
    }

    pub fn a_minus_c(&self) -> u64 {
        self.strictly_abelian
    }

    pub fn n_minus_a(&self) -> u64 {
        self.strictly_nilpotent
    }
}

/// Inclusive range of integers processed as one unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    lo: u64,
    hi: u64,
}

impl Segment {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::Domain(format!("invalid segment [{lo}, {hi}]")));
        }
        Ok(Segment { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Counts at a checkpoint x, covering [1, x].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub x: u64,
    pub counts: ClassCounts,
}

impl Checkpoint {
    pub fn new(x: u64, counts: ClassCounts) -> Result<Self> {
        if counts.total != x || !counts.is_consistent() {
            return Err(Error::Data(format!(
                "checkpoint at {x} has inconsistent counts {counts:?}"
            )));
        }
        Ok(Checkpoint { x, counts })
    }
}

/// Scratch buffers for one segment, reused across segments by a worker.
#[derive(Default)]
pub struct SegmentScratch {
    cofactor: Vec<u64>,
    psi: Vec<u64>,
    max_exp: Vec<u8>,
}

/// Inverse of an odd `p` modulo 2^64, for exact division by multiplication.
#[inline]
fn inverse_mod_2_64(p: u64) -> u64 {
    let mut inv = p; // correct to 3 bits
    for _ in 0..5 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
    }
    inv
}

pub fn count_segment(seg: Segment, base: &BasePrimes) -> Result<ClassCounts> {
    count_segment_with(seg, base, &mut SegmentScratch::default())
}

pub fn count_segment_with(
    seg: Segment,
    base: &BasePrimes,
    scratch: &mut SegmentScratch,
) -> Result<ClassCounts> {
    if !base.covers(seg.hi) {
        return Err(Error::Precondition(format!(
            "base primes complete to {} cannot factor up to {}",
            base.bound(),
            seg.hi
        )));
    }
    let lo = seg.lo;
    let hi = seg.hi;
    let len = seg.len() as usize;
    let SegmentScratch { cofactor, psi, max_exp } = scratch;
    cofactor.clear();
    cofactor.extend(lo..=hi);
    psi.clear();
    psi.resize(len, 1);
    max_exp.clear();
    max_exp.resize(len, 0);

    let small = hi <= u32::MAX as u64;
    for &p in base.primes() {
        if p.saturating_mul(p) > hi {
            break;
        }
        let inv = if p == 2 { 0 } else { inverse_mod_2_64(p) };
        let mut pj = p;
        let mut level = 1u8;
        loop {
            let first = lo.div_ceil(pj) * pj;
            let factor = pj - 1;
            let mut n = first;
            while n <= hi {
                let i = (n - lo) as usize;
                cofactor[i] = if p == 2 { cofactor[i] >> 1 } else { cofactor[i].wrapping_mul(inv) };
                psi[i] = if small {
                    (psi[i] * factor) % n
                } else {
                    mul_mod(psi[i], factor, n)
                };
                max_exp[i] = max_exp[i].max(level);
                n += pj;
            }
            match pj.checked_mul(p) {
                Some(next) if next <= hi => {
                    pj = next;
                    level += 1;
                }
                _ => break,
            }
        }
    }

    let mut counts = ClassCounts::zero();
    for i in 0..len {
        let n = lo + i as u64;
        let mut residue = psi[i];
        let mut e = max_exp[i] as u32;
        let rest = cofactor[i];
        if rest > 1 {
            residue = mul_mod(residue, rest - 1, n);
            e = e.max(1);
        }
        let class = if n.gcd(&residue) != 1 {
            NumberClass::NotNilpotent
        } else {
            NumberClass::of_nilpotent(e)
        };
        counts.record(class);
    }
    Ok(counts)
}

/// How segments are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Worker pool; `None` uses every logical processor.
    Parallel { threads: Option<usize> },
}

#[derive(Clone, Copy, Debug)]
pub struct CensusConfig {
    pub segment_size: u64,
    pub execution: Execution,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            execution: Execution::Parallel { threads: None },
        }
    }
}

/// Powers of ten up to `limit`, any extra values, and `limit` itself; sorted
/// and deduplicated.
pub fn default_checkpoints(limit: u64, extra: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = std::iter::successors(Some(10u64), |&p| p.checked_mul(10))
        .take_while(|&p| p <= limit)
        .collect();
    v.extend_from_slice(extra);
    v.push(limit);
    v.sort_unstable();
    v.dedup();
    v
}

/// Splits (start, limit] into segments no longer than `segment_size` that
/// never straddle a checkpoint.
fn plan_segments(first: u64, limit: u64, checkpoints: &[u64], segment_size: u64) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut lo = first;
    let mut cps = checkpoints.iter().copied().filter(|&c| c >= first).peekable();
    while lo <= limit {
        let mut hi = limit.min(lo.saturating_add(segment_size - 1));
        while let Some(&c) = cps.peek() {
            if c < lo {
                cps.next();
            } else {
                break;
            }
        }
        if let Some(&c) = cps.peek() {
            hi = hi.min(c);
        }
        out.push(Segment { lo, hi });
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
    out
}

/// Counts the classes over [1, limit], calling `sink` with a checkpoint at
/// each requested x in increasing order. Output is identical for every
/// execution mode and worker count.
pub fn census<F>(
    limit: u64,
    checkpoints: &[u64],
    resume: Option<Checkpoint>,
    config: &CensusConfig,
    mut sink: F,
) -> Result<()>
where
    F: FnMut(Checkpoint) -> Result<()>,
{
    if limit == 0 {
        return Err(Error::Domain("limit must be at least 1".into()));
    }
    if config.segment_size == 0 {
        return Err(Error::Config("segment size must be positive".into()));
    }
    let mut cps: Vec<u64> = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if let Some(&bad) = cps.iter().find(|&&c| c == 0 || c > limit) {
        return Err(Error::Config(format!("checkpoint {bad} outside [1, {limit}]")));
    }
    let (start, mut running) = match resume {
        Some(r) => {
            if r.x > limit {
                return Err(Error::Config(format!(
                    "resume point {} lies beyond the limit {limit}",
                    r.x
                )));
            }
            if r.counts.total != r.x || !r.counts.is_consistent() {
                return Err(Error::Config(format!(
                    "resume checkpoint at {} is inconsistent",
                    r.x
                )));
            }
            (r.x, r.counts)
        }
        None => (0, ClassCounts::zero()),
    };
    cps.retain(|&c| c > start);
    if cps.is_empty() {
        return Ok(());
    }
    let end = *cps.last().unwrap();
    let base = BasePrimes::for_limit(end);
    let segments = plan_segments(start + 1, end, &cps, config.segment_size);
    let mut next_cp = cps.iter().copied().peekable();

    let mut absorb = |seg: Segment, counts: ClassCounts| -> Result<()> {
        running = running.merge(&counts)?;
        if next_cp.peek() == Some(&seg.hi) {
            next_cp.next();
            sink(Checkpoint::new(seg.hi, running)?)?;
        }
        Ok(())
    };

    match config.execution {
        Execution::Sequential => {
            let mut scratch = SegmentScratch::default();
            for seg in segments {
                let counts = count_segment_with(seg, &base, &mut scratch)?;
                absorb(seg, counts)?;
            }
        }
        Execution::Parallel { threads } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
            let batch = pool.current_num_threads().max(1) * 2;
            for chunk in segments.chunks(batch) {
                let results: Vec<Result<ClassCounts>> = pool.install(|| {
                    chunk
                        .par_iter()
                        .map_init(SegmentScratch::default, |scratch, &seg| {
                            count_segment_with(seg, &base, scratch)
                        })
                        .collect()
                });
                for (seg, counts) in chunk.iter().zip(results) {
                    absorb(*seg, counts?)?;
                }
            }
        }
    }
    Ok(())
}

/// Convenience wrapper collecting every checkpoint.
pub fn census_collect(
    limit: u64,
    checkpoints: &[u64],
    resume: Option<Checkpoint>,
    config: &CensusConfig,
) -> Result<Vec<Checkpoint>> {
    let mut out = Vec::new();
    census(limit, checkpoints, resume, config, |cp| {
        out.push(cp);
        Ok(())
    })?;
    Ok(out)
}

pub fn write_checkpoints<W: Write>(w: W, rows: &[Checkpoint]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for cp in rows {
        let c = &cp.counts;
        wtr.write_record([
            cp.x.to_string(),
            c.cyclic.to_string(),
            c.strictly_abelian.to_string(),
            c.strictly_nilpotent.to_string(),
            c.not_nilpotent.to_string(),
            c.total.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn checkpoints_to_string(rows: &[Checkpoint]) -> String {
    let mut buf = Vec::new();
    write_checkpoints(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii csv")
}

pub fn read_checkpoints<R: Read>(r: R) -> Result<Vec<Checkpoint>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Data(format!(
            "unexpected checkpoint header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<Checkpoint> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<u64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Data(format!("bad field {i} in checkpoint row {rec:?}")))
        };
        let counts = ClassCounts {
            cyclic: field(1)?,
            strictly_abelian: field(2)?,
            strictly_nilpotent: field(3)?,
            not_nilpotent: field(4)?,
            total: field(5)?,
        };
        let cp = Checkpoint::new(field(0)?, counts)?;
        if rows.last().is_some_and(|prev| prev.x >= cp.x) {
            return Err(Error::Data("checkpoint rows must be strictly increasing".into()));
        }
        rows.push(cp);
    }
    Ok(rows)
}

/// Replaces `path` with `bytes` by writing a sibling temporary file and
/// renaming it over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
