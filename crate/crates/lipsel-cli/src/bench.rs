//! Benchmark suites: seeded random instances, engine-versus-oracle numbers,
//! CSV out. Rows are a pure function of `(suite, seed, instance id)`, so a
//! fixed seed reproduces the CSV byte for byte (wall time is reported as 0
//! unless timing is explicitly enabled, since real durations are not
//! reproducible).

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lipsel_core::instances::affine_instance;
use lipsel_core::metricspace::Metric;
use lipsel_core::oracle::{finiteness_check, optimal_selection_lp};
use lipsel_core::selection::select_affine;
use lipsel_core::{Error, Result, Tolerances};

use crate::json::format_f64;

pub const HEADER: &str = "id,n,k,num_vertices,oracle_lambda,engine_seminorm,ratio,stage_c,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Engine seminorm against the exact optimum on random instances.
    SelectionRatio,
    /// Global optimum against the admissible-subset maximum.
    Finiteness,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "selection-ratio" => Ok(Suite::SelectionRatio),
            "finiteness" => Ok(Suite::Finiteness),
            other => Err(Error::Input(format!(
                "unknown suite {other:?}; available: selection-ratio, finiteness"
            ))),
        }
    }
}

struct Row {
    id: usize,
    n: usize,
    k: usize,
    num_vertices: usize,
    oracle_lambda: f64,
    engine_seminorm: f64,
    ratio: f64,
    stage_c: f64,
    wall_ms: f64,
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.id,
            self.n,
            self.k,
            self.num_vertices,
            format_f64(self.oracle_lambda),
            format_f64(self.engine_seminorm),
            format_f64(self.ratio),
            format_f64(self.stage_c),
            format_f64(self.wall_ms),
        )
    }
}

/// The ratio of two nonnegative quantities, with `0/0` read as 1 (no gap).
fn gap_ratio(num: f64, den: f64) -> f64 {
    if den > 1e-12 {
        num / den
    } else if num <= 1e-9 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn run_instance(suite: Suite, seed: u64, id: usize, timing: bool, tol: &Tolerances) -> Result<Row> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let inst = affine_instance(&mut rng, 2, 3, 8, id % 2 == 1);
    let sel = select_affine(&inst.space, &inst.graph, &inst.flats, inst.distortion, inst.k, tol)?;
    let global = optimal_selection_lp(&inst.space, &inst.flats)?;

    let (oracle_lambda, ratio) = match suite {
        Suite::SelectionRatio => {
            (global.lambda_star, gap_ratio(sel.seminorm, global.lambda_star))
        }
        Suite::Finiteness => {
            let fin = finiteness_check(&inst.space, &inst.graph, &inst.flats, inst.k)?;
            // Column holds the subset max; the ratio is the finiteness gap
            // global / subset-max (at least 1 up to solver rounding).
            (fin.lambda_star, gap_ratio(global.lambda_star, fin.lambda_star))
        }
    };
    Ok(Row {
        id,
        n: inst.flats[0].ambient_dim(),
        k: inst.k,
        num_vertices: inst.space.len(),
        oracle_lambda,
        engine_seminorm: sel.seminorm,
        ratio,
        stage_c: sel.diagnostics.stage_c,
        wall_ms: if timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
    })
}

/// Run a suite over `sizes` blocks of instances (ids are consecutive across
/// blocks) on `threads` worker threads and render the CSV, ending with the
/// summary row carrying the maximum ratio.
pub fn run_suite(
    suite: Suite,
    seed: u64,
    sizes: &[usize],
    threads: usize,
    timing: bool,
    tol: &Tolerances,
) -> Result<String> {
    if sizes.is_empty() || sizes.iter().sum::<usize>() == 0 {
        return Err(Error::Input("bench needs a nonempty list of instance counts".into()));
    }
    let total: usize = sizes.iter().sum();
    let threads = threads.max(1).min(total);

    let mut results: Vec<Option<Result<Row>>> = Vec::new();
    results.resize_with(total, || None);
    std::thread::scope(|scope| {
        let mut chunks: Vec<&mut [Option<Result<Row>>]> = Vec::new();
        let mut rest = results.as_mut_slice();
        let base = total / threads;
        let extra = total % threads;
        for t in 0..threads {
            let len = base + usize::from(t < extra);
            let (head, tail) = rest.split_at_mut(len);
            chunks.push(head);
            rest = tail;
        }
        let mut offset = 0usize;
        for chunk in chunks {
            let start = offset;
            offset += chunk.len();
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(run_instance(suite, seed, start + i, timing, tol));
                }
            });
        }
    });

    let mut out = String::from(HEADER);
    out.push('\n');
    let mut max_ratio = 0.0f64;
    for slot in results {
        let row = slot.expect("every slot is filled")?;
        max_ratio = max_ratio.max(row.ratio);
        out.push_str(&row.csv());
        out.push('\n');
    }
    out.push_str(&format!("max-ratio,,,,,,{},,\n", format_f64(max_ratio)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_reject() {
        assert_eq!(Suite::parse("selection-ratio").unwrap(), Suite::SelectionRatio);
        assert_eq!(Suite::parse("finiteness").unwrap(), Suite::Finiteness);
        assert!(Suite::parse("nope").is_err());
    }

    #[test]
    fn identical_seeds_give_identical_csv_across_thread_counts() {
        let tol = Tolerances::default();
        let a = run_suite(Suite::SelectionRatio, 3, &[6], 1, false, &tol).unwrap();
        let b = run_suite(Suite::SelectionRatio, 3, &[6], 3, false, &tol).unwrap();
        let c = run_suite(Suite::SelectionRatio, 3, &[2, 4], 2, false, &tol).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.lines().count(), 8, "header, six rows, summary");
    }

    #[test]
    fn empty_sizes_are_rejected() {
        let tol = Tolerances::default();
        assert!(run_suite(Suite::Finiteness, 0, &[], 1, false, &tol).is_err());
        assert!(run_suite(Suite::Finiteness, 0, &[0, 0], 1, false, &tol).is_err());
    }
}
