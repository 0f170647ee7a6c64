use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use qreg_core::dataset::CsvOptions;
use qreg_core::klevel::{candidate_levels, write_level_csv};
use qreg_core::{load_csv, perturb, solve, write_trace_csv, Algorithm, QregError, RunReport, SolveOptions};

use crate::{Failure, SolveArgs};

/// A first line with any non-numeric field is a header.
fn sniff_header(path: &Path) -> Result<bool, QregError> {
    let file = File::open(path).map_err(|source| QregError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut line = String::new();
    BufReader::new(file).read_line(&mut line).map_err(|source| QregError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(line.trim().split(',').any(|f| f.trim().parse::<f64>().is_err()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| QregError::Io {
            path: path.to_path_buf(),
            source,
        })
        .map_err(Failure::from)
}

pub fn run(args: &SolveArgs) -> Result<(), Failure> {
    if args.trace.is_some() && args.algo != Algorithm::RandQr {
        return Err(Failure::usage("--trace needs --algo randqr"));
    }
    if args.dump_level.is_some() && args.algo != Algorithm::Kset {
        return Err(Failure::usage("--dump-level needs --algo kset"));
    }
    let options = CsvOptions {
        header: sniff_header(&args.input)?,
        response_column: args.response_column,
    };
    let ds = load_csv(&args.input, &options)?;
    let opts = SolveOptions {
        seed: args.seed,
        perturb: args.perturb,
        trace: args.trace.is_some(),
    };
    let run = solve(&ds, args.tau, args.algo, &opts)?;

    if let Some(path) = &args.trace {
        write_trace_csv(&run.trace, create(path)?)?;
    }
    if let Some(path) = &args.dump_level {
        let k = candidate_levels(ds.n(), args.tau)[0];
        let work = perturb(&ds, run.perturb_magnitude, args.seed)?;
        write_level_csv(&work, k, create(path)?)?;
    }

    let report = RunReport::new(args.algo, &ds, args.tau, args.seed, &run);
    let text = if args.json {
        serde_json::to_string(&report)
    } else {
        serde_json::to_string_pretty(&report)
    };
    println!("{}", text.expect("report serializes"));
    Ok(())
}
