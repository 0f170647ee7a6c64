use qreg_core::dataset::save_csv;
use qreg_core::{generate_synthetic, QregError, SyntheticSpec};

use crate::{Failure, GenArgs};

pub fn run(args: &GenArgs) -> Result<(), Failure> {
    let spec = SyntheticSpec {
        noise_scale: args.noise,
        outlier_fraction: args.outliers,
        ..SyntheticSpec::new(args.n, args.d, args.seed)
    };
    // every generator error is a bad flag combination
    let data = generate_synthetic(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    save_csv(&data.dataset, &args.out).map_err(|e: QregError| Failure::from(e))
}
