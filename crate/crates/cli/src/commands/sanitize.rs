use std::path::Path;

use ehrhart_dp::histogram::{
    histogram_of_records, histogram_to_json, read_records_csv, write_records_csv, Schema,
};
use ehrhart_dp::mechanism::{Sanitizer, TruncationSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{emit, limits, pretty, read_file, write_file, CliError, CliResult, Common};

pub fn run(c: &Common, records: &Path, schema: &Path, records_out: Option<&Path>) -> CliResult<()> {
    let schema = Schema::from_json(&read_file(schema)?)?;
    let rows = read_records_csv(read_file(records)?.as_bytes(), &schema)?;
    let input = histogram_of_records(&rows, &schema)?;
    if input.n() == 0 {
        return Err(CliError::Usage("the record file has no data rows".into()));
    }
    // The prior is over the schema's record space, whatever --k says.
    let c = Common {
        k: schema.k(),
        ..c.clone()
    };
    let theta = c.theta_f64()?;
    let prior = c.prior::<f64>(input.n())?;
    let trunc = TruncationSpec::default_ball(&prior, c.radius_const)?;
    let sanitizer = Sanitizer::new(c.k, theta, trunc.clone(), limits()?.series_terms)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let output = sanitizer.sample(&input, &mut rng)?;

    emit(c.out.as_deref(), &pretty(&histogram_to_json(&output)))?;
    if let Some(path) = records_out {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &schema, &output)?;
        write_file(path, &String::from_utf8(buf).expect("CSV output is UTF-8"))?;
    }
    let (center, radius) = match &trunc {
        TruncationSpec::Ball { center, radius } => (center.to_dense(), *radius),
        TruncationSpec::Interval { .. } => unreachable!("default truncation is a ball"),
    };
    let params = json!({
        "config": c.provenance("sanitize"),
        "records": input.n(),
        "cells": c.k,
        "theta": theta,
        "epsilon": -theta.ln(),
        "truncation_center": center,
        "truncation_radius": radius,
    });
    let text = pretty(&params);
    if c.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    Ok(())
}
