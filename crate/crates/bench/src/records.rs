//! CSV encoding of experiment records and ratio summaries.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;
use crate::experiment::{ExperimentRecord, RatioSummary};

pub const RECORD_HEADER: &str = "pair_id,algorithm,param,iteration,d_x,ot_value,dual_value,wall_ms";
pub const SUMMARY_HEADER: &str = "algorithm_a,algorithm_b,param,iteration,max,median,min,pairs";

fn write_rows<W: Write, T: Serialize>(out: W, header: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?)
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    write_rows(out, RECORD_HEADER, records)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    read_rows(input)
}

pub fn write_summary<W: Write>(out: W, rows: &[RatioSummary]) -> Result<()> {
    write_rows(out, SUMMARY_HEADER, rows)
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<RatioSummary>> {
    read_rows(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use otx_core::Algorithm;

    #[test]
    fn header_and_empty_file() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), format!("{RECORD_HEADER}\n"));
        assert!(read_records(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn awkward_floats_survive() {
        let rec = ExperimentRecord {
            pair_id: 3,
            algorithm: Algorithm::Sinkhorn,
            param: 0.1 + 0.2,
            iteration: 7,
            d_x: 1e-300,
            ot_value: 123456789.123456789,
            dual_value: -0.0,
            wall_ms: 0.0,
        };
        let mut buf = Vec::new();
        write_records(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back, vec![rec]);
        assert!(read_records("pair_id,algorithm\n1,nope\n".as_bytes()).is_err());
    }
}
