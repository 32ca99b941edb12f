use std::io::{Read, Write};

use super::{EventError, EventTrain};

/// Formats with 9 significant digits, `%.9g` style.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes trains as `trial_id,label,time` rows in the given order.
pub fn write_events_csv<W: Write>(out: W, trains: &[EventTrain]) -> Result<(), EventError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial_id", "label", "time"])?;
    for train in trains {
        let id = train.trial_id.to_string();
        for &t in &train.times {
            w.write_record([id.as_str(), train.label.as_str(), format_sig9(t).as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an event CSV back into trains, one per `(trial_id, label)` in order of
/// first appearance. Trains without events are not represented in the file.
pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<EventTrain>, EventError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["trial_id", "label", "time"] {
        return Err(EventError::Parse(format!("unexpected header {headers:?}")));
    }
    let mut trains: Vec<EventTrain> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let id: usize = rec[0].parse().map_err(|_| EventError::Parse(format!("trial_id {:?}", &rec[0])))?;
        let label = &rec[1];
        let t: f64 = rec[2].parse().map_err(|_| EventError::Parse(format!("time {:?}", &rec[2])))?;
        match trains.iter_mut().find(|tr| tr.trial_id == id && tr.label == label) {
            Some(tr) => {
                if !(t > *tr.times.last().expect("non-empty")) {
                    return Err(EventError::Unordered);
                }
                tr.times.push(t)
            }
            None => trains.push(EventTrain { trial_id: id, label: label.to_string(), times: vec![t] }),
        }
    }
    Ok(trains)
}
