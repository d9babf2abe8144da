use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use lapq::codec::codebook_for;
use lapq::sim::{self, default_distortion_grid, inclusive_grid};
use lapq::{
    decode, encode, run_simulation, sample_laplacian, solve_for_distortion, solve_threshold,
    BitStream, QuantizerDesign,
};

use crate::args::{
    Command, CurveArgs, DecodeArgs, DesignArgs, EncodeArgs, Format, SampleArgs, SimulateArgs,
    TableArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<lapq::Error> for CliError {
    fn from(e: lapq::Error) -> Self {
        if e.is_format_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid {spec:?}, expected start:step:stop"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, step, stop] = parts[..] else {
        return Err(bad());
    };
    inclusive_grid(start, step, stop).ok_or_else(bad)
}

pub fn parse_blocks(spec: &str) -> Result<Vec<usize>, CliError> {
    let blocks: Vec<usize> = spec
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("invalid block list {spec:?}")))?;
    if let Some(m) = blocks
        .iter()
        .find(|m| !(1..=lapq::block_code::MAX_BLOCK_SIZE).contains(*m))
    {
        return Err(CliError::Domain(format!(
            "block size {m} out of range 1..=16"
        )));
    }
    Ok(blocks)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn read_raw_f64(path: &Path) -> Result<Vec<f64>, CliError> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(CliError::Io(format!(
            "{}: length {} is not a multiple of 8 bytes",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn write_raw_f64(path: &Path, xs: &[f64]) -> Result<(), CliError> {
    let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Design(a) => design(a),
        Command::Table(a) => table(a),
        Command::Curve(a) => curve(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Sample(a) => sample(a),
    }
}

fn design_text(d: &QuantizerDesign) -> String {
    let h = lapq::single_symbol_entropy(d.p1, d.p2);
    format!(
        "t1          {:.6}\n\
         y1          {:.6}\n\
         y2          {:.6}\n\
         distortion  {:.6}\n\
         sqnr_db     {:.6}\n\
         p1          {:.6}\n\
         p2          {:.6}\n\
         entropy     {:.6}\n",
        d.t1, d.y1, d.y2, d.distortion, d.sqnr_db, d.p1, d.p2, h
    )
}

fn design(a: DesignArgs) -> Result<(), CliError> {
    let d = match (a.target.sqnr, a.target.distortion) {
        (Some(s), None) => solve_threshold(s)?,
        (None, Some(d)) => solve_for_distortion(d)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --sqnr, --distortion".into(),
            ))
        }
    };
    let text = match a.format {
        Format::Text => design_text(&d),
        Format::Json => serde_json::to_string_pretty(&d).expect("design serializes") + "\n",
    };
    emit(None, &text)
}

fn table(a: TableArgs) -> Result<(), CliError> {
    let grid = parse_grid(&a.grid)?;
    let blocks = parse_blocks(&a.blocks)?;
    let rows = sim::make_table(&grid, &blocks)?;
    emit(a.out.as_deref(), &sim::table_csv(&rows, &blocks))
}

fn curve(a: CurveArgs) -> Result<(), CliError> {
    let grid = match &a.dgrid {
        Some(spec) => parse_grid(spec)?,
        None => default_distortion_grid(),
    };
    let blocks = parse_blocks(&a.blocks)?;
    let points = sim::make_curve(&grid, &blocks)?;
    emit(a.out.as_deref(), &sim::curve_csv(&points, &blocks))
}

fn encode_cmd(a: EncodeArgs) -> Result<(), CliError> {
    let blocks = parse_blocks(&a.block.to_string())?;
    let design = solve_threshold(a.sqnr)?;
    let samples = read_raw_f64(&a.input)?;
    let codebook = codebook_for(&design, blocks[0])?;
    let stream = encode(&samples, &design, &codebook)?;
    fs::write(&a.out, stream.to_bytes()).map_err(|e| io_error(&a.out, e))?;

    let mse = samples
        .iter()
        .map(|&x| (x - design.reconstruct(x)).powi(2))
        .sum::<f64>()
        / samples.len() as f64;
    println!("samples          {}", samples.len());
    println!("block_size       {}", blocks[0]);
    println!("t1               {:.6}", design.t1);
    println!("bits_per_symbol  {:.6}", stream.bits_per_symbol());
    println!("analytic_rate    {:.6}", codebook.avg_bits_per_symbol);
    println!("mse              {mse:.6}");
    Ok(())
}

fn decode_cmd(a: DecodeArgs) -> Result<(), CliError> {
    let bytes = fs::read(&a.input).map_err(|e| io_error(&a.input, e))?;
    let stream = BitStream::from_bytes(&bytes)?;
    let xs = decode(&stream)?;
    write_raw_f64(&a.out, &xs)?;
    println!("samples          {}", xs.len());
    println!("block_size       {}", stream.block_size);
    println!("t1               {:.6}", stream.t1);
    println!("bits_per_symbol  {:.6}", stream.bits_per_symbol());
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let blocks = parse_blocks(&a.blocks)?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let report = run_simulation(a.sqnr, &blocks, a.n, a.seed)?;
    emit(a.out.as_deref(), &(report.to_json() + "\n"))
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    write_raw_f64(&a.out, &sample_laplacian(a.seed, a.n))
}
