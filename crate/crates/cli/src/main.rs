use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mpdct::catalog;
use mpdct::class::orthonormalize;
use mpdct::codec::{self, BlockTransform, CompressionConfig, GrayImage};
use mpdct::linalg::{dct_matrix, DEFAULT_RHO};
use mpdct::metrics::{self, CSV_HEADER};
use mpdct::scaling::jam_scale_to;
use mpdct::search::{self, SearchMode, SearchOptions};
use mpdct::TransformKernel;

#[derive(Parser)]
#[command(
    name = "mpdct",
    version,
    about = "Multiplierless 8-point DCT approximations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive Pareto search over the whole parameter space.
    Search(SearchArgs),
    /// Figures of merit for one transform.
    Metrics(MetricsArgs),
    /// Compress one image and report PSNR and SSIM.
    Compress(CompressArgs),
    /// Rate-quality curves averaged over an image corpus.
    Curves(CurvesArgs),
}

#[derive(Args, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    /// `pruned` solves the linear constraints first; `scan` tests all 7^8 vectors.
    #[arg(long, default_value = "pruned")]
    mode: String,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "front")]
    out: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct KernelChoice {
    /// One of mrdct, ocbt, j3, j4, j5, rdct, j7 (or j1..j7) and dct.
    #[arg(
        long,
        conflicts_with = "kernel_file",
        required_unless_present = "kernel_file"
    )]
    builtin: Option<String>,
    /// Kernel text file as written by `search`.
    #[arg(long)]
    kernel_file: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct MetricsArgs {
    #[command(flatten)]
    kernel: KernelChoice,
    #[arg(long, default_value_t = 8, value_parser = parse_size)]
    size: usize,
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
}

#[derive(Args, Serialize)]
struct CompressArgs {
    image: PathBuf,
    #[command(flatten)]
    kernel: KernelChoice,
    #[arg(long = "N", default_value_t = 8, value_parser = parse_size)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Reconstructed image (PGM or PNG by extension).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replicate edges when the image is not a multiple of N.
    #[arg(long)]
    pad: bool,
}

#[derive(Args, Serialize)]
struct CurvesArgs {
    #[arg(env = "MPDCT_CORPUS")]
    corpus: PathBuf,
    /// Comma-separated builtin labels.
    #[arg(long, value_delimiter = ',', default_value = "mrdct,rdct,j7,dct")]
    kernels: Vec<String>,
    #[arg(long = "N", default_value_t = 8, value_parser = parse_size)]
    n: usize,
    /// Largest r in the sweep; defaults to round(0.75·N²).
    #[arg(long)]
    r_max: Option<usize>,
    /// Sweep step.
    #[arg(long, default_value_t = 1)]
    r_step: usize,
    #[arg(long)]
    pad: bool,
    #[arg(long, default_value = "curves.csv")]
    out: PathBuf,
}

fn parse_size(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n @ (8 | 16 | 32)) => Ok(n),
        _ => Err(format!("'{s}' is not one of 8, 16, 32")),
    }
}

#[derive(Serialize)]
struct RunManifest<'a, P: Serialize> {
    command: &'a str,
    parameters: &'a P,
    seeds: Vec<u64>,
    version: &'static str,
    outputs: Vec<String>,
}

fn write_manifest<P: Serialize>(
    path: &Path,
    command: &str,
    params: &P,
    outputs: &[PathBuf],
) -> Result<()> {
    let manifest = RunManifest {
        command,
        parameters: params,
        seeds: Vec::new(),
        version: env!("CARGO_PKG_VERSION"),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

enum Resolved {
    Dct,
    Kernel(TransformKernel),
}

fn resolve(choice: &KernelChoice) -> Result<Resolved> {
    if let Some(path) = &choice.kernel_file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let kernel = TransformKernel::from_text(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Resolved::Kernel(kernel));
    }
    let name = choice.builtin.as_deref().unwrap_or_default();
    if name.eq_ignore_ascii_case("dct") {
        return Ok(Resolved::Dct);
    }
    let Some(opt) = catalog::by_name(name) else {
        bail!("unknown builtin '{name}' (expected mrdct, ocbt, j3, j4, j5, rdct, j7 or dct)");
    };
    Ok(Resolved::Kernel(orthonormalize(&opt.params())?))
}

fn resized(kernel: TransformKernel, n: usize) -> Result<TransformKernel> {
    if kernel.size() == n {
        return Ok(kernel);
    }
    Ok(jam_scale_to(&kernel, n)?)
}

fn block_transform(choice: &KernelChoice, n: usize) -> Result<BlockTransform> {
    Ok(match resolve(choice)? {
        Resolved::Dct => BlockTransform::exact_dct(n)?,
        Resolved::Kernel(k) => BlockTransform::Approx(resized(k, n)?),
    })
}

fn cmd_search(args: &SearchArgs) -> Result<()> {
    let mode: SearchMode = args.mode.parse()?;
    let opts = SearchOptions {
        rho: args.rho,
        mode,
        workers: args.workers,
    };
    let front = search::pareto_search(&opts)?;

    let kernel_dir = args.out.join("kernels");
    fs::create_dir_all(&kernel_dir)
        .with_context(|| format!("creating {}", kernel_dir.display()))?;
    let csv_path = args.out.join("front.csv");
    let json_path = args.out.join("front.json");
    let csv = search::front_report_csv(&front);
    fs::write(&csv_path, &csv)?;
    let mut json = serde_json::to_string_pretty(&search::front_report_json(&front))?;
    json.push('\n');
    fs::write(&json_path, json)?;

    let mut outputs = vec![csv_path, json_path];
    for m in &front.members {
        for a in &m.params {
            let kernel = orthonormalize(a)?;
            let name = catalog::OPTIMA
                .iter()
                .find(|o| o.params() == *a)
                .map_or_else(|| format!("a{:07}", a.index()), |o| o.short.to_string());
            let path = kernel_dir.join(format!("{name}.kernel"));
            fs::write(&path, kernel.to_text())?;
            outputs.push(path);
        }
    }
    write_manifest(&args.out.join("manifest.json"), "search", args, &outputs)?;

    print!("{csv}");
    let s = front.stats;
    println!(
        "enumerated {} vectors, {} orthogonal, {} non-dominated objective vectors",
        s.enumerated, s.orthogonal, s.front_size
    );
    let found = catalog::OPTIMA
        .iter()
        .filter(|o| front.members.iter().any(|m| m.params.contains(&o.params())))
        .count();
    println!(
        "catalogued optima on the front: {found}/{}",
        catalog::OPTIMA.len()
    );
    if s.surplus > 0 {
        println!("surplus: {} front members outside the catalogue", s.surplus);
    }
    Ok(())
}

fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let report = match resolve(&args.kernel)? {
        Resolved::Dct => metrics::evaluate_matrix("dct", &dct_matrix(args.size)?, args.rho, None)?,
        Resolved::Kernel(k) => metrics::evaluate(&resized(k, args.size)?, args.rho)?,
    };
    println!("{CSV_HEADER}");
    println!("{}", report.csv_row());
    Ok(())
}

fn cmd_compress(args: &CompressArgs) -> Result<()> {
    let img = GrayImage::read(&args.image)?;
    let transform = block_transform(&args.kernel, args.n)?;
    let cfg = CompressionConfig::new(transform, args.r)?.with_padding(args.pad);
    let out = codec::compress_image(&img, &cfg)?;
    let psnr = codec::psnr(&img, &out)?;
    let ssim = codec::ssim(&img, &out)?;
    if let Some(path) = &args.out {
        out.write(path)?;
        write_manifest(
            &manifest_path(path),
            "compress",
            args,
            std::slice::from_ref(path),
        )?;
    }
    println!(
        "kernel={} N={} r={} rate={:.6}",
        cfg.transform.label(),
        args.n,
        args.r,
        cfg.rate()
    );
    println!("psnr_db={psnr:.4}");
    println!("ssim={ssim:.6}");
    Ok(())
}

fn cmd_curves(args: &CurvesArgs) -> Result<()> {
    let corpus: Vec<GrayImage> = codec::load_corpus(&args.corpus)
        .with_context(|| format!("loading corpus {}", args.corpus.display()))?
        .into_iter()
        .map(|(_, img)| img)
        .collect();
    let n2 = args.n * args.n;
    let r_max = args.r_max.unwrap_or((0.75 * n2 as f64).round() as usize);
    if r_max == 0 || r_max > n2 || args.r_step == 0 {
        bail!(
            "r sweep 1..={r_max} step {} is outside 1..={n2}",
            args.r_step
        );
    }
    let rs: Vec<usize> = (1..=r_max).step_by(args.r_step).collect();
    let transforms = args
        .kernels
        .iter()
        .map(|name| {
            block_transform(
                &KernelChoice {
                    builtin: Some(name.clone()),
                    kernel_file: None,
                },
                args.n,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = codec::batch_run(&corpus, &transforms, &rs, args.pad)?;
    fs::write(&args.out, codec::batch_csv(&rows))
        .with_context(|| format!("writing {}", args.out.display()))?;
    write_manifest(
        &manifest_path(&args.out),
        "curves",
        args,
        std::slice::from_ref(&args.out),
    )?;
    println!(
        "{} rows for {} images written to {}",
        rows.len(),
        corpus.len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Curves(a) => cmd_curves(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
