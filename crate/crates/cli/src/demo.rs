use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qcausal::fixtures::{named_qubit_unitary, one_way_basis, Artifact};
use qcausal::games::{
    chsh_success_quantum, classical_max, inner_product, ip_demo, parse_bits, QuantumStrategy,
    CIRELSON_VALUE,
};
use qcausal::localizability::twisted_partition_basis;
use qcausal::measurement::measurement_channel;
use qcausal::protocols::{
    entanglement_swap_demo, run_theorem4, run_twisted_partition_classical, twisted_protocol_channel,
};
use qcausal::random::{random_state, rng};
use qcausal::tensor::{product_ket, ComplexMatrix};

use crate::{read_artifact, CliResult, Failure, Mode};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DemoName {
    /// One-way protocol for a semicausal measurement.
    Theorem4,
    /// Bell measurement by local CNOTs and entanglement swapping.
    Swap,
    /// CHSH values: classical, quantum and the Cirel'son bound.
    Chsh,
    /// Inner product from AND boxes and one bit of communication.
    Ip,
    /// One-bit protocol for the twisted partition basis.
    Twisted,
}

#[derive(Args)]
pub struct DemoArgs {
    name: DemoName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Basis file for theorem4 (defaults to a built-in one-way basis).
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Number of sampled runs for theorem4.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    mode: Mode,
    /// Alice's bit string for ip.
    #[arg(long, default_value = "101")]
    x: String,
    /// Bob's bit string for ip.
    #[arg(long, default_value = "110")]
    y: String,
    /// Two-qubit product input for swap as two bits, e.g. "01".
    #[arg(long)]
    input: Option<String>,
    /// Bob's twist for the twisted demo: i, h, x, z or t.
    #[arg(long, default_value = "h")]
    u: String,
    /// Print the sampled run as JSON.
    #[arg(long)]
    json: bool,
}

pub fn run(args: DemoArgs) -> CliResult {
    match args.name {
        DemoName::Theorem4 => one_way(&args),
        DemoName::Swap => swap(&args),
        DemoName::Chsh => chsh(),
        DemoName::Ip => ip(&args),
        DemoName::Twisted => twisted(&args),
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("plain data")
    );
}

fn one_way(args: &DemoArgs) -> CliResult {
    let basis = match &args.basis {
        None => one_way_basis(),
        Some(path) => match read_artifact(path)? {
            Artifact::Basis(b) => b,
            Artifact::Channel(_) => {
                return Err(Failure::Usage("--basis expects a basis file".into()))
            }
        },
    };
    let n = basis.len();
    let rho = random_state(n, &mut rng(args.seed)).projector();
    let mut counts = vec![0u64; n];
    let mut first = None;
    for k in 0..args.samples {
        let run = run_theorem4(&basis, &rho, args.seed.wrapping_add(k), args.mode.into())?;
        counts[run.outcome] += 1;
        first.get_or_insert(run);
    }
    let Some(first) = first else {
        return Err(Failure::Usage("--samples must be positive".into()));
    };
    if args.json {
        print_json(&first);
        return Ok(());
    }
    println!(
        "first run (subspace {}, outcome {}):",
        first.subspace, first.outcome
    );
    print!("{}", first.trace.to_json_lines());
    println!("outcome  count  frequency  born");
    for (a, &c) in counts.iter().enumerate() {
        let v = basis.vector(a);
        let born = (&(&v.adjoint() * &rho) * v)[(0, 0)].re;
        println!(
            "{a:>7}  {c:>5}  {:>9.4}  {born:.4}",
            c as f64 / args.samples as f64
        );
    }
    Ok(())
}

fn swap(args: &DemoArgs) -> CliResult {
    let input = match &args.input {
        None => {
            let mut r = rng(args.seed);
            product_ket(&random_state(2, &mut r), &random_state(2, &mut r))
        }
        Some(bits) => {
            let b = parse_bits(bits)?;
            if b.len() != 2 {
                return Err(Failure::Usage(format!(
                    "--input needs two bits, got {bits:?}"
                )));
            }
            ComplexMatrix::basis_ket(4, 2 * b[0] as usize + b[1] as usize)
        }
    };
    let run = entanglement_swap_demo(&input, args.seed)?;
    if args.json {
        print_json(&run);
        return Ok(());
    }
    let overlap = run.final_ab.inner(&run.ab.ket()).norm_sqr();
    println!("Bell outcome on RS    {}", run.rs.name());
    println!("Bell outcome on R'S'  {}", run.rs_prime.name());
    println!("branch probability    {:.6}", run.probability);
    println!("AB projected onto     {}", run.ab.name());
    println!(
        "corrections           Z on Alice: {}, X on Bob: {}",
        run.alice_z, run.bob_x
    );
    println!("fidelity with label   {overlap:.12}");
    Ok(())
}

fn chsh() -> CliResult {
    let quantum = chsh_success_quantum(&QuantumStrategy::cirelson_optimal())?;
    println!("classical maximum   {}", classical_max());
    println!("quantum strategy    {quantum:.16}");
    println!("Cirel'son bound     {CIRELSON_VALUE:.16}");
    Ok(())
}

fn ip(args: &DemoArgs) -> CliResult {
    let x = parse_bits(&args.x)?;
    let y = parse_bits(&args.y)?;
    let run = ip_demo(&x, &y, args.seed)?;
    if args.json {
        print_json(&run);
        return Ok(());
    }
    let bits = |v: &[bool]| {
        v.iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect::<String>()
    };
    println!("Alice box outputs   {}", bits(&run.alice_outputs));
    println!("Bob box outputs     {}", bits(&run.bob_outputs));
    println!("message to Bob      {}", run.message as u8);
    println!("expected            {}", inner_product(&x, &y) as u8);
    println!("result              {}", run.result as u8);
    Ok(())
}

fn twisted(args: &DemoArgs) -> CliResult {
    let u = named_qubit_unitary(&args.u).ok_or_else(|| {
        Failure::Usage(format!("unknown unitary {:?}; use i, h, x, z or t", args.u))
    })?;
    let rho = random_state(16, &mut rng(args.seed)).projector();
    let run = run_twisted_partition_classical(&u, &rho, args.seed)?;
    if args.json {
        print_json(&run);
        return Ok(());
    }
    let target = measurement_channel(&twisted_partition_basis(&u)?);
    let distance = twisted_protocol_channel(&u)?
        .choi()
        .distance(&target.choi());
    println!(
        "Alice block {}, Bob block {}, shared Pauli {}",
        run.alpha,
        run.beta,
        ["I", "X", "Y", "Z"][run.pauli]
    );
    print!("{}", run.trace.to_json_lines());
    println!("Choi distance to the twisted measurement  {distance:.3e}");
    Ok(())
}
