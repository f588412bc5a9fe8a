use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qcausal::fixtures::{named_qubit_unitary, Artifact};
use qcausal::games::and_box_channel;
use qcausal::localizability::{mismatch_basis, twisted_partition_basis};
use qcausal::twirl::{bell_twirl, stabilizer_channel, werner_twirl, PauliString};
use qcausal::BiDims;

use crate::{CliResult, Failure};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BuildKind {
    /// Group twirl; pick the group with --group.
    Twirl,
    /// Stabilizer measurement from Pauli generators, e.g. +XX +ZZ.
    Stabilizer,
    /// Twisted partition basis; pick the twist with --u.
    TwistedBasis,
    /// Maximally entangled basis whose unitaries are not a group.
    Mismatch,
    /// The AND box.
    Andbox,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Group {
    /// Tetrahedral g (x) g, giving Werner states.
    Werner,
    /// {I, XX, YY, ZZ}, equal to the Bell measurement.
    Bell,
}

#[derive(Args)]
pub struct BuildArgs {
    kind: BuildKind,
    /// Pauli generators for stabilizer.
    generators: Vec<String>,
    #[arg(long, value_enum, default_value_t = Group::Werner)]
    group: Group,
    /// Bob's twist for twisted-basis: i, h, x, z or t.
    #[arg(long, default_value = "h")]
    u: String,
    /// Qubits held by Alice for stabilizer (defaults to half, rounded up).
    #[arg(long)]
    alice_qubits: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn stabilizer(args: &BuildArgs) -> CliResult<Artifact> {
    if args.generators.is_empty() {
        return Err(Failure::Usage(
            "stabilizer needs at least one Pauli generator".into(),
        ));
    }
    let gens = args
        .generators
        .iter()
        .map(|g| g.parse::<PauliString>())
        .collect::<Result<Vec<_>, _>>()?;
    let n = gens[0].num_qubits();
    if gens.iter().any(|g| g.num_qubits() != n) {
        return Err(Failure::Usage(
            "generators act on different numbers of qubits".into(),
        ));
    }
    let alice = args.alice_qubits.unwrap_or(n.div_ceil(2));
    if alice == 0 || alice >= n {
        return Err(Failure::Usage(format!(
            "--alice-qubits must be between 1 and {}",
            n.saturating_sub(1)
        )));
    }
    let dims = BiDims::new(1 << alice, 1 << (n - alice))?;
    Ok(Artifact::Channel(
        stabilizer_channel(&gens, dims).map_err(|e| Failure::Usage(e.to_string()))?,
    ))
}

pub fn run(args: BuildArgs) -> CliResult {
    if !args.generators.is_empty() && !matches!(args.kind, BuildKind::Stabilizer) {
        return Err(Failure::Usage(
            "only stabilizer takes positional generators".into(),
        ));
    }
    let artifact = match args.kind {
        BuildKind::Twirl => Artifact::Channel(match args.group {
            Group::Werner => werner_twirl(),
            Group::Bell => bell_twirl(),
        }),
        BuildKind::Stabilizer => stabilizer(&args)?,
        BuildKind::TwistedBasis => {
            let u = named_qubit_unitary(&args.u).ok_or_else(|| {
                Failure::Usage(format!("unknown unitary {:?}; use i, h, x, z or t", args.u))
            })?;
            Artifact::Basis(twisted_partition_basis(&u)?)
        }
        BuildKind::Mismatch => Artifact::Basis(mismatch_basis()),
        BuildKind::Andbox => Artifact::Channel(and_box_channel()),
    };
    let text = artifact.to_json();
    match &args.out {
        Some(path) => {
            std::fs::write(path, text + "\n")
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}
