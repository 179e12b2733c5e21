//! Command-line surface over the library: JSON in, JSON out, reproducible
//! seeds. Exit codes: 0 success, 1 I/O or parse problem, 2 domain error
//! reported by the underlying operation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use resolvent_core::error::Error as CoreError;
use resolvent_core::forms::{
    build_phi, parameter_lower_bound, phi_vanishes_on, ChainConstraint, PhiRoots,
    DEFAULT_EXPAND_LIMIT,
};
use resolvent_core::json::{
    complex_poly_json, parse_complex, FamilyJson, GroupJson, LoopJson, PolyData, PolyJson,
};
use resolvent_core::monodromy::{
    inertia_group, monodromy_group_with_lines, track_loop_traced, TraceRow, TrackOptions,
};
use resolvent_core::perm::{
    chebotarev_bound, closure, is_transitive, max_chain, PermGroup, SetPartition,
};
use resolvent_core::poly::discriminant;
use resolvent_core::roots::find_roots;
use resolvent_core::scalar::rat_to_string;
use resolvent_core::transform::{
    bring_jerrard, klein_family, one_param_normalize, tschirnhaus, TschirnhausMap,
};

#[derive(Parser)]
#[command(
    name = "resolvent",
    version,
    about = "Polynomial transformations, monodromy groups, and resolvent parameter bounds"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discriminant of a polynomial (exact for rational input)
    Disc {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Complex roots with multiplicities
    Roots {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Transform a polynomial through a root map y = phi(x)
    Tschirnhaus {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Reduce a monic quintic to y^5 + p y + q
    BringJerrard {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Normalize y^5 + p y + q to the one-parameter form z^5 + c z + 1
    Normalize {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// The one-parameter quintic y^5 + 15y^4 - 10g y^2 + 3g^2
    Klein {
        #[arg(long)]
        gamma: String,
    },
    /// Maximum coincidence-chain length with witness
    ChainBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        even_only: bool,
    },
    /// Monodromy group of a parameterized family by petal tracking
    Monodromy {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_order: usize,
        #[arg(long, default_value_t = 1)]
        lines: usize,
    },
    /// Inertia group of small loops around a critical point
    Inertia {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the invariant form and optionally test coincidence vanishing
    Phi {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        check_vanish: bool,
        #[arg(long, default_value_t = DEFAULT_EXPAND_LIMIT)]
        expand_limit: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_order: usize,
    },
    /// Realizable-chain lower bound on resolvent parameters for a family
    Bound {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        even_only: bool,
    },
    /// Chain-bound values for degrees 5..9 next to the cited reference data
    Table,
    /// Track one loop and report the root permutation
    Track {
        #[arg(long)]
        family: PathBuf,
        #[arg(long = "loop")]
        loop_path: PathBuf,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
}

enum CliError {
    /// I/O or parse problem: exit 1
    Input(String),
    /// domain error from an operation: exit 2
    Domain(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Result<PolyData, CliError> {
    let j: PolyJson = read_json(path)?;
    PolyData::from_json(&j).map_err(CliError::from)
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let s = serde_json::to_string(value).map_err(|e| CliError::Input(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn pair(c: Complex64) -> (f64, f64) {
    (c.re, c.im)
}

#[derive(Serialize)]
#[serde(untagged)]
enum ScalarOut {
    Exact(String),
    Complex((f64, f64)),
}

/// CSV of (step, parameter point, root positions) for plotting root braids.
fn plot_data_csv(trace: &[TraceRow], m: usize, n: usize) -> String {
    let mut out = String::from("step");
    for k in 0..m {
        out.push_str(&format!(",param{k}_re,param{k}_im"));
    }
    for i in 0..n {
        out.push_str(&format!(",root{i}_re,root{i}_im"));
    }
    out.push('\n');
    for row in trace {
        out.push_str(&row.step.to_string());
        for p in &row.point {
            out.push_str(&format!(",{},{}", p.re, p.im));
        }
        for r in &row.roots {
            out.push_str(&format!(",{},{}", r.re, r.im));
        }
        out.push('\n');
    }
    out
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Disc { input } => {
            let poly = read_poly(&input)?;
            let out = match &poly {
                PolyData::Rational(p) => ScalarOut::Exact(rat_to_string(&discriminant(p)?)),
                PolyData::Complex(p) => ScalarOut::Complex(pair(discriminant(p)?)),
            };
            #[derive(Serialize)]
            struct Out {
                discriminant: ScalarOut,
            }
            emit(&Out { discriminant: out })
        }
        Cmd::Roots { input, tol } => {
            let poly = read_poly(&input)?.to_complex();
            let rs = find_roots(&poly, tol)?;
            #[derive(Serialize)]
            struct Out {
                roots: Vec<(f64, f64)>,
                multiplicities: Vec<usize>,
                residual: f64,
            }
            emit(&Out {
                roots: rs.roots.iter().map(|&c| pair(c)).collect(),
                multiplicities: rs.multiplicities.clone(),
                residual: rs.residual,
            })
        }
        Cmd::Tschirnhaus { input, phi } => {
            let f = read_poly(&input)?;
            let phi = read_poly(&phi)?;
            let out: PolyJson = match (&f, &phi) {
                (PolyData::Rational(f), PolyData::Rational(phi)) => {
                    let map = TschirnhausMap::new(phi.clone())?;
                    let map = if phi.degree() >= f.degree() {
                        map.reduced_mod(f)?
                    } else {
                        map
                    };
                    PolyData::Rational(tschirnhaus(f, &map)?).to_json()
                }
                _ => {
                    let fc = f.to_complex();
                    let pc = phi.to_complex();
                    let map = TschirnhausMap::new(pc.clone())?;
                    let map = if pc.degree() >= fc.degree() {
                        map.reduced_mod(&fc)?
                    } else {
                        map
                    };
                    complex_poly_json(&tschirnhaus(&fc, &map)?)
                }
            };
            emit(&out)
        }
        Cmd::BringJerrard { input, tol } => {
            let f = read_poly(&input)?.to_complex();
            let r = bring_jerrard(&f, tol)?;
            #[derive(Serialize)]
            struct Out {
                p: (f64, f64),
                q: (f64, f64),
                phi: PolyJson,
                residuals: f64,
            }
            emit(&Out {
                p: pair(r.p),
                q: pair(r.q),
                phi: complex_poly_json(r.map.phi()),
                residuals: r.residuals,
            })
        }
        Cmd::Normalize { p, q } => {
            let p = parse_complex(&p).map_err(|e| CliError::Input(e.to_string()))?;
            let q = parse_complex(&q).map_err(|e| CliError::Input(e.to_string()))?;
            let f = one_param_normalize(p, q)?;
            #[derive(Serialize)]
            struct Out {
                c: (f64, f64),
                scale: (f64, f64),
            }
            emit(&Out {
                c: pair(f.c),
                scale: pair(f.scale),
            })
        }
        Cmd::Klein { gamma } => {
            let g = parse_complex(&gamma).map_err(|e| CliError::Input(e.to_string()))?;
            emit(&complex_poly_json(&klein_family(g)))
        }
        Cmd::ChainBound { n, even_only } => {
            let (bound, witness) = max_chain(n, even_only)?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                bound: usize,
                witness: Vec<String>,
                even_only: bool,
            }
            emit(&Out {
                n,
                bound,
                witness: witness.iter().map(|p| p.to_string()).collect(),
                even_only,
            })
        }
        Cmd::Monodromy {
            family,
            seed,
            max_order,
            lines,
        } => {
            let fam = read_json::<FamilyJson>(&family)?.to_family()?;
            let g = monodromy_group_with_lines(
                &fam,
                &TrackOptions::default(),
                seed,
                max_order,
                lines,
            )?;
            emit(&group_out(&g, seed))
        }
        Cmd::Inertia {
            family,
            point,
            radius,
            seed,
        } => {
            let fam = read_json::<FamilyJson>(&family)?.to_family()?;
            let pt: Vec<(f64, f64)> = read_json(&point)?;
            let pt: Vec<Complex64> = pt.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let g = inertia_group(&fam, &pt, radius, &TrackOptions::default(), seed)?;
            emit(&group_out(&g, seed))
        }
        Cmd::Phi {
            group,
            roots,
            partition,
            check_vanish,
            expand_limit,
            samples,
            tol,
            max_order,
        } => {
            let gj: GroupJson = read_json(&group)?;
            let gens = gj.to_generators()?;
            let g = if gens.is_empty() {
                PermGroup::trivial(gj.n)
            } else {
                closure(&gens, max_order)?
            };
            let rj: Vec<(f64, f64)> = read_json(&roots)?;
            let xs: Vec<Complex64> = rj.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let phi = build_phi(&g, PhiRoots::Numeric(xs), expand_limit)?;
            let partition = partition
                .map(|s| SetPartition::parse(&s, gj.n))
                .transpose()?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                group_order: usize,
                expanded_terms: Option<usize>,
                partition: Option<String>,
                vanishes: Option<bool>,
                degenerate_subspace: Option<bool>,
            }
            let mut out = Out {
                n: gj.n,
                group_order: g.order(),
                expanded_terms: phi.expanded().map(|e| e.num_terms()),
                partition: partition.as_ref().map(|p| p.to_string()),
                vanishes: None,
                degenerate_subspace: None,
            };
            if check_vanish {
                let p = partition.as_ref().ok_or_else(|| {
                    CliError::Input("--check-vanish needs --partition".to_string())
                })?;
                let v = phi_vanishes_on(&phi, p, samples, tol)?;
                out.vanishes = Some(v.vanishes);
                out.degenerate_subspace = Some(v.degenerate_subspace);
            }
            emit(&out)
        }
        Cmd::Bound { family, even_only } => {
            let fam = read_json::<FamilyJson>(&family)?.to_family()?;
            let constraint = if even_only {
                ChainConstraint::EvenOnly
            } else {
                ChainConstraint::Any
            };
            let (q1, chain) = parameter_lower_bound(&fam, constraint)?;
            let unconstrained = if fam.n() >= 3 {
                max_chain(fam.n(), even_only)?.0
            } else {
                0
            };
            #[derive(Serialize)]
            struct StratumOut {
                partition: String,
                codim: usize,
                point: Vec<(f64, f64)>,
            }
            #[derive(Serialize)]
            struct Out {
                q1: usize,
                chain: Vec<StratumOut>,
                chain_length_unconstrained: usize,
                even_only: bool,
            }
            emit(&Out {
                q1,
                chain: chain
                    .iter()
                    .map(|s| StratumOut {
                        partition: s.partition.to_string(),
                        codim: s.complex_codim,
                        point: s.sample_point.iter().map(|&c| pair(c)).collect(),
                    })
                    .collect(),
                chain_length_unconstrained: unconstrained,
                even_only,
            })
        }
        Cmd::Table => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                chain_bound: usize,
                hilbert: usize,
            }
            #[derive(Serialize)]
            struct Out {
                rows: Vec<Row>,
                hilbert_source: &'static str,
            }
            let hilbert = [1usize, 2, 3, 4, 4];
            let mut rows = Vec::new();
            for (i, n) in (5..=9).enumerate() {
                let (bound, _) = max_chain(n, true)?;
                debug_assert_eq!(bound, chebotarev_bound(n)?);
                rows.push(Row {
                    n,
                    chain_bound: bound,
                    hilbert: hilbert[i],
                });
            }
            emit(&Out {
                rows,
                hilbert_source: "Hilbert (cited data)",
            })
        }
        Cmd::Track {
            family,
            loop_path,
            trace_out,
        } => {
            let fam = read_json::<FamilyJson>(&family)?.to_family()?;
            let lp = read_json::<LoopJson>(&loop_path)?.to_loop()?;
            let (perm, trace) = track_loop_traced(&fam, &lp, &TrackOptions::default())?;
            if let Some(path) = trace_out {
                let csv = plot_data_csv(&trace, fam.m(), fam.n());
                std::fs::write(&path, csv)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            #[derive(Serialize)]
            struct Out {
                n: usize,
                permutation: String,
                steps: usize,
            }
            emit(&Out {
                n: fam.n(),
                permutation: perm.to_string(),
                steps: trace.len() - 1,
            })
        }
    }
}

#[derive(Serialize)]
struct GroupOut {
    n: usize,
    order: usize,
    transitive: bool,
    generators: Vec<String>,
    seed: u64,
}

fn group_out(g: &PermGroup, seed: u64) -> GroupOut {
    GroupOut {
        n: g.n(),
        order: g.order(),
        transitive: is_transitive(g),
        generators: g.generators().iter().map(|p| p.to_string()).collect(),
        seed,
    }
}


fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // parse problems (including unknown subcommands) exit 1 with usage;
            // --help and --version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
