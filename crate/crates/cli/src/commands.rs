use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde_json::{json, Map, Value};

use avsym_core::acceptance;
use avsym_core::av::phi_from_polarization;
use avsym_core::engine::{
    default_m_max, kernel_square_test, random_pipeline_instance, equivalence_witness, InstanceSeed,
    PipelineInstance,
};
use avsym_core::groups::{
    heisenberg_pairing, pairing_is_nondegenerate, square_type_test, symplectic_basis,
    FiniteAbelianGroup, SquareDecomposition,
};
use avsym_core::lattice::{snf, Sublattice};
use avsym_core::symplectic::{
    build_k_alpha, embed_dual_lagrangian, find_transverse_multiplier, graph_basis,
    intersection_pairing, lagrangian_intersection, lagrangian_isogeny, lagrangian_pairing_matrix,
    quotient_by_isotropic, standard_symplectic, LagrangianSublattice, SymplecticAV, SymplecticError,
    SymplecticMorphism,
};

use crate::instance::{
    int_matrix_value, int_to_value, parse_int, parse_int_matrix, parse_rat_matrix, parse_usize,
    rat_matrix_value, rat_to_value,
};
use crate::{exit, goldens, CliError, Command, InstanceFile, MorphismBlock, Options, Report};

type Outcome = Result<(i32, Map<String, Value>), CliError>;

fn invalid(field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

fn group_value(g: &FiniteAbelianGroup) -> Value {
    Value::Array(g.factors().iter().map(int_to_value).collect())
}

fn ints_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_value).collect())
}

fn decomposition_fields(out: &mut Map<String, Value>, d: &SquareDecomposition) {
    out.insert("square_type".into(), json!(d.is_square_type));
    if d.is_square_type {
        out.insert("m_list".into(), ints_value(&d.m_list));
    }
}

fn verdict(ok: bool) -> i32 {
    if ok {
        exit::OK
    } else {
        exit::FALSE_VERDICT
    }
}

/// Runs a command. Every failure, including a missing instance, is folded
/// into the returned report.
pub fn run_command(command: Command, inst: Option<&InstanceFile>, opts: &Options) -> Report {
    let start = Instant::now();
    let outcome = match (command.needs_input(), inst) {
        (true, None) => Err(invalid("--input", format!("{command} needs an instance document"))),
        _ => {
            let empty = InstanceFile::default();
            let inst = inst.unwrap_or(&empty);
            match command {
                Command::Snf => snf_cmd(inst),
                Command::GroupShape => group_shape(inst),
                Command::Heisenberg => heisenberg(inst),
                Command::BuildA => build_a(inst),
                Command::LagrangianCheck => lagrangian_check(inst),
                Command::PairLagrangians => pair_lagrangians(inst),
                Command::FindM => find_m(inst, opts),
                Command::KernelTest => kernel_test(inst),
                Command::Pipeline => pipeline(inst, opts),
                Command::Random => random(inst, opts),
                Command::Selftest => selftest(opts),
            }
        }
    };
    let mut report = match outcome {
        Ok((code, mut body)) => {
            body.insert("command".into(), json!(command.name()));
            body.insert("seed".into(), json!(opts.seed));
            body.insert("exit_code".into(), json!(code));
            Report {
                command,
                exit_code: code,
                body: Value::Object(body),
            }
        }
        Err(e) => Report::error(command, opts, &e),
    };
    if opts.timing {
        report.body["elapsed_us"] = json!(start.elapsed().as_micros() as u64);
    }
    report
}

fn snf_cmd(inst: &InstanceFile) -> Outcome {
    let m = parse_int_matrix(inst.param("matrix")?, "params.matrix")?;
    let d = snf(&m);
    let torsion: Vec<BigInt> = d.invariant_factors.iter().filter(|f| !f.is_one()).cloned().collect();
    let mut out = Map::new();
    out.insert("invariant_factors".into(), ints_value(&d.invariant_factors));
    out.insert("rank".into(), json!(d.rank()));
    out.insert("U".into(), int_matrix_value(&d.u));
    out.insert("S".into(), int_matrix_value(&d.s));
    out.insert("V".into(), int_matrix_value(&d.v));
    out.insert(
        "cokernel".into(),
        json!({ "torsion": ints_value(&torsion), "free_rank": m.rows() - d.rank() }),
    );
    Ok((exit::OK, out))
}

fn parse_group(inst: &InstanceFile) -> Result<FiniteAbelianGroup, CliError> {
    let v = inst.param("factors")?;
    let items = v
        .as_array()
        .ok_or_else(|| invalid("params.factors", "expected a list of cyclic orders"))?;
    let orders = items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = format!("params.factors[{i}]");
            let c = parse_int(x, &f)?;
            if c.is_positive() {
                Ok(c)
            } else {
                Err(invalid(f, "cyclic orders must be positive"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiniteAbelianGroup::from_cyclic_orders(&orders))
}

fn group_shape(inst: &InstanceFile) -> Outcome {
    let g = parse_group(inst)?;
    let d = square_type_test(&g);
    let mut out = Map::new();
    out.insert("invariant_factors".into(), group_value(&g));
    out.insert("order".into(), int_to_value(&g.order()));
    decomposition_fields(&mut out, &d);
    Ok((verdict(d.is_square_type), out))
}

fn heisenberg(inst: &InstanceFile) -> Outcome {
    let k = parse_group(inst)?;
    let e = heisenberg_pairing(&k);
    let nondegenerate = pairing_is_nondegenerate(&e);
    let b = symplectic_basis(&e).map_err(|e| CliError::TheoremViolation(e.to_string()))?;
    let mut out = Map::new();
    out.insert("K".into(), group_value(&k));
    out.insert("group".into(), group_value(e.group()));
    out.insert("pairing".into(), rat_matrix_value(e.matrix()));
    out.insert("nondegenerate".into(), json!(nondegenerate));
    out.insert("m_list".into(), ints_value(&b.decomposition.m_list));
    out.insert("symplectic_basis".into(), int_matrix_value(&b.generators));
    Ok((verdict(nondegenerate), out))
}

fn build_a(inst: &InstanceFile) -> Outcome {
    let (name, (_, alpha)) = inst.pick(&inst.brauer, "brauer", "brauer")?;
    let field = format!("brauer.{name}");
    let m = quotient_by_isotropic(alpha.variety(), alpha)
        .map_err(|e| CliError::from_symplectic(e, &field))?;
    let dual = embed_dual_lagrangian(&m).map_err(|e| CliError::from_symplectic(e, &field))?;
    let k_alpha: Vec<Value> = build_k_alpha(alpha)
        .iter()
        .map(|p| Value::Array(p.coords().iter().map(rat_to_value).collect()))
        .collect();
    let mut out = Map::new();
    out.insert("brauer".into(), json!(name));
    out.insert("n".into(), int_to_value(m.n()));
    out.insert("K_alpha".into(), Value::Array(k_alpha));
    out.insert("J".into(), rat_matrix_value(m.symplectic().j()));
    out.insert("psi".into(), int_matrix_value(m.symplectic().psi()));
    out.insert("basis".into(), rat_matrix_value(m.basis_change()));
    out.insert(
        "pi".into(),
        json!({ "matrix": int_matrix_value(m.pi().matrix()), "multiplier": int_to_value(m.pi().multiplier()) }),
    );
    out.insert("dual_lagrangian".into(), int_matrix_value(dual.basis()));
    Ok((exit::OK, out))
}

fn ambient(inst: &InstanceFile) -> Result<SymplecticAV, CliError> {
    let field = "params.ambient";
    let v = inst.param("ambient")?;
    let m = v.as_object().ok_or_else(|| invalid(field, "expected an object"))?;
    if let Some(n) = m.get("standard") {
        let n = n.as_str().ok_or_else(|| invalid(format!("{field}.standard"), "expected a name"))?;
        let x = inst
            .varieties
            .get(n)
            .ok_or_else(|| invalid(format!("{field}.standard"), format!("unknown variety {n:?}")))?;
        return Ok(standard_symplectic(x));
    }
    if let Some(n) = m.get("twisted") {
        let n = n.as_str().ok_or_else(|| invalid(format!("{field}.twisted"), "expected a name"))?;
        let (_, alpha) = inst
            .brauer
            .get(n)
            .ok_or_else(|| invalid(format!("{field}.twisted"), format!("unknown Brauer entry {n:?}")))?;
        let model = quotient_by_isotropic(alpha.variety(), alpha)
            .map_err(|e| CliError::from_symplectic(e, &format!("brauer.{n}")))?;
        return Ok(model.symplectic().clone());
    }
    let j = parse_rat_matrix(m.get("J").unwrap_or(&Value::Null), &format!("{field}.J"))?;
    let psi = parse_int_matrix(m.get("psi").unwrap_or(&Value::Null), &format!("{field}.psi"))?;
    SymplecticAV::new(j, psi).map_err(|e| invalid(field, e))
}

fn sublattice_param(inst: &InstanceFile, key: &str, a: &SymplecticAV) -> Result<Sublattice, CliError> {
    let field = format!("params.{key}");
    let b = parse_int_matrix(inst.param(key)?, &field)?;
    if b.rows() != a.rank() {
        return Err(invalid(
            field,
            format!("basis has {} rows, the ambient lattice has rank {}", b.rows(), a.rank()),
        ));
    }
    Ok(Sublattice::span(&b))
}

fn lagrangian_param(inst: &InstanceFile, key: &str, a: &SymplecticAV) -> Result<LagrangianSublattice, CliError> {
    let s = sublattice_param(inst, key, a)?;
    LagrangianSublattice::new(a.clone(), s).map_err(|e| invalid(format!("params.{key}"), e))
}

fn lagrangian_check(inst: &InstanceFile) -> Outcome {
    let a = ambient(inst)?;
    let s = sublattice_param(inst, "basis", &a)?;
    let mut out = Map::new();
    out.insert("rank".into(), json!(s.rank()));
    out.insert("saturated".into(), json!(s.is_saturated()));
    let gram = &(&s.basis().transpose() * a.psi()) * s.basis();
    out.insert("isotropic".into(), json!(gram.is_zero()));
    match LagrangianSublattice::new(a, s) {
        Ok(l) => {
            out.insert("lagrangian".into(), json!(true));
            out.insert("basis".into(), int_matrix_value(l.basis()));
            match l.variety() {
                Ok(x) => {
                    out.insert("j_stable".into(), json!(true));
                    out.insert("variety_J".into(), rat_matrix_value(x.j()));
                }
                Err(_) => {
                    out.insert("j_stable".into(), json!(false));
                }
            }
            Ok((exit::OK, out))
        }
        Err(e) => {
            out.insert("lagrangian".into(), json!(false));
            out.insert("reason".into(), json!(e.to_string()));
            Ok((exit::FALSE_VERDICT, out))
        }
    }
}

fn pair_lagrangians(inst: &InstanceFile) -> Outcome {
    let a = ambient(inst)?;
    let z = lagrangian_param(inst, "z", &a)?;
    let w = lagrangian_param(inst, "w", &a)?;
    let mut out = Map::new();
    out.insert("pairing_matrix".into(), int_matrix_value(&lagrangian_pairing_matrix(&z, &w)));
    let meet = match lagrangian_intersection(&z, &w) {
        Ok(g) => g,
        Err(SymplecticError::InfiniteIntersection(r)) => {
            out.insert("transverse".into(), json!(false));
            out.insert("intersection_rank".into(), json!(r));
            return Ok((exit::FALSE_VERDICT, out));
        }
        Err(e) => return Err(CliError::from_symplectic(e, "params")),
    };
    out.insert("transverse".into(), json!(true));
    out.insert("intersection".into(), group_value(&meet));
    let p = intersection_pairing(&z, &w).map_err(|e| CliError::from_symplectic(e, "params"))?;
    out.insert("intersection_pairing".into(), rat_matrix_value(p.pairing.matrix()));
    out.insert("intersection_generators".into(), Value::Array(p.generators.iter().map(|g| ints_value(g)).collect()));
    let sb = symplectic_basis(&p.pairing).map_err(|e| CliError::TheoremViolation(e.to_string()))?;
    decomposition_fields(&mut out, &sb.decomposition);
    let j_stable = z.variety().is_ok() && w.variety().is_ok();
    out.insert("j_stable".into(), json!(j_stable));
    if j_stable {
        let iso = lagrangian_isogeny(&z, &w).map_err(|e| CliError::from_symplectic(e, "params"))?;
        if iso.decomposition != sb.decomposition {
            return Err(CliError::TheoremViolation(
                "isogeny kernel and intersection pairing disagree".into(),
            ));
        }
        out.insert("isogeny".into(), int_matrix_value(iso.homomorphism.matrix()));
    }
    Ok((verdict(sb.decomposition.is_square_type), out))
}

fn m_max(opts: &Options, inst: &InstanceFile, n: &BigInt) -> Result<BigInt, CliError> {
    if let Some(m) = &opts.m_max {
        return Ok(m.clone());
    }
    match inst.param_opt("m_max") {
        Some(v) => parse_int(v, "params.m_max"),
        None => Ok(default_m_max(n)),
    }
}

fn find_m(inst: &InstanceFile, opts: &Options) -> Outcome {
    let (_, (_, l)) = inst.pick(&inst.polarizations, "polarization", "polarizations")?;
    let phi = phi_from_polarization(l);
    let a = standard_symplectic(phi.target());
    let z = lagrangian_param(inst, "z", &a)?;
    let n = match inst.param_opt("n") {
        Some(v) => parse_int(v, "params.n")?,
        None => BigInt::one(),
    };
    if !n.is_positive() {
        return Err(invalid("params.n", "n must be positive"));
    }
    let bound = m_max(opts, inst, &n)?;
    let m = find_transverse_multiplier(&z, l, &n, &bound)
        .map_err(|e| CliError::from_symplectic(e, "params"))?;
    let mut out = Map::new();
    out.insert("n".into(), int_to_value(&n));
    out.insert("m_max".into(), int_to_value(&bound));
    out.insert("m".into(), int_to_value(&m));
    out.insert("graph".into(), int_matrix_value(&graph_basis(&phi, &m)));
    Ok((exit::OK, out))
}

fn kernel_test(inst: &InstanceFile) -> Outcome {
    let (name, block) = inst.pick(&inst.morphisms, "morphism", "morphisms")?;
    let MorphismBlock::Hom { hom, .. } = block else {
        return Err(invalid(format!("morphisms.{name}.kind"), "kernel-test needs a hom"));
    };
    let v = kernel_square_test(hom).map_err(|e| invalid(format!("morphisms.{name}"), e))?;
    let mut out = Map::new();
    out.insert("morphism".into(), json!(name));
    out.insert("kernel".into(), group_value(&v.kernel));
    out.insert("degree".into(), int_to_value(&v.kernel.order()));
    decomposition_fields(&mut out, &v.decomposition);
    Ok((verdict(v.is_square_type), out))
}

fn pipeline_input(inst: &InstanceFile) -> Result<PipelineInstance, CliError> {
    let (gname, block) = inst.pick(&inst.morphisms, "g_iso", "morphisms")?;
    let MorphismBlock::Symplectic { source, target, matrix } = block else {
        return Err(invalid(format!("morphisms.{gname}.kind"), "pipeline needs a symplectic morphism"));
    };
    let (_, alpha) = &inst.brauer[source];
    let (_, beta) = &inst.brauer[target];
    let field = format!("morphisms.{gname}");
    let mx = quotient_by_isotropic(alpha.variety(), alpha)
        .map_err(|e| CliError::from_symplectic(e, &format!("brauer.{source}")))?;
    let my = quotient_by_isotropic(beta.variety(), beta)
        .map_err(|e| CliError::from_symplectic(e, &format!("brauer.{target}")))?;
    let g_iso = SymplecticMorphism::new(
        mx.symplectic().clone(),
        my.symplectic().clone(),
        matrix.clone(),
        BigInt::one(),
    )
    .map_err(|e| CliError::from_symplectic(e, &field))?;
    let (lname, (_, l_hat)) = inst.pick(&inst.polarizations, "polarization", "polarizations")?;
    if l_hat.variety() != &beta.variety().dual() {
        return Err(invalid(
            format!("polarizations.{lname}"),
            format!("must live on the dual of the variety of brauer.{target}"),
        ));
    }
    Ok(PipelineInstance {
        x: alpha.variety().clone(),
        alpha: alpha.clone(),
        y: beta.variety().clone(),
        beta: beta.clone(),
        g_iso,
        l_hat: l_hat.clone(),
    })
}

fn pipeline_fields(p: &PipelineInstance, bound: &BigInt) -> Outcome {
    let w = equivalence_witness(&p.x, &p.alpha, &p.y, &p.beta, &p.g_iso, &p.l_hat, bound)
        .map_err(|e| CliError::from_symplectic(e, "params"))?;
    let mut out = Map::new();
    out.insert("m_max".into(), int_to_value(bound));
    out.insert("m".into(), int_to_value(&w.provenance.m));
    out.insert("witness".into(), int_matrix_value(w.isogeny.matrix()));
    out.insert("kernel".into(), group_value(&w.kernel));
    out.insert("degree".into(), int_to_value(&w.kernel.order()));
    decomposition_fields(&mut out, &w.decomposition);
    out.insert(
        "provenance".into(),
        json!({
            "z": int_matrix_value(&w.provenance.z),
            "z_prime": int_matrix_value(w.provenance.z_prime.basis()),
            "w": int_matrix_value(&w.provenance.w),
            "intersection": group_value(&w.provenance.intersection),
        }),
    );
    Ok((verdict(w.decomposition.is_square_type), out))
}

fn pipeline(inst: &InstanceFile, opts: &Options) -> Outcome {
    let p = pipeline_input(inst)?;
    let bound = m_max(opts, inst, p.beta.n())?;
    pipeline_fields(&p, &bound)
}

/// The instance document that replays a generated pipeline instance.
pub fn pipeline_document(p: &PipelineInstance) -> InstanceFile {
    let mut inst = InstanceFile::default();
    inst.varieties.insert("X".into(), p.x.clone());
    inst.varieties.insert("Y".into(), p.y.clone());
    inst.varieties.insert("Y_dual".into(), p.y.dual());
    inst.brauer.insert("alpha".into(), ("X".into(), p.alpha.clone()));
    inst.brauer.insert("beta".into(), ("Y".into(), p.beta.clone()));
    inst.polarizations.insert("L".into(), ("Y_dual".into(), p.l_hat.clone()));
    inst.morphisms.insert(
        "g".into(),
        MorphismBlock::Symplectic {
            source: "alpha".into(),
            target: "beta".into(),
            matrix: p.g_iso.matrix().clone(),
        },
    );
    inst
}

fn random(inst: &InstanceFile, opts: &Options) -> Outcome {
    let g = match inst.param_opt("g") {
        Some(v) => parse_usize(v, "params.g")?,
        None => 2,
    };
    let n = match inst.param_opt("n") {
        Some(v) => parse_usize(v, "params.n")? as u64,
        None => 2,
    };
    if !(1..=4).contains(&g) {
        return Err(invalid("params.g", "dimension must be between 1 and 4"));
    }
    if n == 0 {
        return Err(invalid("params.n", "n must be positive"));
    }
    let trials = opts.trials.unwrap_or(1).max(1);
    let mut runs = Vec::with_capacity(trials);
    let mut all_square = true;
    let mut first_doc = None;
    for t in 0..trials as u64 {
        let seed = opts.seed.wrapping_add(t);
        let p = random_pipeline_instance(&InstanceSeed::new(seed, g, n));
        let bound = match &opts.m_max {
            Some(m) => m.clone(),
            None => default_m_max(p.beta.n()),
        };
        let (code, mut fields) = pipeline_fields(&p, &bound)?;
        all_square &= code == exit::OK;
        fields.remove("provenance");
        fields.insert("seed".into(), json!(seed));
        runs.push(Value::Object(fields));
        if first_doc.is_none() {
            first_doc = Some(pipeline_document(&p).to_document());
        }
    }
    let mut out = Map::new();
    out.insert("g".into(), json!(g));
    out.insert("n".into(), json!(n));
    out.insert("trials".into(), json!(trials));
    out.insert("runs".into(), Value::Array(runs));
    if trials == 1 {
        out.insert("instance".into(), first_doc.expect("one trial ran"));
    }
    Ok((verdict(all_square), out))
}

fn selftest(opts: &Options) -> Outcome {
    let mut ok = true;
    let criteria: Vec<Value> = acceptance::run_all()
        .iter()
        .map(|c| {
            ok &= c.passed;
            let mut v = json!({ "id": c.id, "passed": c.passed, "detail": c.detail });
            if opts.timing {
                v["elapsed_us"] = json!(c.elapsed.as_micros() as u64);
            }
            v
        })
        .collect();
    let golden: Vec<Value> = goldens::check_all()
        .into_iter()
        .map(|(name, passed)| {
            ok &= passed;
            json!({ "name": name, "passed": passed })
        })
        .collect();
    let mut out = Map::new();
    out.insert("criteria".into(), Value::Array(criteria));
    out.insert("goldens".into(), Value::Array(golden));
    out.insert("passed".into(), json!(ok));
    Ok((if ok { exit::OK } else { exit::THEOREM_VIOLATION }, out))
}
