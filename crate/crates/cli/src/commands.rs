//! Subcommand implementations. Each returns `Ok(true)` on success and
//! `Ok(false)` when a checked criterion fails.

use crate::args::{point, region, test_function};
use crate::{
    AxisArg, BootstrapArgs, CheckArgs, ConfigFlags, FieldFormat, FieldKind, FitArgs, GenArgs, MinimizeArgs,
    PairArgs, ProduceArgs, ResidualArgs, RunArgs,
};
use eklab_core::agflow::{continuation_csv, continuation_run, Domain, DomainKind};
use eklab_core::besov::{structure_report, HLadder};
use eklab_core::compensation::{besov_bootstrap, comp_identity_residual, TestKernel};
use eklab_core::entropy::{
    ent_tangency_defect, entropy_production, jin_kohn_pair, psi_table_from_phi, Entropy, JinKohnConvention,
    DEFAULT_KAPPA,
};
use eklab_core::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use eklab_core::io::{load_field, save_field, FieldData};
use eklab_core::kinetic::{
    builtin_abc, chi_field, read_kinetic, synthetic_kinetic_pair, write_kinetic, KineticDensity, KineticField,
    KineticStack,
};
use eklab_core::*;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

fn load_angle(path: &Path) -> Result<AngleField> {
    match load_field(path)? {
        FieldData::Angle(a) => Ok(a),
        FieldData::Vector(v) => AngleField::from_vector(&v),
        FieldData::Scalar(_) => Err(Error::Format(format!("{}: expected an angle or vector2 field", path.display()))),
    }
}

fn load_stack(path: &Path) -> Result<KineticStack> {
    read_kinetic(BufReader::new(File::open(path)?))
}

fn save_stack(path: &Path, stack: &KineticStack) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_kinetic(&mut w, stack)?;
    w.flush()?;
    Ok(())
}

pub fn fields_gen(a: &GenArgs) -> Result<bool> {
    let g = Grid2::square(a.grid.lo, a.grid.hi, a.grid.n)?;
    let mask = region(&a.region, &g)?;
    let axis = match a.axis {
        AxisArg::Vertical => Axis::Vertical,
        AxisArg::Horizontal => Axis::Horizontal,
    };
    let kind = match a.kind {
        FieldKind::Constant => CanonicalKind::Constant { theta0: a.theta0 },
        FieldKind::Vortex => CanonicalKind::Vortex { center: point(&a.center)? },
        FieldKind::Wall => CanonicalKind::Wall { alpha: a.alpha, axis, offset: a.offset },
        FieldKind::MollifiedWall => {
            CanonicalKind::MollifiedWall { alpha: a.alpha, axis, offset: a.offset, width: a.width }
        }
        FieldKind::Smooth => CanonicalKind::SyntheticSmooth,
    };
    let m = make_canonical_field(kind, &g, &mask)?;
    let data = match a.format {
        FieldFormat::Angle => FieldData::Angle(m),
        FieldFormat::Vector => FieldData::Vector(m.to_vector()),
    };
    save_field(&a.out, &data)?;
    println!("wrote {} ({}x{}, {} cells in support)", a.out.display(), g.nx, g.ny, mask.count());
    Ok(true)
}

pub fn entropy_produce(a: &ProduceArgs) -> Result<bool> {
    let m = load_angle(&a.field)?;
    let phi = Entropy::from_name(&a.entropy, a.kappa)?;
    let reg = match &a.region {
        Some(spec) => region(spec, &m.grid)?,
        None => m.mask.erode(1),
    };
    let d = entropy_production(&m, &phi, &reg)?;
    let inner = reg.erode(1);
    println!("entropy,integral,total_variation");
    println!("{},{:e},{:e}", phi.name, integrate(&d, &inner), lp_norm(&d, 1.0, &inner)?);
    if let Some(out) = &a.out {
        save_field(out, &FieldData::Scalar(d))?;
    }
    Ok(true)
}

pub fn entropy_check(a: &CheckArgs) -> Result<bool> {
    let mut ok = true;
    println!("entropy,round_trip_error,tangency_defect");
    for name in &a.entropies {
        let phi = Entropy::from_name(name, 1.0)?;
        let back = Entropy::from_generator("round-trip", psi_table_from_phi(&phi, a.samples)?, 1.0)?;
        let err = (0..500)
            .map(|k| 2.0 * PI * k as f64 / 500.0 + 0.003)
            .map(|th| {
                let (x, y) = (phi.value_at(th), back.value_at(th));
                (x[0] - y[0]).abs().max((x[1] - y[1]).abs())
            })
            .fold(0.0, f64::max);
        let defect = ent_tangency_defect(&phi, 2048)?.defect;
        println!("{name},{err:e},{defect:e}");
        if a.tol.is_some_and(|t| err.is_nan() || err > t) {
            ok = false;
        }
    }
    Ok(ok)
}

pub fn kinetic_pair(a: &PairArgs) -> Result<bool> {
    match &a.field {
        Some(path) => {
            if a.sigma_out.is_some() {
                return Err(Error::Config("--sigma-out applies to the synthetic pair only".into()));
            }
            let chi = chi_field(&load_angle(path)?, a.ns)?;
            save_stack(&a.out, &KineticStack::Field(chi))?;
        }
        None => {
            let g = Grid2::square(0.0, 2.0 * PI, a.n)?;
            let (fa, fb, fc) = builtin_abc();
            let (chi, sigma) = synthetic_kinetic_pair(&g, &Mask::full(&g), a.ns, &fa, &fb, &fc)?;
            save_stack(&a.out, &KineticStack::Field(chi))?;
            if let Some(p) = &a.sigma_out {
                save_stack(p, &KineticStack::Density(sigma))?;
            }
        }
    }
    println!("wrote {}", a.out.display());
    Ok(true)
}

pub fn comp_residual(a: &ResidualArgs) -> Result<bool> {
    let (chi, sigma): (KineticField, Option<KineticDensity>) = match (&a.field, &a.kinetic) {
        (Some(f), _) => (chi_field(&load_angle(f)?, a.ns)?, None),
        (None, Some(k)) => {
            let KineticStack::Field(chi) = load_stack(k)? else {
                return Err(Error::Format(format!("{}: expected a kinetic field stack", k.display())));
            };
            let sigma = match &a.sigma {
                Some(p) => match load_stack(p)? {
                    KineticStack::Density(d) => Some(d),
                    KineticStack::Field(_) => {
                        return Err(Error::Format(format!("{}: expected a kinetic density stack", p.display())))
                    }
                },
                None => None,
            };
            (chi, sigma)
        }
        (None, None) => return Err(Error::Config("give --field or --kinetic".into())),
    };
    let phi = TestKernel::from_name(&a.kernel)?;
    let eta = test_function(&a.eta)?;
    let rho = TestFunction::SinePower1D { a: 0.0, b: a.tau_max, k: a.rho_power };
    let r = comp_identity_residual(&chi, sigma.as_ref(), &phi, &eta, &rho, a.tau_max)?;
    println!("lhs,rhs,residual,relative,tau_nodes");
    println!("{:e},{:e},{:e},{:e},{}", r.lhs, r.rhs, r.residual, r.relative(), r.tau_nodes);
    Ok(true)
}

pub fn comp_bootstrap(a: &BootstrapArgs) -> Result<bool> {
    let m = load_angle(&a.field)?;
    let g = m.grid;
    let omega = match &a.omega {
        Some(s) => region(s, &g)?,
        None => m.mask.clone(),
    };
    let regions = RegionSpec::new(g, omega, region(&a.u, &g)?, region(&a.inner, &g)?)?;
    let eta = test_function(&a.eta)?;
    let taus = if a.taus.is_empty() {
        let r0 = besov_bootstrap(&m, None, a.p, &regions, &eta, &[])?.r0;
        (2..=6).map(|k| r0 / f64::from(1u32 << k)).collect()
    } else {
        a.taus.clone()
    };
    let table = besov_bootstrap(&m, None, a.p, &regions, &eta, &taus)?;
    let csv = table.to_csv();
    match &a.out {
        Some(p) => std::fs::write(p, &csv)?,
        None => print!("{csv}"),
    }
    println!("r0={:e} sup_C={:e}", table.r0, table.sup_c());
    Ok(true)
}

pub fn besov_fit(a: &FitArgs) -> Result<bool> {
    let m = load_angle(&a.field)?;
    let u = match &a.u {
        Some(s) => region(s, &m.grid)?,
        None => m.mask.clone(),
    };
    let ks = a
        .ladder
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .ok()
        .filter(|v| v.len() == 2)
        .ok_or_else(|| Error::Config(format!("--ladder `{}`: expected kmin,kmax", a.ladder)))?;
    // the default ladder starts at L/4
    let l = HLadder::default_for(&m.grid, &u)?.lengths[0] * 4.0;
    let ladder = HLadder::dyadic(l, ks[0], ks[1])?;
    let r = structure_report(&m, a.q, &u, &ladder)?;
    if let Some(p) = &a.out {
        std::fs::write(p, r.to_csv())?;
    }
    println!("q,slope,residual,seminorm");
    println!("{},{:.6},{:e},{:e}", r.q, r.slope, r.residual, r.seminorm);
    Ok(true)
}

fn apply_flags(cfg: &mut ExperimentConfig, flags: &ConfigFlags) -> Result<()> {
    for (k, v) in flags.pairs() {
        cfg.set(k, v)?;
    }
    Ok(())
}

pub fn ag_minimize(a: &MinimizeArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::new(ExperimentId::E9);
    apply_flags(&mut cfg, &a.keys)?;
    cfg.validate()?;
    let domain = Domain::new(DomainKind::from_name(&cfg.domain)?, cfg.grids[0], a.delta_cells)?;
    let (s1, s2) = jin_kohn_pair(DEFAULT_KAPPA, JinKohnConvention::EntFixed);
    let rungs = continuation_run(&domain, &cfg.minimize, (&s1, &s2))?;
    let csv = continuation_csv(&rungs);
    if let Some(dir) = &cfg.output {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trace.csv"), &csv)?;
        for (k, r) in rungs.iter().enumerate() {
            save_field(dir.join(format!("m_rung{k}.ekf")), &FieldData::Vector(r.stream.m()))?;
        }
    }
    print!("{csv}");
    Ok(true)
}

pub fn run(a: &RunArgs) -> Result<bool> {
    let id: ExperimentId = a.id.parse()?;
    let mut cfg = match &a.config {
        Some(p) => {
            let c = ExperimentConfig::load(p)?;
            if c.id != id {
                return Err(Error::Config(format!("config file is for {}, not {id}", c.id)));
            }
            c
        }
        None => ExperimentConfig::new(id),
    };
    apply_flags(&mut cfg, &a.keys)?;
    let report = run_experiment(&cfg)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.summary());
    }
    Ok(report.pass)
}
