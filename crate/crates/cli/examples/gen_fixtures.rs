//! Regenerates the bundled fixtures: `cargo run -p sicprob-cli --example gen_fixtures`.

use std::fs;
use std::path::{Path, PathBuf};

use sicprob::dualtrack::{Circuit, CircuitStep, FinalMeasurement, InitialState};
use sicprob::io::{
    circuit_doc, density_doc, fiducial_doc, povm_doc, probs_doc, sic_doc, to_json_pretty, Document,
    MatrixDoc,
};
use sicprob::linalg::C64;
use sicprob::quantum::{
    random_density, random_povm, random_pure_state, random_unitary, DensityMatrix, HilbertDim,
    Povm, VALIDITY_TOL,
};
use sicprob::search::{search_with_jobs, SearchConfig, SearchStatus};
use sicprob::sic::{builtin_fiducial, orbit, Fiducial, SicStructure};
use sicprob::urgleichung::ProbVector;

fn write(dir: &Path, name: &str, doc: &Document) {
    let mut text = to_json_pretty(doc);
    text.push('\n');
    fs::write(dir.join(name), text).expect("write fixture");
}

fn dim(d: usize) -> HilbertDim {
    HilbertDim::new(d).unwrap()
}

fn sic_povm(sic: &SicStructure) -> Povm {
    Povm::new(sic.effects().to_vec(), VALIDITY_TOL).unwrap()
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let born_dir = root.join("born");
    fs::create_dir_all(&born_dir).unwrap();

    let mut sics = Vec::new();
    for d in [2, 3] {
        let fiducial = builtin_fiducial(dim(d)).unwrap();
        write(
            &root,
            &format!("fiducial_d{d}.json"),
            &fiducial_doc(&fiducial),
        );
        let sic = orbit(&fiducial);
        write(&root, &format!("sic_d{d}.json"), &sic_doc(&sic));
        sics.push(sic);
    }

    let found = search_with_jobs(&SearchConfig::new(dim(4), 0), 1).unwrap();
    assert_eq!(found.status, SearchStatus::Found);
    let sic4 = orbit(found.fiducial.as_ref().unwrap());
    assert!(sic4.is_certified());
    write(&root, "sic_d4.json", &sic_doc(&sic4));
    sics.push(sic4);

    let basis = Fiducial::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    write(&root, "fiducial_basis_d2.json", &fiducial_doc(&basis));

    let sic2 = &sics[0];
    let projector_state =
        DensityMatrix::validate(sic2.projectors()[0].clone(), VALIDITY_TOL).unwrap();
    write(
        &root,
        "pure_sic_projector_d2.json",
        &density_doc(&projector_state),
    );
    write(&root, "sic_self_povm_d2.json", &povm_doc(&sic_povm(sic2)));
    write(
        &root,
        "mixed_d3.json",
        &density_doc(&DensityMatrix::maximally_mixed(dim(3))),
    );
    let mut vertex = vec![0.0; 4];
    vertex[0] = 1.0;
    write(
        &root,
        "probs_vertex_d2.json",
        &probs_doc(&ProbVector::new(dim(2), vertex).unwrap()),
    );

    for case in 0..20usize {
        let sic = &sics[case % 3];
        let d = sic.dim();
        let seed = 100 + case as u64;
        let state = if case % 2 == 0 {
            random_density(d, seed)
        } else {
            random_pure_state(d, seed)
        };
        let povm = match case % 4 {
            0 => Povm::projective(&random_unitary(d, seed)),
            1 => sic_povm(sic),
            _ => random_povm(d, 2 + case % 7, seed),
        };
        let stem = format!("case_{:02}_d{}", case + 1, d.get());
        write(
            &born_dir,
            &format!("{stem}_state.json"),
            &density_doc(&state),
        );
        write(&born_dir, &format!("{stem}_povm.json"), &povm_doc(&povm));
    }

    let d4 = dim(4);
    let steps = (0..3)
        .map(|k| CircuitStep {
            unitary: random_unitary(d4, 5 + k),
            label: Some(format!("t{}", k + 1)),
        })
        .collect();
    let circuit = Circuit::new(
        InitialState::Density(random_density(d4, 5)),
        steps,
        FinalMeasurement::Povm(random_povm(d4, 6, 5)),
    )
    .unwrap();
    let doc = circuit_doc(&circuit);
    write(&root, "circuit_d4.json", &doc);

    let mut corrupt = doc;
    if let Document::Circuit { steps, .. } = &mut corrupt {
        let MatrixDoc { entries, .. } = &mut steps[1].unitary;
        entries[0] = [entries[0][0] * 1.5, entries[0][1]];
    }
    write(&root, "circuit_d4_corrupt.json", &corrupt);
}
