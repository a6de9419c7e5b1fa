//! Shared proptest strategies for random Gaussian circuits.
#![allow(dead_code)]

use proptest::prelude::*;
use qdm::elements::{
    beam_splitter, loss_channel, phase_shifter, single_mode_squeezer, two_mode_squeezer,
};
use qdm::{GaussianMap, GaussianState, PaGain, SplitterSpec};

#[derive(Debug, Clone)]
pub enum Element {
    Splitter { t: f64, a: usize, b: usize },
    Phase { phi: f64, mode: usize },
    Loss { eta: f64, mode: usize },
    TwoMode { gain: f64, phase: f64, a: usize, b: usize },
    OneMode { gain: f64, phase: f64, mode: usize },
}

impl Element {
    pub fn map(&self) -> GaussianMap {
        match *self {
            Element::Splitter { t, .. } => beam_splitter(&SplitterSpec::new(t).unwrap()),
            Element::Phase { phi, .. } => phase_shifter(phi),
            Element::Loss { eta, .. } => loss_channel(eta).unwrap(),
            Element::TwoMode { gain, phase, .. } => two_mode_squeezer(&PaGain::new(gain, phase).unwrap()),
            Element::OneMode { gain, phase, .. } => single_mode_squeezer(&PaGain::new(gain, phase).unwrap()),
        }
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Element::Splitter { a, b, .. } | Element::TwoMode { a, b, .. } => vec![a, b],
            Element::Phase { mode, .. } | Element::Loss { mode, .. } | Element::OneMode { mode, .. } => {
                vec![mode]
            }
        }
    }

    pub fn is_lossless(&self) -> bool {
        !matches!(self, Element::Loss { .. })
    }
}

fn pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 1..n).prop_map(move |(a, k)| (a, (a + k) % n))
}

pub fn element(n: usize, lossy: bool) -> BoxedStrategy<Element> {
    let phase = -10.0..10.0f64;
    let mut options: Vec<BoxedStrategy<Element>> = vec![
        (phase.clone(), 0..n)
            .prop_map(|(phi, mode)| Element::Phase { phi, mode })
            .boxed(),
        (1.0..4.0f64, phase.clone(), 0..n)
            .prop_map(|(gain, phase, mode)| Element::OneMode { gain, phase, mode })
            .boxed(),
    ];
    if lossy {
        options.push(
            (0.01..=1.0f64, 0..n)
                .prop_map(|(eta, mode)| Element::Loss { eta, mode })
                .boxed(),
        );
    }
    if n >= 2 {
        options.push(
            (0.0..=1.0f64, pair(n))
                .prop_map(|(t, (a, b))| Element::Splitter { t, a, b })
                .boxed(),
        );
        options.push(
            (1.0..4.0f64, phase, pair(n))
                .prop_map(|(gain, phase, (a, b))| Element::TwoMode { gain, phase, a, b })
                .boxed(),
        );
    }
    proptest::strategy::Union::new(options).boxed()
}

/// Number of modes, a coherent input and up to 8 elements.
pub fn circuit(lossy: bool) -> impl Strategy<Value = (usize, Vec<(f64, f64)>, Vec<Element>)> {
    (1usize..=3).prop_flat_map(move |n| {
        (
            Just(n),
            proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n),
            proptest::collection::vec(element(n, lossy), 1..=8),
        )
    })
}

pub fn input_state(alphas: &[(f64, f64)]) -> GaussianState {
    let mut s = GaussianState::vacuum(alphas.len()).unwrap();
    for (m, &(re, im)) in alphas.iter().enumerate() {
        s = s.displace(m, re, im).unwrap();
    }
    s
}

pub fn run(state: &GaussianState, elements: &[Element]) -> qdm::Result<GaussianState> {
    elements
        .iter()
        .try_fold(state.clone(), |s, e| s.apply_map(&e.map(), &e.modes()))
}
