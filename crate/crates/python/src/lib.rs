//! Python bindings: instances, posets, realizations and the counting,
//! sampling and fairness routines.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotaposet::downset_dp::count_downsets;
use rotaposet::fair::{
    balanced_bruteforce, count_stable_matchings, median_report, sex_equal_bruteforce, FairnessScores, MedianChoice,
    StableMatchingSampler,
};
use rotaposet::instance::{compute_range, gale_shapley, is_stable, Matching, Orientation};
use rotaposet::pathwidth::{parse_decomposition, pathwidth_exact_tiny, to_nice};
use rotaposet::poset::{parse_dag, Dag};
use rotaposet::realize;
use rotaposet::rotation::{all_stable_matchings_bruteforce, rotation_digraph};

fn value_error(e: rotaposet::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Wives = Vec<Option<usize>>;
type Scores = (usize, usize, usize, usize);

fn scores_of(inst: &rotaposet::instance::Instance, mu: &Matching) -> Scores {
    let s = FairnessScores::of(inst, mu);
    (s.s_men, s.s_women, s.delta, s.beta)
}

/// A stable marriage instance with 0-based agents.
#[pyclass(frozen, module = "pyrotaposet")]
struct Instance {
    inner: rotaposet::instance::Instance,
}

#[pymethods]
impl Instance {
    #[new]
    fn new(men: Vec<Vec<usize>>, women: Vec<Vec<usize>>) -> PyResult<Self> {
        rotaposet::instance::Instance::new(men, women).map(|inner| Instance { inner }).map_err(value_error)
    }

    /// Reads the `SM <men> <women>` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        rotaposet::instance::Instance::parse(text).map(|inner| Instance { inner }).map_err(value_error)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n_men(&self) -> usize {
        self.inner.n_men()
    }

    #[getter]
    fn n_women(&self) -> usize {
        self.inner.n_women()
    }

    fn men_lists(&self) -> Vec<Vec<usize>> {
        self.inner.men_lists().to_vec()
    }

    fn women_lists(&self) -> Vec<Vec<usize>> {
        self.inner.women_lists().to_vec()
    }

    fn men_names(&self) -> Vec<String> {
        self.inner.men_names().to_vec()
    }

    fn women_names(&self) -> Vec<String> {
        self.inner.women_names().to_vec()
    }

    fn is_complete(&self) -> bool {
        self.inner.is_complete()
    }

    fn range(&self) -> PyResult<usize> {
        Ok(compute_range(&self.inner).map_err(value_error)?.k)
    }

    fn man_optimal(&self) -> Wives {
        gale_shapley(&self.inner, Orientation::ManOptimal).wives().to_vec()
    }

    fn woman_optimal(&self) -> Wives {
        gale_shapley(&self.inner, Orientation::WomanOptimal).wives().to_vec()
    }

    fn is_stable(&self, wives: Wives) -> PyResult<bool> {
        let mu = Matching::from_wives(&wives, self.inner.n_women()).map_err(value_error)?;
        is_stable(&self.inner, &mu).map_err(value_error)
    }

    /// Each rotation as its cycle of `(man, woman)` pairs.
    fn rotations(&self) -> Vec<Vec<(usize, usize)>> {
        rotation_digraph(&self.inner).rotations.into_iter().map(|r| r.pairs).collect()
    }

    fn rotation_edges(&self) -> Vec<(usize, usize)> {
        rotation_digraph(&self.inner).edges().map(|(a, b, _)| (a, b)).collect()
    }

    fn rotation_poset(&self) -> Poset {
        Poset { inner: rotation_digraph(&self.inner).dag() }
    }

    fn count_stable_matchings(&self) -> PyResult<BigUint> {
        count_stable_matchings(&self.inner).map_err(value_error)
    }

    fn stable_matchings(&self) -> PyResult<Vec<Wives>> {
        let all = all_stable_matchings_bruteforce(&self.inner).map_err(value_error)?;
        Ok(all.iter().map(|m| m.wives().to_vec()).collect())
    }

    /// Uniform draws from the stable matchings, reproducible for a seed.
    #[pyo3(signature = (seed, draws = 1))]
    fn sample(&self, seed: u64, draws: usize) -> PyResult<Vec<Wives>> {
        let sampler = StableMatchingSampler::new(&self.inner).map_err(value_error)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..draws).map(|_| Ok(sampler.sample(&mut rng).map_err(value_error)?.wives().to_vec())).collect()
    }

    #[pyo3(signature = (upper = false))]
    fn median(&self, upper: bool) -> PyResult<Wives> {
        let choice = if upper { MedianChoice::Upper } else { MedianChoice::Lower };
        Ok(median_report(&self.inner, choice).map_err(value_error)?.matching.wives().to_vec())
    }

    /// `(wives, (sM, sW, delta, beta))` minimising `delta`.
    fn sex_equal(&self) -> PyResult<(Wives, Scores)> {
        let (mu, _) = sex_equal_bruteforce(&self.inner).map_err(value_error)?;
        Ok((mu.wives().to_vec(), scores_of(&self.inner, &mu)))
    }

    /// `(wives, (sM, sW, delta, beta))` minimising `beta`.
    fn balanced(&self) -> PyResult<(Wives, Scores)> {
        let (mu, _) = balanced_bruteforce(&self.inner).map_err(value_error)?;
        Ok((mu.wives().to_vec(), scores_of(&self.inner, &mu)))
    }

    fn scores(&self, wives: Wives) -> PyResult<Scores> {
        let mu = Matching::from_wives(&wives, self.inner.n_women()).map_err(value_error)?;
        Ok(scores_of(&self.inner, &mu))
    }

    fn __repr__(&self) -> String {
        format!("Instance(n_men={}, n_women={})", self.inner.n_men(), self.inner.n_women())
    }
}

/// A directed acyclic graph read as the poset of its transitive closure.
#[pyclass(frozen, module = "pyrotaposet")]
struct Poset {
    inner: Dag,
}

#[pymethods]
impl Poset {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Dag::new(n, &edges).map(|inner| Poset { inner }).map_err(value_error)
    }

    /// Reads the `DAG <p> <q>` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_dag(text).map(|inner| Poset { inner }).map_err(value_error)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn is_downset(&self, set: Vec<usize>) -> bool {
        self.inner.is_downset(&set)
    }

    fn pathwidth(&self) -> PyResult<usize> {
        Ok(pathwidth_exact_tiny(&self.inner).map_err(value_error)?.0)
    }

    /// Counts downsets along `decomposition` (`PD` text), or along an
    /// optimal decomposition for small posets.
    #[pyo3(signature = (decomposition = None))]
    fn count_downsets(&self, decomposition: Option<&str>) -> PyResult<BigUint> {
        let x = match decomposition {
            Some(text) => {
                to_nice(&self.inner, &parse_decomposition(text).map_err(value_error)?).map_err(value_error)?
            }
            None => pathwidth_exact_tiny(&self.inner).map_err(value_error)?.1,
        };
        count_downsets(&self.inner, &x).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Poset(n={}, edges={})", self.inner.len(), self.inner.edges().len())
    }
}

/// Builds an instance whose rotation poset is `poset`, in one of the models
/// `complete`, `bounded3`, `attr6`, `list2inf` or `range`.
#[pyfunction]
#[pyo3(signature = (poset, model, decomposition = None))]
fn realize_poset(poset: &Poset, model: &str, decomposition: Option<&str>) -> PyResult<Instance> {
    let h = &poset.inner;
    let inner = match model {
        "complete" => realize::realize_complete(h),
        "bounded3" => realize::realize_bounded3(h),
        "attr6" => realize::realize_attr6(h).map(|(inst, _)| inst),
        "list2inf" => realize::realize_list2inf(h).map(|r| r.instance),
        "range" => {
            let x = match decomposition {
                Some(text) => parse_decomposition(text).and_then(|x| to_nice(h, &x)),
                None => pathwidth_exact_tiny(h).map(|(_, x)| x),
            };
            x.and_then(|x| realize::realize_range(h, &x))
        }
        other => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    inner.map(|inner| Instance { inner }).map_err(value_error)
}

#[pyfunction]
fn check_realization(poset: &Poset, instance: &Instance) -> PyResult<bool> {
    realize::check_realization(&poset.inner, &instance.inner).map_err(value_error)
}

#[pymodule]
fn pyrotaposet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Poset>()?;
    m.add_function(wrap_pyfunction!(realize_poset, m)?)?;
    m.add_function(wrap_pyfunction!(check_realization, m)?)?;
    Ok(())
}
