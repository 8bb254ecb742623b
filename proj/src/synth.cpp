#include "reprolab/synth.hpp"

#include <random>

namespace reprolab {

void SubclassTaskSpec::validate() const {
    if (k_s < 2 || k_t < 1 || m < 1) throw std::invalid_argument("task spec: counts must be >= 1");
    if (m * k_t > k_s) throw std::invalid_argument("task spec: m*k_t must be <= k_s");
    if (side_t > side_s) throw std::invalid_argument("task spec: side_t must be <= side_s");
    if (side_t < 1) throw std::invalid_argument("task spec: side_t must be >= 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("task spec: noise_sigma must be >= 0");
    if (n_train < 1 || n_test < 1) throw std::invalid_argument("task spec: dataset sizes must be >= 1");
}

namespace {

Dataset sample_dataset(const SubclassTaskSpec& spec, const DenseTable& centroids,
                       std::size_t n, std::mt19937_64& rng) {
    Dataset ds;
    ds.spec = spec;
    ds.inputs = DenseTable(n, spec.d_t());
    ds.labels.resize(n);
    std::uniform_int_distribution<std::size_t> pick_sub(0, spec.m - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t off = (spec.side_s - spec.side_t) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = i % spec.k_t; // round-robin keeps classes balanced
        const std::size_t s = t * spec.m + pick_sub(rng);
        ds.labels[i] = t;
        for (std::size_t r = 0; r < spec.side_t; ++r) {
            for (std::size_t c = 0; c < spec.side_t; ++c) {
                const std::size_t src = (r + off) * spec.side_s + (c + off);
                double v = centroids.at(s, src);
                if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(rng);
                ds.inputs.at(i, r * spec.side_t + c) = v;
            }
        }
    }
    return ds;
}

} // namespace

GeneratedTask generate_task(const SubclassTaskSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    DenseTable centroids(spec.k_s, spec.d_s());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : centroids.values) x = normal(rng);

    GeneratedTask task;
    // make_model normalizes the centroid rows; the samples below must crop
    // the same unit-norm images the model scores against.
    task.model = make_model(Arch::Linear, spec.d_s(), spec.k_s, spec.seed, &centroids);
    const DenseTable& unit_centroids = task.model.weights[0];

    task.true_assignment.assign(spec.k_s, -1);
    for (std::size_t s = 0; s < spec.m * spec.k_t; ++s) {
        task.true_assignment[s] = static_cast<std::ptrdiff_t>(s / spec.m);
    }

    task.train = sample_dataset(spec, unit_centroids, spec.n_train, rng);
    task.test = sample_dataset(spec, unit_centroids, spec.n_test, rng);
    return task;
}

} // namespace reprolab
