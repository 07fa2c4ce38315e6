#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "dsglm/dataset.hpp"
#include "dsglm/errors.hpp"
#include "dsglm/link.hpp"
#include "dsglm/rng.hpp"

namespace dsglm {

// Bounded covariate law with both a sampler and a density evaluator, so the
// same law serves the generator, the exact-MLE normalizer and the quadrature
// moments. The box must contain the support.
struct CovariateLaw {
    int dim = 1;
    Eigen::VectorXd lower;  // box, per coordinate
    Eigen::VectorXd upper;
    std::function<void(rng::Stream&, Eigen::Ref<Eigen::VectorXd>)> sample;
    std::function<double(const Eigen::VectorXd&)> density;
    std::string name;

    static CovariateLaw uniform_unit_cube(int dim) {
        require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
        CovariateLaw law;
        law.dim = dim;
        law.lower = Eigen::VectorXd::Zero(dim);
        law.upper = Eigen::VectorXd::Ones(dim);
        law.sample = [dim](rng::Stream& s, Eigen::Ref<Eigen::VectorXd> out) {
            for (int j = 0; j < dim; ++j) out[j] = s.next_double();
        };
        law.density = [](const Eigen::VectorXd&) { return 1.0; };
        law.name = "uniform_unit_cube";
        return law;
    }
};

struct SyntheticSpec {
    LinkSpec link;
    Eigen::VectorXd theta_star;
    double tau_n = 0.0;
    std::int64_t n = 0;
    CovariateLaw covariate_law;
    bool scaled = false;  // use P(Y=1|x) = 1 - F(tau + r(tau) theta'x)
    std::uint64_t seed = 0;

    void validate() const {
        require(n >= 1, ErrorCode::InvalidArgument, "sample size must be >= 1");
        require(theta_star.size() == covariate_law.dim, ErrorCode::InvalidArgument,
                "theta dimension must match the covariate law");
        require(std::isfinite(tau_n), ErrorCode::InvalidArgument,
                "tau must be finite");
    }
};

// Draw n i.i.d. pairs with P(Y=1|x) = 1 - F(tau + [r(tau)] theta'x).
// One stream drives the whole dataset; the result is a pure function of the
// spec (seed included).
inline Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const int d = spec.covariate_law.dim;
    const double rate_scale = spec.scaled ? scaling(spec.link, spec.tau_n) : 1.0;

    Eigen::MatrixXd X(spec.n, d);
    Eigen::VectorXd y(spec.n);
    rng::Stream stream = rng::Stream::of(spec.seed, {0x67656E01ull});
    Eigen::VectorXd row(d);
    for (std::int64_t i = 0; i < spec.n; ++i) {
        spec.covariate_law.sample(stream, row);
        X.row(i) = row;
        const double z = spec.tau_n + rate_scale * spec.theta_star.dot(row);
        const double p_pos = std::exp(log_sf(spec.link, z));
        y[i] = stream.bernoulli(p_pos) ? 1.0 : 0.0;
    }

    std::ostringstream summary;
    summary << family_name(spec.link.family) << " tau=" << spec.tau_n
            << " n=" << spec.n << " seed=" << spec.seed;
    return Dataset::make(std::move(X), std::move(y),
                         Origin::synthetic(summary.str()));
}

// Keep every positive row; keep each negative row independently with
// probability alpha. Row order is preserved and the draw is a pure function
// of (data, alpha, seed). Degenerate outputs (no negatives left) are legal
// here; fitters reject them downstream.
inline Dataset downsample(const Dataset& data, double alpha, std::uint64_t seed) {
    check_alpha(alpha);
    rng::Stream stream = rng::Stream::of(seed, {0x64730001ull});

    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(data.n_pos) +
                 static_cast<std::size_t>(
                     static_cast<double>(data.n_neg()) * alpha * 1.2) +
                 16);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.y[i] == 1.0 || stream.bernoulli(alpha)) keep.push_back(i);
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(keep.size()), data.dim());
    Eigen::VectorXd y(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        X.row(static_cast<Eigen::Index>(k)) = data.X.row(keep[k]);
        y[static_cast<Eigen::Index>(k)] = data.y[keep[k]];
    }
    return Dataset::make(std::move(X), std::move(y),
                         Origin::downsampled(alpha, data.n(), data.n_pos));
}

// Expected downsample size n (p1 + alpha (1 - p1)).
inline double expected_downsample_size(double n, double p1, double alpha) {
    require(p1 >= 0.0 && p1 <= 1.0, ErrorCode::InvalidArgument,
            "p1 must lie in [0, 1]");
    require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument,
            "alpha must lie in [0, 1]");
    return n * (p1 + alpha * (1.0 - p1));
}

}  // namespace dsglm
