#pragma once

#include <Eigen/Core>
#include <string>

#include "dsglm/dataset.hpp"
#include "dsglm/errors.hpp"
#include "dsglm/link.hpp"
#include "dsglm/objectives.hpp"
#include "dsglm/optimizer.hpp"

namespace dsglm {

namespace detail {

inline void check_fittable(const Dataset& data) {
    require(data.n() >= 1, ErrorCode::InvalidArgument, "empty dataset");
    require(!data.degenerate(), ErrorCode::DegenerateLabels,
            "dataset needs at least one positive and one negative row "
            "(n_pos = " + std::to_string(data.n_pos) + " of " +
            std::to_string(data.n()) + ")");
}

inline FitResult fit_objective(const ObjectiveSpec& spec, const Dataset& data,
                               const FitConfig& cfg, Estimator tag) {
    check_fittable(data);
    SmoothObjective fn = [&](const Eigen::VectorXd& theta, double* value,
                             Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
        ObjectiveEval eval = evaluate_objective(spec, data, theta,
                                                grad != nullptr, hess != nullptr);
        if (eval.bad_row.has_value()) {
            fail(ErrorCode::NonFinite,
                 "non-finite likelihood term at row " +
                     std::to_string(*eval.bad_row));
        }
        if (value) *value = eval.value;
        if (grad) *grad = std::move(eval.grad);
        if (hess) *hess = std::move(eval.hess);
    };
    FitResult res = maximize(fn, data.dim(), cfg);
    res.estimator = tag;
    return res;
}

}  // namespace detail

// Pseudo maximum likelihood: Bernoulli terms plus (1-y) log alpha, minus the
// log of the downsample-averaged normalizer J_N(theta).
inline FitResult fit_pseudo_mle(const Dataset& data, double tau_n, double alpha,
                                const LinkSpec& link,
                                const FitConfig& cfg = {}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Pseudo;
    spec.tau = tau_n;
    spec.alpha = alpha;
    spec.link = link;
    return detail::fit_objective(spec, data, cfg, Estimator::PseudoMLE);
}

// Negatives upweighted by 1/alpha.
inline FitResult fit_inverse_weighting(const Dataset& data, double tau_n,
                                       double alpha, const LinkSpec& link,
                                       const FitConfig& cfg = {}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::InverseWeighting;
    spec.tau = tau_n;
    spec.alpha = alpha;
    spec.link = link;
    return detail::fit_objective(spec, data, cfg, Estimator::InverseWeighting);
}

// Bernoulli likelihood under the transformed link G.
inline FitResult fit_conditional_mle(const Dataset& data, double tau_n,
                                     double alpha, const LinkSpec& link,
                                     const FitConfig& cfg = {}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Conditional;
    spec.tau = tau_n;
    spec.alpha = alpha;
    spec.link = link;
    return detail::fit_objective(spec, data, cfg, Estimator::ConditionalMLE);
}

// Plain Bernoulli fit under F on the downsample, ignoring alpha. Biased on
// downsampled data; provided as the baseline that bias tests exercise.
inline FitResult fit_naive_refit(const Dataset& data, double tau_n,
                                 const LinkSpec& link,
                                 const FitConfig& cfg = {}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Bernoulli;
    spec.tau = tau_n;
    spec.link = link;
    return detail::fit_objective(spec, data, cfg, Estimator::NaiveRefit);
}

// Exact downsample MLE: the normalizer integral over a known covariate
// density, evaluated by adaptive quadrature (d <= 3).
inline FitResult fit_exact_mle(const Dataset& data, double tau_n, double alpha,
                               const LinkSpec& link,
                               const CovariateLaw& density,
                               const FitConfig& cfg = {}) {
    require(data.dim() <= 3, ErrorCode::UnsupportedDimension,
            "exact MLE quadrature supports d <= 3, got " +
                std::to_string(data.dim()));
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Exact;
    spec.tau = tau_n;
    spec.alpha = alpha;
    spec.link = link;
    spec.density = &density;
    return detail::fit_objective(spec, data, cfg, Estimator::ExactMLE);
}

// Bernoulli MLE under F on the full dataset; the alpha = 1 reference path.
inline FitResult fit_full_sample(const Dataset& data, double tau_n,
                                 const LinkSpec& link,
                                 const FitConfig& cfg = {}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Bernoulli;
    spec.tau = tau_n;
    spec.link = link;
    return detail::fit_objective(spec, data, cfg, Estimator::FullSample);
}

// Dispatch on the estimator tag; `density` is required for ExactMLE only.
inline FitResult fit(Estimator estimator, const Dataset& data, double tau_n,
                     double alpha, const LinkSpec& link, const FitConfig& cfg = {},
                     const CovariateLaw* density = nullptr) {
    switch (estimator) {
        case Estimator::PseudoMLE:
            return fit_pseudo_mle(data, tau_n, alpha, link, cfg);
        case Estimator::InverseWeighting:
            return fit_inverse_weighting(data, tau_n, alpha, link, cfg);
        case Estimator::ConditionalMLE:
            return fit_conditional_mle(data, tau_n, alpha, link, cfg);
        case Estimator::NaiveRefit:
            return fit_naive_refit(data, tau_n, link, cfg);
        case Estimator::ExactMLE:
            require(density != nullptr, ErrorCode::InvalidArgument,
                    "exact MLE needs a covariate density");
            return fit_exact_mle(data, tau_n, alpha, link, *density, cfg);
        case Estimator::FullSample:
            return fit_full_sample(data, tau_n, link, cfg);
    }
    fail(ErrorCode::InvalidArgument, "unknown estimator");
}

}  // namespace dsglm
