#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <optional>

#include "dsglm/dataset.hpp"
#include "dsglm/errors.hpp"
#include "dsglm/link.hpp"
#include "dsglm/quadrature.hpp"
#include "dsglm/sampling.hpp"

namespace dsglm {

// One evaluation of an average log-likelihood objective. `value` may be
// -inf (a legal "reject this theta" signal, e.g. outside a link's support);
// a NaN anywhere instead records the first offending row in `bad_row`.
struct ObjectiveEval {
    double value = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    std::optional<Eigen::Index> bad_row;

    bool usable() const { return !bad_row.has_value() && !std::isnan(value); }
};

namespace detail {

struct RowTerms {
    // Per-row pieces at z = tau + theta'x, all from closed forms:
    //   llik      contribution to the Bernoulli part
    //   score     d/dz of that contribution
    //   curv      d^2/dz^2 of that contribution
    double llik, score, curv;
};

}  // namespace detail

// Objective kinds share one evaluation core; they differ in the per-row
// weights and in a dataset-coupled normalizer (pseudo and exact only).
enum class ObjectiveKind {
    Bernoulli,          // y log(1-F) + (1-y) log F           (full / naive)
    InverseWeighting,   // y log(1-F) + ((1-y)/alpha) log F
    Conditional,        // Bernoulli under G = alpha F / (1-(1-alpha)F)
    Pseudo,             // Bernoulli + (1-y) log alpha - log J_N(theta)
    Exact,              // Bernoulli + (1-y) log alpha - log Integral(theta)
};

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Bernoulli;
    double tau = 0.0;
    double alpha = 1.0;
    LinkSpec link;
    const CovariateLaw* density = nullptr;  // Exact only
    double quad_rel_tol = 1e-10;
};

// Evaluate value / gradient / Hessian of the averaged objective at theta.
// Pass nullptr to skip gradient or Hessian work (line searches evaluate the
// value alone). The pseudo normalizer J_N(theta) and its derivatives are
// accumulated once per call, in the same O(N d) pass as the row terms.
inline ObjectiveEval evaluate_objective(const ObjectiveSpec& spec,
                                        const Dataset& data,
                                        const Eigen::VectorXd& theta,
                                        bool want_grad, bool want_hess) {
    const Eigen::Index n = data.n();
    const int d = data.dim();
    require(n >= 1, ErrorCode::InvalidArgument, "empty dataset");
    require(theta.size() == d, ErrorCode::InvalidArgument,
            "theta dimension mismatch");
    if (spec.kind != ObjectiveKind::Bernoulli) check_alpha(spec.alpha);

    const LinkSpec& link = spec.link;
    const double alpha = spec.alpha;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double log_alpha = std::log(alpha);
    const bool conditional = spec.kind == ObjectiveKind::Conditional;
    const bool has_alpha_const =
        spec.kind == ObjectiveKind::Pseudo || spec.kind == ObjectiveKind::Exact;
    const double neg_weight =
        spec.kind == ObjectiveKind::InverseWeighting ? 1.0 / alpha : 1.0;

    ObjectiveEval out;
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    if (want_grad) grad = Eigen::VectorXd::Zero(d);
    if (want_hess) hess = Eigen::MatrixXd::Zero(d, d);

    // Pseudo normalizer J_N(theta) = (1/N) sum_i [1 - (1-alpha) F(z_i)],
    // accumulated as alpha + (1-alpha) mean(1 - F) to keep precision when
    // F is within 1e-16 of 1.
    double j_sf_sum = 0.0;
    Eigen::VectorXd j_grad;
    Eigen::MatrixXd j_hess;
    const bool needs_jn = spec.kind == ObjectiveKind::Pseudo;
    if (needs_jn) {
        if (want_grad) j_grad = Eigen::VectorXd::Zero(d);
        if (want_hess) j_hess = Eigen::MatrixXd::Zero(d, d);
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = spec.tau + theta.dot(data.X.row(i));
        const bool pos = data.y[i] == 1.0;

        detail::RowTerms t{0.0, 0.0, 0.0};
        if (pos) {
            t.llik = log_sf(link, z);
        } else {
            t.llik = neg_weight * log_cdf(link, z);
            if (has_alpha_const) t.llik += log_alpha;
        }
        double den = 1.0;
        if (conditional) {
            // log G = log alpha + log F - log D, log(1-G) = log(1-F) - log D
            // with D = alpha + (1-alpha)(1-F).
            const double sfz = std::exp(log_sf(link, z));
            den = alpha + (1.0 - alpha) * sfz;
            t.llik += (pos ? 0.0 : log_alpha) - std::log(den);
        }
        if (std::isnan(t.llik)) {
            out.bad_row = i;
            return out;
        }
        if (std::isinf(t.llik)) {
            // theta puts this row outside the link support; signal a
            // rejectable step rather than an error.
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }

        if (want_grad || want_hess) {
            if (pos) {
                t.score = -pdf_over_sf(link, z);
                t.curv = -d_pdf_over_sf(link, z);
            } else {
                t.score = neg_weight * pdf_over_cdf(link, z);
                t.curv = neg_weight * d_pdf_over_cdf(link, z);
            }
            if (conditional) {
                const double f = pdf(link, z);
                const double fp = derivative(link, z, 2);
                t.score += (1.0 - alpha) * f / den;
                t.curv += (1.0 - alpha) * (fp * den + (1.0 - alpha) * f * f) /
                          (den * den);
            }
            if ((want_grad && !std::isfinite(t.score)) ||
                (want_hess && !std::isfinite(t.curv))) {
                out.bad_row = i;
                return out;
            }
        }

        value += t.llik;
        if (want_grad) grad += t.score * data.X.row(i).transpose();
        if (want_hess)
            hess += t.curv * (data.X.row(i).transpose() * data.X.row(i));

        if (needs_jn) {
            const double sfz = std::exp(log_sf(link, z));
            j_sf_sum += sfz;
            if (want_grad || want_hess) {
                const double f = pdf(link, z);
                if (want_grad)
                    j_grad -= (1.0 - alpha) * f * data.X.row(i).transpose();
                if (want_hess)
                    j_hess -= (1.0 - alpha) * derivative(link, z, 2) *
                              (data.X.row(i).transpose() * data.X.row(i));
            }
        }
    }

    value *= inv_n;
    if (want_grad) grad *= inv_n;
    if (want_hess) hess *= inv_n;

    if (needs_jn) {
        const double jn = alpha + (1.0 - alpha) * j_sf_sum * inv_n;
        if (!(jn > 0.0) || !std::isfinite(jn)) {
            out.bad_row = 0;
            return out;
        }
        value -= std::log(jn);
        if (want_grad || want_hess) j_grad *= inv_n;
        if (want_grad) grad -= j_grad / jn;
        if (want_hess) {
            j_hess *= inv_n;
            hess -= j_hess / jn;
            hess += (j_grad * j_grad.transpose()) / (jn * jn);
        }
    }

    if (spec.kind == ObjectiveKind::Exact) {
        require(spec.density != nullptr, ErrorCode::InvalidArgument,
                "exact likelihood needs a covariate density");
        const CovariateLaw& law = *spec.density;
        require(law.dim == d, ErrorCode::InvalidArgument,
                "density dimension mismatch");
        require(d <= 3, ErrorCode::UnsupportedDimension,
                "exact likelihood quadrature supports d <= 3");

        // One vector-valued pass: [ I, dI (d comps), d2I (upper triangle) ].
        const int n_hess = want_hess ? d * (d + 1) / 2 : 0;
        const int n_out = 1 + (want_grad ? d : 0) + n_hess;
        quad::VectorFnBox integrand = [&](const Eigen::VectorXd& x,
                                          double* comp) {
            const double mu = law.density(x);
            const double z = spec.tau + theta.dot(x);
            const double w = alpha + (1.0 - alpha) * std::exp(log_sf(link, z));
            int k = 0;
            comp[k++] = w * mu;
            if (want_grad || want_hess) {
                const double f = pdf(link, z);
                if (want_grad) {
                    for (int a = 0; a < d; ++a)
                        comp[k++] = -(1.0 - alpha) * f * x[a] * mu;
                }
                if (want_hess) {
                    const double fp = derivative(link, z, 2);
                    for (int a = 0; a < d; ++a)
                        for (int b = a; b < d; ++b)
                            comp[k++] = -(1.0 - alpha) * fp * x[a] * x[b] * mu;
                }
            }
        };
        quad::QuadResult q = quad::integrate_box(
            integrand, n_out, law.lower, law.upper, spec.quad_rel_tol);
        const double integral = q.value[0];
        require(integral > 0.0, ErrorCode::QuadratureFailure,
                "exact-likelihood normalizer is not positive");
        value -= std::log(integral);
        if (want_grad) {
            grad -= q.value.segment(1, d) / integral;
        }
        if (want_hess) {
            Eigen::MatrixXd d2(d, d);
            int k = 1 + d;
            for (int a = 0; a < d; ++a)
                for (int b = a; b < d; ++b) {
                    d2(a, b) = q.value[k];
                    d2(b, a) = q.value[k];
                    ++k;
                }
            const Eigen::VectorXd d1 = q.value.segment(1, d);
            hess -= d2 / integral;
            hess += (d1 * d1.transpose()) / (integral * integral);
        }
    }

    out.value = value;
    if (want_grad) out.grad = std::move(grad);
    if (want_hess) out.hess = std::move(hess);
    return out;
}

// Public entry point for the pseudo log-likelihood and its exact analytic
// derivatives, including the coupling through the shared normalizer.
inline ObjectiveEval pseudo_loglik(const Dataset& data,
                                   const Eigen::VectorXd& theta, double tau_n,
                                   double alpha, const LinkSpec& link,
                                   bool want_grad = true,
                                   bool want_hess = true) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::Pseudo;
    spec.tau = tau_n;
    spec.alpha = alpha;
    spec.link = link;
    ObjectiveEval eval =
        evaluate_objective(spec, data, theta, want_grad, want_hess);
    if (eval.bad_row.has_value()) {
        fail(ErrorCode::NonFinite,
             "non-finite likelihood term at row " +
                 std::to_string(*eval.bad_row));
    }
    return eval;
}

}  // namespace dsglm
