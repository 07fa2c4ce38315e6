#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dsglm/errors.hpp"
#include "dsglm/link.hpp"
#include "dsglm/quadrature.hpp"
#include "dsglm/sampling.hpp"

namespace dsglm {

enum class MomentSource { EmpiricalSample, Quadrature };

// The two tail moments every asymptotic quantity is built from, with t the
// family's tail-limit function (h for unscaled links, g for scaled ones):
//   inner = E[ (t'(theta'X)^2 / t(theta'X)) X X^T ]
//   outer = E[ t'(theta'X) X ]
// plus E[X X^T] for the nonsingular-design check.
struct TailMoments {
    Eigen::MatrixXd inner;
    Eigen::VectorXd outer;
    Eigen::MatrixXd exx;
    MomentSource source = MomentSource::EmpiricalSample;
};

namespace detail {

inline void check_design(const Eigen::MatrixXd& exx) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(exx);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    require(es.eigenvalues().minCoeff() > 1e-12 * scale,
            ErrorCode::SingularMoment,
            "E[XX^T] is numerically singular");
}

}  // namespace detail

inline TailMoments tail_moments(const LinkSpec& link,
                                const Eigen::VectorXd& theta,
                                const Eigen::MatrixXd& sample) {
    const int d = static_cast<int>(theta.size());
    require(sample.cols() == d, ErrorCode::InvalidArgument,
            "sample dimension mismatch");
    require(sample.rows() >= 1, ErrorCode::InvalidArgument, "empty sample");

    TailMoments m;
    m.inner = Eigen::MatrixXd::Zero(d, d);
    m.outer = Eigen::VectorXd::Zero(d);
    m.exx = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
        const Eigen::VectorXd x = sample.row(i).transpose();
        const double u = theta.dot(x);
        const double t0 = tail_limit(link, u, 0);
        const double t1 = tail_limit(link, u, 1);
        m.inner += (t1 * t1 / t0) * (x * x.transpose());
        m.outer += t1 * x;
        m.exx += x * x.transpose();
    }
    const double inv_m = 1.0 / static_cast<double>(sample.rows());
    m.inner *= inv_m;
    m.outer *= inv_m;
    m.exx *= inv_m;
    m.source = MomentSource::EmpiricalSample;
    detail::check_design(m.exx);
    return m;
}

inline TailMoments tail_moments(const LinkSpec& link,
                                const Eigen::VectorXd& theta,
                                const CovariateLaw& density,
                                double rel_tol = 1e-12) {
    const int d = density.dim;
    require(theta.size() == d, ErrorCode::InvalidArgument,
            "theta dimension mismatch");
    require(d <= 3, ErrorCode::UnsupportedDimension,
            "quadrature moments support d <= 3");

    const int n_sym = d * (d + 1) / 2;
    const int n_out = 2 * n_sym + d;
    quad::VectorFnBox fn = [&](const Eigen::VectorXd& x, double* out) {
        const double mu = density.density(x);
        const double u = theta.dot(x);
        const double t0 = tail_limit(link, u, 0);
        const double t1 = tail_limit(link, u, 1);
        int k = 0;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                out[k++] = (t1 * t1 / t0) * x[a] * x[b] * mu;
        for (int a = 0; a < d; ++a) out[k++] = t1 * x[a] * mu;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) out[k++] = x[a] * x[b] * mu;
    };
    quad::QuadResult q =
        quad::integrate_box(fn, n_out, density.lower, density.upper, rel_tol);

    TailMoments m;
    m.inner = Eigen::MatrixXd::Zero(d, d);
    m.outer = Eigen::VectorXd::Zero(d);
    m.exx = Eigen::MatrixXd::Zero(d, d);
    int k = 0;
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            m.inner(a, b) = m.inner(b, a) = q.value[k++];
        }
    for (int a = 0; a < d; ++a) m.outer[a] = q.value[k++];
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            m.exx(a, b) = m.exx(b, a) = q.value[k++];
        }
    m.source = MomentSource::Quadrature;
    detail::check_design(m.exx);
    return m;
}

// Sample-size regime used to translate V into a predicted finite-n MSE.
struct RateSpec {
    double n = 0.0;
    double tau_n = 0.0;
};

struct AsymptoticReport {
    Eigen::MatrixXd V;
    Eigen::MatrixXd V_inv;          // valid only when condition_ok
    double c = 0.0;                 // limit of (1-alpha)^2 (1-F(tau)) / alpha
    double rate_scale =             // a_n = sqrt(n (1-F(tau))) [* r(tau)]
        std::numeric_limits<double>::quiet_NaN();
    double predicted_mse_trace =    // tr(V^{-1}) / a_n^2
        std::numeric_limits<double>::quiet_NaN();
    bool condition_ok = false;
    double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    MomentSource moment_source = MomentSource::EmpiricalSample;
};

// c for a concrete (alpha, tau) pair.
inline double c_from_alpha(const LinkSpec& link, double alpha, double tau) {
    check_alpha(alpha);
    return (1.0 - alpha) * (1.0 - alpha) * sf(link, tau) / alpha;
}

namespace detail {

inline AsymptoticReport build_report(const TailMoments& m, double c,
                                     double rate_scale) {
    require(c >= 0.0, ErrorCode::InvalidArgument, "c must be nonnegative");
    AsymptoticReport rep;
    rep.moment_source = m.source;
    rep.c = c;
    rep.V = m.inner - c * (m.outer * m.outer.transpose());
    rep.V = 0.5 * (rep.V + rep.V.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.V);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.condition_ok = rep.min_eigenvalue > 1e-12 * scale;
    if (rep.condition_ok) {
        rep.V_inv = es.eigenvectors() *
                    es.eigenvalues().cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose();
        if (std::isfinite(rate_scale)) {
            rep.rate_scale = rate_scale;
            rep.predicted_mse_trace =
                rep.V_inv.trace() / (rate_scale * rate_scale);
        }
    }
    return rep;
}

}  // namespace detail

// V = inner - c * outer outer^T for the unscaled regime (rate sqrt(n(1-F))).
inline AsymptoticReport covariance_V(const LinkSpec& link,
                                     const TailMoments& moments, double c,
                                     std::optional<RateSpec> rate = {}) {
    double rate_scale = std::numeric_limits<double>::quiet_NaN();
    if (rate.has_value()) {
        rate_scale = std::sqrt(rate->n * sf(link, rate->tau_n));
    }
    return detail::build_report(moments, c, rate_scale);
}

// Scaled regime: same algebra with the g-family tail limits; the rate picks
// up the extra factor r(tau).
inline AsymptoticReport covariance_V_scaled(const LinkSpec& link,
                                            const TailMoments& moments, double c,
                                            std::optional<RateSpec> rate = {}) {
    double rate_scale = std::numeric_limits<double>::quiet_NaN();
    if (rate.has_value()) {
        rate_scale = std::sqrt(rate->n * sf(link, rate->tau_n)) *
                     scaling(link, rate->tau_n);
    }
    return detail::build_report(moments, c, rate_scale);
}

struct OptimalAlphaResult {
    double alpha_star = 0.0;      // clamped to (0, 1]
    double alpha_star_raw = 0.0;  // closed form before clamping
    bool out_of_regime = false;   // raw value exceeded 1
    double trace_outer = 0.0;     // tr(outer outer^T) = |outer|^2
    double trace_inner = 0.0;     // tr(inner)
};

// alpha* = 2 (1-F(tau)) tr(outer outer^T) / tr(inner). Values above 1 mean
// tau is too small for the rare-event regime; they are flagged and clamped
// rather than rejected.
inline OptimalAlphaResult optimal_alpha(const LinkSpec& link,
                                        const TailMoments& moments,
                                        double tau_n) {
    OptimalAlphaResult res;
    res.trace_outer = moments.outer.squaredNorm();
    res.trace_inner = moments.inner.trace();
    require(res.trace_inner > 0.0, ErrorCode::InvalidArgument,
            "tail moment tr(inner) must be positive");
    res.alpha_star_raw =
        2.0 * sf(link, tau_n) * res.trace_outer / res.trace_inner;
    res.out_of_regime = res.alpha_star_raw > 1.0;
    res.alpha_star = res.out_of_regime ? 1.0 : res.alpha_star_raw;
    return res;
}

// Efficiency cost over an alpha grid. Primary cost is
//   (p1 + alpha (1-p1)) * tr(V(alpha)^{-1}),
// the surrogate divides by tr(V(alpha)) instead; the two coincide for d = 1.
// Grid points whose V fails the positive-definiteness condition carry +inf.
struct EfficiencyCurve {
    std::vector<double> alphas;
    std::vector<double> cost;            // c0 * (p1 + a(1-p1)) tr(V^{-1})
    std::vector<double> cost_surrogate;  // c0 * (p1 + a(1-p1)) / tr(V)
    std::vector<bool> condition_ok;
    int argmin_index = -1;               // over `cost`, valid points only
    double alpha_star = 0.0;
    bool alpha_star_out_of_regime = false;
    double cost_constant_c0 = 1.0;
    double condition_number_kappa =      // kappa of V at alpha*
        std::numeric_limits<double>::quiet_NaN();
    double p1 = 0.0;
};

inline EfficiencyCurve efficiency_cost_curve(const LinkSpec& link,
                                             const TailMoments& moments,
                                             double tau_n, double p1,
                                             const std::vector<double>& alphas,
                                             double c0 = 1.0) {
    require(!alphas.empty(), ErrorCode::InvalidArgument, "empty alpha grid");
    require(p1 >= 0.0 && p1 <= 1.0, ErrorCode::InvalidArgument,
            "p1 must lie in [0, 1]");

    EfficiencyCurve curve;
    curve.alphas = alphas;
    curve.p1 = p1;
    curve.cost_constant_c0 = c0;

    const double s = sf(link, tau_n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        check_alpha(alphas[i]);
        const double c = (1.0 - alphas[i]) * (1.0 - alphas[i]) * s / alphas[i];
        AsymptoticReport rep = detail::build_report(moments, c,
                                                    std::numeric_limits<double>::quiet_NaN());
        const double sampled = p1 + alphas[i] * (1.0 - p1);
        curve.condition_ok.push_back(rep.condition_ok);
        if (rep.condition_ok) {
            curve.cost.push_back(c0 * sampled * rep.V_inv.trace());
            curve.cost_surrogate.push_back(c0 * sampled / rep.V.trace());
            if (curve.cost.back() < best) {
                best = curve.cost.back();
                curve.argmin_index = static_cast<int>(i);
            }
        } else {
            curve.cost.push_back(std::numeric_limits<double>::infinity());
            curve.cost_surrogate.push_back(
                std::numeric_limits<double>::infinity());
        }
    }
    require(curve.argmin_index >= 0, ErrorCode::InvalidArgument,
            "no alpha in the grid satisfies the positive-definite condition");

    OptimalAlphaResult star = optimal_alpha(link, moments, tau_n);
    curve.alpha_star = star.alpha_star;
    curve.alpha_star_out_of_regime = star.out_of_regime;
    AsymptoticReport at_star = detail::build_report(
        moments, (1.0 - curve.alpha_star) * (1.0 - curve.alpha_star) * s /
                     curve.alpha_star,
        std::numeric_limits<double>::quiet_NaN());
    if (at_star.condition_ok) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at_star.V);
        curve.condition_number_kappa =
            es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    }
    return curve;
}

}  // namespace dsglm
