#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dsglm/errors.hpp"

namespace dsglm {

// Latent-variable families for the binary GLM P(Y=1|x) = 1 - F(tau + theta'x).
//
// Logistic and Exponential have unscaled tail limits
//     h(u) = lim_{tau->inf} (1-F(tau+u)) / (1-F(tau)),
// Gaussian and Pareto need the argument scaled by r(tau):
//     g(u) = lim_{tau->inf} (1-F(tau + r(tau) u)) / (1-F(tau)).
//
// The closed enum is deliberate: derivatives and tail limits are hand-derived
// per family and checked against finite differences in the tests.
enum class Family { Logistic, Gaussian, Pareto, Exponential };

struct LinkSpec {
    Family family = Family::Logistic;
    double gamma = 0.0;  // Pareto tail index, required > 1

    static LinkSpec logistic() { return {Family::Logistic, 0.0}; }
    static LinkSpec gaussian() { return {Family::Gaussian, 0.0}; }
    static LinkSpec exponential() { return {Family::Exponential, 0.0}; }
    static LinkSpec pareto(double gamma) {
        require(gamma > 1.0, ErrorCode::InvalidArgument,
                "Pareto tail index must exceed 1, got " + std::to_string(gamma));
        return {Family::Pareto, gamma};
    }
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Logistic: return "logistic";
        case Family::Gaussian: return "gaussian";
        case Family::Pareto: return "pareto";
        case Family::Exponential: return "exponential";
    }
    return "?";
}

inline LinkSpec link_from_name(const std::string& name, double gamma = 2.0) {
    if (name == "logistic") return LinkSpec::logistic();
    if (name == "gaussian") return LinkSpec::gaussian();
    if (name == "exponential") return LinkSpec::exponential();
    if (name == "pareto") return LinkSpec::pareto(gamma);
    fail(ErrorCode::InvalidArgument, "unknown link family: " + name);
}

namespace detail {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

// log(1 + e^t) without overflow.
inline double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

inline double logistic_cdf(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Normal upper-tail pieces. erfc covers z up to ~36; beyond that the
// Mills-ratio asymptotic series takes over (alternating, truncation error
// below the first omitted term, < 1e-15 relative at the switch point).
inline double normal_tail_series(double z) {
    const double z2 = z * z;
    double term = 1.0, sum = 1.0, sign = -1.0, coef = 1.0;
    for (int k = 1; k <= 6; ++k) {
        coef *= static_cast<double>(2 * k - 1);
        term = coef / std::pow(z2, k);
        sum += sign * term;
        sign = -sign;
    }
    return sum;
}

inline double normal_log_sf(double z) {
    if (z < 36.0) return std::log(0.5 * std::erfc(z * kInvSqrt2));
    return -0.5 * z * z - kLogSqrt2Pi - std::log(z) +
           std::log(normal_tail_series(z));
}

inline double normal_hazard(double z) {
    if (z < 30.0) {
        const double sf = 0.5 * std::erfc(z * kInvSqrt2);
        return kInvSqrt2Pi * std::exp(-0.5 * z * z) / sf;
    }
    return z / normal_tail_series(z);
}

inline void check_pareto_support(double z) {
    require(z >= 1.0, ErrorCode::DomainError,
            "Pareto link evaluated outside its support [1, inf): z = " +
                std::to_string(z));
}

}  // namespace detail

// --- CDF and log-domain primitives --------------------------------------
//
// Likelihood code must use log_cdf / log_sf, never log(cdf(z)): in the
// rare-event regime F(tau + theta'x) sits within 1e-16 of 1 and the direct
// log is catastrophically lossy.

inline double log_cdf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic:
            return -detail::softplus(-z);
        case Family::Gaussian:
            return detail::normal_log_sf(-z);
        case Family::Exponential:
            if (z <= 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(-std::expm1(-z));
        case Family::Pareto: {
            detail::check_pareto_support(z);
            const double t = -link.gamma * std::log(z);
            if (t == 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(-std::expm1(t));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double log_sf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic:
            return -detail::softplus(z);
        case Family::Gaussian:
            return detail::normal_log_sf(z);
        case Family::Exponential:
            return z <= 0.0 ? 0.0 : -z;
        case Family::Pareto:
            detail::check_pareto_support(z);
            return -link.gamma * std::log(z);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double cdf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic:
            return detail::logistic_cdf(z);
        case Family::Gaussian:
            return 0.5 * std::erfc(-z * detail::kInvSqrt2);
        case Family::Exponential:
            return z <= 0.0 ? 0.0 : -std::expm1(-z);
        case Family::Pareto:
            detail::check_pareto_support(z);
            return -std::expm1(-link.gamma * std::log(z));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double sf(const LinkSpec& link, double z) {
    return std::exp(log_sf(link, z));
}

inline double pdf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic: {
            const double p = detail::logistic_cdf(z);
            return p * (1.0 - p);
        }
        case Family::Gaussian:
            return detail::kInvSqrt2Pi * std::exp(-0.5 * z * z);
        case Family::Exponential:
            return z < 0.0 ? 0.0 : std::exp(-z);
        case Family::Pareto:
            detail::check_pareto_support(z);
            return link.gamma * std::pow(z, -link.gamma - 1.0);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// F^{(order)}(z) in closed form, order in {1,2,3}.
inline double derivative(const LinkSpec& link, double z, int order) {
    require(order >= 1 && order <= 3, ErrorCode::InvalidArgument,
            "derivative order must be 1, 2 or 3");
    switch (link.family) {
        case Family::Logistic: {
            const double p = detail::logistic_cdf(z);
            const double f = p * (1.0 - p);
            if (order == 1) return f;
            if (order == 2) return f * (1.0 - 2.0 * p);
            return f * (1.0 - 6.0 * p + 6.0 * p * p);
        }
        case Family::Gaussian: {
            const double f = detail::kInvSqrt2Pi * std::exp(-0.5 * z * z);
            if (order == 1) return f;
            if (order == 2) return -z * f;
            return (z * z - 1.0) * f;
        }
        case Family::Exponential: {
            if (z < 0.0) return 0.0;
            const double e = std::exp(-z);
            if (order == 1) return e;
            if (order == 2) return -e;
            return e;
        }
        case Family::Pareto: {
            detail::check_pareto_support(z);
            const double g = link.gamma;
            if (order == 1) return g * std::pow(z, -g - 1.0);
            if (order == 2) return -g * (g + 1.0) * std::pow(z, -g - 2.0);
            return g * (g + 1.0) * (g + 2.0) * std::pow(z, -g - 3.0);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// --- Hazard-style ratios used by the likelihood gradients ----------------
//
// pdf_over_sf  = F'/(1-F), pdf_over_cdf = F'/F, and their z-derivatives.
// Each is a closed form chosen to stay finite where the naive quotient
// would be 0/0 or tiny/tiny.

inline double pdf_over_sf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic:
            return detail::logistic_cdf(z);
        case Family::Gaussian:
            return detail::normal_hazard(z);
        case Family::Exponential:
            return z < 0.0 ? 0.0 : 1.0;
        case Family::Pareto:
            detail::check_pareto_support(z);
            return link.gamma / z;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double d_pdf_over_sf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic: {
            const double p = detail::logistic_cdf(z);
            return p * (1.0 - p);
        }
        case Family::Gaussian: {
            const double h = detail::normal_hazard(z);
            return h * (h - z);
        }
        case Family::Exponential:
            return 0.0;
        case Family::Pareto:
            detail::check_pareto_support(z);
            return -link.gamma / (z * z);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double pdf_over_cdf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic:
            return detail::logistic_cdf(-z);
        case Family::Gaussian:
            return detail::normal_hazard(-z);
        case Family::Exponential:
            if (z <= 0.0) return std::numeric_limits<double>::infinity();
            return 1.0 / std::expm1(z);
        case Family::Pareto: {
            detail::check_pareto_support(z);
            const double u = std::pow(z, -link.gamma);
            return link.gamma * u / (z * (1.0 - u));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double d_pdf_over_cdf(const LinkSpec& link, double z) {
    switch (link.family) {
        case Family::Logistic: {
            const double p = detail::logistic_cdf(z);
            return -p * (1.0 - p);
        }
        case Family::Gaussian: {
            const double q = detail::normal_hazard(-z);
            return -q * (q + z);
        }
        case Family::Exponential: {
            if (z <= 0.0) return -std::numeric_limits<double>::infinity();
            const double q = 1.0 / std::expm1(z);
            return -q * (1.0 + q);
        }
        case Family::Pareto: {
            detail::check_pareto_support(z);
            const double g = link.gamma;
            const double u = std::pow(z, -g);
            const double omu = 1.0 - u;
            return -g * u * (g + 1.0 - u) / (z * z * omu * omu);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// --- Downsampling score transform ----------------------------------------
//
// Keeping every positive and an alpha-fraction of negatives turns the link
// CDF F into G(z) = alpha F(z) / (1 - (1-alpha) F(z)); the downsampled pairs
// still follow a GLM with link G.

inline void check_alpha(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument,
            "downsampling rate must lie in (0, 1], got " + std::to_string(alpha));
}

inline double downsample_transform(double F_val, double alpha) {
    check_alpha(alpha);
    require(F_val >= 0.0 && F_val <= 1.0, ErrorCode::InvalidArgument,
            "F value outside [0, 1]");
    return alpha * F_val / (1.0 - (1.0 - alpha) * F_val);
}

inline double inverse_transform(double G_val, double alpha) {
    check_alpha(alpha);
    require(G_val >= 0.0 && G_val <= 1.0, ErrorCode::InvalidArgument,
            "G value outside [0, 1]");
    return G_val / (alpha + (1.0 - alpha) * G_val);
}

// --- Tail limits and scaling ----------------------------------------------

inline bool scaled_family(const LinkSpec& link) {
    return link.family == Family::Gaussian || link.family == Family::Pareto;
}

// h^{(order)}(u) for unscaled families, g^{(order)}(u) for scaled ones,
// order in 0..3.
inline double tail_limit(const LinkSpec& link, double u, int order) {
    require(order >= 0 && order <= 3, ErrorCode::InvalidArgument,
            "tail limit order must be in 0..3");
    switch (link.family) {
        case Family::Logistic:
        case Family::Gaussian:
        case Family::Exponential: {
            const double v = std::exp(-u);
            return (order % 2 == 0) ? v : -v;
        }
        case Family::Pareto: {
            require(u > -1.0, ErrorCode::DomainError,
                    "Pareto tail limit requires u > -1");
            const double g = link.gamma;
            double coef = 1.0;
            for (int k = 0; k < order; ++k) coef *= -(g + k);
            return coef * std::pow(1.0 + u, -g - order);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// r(tau): 1 for unscaled families, 1/tau for Gaussian, tau for Pareto.
inline double scaling(const LinkSpec& link, double tau) {
    switch (link.family) {
        case Family::Logistic:
        case Family::Exponential:
            return 1.0;
        case Family::Gaussian:
            require(tau > 0.0, ErrorCode::InvalidArgument,
                    "Gaussian scaling requires tau > 0");
            return 1.0 / tau;
        case Family::Pareto:
            require(tau > 0.0, ErrorCode::InvalidArgument,
                    "Pareto scaling requires tau > 0");
            return tau;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace dsglm
