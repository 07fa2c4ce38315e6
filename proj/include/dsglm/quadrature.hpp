#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "dsglm/errors.hpp"

namespace dsglm::quad {

// Vector-valued integrand: writes n_out components at point t.
using VectorFn1D = std::function<void(double t, double* out)>;

struct QuadResult {
    Eigen::VectorXd value;
    Eigen::VectorXd abs_error;
    std::int64_t evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK constants).
constexpr int kGK = 8;  // nonnegative Kronrod nodes
constexpr double kXgk[kGK] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[kGK] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
// Gauss weights attach to the odd-index Kronrod nodes and the center.
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Segment {
    double a, b;
    Eigen::VectorXd kronrod;
    Eigen::VectorXd error;  // per-component |kronrod - gauss|
    double worst;           // max over components, queue priority
    bool operator<(const Segment& other) const { return worst < other.worst; }
};

inline Segment evaluate_segment(const VectorFn1D& fn, int n_out, double a,
                                double b, std::vector<double>& scratch) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    Eigen::VectorXd kron = Eigen::VectorXd::Zero(n_out);
    Eigen::VectorXd gauss = Eigen::VectorXd::Zero(n_out);
    scratch.resize(static_cast<std::size_t>(n_out));

    for (int i = 0; i < kGK; ++i) {
        const int n_sides = (kXgk[i] == 0.0) ? 1 : 2;
        for (int side = 0; side < n_sides; ++side) {
            const double t = center + (side == 0 ? -1.0 : 1.0) * half * kXgk[i];
            fn(t, scratch.data());
            for (int c = 0; c < n_out; ++c) {
                kron[c] += kWgk[i] * scratch[static_cast<std::size_t>(c)];
            }
            if (i % 2 == 1 || i == 7) {
                const double wg = kWg[i / 2];
                for (int c = 0; c < n_out; ++c) {
                    gauss[c] += wg * scratch[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    kron *= half;
    gauss *= half;

    Segment seg;
    seg.a = a;
    seg.b = b;
    seg.error = (kron - gauss).cwiseAbs();
    seg.worst = seg.error.maxCoeff();
    seg.kronrod = std::move(kron);
    return seg;
}

}  // namespace detail

// Globally adaptive GK 7/15: repeatedly bisect the segment with the largest
// error until every component satisfies
//   total_error_c <= max(abs_tol, rel_tol * |integral_c|).
inline QuadResult integrate_1d(const VectorFn1D& fn, int n_out, double a,
                               double b, double rel_tol = 1e-10,
                               double abs_tol = 1e-14,
                               int max_segments = 4000) {
    require(n_out >= 1, ErrorCode::InvalidArgument, "n_out must be >= 1");
    require(b > a, ErrorCode::InvalidArgument, "integration bounds reversed");

    std::vector<double> scratch;
    std::priority_queue<detail::Segment> segments;
    segments.push(detail::evaluate_segment(fn, n_out, a, b, scratch));
    std::int64_t evals = 15;

    Eigen::VectorXd total = segments.top().kronrod;
    Eigen::VectorXd total_error = segments.top().error;

    auto converged = [&]() {
        for (int c = 0; c < n_out; ++c) {
            if (total_error[c] > std::max(abs_tol, rel_tol * std::abs(total[c]))) {
                return false;
            }
        }
        return true;
    };

    while (!converged()) {
        if (static_cast<int>(segments.size()) >= max_segments) {
            fail(ErrorCode::QuadratureFailure,
                 "adaptive quadrature did not converge within " +
                     std::to_string(max_segments) + " segments");
        }
        detail::Segment worst = segments.top();
        segments.pop();
        total -= worst.kronrod;
        total_error -= worst.error;

        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            fail(ErrorCode::QuadratureFailure,
                 "adaptive quadrature hit the resolution limit");
        }
        detail::Segment left =
            detail::evaluate_segment(fn, n_out, worst.a, mid, scratch);
        detail::Segment right =
            detail::evaluate_segment(fn, n_out, mid, worst.b, scratch);
        evals += 30;
        total += left.kronrod + right.kronrod;
        total_error += left.error + right.error;
        segments.push(std::move(left));
        segments.push(std::move(right));
    }

    QuadResult result;
    result.value = std::move(total);
    result.abs_error = std::move(total_error);
    result.evaluations = evals;
    for (int c = 0; c < n_out; ++c) {
        require(std::isfinite(result.value[c]), ErrorCode::QuadratureFailure,
                "quadrature produced a non-finite value");
    }
    return result;
}

inline double integrate_scalar_1d(const std::function<double(double)>& fn,
                                  double a, double b, double rel_tol = 1e-10,
                                  double abs_tol = 1e-14) {
    VectorFn1D wrapped = [&fn](double t, double* out) { out[0] = fn(t); };
    return integrate_1d(wrapped, 1, a, b, rel_tol, abs_tol).value[0];
}

// Box integrand: writes n_out components at point x (dim components).
using VectorFnBox =
    std::function<void(const Eigen::VectorXd& x, double* out)>;

namespace detail {

inline Eigen::VectorXd integrate_box_recursive(const VectorFnBox& fn, int n_out,
                                               const Eigen::VectorXd& lower,
                                               const Eigen::VectorXd& upper,
                                               Eigen::VectorXd& point, int axis,
                                               double rel_tol, double abs_tol) {
    const int dim = static_cast<int>(lower.size());
    VectorFn1D level = [&](double t, double* out) {
        point[axis] = t;
        if (axis + 1 == dim) {
            fn(point, out);
        } else {
            Eigen::VectorXd inner = integrate_box_recursive(
                fn, n_out, lower, upper, point, axis + 1, rel_tol * 0.1,
                abs_tol * 0.1);
            for (int c = 0; c < n_out; ++c) out[c] = inner[c];
        }
    };
    return integrate_1d(level, n_out, lower[axis], upper[axis], rel_tol,
                        abs_tol)
        .value;
}

}  // namespace detail

// Iterated adaptive integration over an axis-aligned box, dim <= 3.
inline QuadResult integrate_box(const VectorFnBox& fn, int n_out,
                                const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper,
                                double rel_tol = 1e-10,
                                double abs_tol = 1e-13) {
    const int dim = static_cast<int>(lower.size());
    require(dim >= 1 && dim <= 3, ErrorCode::UnsupportedDimension,
            "box quadrature supports dimension 1..3, got " +
                std::to_string(dim));
    require(upper.size() == dim, ErrorCode::InvalidArgument,
            "box bounds dimension mismatch");
    for (int j = 0; j < dim; ++j) {
        require(upper[j] > lower[j], ErrorCode::InvalidArgument,
                "box bounds reversed");
    }
    Eigen::VectorXd point(dim);
    QuadResult result;
    result.value = detail::integrate_box_recursive(fn, n_out, lower, upper,
                                                   point, 0, rel_tol, abs_tol);
    result.abs_error = Eigen::VectorXd::Constant(
        n_out, rel_tol * result.value.cwiseAbs().maxCoeff());
    result.evaluations = -1;  // not tracked through the recursion
    return result;
}

}  // namespace dsglm::quad
