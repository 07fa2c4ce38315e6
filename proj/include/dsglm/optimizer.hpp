#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dsglm/errors.hpp"

namespace dsglm {

enum class StepRule { NewtonWithBacktracking, GradientAscentBacktracking };

struct FitConfig {
    Eigen::VectorXd theta_init;  // empty -> zero vector
    double grad_tol = 1e-8;      // convergence threshold on the gradient inf-norm
    int max_iter = 200;
    StepRule step_rule = StepRule::NewtonWithBacktracking;
    double bt_shrink = 0.5;
    double armijo_c = 1e-4;
    int max_halvings = 60;
    // called once per accepted step with the new objective value
    std::function<void(int iteration, double value)> on_iteration;

    void validate() const {
        require(grad_tol > 0.0, ErrorCode::InvalidArgument, "grad_tol must be > 0");
        require(max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be >= 1");
    }
};

enum class Estimator {
    PseudoMLE,
    InverseWeighting,
    ConditionalMLE,
    NaiveRefit,
    ExactMLE,
    FullSample,
};

inline const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::PseudoMLE: return "pseudo";
        case Estimator::InverseWeighting: return "inverse_weighting";
        case Estimator::ConditionalMLE: return "conditional";
        case Estimator::NaiveRefit: return "naive";
        case Estimator::ExactMLE: return "exact";
        case Estimator::FullSample: return "full";
    }
    return "?";
}

inline Estimator estimator_from_name(const std::string& name) {
    if (name == "pseudo") return Estimator::PseudoMLE;
    if (name == "iw" || name == "inverse_weighting")
        return Estimator::InverseWeighting;
    if (name == "conditional") return Estimator::ConditionalMLE;
    if (name == "naive") return Estimator::NaiveRefit;
    if (name == "exact") return Estimator::ExactMLE;
    if (name == "full") return Estimator::FullSample;
    fail(ErrorCode::InvalidArgument, "unknown estimator: " + name);
}

enum class FitStatus { Converged, MaxIterExceeded, Diverged, Stalled };

inline const char* fit_status_name(FitStatus s) {
    switch (s) {
        case FitStatus::Converged: return "converged";
        case FitStatus::MaxIterExceeded: return "max_iter_exceeded";
        case FitStatus::Diverged: return "diverged";
        case FitStatus::Stalled: return "stalled";
    }
    return "?";
}

struct FitResult {
    Eigen::VectorXd theta_hat;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
    FitStatus status = FitStatus::Stalled;
    Estimator estimator = Estimator::FullSample;
};

// Smooth objective callback. Gradient / Hessian pointers may be null; a
// non-finite value at a trial point means "reject the step". The callback
// should throw only for genuinely broken states (NaN terms).
using SmoothObjective = std::function<void(
    const Eigen::VectorXd& theta, double* value, Eigen::VectorXd* grad,
    Eigen::MatrixXd* hess)>;

// Maximize via damped Newton with Armijo backtracking. When the Hessian is
// not negative definite (checked through a Cholesky factorization of -H)
// the step falls back to plain gradient ascent. The accepted-step sequence
// of objective values is non-decreasing.
inline FitResult maximize(const SmoothObjective& fn, int dim,
                          const FitConfig& cfg) {
    cfg.validate();
    Eigen::VectorXd theta = cfg.theta_init.size() == 0
                                ? Eigen::VectorXd::Zero(dim)
                                : cfg.theta_init;
    require(theta.size() == dim, ErrorCode::InvalidArgument,
            "theta_init dimension mismatch");

    FitResult res;
    double value = 0.0;
    Eigen::VectorXd grad(dim);
    Eigen::MatrixXd hess(dim, dim);
    const bool use_newton = cfg.step_rule == StepRule::NewtonWithBacktracking;

    fn(theta, &value, &grad, use_newton ? &hess : nullptr);
    require(std::isfinite(value), ErrorCode::NonFinite,
            "objective is not finite at the starting point");

    res.status = FitStatus::MaxIterExceeded;
    for (int iter = 0; iter <= cfg.max_iter; ++iter) {
        res.grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(res.grad_norm)) {
            fail(ErrorCode::NonFinite, "gradient is not finite");
        }
        if (res.grad_norm <= cfg.grad_tol) {
            // Separation guard: under a monotone likelihood the gradient
            // vanishes along a ray, so a tiny gradient alone does not mean
            // a maximum. Far from the start with curvature down at the
            // gradient-tolerance scale, report divergence instead.
            const double init_norm =
                cfg.theta_init.size() == 0
                    ? 0.0
                    : cfg.theta_init.lpNorm<Eigen::Infinity>();
            const bool far_out =
                theta.lpNorm<Eigen::Infinity>() > 10.0 * (1.0 + init_norm);
            if (use_newton && far_out &&
                hess.cwiseAbs().maxCoeff() < 100.0 * cfg.grad_tol) {
                res.status = FitStatus::Diverged;
                break;
            }
            res.status = FitStatus::Converged;
            res.converged = true;
            break;
        }
        if (iter == cfg.max_iter) break;
        if (theta.lpNorm<Eigen::Infinity>() > 1e10) {
            res.status = FitStatus::Diverged;
            break;
        }

        Eigen::VectorXd direction = grad;
        if (use_newton) {
            Eigen::LLT<Eigen::MatrixXd> llt(-hess);
            if (llt.info() == Eigen::Success) {
                Eigen::VectorXd newton = llt.solve(grad);
                if (newton.allFinite() && grad.dot(newton) > 0.0) {
                    direction = std::move(newton);
                }
            }
        }

        const double slope = grad.dot(direction);
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            const Eigen::VectorXd trial = theta + step * direction;
            double trial_value = -std::numeric_limits<double>::infinity();
            fn(trial, &trial_value, nullptr, nullptr);
            if (std::isfinite(trial_value) &&
                trial_value >= value + cfg.armijo_c * step * slope) {
                theta = trial;
                value = trial_value;
                accepted = true;
                break;
            }
            step *= cfg.bt_shrink;
        }
        if (!accepted) {
            res.status = FitStatus::Stalled;
            break;
        }

        fn(theta, &value, &grad, use_newton ? &hess : nullptr);
        res.iterations = iter + 1;
        if (cfg.on_iteration) cfg.on_iteration(res.iterations, value);
    }

    res.theta_hat = std::move(theta);
    res.objective = value;
    return res;
}

}  // namespace dsglm
