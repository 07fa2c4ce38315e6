#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>

#include "dsglm/errors.hpp"

namespace dsglm {

// Where a dataset came from. Downsampled datasets remember the rate and the
// parent's size so reports can state the provenance.
struct Origin {
    enum class Kind { Synthetic, Ingested, Downsampled };

    Kind kind = Kind::Synthetic;
    std::string detail;          // generator summary or file path
    double alpha = 1.0;          // Downsampled only
    std::int64_t parent_n = 0;   // Downsampled only
    std::int64_t parent_n_pos = 0;

    static Origin synthetic(std::string summary) {
        Origin o;
        o.kind = Kind::Synthetic;
        o.detail = std::move(summary);
        return o;
    }
    static Origin ingested(std::string path) {
        Origin o;
        o.kind = Kind::Ingested;
        o.detail = std::move(path);
        return o;
    }
    static Origin downsampled(double alpha, std::int64_t parent_n,
                              std::int64_t parent_n_pos) {
        Origin o;
        o.kind = Kind::Downsampled;
        o.alpha = alpha;
        o.parent_n = parent_n;
        o.parent_n_pos = parent_n_pos;
        return o;
    }
};

// Covariate matrix plus aligned {0,1} labels. Immutable by convention after
// construction; fitters and sweeps share Dataset values across threads.
struct Dataset {
    Eigen::MatrixXd X;   // n x d
    Eigen::VectorXd y;   // n, entries 0.0 or 1.0
    std::int64_t n_pos = 0;
    Origin origin;

    std::int64_t n() const { return X.rows(); }
    int dim() const { return static_cast<int>(X.cols()); }
    std::int64_t n_neg() const { return n() - n_pos; }
    double positive_rate() const {
        return n() == 0 ? 0.0 : static_cast<double>(n_pos) / static_cast<double>(n());
    }
    // True when fitters can run: at least one row of each label.
    bool degenerate() const { return n_pos == 0 || n_pos == n(); }

    static Dataset make(Eigen::MatrixXd X, Eigen::VectorXd y, Origin origin) {
        require(X.rows() == y.size(), ErrorCode::InvalidArgument,
                "covariate rows and labels must be index-aligned");
        std::int64_t pos = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            require(y[i] == 0.0 || y[i] == 1.0, ErrorCode::InvalidArgument,
                    "labels must be 0 or 1");
            pos += static_cast<std::int64_t>(y[i]);
        }
        Dataset d;
        d.X = std::move(X);
        d.y = std::move(y);
        d.n_pos = pos;
        d.origin = std::move(origin);
        return d;
    }
};

}  // namespace dsglm
