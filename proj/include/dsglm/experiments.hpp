#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dsglm/csv.hpp"
#include "dsglm/dataset.hpp"
#include "dsglm/errors.hpp"
#include "dsglm/estimators.hpp"
#include "dsglm/rng.hpp"
#include "dsglm/sampling.hpp"

namespace dsglm {

namespace detail {

// Stream tags: all randomness in a run derives from
// (master_seed, tag, replication [, grid index, attempt]).
constexpr std::uint64_t kTagGenerate = 0xA1;
constexpr std::uint64_t kTagDownsample = 0xA2;
constexpr std::uint64_t kTagSplit = 0xA3;
constexpr std::uint64_t kTagTrainDownsample = 0xA4;

// Run fn(0..count-1) on a bounded pool. Work items write to preallocated
// slots, so results are identical for any thread count.
template <typename Fn>
void parallel_for(int threads, std::int64_t count, const Fn& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = static_cast<int>(
        std::min<std::int64_t>(threads, count));
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

struct SweepSpec {
    SyntheticSpec synthetic;
    std::vector<double> alphas;
    std::vector<Estimator> estimators;
    int replications = 500;
    std::uint64_t master_seed = 0;
    FitConfig fit;
    int threads = 1;
};

struct CellStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double ci_half_width = std::numeric_limits<double>::quiet_NaN();
    int replications = 0;  // configured total
    int failures = 0;      // excluded from the statistics
    bool valid() const { return failures <= replications / 10; }
};

// Per-(alpha, estimator) aggregates plus the raw per-replication losses the
// aggregates were computed from (kept for paired analyses).
struct SweepResult {
    std::string metric;  // "mse" or "logloss"
    std::vector<double> alphas;
    std::vector<Estimator> estimators;
    std::vector<std::vector<CellStats>> cells;           // [alpha][estimator]
    std::vector<std::vector<CellStats>> diff_vs_pseudo;  // est minus pseudo
    std::vector<std::vector<std::vector<std::optional<double>>>> losses;

    int estimator_index(Estimator e) const {
        for (std::size_t i = 0; i < estimators.size(); ++i) {
            if (estimators[i] == e) return static_cast<int>(i);
        }
        return -1;
    }
};

namespace detail {

inline CellStats aggregate(const std::vector<std::optional<double>>& losses) {
    CellStats s;
    s.replications = static_cast<int>(losses.size());
    double sum = 0.0;
    int count = 0;
    for (const auto& l : losses) {
        if (l.has_value()) {
            sum += *l;
            ++count;
        }
    }
    s.failures = s.replications - count;
    if (count == 0) return s;
    s.mean = sum / count;
    if (count >= 2) {
        double ss = 0.0;
        for (const auto& l : losses) {
            if (l.has_value()) ss += (*l - s.mean) * (*l - s.mean);
        }
        const double sd = std::sqrt(ss / (count - 1));
        s.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(count));
    } else {
        s.ci_half_width = 0.0;
    }
    return s;
}

inline void finalize_result(SweepResult& result) {
    const int n_alpha = static_cast<int>(result.alphas.size());
    const int n_est = static_cast<int>(result.estimators.size());
    const int pseudo = result.estimator_index(Estimator::PseudoMLE);

    result.cells.assign(static_cast<std::size_t>(n_alpha), {});
    result.diff_vs_pseudo.assign(static_cast<std::size_t>(n_alpha), {});
    for (int a = 0; a < n_alpha; ++a) {
        auto& row = result.cells[static_cast<std::size_t>(a)];
        auto& diff_row = result.diff_vs_pseudo[static_cast<std::size_t>(a)];
        row.resize(static_cast<std::size_t>(n_est));
        diff_row.resize(static_cast<std::size_t>(n_est));
        for (int e = 0; e < n_est; ++e) {
            const auto& series =
                result.losses[static_cast<std::size_t>(a)][static_cast<std::size_t>(e)];
            row[static_cast<std::size_t>(e)] = aggregate(series);
            if (pseudo >= 0 && e != pseudo) {
                std::vector<std::optional<double>> diffs(series.size());
                const auto& base = result.losses[static_cast<std::size_t>(a)]
                                                [static_cast<std::size_t>(pseudo)];
                for (std::size_t r = 0; r < series.size(); ++r) {
                    if (series[r].has_value() && base[r].has_value()) {
                        diffs[r] = *series[r] - *base[r];
                    }
                }
                diff_row[static_cast<std::size_t>(e)] = aggregate(diffs);
            }
        }
    }
}

}  // namespace detail

// Monte Carlo MSE sweep: per replication r, one synthetic dataset from
// stream (master_seed, r); per grid point, one downsample from stream
// (master_seed, r, alpha index); every requested estimator fitted on it.
// Fit failures (errors or non-convergence) are counted and excluded.
inline SweepResult run_mse_sweep(const SweepSpec& spec) {
    require(spec.replications >= 1, ErrorCode::InvalidArgument,
            "replications must be >= 1");
    require(!spec.alphas.empty(), ErrorCode::InvalidArgument,
            "alpha grid must be nonempty");
    for (double a : spec.alphas) check_alpha(a);
    spec.synthetic.validate();
    const bool wants_exact =
        std::find(spec.estimators.begin(), spec.estimators.end(),
                  Estimator::ExactMLE) != spec.estimators.end();
    if (wants_exact) {
        require(spec.synthetic.covariate_law.density != nullptr,
                ErrorCode::InvalidArgument,
                "exact MLE sweeps need a covariate density");
        require(spec.synthetic.covariate_law.dim <= 3,
                ErrorCode::UnsupportedDimension,
                "exact MLE sweeps support d <= 3");
    }

    const int n_alpha = static_cast<int>(spec.alphas.size());
    const int n_est = static_cast<int>(spec.estimators.size());
    const int reps = spec.replications;

    SweepResult result;
    result.metric = "mse";
    result.alphas = spec.alphas;
    result.estimators = spec.estimators;
    result.losses.assign(
        static_cast<std::size_t>(n_alpha),
        std::vector<std::vector<std::optional<double>>>(
            static_cast<std::size_t>(n_est),
            std::vector<std::optional<double>>(static_cast<std::size_t>(reps))));

    detail::parallel_for(spec.threads, reps, [&](std::int64_t r) {
        SyntheticSpec gen = spec.synthetic;
        gen.seed = rng::Stream::of(spec.master_seed,
                                   {detail::kTagGenerate,
                                    static_cast<std::uint64_t>(r)})
                       .next_u64();
        const Dataset data = generate(gen);
        for (int a = 0; a < n_alpha; ++a) {
            const std::uint64_t ds_seed =
                rng::Stream::of(spec.master_seed,
                                {detail::kTagDownsample,
                                 static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(a)})
                    .next_u64();
            const Dataset down = downsample(data, spec.alphas[a], ds_seed);
            for (int e = 0; e < n_est; ++e) {
                std::optional<double> loss;
                try {
                    const Estimator est = spec.estimators[static_cast<std::size_t>(e)];
                    const Dataset& input =
                        est == Estimator::FullSample ? data : down;
                    FitResult fr =
                        fit(est, input, gen.tau_n, spec.alphas[a], gen.link,
                            spec.fit, &gen.covariate_law);
                    if (fr.converged) {
                        loss = (fr.theta_hat - gen.theta_star).squaredNorm();
                    }
                } catch (const Error&) {
                    // counted as a failure
                }
                result.losses[static_cast<std::size_t>(a)][static_cast<std::size_t>(e)]
                             [static_cast<std::size_t>(r)] = loss;
            }
        }
    });

    detail::finalize_result(result);
    return result;
}

enum class TauRule { FromPositiveRate, Fixed };

struct RealDataSpec {
    std::string csv_path;
    std::string label_column = "y";
    std::vector<double> alphas;  // empty -> default grid around p1
    int replications = 500;
    double train_fraction = 0.8;
    TauRule tau_rule = TauRule::FromPositiveRate;
    double tau_fixed = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<Estimator> estimators{Estimator::PseudoMLE,
                                      Estimator::InverseWeighting};
    bool standardize = false;    // z-score features from train statistics
    bool score_via_g = false;    // score the test split in the downsample frame
    FitConfig fit;
    int threads = 1;
};

// Default real-data grid: multiples of the positive rate, clipped to (0,1].
inline std::vector<double> default_alpha_grid(double p1) {
    std::vector<double> grid;
    for (double m : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        grid.push_back(std::min(1.0, m * p1));
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// tau from the positive rate: 1 - F(tau) = p1 for the logistic link.
inline double tau_from_positive_rate(double p1) {
    require(p1 > 0.0 && p1 < 1.0, ErrorCode::InvalidArgument,
            "positive rate must lie in (0,1) to derive tau");
    return std::log(1.0 / p1 - 1.0);
}

// Repeated-holdout log-loss harness on an ingested dataset. Per replication:
// a fresh seeded train/test split, one downsample of the train rows per
// alpha, one fit per estimator, and the mean test log-loss of the fitted
// score. Splits that leave a label side without positives are redrawn up to
// 100 times, then the replication aborts the run.
inline SweepResult run_real_data(const RealDataSpec& spec,
                                 const LinkSpec& link = LinkSpec::logistic()) {
    require(spec.replications >= 1, ErrorCode::InvalidArgument,
            "replications must be >= 1");
    require(spec.train_fraction > 0.0 && spec.train_fraction < 1.0,
            ErrorCode::InvalidArgument, "train fraction must lie in (0,1)");
    require(std::find(spec.estimators.begin(), spec.estimators.end(),
                      Estimator::ExactMLE) == spec.estimators.end(),
            ErrorCode::InvalidArgument,
            "exact MLE needs a known covariate density; it is unavailable "
            "for ingested data");

    const Dataset data = csv::load_csv(spec.csv_path, spec.label_column);
    require(data.n_pos >= 1, ErrorCode::DegenerateLabels,
            "dataset has no positive rows");
    const double p1 = data.positive_rate();
    const double tau = spec.tau_rule == TauRule::FromPositiveRate
                           ? tau_from_positive_rate(p1)
                           : spec.tau_fixed;
    const std::vector<double> alphas =
        spec.alphas.empty() ? default_alpha_grid(p1) : spec.alphas;
    for (double a : alphas) check_alpha(a);

    const int n_alpha = static_cast<int>(alphas.size());
    const int n_est = static_cast<int>(spec.estimators.size());
    const int reps = spec.replications;
    const Eigen::Index n = data.n();
    const Eigen::Index n_train = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(
               std::floor(spec.train_fraction * static_cast<double>(n))));
    require(n_train < n, ErrorCode::InvalidArgument,
            "train fraction leaves no test rows");

    SweepResult result;
    result.metric = "logloss";
    result.alphas = alphas;
    result.estimators = spec.estimators;
    result.losses.assign(
        static_cast<std::size_t>(n_alpha),
        std::vector<std::vector<std::optional<double>>>(
            static_cast<std::size_t>(n_est),
            std::vector<std::optional<double>>(static_cast<std::size_t>(reps))));

    const double log_clip = std::log(1e-12);

    detail::parallel_for(spec.threads, reps, [&](std::int64_t r) {
        // Seeded 80/20 split; redraw while a side has no positive rows.
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        Dataset train, test;
        bool split_ok = false;
        for (int attempt = 0; attempt < 100 && !split_ok; ++attempt) {
            for (Eigen::Index i = 0; i < n; ++i)
                order[static_cast<std::size_t>(i)] = i;
            rng::Stream stream = rng::Stream::of(
                spec.master_seed,
                {detail::kTagSplit, static_cast<std::uint64_t>(r),
                 static_cast<std::uint64_t>(attempt)});
            rng::shuffle(order.begin(), order.end(), stream);

            auto take = [&](Eigen::Index begin, Eigen::Index count) {
                Eigen::MatrixXd X(count, data.dim());
                Eigen::VectorXd y(count);
                for (Eigen::Index k = 0; k < count; ++k) {
                    X.row(k) = data.X.row(order[static_cast<std::size_t>(begin + k)]);
                    y[k] = data.y[order[static_cast<std::size_t>(begin + k)]];
                }
                return Dataset::make(std::move(X), std::move(y), data.origin);
            };
            train = take(0, n_train);
            test = take(n_train, n - n_train);
            split_ok = train.n_pos >= 1 && test.n_pos >= 1;
        }
        if (!split_ok) {
            fail(ErrorCode::DegenerateSplit,
                 "no train/test split with positives on both sides after "
                 "100 attempts (replication " + std::to_string(r) + ")");
        }

        if (spec.standardize) {
            const Eigen::RowVectorXd mean = train.X.colwise().mean();
            Eigen::RowVectorXd sd =
                ((train.X.rowwise() - mean).array().square().colwise().sum() /
                 std::max<double>(1.0, static_cast<double>(train.n() - 1)))
                    .sqrt();
            for (int j = 0; j < train.dim(); ++j) {
                if (sd[j] <= 0.0) sd[j] = 1.0;
            }
            train.X = (train.X.rowwise() - mean).array().rowwise() / sd.array();
            test.X = (test.X.rowwise() - mean).array().rowwise() / sd.array();
        }

        for (int a = 0; a < n_alpha; ++a) {
            const std::uint64_t ds_seed =
                rng::Stream::of(spec.master_seed,
                                {detail::kTagTrainDownsample,
                                 static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(a)})
                    .next_u64();
            const Dataset down = downsample(train, alphas[a], ds_seed);
            for (int e = 0; e < n_est; ++e) {
                std::optional<double> loss;
                try {
                    const Estimator est = spec.estimators[static_cast<std::size_t>(e)];
                    const Dataset& input =
                        est == Estimator::FullSample ? train : down;
                    FitResult fr =
                        fit(est, input, tau, alphas[a], link, spec.fit);
                    if (fr.converged) {
                        double total = 0.0;
                        for (Eigen::Index i = 0; i < test.n(); ++i) {
                            const double z = tau + fr.theta_hat.dot(test.X.row(i));
                            double lp = log_sf(link, z);      // log P(Y=1|x)
                            double lq = log_cdf(link, z);     // log P(Y=0|x)
                            if (spec.score_via_g) {
                                const double sfz = std::exp(log_sf(link, z));
                                const double den =
                                    alphas[a] + (1.0 - alphas[a]) * sfz;
                                lp = log_sf(link, z) - std::log(den);
                                lq = std::log(alphas[a]) + log_cdf(link, z) -
                                     std::log(den);
                            }
                            lp = std::max(lp, log_clip);
                            lq = std::max(lq, log_clip);
                            total -= test.y[i] == 1.0 ? lp : lq;
                        }
                        loss = total / static_cast<double>(test.n());
                    }
                } catch (const Error& err) {
                    if (err.code() == ErrorCode::DegenerateSplit) throw;
                    // other fit errors are counted as failures
                }
                result.losses[static_cast<std::size_t>(a)][static_cast<std::size_t>(e)]
                             [static_cast<std::size_t>(r)] = loss;
            }
        }
    });

    detail::finalize_result(result);
    return result;
}

// --- Report serialization ---------------------------------------------
//
// CSV schema: alpha,estimator,metric,mean,ci_half_width,replications,failures
// with metric in {mse, logloss, loss_diff_vs_pseudo}. Doubles are written in
// shortest round-trip form, so parse_sweep_csv(to_csv(r)) recovers every
// statistic exactly.

inline std::string to_csv(const SweepResult& result) {
    std::string out = "alpha,estimator,metric,mean,ci_half_width,replications,failures\n";
    const int pseudo = result.estimator_index(Estimator::PseudoMLE);
    for (std::size_t a = 0; a < result.alphas.size(); ++a) {
        for (std::size_t e = 0; e < result.estimators.size(); ++e) {
            const CellStats& s = result.cells[a][e];
            out += csv::format_double(result.alphas[a]);
            out += ',';
            out += estimator_name(result.estimators[e]);
            out += ',';
            out += result.metric;
            out += ',';
            out += csv::format_double(s.mean);
            out += ',';
            out += csv::format_double(s.ci_half_width);
            out += ',';
            out += std::to_string(s.replications);
            out += ',';
            out += std::to_string(s.failures);
            out += '\n';
        }
        if (pseudo >= 0) {
            for (std::size_t e = 0; e < result.estimators.size(); ++e) {
                if (static_cast<int>(e) == pseudo) continue;
                const CellStats& s = result.diff_vs_pseudo[a][e];
                out += csv::format_double(result.alphas[a]);
                out += ',';
                out += estimator_name(result.estimators[e]);
                out += ",loss_diff_vs_pseudo,";
                out += csv::format_double(s.mean);
                out += ',';
                out += csv::format_double(s.ci_half_width);
                out += ',';
                out += std::to_string(s.replications);
                out += ',';
                out += std::to_string(s.failures);
                out += '\n';
            }
        }
    }
    return out;
}

// Parse the report CSV back into a SweepResult (statistics only; the raw
// per-replication losses are not part of the schema).
inline SweepResult parse_sweep_csv(const std::string& text) {
    auto records = csv::detail::parse_records(text);
    require(!records.empty(), ErrorCode::EmptyFile, "empty report");
    require(records.front().size() == 7, ErrorCode::IoError,
            "unexpected report header");

    SweepResult result;
    auto alpha_index = [&](double alpha) {
        for (std::size_t i = 0; i < result.alphas.size(); ++i) {
            if (result.alphas[i] == alpha) return static_cast<int>(i);
        }
        result.alphas.push_back(alpha);
        return static_cast<int>(result.alphas.size()) - 1;
    };
    auto est_index = [&](Estimator e) {
        const int idx = result.estimator_index(e);
        if (idx >= 0) return idx;
        result.estimators.push_back(e);
        return static_cast<int>(result.estimators.size()) - 1;
    };

    struct Row {
        int a, e;
        bool diff;
        CellStats stats;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        require(rec.size() == 7, ErrorCode::IoError, "short report row");
        Row row;
        double alpha, mean, ci;
        require(csv::detail::parse_double(rec[0], alpha) &&
                    csv::detail::parse_double(rec[3], mean) &&
                    csv::detail::parse_double(rec[4], ci),
                ErrorCode::IoError, "bad numeric field in report");
        row.a = alpha_index(alpha);
        row.e = est_index(estimator_from_name(rec[1]));
        if (rec[2] == "loss_diff_vs_pseudo") {
            row.diff = true;
        } else {
            row.diff = false;
            if (result.metric.empty()) result.metric = rec[2];
        }
        row.stats.mean = mean;
        row.stats.ci_half_width = ci;
        row.stats.replications = std::stoi(rec[5]);
        row.stats.failures = std::stoi(rec[6]);
        rows.push_back(row);
    }

    result.cells.assign(result.alphas.size(),
                        std::vector<CellStats>(result.estimators.size()));
    result.diff_vs_pseudo.assign(
        result.alphas.size(), std::vector<CellStats>(result.estimators.size()));
    for (const Row& row : rows) {
        auto& target = row.diff ? result.diff_vs_pseudo : result.cells;
        target[static_cast<std::size_t>(row.a)][static_cast<std::size_t>(row.e)] =
            row.stats;
    }
    return result;
}

}  // namespace dsglm
