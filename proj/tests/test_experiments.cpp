#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dsglm/csv.hpp"
#include "dsglm/experiments.hpp"
#include "oracle_helpers.hpp"

using dsglm::CovariateLaw;
using dsglm::Dataset;
using dsglm::Estimator;
using dsglm::LinkSpec;
using dsglm::SweepResult;
using dsglm::SweepSpec;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

SweepSpec small_sweep(std::uint64_t seed) {
    SweepSpec spec;
    spec.synthetic.link = LinkSpec::logistic();
    spec.synthetic.theta_star = Eigen::VectorXd::Constant(1, 0.5);
    spec.synthetic.tau_n = 3.0;
    spec.synthetic.n = 4000;
    spec.synthetic.covariate_law = CovariateLaw::uniform_unit_cube(1);
    spec.alphas = {0.5, 1.0};
    spec.estimators = {Estimator::PseudoMLE, Estimator::InverseWeighting};
    spec.replications = 8;
    spec.master_seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("csv loader on a minimal file") {
    const auto path = temp_file("dsglm_min.csv");
    write_text(path, "x,y\n1.0,1\n2.0,0\n");
    const Dataset data = dsglm::csv::load_csv(path.string(), "y");
    CHECK(data.n() == 2);
    CHECK(data.dim() == 1);
    CHECK(data.n_pos == 1);
    CHECK(data.X(0, 0) == 1.0);
    CHECK(data.y[0] == 1.0);
    CHECK(data.origin.kind == dsglm::Origin::Kind::Ingested);
}

TEST_CASE("csv loader maps two-class labels minority to one") {
    const auto path = temp_file("dsglm_lab.csv");
    write_text(path, "f1,f2,cls\n0.1,1.0,neg\n0.2,2.0,neg\n0.3,3.0,pos\n");
    const Dataset data = dsglm::csv::load_csv(path.string(), "cls");
    CHECK(data.n_pos == 1);
    CHECK(data.y[2] == 1.0);
    CHECK(data.dim() == 2);

    const auto path2 = temp_file("dsglm_lab2.csv");
    write_text(path2, "f1,cls\n0.1,2\n0.2,2\n0.3,1\n");
    const Dataset numeric = dsglm::csv::load_csv(path2.string(), "cls");
    CHECK(numeric.n_pos == 1);
    CHECK(numeric.y[2] == 1.0);
}

TEST_CASE("csv loader handles quoting and reports precise errors") {
    const auto quoted = temp_file("dsglm_quoted.csv");
    write_text(quoted, "\"a,b\",y\r\n\"1.5\",1\r\n2.5,0\r\n");
    const Dataset data = dsglm::csv::load_csv(quoted.string(), "y");
    CHECK(data.n() == 2);
    CHECK(data.X(0, 0) == 1.5);

    const auto missing = temp_file("dsglm_missing.csv");
    write_text(missing, "a,b\n1,0\n");
    try {
        dsglm::csv::load_csv(missing.string(), "y");
        FAIL("expected MissingColumn");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::MissingColumn);
    }

    const auto nonnum = temp_file("dsglm_nonnum.csv");
    write_text(nonnum, "a,b,y\n1,hello,0\n2,3,1\n");
    try {
        dsglm::csv::load_csv(nonnum.string(), "y");
        FAIL("expected NonNumericFeature");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::NonNumericFeature);
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }

    const auto nonbin = temp_file("dsglm_nonbin.csv");
    write_text(nonbin, "a,y\n1,0\n2,1\n3,2\n");
    try {
        dsglm::csv::load_csv(nonbin.string(), "y");
        FAIL("expected NonBinaryLabel");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::NonBinaryLabel);
    }

    const auto empty = temp_file("dsglm_empty.csv");
    write_text(empty, "a,y\n");
    try {
        dsglm::csv::load_csv(empty.string(), "y");
        FAIL("expected EmptyFile");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::EmptyFile);
    }
}

TEST_CASE("csv loader on a 130:1-shaped table") {
    dsglm::SyntheticSpec spec;
    spec.link = LinkSpec::logistic();
    spec.theta_star = Eigen::VectorXd::Zero(10);
    spec.tau_n = std::log(130.0);  // positive rate 1/131
    spec.n = 4177;
    spec.covariate_law = CovariateLaw::uniform_unit_cube(10);
    spec.seed = 404;
    const Dataset gen = dsglm::generate(spec);
    const auto path = temp_file("dsglm_abalone_shaped.csv");
    write_text(path, dsglm::csv::dataset_to_csv(gen));

    const Dataset data = dsglm::csv::load_csv(path.string(), "y");
    CHECK(data.n() == 4177);
    CHECK(data.dim() == 10);
    CHECK(data.n_pos == gen.n_pos);
    // 4 binomial SEs around n / 131
    CHECK(std::abs(static_cast<double>(data.n_pos) - 4177.0 / 131.0) <
          4.0 * std::sqrt(4177.0 * (1.0 / 131.0) * (130.0 / 131.0)));
    CHECK(data.X == gen.X);
}

TEST_CASE("csv loader on an 8.6:1-shaped table") {
    dsglm::SyntheticSpec spec;
    spec.link = LinkSpec::logistic();
    spec.theta_star = Eigen::VectorXd::Zero(7);
    spec.tau_n = std::log(8.6);  // positive rate 1/9.6
    spec.n = 336;
    spec.covariate_law = CovariateLaw::uniform_unit_cube(7);
    spec.seed = 808;
    const Dataset gen = dsglm::generate(spec);
    const auto path = temp_file("dsglm_ecoli_shaped.csv");
    write_text(path, dsglm::csv::dataset_to_csv(gen));
    const Dataset data = dsglm::csv::load_csv(path.string(), "y");
    CHECK(data.n() == 336);
    CHECK(data.dim() == 7);
    CHECK(std::abs(static_cast<double>(data.n_pos) - 336.0 / 9.6) <
          4.0 * std::sqrt(336.0 * (1.0 / 9.6) * (8.6 / 9.6)));
}

TEST_CASE("extreme scores stay finite through the log-loss clip") {
    // tau = 40 pushes predicted probabilities below the 1e-12 clip
    std::string body = "x,y\n";
    for (int i = 0; i < 40; ++i) {
        body += std::to_string(0.3 + 0.01 * i) + ",";
        body += (i % 4 == 0) ? "1" : "0";
        body += "\n";
    }
    const auto path = temp_file("dsglm_extreme.csv");
    write_text(path, body);
    dsglm::RealDataSpec spec;
    spec.csv_path = path.string();
    spec.alphas = {1.0};
    spec.replications = 3;
    spec.tau_rule = dsglm::TauRule::Fixed;
    spec.tau_fixed = 40.0;
    spec.master_seed = 77;
    const SweepResult result = dsglm::run_real_data(spec);
    for (std::size_t e = 0; e < result.estimators.size(); ++e) {
        const auto& cell = result.cells[0][e];
        if (cell.failures < cell.replications) {
            CHECK(std::isfinite(cell.mean));
            // clipped log-loss cannot exceed -log(1e-12)
            CHECK(cell.mean <= -std::log(1e-12) + 1.0);
        }
    }
}

TEST_CASE("dataset csv round trip preserves values exactly") {
    const Dataset data = oracle::make_patterned_dataset(37, 3, 5);
    const auto path = temp_file("dsglm_roundtrip.csv");
    write_text(path, dsglm::csv::dataset_to_csv(data));
    const Dataset back = dsglm::csv::load_csv(path.string(), "y");
    CHECK(back.X == data.X);
    CHECK(back.y == data.y);
}

TEST_CASE("sweep aggregates match the CI formula exactly") {
    const SweepResult result = dsglm::run_mse_sweep(small_sweep(11));
    for (std::size_t a = 0; a < result.alphas.size(); ++a) {
        for (std::size_t e = 0; e < result.estimators.size(); ++e) {
            const auto& series = result.losses[a][e];
            const auto& cell = result.cells[a][e];
            REQUIRE(cell.failures == 0);
            double mean = 0.0;
            for (const auto& l : series) mean += l.value();
            mean /= static_cast<double>(series.size());
            double ss = 0.0;
            for (const auto& l : series)
                ss += (l.value() - mean) * (l.value() - mean);
            const double sd =
                std::sqrt(ss / (static_cast<double>(series.size()) - 1.0));
            const double hw =
                1.96 * sd / std::sqrt(static_cast<double>(series.size()));
            CHECK(std::abs(cell.mean - mean) < 1e-12);
            CHECK(std::abs(cell.ci_half_width - hw) < 1e-12);
            CHECK(cell.replications == 8);
        }
    }
}

TEST_CASE("sweep report round trip") {
    const SweepResult result = dsglm::run_mse_sweep(small_sweep(17));
    const std::string csv = dsglm::to_csv(result);
    const SweepResult parsed = dsglm::parse_sweep_csv(csv);
    CHECK(dsglm::to_csv(parsed) == csv);
    CHECK(parsed.metric == "mse");
    CHECK(parsed.alphas == result.alphas);
}

TEST_CASE("sweep is deterministic and thread-count independent") {
    SweepSpec one = small_sweep(23);
    one.threads = 1;
    SweepSpec two = small_sweep(23);
    two.threads = 2;
    const std::string csv1 = dsglm::to_csv(dsglm::run_mse_sweep(one));
    const std::string csv2 = dsglm::to_csv(dsglm::run_mse_sweep(two));
    CHECK(csv1 == csv2);

    SweepSpec other = small_sweep(24);
    CHECK(dsglm::to_csv(dsglm::run_mse_sweep(other)) != csv1);
}

TEST_CASE("alpha grid membership does not change the per-rep datasets") {
    SweepSpec narrow = small_sweep(31);
    narrow.alphas = {0.5};
    narrow.estimators = {Estimator::FullSample};
    SweepSpec wide = small_sweep(31);
    wide.alphas = {0.25, 0.5, 1.0};
    wide.estimators = {Estimator::FullSample};

    const SweepResult rn = dsglm::run_mse_sweep(narrow);
    const SweepResult rw = dsglm::run_mse_sweep(wide);
    // the full-sample fit sees only the per-replication dataset
    for (int r = 0; r < narrow.replications; ++r) {
        CHECK(rn.losses[0][0][static_cast<std::size_t>(r)].value() ==
              rw.losses[1][0][static_cast<std::size_t>(r)].value());
    }
}

TEST_CASE("single replication at alpha = 1 collapses across estimators") {
    SweepSpec spec = small_sweep(41);
    spec.alphas = {1.0};
    spec.replications = 1;
    spec.estimators = {Estimator::PseudoMLE, Estimator::InverseWeighting,
                       Estimator::ConditionalMLE, Estimator::NaiveRefit,
                       Estimator::ExactMLE, Estimator::FullSample};
    const SweepResult result = dsglm::run_mse_sweep(spec);
    const double base = result.cells[0][5].mean;  // full sample
    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        CHECK(std::abs(result.cells[0][e].mean - base) < 1e-6);
    }
}

TEST_CASE("empty estimator set produces a header-only report") {
    SweepSpec spec = small_sweep(43);
    spec.estimators = {};
    const SweepResult result = dsglm::run_mse_sweep(spec);
    CHECK(dsglm::to_csv(result) ==
          "alpha,estimator,metric,mean,ci_half_width,replications,failures\n");
}

TEST_CASE("real-data harness: constant predictor scores log 2") {
    // all-zero feature: every fit stalls at theta = 0 and predicts 1/2
    std::string body = "x,y\n";
    for (int i = 0; i < 30; ++i) {
        body += "0,";
        body += (i % 2 == 0) ? "1" : "0";
        body += "\n";
    }
    const auto path = temp_file("dsglm_const.csv");
    write_text(path, body);

    dsglm::RealDataSpec spec;
    spec.csv_path = path.string();
    spec.label_column = "y";
    spec.alphas = {1.0};
    spec.replications = 4;
    spec.tau_rule = dsglm::TauRule::Fixed;
    spec.tau_fixed = 0.0;
    spec.master_seed = 5;
    const SweepResult result = dsglm::run_real_data(spec);
    CHECK(result.metric == "logloss");
    for (std::size_t e = 0; e < result.estimators.size(); ++e) {
        CHECK(std::abs(result.cells[0][e].mean - std::log(2.0)) < 1e-12);
        CHECK(result.cells[0][e].failures == 0);
    }
}

TEST_CASE("real-data harness smoke run on a 28:1-shaped table") {
    dsglm::SyntheticSpec gen;
    gen.link = LinkSpec::logistic();
    gen.theta_star = Eigen::VectorXd::Constant(8, 0.25);
    gen.tau_n = 2.45;  // positive rate near 1/29 once theta shifts it
    gen.n = 1484;
    gen.covariate_law = CovariateLaw::uniform_unit_cube(8);
    gen.seed = 2718;
    const Dataset data = dsglm::generate(gen);
    const auto path = temp_file("dsglm_yeast_shaped.csv");
    write_text(path, dsglm::csv::dataset_to_csv(data));

    dsglm::RealDataSpec spec;
    spec.csv_path = path.string();
    spec.replications = 25;
    spec.master_seed = 99;
    spec.threads = 2;
    const SweepResult result = dsglm::run_real_data(spec);
    REQUIRE(result.alphas.size() == 6);
    for (std::size_t a = 0; a < result.alphas.size(); ++a) {
        for (std::size_t e = 0; e < result.estimators.size(); ++e) {
            const auto& cell = result.cells[a][e];
            CHECK(cell.valid());
            CHECK(std::isfinite(cell.mean));
            CHECK(cell.mean > 0.0);
            CHECK(std::isfinite(cell.ci_half_width));
        }
    }
    // paired differences exist against the pseudo baseline
    const int iw = result.estimator_index(Estimator::InverseWeighting);
    REQUIRE(iw >= 0);
    CHECK(std::isfinite(result.diff_vs_pseudo[0][static_cast<std::size_t>(iw)].mean));
}

TEST_CASE("standardization and G-frame scoring flags") {
    dsglm::SyntheticSpec gen;
    gen.link = LinkSpec::logistic();
    gen.theta_star = Eigen::VectorXd::Constant(3, 0.4);
    gen.tau_n = 1.5;
    gen.n = 600;
    gen.covariate_law = CovariateLaw::uniform_unit_cube(3);
    gen.seed = 1912;
    const auto path = temp_file("dsglm_flags.csv");
    write_text(path, dsglm::csv::dataset_to_csv(dsglm::generate(gen)));

    dsglm::RealDataSpec spec;
    spec.csv_path = path.string();
    spec.alphas = {0.5};
    spec.replications = 5;
    spec.tau_rule = dsglm::TauRule::Fixed;
    spec.tau_fixed = 1.5;
    spec.master_seed = 3;

    const SweepResult plain = dsglm::run_real_data(spec);
    spec.standardize = true;
    const SweepResult standardized = dsglm::run_real_data(spec);
    spec.standardize = false;
    spec.score_via_g = true;
    const SweepResult rescored = dsglm::run_real_data(spec);

    for (const SweepResult* r : {&plain, &standardized, &rescored}) {
        CHECK(std::isfinite(r->cells[0][0].mean));
        CHECK(r->cells[0][0].failures == 0);
    }
    // the flags change the fit frame and the scoring frame respectively
    CHECK(plain.cells[0][0].mean != standardized.cells[0][0].mean);
    CHECK(plain.cells[0][0].mean != rescored.cells[0][0].mean);
}

TEST_CASE("degenerate splits are fatal after 100 attempts") {
    const auto path = temp_file("dsglm_tiny2.csv");
    write_text(path, "x,y\n1.0,1\n2.0,0\n");
    dsglm::RealDataSpec spec;
    spec.csv_path = path.string();
    spec.replications = 2;
    spec.master_seed = 1;
    spec.tau_rule = dsglm::TauRule::Fixed;
    spec.tau_fixed = 0.0;
    try {
        dsglm::run_real_data(spec);
        FAIL("expected DegenerateSplit");
    } catch (const dsglm::Error& e) {
        CHECK(e.code() == dsglm::ErrorCode::DegenerateSplit);
    }
}

TEST_CASE("tau from positive rate") {
    CHECK(oracle::rel_err(dsglm::tau_from_positive_rate(0.0345),
                          std::log(1.0 / 0.0345 - 1.0)) < 1e-15);
    CHECK(std::abs(dsglm::tau_from_positive_rate(0.0345) - 3.33) < 0.01);
}

TEST_CASE("default alpha grid clips to (0, 1]") {
    const auto grid = dsglm::default_alpha_grid(0.2);
    CHECK(grid.front() == 0.1);
    CHECK(grid.back() == 1.0);
    for (double a : grid) {
        CHECK(a > 0.0);
        CHECK(a <= 1.0);
    }
}
